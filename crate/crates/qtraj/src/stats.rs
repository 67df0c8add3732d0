//! Small statistics helpers: least-squares fits used by the experiment
//! drivers and the validation suites.

/// Ordinary least-squares line `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Weighted least-squares line together with the parameter covariance.
#[derive(Debug, Clone, Copy)]
pub struct WeightedFit {
    pub slope: f64,
    pub intercept: f64,
    pub chi_squared: f64,
    pub var_slope: f64,
    pub var_intercept: f64,
    pub cov_slope_intercept: f64,
}

/// Weighted least-squares line with per-point standard deviations.
pub fn weighted_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> WeightedFit {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(xs.len(), sigmas.len());
    assert!(xs.len() >= 2, "need at least two points");
    let mut sw = 0.0;
    let mut swx = 0.0;
    let mut swy = 0.0;
    let mut swxx = 0.0;
    let mut swxy = 0.0;
    for ((&x, &y), &s) in xs.iter().zip(ys).zip(sigmas) {
        let w = 1.0 / (s * s);
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
    }
    let det = sw * swxx - swx * swx;
    let slope = (sw * swxy - swx * swy) / det;
    let intercept = (swxx * swy - swx * swxy) / det;
    let chi_squared = xs
        .iter()
        .zip(ys)
        .zip(sigmas)
        .map(|((&x, &y), &s)| {
            let r = (y - slope * x - intercept) / s;
            r * r
        })
        .sum();
    WeightedFit {
        slope,
        intercept,
        chi_squared,
        var_slope: sw / det,
        var_intercept: swxx / det,
        cov_slope_intercept: -swx / det,
    }
}

/// Weighted least-squares line; returns `(slope, intercept, chi_squared)`.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> (f64, f64, f64) {
    let fit = weighted_fit(xs, ys, sigmas);
    (fit.slope, fit.intercept, fit.chi_squared)
}

/// Chi-squared of data against a fixed model curve.
pub fn chi_squared(observed: &[f64], model: &[f64], sigmas: &[f64]) -> f64 {
    observed
        .iter()
        .zip(model)
        .zip(sigmas)
        .map(|((&o, &m), &s)| {
            let r = (o - m) / s;
            r * r
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (slope, intercept) = linear_fit(&xs, &ys);
        assert!((slope - 2.5).abs() < 1e-12);
        assert!((intercept + 1.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_fit_ignores_high_variance_outlier() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 1.0, 2.0, 100.0];
        let sigmas = [0.01, 0.01, 0.01, 1e6];
        let (slope, intercept, _) = weighted_linear_fit(&xs, &ys, &sigmas);
        assert!((slope - 1.0).abs() < 1e-6);
        assert!(intercept.abs() < 1e-6);
    }

    #[test]
    fn chi_squared_of_exact_model_is_zero() {
        let data = [1.0, 2.0];
        assert_eq!(chi_squared(&data, &data, &[0.1, 0.1]), 0.0);
    }
}
