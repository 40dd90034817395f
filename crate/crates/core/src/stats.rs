//! Small statistics and quadrature helpers used by the Monte Carlo drivers
//! and the residual evaluators.

/// Sample mean and standard error of the mean.
pub fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// z-score of `mean` against `reference` given the standard error.
/// Returns 0 when both the deviation and the spread vanish.
pub fn z_score(mean: f64, stderr: f64, reference: f64) -> f64 {
    let dev = mean - reference;
    if dev == 0.0 {
        0.0
    } else {
        dev / stderr
    }
}

/// Ordinary least-squares slope and intercept of y over x.
pub fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// 4-point Gauss-Legendre nodes and weights on the unit interval [0, 1].
pub const GAUSS4: [(f64, f64); 4] = [
    (0.069431844202973714, 0.17392742256872693),
    (0.33000947820757187, 0.32607257743127307),
    (0.66999052179242813, 0.32607257743127307),
    (0.93056815579702629, 0.17392742256872693),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_stderr_basic() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (slope, intercept) = ols_line(&x, &y);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss4_integrates_degree_seven_exactly() {
        // integral of x^7 over [0,1] = 1/8
        let q: f64 = GAUSS4.iter().map(|&(x, w)| w * x.powi(7)).sum();
        assert!((q - 0.125).abs() < 1e-15);
        // weights sum to one
        let s: f64 = GAUSS4.iter().map(|&(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
    }
}
