//! Least-squares line fits used for log-log scaling exponents.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub n: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`; `None` with fewer than two
/// points or no spread in `x`.
pub fn fit_line(pts: &[(f64, f64)]) -> Option<LineFit> {
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - slope * p.0 - intercept;
            e * e
        })
        .sum();
    Some(LineFit { slope, intercept, residual: (ss / nf).sqrt(), n })
}

/// Slope of `log₂ y` against `log₂ x` over the pairs with positive entries.
pub fn log2_slope(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.log2(), y.log2()))
        .collect();
    fit_line(&pts)
}

/// Fits over every contiguous window of `width` points.
pub fn window_fits(pts: &[(f64, f64)], width: usize) -> Vec<(usize, LineFit)> {
    if width < 2 || pts.len() < width {
        return Vec::new();
    }
    (0..=pts.len() - width).filter_map(|s| fit_line(&pts[s..s + width]).map(|f| (s, f))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let f = fit_line(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-14);
        assert!(fit_line(&[(1.0, 1.0)]).is_none());
        assert!(fit_line(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (1..8).map(|k| 2f64.powi(-k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.75)).collect();
        assert!((log2_slope(&xs, &ys).unwrap().slope + 0.75).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn slope_recovers_affine_data(a in -5.0f64..5.0, b in -5.0f64..5.0, k in 3usize..20) {
            let pts: Vec<(f64, f64)> = (0..k).map(|i| (i as f64, a * i as f64 + b)).collect();
            let f = fit_line(&pts).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-9);
            prop_assert_eq!(window_fits(&pts, 4).len(), k.saturating_sub(3));
        }
    }
}
