//! Least-squares fits of decay rates and convergence slopes.

use crate::error::{Error, Result};
use crate::timestepper::DiagnosticsRecord;

/// Relative floor below which a decaying quantity is considered lost in
/// solver noise.
pub const UNDERFLOW: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `|div u - h|`.
    Divergence,
    /// `|u|^2 / 2`.
    Energy,
    /// `|grad u|`.
    GradNorm,
}

impl Quantity {
    pub fn of(self, r: &DiagnosticsRecord) -> f64 {
        match self {
            Quantity::Divergence => r.div_norm_sq.sqrt(),
            Quantity::Energy => r.energy,
            Quantity::GradNorm => r.grad_norm_sq.sqrt(),
        }
    }
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Exponential decay rate `r` of `q(t) ~ exp(-r t)`, fitted over the tail
/// half of the series.
pub fn decay_fit(series: &[DiagnosticsRecord], quantity: Quantity) -> Result<f64> {
    let t: Vec<f64> = series.iter().map(|r| r.t).collect();
    let q: Vec<f64> = series.iter().map(|r| quantity.of(r)).collect();
    decay_rate(&t, &q)
}

/// [`decay_fit`] on raw samples.
pub fn decay_rate(t: &[f64], q: &[f64]) -> Result<f64> {
    if t.len() != q.len() || t.len() < 10 {
        return Err(Error::DegenerateSeries(format!("need at least 10 samples, got {}", t.len())));
    }
    let start = t.len() / 2;
    let peak = q.iter().cloned().fold(0.0, f64::max);
    let tail = &q[start..];
    if peak.is_nan() || peak <= 0.0 || tail.iter().any(|v| v.is_nan() || *v <= UNDERFLOW * peak) {
        return Err(Error::DegenerateSeries("quantity underflows the solver tolerance".into()));
    }
    let logs: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    Ok(-linear_fit(&t[start..], &logs).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.05).collect();
        let q: Vec<f64> = t.iter().map(|s| (-3.0 * s).exp()).collect();
        assert!((decay_rate(&t, &q).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_series() {
        let t: Vec<f64> = (0..5).map(|k| k as f64).collect();
        assert!(matches!(decay_rate(&t, &[1.0; 5]), Err(Error::DegenerateSeries(_))));
        let t: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let q: Vec<f64> = t.iter().map(|s| (-5.0 * s).exp()).collect();
        assert!(matches!(decay_rate(&t, &q), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn slopes() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        assert!((log_log_slope(&h, &e) - 2.0).abs() < 1e-12);
    }
}
