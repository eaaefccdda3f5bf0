use serde::Serialize;

use crate::{Error, Result};

/// Log-log fit of one claim's error against `|rho|`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub claim: String,
    pub rho_moduli: Vec<f64>,
    pub errors: Vec<f64>,
    /// `None` when every error is exactly zero.
    pub fitted_slope: Option<f64>,
    /// Root-mean-square residual of the fit in `ln` units.
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
    /// Slopes between consecutive sweep points.
    pub partial_slopes: Vec<f64>,
}

impl SweepReport {
    pub fn trivial(&self) -> bool {
        self.fitted_slope.is_none()
    }
}

/// Least-squares slope of `ln error` against `ln |rho|`; passes when the slope
/// is at most `bound`. All-zero errors pass trivially.
pub fn slope_fit(
    claim: &str,
    rho_moduli: &[f64],
    errors: &[f64],
    bound: f64,
) -> Result<SweepReport> {
    if rho_moduli.len() != errors.len() {
        return Err(Error::Fit(format!(
            "{} moduli but {} errors",
            rho_moduli.len(),
            errors.len()
        )));
    }
    if rho_moduli.len() < 5 {
        return Err(Error::Fit(format!(
            "need at least 5 sweep points, got {}",
            rho_moduli.len()
        )));
    }
    if rho_moduli.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Fit("moduli must be positive".into()));
    }
    let mut sorted = rho_moduli.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("moduli must be distinct".into()));
    }
    if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::Fit("errors must be finite and non-negative".into()));
    }
    let mut report = SweepReport {
        claim: claim.to_string(),
        rho_moduli: rho_moduli.to_vec(),
        errors: errors.to_vec(),
        fitted_slope: None,
        residual: 0.0,
        bound,
        pass: true,
        partial_slopes: Vec::new(),
    };
    if errors.iter().all(|&e| e == 0.0) {
        return Ok(report);
    }
    if errors.contains(&0.0) {
        return Err(Error::Fit(
            "mixed zero and nonzero errors cannot be fitted".into(),
        ));
    }
    let xs: Vec<f64> = rho_moduli.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let icept = ym - slope * xm;
    report.residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    report.fitted_slope = Some(slope);
    report.pass = slope <= bound;
    report.partial_slopes = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(report)
}

/// `count` moduli `start, start f, start f^2, ...`.
pub fn dyadic(start: f64, factor: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "sweep start {start} must be positive"
        )));
    }
    if !(factor > 1.0 && factor.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "sweep factor {factor} must exceed 1"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidSpec(format!(
            "sweep count {count} must be at least 2"
        )));
    }
    Ok((0..count).map(|i| start * factor.powi(i as i32)).collect())
}
