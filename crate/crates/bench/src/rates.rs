//! Empirical convergence rates from a trace.

use optlab::{OptError, Trace64};
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `gap ≈ C·k^{−p}`
    Sublinear,
    /// `gap ≈ C·q^k`
    Geometric,
}

impl std::str::FromStr for RateModel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sublinear" => Ok(RateModel::Sublinear),
            "geometric" => Ok(RateModel::Geometric),
            o => Err(format!("unknown rate model `{o}` (sublinear|geometric)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub model: RateModel,
    /// `p` for the sublinear model, the per-iteration ratio `q` for the geometric one.
    pub estimate: f64,
    /// Of the least-squares line through the log gaps.
    pub r_squared: f64,
    pub window: f64,
    /// Rows used.
    pub points: usize,
}

pub const MIN_POINTS: usize = 10;

/// Fit on the last `window` fraction of rows (by iteration), using rows with a
/// positive finite gap and, for the sublinear model, `iter ≥ 1`.
///
/// Sublinear: `p = −slope` of `log gap` against `log k`. Geometric:
/// `q = exp(mean log(gap_{k+1}/gap_k))`, the mean taken per iteration so that
/// subsampled traces give the same answer.
pub fn fit_rate(trace: &Trace64, model: RateModel, window: f64) -> Result<RateFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(OptError::InvalidConfig(format!("window must be in (0, 1], got {window}")).into());
    }
    let last = trace.iterations() as f64;
    let from = last * (1.0 - window);
    let pts: Vec<(f64, f64)> = trace
        .rows
        .iter()
        .filter(|r| r.iter as f64 >= from)
        .filter(|r| model == RateModel::Geometric || r.iter >= 1)
        .filter_map(|r| {
            let g = r.f_gap?;
            (g > 0.0 && g.is_finite()).then_some((r.iter as f64, g.ln()))
        })
        .map(|(k, lg)| match model {
            RateModel::Sublinear => (k.ln(), lg),
            RateModel::Geometric => (k, lg),
        })
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(OptError::InsufficientData(format!(
            "rate fit needs at least {MIN_POINTS} rows with a positive gap in the window, found {}",
            pts.len()
        ))
        .into());
    }
    let (slope, r_squared) = least_squares(&pts)?;
    let estimate = match model {
        RateModel::Sublinear => -slope,
        RateModel::Geometric => {
            let (first, last) = (pts[0], pts[pts.len() - 1]);
            // Σ log(gap_{k+1}/gap_k) telescopes
            ((last.1 - first.1) / (last.0 - first.0)).exp()
        }
    };
    Ok(RateFit {
        model,
        estimate,
        r_squared,
        window,
        points: pts.len(),
    })
}

/// Slope and `r²`.
fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(OptError::InsufficientData("all rows share one abscissa".into()).into());
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok((slope, r2))
}
