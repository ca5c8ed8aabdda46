//! Erasure density evolution for (J,K)-regular ensembles mixing SPC and GC
//! check nodes.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::component::ComponentCode;
use crate::error::{Error, Result};
use crate::graph::design_rate;

/// Erasure level treated as decoded.
pub const SUCCESS_LEVEL: f64 = 1e-12;
pub const ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct DeEnsemble {
    pub j: usize,
    pub k: usize,
    pub nu: f64,
    pub comp: ComponentCode,
}

impl DeEnsemble {
    pub fn new(j: usize, k: usize, nu: f64, comp: ComponentCode) -> Result<Self> {
        if comp.n() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: comp.n(),
            });
        }
        if !(0.0..=1.0).contains(&nu) || j < 2 {
            return Err(Error::OutOfRange(format!("J = {j}, nu = {nu}")));
        }
        Ok(DeEnsemble { j, k, nu, comp })
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.j, self.k, nu, self.comp.clone())
    }

    pub fn design_rate(&self) -> f64 {
        design_rate(self.j, self.k, self.nu, self.comp.k())
    }
}

/// Check-to-variable erasure probability for incoming erasure probability `x`.
pub fn de_check_mix(x: f64, ens: &DeEnsemble) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("erasure probability {x}")));
    }
    let spc = 1.0 - (1.0 - x).powi(ens.k as i32 - 1);
    let gc = if ens.nu > 0.0 { ens.comp.exit_erasure(x)? } else { 0.0 };
    Ok(ens.nu * gc + (1.0 - ens.nu) * spc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeVerdict {
    Decoded,
    Stuck,
}

/// Runs `x ← ε·mix(x)^(J−1)` from `x = ε`. The sequence is nonincreasing;
/// a rise is reported as an error.
pub fn de_run(epsilon: f64, ens: &DeEnsemble) -> Result<DeVerdict> {
    let mut x = epsilon;
    for _ in 0..ITERATION_CAP {
        if x < SUCCESS_LEVEL {
            return Ok(DeVerdict::Decoded);
        }
        let next = epsilon * de_check_mix(x, ens)?.powi(ens.j as i32 - 1);
        if next > x * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "density evolution not monotone at epsilon = {epsilon}"
            )));
        }
        if next == x {
            return Ok(DeVerdict::Stuck);
        }
        x = next;
    }
    Ok(if x < SUCCESS_LEVEL { DeVerdict::Decoded } else { DeVerdict::Stuck })
}

/// Largest channel erasure probability for which density evolution decodes,
/// by bisection to within `tol`.
pub fn de_threshold(ens: &DeEnsemble, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {tol}")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if de_run(hi, ens)? == DeVerdict::Decoded {
        return Ok(1.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match de_run(mid, ens)? {
            DeVerdict::Decoded => lo = mid,
            DeVerdict::Stuck => hi = mid,
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    pub design_rate: f64,
    pub threshold: f64,
    /// `(1 − rate) − threshold`.
    pub gap: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-5;

pub fn rate_threshold_sweep(nu_grid: &[f64], template: &DeEnsemble, tol: f64) -> Result<Vec<SweepRow>> {
    nu_grid
        .par_iter()
        .map(|&nu| {
            let ens = template.with_nu(nu)?;
            let threshold = de_threshold(&ens, tol)?;
            let rate = ens.design_rate();
            Ok(SweepRow {
                nu,
                design_rate: rate,
                threshold,
                gap: (1.0 - rate) - threshold,
            })
        })
        .collect()
}

/// Row with the smallest gap to capacity.
pub fn best_tradeoff(rows: &[SweepRow]) -> Option<SweepRow> {
    rows.iter().copied().min_by(|a, b| a.gap.total_cmp(&b.gap))
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("nu,design_rate,threshold,gap\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.6},{:.6},{:.6}", r.nu, r.design_rate, r.threshold, r.gap);
    }
    out
}
