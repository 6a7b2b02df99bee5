use num_complex::Complex64;
use serde::Serialize;

use super::{classify, BranchClass, Failure};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::tsallis_map::{f_real, q_roots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    Interval,
    HalfLine,
    Empty,
}

/// The real set `S` removed from the w-plane. Finite endpoints are critical values
/// `f(alpha)`; `crit` pairs each finite endpoint with its critical point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSet {
    pub kind: CutKind,
    pub lo: f64,
    pub hi: f64,
    pub crit: Vec<(f64, f64)>,
}

impl CutSet {
    fn empty() -> CutSet {
        CutSet { kind: CutKind::Empty, lo: f64::NAN, hi: f64::NAN, crit: Vec::new() }
    }

    /// Distance from `w` to the closure of `S`.
    pub fn distance(&self, w: Complex64) -> f64 {
        match self.kind {
            CutKind::Empty => f64::INFINITY,
            _ => {
                let x = w.re.clamp(self.lo, self.hi);
                (w - x).norm()
            }
        }
    }

    /// Whether `w` lies within `tol` of the closure of `S`.
    pub fn near(&self, w: Complex64, tol: f64) -> bool {
        self.distance(w) <= tol
    }
}

/// Cut set for parameters with a main branch or with a two-to-one failure (then empty).
pub fn cut_set(params: &Params) -> Result<CutSet> {
    if let Some(red) = params.reduced() {
        return cut_set(&red);
    }
    match classify(params) {
        BranchClass::NotExists(Failure::DomainObstruction) => {
            return Err(Error::NotApplicable("no cut set without a fundamental domain"))
        }
        BranchClass::NotExists(Failure::TwoToOne) => return Ok(CutSet::empty()),
        BranchClass::Exists(_) => {}
    }
    let g = params.gamma;
    let (a1, a2) = q_roots(params);
    let (a1, a2) = (a1.re, a2.re);
    if params.kappa.is_one() && g == 1.0 {
        // f(z) = z
        return Ok(CutSet::empty());
    }
    let f2 = f_real(params, a2)?;
    let cut = if g < 0.0 {
        let f1 = f_real(params, a1)?;
        CutSet { kind: CutKind::Interval, lo: f2, hi: f1, crit: vec![(f2, a2), (f1, a1)] }
    } else if g > 0.0 && params.kappa.is_one() {
        let f1 = f_real(params, a1)?;
        CutSet { kind: CutKind::Interval, lo: f1, hi: f2, crit: vec![(f1, a1), (f2, a2)] }
    } else {
        CutSet { kind: CutKind::HalfLine, lo: f64::NEG_INFINITY, hi: f2, crit: vec![(f2, a2)] }
    };
    Ok(cut)
}
