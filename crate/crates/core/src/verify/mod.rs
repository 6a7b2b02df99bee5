//! Numerical certification: winding numbers of `f` around `Omega`, interior sign checks,
//! round trips and audits of the scalar sign tables.

mod audit;
mod contour;
mod sample;
mod winding;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use audit::{audit_cell, cut_order_holds, default_cells, lemma_audit, FD_TOL, PER_INTERVAL};
pub use contour::{build_contour, Contour, Path, Piece, Role, BASE_SAMPLES};
pub use sample::{interior_sign_check, sample_upper_domain};
pub use winding::{realness_defect, winding_number, winding_numbers, Winding, ACCEPT, MAX_PER_PIECE, REJECT};

use crate::domain::{classify, distance_to_region_boundary, omega_description, BranchClass, DomainCase};
use crate::error::{Error, Result};
use crate::inverse::{EvalOptions, MainBranch};
use crate::params::{Kappa, Params};
use crate::tsallis_map::f_eval;

/// Probe points in the upper half-plane.
pub const DEFAULT_PROBES: [Complex64; 6] = [
    Complex64::new(0.5, 0.5),
    Complex64::new(-0.5, 0.5),
    Complex64::new(2.0, 1.0),
    Complex64::new(-3.0, 0.5),
    Complex64::new(0.3, 0.05),
    Complex64::new(1.0, 0.2),
];
/// Largest `|Im f| / max(1, |f|)` tolerated on boundary pieces.
pub const REALNESS_TOL: f64 = 1e-6;
/// Round-trip residual bound.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

/// Outcome for one probe: the winding number, or why it could not be resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeValue {
    pub probe: Complex64,
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ProbeValue {
    fn new(probe: Complex64, r: &Result<Winding>) -> ProbeValue {
        match r {
            Ok(w) => ProbeValue { probe, value: Some(w.value), error: None },
            Err(e) => ProbeValue { probe, value: None, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BijectivityProbe {
    pub case: DomainCase,
    pub windings: Vec<ProbeValue>,
    pub realness_defect: f64,
    /// Every winding equals one and the boundary maps into the real line.
    pub bijective: bool,
}

/// Winding numbers about `probes` of the image of the contour around `Omega` in the upper
/// half-plane. Negative kappa is probed through its reduced pair.
pub fn bijectivity_probe(params: &Params, probes: &[Complex64]) -> Result<BijectivityProbe> {
    let small = probes.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min) * 0.5;
    let big = probes.iter().map(|w| w.norm()).fold(0.0, f64::max) * 2.0;
    let c = build_contour(params, small, big, BASE_SAMPLES)?;
    let windings: Vec<ProbeValue> =
        winding_numbers(&c, probes)?.iter().zip(probes).map(|(r, &w0)| ProbeValue::new(w0, r)).collect();
    let defect = realness_defect(&c)?;
    let bijective = windings.iter().all(|w| w.value == Some(1)) && defect <= REALNESS_TOL;
    Ok(BijectivityProbe { case: c.case, windings, realness_defect: defect, bijective })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: Params,
    pub class: &'static str,
    pub case: Option<DomainCase>,
    pub windings: Vec<ProbeValue>,
    pub realness_defect: Option<f64>,
    pub residual_max: Option<f64>,
    pub lemma_failures: Vec<String>,
    pub sign_violations: usize,
    /// For parameters without a main branch: whether evaluation refused.
    pub refused: Option<bool>,
    pub errors: Vec<String>,
    /// Whether every check agrees with the classification.
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub round_trips: usize,
    pub sign_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { round_trips: 200, sign_samples: 2000, seed: 0 }
    }
}

/// Largest round-trip error over `n` points `z` of `Omega` (upper half and mirror) and
/// `n` points `w` drawn from `[-5, 5]^2`: `|W(f(z)) - z| / max(1, |z|)` and the relative
/// residual of `f(W(w)) = w`.
pub fn round_trip_residual(params: &Params, n: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let mb = MainBranch::new(params)?;
    let opts = EvalOptions::default();
    let mut worst: f64 = 0.0;
    for z in sample_upper_domain(params, n, seed)? {
        for z in [z, z.conj()] {
            let w = f_eval(params, z)?;
            let r = mb.eval(w, &opts)?;
            worst = worst.max((r.z - z).norm() / z.norm().max(1.0)).max(r.residual);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut count = 0;
    while count < n {
        let w = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if mb.cut().distance(w) < 1e-6 {
            continue;
        }
        count += 1;
        let r = mb.eval(w, &opts)?;
        worst = worst.max(r.residual);
    }
    Ok(worst)
}

/// Sign-table cells relevant to `params`: its own `(kappa, a)` after reduction.
fn own_cells(params: &Params) -> Vec<(f64, f64)> {
    let wp = params.reduced().unwrap_or(*params);
    match wp.kappa {
        Kappa::Finite(k) => vec![(k, k * wp.gamma)],
        Kappa::Infinite => Vec::new(),
    }
}

/// Runs the bijectivity probe, round trips, the interior sign check and the lemma audit,
/// and compares the outcome with the classification.
pub fn verify(params: &Params, opts: &VerifyOptions) -> VerificationReport {
    let class = classify(params);
    let mut rep = VerificationReport {
        params: *params,
        class: class.tag(),
        case: omega_description(&params.reduced().unwrap_or(*params)).ok().map(|d| d.case),
        windings: Vec::new(),
        realness_defect: None,
        residual_max: None,
        lemma_failures: Vec::new(),
        sign_violations: 0,
        refused: None,
        errors: Vec::new(),
        pass: false,
    };
    let probe = bijectivity_probe(params, &DEFAULT_PROBES);
    let bijective = match &probe {
        Ok(p) => {
            rep.windings = p.windings.clone();
            rep.realness_defect = Some(p.realness_defect);
            Some(p.bijective)
        }
        Err(e) => {
            rep.errors.push(format!("winding: {e}"));
            None
        }
    };
    rep.lemma_failures = lemma_audit(&own_cells(params));
    if class.exists() {
        match round_trip_residual(params, opts.round_trips, opts.seed) {
            Ok(r) => rep.residual_max = Some(r),
            Err(e) => rep.errors.push(format!("round trip: {e}")),
        }
        match interior_sign_check(params, opts.sign_samples, opts.seed) {
            Ok(v) => rep.sign_violations = v,
            Err(e) => rep.errors.push(format!("sign check: {e}")),
        }
        rep.pass = bijective == Some(true)
            && rep.residual_max.is_some_and(|r| r <= ROUND_TRIP_TOL)
            && rep.sign_violations == 0
            && rep.lemma_failures.is_empty()
            && rep.errors.is_empty();
    } else {
        let refused = matches!(
            crate::inverse::w_eval(params, Complex64::new(1.0, 1.0), &EvalOptions::default()),
            Err(Error::NoBranch(_))
        );
        rep.refused = Some(refused);
        rep.pass = bijective == Some(false) && refused && rep.lemma_failures.is_empty() && rep.errors.is_empty();
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub index: usize,
    pub params: Params,
    pub class: &'static str,
    pub distance: f64,
    /// Cells within the exclusion band around region boundaries are not probed.
    pub skipped: bool,
    pub windings: Vec<Option<i64>>,
    pub realness_defect: Option<f64>,
    pub bijective: Option<bool>,
    pub consistent: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    pub probed: usize,
    pub inconsistent: usize,
}

/// Cells closer than this to a region boundary are skipped.
pub const GRID_EXCLUSION: f64 = 1e-3;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// The 40 x 40 grid: 20 positive kappa in `[0.25, 4]`, 19 negative in `[-4, -0.25]`,
/// infinite kappa, and 40 gamma in `[-2, 2]`.
pub fn default_grid() -> Vec<Params> {
    let mut kappas: Vec<Kappa> = linspace(0.25, 4.0, 20).into_iter().map(Kappa::Finite).collect();
    kappas.extend(linspace(-4.0, -0.25, 19).into_iter().map(Kappa::Finite));
    kappas.push(Kappa::Infinite);
    let gammas = linspace(-2.0, 2.0, 40);
    let mut out = Vec::with_capacity(kappas.len() * gammas.len());
    for k in &kappas {
        for &g in &gammas {
            out.push(Params::new(*k, g).expect("grid parameters are valid"));
        }
    }
    out
}

fn grid_cell(index: usize, params: Params) -> GridCell {
    let class: BranchClass = classify(&params);
    let distance = distance_to_region_boundary(&params);
    let mut cell = GridCell {
        index,
        params,
        class: class.tag(),
        distance,
        skipped: distance <= GRID_EXCLUSION,
        windings: Vec::new(),
        realness_defect: None,
        bijective: None,
        consistent: true,
        error: None,
    };
    if cell.skipped {
        return cell;
    }
    match bijectivity_probe(&params, &DEFAULT_PROBES) {
        Ok(p) => {
            cell.windings = p.windings.iter().map(|w| w.value).collect();
            cell.realness_defect = Some(p.realness_defect);
            cell.bijective = Some(p.bijective);
            cell.consistent = p.bijective == class.exists();
        }
        Err(e) => {
            cell.error = Some(e.to_string());
            cell.consistent = false;
        }
    }
    cell
}

/// Probes every cell in parallel; cells come back in input order.
pub fn run_grid(grid: &[Params]) -> GridReport {
    let cells: Vec<GridCell> = grid.par_iter().enumerate().map(|(i, p)| grid_cell(i, *p)).collect();
    let probed = cells.iter().filter(|c| !c.skipped).count();
    let inconsistent = cells.iter().filter(|c| !c.consistent).count();
    GridReport { cells, probed, inconsistent }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe(k: f64, g: f64) -> BijectivityProbe {
        bijectivity_probe(&Params::finite(k, g).unwrap(), &DEFAULT_PROBES).unwrap()
    }

    #[test]
    fn existing_branch_winds_once() {
        for &(k, g) in &[(2.0, -0.5), (2.0, 0.25), (0.5, -1.0), (1.0, 0.5), (1.0, -1.0), (3.0, 0.4)] {
            let p = probe(k, g);
            assert!(p.bijective, "{k} {g}: {p:?}");
        }
    }

    #[test]
    fn two_to_one_winds_twice() {
        let p = probe(2.0, 0.7);
        assert!(p.windings.iter().all(|w| w.value == Some(2)), "{p:?}");
    }

    #[test]
    fn lower_half_plane_probe_gives_zero() {
        let params = Params::finite(2.0, 0.25).unwrap();
        let c = build_contour(&params, 0.25, 4.0, BASE_SAMPLES).unwrap();
        assert_eq!(winding_number(&c, Complex64::new(0.5, -0.5)).unwrap(), 0);
        assert!(c.is_closed());
    }

    #[test]
    fn obstruction_is_not_bijective() {
        assert!(!probe(0.5, 0.5).bijective);
        assert!(!probe(0.5, 3.0).bijective);
    }
}
