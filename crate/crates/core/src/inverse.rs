//! Evaluation of the main branch `W` on the complement of the cut set.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{classify, cut_set, membership, omega_description, CutSet, DomainDescription, Membership};
use crate::error::{Error, Result};
use crate::params::{Kappa, Params};
use crate::tsallis_map::{f_eval, f_prime, f_second, q_roots};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "LT_TOL";
/// Tolerance used when `w` sits close to a critical value.
pub const CRITICAL_TOL: f64 = 1e-8;
/// Relative width of the band around the cut set treated as lying on it.
pub const CUT_BAND: f64 = 1e-12;
const MAX_STEPS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub continuation_steps: usize,
    pub halley: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { tol: 1e-12, max_iter: 64, continuation_steps: 32, halley: false }
    }
}

impl EvalOptions {
    /// Defaults, with `tol` taken from `LT_TOL` when it parses as a positive number.
    pub fn from_env() -> Self {
        let mut o = EvalOptions::default();
        if let Some(t) = std::env::var(TOL_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if t.is_finite() && t > 0.0 {
                o.tol = t;
            }
        }
        o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WResult {
    pub z: Complex64,
    /// `|f(z) - w| / max(1, |w|)`.
    pub residual: f64,
    pub iterations: usize,
    pub path_used: bool,
    /// Set when `w` is a finite endpoint of the cut and `z` the matching critical point.
    pub critical: bool,
}

/// Monotone real piece of `f` on `(lo, hi)`, mapping onto `(f_lo, f_hi)`.
#[derive(Debug, Clone, Copy)]
struct RealPiece {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

/// The change of variable `z' = z / (1 + z/kappa)` taking negative `kappa` to `-kappa`
/// and `gamma` to `gamma - 1/kappa`, under which `f` is unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub original: Params,
    pub reduced: Params,
    kappa: f64,
}

impl Reduction {
    /// `z' = z / (1 + z/kappa)`.
    pub fn to_reduced(&self, z: Complex64) -> Result<Complex64> {
        let den = 1.0 + z / self.kappa;
        if den.norm() == 0.0 {
            return Err(Error::Pole(z));
        }
        Ok(z / den)
    }

    /// `z = z' / (1 - z'/kappa)`.
    pub fn to_original(&self, z: Complex64) -> Result<Complex64> {
        let den = 1.0 - z / self.kappa;
        if den.norm() == 0.0 {
            return Err(Error::Pole(z));
        }
        Ok(z / den)
    }
}

pub fn reduce_negative_kappa(params: &Params) -> Result<Reduction> {
    match (params.kappa, params.reduced()) {
        (Kappa::Finite(k), Some(reduced)) => Ok(Reduction { original: *params, reduced, kappa: k }),
        _ => Err(Error::NotApplicable("reduction needs finite negative kappa")),
    }
}

/// Precomputed data for one parameter pair. Immutable, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct MainBranch {
    params: Params,
    work: Params,
    desc: DomainDescription,
    cut: CutSet,
    pieces: Vec<RealPiece>,
    identity: bool,
    start_radius: f64,
}

fn rel(r: Complex64, w: Complex64) -> f64 {
    r.norm() / w.norm().max(1.0)
}

/// Coefficients `(c2, c3)` of `f(z) = z + c2 z^2 + c3 z^3 + ...`.
pub fn taylor_coefficients(params: &Params) -> (f64, f64) {
    let g = params.gamma;
    let e2 = match params.kappa {
        Kappa::Finite(k) => (k - 1.0) / (2.0 * k),
        Kappa::Infinite => 0.5,
    };
    (1.0 - g, e2 - g + g * g)
}

/// Coefficients `(d2, d3)` of `W(w) = w + d2 w^2 + d3 w^3 + ...`.
pub fn series_coefficients(params: &Params) -> (f64, f64) {
    let (c2, c3) = taylor_coefficients(params);
    (-c2, 2.0 * c2 * c2 - c3)
}

fn series(params: &Params, w: Complex64) -> Complex64 {
    let (d2, d3) = series_coefficients(params);
    w * (1.0 + w * (d2 + w * d3))
}

/// Seeds are taken from the series only inside this radius.
pub const SERIES_RADIUS: f64 = 0.1;

/// Truncated inverse series for `|w| <= SERIES_RADIUS`, `w` itself beyond.
pub fn w_seed(params: &Params, w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if w.norm() > SERIES_RADIUS {
        return Ok(w);
    }
    Ok(series(params, w))
}

impl MainBranch {
    pub fn new(params: &Params) -> Result<MainBranch> {
        let class = classify(params);
        if !class.exists() {
            return Err(Error::NoBranch(class));
        }
        let work = params.reduced().unwrap_or(*params);
        let desc = omega_description(&work)?;
        let cut = cut_set(&work)?;
        let identity = work.kappa.is_one() && work.gamma == 1.0;
        let mut pieces = Vec::new();
        if !identity {
            let (a1, a2) = q_roots(&work);
            let (a1, a2) = (a1.re, a2.re);
            let g = work.gamma;
            let fv = |x: f64| f_eval(&work, Complex64::new(x, 0.0)).map(|v| v.re);
            if g < 0.0 {
                let p = -1.0 / g;
                pieces.push(RealPiece { lo: a1, hi: p, f_lo: fv(a1)?, f_hi: f64::INFINITY });
                pieces.push(RealPiece { lo: p, hi: a2, f_lo: f64::NEG_INFINITY, f_hi: fv(a2)? });
            } else if g > 0.0 && work.kappa.is_one() {
                pieces.push(RealPiece { lo: f64::NEG_INFINITY, hi: a1, f_lo: f64::NEG_INFINITY, f_hi: fv(a1)? });
                pieces.push(RealPiece { lo: a2, hi: f64::INFINITY, f_lo: fv(a2)?, f_hi: f64::INFINITY });
            } else {
                pieces.push(RealPiece { lo: a2, hi: f64::INFINITY, f_lo: fv(a2)?, f_hi: f64::INFINITY });
            }
        }
        let near = if cut.crit.is_empty() {
            1.0
        } else {
            cut.crit.iter().map(|c| c.0.abs()).fold(f64::INFINITY, f64::min)
        };
        Ok(MainBranch {
            params: *params,
            work,
            desc,
            cut,
            pieces,
            identity,
            start_radius: 0.05 * near.min(1.0),
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Parameters the evaluation actually runs on (the reduced pair for negative kappa).
    pub fn working_params(&self) -> &Params {
        &self.work
    }

    pub fn domain(&self) -> &DomainDescription {
        &self.desc
    }

    pub fn cut(&self) -> &CutSet {
        &self.cut
    }

    fn to_original(&self, z: Complex64) -> Result<Complex64> {
        match reduce_negative_kappa(&self.params) {
            Ok(red) => red.to_original(z),
            Err(_) => Ok(z),
        }
    }

    fn inside(&self, z: Complex64) -> bool {
        matches!(membership(&self.desc, z), Ok(Membership::Inside | Membership::Boundary))
    }

    /// Evaluates `W(w)`.
    pub fn eval(&self, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
        self.eval_with(w, opts, false)
    }

    /// `W(w)` by path tracking from the origin only, skipping the real solver and local seeds.
    pub fn continuation(&self, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
        self.eval_with(w, opts, true)
    }

    fn eval_with(&self, w: Complex64, opts: &EvalOptions, forced: bool) -> Result<WResult> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.identity {
            return Ok(WResult { z: w, residual: 0.0, iterations: 0, path_used: false, critical: false });
        }
        let band = CUT_BAND * w.norm().max(1.0);
        for &(c, alpha) in &self.cut.crit {
            if (w - c).norm() <= band {
                let z = self.to_original(Complex64::new(alpha, 0.0))?;
                let residual = rel(Complex64::new(c, 0.0) - w, w);
                return Ok(WResult { z, residual, iterations: 0, path_used: false, critical: true });
            }
        }
        if self.cut.near(w, band) {
            return Err(Error::OnCut(w));
        }
        let flip = w.im < 0.0;
        let wq = if flip { w.conj() } else { w };
        let mut r = if forced { self.continuation_upper(wq, opts)? } else { self.eval_upper(wq, opts)? };
        if flip {
            r.z = r.z.conj();
        }
        r.z = self.to_original(r.z)?;
        if let Ok(v) = f_eval(&self.params, r.z) {
            let orig = rel(v - w, w);
            if orig.is_finite() {
                r.residual = r.residual.max(orig);
            }
        }
        Ok(r)
    }

    /// `W(w)` for `Im w >= 0`, in working coordinates.
    fn eval_upper(&self, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
        if w.im == 0.0 {
            let x = self.real_solve(w.re)?;
            let z = Complex64::new(x, 0.0);
            let residual = rel(f_eval(&self.work, z)? - w, w);
            return Ok(WResult { z, residual, iterations: 0, path_used: false, critical: false });
        }
        let scale = w.norm().max(1.0);
        // close to the real axis: real preimage plus a complex correction
        if w.im <= 1e-6 * scale && self.cut.distance(Complex64::new(w.re, 0.0)) > 1e-3 * scale {
            if let Ok(x) = self.real_solve(w.re) {
                let x = Complex64::new(x, 0.0);
                if let Ok(d) = f_prime(&self.work, x) {
                    let z0 = x + Complex64::new(0.0, w.im) / d;
                    if let Some(r) = self.polish(z0, w, opts, opts.tol) {
                        return Ok(r);
                    }
                }
            }
        }
        // close to a critical value: square-root model
        for &(c, alpha) in &self.cut.crit {
            if (w - c).norm() <= 1e-3 * c.abs().max(1.0) {
                let a = Complex64::new(alpha, 0.0);
                if let Ok(f2) = f_second(&self.work, a) {
                    let s = (2.0 * (w - c) / f2).sqrt();
                    let tol = opts.tol.max(CRITICAL_TOL);
                    for z0 in [a + s, a - s] {
                        if z0.im >= 0.0 && self.inside(z0) {
                            if let Some(r) = self.polish(z0, w, opts, tol) {
                                return Ok(r);
                            }
                        }
                    }
                }
            }
        }
        if w.norm() <= self.start_radius {
            if let Some(r) = self.polish(series(&self.work, w), w, opts, opts.tol) {
                return Ok(r);
            }
        }
        self.continuation_upper(w, opts)
    }

    /// Continuation with the step count doubled until it succeeds or hits `MAX_STEPS`.
    fn continuation_upper(&self, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
        let mut steps = opts.continuation_steps.max(2);
        let mut last = Error::Convergence { residual: f64::INFINITY, iterations: 0 };
        while steps <= MAX_STEPS {
            match self.track(w, steps, opts) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
            steps *= 2;
        }
        Err(last)
    }

    /// Newton polish from `z0` aiming at `opts.tol`, accepted inside `Omega` with residual below `tol`.
    fn polish(&self, z0: Complex64, w: Complex64, opts: &EvalOptions, tol: f64) -> Option<WResult> {
        if !self.inside(z0) {
            return None;
        }
        let (z, res, it) = self.newton(z0, w, opts.max_iter, opts.tol, opts.halley);
        (res <= tol && self.inside(z) && (w.im == 0.0 || z.im * w.im >= 0.0)).then_some(WResult {
            z,
            residual: res,
            iterations: it,
            path_used: false,
            critical: false,
        })
    }

    /// Damped Newton with a membership guard. Returns the best iterate, its residual and
    /// the iteration count.
    fn newton(&self, z0: Complex64, w: Complex64, max_iter: usize, tol: f64, halley: bool) -> (Complex64, f64, usize) {
        let p = &self.work;
        let mut z = z0;
        let mut fz = match f_eval(p, z) {
            Ok(v) => v,
            Err(_) => return (z, f64::INFINITY, 0),
        };
        let mut res = rel(fz - w, w);
        for it in 0..max_iter {
            if res <= tol {
                return (z, res, it);
            }
            let d = match f_prime(p, z) {
                Ok(d) if d.norm() > 0.0 => d,
                _ => return (z, res, it),
            };
            let e = fz - w;
            let mut dz = e / d;
            if halley {
                if let Ok(d2) = f_second(p, z) {
                    let den = d - e * d2 / (2.0 * d);
                    if den.norm() > 0.0 {
                        dz = e / den;
                    }
                }
            }
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let zn = z - dz * lambda;
                if self.inside(zn) {
                    if let Ok(fn_) = f_eval(p, zn) {
                        let rn = rel(fn_ - w, w);
                        if rn < res {
                            z = zn;
                            fz = fn_;
                            res = rn;
                            accepted = true;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return (z, res, it + 1);
            }
        }
        (z, res, max_iter)
    }

    /// Continuation along `0 -> w`, or `0 -> i|w| -> w` when `w` hugs the negative axis.
    fn track(&self, w: Complex64, steps: usize, opts: &EvalOptions) -> Result<WResult> {
        let r = w.norm();
        let legs: Vec<Complex64> = if w.arg() >= 0.75 * PI {
            vec![Complex64::new(0.0, r), w]
        } else {
            vec![w]
        };
        let first = legs[0];
        let t0 = (self.start_radius / first.norm()).min(1.0);
        let mut wc = first * t0;
        let (mut zc, r0, mut iters) = self.newton(series(&self.work, wc), wc, opts.max_iter, 1e-13, false);
        if r0 > 1e-10 || !self.inside(zc) {
            return Err(Error::Convergence { residual: r0, iterations: iters });
        }
        let mut budget = MAX_STEPS * 4;
        let inner_tol = 1e-10;
        for (li, &target) in legs.iter().enumerate() {
            let start = wc;
            for j in 1..=steps {
                let s = j as f64 / steps as f64;
                let wn = if li == 0 {
                    // geometric growth in modulus along the ray
                    first * t0.powf(1.0 - s)
                } else {
                    start + (target - start) * s
                };
                let last = li + 1 == legs.len() && j == steps;
                let tol = if last { opts.tol } else { inner_tol };
                let (z, it) = self.step(zc, wc, wn, tol, opts, &mut budget)?;
                zc = z;
                wc = wn;
                iters += it;
            }
        }
        let (z, res, it) = self.newton(zc, w, opts.max_iter, opts.tol, opts.halley);
        iters += it;
        let near_crit = self.cut.crit.iter().any(|&(c, _)| (w - c).norm() <= 1e-3 * c.abs().max(1.0));
        let tol = if near_crit { opts.tol.max(CRITICAL_TOL) } else { opts.tol };
        if res > tol || !self.inside(z) {
            return Err(Error::Convergence { residual: res, iterations: iters });
        }
        Ok(WResult { z, residual: res, iterations: iters, path_used: true, critical: false })
    }

    /// One predictor-corrector step from `(zc, wc)` to `wn`, halving on failure.
    fn step(
        &self,
        zc: Complex64,
        wc: Complex64,
        wn: Complex64,
        tol: f64,
        opts: &EvalOptions,
        budget: &mut usize,
    ) -> Result<(Complex64, usize)> {
        if *budget == 0 {
            return Err(Error::Convergence { residual: f64::INFINITY, iterations: 0 });
        }
        *budget -= 1;
        let pred = match f_prime(&self.work, zc) {
            Ok(d) if d.norm() > 0.0 => zc + (wn - wc) / d,
            _ => zc,
        };
        let zp = if self.inside(pred) { pred } else { zc };
        let (z, res, it) = self.newton(zp, wn, 16, tol, opts.halley);
        let ok = res <= tol.max(1e-10) && self.inside(z) && z.im >= 0.0;
        if ok {
            return Ok((z, it));
        }
        if (wn - wc).norm() < 1e-12 * wn.norm().max(1.0) {
            return Err(Error::Convergence { residual: res, iterations: it });
        }
        let mid = 0.5 * (wc + wn);
        let (zm, i1) = self.step(zc, wc, mid, tol.max(1e-10), opts, budget)?;
        let (z2, i2) = self.step(zm, mid, wn, tol, opts, budget)?;
        Ok((z2, it + i1 + i2))
    }

    /// Real preimage of a real `w` off the cut.
    fn real_solve(&self, w: f64) -> Result<f64> {
        let piece = self
            .pieces
            .iter()
            .find(|p| w > p.f_lo && w < p.f_hi)
            .ok_or(Error::OnCut(Complex64::new(w, 0.0)))?;
        let f = |x: f64| -> f64 {
            match f_eval(&self.work, Complex64::new(x, 0.0)) {
                Ok(v) => v.re,
                Err(_) => f64::NAN,
            }
        };
        // finite bracket [xa, xb] with f(xa) < w < f(xb)
        let pole = self.work.pole();
        let is_pole = |x: f64| pole.is_some_and(|p| p == x);
        let mut xa = piece.lo;
        let mut xb = piece.hi;
        if xa == f64::NEG_INFINITY {
            let mut d = 1.0;
            xa = xb - d;
            while !(f(xa) < w) {
                d *= 2.0;
                xa = xb - d;
                if !xa.is_finite() {
                    return Err(Error::Convergence { residual: f64::INFINITY, iterations: 0 });
                }
            }
        } else if is_pole(xa) {
            let span = if xb.is_finite() { xb - xa } else { 1.0 };
            let mut d = 0.5 * span;
            while !(f(xa + d) < w) {
                d *= 0.5;
                if d < f64::EPSILON * xa.abs().max(1.0) {
                    break;
                }
            }
            xa += d;
        }
        if xb == f64::INFINITY {
            let mut d = 1.0;
            xb = xa + d;
            while !(f(xb) > w) {
                d *= 2.0;
                xb = xa + d;
                if !xb.is_finite() {
                    return Err(Error::Convergence { residual: f64::INFINITY, iterations: 0 });
                }
            }
        } else if is_pole(xb) {
            let mut d = 0.5 * (xb - xa);
            while !(f(xb - d) > w) {
                d *= 0.5;
                if d < f64::EPSILON * xb.abs().max(1.0) {
                    break;
                }
            }
            xb -= d;
        }
        let mut lo = xa;
        let mut hi = xb;
        for _ in 0..2200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let fm = f(m);
            if fm == w {
                return Ok(m);
            }
            if fm < w {
                lo = m;
            } else {
                hi = m;
            }
        }
        let cand = [lo, hi];
        let best = cand
            .iter()
            .copied()
            .filter(|x| f(*x).is_finite())
            .min_by(|a, b| (f(*a) - w).abs().total_cmp(&(f(*b) - w).abs()))
            .unwrap_or(lo);
        Ok(best)
    }
}

/// Evaluates the main branch `W_{kappa,gamma}(w)`.
pub fn w_eval(params: &Params, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
    MainBranch::new(params)?.eval(w, opts)
}

/// Closed form for `kappa = 1`: the root of `z^2 + (1 - gamma w) z - w = 0` lying in `Omega`.
/// Falls back to [`w_eval`] when the root choice is ambiguous.
/// `W(w)` by continuation along `t w`, detouring through `i|w|` near the negative axis.
pub fn w_continuation(params: &Params, w: Complex64, opts: &EvalOptions) -> Result<WResult> {
    MainBranch::new(params)?.continuation(w, opts)
}

pub fn w_closed_form_k1(gamma: f64, w: Complex64) -> Result<Complex64> {
    let params = Params::finite(1.0, gamma)?;
    let mb = MainBranch::new(&params)?;
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if mb.identity {
        return Ok(w);
    }
    let band = CUT_BAND * w.norm().max(1.0);
    if mb.cut.near(w, band) {
        return mb.eval(w, &EvalOptions::default()).map(|r| r.z);
    }
    let b = 1.0 - gamma * w;
    let s = (b * b + 4.0 * w).sqrt();
    let sigma = if (b.conj() * s).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + s * sigma);
    let roots = if q.norm() == 0.0 { [q, q] } else { [q, -w / q] };
    let inside: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|z| matches!(membership(&mb.desc, *z), Ok(Membership::Inside)))
        .collect();
    if inside.len() == 1 {
        Ok(inside[0])
    } else {
        mb.eval(w, &EvalOptions::default()).map(|r| r.z)
    }
}
