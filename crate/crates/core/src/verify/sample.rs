use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{boundary_samples, membership, omega_description, DomainCase, Membership};
use crate::error::{Error, Result};
use crate::inverse::reduce_negative_kappa;
use crate::params::Params;
use crate::tsallis_map::{f_eval, q_roots};

/// Box `[x0, x1] x (0, y1]` enclosing the part of `Omega` that gets sampled.
fn sample_box(wp: &Params) -> Result<(f64, f64, f64)> {
    let desc = omega_description(wp)?;
    let (a1, a2) = q_roots(wp);
    let bounded = matches!(desc.case, DomainCase::BoundedLens | DomainCase::InftyBounded)
        || desc.circle.is_some_and(|c| c.interior);
    if bounded {
        let e = boundary_samples(wp, 256)?;
        let mut x0 = a1.re.min(a2.re);
        let mut x1 = a1.re.max(a2.re);
        let mut y1: f64 = 0.0;
        for s in &e.samples {
            for (x, y) in [(s.x_minus, s.y_minus), (s.x_plus, s.y_plus)] {
                if let (Some(x), Some(y)) = (x, y) {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        return Ok((x0, x1, y1));
    }
    let h = 3.0 + 2.0 * a1.norm().max(a2.norm()).min(10.0);
    let y1 = if wp.kappa.is_infinite() { PI * (1.0 - 1e-9) } else { h };
    Ok((-h, h, y1))
}

/// `n` points of `Omega` in the upper half-plane, drawn uniformly from a box by rejection.
/// Points within `1e-3` (relative) of the pole are skipped. Returned in the coordinates of `params`.
pub fn sample_upper_domain(params: &Params, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    let red = reduce_negative_kappa(params).ok();
    let wp = red.map_or(*params, |r| r.reduced);
    let desc = omega_description(&wp)?;
    let (x0, x1, y1) = sample_box(&wp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pole = wp.pole();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 1000 * n.max(1) {
            return Err(Error::Degenerate("rejection sampling found too few interior points"));
        }
        let z = Complex64::new(rng.gen_range(x0..=x1), rng.gen_range(0.0..=y1));
        if z.im <= 0.0 {
            continue;
        }
        if pole.is_some_and(|p| (z - p).norm() < 1e-3 * p.abs().max(1.0)) {
            continue;
        }
        if membership(&desc, z)? == Membership::Inside {
            out.push(match &red {
                Some(r) => r.to_original(z)?,
                None => z,
            });
        }
    }
    Ok(out)
}

/// Number of sampled points of `Omega` in the upper half-plane where `Im f <= 0`.
pub fn interior_sign_check(params: &Params, samples: usize, seed: u64) -> Result<usize> {
    let pts = sample_upper_domain(params, samples, seed)?;
    let mut bad = 0;
    for z in pts {
        match f_eval(params, z) {
            Ok(w) if w.im > 0.0 => {}
            _ => bad += 1,
        }
    }
    Ok(bad)
}
