use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::contour::{Contour, Role};
use crate::error::{Error, Result};
use crate::tsallis_map::{f_eval, f_prime};

/// Closest approach of a probe to the image curve.
pub const MIN_IMAGE_DISTANCE: f64 = 1e-8;
/// Accept a quadrature value this close to an integer.
pub const ACCEPT: f64 = 0.05;
/// Values farther than this from an integer reject the run.
pub const REJECT: f64 = 0.1;
/// Two successive resolutions must agree to this.
pub const STABLE: f64 = 0.01;
/// Refinement stops at this many samples per piece.
pub const MAX_PER_PIECE: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub probe: Complex64,
    pub value: i64,
    /// Quadrature value before rounding.
    pub raw: f64,
}

/// `f` and `f'` along the polyline.
pub(crate) struct Image {
    pub f: Vec<Complex64>,
    pub df: Vec<Complex64>,
}

pub(crate) fn image(contour: &Contour) -> Result<Image> {
    let p = &contour.params;
    let mut f = Vec::with_capacity(contour.points.len());
    let mut df = Vec::with_capacity(contour.points.len());
    for &z in &contour.points {
        f.push(f_eval(p, z)?);
        df.push(f_prime(p, z)?);
    }
    Ok(Image { f, df })
}

/// Trapezoid rule for `(1 / 2 pi i) \oint f'/(f - w0) dz` over the polyline.
fn quadrature(contour: &Contour, img: &Image, w0: Complex64) -> Result<f64> {
    let z = &contour.points;
    let scale = w0.norm().max(1.0);
    let mut g_prev = None;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..z.len() {
        let d = img.f[j] - w0;
        if d.norm() <= MIN_IMAGE_DISTANCE * scale {
            return Err(Error::IllConditioned(d.norm()));
        }
        let g = img.df[j] / d;
        if let Some(gp) = g_prev {
            sum += 0.5 * (gp + g) * (z[j] - z[j - 1]);
        }
        g_prev = Some(g);
    }
    Ok((sum / Complex64::new(0.0, 2.0 * PI)).re)
}

fn settle(raw: f64, prev: Option<f64>) -> bool {
    (raw - raw.round()).abs() < ACCEPT && prev.is_some_and(|p| (raw - p).abs() < STABLE)
}

/// Winding numbers of `f(contour)` about each probe, refining the contour by doubling until
/// every value is stable and within [`ACCEPT`] of an integer. Probes are independent: one that
/// sits on the image curve or never settles gets its own error.
pub fn winding_numbers(contour: &Contour, probes: &[Complex64]) -> Result<Vec<Result<Winding>>> {
    let mut c = contour.clone();
    let mut prev: Vec<Option<f64>> = vec![None; probes.len()];
    let mut done: Vec<Option<Result<Winding>>> = vec![None; probes.len()];
    loop {
        let img = image(&c)?;
        for (i, &w0) in probes.iter().enumerate() {
            if done[i].is_some() {
                continue;
            }
            match quadrature(&c, &img, w0) {
                Ok(raw) => {
                    if settle(raw, prev[i]) {
                        done[i] = Some(Ok(Winding { probe: w0, value: raw.round() as i64, raw }));
                    }
                    prev[i] = Some(raw);
                }
                Err(e) => done[i] = Some(Err(e)),
            }
        }
        if done.iter().all(Option::is_some) || c.per_piece >= MAX_PER_PIECE {
            return Ok(done
                .into_iter()
                .zip(prev)
                .map(|(d, p)| d.unwrap_or(Err(Error::UnderResolved(p.unwrap_or(f64::NAN)))))
                .collect());
        }
        c = c.refined()?;
    }
}

/// Winding number of `f(contour)` about `w0`.
pub fn winding_number(contour: &Contour, w0: Complex64) -> Result<i64> {
    winding_numbers(contour, &[w0])?.remove(0).map(|w| w.value)
}

/// Largest `|Im f| / max(1, |f|)` over the boundary and cut pieces.
pub fn realness_defect(contour: &Contour) -> Result<f64> {
    let img = image(contour)?;
    let mut worst: f64 = 0.0;
    for (j, role) in contour.roles.iter().enumerate() {
        if matches!(role, Role::Boundary | Role::Cut) {
            let w = img.f[j];
            worst = worst.max(w.im.abs() / w.norm().max(1.0));
        }
    }
    Ok(worst)
}
