use std::f64::consts::PI;

use serde::Serialize;

use super::omega::{boundary_infty, omega_description, polar_roots, polar_to_z, Asymptote, DomainCase};
use crate::error::{Error, Result};
use crate::params::{Kappa, Params};
use crate::roots::{bisect, roots_in, BISECT_TOL};

/// Unbounded boundary curves are exported up to this distance from `-kappa`
/// (from the origin for infinite kappa).
pub const EXPORT_RADIUS: f64 = 1e2;

/// One sample of the boundary. For finite kappa `theta` is the polar angle about `-kappa`;
/// for infinite kappa it holds the height `y` and the radii are absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub r_minus: Option<f64>,
    pub r_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub y_minus: Option<f64>,
    pub x_plus: Option<f64>,
    pub y_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryExport {
    pub case: DomainCase,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    pub asymptotes: Vec<Asymptote>,
    pub samples: Vec<BoundarySample>,
}

/// `n` points on `[lo, hi]` clustered at both ends.
pub(crate) fn cosine_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            lo + (hi - lo) * 0.5 * (1.0 - (PI * t).cos())
        })
        .collect()
}

/// Largest angle in `(lo, hi)` where `r(theta)` reaches `target`.
fn angle_at_radius<F: Fn(f64) -> f64>(r: F, lo: f64, hi: f64, target: f64) -> Result<f64> {
    let g = |t: f64| r(t) - target;
    roots_in(g, lo, hi, 4096)
        .into_iter()
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))))
        .ok_or(Error::Degenerate("boundary curve does not reach the export radius"))
}

fn upper_root(params: &Params, t: f64) -> f64 {
    match polar_roots(params, t) {
        Ok(Some((_, hi))) => hi,
        _ => f64::NAN,
    }
}

fn polar_sample(k: f64, theta: f64, lo: Option<f64>, hi: Option<f64>) -> BoundarySample {
    let zl = lo.map(|r| polar_to_z(k, r, theta));
    let zh = hi.map(|r| polar_to_z(k, r, theta));
    BoundarySample {
        theta,
        r_minus: lo,
        r_plus: hi,
        x_minus: zl.map(|z| z.re),
        y_minus: zl.map(|z| z.im),
        x_plus: zh.map(|z| z.re),
        y_plus: zh.map(|z| z.im),
    }
}

fn infty_sample(y: f64, x1: Option<f64>, x2: f64) -> BoundarySample {
    BoundarySample {
        theta: y,
        r_minus: None,
        r_plus: None,
        x_minus: x1,
        y_minus: x1.map(|_| y),
        x_plus: Some(x2),
        y_plus: Some(y),
    }
}

/// Samples the upper half of the boundary of `Omega` with `n` cosine-spaced points.
pub fn boundary_samples(params: &Params, n: usize) -> Result<BoundaryExport> {
    if n == 0 {
        return Err(Error::OutOfRange("sample count must be positive".into()));
    }
    let desc = omega_description(params)?;
    let mut out = BoundaryExport {
        case: desc.case,
        params: *params,
        theta_star: desc.theta_star,
        y0: desc.y0,
        asymptotes: desc.asymptotes.clone(),
        samples: Vec::with_capacity(n),
    };
    let g = params.gamma;
    match params.kappa {
        Kappa::Infinite => {
            let end = PI * (1.0 - 1e-15);
            match desc.case {
                DomainCase::InftyHalfStrip => {
                    let x2 = |y: f64| boundary_infty(g, y).map(|p| p.1).unwrap_or(f64::NAN);
                    let cap = bisect(|y| x2(y) - EXPORT_RADIUS, 0.0, end, BISECT_TOL)?;
                    for y in cosine_grid(0.0, cap, n) {
                        out.samples.push(infty_sample(y, None, x2(y)));
                    }
                }
                DomainCase::InftyBounded => {
                    let y0 = desc.y0.unwrap();
                    for y in cosine_grid(0.0, y0, n) {
                        let (x1, x2) = boundary_infty(g, y)?;
                        out.samples.push(infty_sample(y, Some(x1), x2));
                    }
                }
                _ => {
                    let y0 = desc.y0.unwrap();
                    let x2 = |y: f64| boundary_infty(g, y).map(|p| p.1).unwrap_or(f64::NAN);
                    let half = EXPORT_RADIUS - (0.5 / g).abs();
                    let cap = bisect(|y| x2(y) + 0.5 / g - half, y0, end, BISECT_TOL)?;
                    for y in cosine_grid(y0, cap, n) {
                        let (x1, x2) = boundary_infty(g, y)?;
                        out.samples.push(infty_sample(y, Some(x1), x2));
                    }
                }
            }
        }
        Kappa::Finite(k) => {
            let cap_r = EXPORT_RADIUS / k;
            match desc.case {
                DomainCase::FullDomain => {}
                DomainCase::BoundedLens => {
                    for t in cosine_grid(0.0, desc.theta_star.unwrap(), n) {
                        let (lo, hi) = lens_roots(params, t)?;
                        out.samples.push(polar_sample(k, t, Some(lo), Some(hi)));
                    }
                }
                DomainCase::KappaOneCircle => {
                    let c = desc.circle.unwrap();
                    if c.interior {
                        for t in cosine_grid(0.0, desc.theta_star.unwrap(), n) {
                            let (lo, hi) = lens_roots(params, t)?;
                            out.samples.push(polar_sample(k, t, Some(lo), Some(hi)));
                        }
                    } else {
                        for t in cosine_grid(0.0, PI * (1.0 - 1e-12), n) {
                            out.samples.push(polar_sample(k, t, None, Some(upper_root(params, t))));
                        }
                    }
                }
                DomainCase::GammaZeroCurve | DomainCase::SingleCurve => {
                    let end = desc.theta_end * (1.0 - 1e-12);
                    let cap = if desc.asymptotes.is_empty() {
                        end
                    } else {
                        angle_at_radius(|t| upper_root(params, t), 0.0, end, cap_r)?
                    };
                    for t in cosine_grid(0.0, cap, n) {
                        out.samples.push(polar_sample(k, t, None, Some(upper_root(params, t))));
                    }
                }
                DomainCase::TwoCurveSlit => {
                    let ts = desc.theta_star.unwrap();
                    let end = desc.theta_end * (1.0 - 1e-12);
                    let cap = angle_at_radius(|t| upper_root(params, t), ts, end, cap_r)?;
                    for t in cosine_grid(ts, cap, n) {
                        let (lo, hi) = lens_roots(params, t)?;
                        out.samples.push(polar_sample(k, t, Some(lo), Some(hi)));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(out)
}

/// Both roots, with the discriminant clamped at the merge point.
fn lens_roots(params: &Params, t: f64) -> Result<(f64, f64)> {
    match polar_roots(params, t)? {
        Some(p) => Ok(p),
        None => {
            let a = params.a().unwrap();
            let b = crate::scalar_analysis::b_theta(params, t)?;
            let r = -b / (2.0 * a);
            Ok((r, r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsallis_map::implicit_f;

    #[test]
    fn grid_endpoints() {
        let g = cosine_grid(1.0, 2.0, 5);
        assert_eq!(g[0], 1.0);
        assert!((g[4] - 2.0).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn circle_samples_lie_on_circle() {
        let e = boundary_samples(&Params::finite(1.0, -1.0).unwrap(), 256).unwrap();
        assert_eq!(e.case, DomainCase::KappaOneCircle);
        assert_eq!(e.samples.len(), 256);
        for s in &e.samples {
            for (x, y) in [(s.x_minus.unwrap(), s.y_minus.unwrap()), (s.x_plus.unwrap(), s.y_plus.unwrap())] {
                assert!(((x - 1.0).powi(2) + y * y - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_domain_has_no_samples() {
        let e = boundary_samples(&Params::finite(0.5, 3.0).unwrap(), 16).unwrap();
        assert!(e.samples.is_empty());
    }

    #[test]
    fn infinite_kappa_curve_satisfies_implicit_equation() {
        let p = Params::infinite(0.2).unwrap();
        let e = boundary_samples(&p, 512).unwrap();
        for s in &e.samples {
            let f = implicit_f(&p, s.x_plus.unwrap(), s.y_plus.unwrap()).unwrap();
            assert!(f.abs() < 1e-9, "{f} at {:?}", s);
        }
    }
}
