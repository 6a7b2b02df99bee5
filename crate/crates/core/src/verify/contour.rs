use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{boundary_infty, omega_description, polar_roots, DomainCase};
use crate::error::{Error, Result};
use crate::params::{Kappa, Params};
use crate::roots::roots_in;
use crate::scalar_analysis::b_theta;
use crate::tsallis_map::{f_eval, q_roots};

/// Samples per piece of a freshly built contour.
pub const BASE_SAMPLES: usize = 128;
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Path {
    Segment { a: Complex64, b: Complex64 },
    /// `center + radius e^{i t}` for `t` from `from` to `to`.
    Arc { center: Complex64, radius: f64, from: f64, to: f64 },
    /// `kappa (r(theta) e^{i theta} - 1)` along the larger or smaller root of the boundary quadratic.
    PolarRoot { upper: bool, from: f64, to: f64 },
    /// `x(y) + i y` along the right or left infinite-kappa boundary branch.
    InftyRoot { right: bool, from: f64, to: f64 },
}

/// What a piece contributes to the boundary of `Omega` in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Part of the boundary of `Omega`, or the real axis; its image should be real.
    Boundary,
    /// Pole indentations and far arcs.
    Closure,
    /// The upper edge of the principal branch cut of the power.
    Cut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub path: Path,
    pub role: Role,
}

/// Closed polyline around `Omega` in the upper half-plane, counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contour {
    /// Parameters the contour was built for (positive or infinite kappa).
    pub params: Params,
    pub case: DomainCase,
    pub pieces: Vec<Piece>,
    pub per_piece: usize,
    /// Radius of the far arc (half-width of the strip for infinite kappa).
    pub far: f64,
    /// Radius of the pole indentation.
    pub delta: Option<f64>,
    pub points: Vec<Complex64>,
    /// Role of the polyline edge starting at each point.
    pub roles: Vec<Role>,
}

fn cosine_t(i: usize, n: usize) -> f64 {
    0.5 * (1.0 - (PI * i as f64 / n as f64).cos())
}

fn polar_root(params: &Params, theta: f64, upper: bool) -> Result<f64> {
    match polar_roots(params, theta)? {
        Some((lo, hi)) => Ok(if upper { hi } else { lo }),
        None => {
            // just past the merge point
            let a = params.kappa.finite().unwrap() * params.gamma;
            Ok(-b_theta(params, theta)? / (2.0 * a))
        }
    }
}

impl Path {
    pub fn at(&self, params: &Params, t: f64) -> Result<Complex64> {
        Ok(match *self {
            Path::Segment { a, b } => a + (b - a) * t,
            Path::Arc { center, radius, from, to } => {
                let s = from + (to - from) * t;
                center + Complex64::from_polar(radius, s)
            }
            Path::PolarRoot { upper, from, to } => {
                let k = params.kappa.finite().ok_or(Error::NotApplicable("polar root needs finite kappa"))?;
                let th = from + (to - from) * t;
                let r = polar_root(params, th, upper)?;
                Complex64::new(k * (r * th.cos() - 1.0), k * r * th.sin())
            }
            Path::InftyRoot { right, from, to } => {
                let y = from + (to - from) * t;
                let (x1, x2) = boundary_infty(params.gamma, y)?;
                Complex64::new(if right { x2 } else { x1 }, y)
            }
        })
    }

    fn sample(&self, params: &Params, n: usize) -> Result<Vec<Complex64>> {
        (0..=n).map(|i| self.at(params, cosine_t(i, n))).collect()
    }
}

impl Contour {
    pub fn from_pieces(params: Params, case: DomainCase, pieces: Vec<Piece>, per_piece: usize) -> Result<Contour> {
        let mut points = Vec::with_capacity(pieces.len() * per_piece + 1);
        let mut roles = Vec::with_capacity(points.capacity());
        for piece in &pieces {
            let s = piece.path.sample(&params, per_piece)?;
            // the last point of each piece is replaced by the first of the next
            for z in &s[..per_piece] {
                points.push(*z);
                roles.push(piece.role);
            }
        }
        let first = *points.first().ok_or(Error::Degenerate("empty contour"))?;
        points.push(first);
        Ok(Contour { params, case, pieces, per_piece, far: f64::NAN, delta: None, points, roles })
    }

    /// The same contour with twice as many samples per piece.
    pub fn refined(&self) -> Result<Contour> {
        let mut c = Contour::from_pieces(self.params, self.case, self.pieces.clone(), self.per_piece * 2)?;
        c.far = self.far;
        c.delta = self.delta;
        Ok(c)
    }

    pub fn is_closed(&self) -> bool {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (a - b).norm() <= 1e-12 * a.norm().max(1.0),
            _ => false,
        }
    }

    pub fn max_spacing(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max)
    }
}

fn seg(a: Complex64, b: Complex64, role: Role) -> Piece {
    Piece { path: Path::Segment { a, b }, role }
}

fn arc(center: f64, radius: f64, from: f64, to: f64, role: Role) -> Piece {
    Piece { path: Path::Arc { center: Complex64::new(center, 0.0), radius, from, to }, role }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Smallest `|f|` over `m` samples of a path.
fn min_abs_f(params: &Params, path: &Path, m: usize) -> f64 {
    (0..=m)
        .map(|i| {
            path.at(params, i as f64 / m as f64)
                .and_then(|z| f_eval(params, z))
                .map(|w| w.norm())
                .unwrap_or(0.0)
        })
        .fold(f64::INFINITY, f64::min)
}

fn max_abs_f(params: &Params, path: &Path, m: usize) -> f64 {
    (0..=m)
        .map(|i| {
            path.at(params, i as f64 / m as f64)
                .and_then(|z| f_eval(params, z))
                .map(|w| w.norm())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

/// Indentation radius at the pole `p`, shrunk until `|f| > big` on the semicircle.
fn pole_delta(params: &Params, p: f64, cap: f64, big: f64) -> Result<f64> {
    let g = params.gamma;
    let mut d = match params.kappa {
        Kappa::Finite(k) if g < 0.0 => {
            let a = k * g;
            let first = ((a - 1.0) / (2.0 * a)).powf(k) / (2.0 * g * g * big);
            first.min(0.5 / g.abs()).min(0.5 * k * (1.0 - 1.0 / a).abs())
        }
        _ => {
            let e = match params.kappa {
                Kappa::Finite(k) => (1.0 + p / k).abs().powf(k),
                Kappa::Infinite => p.exp(),
            };
            0.5 * (p * e / g).abs() / big
        }
    };
    d = d.min(cap);
    for _ in 0..MAX_DOUBLINGS {
        let path = Path::Arc { center: re(p), radius: d, from: PI - 1e-9, to: 1e-9 };
        if min_abs_f(params, &path, 64) > big {
            return Ok(d);
        }
        d *= 0.5;
    }
    Err(Error::Degenerate("pole indentation did not separate the probes"))
}

/// Indentation radius at `-kappa`, shrunk until the image of the arc stays away from the probes.
fn branch_delta(params: &Params, k: f64, cap: f64, small: f64, big: f64) -> Result<f64> {
    let mut d = cap;
    for _ in 0..MAX_DOUBLINGS {
        let path = Path::Arc { center: re(-k), radius: d, from: PI * (1.0 - 1e-9), to: 0.0 };
        if max_abs_f(params, &path, 64) < small || min_abs_f(params, &path, 64) > big {
            return Ok(d);
        }
        d *= 0.5;
    }
    Err(Error::Degenerate("branch point indentation did not separate the probes"))
}

/// Largest angle in `(lo, hi)` where `|z(theta) - target|` or `r(theta)` crosses a level.
fn last_crossing<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> Result<f64> {
    roots_in(g, lo, hi, 4096)
        .into_iter()
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))))
        .ok_or(Error::Degenerate("contour piece has no crossing"))
}

/// Builds the contour for `params` (negative kappa is replaced by its reduced pair) so that
/// every probe modulus lies in `(small, big)`: the far pieces map outside `|w| = big`,
/// indentations at `-kappa` map inside `|w| = small` or outside `|w| = big`.
pub fn build_contour(params: &Params, small: f64, big: f64, per_piece: usize) -> Result<Contour> {
    use Role::*;
    let wp = params.reduced().unwrap_or(*params);
    let desc = omega_description(&wp)?;
    let g = wp.gamma;
    let (a1, a2) = q_roots(&wp);
    let (a1, a2) = (a1.re, a2.re);
    let p = wp.pole();
    let scale = [a1, a2, p.unwrap_or(0.0)]
        .iter()
        .filter(|x| x.is_finite())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let mut far = f64::NAN;
    let mut delta = None;
    let pieces: Vec<Piece> = match wp.kappa {
        Kappa::Infinite => {
            let x_at = |y: f64, right: bool| -> f64 {
                boundary_infty(g, y).map(|(x1, x2)| if right { x2 } else { x1 }).unwrap_or(f64::NAN)
            };
            let top = PI * (1.0 - 1e-14);
            // right edge x = X with |f| > big
            let mut x = 2.0 * scale + 2.0;
            let mut y_r = 0.0;
            if desc.case != DomainCase::InftyBounded {
                let mut ok = false;
                for _ in 0..MAX_DOUBLINGS {
                    y_r = last_crossing(|y| x_at(y, true) - x, desc.y0.unwrap_or(0.0), top)?;
                    let side = Path::Segment { a: re(x), b: Complex64::new(x, y_r) };
                    if min_abs_f(&wp, &side, 256) > big {
                        ok = true;
                        break;
                    }
                    x *= 2.0;
                }
                if !ok {
                    return Err(Error::Degenerate("far side did not clear the probes"));
                }
                far = x;
            }
            match desc.case {
                DomainCase::InftyHalfStrip => vec![
                    seg(re(a2), re(x), Boundary),
                    seg(re(x), Complex64::new(x, y_r), Closure),
                    Piece { path: Path::InftyRoot { right: true, from: y_r, to: 0.0 }, role: Boundary },
                ],
                DomainCase::InftySlit => {
                    let p = p.unwrap();
                    let d = pole_delta(&wp, p, 0.25, big)?;
                    delta = Some(d);
                    let y0 = desc.y0.unwrap();
                    let y_l = last_crossing(|y| x_at(y, false) + x, y0, top)?;
                    vec![
                        seg(re(-x), re(p - d), Boundary),
                        arc(p, d, PI, 0.0, Closure),
                        seg(re(p + d), re(x), Boundary),
                        seg(re(x), Complex64::new(x, y_r), Closure),
                        Piece { path: Path::InftyRoot { right: true, from: y_r, to: y0 }, role: Boundary },
                        Piece { path: Path::InftyRoot { right: false, from: y0, to: y_l }, role: Boundary },
                        seg(Complex64::new(-x, y_l), re(-x), Closure),
                    ]
                }
                _ => {
                    let p = p.unwrap();
                    let d = pole_delta(&wp, p, 0.25 * (p - a1).min(a2 - p), big)?;
                    delta = Some(d);
                    let y0 = desc.y0.unwrap();
                    vec![
                        seg(re(a1), re(p - d), Boundary),
                        arc(p, d, PI, 0.0, Closure),
                        seg(re(p + d), re(a2), Boundary),
                        Piece { path: Path::InftyRoot { right: true, from: 0.0, to: y0 }, role: Boundary },
                        Piece { path: Path::InftyRoot { right: false, from: y0, to: 0.0 }, role: Boundary },
                    ]
                }
            }
        }
        Kappa::Finite(k) => {
            let upper = |t: f64| polar_root(&wp, t, true).unwrap_or(f64::NAN);
            let near_pi = PI * (1.0 - 1e-12);
            // far arc centred at -kappa, angle range depending on the case
            let arc_end = |rho: f64| -> Result<f64> {
                match desc.case {
                    DomainCase::GammaZeroCurve | DomainCase::TwoCurveSlit => {
                        let lo = desc.theta_star.unwrap_or(0.0);
                        last_crossing(|t| upper(t) - rho, lo, desc.theta_end * (1.0 - 1e-12))
                    }
                    DomainCase::SingleCurve if k >= 1.0 => {
                        last_crossing(|t| upper(t) - rho, 0.0, desc.theta_end * (1.0 - 1e-12))
                    }
                    _ => Ok(near_pi),
                }
            };
            let needs_far = !matches!(desc.case, DomainCase::BoundedLens)
                && !(desc.case == DomainCase::KappaOneCircle && desc.circle.unwrap().interior);
            let mut big_r = 2.0 * (scale + k) + 2.0;
            let mut th_l = 0.0;
            if needs_far {
                let mut ok = false;
                for _ in 0..MAX_DOUBLINGS {
                    th_l = arc_end(big_r / k)?;
                    let path = Path::Arc { center: re(-k), radius: big_r, from: 0.0, to: th_l };
                    if min_abs_f(&wp, &path, 512) > big {
                        ok = true;
                        break;
                    }
                    big_r *= 2.0;
                }
                if !ok {
                    return Err(Error::Degenerate("far arc did not clear the probes"));
                }
                far = big_r;
            }
            let lift = 1e-13 * big_r;
            let far_arc = |to: f64| arc(-k, big_r, 0.0, to, Closure);
            match desc.case {
                DomainCase::BoundedLens => {
                    let p = p.unwrap();
                    let d = pole_delta(&wp, p, 0.25 * (p - a1).min(a2 - p), big)?;
                    delta = Some(d);
                    let ts = desc.theta_star.unwrap();
                    vec![
                        seg(re(a1), re(p - d), Boundary),
                        arc(p, d, PI, 0.0, Closure),
                        seg(re(p + d), re(a2), Boundary),
                        Piece { path: Path::PolarRoot { upper: true, from: 0.0, to: ts }, role: Boundary },
                        Piece { path: Path::PolarRoot { upper: false, from: ts, to: 0.0 }, role: Boundary },
                    ]
                }
                DomainCase::KappaOneCircle => {
                    let c = desc.circle.unwrap();
                    if c.interior {
                        let p = p.unwrap();
                        let d = pole_delta(&wp, p, 0.25 * c.radius, big)?;
                        delta = Some(d);
                        vec![
                            seg(re(a1), re(p - d), Boundary),
                            arc(p, d, PI, 0.0, Closure),
                            seg(re(p + d), re(a2), Boundary),
                            arc(c.center, c.radius, 0.0, PI, Boundary),
                        ]
                    } else {
                        vec![
                            seg(re(a2), re(big_r - 1.0), Boundary),
                            far_arc(PI),
                            seg(re(-big_r - 1.0), re(a1), Boundary),
                            arc(c.center, c.radius, PI, 0.0, Boundary),
                        ]
                    }
                }
                DomainCase::GammaZeroCurve => vec![
                    seg(re(a2), re(big_r - k), Boundary),
                    far_arc(th_l),
                    Piece { path: Path::PolarRoot { upper: true, from: th_l, to: 0.0 }, role: Boundary },
                ],
                DomainCase::SingleCurve if k >= 1.0 => vec![
                    seg(re(a2), re(big_r - k), Boundary),
                    far_arc(th_l),
                    Piece { path: Path::PolarRoot { upper: true, from: th_l, to: 0.0 }, role: Boundary },
                ],
                DomainCase::SingleCurve => {
                    // 0 < kappa < 1, 0 < a < 1: the curve ends at the pole on the negative axis
                    let p = p.unwrap();
                    let d = pole_delta(&wp, p, 0.25 * (a2 - p).min(p.abs()), big)?;
                    delta = Some(d);
                    let dist = |t: f64| {
                        let r = upper(t);
                        (Complex64::new(k * (r * t.cos() - 1.0), k * r * t.sin()) - p).norm() - d
                    };
                    let t_d = last_crossing(dist, 0.0, near_pi)?;
                    let zd = Path::PolarRoot { upper: true, from: t_d, to: t_d }.at(&wp, 0.0)?;
                    let psi = (zd - p).arg();
                    vec![
                        seg(re(a2), re(big_r - k), Boundary),
                        far_arc(near_pi),
                        seg(Complex64::new(-big_r - k, lift), Complex64::new(p - d, lift), Cut),
                        arc(p, d, PI * (1.0 - 1e-12), psi, Closure),
                        Piece { path: Path::PolarRoot { upper: true, from: t_d, to: 0.0 }, role: Boundary },
                    ]
                }
                DomainCase::FullDomain if wp.kappa.is_one() => {
                    let p = p.unwrap();
                    let d = pole_delta(&wp, p, 0.25, big)?;
                    delta = Some(d);
                    vec![
                        seg(re(-big_r - 1.0), re(p - d), Boundary),
                        arc(p, d, PI, 0.0, Closure),
                        seg(re(p + d), re(big_r - 1.0), Boundary),
                        far_arc(PI),
                    ]
                }
                DomainCase::FullDomain => {
                    // 0 < kappa < 1, a >= 1
                    let p = p.unwrap();
                    let gap = p + k;
                    if gap <= 1e-12 * k {
                        let d2 = branch_delta(&wp, k, 0.25 * k, small, big)?;
                        delta = Some(d2);
                        vec![
                            seg(re(-k + d2), re(big_r - k), Boundary),
                            far_arc(near_pi),
                            seg(Complex64::new(-big_r - k, lift), Complex64::new(-k - d2, lift), Cut),
                            arc(-k, d2, near_pi, 0.0, Closure),
                        ]
                    } else {
                        let d = pole_delta(&wp, p, 0.25 * gap.min(p.abs()), big)?;
                        let d2 = branch_delta(&wp, k, 0.25 * gap, small, big)?;
                        delta = Some(d);
                        vec![
                            seg(re(-k + d2), re(p - d), Boundary),
                            arc(p, d, PI, 0.0, Closure),
                            seg(re(p + d), re(big_r - k), Boundary),
                            far_arc(near_pi),
                            seg(Complex64::new(-big_r - k, lift), Complex64::new(-k - d2, lift), Cut),
                            arc(-k, d2, near_pi, 0.0, Closure),
                        ]
                    }
                }
                DomainCase::TwoCurveSlit => {
                    let p = p.unwrap();
                    let gap = p + k;
                    let d = pole_delta(&wp, p, 0.25 * gap.min(p.abs()), big)?;
                    let d2 = branch_delta(&wp, k, 0.25 * gap, small, big)?;
                    delta = Some(d);
                    let ts = desc.theta_star.unwrap();
                    let lower = |t: f64| polar_root(&wp, t, false).unwrap_or(f64::NAN);
                    let t_d = last_crossing(|t| lower(t) - d2 / k, ts, desc.theta_end * (1.0 - 1e-12))?;
                    let r_d = lower(t_d) * k;
                    vec![
                        seg(re(-k + d2), re(p - d), Boundary),
                        arc(p, d, PI, 0.0, Closure),
                        seg(re(p + d), re(big_r - k), Boundary),
                        far_arc(th_l),
                        Piece { path: Path::PolarRoot { upper: true, from: th_l, to: ts }, role: Boundary },
                        Piece { path: Path::PolarRoot { upper: false, from: ts, to: t_d }, role: Boundary },
                        arc(-k, r_d, t_d, 0.0, Closure),
                    ]
                }
                _ => return Err(Error::Degenerate("no contour layout for this domain")),
            }
        }
    };
    let mut c = Contour::from_pieces(wp, desc.case, pieces, per_piece)?;
    c.far = far;
    c.delta = delta;
    Ok(c)
}
