use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Angle, Kappa, Params};
use crate::roots::{bisect, roots_in, BISECT_TOL};
use crate::scalar_analysis::{b_theta, d_theta, THETA_LIMIT};
use crate::tsallis_map::{in_map_domain, q_roots, quadratic_roots};

/// Relative width of the band in which a point counts as lying on the boundary.
pub const BOUNDARY_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainCase {
    KappaOneCircle,
    BoundedLens,
    GammaZeroCurve,
    SingleCurve,
    FullDomain,
    TwoCurveSlit,
    InftyHalfStrip,
    InftySlit,
    InftyBounded,
}

impl DomainCase {
    pub fn tag(self) -> &'static str {
        match self {
            DomainCase::KappaOneCircle => "kappa_one_circle",
            DomainCase::BoundedLens => "bounded_lens",
            DomainCase::GammaZeroCurve => "gamma_zero_curve",
            DomainCase::SingleCurve => "single_curve",
            DomainCase::FullDomain => "full_domain",
            DomainCase::TwoCurveSlit => "two_curve_slit",
            DomainCase::InftyHalfStrip => "infty_half_strip",
            DomainCase::InftySlit => "infty_slit",
            DomainCase::InftyBounded => "infty_bounded",
        }
    }
}

/// The line `x sin(slope_angle) - y cos(slope_angle) = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptote {
    pub slope_angle: f64,
    pub offset: f64,
}

impl Asymptote {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        (x * self.slope_angle.sin() - y * self.slope_angle.cos() - self.offset).abs()
    }

    fn pair(angle: f64, offset: f64) -> Vec<Asymptote> {
        vec![
            Asymptote { slope_angle: angle, offset },
            Asymptote { slope_angle: -angle, offset: -offset },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle {
    pub center: f64,
    pub radius: f64,
    /// `Omega` is the open disk when true and the exterior otherwise.
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    fn from_margin(margin: f64, scale: f64, band: f64) -> Membership {
        if margin.abs() <= band * scale.max(1.0) {
            Membership::Boundary
        } else if margin > 0.0 {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Explicit description of `Omega` for positive or infinite kappa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainDescription {
    pub params: Params,
    pub case: DomainCase,
    /// Angle where the two polar roots merge.
    pub theta_star: Option<f64>,
    /// Height where the two infinite-kappa boundary branches merge.
    pub y0: Option<f64>,
    /// Upper limit of `|theta|` (or `|y|` for infinite kappa) inside `Omega`.
    pub theta_end: f64,
    pub circle: Option<Circle>,
    pub asymptotes: Vec<Asymptote>,
    pub alpha: (Complex64, Complex64),
    pub band: f64,
}

fn kappa_a(params: &Params) -> Result<(f64, f64)> {
    match params.kappa {
        Kappa::Finite(k) if k > 0.0 => Ok((k, k * params.gamma)),
        Kappa::Finite(_) => Err(Error::NotApplicable("negative kappa; use the reduced parameters")),
        Kappa::Infinite => Err(Error::NotApplicable("infinite kappa has no polar form")),
    }
}

/// Roots of `a r^2 + b(theta) r + a - 1 = 0` in increasing order, `None` when `D(theta) < 0`.
/// For `a = 0` both entries hold `1 / b(theta)`.
pub fn polar_roots(params: &Params, theta: f64) -> Result<Option<(f64, f64)>> {
    let (_, a) = kappa_a(params)?;
    let b = b_theta(params, theta)?;
    if a == 0.0 {
        if b == 0.0 {
            return Ok(None);
        }
        return Ok(Some((1.0 / b, 1.0 / b)));
    }
    let disc = b * b - 4.0 * a * (a - 1.0);
    if disc < 0.0 {
        return Ok(None);
    }
    Ok(Some(quadratic_roots(a, b, a - 1.0)))
}

/// `z = kappa (r e^{i theta} - 1)` for a root `r` of the boundary quadratic at `theta`.
pub fn boundary_point(params: &Params, r: f64, theta: f64) -> Result<Complex64> {
    let (k, a) = kappa_a(params)?;
    let b = b_theta(params, theta)?;
    let res = a * r * r + b * r + a - 1.0;
    let scale = 1f64.max((a * r * r).abs()).max((b * r).abs());
    if !(r.is_finite() && r > 0.0) || res.abs() > 1e-9 * scale {
        return Err(Error::NotOnBoundary);
    }
    Ok(polar_to_z(k, r, theta))
}

pub(crate) fn polar_to_z(k: f64, r: f64, theta: f64) -> Complex64 {
    Complex64::new(k * (r * theta.cos() - 1.0), k * r * theta.sin())
}

/// Angle `theta_*` where `D` vanishes: the tip of the bounded lens (`a < 0`) or the
/// end of the slit (`kappa > 1`, `a > 1`, `D(0) < 0`).
pub fn theta_star(params: &Params) -> Result<Angle> {
    let (k, a) = kappa_a(params)?;
    let d = |t: f64| d_theta(params, t).unwrap_or(f64::NAN);
    if a < 0.0 {
        let t1 = PI / (k + 1.0);
        let t = bisect(d, 0.0, t1 * (1.0 - 1e-15), BISECT_TOL)?;
        return Angle::new(t, t1);
    }
    if k > 1.0 && !params.kappa.is_one() && a > 1.0 && d(0.0) < 0.0 {
        let t0 = PI / k;
        let roots = roots_in(d, 0.0, t0 * (1.0 - 1e-12), 4096);
        let t = roots
            .into_iter()
            .fold(f64::NAN, f64::max);
        if t.is_nan() {
            return Err(Error::Degenerate("D has no zero below pi/kappa"));
        }
        return Angle::new(t, t0);
    }
    Err(Error::NotApplicable("theta_* exists only for a < 0 or the two-to-one case"))
}

/// `g(y) = cos y + 2 gamma y sin y`.
fn g_infty(gamma: f64, y: f64) -> f64 {
    y.cos() + 2.0 * gamma * y * y.sin()
}

fn g_infty_prime(gamma: f64, y: f64) -> f64 {
    -(1.0 - 2.0 * gamma) * y.sin() + 2.0 * gamma * y * y.cos()
}

/// Interior critical point `y_*` of `g` on `(0, pi)`, defined for `gamma > 1/4` and `gamma < 0`.
pub fn y_star_infty(gamma: f64) -> Result<f64> {
    let gp = |y| g_infty_prime(gamma, y);
    if !(0.0..=0.5).contains(&gamma) {
        bisect(gp, PI / 2.0, PI, BISECT_TOL)
    } else if gamma == 0.5 {
        Ok(PI / 2.0)
    } else if gamma > 0.25 {
        bisect(gp, 1e-6, PI / 2.0, BISECT_TOL)
    } else {
        Err(Error::NotApplicable("y_* exists only for gamma > 1/4 or gamma < 0"))
    }
}

/// Height `y_0` where the infinite-kappa boundary branches meet.
pub fn y_zero(gamma: f64) -> Result<f64> {
    let ys = y_star_infty(gamma)?;
    if gamma > 0.25 {
        bisect(|y| g_infty(gamma, y) - 1.0, ys, PI, BISECT_TOL)
    } else {
        bisect(|y| g_infty(gamma, y) + 1.0, 1e-300, ys, BISECT_TOL)
    }
}

/// The two boundary branches `x_1(y) <= x_2(y)` for infinite kappa, from
/// `(x + 1/(2 gamma))^2 = (1 - g^2) / (4 gamma^2 sin^2 y)`; for `gamma = 0` both equal `-y cot y`.
pub fn boundary_infty(gamma: f64, y: f64) -> Result<(f64, f64)> {
    if !y.is_finite() || y.abs() >= PI {
        return Err(Error::OutOfRange(format!("y = {y} outside (-pi, pi)")));
    }
    let y = y.abs();
    if gamma == 0.0 {
        let x = if y < THETA_LIMIT { -1.0 } else { -y / y.tan() };
        return Ok((x, x));
    }
    let h = if y < THETA_LIMIT {
        (1.0 - 4.0 * gamma) / (4.0 * gamma * gamma)
    } else {
        let s = y.sin();
        let half = (0.5 * y).sin();
        let one_minus_g = 2.0 * half * half - 2.0 * gamma * y * s;
        let cos_half = (0.5 * y).cos();
        let one_plus_g = 2.0 * cos_half * cos_half + 2.0 * gamma * y * s;
        one_minus_g * one_plus_g / (4.0 * gamma * gamma * s * s)
    };
    // at the merge height one factor of 1 - g^2 vanishes; absorb its rounding
    let merge = (1.0 - g_infty(gamma, y)).abs().min((1.0 + g_infty(gamma, y)).abs()) < 1e-9;
    let h = if h < 0.0 && (merge || h > -1e-12 / (gamma * gamma)) { 0.0 } else { h };
    if h < 0.0 {
        return Err(Error::OutOfRange(format!("no boundary point at height {y}")));
    }
    let c = -0.5 / gamma;
    let s = h.sqrt();
    Ok((c - s, c + s))
}

/// Builds the explicit description of `Omega` for positive finite or infinite kappa.
pub fn omega_description(params: &Params) -> Result<DomainDescription> {
    let alpha = q_roots(params);
    let mut d = DomainDescription {
        params: *params,
        case: DomainCase::FullDomain,
        theta_star: None,
        y0: None,
        theta_end: PI,
        circle: None,
        asymptotes: Vec::new(),
        alpha,
        band: BOUNDARY_BAND,
    };
    let g = params.gamma;
    if params.kappa.is_infinite() {
        if (0.0..=0.25).contains(&g) {
            d.case = DomainCase::InftyHalfStrip;
        } else if g > 0.25 {
            d.case = DomainCase::InftySlit;
            d.y0 = Some(y_zero(g)?);
        } else {
            d.case = DomainCase::InftyBounded;
            let y0 = y_zero(g)?;
            d.y0 = Some(y0);
            d.theta_end = y0;
        }
        return Ok(d);
    }
    let (k, a) = kappa_a(params)?;
    let t0 = PI / k;
    let t1 = PI / (k + 1.0);
    if params.kappa.is_one() {
        if g < 0.0 || (g > 0.0 && g < 1.0) {
            d.case = DomainCase::KappaOneCircle;
            d.circle = Some(Circle { center: -1.0 / g, radius: (1.0 - g).sqrt() / g.abs(), interior: g < 0.0 });
            if g < 0.0 {
                let ts = theta_star(params)?.value();
                d.theta_star = Some(ts);
                d.theta_end = ts;
            }
            return Ok(d);
        }
        if g == 0.0 {
            d.case = DomainCase::GammaZeroCurve;
            d.theta_end = t1;
            d.asymptotes = Asymptote::pair(t1, -k * k * t1.sin() / (k + 1.0));
        }
        return Ok(d);
    }
    if a < 0.0 {
        let ts = theta_star(params)?.value();
        d.case = DomainCase::BoundedLens;
        d.theta_star = Some(ts);
        d.theta_end = ts;
    } else if a == 0.0 {
        d.case = DomainCase::GammaZeroCurve;
        d.theta_end = t1;
        d.asymptotes = Asymptote::pair(t1, -k * k * t1.sin() / (k + 1.0));
    } else if k < 1.0 {
        if a < 1.0 {
            d.case = DomainCase::SingleCurve;
            d.theta_end = PI;
        }
    } else {
        d.theta_end = t0;
        d.asymptotes = Asymptote::pair(t0, (1.0 / a - k) * t0.sin());
        if a > 1.0 && params.disc0() < 0.0 {
            d.case = DomainCase::TwoCurveSlit;
            d.theta_star = Some(theta_star(params)?.value());
        } else {
            d.case = DomainCase::SingleCurve;
        }
    }
    Ok(d)
}

/// Classifies `z` against `Omega`. Points outside the natural domain of the map are outside.
pub fn membership(desc: &DomainDescription, z: Complex64) -> Result<Membership> {
    let params = &desc.params;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if !in_map_domain(params, z) {
        return Ok(Membership::Outside);
    }
    let band = desc.band;
    let (x, y) = (z.re, z.im);
    let ay = y.abs();
    match desc.case {
        DomainCase::FullDomain => return Ok(Membership::Inside),
        DomainCase::KappaOneCircle => {
            let c = desc.circle.expect("circle case");
            let dist = (z - c.center).norm();
            let margin = if c.interior { c.radius - dist } else { dist - c.radius };
            return Ok(Membership::from_margin(margin, dist, band));
        }
        DomainCase::InftyHalfStrip | DomainCase::InftySlit | DomainCase::InftyBounded => {
            if ay >= PI {
                return Ok(Membership::Outside);
            }
            let g = params.gamma;
            return Ok(match desc.case {
                DomainCase::InftyHalfStrip => {
                    let (_, x2) = boundary_infty(g, ay)?;
                    Membership::from_margin(x - x2, x.abs(), band)
                }
                DomainCase::InftySlit => {
                    if ay < desc.y0.unwrap() {
                        Membership::Inside
                    } else {
                        match boundary_infty(g, ay) {
                            Ok((x1, x2)) => Membership::from_margin((x1 - x).max(x - x2), x.abs(), band),
                            Err(_) => Membership::Inside,
                        }
                    }
                }
                _ => {
                    if ay >= desc.y0.unwrap() {
                        Membership::Outside
                    } else {
                        let (x1, x2) = boundary_infty(g, ay)?;
                        Membership::from_margin((x - x1).min(x2 - x), x.abs(), band)
                    }
                }
            });
        }
        _ => {}
    }
    let (k, _) = kappa_a(params)?;
    let u = 1.0 + z / k;
    let r = u.norm();
    let t = u.im.atan2(u.re).abs();
    if t >= desc.theta_end && desc.case != DomainCase::TwoCurveSlit {
        return Ok(Membership::Outside);
    }
    let roots = polar_roots(params, t)?;
    let m = match desc.case {
        DomainCase::BoundedLens => match roots {
            Some((lo, hi)) => Membership::from_margin((r - lo).min(hi - r), r, band),
            None => Membership::Outside,
        },
        DomainCase::GammaZeroCurve => {
            let rb = if t < THETA_LIMIT {
                k / (k + 1.0)
            } else {
                (k * t).sin() / ((k + 1.0) * t).sin()
            };
            Membership::from_margin(r - rb, r, band)
        }
        DomainCase::SingleCurve => match roots {
            Some((_, hi)) => Membership::from_margin(r - hi, r, band),
            None => Membership::Inside,
        },
        DomainCase::TwoCurveSlit => {
            if t >= desc.theta_end {
                Membership::Outside
            } else {
                match roots {
                    Some((lo, hi)) if t >= desc.theta_star.unwrap() => {
                        Membership::from_margin((lo - r).max(r - hi), r, band)
                    }
                    _ => Membership::Inside,
                }
            }
        }
        _ => unreachable!(),
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(k: f64, g: f64) -> DomainDescription {
        omega_description(&Params::finite(k, g).unwrap()).unwrap()
    }

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn case_tags() {
        assert_eq!(desc(2.0, -0.5).case, DomainCase::BoundedLens);
        assert_eq!(desc(0.5, 0.0).case, DomainCase::GammaZeroCurve);
        assert_eq!(desc(2.0, 0.3).case, DomainCase::SingleCurve);
        assert_eq!(desc(0.5, 3.0).case, DomainCase::FullDomain);
        assert_eq!(desc(2.0, 0.7).case, DomainCase::TwoCurveSlit);
        assert_eq!(desc(1.0, -1.0).case, DomainCase::KappaOneCircle);
        assert_eq!(desc(1.0, 2.0).case, DomainCase::FullDomain);
    }

    #[test]
    fn kappa_one_minus_one_is_disk() {
        // interior of (x - 1)^2 + y^2 = 2
        let d = desc(1.0, -1.0);
        assert!(membership(&d, c(1.0, 1.3)).unwrap().is_inside());
        assert_eq!(membership(&d, c(1.0, 1.5)).unwrap(), Membership::Outside);
        assert_eq!(membership(&d, c(1.0, 0.0)).unwrap(), Membership::Outside);
    }

    #[test]
    fn gamma_zero_kappa_one_half_plane() {
        let d = desc(1.0, 0.0);
        assert!(membership(&d, c(-0.49, 5.0)).unwrap().is_inside());
        assert_eq!(membership(&d, c(-0.51, 0.2)).unwrap(), Membership::Outside);
    }

    #[test]
    fn theta_star_is_a_zero_of_d() {
        for &(k, g) in &[(2.0, -0.5), (0.5, -1.0), (3.0, 0.5)] {
            let p = Params::finite(k, g).unwrap();
            let t = theta_star(&p).unwrap().value();
            assert!(d_theta(&p, t).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_point_rejects_off_curve_radius() {
        let p = Params::finite(2.0, 0.3).unwrap();
        let (_, hi) = polar_roots(&p, 0.5).unwrap().unwrap();
        assert!(boundary_point(&p, hi, 0.5).is_ok());
        assert!(matches!(boundary_point(&p, hi * 1.1, 0.5), Err(Error::NotOnBoundary)));
    }

    #[test]
    fn infty_branches() {
        let (x1, x2) = boundary_infty(0.0, 1.0).unwrap();
        assert_eq!(x1, x2);
        assert!((x1 + 1.0 / 1f64.tan()).abs() < 1e-15);
        let y0 = y_zero(-0.5).unwrap();
        let (a, b) = boundary_infty(-0.5, y0 * 0.999).unwrap();
        assert!(a < b && (b - a) < 0.5);
        assert!(y_star_infty(0.1).is_err());
    }

    #[test]
    fn descriptions_reject_negative_kappa() {
        assert!(omega_description(&Params::finite(-2.0, 0.0).unwrap()).is_err());
    }
}
