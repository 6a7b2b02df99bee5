//! The deformed exponential `(1 + z/kappa)^kappa` on its principal branch and
//! the map `f(z) = z / (1 + gamma z) * (1 + z/kappa)^kappa`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Kappa, Params};
use crate::scalar_analysis::{b_theta, Sign, THETA_LIMIT};

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `ln |1 + v|` without cancellation for small `v`.
fn ln_abs_1p(v: Complex64) -> f64 {
    if v.norm() < 0.5 {
        0.5 * (2.0 * v.re + v.norm_sqr()).ln_1p()
    } else {
        (1.0 + v).norm().ln()
    }
}

/// Principal `(1 + z/k)^e` for finite `k`, with the zero base handled by the sign of `e`.
fn pow_base(k: f64, z: Complex64, e: f64, integer: bool) -> Result<Complex64> {
    let v = z / k;
    let u = 1.0 + v;
    if u.re == 0.0 && u.im == 0.0 {
        return if e > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else if e == 0.0 {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            Err(Error::Pole(z))
        };
    }
    if u.im == 0.0 {
        if u.re > 0.0 {
            return Ok(Complex64::new(u.re.powf(e), 0.0));
        }
        if integer {
            return Ok(Complex64::new(u.re.powi(e.round() as i32), 0.0));
        }
        return Err(Error::BranchCut(z));
    }
    let ln_r = ln_abs_1p(v);
    let arg = u.im.atan2(u.re);
    Ok(Complex64::from_polar((e * ln_r).exp(), e * arg))
}

/// The deformed exponential `exp_kappa(z)`; `e^z` for infinite kappa.
pub fn exp_kappa(kappa: Kappa, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    match kappa {
        Kappa::Infinite => Ok(z.exp()),
        Kappa::Finite(k) => pow_base(k, z, k, kappa.is_integer()),
    }
}

/// `q(z) = gamma z^2 + (1 + 1/kappa) z + 1`.
pub fn q_poly(params: &Params, z: Complex64) -> Complex64 {
    (params.gamma * z + params.linear_coeff()) * z + 1.0
}

pub fn q_real(params: &Params, x: f64) -> f64 {
    (params.gamma * x + params.linear_coeff()) * x + 1.0
}

/// Roots `alpha_1, alpha_2` of `q`. Real roots are ordered `alpha_1 <= alpha_2`;
/// complex roots have `Im alpha_1 > 0`. For `gamma = 0` both entries hold the single root.
pub fn q_roots(params: &Params) -> (Complex64, Complex64) {
    let c = params.linear_coeff();
    let g = params.gamma;
    if g == 0.0 {
        let r = Complex64::new(-1.0 / c, 0.0);
        return (r, r);
    }
    let disc = c * c - 4.0 * g;
    if disc >= 0.0 {
        let t = -0.5 * (c + c.signum() * disc.sqrt());
        let (r1, r2) = if t == 0.0 { (0.0, 0.0) } else { (t / g, 1.0 / t) };
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        (Complex64::new(lo, 0.0), Complex64::new(hi, 0.0))
    } else {
        let re = -c / (2.0 * g);
        let im = ((-disc).sqrt() / (2.0 * g)).abs();
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}

fn check_pole(params: &Params, z: Complex64) -> Result<Complex64> {
    let den = 1.0 + params.gamma * z;
    if den.re == 0.0 && den.im == 0.0 {
        return Err(Error::Pole(z));
    }
    Ok(den)
}

/// `f(z) = z / (1 + gamma z) * exp_kappa(z)`.
pub fn f_eval(params: &Params, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    let den = check_pole(params, z)?;
    Ok(z / den * exp_kappa(params.kappa, z)?)
}

/// `f'(z) = q(z) / (1 + gamma z)^2 * (1 + z/kappa)^(kappa - 1)`.
pub fn f_prime(params: &Params, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    let den = check_pole(params, z)?;
    let e = match params.kappa {
        Kappa::Infinite => z.exp(),
        Kappa::Finite(k) => pow_base(k, z, k - 1.0, params.kappa.is_integer())?,
    };
    Ok(q_poly(params, z) / (den * den) * e)
}

/// `f''(z)`, from `f' = q P` with `P'/P = (kappa - 1)/(kappa + z) - 2 gamma/(1 + gamma z)`.
pub fn f_second(params: &Params, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    let den = check_pole(params, z)?;
    let g = params.gamma;
    let (p, dlog) = match params.kappa {
        Kappa::Infinite => (z.exp() / (den * den), Complex64::new(1.0, 0.0) - 2.0 * g / den),
        Kappa::Finite(k) => {
            let p = pow_base(k, z, k - 1.0, params.kappa.is_integer())? / (den * den);
            let kz = k + z;
            if kz.re == 0.0 && kz.im == 0.0 {
                return Err(Error::Pole(z));
            }
            (p, (k - 1.0) / kz - 2.0 * g / den)
        }
    };
    let q = q_poly(params, z);
    let dq = 2.0 * g * z + params.linear_coeff();
    Ok(p * (dq + q * dlog))
}

/// Real restriction of `f` where it is real-valued.
pub fn f_real(params: &Params, x: f64) -> Result<f64> {
    Ok(f_eval(params, Complex64::new(x, 0.0))?.re)
}

pub fn f_prime_real(params: &Params, x: f64) -> Result<f64> {
    Ok(f_prime(params, Complex64::new(x, 0.0))?.re)
}

/// Whether `z` lies in the natural domain of `f`.
pub fn in_map_domain(params: &Params, z: Complex64) -> bool {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return false;
    }
    if params.gamma != 0.0 && z.im == 0.0 && 1.0 + params.gamma * z.re == 0.0 {
        return false;
    }
    match params.kappa {
        Kappa::Infinite => true,
        Kappa::Finite(k) => {
            let u = 1.0 + z / k;
            if params.kappa.is_integer() {
                !(k < 0.0 && u.re == 0.0 && u.im == 0.0)
            } else {
                !(u.im == 0.0 && u.re <= 0.0)
            }
        }
    }
}

/// `Arg(1 + z/kappa)` in `(-pi, pi]`.
pub fn theta_xy(kappa: Kappa, x: f64, y: f64) -> Result<f64> {
    let k = kappa
        .finite()
        .ok_or(Error::NotApplicable("theta is defined for finite kappa"))?;
    let (u, v) = (1.0 + x / k, y / k);
    if u == 0.0 && v == 0.0 {
        return Err(Error::OutOfRange("theta undefined at z = -kappa".into()));
    }
    Ok(v.atan2(u))
}

/// The implicit boundary function `F(x, y) = x + gamma (x^2 + y^2) + y cot(kappa theta)`,
/// with `y cot y` for infinite kappa and the `y -> 0` limit on the real axis.
pub fn implicit_f(params: &Params, x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = params.gamma;
    if y.abs() < THETA_LIMIT {
        // y cot(kappa theta) tends to 1 + x/kappa, except beyond the branch point where theta
        // tends to pi and the limit is 0 unless kappa is an integer
        return Ok(match params.kappa {
            Kappa::Finite(k) if 1.0 + x / k < 0.0 && !params.kappa.is_integer() => x + g * x * x,
            _ => q_real(params, x),
        });
    }
    let base = x + g * (x * x + y * y);
    let tail = match params.kappa {
        Kappa::Infinite => y / y.tan(),
        Kappa::Finite(k) => {
            let t = theta_xy(params.kappa, x, y)?;
            y / (k * t).tan()
        }
    };
    Ok(base + tail)
}

/// Sign of `Im f` at the polar point `1 + z/kappa = r e^{i theta}`, read off the factorization
/// `Im f = (positive) * sin(kappa theta) * a (r - r_-)(r - r_+)`.
pub fn im_f_factorized(params: &Params, r: f64, theta: f64) -> Result<Sign> {
    let k = match params.kappa {
        Kappa::Finite(k) if k > 0.0 => k,
        _ => return Err(Error::NotApplicable("polar factorization needs positive finite kappa")),
    };
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::OutOfRange(format!("radius {r} must be positive")));
    }
    let a = k * params.gamma;
    let b = b_theta(params, theta)?;
    let s = Sign::of((k * theta).sin());
    let quad = if a == 0.0 {
        Sign::of(b * r - 1.0)
    } else {
        let disc = b * b - 4.0 * a * (a - 1.0);
        if disc < 0.0 {
            Sign::of(a)
        } else {
            let (lo, hi) = quadratic_roots(a, b, a - 1.0);
            let prod = a.signum() * (r - lo).signum() * (r - hi).signum();
            if r == lo || r == hi {
                Sign::Zero
            } else {
                Sign::of(prod)
            }
        }
    };
    Ok(match (s, quad) {
        (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
        (x, y) if x == y => Sign::Positive,
        _ => Sign::Negative,
    })
}

/// Real roots of `a r^2 + b r + c` (with `a != 0` and non-negative discriminant), ascending.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let sb = if b >= 0.0 { 1.0 } else { -1.0 };
    let t = -0.5 * (b + sb * disc.sqrt());
    let r1 = t / a;
    let r2 = if t != 0.0 { c / t } else { r1 };
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}
