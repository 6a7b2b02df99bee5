//! Real-variable auxiliary functions: `H_alpha`, `F_kappa`, `J_kappa`, the
//! polar boundary coefficient `b(theta)` and the sign tables attached to them.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Kappa, Params, INTEGER_TOL};
use crate::roots::{bisect, roots_in, BISECT_TOL};

/// Below this angle `b` and `b'` switch to their limiting values.
pub const THETA_LIMIT: f64 = 1e-8;
/// `ell` below this magnitude uses the closed form of `B'`.
pub const ELL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignEntry {
    pub lo: f64,
    pub hi: f64,
    pub sign: Sign,
}

/// Ordered list of open sub-intervals with a constant sign on each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignTable {
    pub entries: Vec<SignEntry>,
}

impl SignTable {
    /// Builds a table on `(lo, hi)` from a sign pattern and its interior zeros.
    pub fn from_pattern(lo: f64, hi: f64, pattern: &[Sign], zeros: &[f64]) -> SignTable {
        debug_assert_eq!(pattern.len(), zeros.len() + 1);
        let mut cuts = Vec::with_capacity(zeros.len() + 2);
        cuts.push(lo);
        cuts.extend_from_slice(zeros);
        cuts.push(hi);
        let entries = pattern
            .iter()
            .enumerate()
            .map(|(i, &sign)| SignEntry { lo: cuts[i], hi: cuts[i + 1], sign })
            .collect();
        SignTable { entries }
    }

    pub fn constant(lo: f64, hi: f64, sign: Sign) -> SignTable {
        SignTable::from_pattern(lo, hi, &[sign], &[])
    }

    pub fn zeros(&self) -> Vec<f64> {
        self.entries.iter().skip(1).map(|e| e.lo).collect()
    }

    pub fn pattern(&self) -> Vec<Sign> {
        self.entries.iter().map(|e| e.sign).collect()
    }

    pub fn sign_at(&self, x: f64) -> Option<Sign> {
        self.entries.iter().find(|e| x > e.lo && x < e.hi).map(|e| e.sign)
    }
}

// ---------------------------------------------------------------------------
// H_alpha(x) = sin(alpha x) - alpha sin x

fn h_series(alpha: f64, x: f64) -> f64 {
    // sum_{n>=1} (-1)^n (alpha^{2n+1} - alpha) x^{2n+1} / (2n+1)!
    let mut sum = 0.0;
    let mut ax = alpha * x; // (alpha x)^{2n+1}
    let mut xx = x;
    let mut fact = 1.0;
    let a2 = ax * ax;
    let x2 = x * x;
    for n in 1..10 {
        ax *= a2;
        xx *= x2;
        fact *= ((2 * n) * (2 * n + 1)) as f64;
        let term = (ax - alpha * xx) / fact;
        sum += if n % 2 == 1 { -term } else { term };
    }
    sum
}

pub fn h_alpha(alpha: f64, x: f64) -> f64 {
    if (alpha * x).abs() < 0.1 && x.abs() < 0.1 {
        h_series(alpha, x)
    } else {
        (alpha * x).sin() - alpha * x.sin()
    }
}

/// `H_alpha'(x) = -2 alpha sin((alpha+1)x/2) sin((alpha-1)x/2)`.
pub fn h_alpha_prime(alpha: f64, x: f64) -> f64 {
    -2.0 * alpha * ((alpha + 1.0) * x / 2.0).sin() * ((alpha - 1.0) * x / 2.0).sin()
}

/// Right end of `I_1 = (0, min(2 pi, 2 pi / alpha))`.
pub fn i1_upper(alpha: f64) -> f64 {
    (2.0 * PI).min(2.0 * PI / alpha)
}

/// Sign of `H_alpha` on `I_1`, with the interior zero `y_*` when present.
pub fn h_alpha_sign_profile(alpha: f64) -> Result<SignTable> {
    use Sign::*;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::OutOfRange(format!("alpha must be positive, got {alpha}")));
    }
    if (alpha - 1.0).abs() < INTEGER_TOL {
        return Err(Error::Degenerate("H_1 vanishes identically"));
    }
    let hi = i1_upper(alpha);
    let peak = 2.0 * PI / (alpha + 1.0);
    let h = |x| h_alpha(alpha, x);
    let table = if alpha <= 0.5 {
        SignTable::constant(0.0, hi, Positive)
    } else if alpha < 1.0 {
        let y = bisect(h, peak, hi, BISECT_TOL)?;
        SignTable::from_pattern(0.0, hi, &[Positive, Negative], &[y])
    } else if alpha < 2.0 {
        let y = bisect(h, peak, hi, BISECT_TOL)?;
        SignTable::from_pattern(0.0, hi, &[Negative, Positive], &[y])
    } else {
        SignTable::constant(0.0, hi, Negative)
    };
    Ok(table)
}

// ---------------------------------------------------------------------------
// F_kappa(x) = tan x cot(kappa x) on I_0 = (0, min(pi, pi/kappa))

pub fn f_kappa(kappa: f64, x: f64) -> f64 {
    if x.abs() < THETA_LIMIT {
        return 1.0 / kappa;
    }
    x.tan() / (kappa * x).tan()
}

/// `F_kappa'(x) = H_kappa(2x) / (2 (cos x sin kappa x)^2)`.
pub fn f_kappa_prime(kappa: f64, x: f64) -> f64 {
    let d = x.cos() * (kappa * x).sin();
    h_alpha(kappa, 2.0 * x) / (2.0 * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FTableCase {
    /// `kappa <= 1/2`: increasing on both sides of `pi/2`.
    A,
    /// `1/2 < kappa < 1`: local maximum below 1 after `pi/2`.
    B,
    /// `1 < kappa < 2`: local minimum above 1 after `pi/2`.
    C,
    /// `kappa >= 2`: decreasing.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FKappaTable {
    pub case: FTableCase,
    pub x_star: Option<f64>,
    pub f_at_x_star: Option<f64>,
}

pub fn f_kappa_table(kappa: f64) -> Result<FKappaTable> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::OutOfRange(format!("kappa must be positive, got {kappa}")));
    }
    if (kappa - 1.0).abs() < INTEGER_TOL {
        return Err(Error::Degenerate("F_1 is identically 1"));
    }
    let case = if kappa <= 0.5 {
        FTableCase::A
    } else if kappa < 1.0 {
        FTableCase::B
    } else if kappa < 2.0 {
        FTableCase::C
    } else {
        FTableCase::D
    };
    let (x_star, f_at_x_star) = match case {
        FTableCase::B | FTableCase::C => {
            let y = h_alpha_sign_profile(kappa)?.zeros()[0];
            let x = y / 2.0;
            (Some(x), Some(f_kappa(kappa, x)))
        }
        _ => (None, None),
    };
    Ok(FKappaTable { case, x_star, f_at_x_star })
}

// ---------------------------------------------------------------------------
// J_kappa and G

pub fn j_kappa(kappa: f64, x: f64) -> Result<f64> {
    if (kappa - 0.5).abs() < INTEGER_TOL {
        return Ok(1.0);
    }
    let den = 4.0 * kappa * x - 2.0 * kappa - 1.0;
    if den == 0.0 {
        return Err(Error::OutOfRange(format!("J_kappa pole at x = {x}")));
    }
    Ok((2.0 * x - 2.0 * kappa - 1.0) / den)
}

/// Location of the pole of `J_kappa`.
pub fn j_kappa_pole(kappa: f64) -> f64 {
    0.5 + 1.0 / (4.0 * kappa)
}

/// Threshold `G(kappa) = (2 kappa^2 + 3 kappa + 1) / (6 kappa)` for the sign of `b'` near 0.
pub fn g_kappa(kappa: f64) -> f64 {
    (2.0 * kappa * kappa + 3.0 * kappa + 1.0) / (6.0 * kappa)
}

pub fn ell(kappa: f64, a: f64) -> f64 {
    4.0 * a * kappa - 2.0 * kappa - 1.0
}

// ---------------------------------------------------------------------------
// b(theta) and friends, for finite positive kappa

fn positive_kappa(params: &Params) -> Result<(f64, f64)> {
    match params.kappa {
        Kappa::Finite(k) if k > 0.0 => Ok((k, k * params.gamma)),
        Kappa::Finite(_) => Err(Error::NotApplicable("negative kappa; reduce first")),
        Kappa::Infinite => Err(Error::NotApplicable("infinite kappa has no polar form")),
    }
}

fn check_theta(params: &Params, theta: f64) -> Result<()> {
    let up = params.theta_upper();
    if !theta.is_finite() || theta.abs() >= up {
        return Err(Error::OutOfRange(format!("theta = {theta} outside (-{up}, {up})")));
    }
    Ok(())
}

/// `b(0) = (kappa + 1)/kappa - 2a`.
pub fn b_at_zero(params: &Params) -> Result<f64> {
    let (k, a) = positive_kappa(params)?;
    Ok((k + 1.0) / k - 2.0 * a)
}

/// `b(theta) = sin((kappa+1) theta) / sin(kappa theta) - 2a cos theta`, even in theta.
pub fn b_theta(params: &Params, theta: f64) -> Result<f64> {
    let (k, a) = positive_kappa(params)?;
    check_theta(params, theta)?;
    if theta.abs() < THETA_LIMIT {
        return Ok((k + 1.0) / k - 2.0 * a);
    }
    Ok(((k + 1.0) * theta).sin() / (k * theta).sin() - 2.0 * a * theta.cos())
}

/// `B(theta) = 2 sin^2(kappa theta) b'(theta) = H_{2kappa+1}(theta) + 4a sin theta sin^2(kappa theta)`.
pub fn big_b(params: &Params, theta: f64) -> Result<f64> {
    let (k, a) = positive_kappa(params)?;
    check_theta(params, theta)?;
    let s = (k * theta).sin();
    Ok(h_alpha(2.0 * k + 1.0, theta) + 4.0 * a * theta.sin() * s * s)
}

/// Derivative of `B`, `2 ell cos(theta) sin^2(kappa theta) (F_kappa(theta) + J_kappa(a))`,
/// written without the removable singularities of `F` and `J`.
pub fn big_b_prime(params: &Params, theta: f64) -> Result<f64> {
    let (k, a) = positive_kappa(params)?;
    check_theta(params, theta)?;
    let s = (k * theta).sin();
    let l = ell(k, a);
    if l.abs() < ELL_TOL {
        return Ok((1.0 - 4.0 * k * k) / k * theta.cos() * s * s);
    }
    // ell * J_kappa(a) = 2a - 2kappa - 1
    Ok(2.0 * (l * theta.sin() * s * (k * theta).cos() + (2.0 * a - 2.0 * k - 1.0) * theta.cos() * s * s))
}

/// `b'(theta) = H_{2kappa+1}(theta) / (2 sin^2(kappa theta)) + 2a sin theta`, odd in theta.
pub fn b_prime(params: &Params, theta: f64) -> Result<f64> {
    let (k, a) = positive_kappa(params)?;
    check_theta(params, theta)?;
    if theta.abs() < THETA_LIMIT {
        return Ok(0.0);
    }
    if (k - 1.0).abs() < INTEGER_TOL {
        // H_3 = -4 sin^3 cancels badly near pi
        return Ok(2.0 * (a - 1.0) * theta.sin());
    }
    let s = (k * theta).sin();
    Ok(h_alpha(2.0 * k + 1.0, theta) / (2.0 * s * s) + 2.0 * a * theta.sin())
}

/// `D(theta) = b(theta)^2 - 4a(a - 1)`.
pub fn d_theta(params: &Params, theta: f64) -> Result<f64> {
    let (_, a) = positive_kappa(params)?;
    let b = b_theta(params, theta)?;
    Ok(b * b - 4.0 * a * (a - 1.0))
}

/// `D'(theta) = 2 b b'`.
pub fn d_prime(params: &Params, theta: f64) -> Result<f64> {
    Ok(2.0 * b_theta(params, theta)? * b_prime(params, theta)?)
}

// ---------------------------------------------------------------------------
// sign tables for b' and b on I_0

/// Sign of `b'` on `I_0`, with the interior zero `phi_*` located by bisection.
pub fn b_prime_sign_profile(params: &Params) -> Result<SignTable> {
    use Sign::*;
    let (k, a) = positive_kappa(params)?;
    let hi = params.theta_upper();
    if (k - 1.0).abs() < INTEGER_TOL {
        // b' = 2(a - 1) sin theta
        let s = if (a - 1.0).abs() < ELL_TOL { Zero } else { Sign::of(a - 1.0) };
        return Ok(SignTable::constant(0.0, hi, s));
    }
    if (k - 0.5).abs() < INTEGER_TOL {
        let s = if (a - 1.0).abs() < ELL_TOL { Zero } else { Sign::of(a - 1.0) };
        return Ok(SignTable::constant(0.0, hi, s));
    }
    let g = g_kappa(k);
    let pattern: &[Sign] = if k < 0.5 {
        if a > g {
            &[Positive, Negative]
        } else {
            &[Negative]
        }
    } else if k < 1.0 {
        if a < g {
            &[Negative, Positive]
        } else {
            &[Positive]
        }
    } else if a > g {
        &[Positive, Negative]
    } else {
        &[Negative]
    };
    if pattern.len() == 1 {
        return Ok(SignTable::constant(0.0, hi, pattern[0]));
    }
    let bb = |t: f64| big_b(params, t).unwrap_or(f64::NAN);
    let lo = 1e-6 * hi;
    let top = hi * (1.0 - 1e-12);
    let phi = if Sign::of(bb(lo)) != pattern[0] {
        lo
    } else {
        bisect(bb, lo, top, BISECT_TOL)?
    };
    Ok(SignTable::from_pattern(0.0, hi, pattern, &[phi]))
}

/// Placement constraint on the zeros of `b` relative to `pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroPlacement {
    None,
    BelowHalfPi,
    AboveHalfPi,
}

/// One row of the sign table of `b` on `I_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BSignRow {
    pub row: u8,
    pub pattern: Vec<Sign>,
    pub placement: ZeroPlacement,
}

/// Selects the row of the sign table of `b` for the given parameters.
/// Rows are numbered 1..=12 in order of increasing kappa and decreasing `2a - 1`.
pub fn b_sign_row(params: &Params) -> Result<BSignRow> {
    use Sign::*;
    use ZeroPlacement::*;
    let (k, a) = positive_kappa(params)?;
    if (k - 1.0).abs() < INTEGER_TOL {
        return Err(Error::NotApplicable("kappa = 1 has b = 2(1-a) cos theta"));
    }
    let t = 2.0 * a - 1.0;
    let inv = 1.0 / k;
    let row = |row: u8, pattern: &[Sign], placement| BSignRow { row, pattern: pattern.to_vec(), placement };
    let r = if k <= 0.5 {
        if t > inv {
            row(1, &[Negative, Positive], BelowHalfPi)
        } else if t >= 0.0 {
            row(2, &[Positive], None)
        } else {
            row(3, &[Positive, Negative], AboveHalfPi)
        }
    } else if k < 1.0 {
        let fs = f_kappa_table(k)?.f_at_x_star.expect("case B has x_*");
        if t > inv {
            row(4, &[Negative, Positive], BelowHalfPi)
        } else if t > fs {
            row(5, &[Positive], None)
        } else if t >= 0.0 {
            row(6, &[Positive, Negative, Positive], AboveHalfPi)
        } else {
            row(7, &[Positive, Negative], AboveHalfPi)
        }
    } else if k < 2.0 {
        let fs = f_kappa_table(k)?.f_at_x_star.expect("case C has x_*");
        if t >= fs {
            row(8, &[Negative, Positive, Negative], AboveHalfPi)
        } else if t >= inv {
            row(9, &[Negative], None)
        } else {
            row(10, &[Positive, Negative], BelowHalfPi)
        }
    } else if t >= inv {
        row(11, &[Negative], None)
    } else {
        row(12, &[Positive, Negative], None)
    };
    Ok(r)
}

/// Sign table of `b` on `I_0`: the row pattern with its zeros located numerically.
pub fn b_sign_table(params: &Params) -> Result<(BSignRow, SignTable)> {
    let row = b_sign_row(params)?;
    let hi = params.theta_upper();
    let zeros = roots_in(|t| b_theta(params, t).unwrap_or(f64::NAN), 0.0, hi * (1.0 - 1e-12), 4096);
    if zeros.len() + 1 != row.pattern.len() {
        return Err(Error::Degenerate("zero count of b differs from its sign table"));
    }
    let table = SignTable::from_pattern(0.0, hi, &row.pattern, &zeros);
    Ok((row, table))
}

/// Whether all zeros satisfy the placement constraint.
pub fn placement_holds(p: ZeroPlacement, zeros: &[f64]) -> bool {
    match p {
        ZeroPlacement::None => true,
        ZeroPlacement::BelowHalfPi => zeros.iter().all(|&z| z < FRAC_PI_2),
        ZeroPlacement::AboveHalfPi => zeros.iter().all(|&z| z > FRAC_PI_2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: f64, g: f64) -> Params {
        Params::finite(k, g).unwrap()
    }

    #[test]
    fn h_series_matches_direct_form() {
        for &alpha in &[0.3f64, 0.75, 1.5, 3.0, 5.5] {
            for &x in &[0.01f64, 0.03, 0.05] {
                let direct = (alpha * x).sin() - alpha * x.sin();
                let s = h_series(alpha, x);
                assert!((direct - s).abs() < 1e-15, "{alpha} {x}");
            }
        }
    }

    #[test]
    fn h_prime_matches_difference_quotient() {
        let h = 1e-6;
        for &alpha in &[0.4, 0.8, 1.3, 2.5] {
            for i in 1..20 {
                let x = i as f64 * 0.3;
                let fd = (h_alpha(alpha, x + h) - h_alpha(alpha, x - h)) / (2.0 * h);
                assert!((fd - h_alpha_prime(alpha, x)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn h_profile_cases() {
        assert_eq!(h_alpha_sign_profile(0.4).unwrap().pattern(), vec![Sign::Positive]);
        assert_eq!(h_alpha_sign_profile(2.5).unwrap().pattern(), vec![Sign::Negative]);
        let t = h_alpha_sign_profile(0.75).unwrap();
        assert_eq!(t.pattern(), vec![Sign::Positive, Sign::Negative]);
        let y = t.zeros()[0];
        assert!(h_alpha(0.75, y).abs() < 1e-12);
        assert!(matches!(h_alpha_sign_profile(1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn f_kappa_limit_and_table() {
        assert!((f_kappa(3.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        let b = f_kappa_table(0.75).unwrap();
        assert_eq!(b.case, FTableCase::B);
        assert!(b.f_at_x_star.unwrap() < 1.0);
        let c = f_kappa_table(1.5).unwrap();
        assert!(c.f_at_x_star.unwrap() > 1.0);
        let x = c.x_star.unwrap();
        assert!(f_kappa_prime(1.5, x).abs() < 1e-9);
    }

    #[test]
    fn j_values() {
        assert_eq!(j_kappa(2.0, 0.0).unwrap(), 1.0);
        assert!((j_kappa(2.0, 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(j_kappa(0.5, 7.0).unwrap(), 1.0);
        assert!(j_kappa(2.0, j_kappa_pole(2.0)).is_err());
    }

    #[test]
    fn b_special_kappas() {
        // kappa = 1/2: b' = 2(a-1) sin theta ; kappa = 1: b = 2(1-a) cos theta
        let q = p(0.5, 1.0);
        let one = p(1.0, 0.3);
        for i in 1..30 {
            let t = i as f64 * 0.1;
            let a = 0.5;
            assert!((b_prime(&q, t).unwrap() - 2.0 * (a - 1.0) * t.sin()).abs() < 1e-12);
            assert!((b_theta(&one, t).unwrap() - 2.0 * 0.7 * t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn b_at_half_pi() {
        for &k in &[0.3, 0.7, 1.4, 1.9] {
            let pp = p(k, 0.37);
            let b = b_theta(&pp, FRAC_PI_2).unwrap();
            assert!((b - 1.0 / (k * FRAC_PI_2).tan()).abs() < 1e-12);
        }
    }

    #[test]
    fn big_b_prime_ell_zero_branch() {
        let k = 1.5;
        let a = j_kappa_pole(k);
        let pp = p(k, a / k);
        let t = 0.7;
        let h = 1e-6;
        let fd = (big_b(&pp, t + h).unwrap() - big_b(&pp, t - h).unwrap()) / (2.0 * h);
        assert!((fd - big_b_prime(&pp, t).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn b_prime_profile_special() {
        assert_eq!(b_prime_sign_profile(&p(0.5, 2.0)).unwrap().pattern(), vec![Sign::Zero]);
        assert_eq!(b_prime_sign_profile(&p(0.5, 3.0)).unwrap().pattern(), vec![Sign::Positive]);
        assert_eq!(b_prime_sign_profile(&p(0.5, 1.0)).unwrap().pattern(), vec![Sign::Negative]);
    }

    #[test]
    fn rejects_infinite_kappa() {
        let pp = Params::infinite(0.0).unwrap();
        assert!(matches!(b_theta(&pp, 0.3), Err(Error::NotApplicable(_))));
    }
}
