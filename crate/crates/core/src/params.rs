use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Integer detection tolerance for kappa.
pub const INTEGER_TOL: f64 = 1e-12;

/// The deformation parameter. `Infinite` is the classical exponential limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    pub fn finite(self) -> Option<f64> {
        match self {
            Kappa::Finite(k) => Some(k),
            Kappa::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Kappa::Infinite)
    }

    /// True for finite kappa within `INTEGER_TOL` of an integer.
    pub fn is_integer(self) -> bool {
        match self {
            Kappa::Finite(k) => (k - k.round()).abs() < INTEGER_TOL,
            Kappa::Infinite => false,
        }
    }

    pub fn is_one(self) -> bool {
        matches!(self, Kappa::Finite(k) if (k - 1.0).abs() < INTEGER_TOL)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Finite(k) => write!(f, "{k}"),
            Kappa::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" | "oo" => return Ok(Kappa::Infinite),
            _ => {}
        }
        let k: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParams(format!("cannot parse kappa from {s:?}")))?;
        if k.is_infinite() && k > 0.0 {
            return Ok(Kappa::Infinite);
        }
        Ok(Kappa::Finite(k))
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Finite(k) => s.serialize_f64(*k),
            Kappa::Infinite => s.serialize_str("inf"),
        }
    }
}

/// A validated parameter pair (kappa, gamma).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub kappa: Kappa,
    pub gamma: f64,
}

impl Params {
    pub fn new(kappa: Kappa, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParams(format!("gamma must be finite, got {gamma}")));
        }
        if let Kappa::Finite(k) = kappa {
            if !k.is_finite() {
                return Err(Error::InvalidParams(format!("kappa must be finite or inf, got {k}")));
            }
            if k == 0.0 {
                return Err(Error::InvalidParams("kappa must be non-zero".into()));
            }
        }
        Ok(Params { kappa, gamma })
    }

    pub fn finite(kappa: f64, gamma: f64) -> Result<Self> {
        Params::new(Kappa::Finite(kappa), gamma)
    }

    pub fn infinite(gamma: f64) -> Result<Self> {
        Params::new(Kappa::Infinite, gamma)
    }

    /// `a = kappa * gamma`, defined for finite kappa.
    pub fn a(&self) -> Option<f64> {
        self.kappa.finite().map(|k| k * self.gamma)
    }

    /// Discriminant of `q(z) = gamma z^2 + (1 + 1/kappa) z + 1`.
    pub fn disc0(&self) -> f64 {
        let c = self.linear_coeff();
        c * c - 4.0 * self.gamma
    }

    /// Linear coefficient `1 + 1/kappa` of `q`.
    pub fn linear_coeff(&self) -> f64 {
        match self.kappa {
            Kappa::Finite(k) => 1.0 + 1.0 / k,
            Kappa::Infinite => 1.0,
        }
    }

    /// Position of the pole `-1/gamma`, if any.
    pub fn pole(&self) -> Option<f64> {
        (self.gamma != 0.0).then(|| -1.0 / self.gamma)
    }

    pub fn is_positive_finite(&self) -> bool {
        matches!(self.kappa, Kappa::Finite(k) if k > 0.0)
    }

    /// Reduced parameters `(-kappa, gamma - 1/kappa)` for negative kappa.
    pub fn reduced(&self) -> Option<Params> {
        match self.kappa {
            Kappa::Finite(k) if k < 0.0 => {
                let g = self.gamma - 1.0 / k;
                // gamma = 1/kappa exactly, up to rounding
                let g = if g.abs() <= 4.0 * f64::EPSILON * self.gamma.abs().max(1.0 / k.abs()) { 0.0 } else { g };
                Some(Params { kappa: Kappa::Finite(-k), gamma: g })
            }
            _ => None,
        }
    }

    /// Upper end of the canonical angle interval `(0, min(pi, pi/kappa))`.
    pub fn theta_upper(&self) -> f64 {
        match self.kappa {
            Kappa::Finite(k) => PI.min(PI / k.abs()),
            Kappa::Infinite => PI,
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(kappa={}, gamma={})", self.kappa, self.gamma)
    }
}

/// An angle in the canonical interval for some positive kappa.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64, upper: f64) -> Result<Self> {
        if theta.is_finite() && theta > 0.0 && theta < upper {
            Ok(Angle(theta))
        } else {
            Err(Error::OutOfRange(format!("angle {theta} not in (0, {upper})")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kappa() {
        assert_eq!("inf".parse::<Kappa>().unwrap(), Kappa::Infinite);
        assert_eq!("2.5".parse::<Kappa>().unwrap(), Kappa::Finite(2.5));
        assert!("x".parse::<Kappa>().is_err());
    }

    #[test]
    fn zero_kappa_rejected() {
        assert!(Params::finite(0.0, 1.0).is_err());
        assert!(Params::finite(1.0, f64::NAN).is_err());
    }

    #[test]
    fn reduced_parameters() {
        let p = Params::finite(-2.0, 0.5).unwrap().reduced().unwrap();
        assert_eq!(p.kappa, Kappa::Finite(2.0));
        assert!((p.gamma - 1.0).abs() < 1e-15);
    }
}
