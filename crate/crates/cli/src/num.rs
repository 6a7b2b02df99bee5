//! Number formatting at 15 significant digits, like C's `%.15g`.

use serde_json::Value;

const DIGITS: usize = 15;

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // exponent after rounding to DIGITS significant digits
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mant), exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(g15).unwrap_or_default()
}

/// Rounds every number in a JSON tree to 15 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(r) = g15(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(m) => m.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(g15(0.5671432904097838), "0.567143290409784");
        assert_eq!(g15(1.0), "1");
        assert_eq!(g15(-0.36787944117144233), "-0.367879441171442");
        assert_eq!(g15(1e20), "1e+20");
        assert_eq!(g15(1.5e-7), "1.5e-07");
        assert_eq!(g15(123456789012345.6), "123456789012346");
        assert_eq!(g15(999999999999999.9), "1e+15");
        assert_eq!(g15(0.0001), "0.0001");
        assert_eq!(g15(f64::NEG_INFINITY), "-inf");
    }
}
