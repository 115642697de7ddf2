//! Deterministic number formatting for machine-readable outputs.
//!
//! All table and record values are serialized with 12 significant digits,
//! printf %g style: positional notation for decimal exponents in [-4, 12),
//! scientific otherwise, trailing zeros trimmed. Identical values therefore
//! serialize identically across CSV and JSON-lines encodings and across runs.

/// Formats with 12 significant digits, %g style.
pub fn g12(x: f64) -> String {
    format_sig(x, 12)
}

/// Formats with `sig` significant digits, %g style.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let negative = x < 0.0;
    // Round to `sig` digits in scientific form, then re-shape as a string so
    // no second rounding can occur.
    let sci = format!("{:.*e}", sig - 1, x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let exp: i32 = exp.parse().expect("exponent");

    let body = if (-4..sig as i32).contains(&exp) {
        positional(&digits, exp)
    } else {
        let trimmed = trim_zeros(&insert_point(&digits, 1));
        format!("{trimmed}e{exp}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Places `digits` at decimal exponent `exp` in positional notation.
fn positional(digits: &str, exp: i32) -> String {
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        trim_zeros(&format!("0.{zeros}{digits}"))
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            let mut s = digits.to_string();
            s.push_str(&"0".repeat(int_len - digits.len()));
            s
        } else {
            trim_zeros(&insert_point(digits, int_len))
        }
    }
}

fn insert_point(digits: &str, at: usize) -> String {
    format!("{}.{}", &digits[..at], &digits[at..])
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_simple_fractions() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(90.0), "90");
        assert_eq!(g12(1000.0), "1000");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(0.5), "0.5");
        assert_eq!(g12(2f64.powi(-10)), "0.0009765625");
    }

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(2.0 / 3.0), "0.666666666667");
        assert_eq!(g12(123456789.123456), "123456789.123");
    }

    #[test]
    fn scientific_regime() {
        assert_eq!(g12(1e-7), "1e-7");
        assert_eq!(g12(1.5e13), "1.5e13");
        assert_eq!(g12(-2.25e-9), "-2.25e-9");
        assert_eq!(g12(1e12), "1e12");
        assert_eq!(g12(999999999999.0), "999999999999");
    }

    #[test]
    fn specials() {
        assert_eq!(g12(f64::NAN), "nan");
        assert_eq!(g12(f64::INFINITY), "inf");
        assert_eq!(g12(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn round_trips_within_precision() {
        for &x in &[0.9962, 89.9999999, 3.14e-5, 0.001, 6.056e-3, 1.0 - 1e-13] {
            let parsed: f64 = g12(x).parse().unwrap();
            assert!(
                (parsed - x).abs() <= 1e-11 * x.abs().max(1.0),
                "{x} -> {parsed}"
            );
        }
    }
}
