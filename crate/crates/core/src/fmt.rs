//! Numeric text emission shared by every file format.

/// 17 significant digits; parsing the result recovers the exact `f64`.
pub fn f17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        nonfinite(x)
    }
}

/// `%.{digits}g`-style formatting with trailing zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return nonfinite(x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn nonfinite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Inverse of [`f17`]/[`sig`], accepting the non-finite spellings they emit.
pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig_formats() {
        assert_eq!(sig(0.1, 12), "0.1");
        assert_eq!(sig(1234.5, 12), "1234.5");
        assert_eq!(sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(sig(2.5e-9, 12), "2.5e-9");
        assert_eq!(sig(f64::INFINITY, 12), "inf");
    }

    proptest! {
        #[test]
        fn f17_round_trips_exactly(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(parse_f64(&f17(x)).unwrap().to_bits(), x.to_bits());
        }
    }
}
