//! Fixed-precision number rendering shared by CSV and report output.

/// Significant digits used for every number written by the toolkit.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` like C's `%.12g`: 12 significant digits, trailing zeros
/// removed, scientific notation outside `[1e-4, 1e12)`.
pub fn sig12(x: f64) -> String {
    sig(x, SIG_DIGITS)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // let the standard formatter do the rounding, then read the exponent back
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 12 significant digits (the value `sig12` prints).
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        sig12(x).parse().unwrap_or(x)
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.1584936490538902), "0.158493649054");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(123456789012.4), "123456789012");
        assert_eq!(sig12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(sig12(1.5e-7), "1.5e-07");
        assert_eq!(sig12(0.00012345), "0.00012345");
        assert_eq!(sig12(9.9999999999999e-6), "1e-05");
        assert_eq!(sig12(f64::INFINITY), "inf");
    }

    #[test]
    fn round_trip_rounding() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
    }
}
