//! Float formatting for CSV output.

/// Formats `x` like C's `%.9g`: nine significant digits, trailing zeros
/// dropped, scientific notation outside `1e-4 ≤ |x| < 1e9`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // Rounding to nine significant digits may bump the exponent, so read it
    // back from the rounded representation.
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `fmt_float` for present values, empty for missing ones.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}
