/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-5 ≤ |x| < 1e9`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (8 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "NA".into())
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(0.6065306597126334), "0.60653066");
        assert_eq!(num(0.20787957635076193), "0.207879576");
        assert_eq!(num(-0.5), "-0.5");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(123456789.4), "123456789");
        assert_eq!(num(1234567890.0), "1.23456789e9");
        assert_eq!(num(1.5e-7), "1.5e-7");
        assert_eq!(num(0.00012345678912), "0.000123456789");
        assert_eq!(num(9.9999999999), "10");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(opt(None), "NA");
    }
}
