use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; whitespace is ignored.
pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{input}' as a complex number (expected a+bi)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k]).ok_or_else(bad)?, imag(&body[k..]).ok_or_else(bad)?),
        None => (0.0, imag(body).ok_or_else(bad)?),
    };
    Ok(Complex64::new(re, im))
}

fn real(s: &str) -> Option<f64> {
    if s.chars().any(|c| c.is_ascii_alphabetic() && !matches!(c, 'e' | 'E')) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => real(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn accepted_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-3").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("0.3+0.2i").unwrap(), c(0.3, 0.2));
        assert_eq!(parse_complex("0.3-0.2i").unwrap(), c(0.3, -0.2));
        assert_eq!(parse_complex("-1e-3-2.5e+2i").unwrap(), c(-1e-3, -250.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert_eq!(parse_complex(" 1 - 2 i ").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("1e5").unwrap(), c(1e5, 0.0));
    }

    #[test]
    fn rejected_forms() {
        for s in ["", "bogus", "1+", "i+1", "1+2", "nan", "inf", "1++2i", "0.5x"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
