//! Flag syntax: complex numbers `a+bi`, inclusive ranges `lo..hi:count`,
//! comma-separated lists.

use num_complex::Complex64;

/// Largest number of points a single range may expand to.
pub const MAX_RANGE_POINTS: usize = 10_000;

fn finite(text: &str) -> Result<f64, String> {
    let v: f64 = text.parse().map_err(|_| format!("not a number: {text:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: {text:?}"))
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi` or `i` (no spaces).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(finite(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    // last sign that is not the sign of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (finite(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => finite(other).map_err(|_| format!("bad imaginary part in {text:?}"))?,
    };
    Ok(Complex64::new(re, im))
}

/// Inclusive, evenly spaced range of real values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl RealRange {
    pub fn single(v: f64) -> Self {
        Self { lo: v, hi: v, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * k as f64 / last
                }
            })
            .collect()
    }
}

impl std::fmt::Display for RealRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.count == 1 {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}:{}", self.lo, self.hi, self.count)
        }
    }
}

/// Parses `lo..hi:count` (endpoints included) or a single value.
pub fn parse_range(text: &str) -> Result<RealRange, String> {
    let s = text.trim();
    let Some((lo, rest)) = s.split_once("..") else {
        return Ok(RealRange::single(finite(s)?));
    };
    let (hi, count) = rest
        .split_once(':')
        .ok_or_else(|| format!("range {text:?} needs a point count, as in lo..hi:count"))?;
    let (lo, hi) = (finite(lo)?, finite(hi)?);
    let count: usize = count
        .parse()
        .map_err(|_| format!("bad point count in range {text:?}"))?;
    if count == 0 || count > MAX_RANGE_POINTS {
        return Err(format!("range {text:?} must have between 1 and {MAX_RANGE_POINTS} points"));
    }
    if lo > hi {
        return Err(format!("range {text:?} has lo > hi"));
    }
    if count == 1 && lo != hi {
        return Err(format!("range {text:?} with one point needs lo == hi"));
    }
    Ok(RealRange { lo, hi, count })
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

/// Comma-separated complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

pub fn parse_real_list(text: &str) -> Result<RealList, String> {
    text.split(',').map(|p| finite(p.trim())).collect::<Result<_, _>>().map(RealList)
}

pub fn parse_complex_list(text: &str) -> Result<ComplexList, String> {
    text.split(',').map(parse_complex).collect::<Result<_, _>>().map(ComplexList)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("2+0i").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("0.5+14.134725i").unwrap(), c(0.5, 14.134725));
        assert_eq!(parse_complex("-0.5-3i").unwrap(), c(-0.5, -3.0));
        assert_eq!(parse_complex("1+1e-12i").unwrap(), c(1.0, 1e-12));
        assert_eq!(parse_complex("1e-3-2E+1i").unwrap(), c(1e-3, -20.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        for bad in ["", "x", "1+2j", "1 + 2i", "inf", "nan+1i", "1+xi", "++1i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges() {
        let r = parse_range("2..4:3").unwrap();
        assert_eq!(r.values(), vec![2.0, 3.0, 4.0]);
        let r = parse_range("0.5..3:6").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 6);
        assert_eq!(v[5], 3.0);
        assert!((v[1] - 1.0).abs() < 1e-15);
        assert_eq!(parse_range("14.13").unwrap().values(), vec![14.13]);
        assert_eq!(parse_range("1..1:1").unwrap().values(), vec![1.0]);
        for bad in ["1..2", "1..2:0", "2..1:3", "a..2:3", "1..2:x", "1..2:1", "1..2:100000"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_range("2..4:3").unwrap().to_string(), "2..4:3");
    }

    #[test]
    fn lists() {
        assert_eq!(parse_real_list("-2,-1, 0,1").unwrap().0, vec![-2.0, -1.0, 0.0, 1.0]);
        assert!(parse_real_list("1,,2").is_err());
        assert_eq!(parse_complex_list("2,0.5+1i").unwrap().0.len(), 2);
    }
}
