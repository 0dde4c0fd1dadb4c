//! Exact rationals: a thin alias over `num_rational` plus the `num/den`
//! string form used everywhere rationals cross a serialization boundary.

use crate::error::{Error, Result};

pub type Rat = num_rational::Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// Compact display form: integers print bare ("0", "1"), everything else
/// as "num/den" in lowest terms.
pub fn display_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serialization form: always "num/den", even for integers, so round trips
/// never lose exactness or type information.
pub fn json_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts "num/den" or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::ParseError(format!("'{s}' is not a rational (expected num/den)"));
    match s.split_once('/') {
        Some((n, d)) => {
            let num: i64 = n.trim().parse().map_err(|_| bad())?;
            let den: i64 = d.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Rat::new(num, den))
        }
        None => {
            let num: i64 = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(num))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_compact() {
        assert_eq!(display_rat(&rat(0, 1)), "0");
        assert_eq!(display_rat(&rat(2, 4)), "1/2");
        assert_eq!(display_rat(&rat(5, 5)), "1");
    }

    #[test]
    fn json_always_fraction() {
        assert_eq!(json_rat(&rat(0, 3)), "0/1");
        assert_eq!(json_rat(&rat(3, 6)), "1/2");
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!(parse_rat("2/5").unwrap(), rat(2, 5));
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rat("-1/3").unwrap(), rat(-1, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
