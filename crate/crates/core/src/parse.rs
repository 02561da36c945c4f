//! Strict parsers for command-line input.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parses an exact decimal integer: optional sign, then ASCII digits only.
///
/// Rejects whitespace, `_` separators, exponents and fractional parts, so
/// `1e6` and `1000000.0` are errors rather than silently rounded.
pub fn parse_int(s: &str) -> Result<i64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::domain(format!("not an exact integer: {s:?}")));
    }
    s.parse::<i64>()
        .map_err(|_| Error::domain(format!("integer out of range: {s:?}")))
}

/// [`parse_int`] restricted to non-negative values.
pub fn parse_uint(s: &str) -> Result<u64> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::domain(format!("not a non-negative integer: {s:?}")));
    }
    digits
        .parse::<u64>()
        .map_err(|_| Error::domain(format!("integer out of range: {s:?}")))
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::domain(format!(
                        concat!("unknown ", stringify!($name), " {:?}; expected one of: {}"),
                        s,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum! {
    /// Verification suites.
    Suite {
        BabyLemma => "baby-lemma",
        ClassNumber => "class-number",
        Cor14 => "cor14",
        MBound => "m-bound",
        EngineEquivalence => "engine-equivalence",
    }
}

keyword_enum! {
    /// Scan modes over primes.
    ScanMode {
        Classify => "classify",
        Olson => "olson",
        Germain => "germain",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_integers() {
        assert_eq!(parse_int("-115").unwrap(), -115);
        assert_eq!(parse_int("+7").unwrap(), 7);
        assert_eq!(parse_int("0").unwrap(), 0);
        assert_eq!(parse_int("-9223372036854775808").unwrap(), i64::MIN);
        for bad in ["", "-", "+", "1e6", "1.0", " 1", "1 ", "1_000", "0x10", "--1", "9223372036854775808"] {
            assert!(parse_int(bad).is_err(), "{bad:?}");
        }
        assert_eq!(parse_uint("18446744073709551615").unwrap(), u64::MAX);
        assert!(parse_uint("-1").is_err());
        assert!(parse_uint("1e3").is_err());
    }

    #[test]
    fn keywords_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), *s);
        }
        for m in ScanMode::ALL {
            assert_eq!(m.to_string().parse::<ScanMode>().unwrap(), *m);
        }
        assert!("Cor14".parse::<Suite>().is_err());
        assert!("olson ".parse::<ScanMode>().is_err());
    }

    proptest! {
        #[test]
        fn parse_int_matches_display(n in any::<i64>()) {
            prop_assert_eq!(parse_int(&n.to_string()).unwrap(), n);
        }

        #[test]
        fn parse_int_agrees_with_std_when_accepted(s in "[+-]?[0-9]{0,22}") {
            if let Ok(v) = parse_int(&s) {
                prop_assert_eq!(Ok(v), s.parse::<i64>());
            }
        }
    }
}
