//! Matrix realizations, JSON formats and the command-line front end for
//! the deformed angular momentum algebras; the exact calculus itself lives
//! in the `defangmom-core` crate.

pub mod jsonio;
pub mod repbuilder;

use defangmom_core::exactnum::{rat, Rational};

/// Default numeric tolerance for verification reports, overridable through
/// the `DEFANGMOM_FLOAT_TOL` environment variable.
pub fn float_tol() -> f64 {
    std::env::var("DEFANGMOM_FLOAT_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-10)
}

/// Parses `"3"`, `"-1/10"` or `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(rat(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let i: i64 = if int == "-" || int.is_empty() { 0 } else { int.parse().ok()? };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let f: i64 = frac.parse().ok()?;
        let scale = 10i64.pow(frac.len() as u32);
        return Some(rat(i * scale + sign * f, scale));
    }
    s.parse::<i64>().ok().map(|n| rat(n, 1))
}

/// Parses an angular momentum `"2"` or `"3/2"` into its doubled value.
pub fn parse_twice(s: &str) -> Option<u32> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        if den.trim() != "2" {
            return None;
        }
        return num.trim().parse().ok();
    }
    s.parse::<u32>().ok().map(|j| 2 * j)
}

/// Parses a possibly negative projection or label value, doubled.
pub fn parse_twice_signed(s: &str) -> Option<i32> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        if den.trim() != "2" {
            return None;
        }
        return num.trim().parse().ok();
    }
    s.parse::<i32>().ok().map(|j| 2 * j)
}
