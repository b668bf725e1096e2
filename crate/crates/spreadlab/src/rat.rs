//! Exact rational arithmetic helpers.
//!
//! All exact quantities in this crate are `Rat = Ratio<i128>`. The widest
//! intermediates we form are cross-multiplications of two denominators; with
//! ambient dimension capped at 24, denominators divide `2^(3n) * |T|` and
//! stay under 2^60, so products fit comfortably in an i128. (64-bit
//! components would overflow exactly there, e.g. when summing an l1 distance
//! whose terms share the denominator `|T| * |S|` at n = 12.)

use num::bigint::BigUint;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive};

use crate::{Error, Result};

pub type Rat = Ratio<i128>;

/// `num/den` as an exact rational. Panics on zero denominator.
pub fn rat(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

pub fn rat_int(v: i128) -> Rat {
    Ratio::from_integer(v)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Widen to an arbitrary-precision rational for arithmetic whose
/// intermediates (cubed targets, ratio-of-ratio comparisons) can exceed
/// 128 bits.
pub fn to_big(r: &Rat) -> num::BigRational {
    num::BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// Parse "a/b", an integer, or a finite decimal ("0.25") into an exact Rat.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse rational from {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let num: i128 = a.trim().parse().map_err(|_| bad())?;
        let den: i128 = b.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: i128 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let digits: i128 = frac.parse().map_err(|_| bad())?;
        let scale = 10i128
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| Error::invalid("decimal too long"))?;
        let frac_part = Ratio::new(digits, scale);
        let int_part = Ratio::from_integer(int_part);
        return Ok(if negative {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let v: i128 = s.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(v))
}

/// Render as "num/den" ("num" when integral). Inverse of `parse_rat` for
/// the fraction form; used anywhere a report prints an exact value.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact `ceil((1/eps) * log2(1/alpha))` for rationals `0 < alpha <= 1`,
/// `eps > 0`.
///
/// Works entirely in integers: with `eps = p/q` and `alpha = a/b`, the bound
/// is the least `k >= 0` with `2^(k*p) * a^q >= b^q`. BigUint powers keep
/// this exact far past where floating-point log2 starts lying.
pub fn ceil_inv_eps_log2_inv(alpha: &Rat, eps: &Rat) -> Result<u64> {
    if !alpha.is_positive() || alpha > &Rat::one() {
        return Err(Error::invalid(format!(
            "alpha must be in (0, 1], got {}",
            format_rat(alpha)
        )));
    }
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive"));
    }
    let a = BigUint::from(*alpha.numer() as u128);
    let b = BigUint::from(*alpha.denom() as u128);
    let p = *eps.numer() as u32;
    let q = *eps.denom() as u32;
    let lhs_base = a.pow(q);
    let rhs = b.pow(q);
    let mut k: u64 = 0;
    let mut lhs = lhs_base;
    while lhs < rhs {
        k += 1;
        lhs <<= p as u64;
        if k > 1 << 20 {
            return Err(Error::invalid("ceil_inv_eps_log2_inv diverged"));
        }
    }
    Ok(k)
}

/// Exact test of `count <= 2^((1 + r/eps) * log2(1/eta))` for rational
/// `eta = a/b` in (0,1] and `eps = p/q > 0`: equivalent to
/// `count^p * a^(p + r q) <= b^(p + r q)`.
pub fn within_piece_count_bound(count: u64, r: u32, eps: &Rat, eta: &Rat) -> Result<bool> {
    if !eps.is_positive() || !eta.is_positive() || eta > &Rat::one() {
        return Err(Error::invalid("need eps > 0 and eta in (0, 1]"));
    }
    let p = *eps.numer() as u32;
    let q = *eps.denom() as u32;
    let a = BigUint::from(*eta.numer() as u128);
    let b = BigUint::from(*eta.denom() as u128);
    let e = p + r * q;
    let lhs = BigUint::from(count).pow(p) * a.pow(e);
    Ok(lhs <= b.pow(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_integers() {
        assert_eq!(parse_rat("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat(" 3 / 6 ").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("2").unwrap(), rat_int(2));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn format_roundtrips() {
        for r in [rat(3, 4), rat_int(7), rat(-5, 8)] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn ceil_bound_matches_float_on_easy_cases() {
        // eps = 1/2, alpha = 1/4: (1/eps) log2(1/alpha) = 4.
        assert_eq!(ceil_inv_eps_log2_inv(&rat(1, 4), &rat(1, 2)).unwrap(), 4);
        // eps = 1/3, alpha = 1/5: 3 * log2 5 = 6.96..., ceil 7.
        assert_eq!(ceil_inv_eps_log2_inv(&rat(1, 5), &rat(1, 3)).unwrap(), 7);
        // alpha = 1 needs zero steps.
        assert_eq!(ceil_inv_eps_log2_inv(&rat_int(1), &rat(1, 7)).unwrap(), 0);
    }

    #[test]
    fn piece_count_bound_exact_boundary() {
        // (1 + r/eps) log2(1/eta) with r = 1, eps = 1, eta = 1/4 gives
        // bound 2^4 = 16: 16 passes, 17 fails.
        let eps = rat_int(1);
        let eta = rat(1, 4);
        assert!(within_piece_count_bound(16, 1, &eps, &eta).unwrap());
        assert!(!within_piece_count_bound(17, 1, &eps, &eta).unwrap());
    }
}
