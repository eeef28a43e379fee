//! Exact rational helpers plus certified rational enclosures of `ln`, `exp` and roots.
//!
//! Real-valued quantities (λ_c, e^χ, …) never enter a computation as floats: they are
//! bracketed by rationals `lo ≤ x ≤ hi` whose width is below `2^-bits`, and every
//! decision that depends on them is taken against the conservative end of the bracket.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 128;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Parses `p/q`, an integer, or a finite decimal such as `2.5`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mag = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        let mag = if negative { -mag } else { mag };
        return Ok(BigRational::new(mag, den));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

pub fn pow(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
pub fn to_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    // ⌊(2|n|·10^d + den) / (2·den)⌋, integer arithmetic only
    let den = x.denom() * 2u32;
    let rounded = (x.numer().abs() * &scale * 2u32 + x.denom()) / &den;
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

/// `log10 |x|` to double precision, from the leading bits of numerator and denominator.
pub fn log10_abs(x: &BigRational) -> f64 {
    fn top(n: &BigInt) -> (f64, i64) {
        let bits = n.bits() as i64;
        let shift = (bits - 64).max(0);
        let head = (n.abs() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        (head, shift)
    }
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (hn, sn) = top(x.numer());
    let (hd, sd) = top(x.denom());
    (hn / hd).log10() + (sn - sd) as f64 * std::f64::consts::LOG10_2
}

/// Fixed-point decimal for moderate magnitudes, otherwise `d.ddd…e±k` with `digits`
/// significant digits (the latter from double precision, so at most 15 are meaningful).
pub fn display_decimal(x: &BigRational, digits: usize) -> String {
    let l = log10_abs(x);
    if x.is_zero() || (-6.0..30.0).contains(&l) {
        return to_decimal(x, digits);
    }
    let mut exp = l.floor();
    let mut mant = 10f64.powf(l - exp);
    let prec = digits.clamp(1, 15) - 1;
    if format!("{mant:.prec$}").starts_with("10") {
        mant /= 10.0;
        exp += 1.0;
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{mant:.prec$}e{exp}")
}

/// Largest `k / 2^bits` not above `x`.
pub fn floor_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

/// Smallest `k / 2^bits` not below `x`.
pub fn ceil_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

/// A certified enclosure `lo ≤ value ≤ hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Bounds {
    pub fn exact(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.mid())
    }

    fn scale(&self, k: &BigRational) -> Self {
        if k.is_negative() {
            Self {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        } else {
            Self {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        }
    }

    fn add(&self, other: &Bounds) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    fn round_out(self, bits: u32) -> Self {
        Self {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }
}

/// `2·atanh(y)` for `0 ≤ y ≤ 1/3`, enclosed to within `2^-bits`.
fn two_atanh(y: &BigRational, bits: u32) -> Bounds {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let y2 = y * y;
    let mut term = y.clone(); // y^{2j+1}
    let mut sum = BigRational::zero();
    let mut j: u64 = 0;
    loop {
        sum += &term / BigRational::from_integer((2 * j + 1).into());
        term = &term * &y2;
        j += 1;
        // remaining tail ≤ y^{2j+1} / ((2j+1)(1-y²))
        let tail = &term / (BigRational::from_integer((2 * j + 1).into()) * (int(1) - &y2));
        if tail <= eps || term.is_zero() {
            let two = int(2);
            return Bounds {
                lo: &sum * &two,
                hi: (sum + tail) * two,
            };
        }
    }
}

/// Natural logarithm of a positive rational.
pub fn ln_bounds(x: &BigRational, bits: u32) -> Result<Bounds> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter(format!("ln of non-positive {x}")));
    }
    if x.is_one() {
        return Ok(Bounds::exact(BigRational::zero()));
    }
    // x = 2^k · r with 1 ≤ r < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = int(2);
    let shift = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(BigInt::one() << k as u64)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64)
        }
    };
    let mut r = x / shift(k);
    while r >= two {
        k += 1;
        r = x / shift(k);
    }
    while r < int(1) {
        k -= 1;
        r = x / shift(k);
    }
    let guard = bits + 8 + (64 - (k.unsigned_abs()).leading_zeros());
    let y = (&r - int(1)) / (&r + int(1));
    let ln_r = two_atanh(&y, guard);
    let ln2 = two_atanh(&rat(1, 3), guard);
    Ok(ln2.scale(&int(k)).add(&ln_r).round_out(bits + 4))
}

/// `e^x` for a rational `x`.
pub fn exp_bounds(x: &BigRational, bits: u32) -> Bounds {
    if x.is_negative() {
        let b = exp_bounds(&-x, bits + 2);
        return Bounds {
            lo: int(1) / &b.hi,
            hi: int(1) / &b.lo,
        }
        .round_out(bits + 4);
    }
    // halve until r ≤ 1/2, then square back
    let mut k = 0u32;
    let mut r = x.clone();
    while r > rat(1, 2) {
        r /= int(2);
        k += 1;
    }
    let work = bits + 2 * k + 16;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << work);
    let mut sum = BigRational::zero();
    let mut term = int(1);
    let mut i: u64 = 0;
    loop {
        sum += &term;
        i += 1;
        term = term * &r / BigRational::from_integer(i.into());
        // tail ≤ 2·next term since r/(i+1) ≤ 1/2
        if &term * int(2) <= eps {
            break;
        }
    }
    let mut b = Bounds {
        hi: &sum + &term * int(2),
        lo: sum,
    }
    .round_out(work);
    for _ in 0..k {
        b = Bounds {
            lo: &b.lo * &b.lo,
            hi: &b.hi * &b.hi,
        }
        .round_out(work);
    }
    b.round_out(bits + 4)
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().to_biguint()?;
    let d = x.denom().to_biguint()?;
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == n && &sd * &sd == d).then(|| {
        BigRational::new(
            BigInt::from_biguint(Sign::Plus, sn),
            BigInt::from_biguint(Sign::Plus, sd),
        )
    })
}

/// `√x`, exact when possible, otherwise the largest `k/2^bits` below the root.
pub fn sqrt_rational(x: &BigRational, bits: u32) -> (BigRational, bool) {
    if let Some(r) = exact_sqrt(x) {
        return (r, true);
    }
    let scaled = floor_dyadic(&(x * BigRational::from_integer(BigInt::one() << (2 * bits))), 0);
    let root = scaled.to_integer().to_biguint().unwrap_or_default().sqrt();
    (
        BigRational::new(
            BigInt::from_biguint(Sign::Plus, root),
            BigInt::one() << bits,
        ),
        false,
    )
}

/// Integer fourth root of `n` when `n` is a perfect fourth power.
pub fn exact_fourth_root(n: u64) -> Option<u64> {
    let r = BigUint::from(n).nth_root(4).to_u64()?;
    (r.checked_pow(4) == Some(n)).then_some(r)
}

/// `N^{-3/4}`: exact when `N` is a fourth power, otherwise a rational within `2^-bits`
/// relative error (rounded so the approximation is at least the true value).
pub fn inverse_three_quarter_power(n: u64, bits: u32) -> (BigRational, bool) {
    if let Some(r) = exact_fourth_root(n) {
        let r3 = BigInt::from(r).pow(3);
        return (BigRational::new(BigInt::one(), r3), true);
    }
    // N^{3/4} = (N^3)^{1/4} ≥ floor((N^3·2^{4b})^{1/4}) / 2^b
    let big = BigUint::from(n).pow(3) << (4 * bits as usize);
    let root = big.nth_root(4);
    (
        BigRational::new(
            BigInt::one() << bits,
            BigInt::from_biguint(Sign::Plus, root),
        ),
        false,
    )
}

/// `(n choose k)` as an exact integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
