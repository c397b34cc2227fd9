//! Exact comparisons for region boundaries.
//!
//! Every finite `f64` is a dyadic rational, and grid nodes written in decimal
//! are rationals too, so boundary ties like `δ = (2λ+1)p - 1` are decided
//! exactly. Arithmetic falls back to `f64` only if an `i128` overflows.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rat {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rat {
    pub fn new(num: i128, den: i128) -> Option<Rat> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Some(Rat { num: s * num / g, den: s * den / g })
    }

    pub fn int(n: i64) -> Rat {
        Rat { num: n as i128, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    /// The exact value of a finite float, if it fits.
    pub fn from_f64(x: f64) -> Option<Rat> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Rat::int(0));
        }
        let bits = x.to_bits();
        let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i128 << 52), exp - 1075) };
        let tz = mant.trailing_zeros() as i32;
        let (mant, e) = (mant >> tz, e + tz);
        if e >= 0 {
            if e > 70 {
                return None;
            }
            Some(Rat { num: sign * (mant << e), den: 1 })
        } else {
            if -e > 125 {
                return None;
            }
            Some(Rat { num: sign * mant, den: 1i128 << (-e) })
        }
    }

    /// Parses `[-+]digits[.digits][e[-+]digits]` exactly.
    pub fn parse_decimal(s: &str) -> Option<Rat> {
        let s = s.trim();
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (neg, body) = match mantissa.as_bytes().first()? {
            b'-' => (true, &mantissa[1..]),
            b'+' => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut num: i128 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            num = num.checked_mul(10)?.checked_add((b - b'0') as i128)?;
        }
        let scale = exp - frac_part.len() as i32;
        let pow = 10i128.checked_pow(scale.unsigned_abs())?;
        let num = if neg { -num } else { num };
        if scale >= 0 {
            Rat::new(num.checked_mul(pow)?, 1)
        } else {
            Rat::new(num, pow)
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn checked_add(self, o: Rat) -> Option<Rat> {
        let g = gcd(self.den, o.den);
        let l = (self.den / g).checked_mul(o.den)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = o.num.checked_mul(l / o.den)?;
        Rat::new(a.checked_add(b)?, l)
    }

    fn checked_mul(self, o: Rat) -> Option<Rat> {
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        let n = (self.num / g1).checked_mul(o.num / g2)?;
        let d = (self.den / g2).checked_mul(o.den / g1)?;
        Rat::new(n, d)
    }

    fn checked_cmp(self, o: Rat) -> Option<Ordering> {
        Some(self.num.checked_mul(o.den)?.cmp(&o.num.checked_mul(self.den)?))
    }
}

/// A real number, exact while it fits.
#[derive(Debug, Clone, Copy)]
pub enum Real {
    Exact(Rat),
    Float(f64),
}

impl Real {
    pub fn from_f64(x: f64) -> Real {
        Rat::from_f64(x).map(Real::Exact).unwrap_or(Real::Float(x))
    }

    /// Exact decimal when it parses as one, else the nearest float.
    pub fn parse(s: &str) -> Option<Real> {
        match Rat::parse_decimal(s) {
            Some(r) => Some(Real::Exact(r)),
            None => s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).map(Real::Float),
        }
    }

    pub fn int(n: i64) -> Real {
        Real::Exact(Rat::int(n))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64(),
            Real::Float(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    fn lift(a: Real, b: Real, op: fn(Rat, Rat) -> Option<Rat>, fop: fn(f64, f64) -> f64) -> Real {
        if let (Real::Exact(x), Real::Exact(y)) = (a, b) {
            if let Some(r) = op(x, y) {
                return Real::Exact(r);
            }
        }
        Real::Float(fop(a.to_f64(), b.to_f64()))
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, o: Real) -> Real {
        Real::lift(self, o, Rat::checked_add, |a, b| a + b)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(Rat { num: -r.num, den: r.den }),
            Real::Float(v) => Real::Float(-v),
        }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, o: Real) -> Real {
        self + (-o)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, o: Real) -> Real {
        Real::lift(self, o, Rat::checked_mul, |a, b| a * b)
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Real) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Real) -> Option<Ordering> {
        if let (Real::Exact(a), Real::Exact(b)) = (self, o) {
            if let Some(c) = a.checked_cmp(*b) {
                return Some(c);
            }
        }
        self.to_f64().partial_cmp(&o.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_exact() {
        for &x in &[0.1, -3.75, 1e-20, 12345.678, 2.0f64.powi(60)] {
            let r = Rat::from_f64(x).unwrap();
            assert_eq!(r.to_f64(), x);
        }
        assert!(Rat::from_f64(1e300).is_none());
        assert!(Rat::from_f64(1e-30).is_none());
    }

    #[test]
    fn decimals_are_exact() {
        let a = Real::parse("0.1").unwrap();
        let b = Real::parse("0.2").unwrap();
        let c = Real::parse("0.3").unwrap();
        assert!(a + b == c);
        assert!(Real::from_f64(0.1) + Real::from_f64(0.2) != Real::from_f64(0.3) || 0.1 + 0.2 == 0.3);
        assert_eq!(Rat::parse_decimal("-2.5e2"), Rat::new(-250, 1));
        assert_eq!(Rat::parse_decimal("1.25e-1"), Rat::new(1, 8));
        assert!(Rat::parse_decimal("abc").is_none());
        assert!(Rat::parse_decimal(".").is_none());
    }

    #[test]
    fn boundary_tie() {
        // (2λ+1)p - 1 with λ = 0.3, p = 1.7 is exactly 1.72
        let l = Real::parse("0.3").unwrap();
        let p = Real::parse("1.7").unwrap();
        let edge = (Real::int(2) * l + Real::int(1)) * p - Real::int(1);
        assert!(edge == Real::parse("1.72").unwrap());
    }

    #[test]
    fn overflow_falls_back() {
        let big = Real::from_f64(2.0f64.powi(70));
        let prod = big * big;
        assert!(!prod.is_exact());
        assert_eq!(prod.to_f64(), 2.0f64.powi(140));
    }
}
