//! Valuations, square classes and Hilbert symbols over `Q_p`.
//!
//! Every function here is pure. Rationals are `BigRational`; primes are
//! plain `u64` and are checked by trial division on entry.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `ord_p` of a nonzero integer, or `None` for zero.
pub fn int_valuation(a: &BigInt, p: u64) -> Option<u32> {
    if a.is_zero() {
        return None;
    }
    if p == 2 {
        return a.trailing_zeros().map(|z| z as u32);
    }
    let pb = BigInt::from(p);
    let mut x = a.clone();
    let mut e = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return Some(e);
        }
        x = q;
        e += 1;
    }
}

/// Strips every factor of `p` from a nonzero integer.
pub(crate) fn strip_prime(a: &BigInt, p: u64) -> (u32, BigInt) {
    let e = int_valuation(a, p).expect("nonzero");
    let x = a / BigInt::from(p).pow(e);
    (e, x)
}

pub fn valuation(a: &BigRational, p: u64) -> Result<i64> {
    check_prime(p)?;
    if a.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let num = int_valuation(a.numer(), p).expect("nonzero") as i64;
    let den = int_valuation(a.denom(), p).expect("nonzero") as i64;
    Ok(num - den)
}

/// Decomposes `a = p^e * u` and returns `(e, u mod p^k)` for the unit `u`.
///
/// The residue is taken in `[0, p^k)`; for negative `a` the sign is folded
/// into the residue.
pub(crate) fn unit_residue(a: &BigRational, p: u64, k: u32) -> (i64, BigInt) {
    let (en, num) = strip_prime(a.numer(), p);
    let (ed, den) = strip_prime(a.denom(), p);
    let m = BigInt::from(p).pow(k);
    let inv = mod_inverse(&den.mod_floor(&m), &m).expect("unit denominator");
    ((en as i64) - (ed as i64), (num * inv).mod_floor(&m))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a | p)` for odd prime `p`; 0 when `p | a`.
pub fn legendre(a: u64, p: u64) -> i8 {
    debug_assert!(p > 2);
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// The fixed nonsquare unit `Δ`: the least positive quadratic non-residue mod `p`.
pub fn nonresidue(p: u64) -> u64 {
    assert!(p > 2, "Δ is only defined for odd primes");
    (2..p)
        .find(|&a| legendre(a, p) == -1)
        .expect("odd prime has a non-residue")
}

/// The canonical unit representatives for `p`.
pub fn unit_reps(p: u64) -> Vec<u64> {
    if p == 2 {
        vec![1, 3, 5, 7]
    } else {
        vec![1, nonresidue(p)]
    }
}

fn canonical_unit(p: u64, unit: &BigInt) -> u64 {
    if p == 2 {
        unit.mod_floor(&BigInt::from(8)).to_u64().unwrap()
    } else {
        let r = unit.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        if legendre(r, p) == 1 {
            1
        } else {
            nonresidue(p)
        }
    }
}

/// A coset of `(Z_p^×)^2` inside `Z_p \ {0}`, named by `p^order * unit_rep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareClass {
    pub prime: u64,
    pub order: u32,
    pub unit_rep: u64,
}

impl SquareClass {
    pub fn new(prime: u64, order: u32, unit_rep: u64) -> Result<Self> {
        check_prime(prime)?;
        if !unit_reps(prime).contains(&unit_rep) {
            return Err(Error::Target(format!(
                "{unit_rep} is not a canonical unit representative for p = {prime}"
            )));
        }
        Ok(SquareClass {
            prime,
            order,
            unit_rep,
        })
    }

    /// The integer `p^order * unit_rep`.
    pub fn representative(&self) -> BigInt {
        BigInt::from(self.prime).pow(self.order) * BigInt::from(self.unit_rep)
    }

    pub fn representative_rational(&self) -> BigRational {
        BigRational::from_integer(self.representative())
    }

    /// All classes with `order <= e_max`, ordered by `(order, unit_rep)`.
    pub fn up_to(prime: u64, e_max: u32) -> Vec<SquareClass> {
        let reps = unit_reps(prime);
        (0..=e_max)
            .flat_map(|order| {
                reps.iter().map(move |&unit_rep| SquareClass {
                    prime,
                    order,
                    unit_rep,
                })
            })
            .collect()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}*{}", self.prime, self.order, self.unit_rep)
    }
}

pub fn square_class(a: &BigRational, p: u64) -> Result<SquareClass> {
    let e = valuation(a, p)?;
    if e < 0 {
        return Err(Error::NegativeValuation {
            value: a.to_string(),
            prime: p,
        });
    }
    // The unit part mod 4p decides the class.
    let k = if p == 2 { 3 } else { 1 };
    let (_, u) = unit_residue(a, p, k);
    Ok(SquareClass {
        prime: p,
        order: e as u32,
        unit_rep: canonical_unit(p, &u),
    })
}

/// Whether `a` is a square of `Q_p` (any valuation).
pub fn is_qp_square(a: &BigRational, p: u64) -> Result<bool> {
    let e = valuation(a, p)?;
    let k = if p == 2 { 3 } else { 1 };
    let (_, u) = unit_residue(a, p, k);
    Ok(e % 2 == 0 && canonical_unit(p, &u) == 1)
}

/// Whether `a` lies in `(Q_p^×)^2 ∩ Z_p`.
pub fn is_square(a: &BigRational, p: u64) -> Result<bool> {
    Ok(valuation(a, p)? >= 0 && is_qp_square(a, p)?)
}

/// Hilbert symbol `(a, b)_p`.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, p: u64) -> Result<i8> {
    check_prime(p)?;
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if p == 2 {
        let (alpha, u) = unit_residue(a, 2, 3);
        let (beta, v) = unit_residue(b, 2, 3);
        let u = u.to_u64().unwrap();
        let v = v.to_u64().unwrap();
        let eps = |x: u64| ((x - 1) / 2) % 2;
        let omega = |x: u64| ((x * x - 1) / 8) % 2;
        let exp = eps(u) * eps(v)
            + (alpha.rem_euclid(2) as u64) * omega(v)
            + (beta.rem_euclid(2) as u64) * omega(u);
        Ok(if exp % 2 == 0 { 1 } else { -1 })
    } else {
        let (alpha, u) = unit_residue(a, p, 1);
        let (beta, v) = unit_residue(b, p, 1);
        let u = u.to_u64().unwrap();
        let v = v.to_u64().unwrap();
        let mut s: i8 = 1;
        if (alpha * beta).rem_euclid(2) == 1 && ((p - 1) / 2) % 2 == 1 {
            s = -s;
        }
        if beta.rem_euclid(2) == 1 {
            s *= legendre(u, p);
        }
        if alpha.rem_euclid(2) == 1 {
            s *= legendre(v, p);
        }
        Ok(s)
    }
}

/// Square class of a nonzero rational in `Q_p^× / (Z_p^×)^2`, keeping the sign.
///
/// Used for discriminants, whose valuation may be negative for lattices
/// with half-integral gram entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetClass {
    pub prime: u64,
    pub order: i64,
    pub unit_rep: u64,
    pub negative: bool,
}

impl DetClass {
    pub fn of(a: &BigRational, p: u64) -> Result<Self> {
        let order = valuation(a, p)?;
        let k = if p == 2 { 3 } else { 1 };
        let (_, u) = unit_residue(a, p, k);
        Ok(DetClass {
            prime: p,
            order,
            unit_rep: canonical_unit(p, &u),
            negative: a.is_negative(),
        })
    }

    /// Class of the product; the sign is multiplied as a rational sign.
    pub fn mul(&self, other: &DetClass) -> DetClass {
        assert_eq!(self.prime, other.prime);
        let p = self.prime;
        let u = BigInt::from(self.unit_rep) * BigInt::from(other.unit_rep);
        DetClass {
            prime: p,
            order: self.order + other.order,
            unit_rep: canonical_unit(p, &u),
            negative: self.negative != other.negative,
        }
    }

    /// Same coset of `(Z_p^×)^2`; the sign is ignored.
    pub fn same_class(&self, other: &DetClass) -> bool {
        self.prime == other.prime && self.order == other.order && self.unit_rep == other.unit_rep
    }
}

impl fmt::Display for DetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}^{}*{}",
            if self.negative { "-" } else { "" },
            self.prime,
            self.order,
            self.unit_rep
        )
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses a target written as an integer, a fraction `a/b`, or `p^e*u`
/// (with `*u` optional).
pub fn parse_target(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Target(t.to_string());
    let Some((base, rest)) = t.split_once('^') else {
        return crate::lattice::parse_rational_str(t).ok_or_else(bad);
    };
    let (exp, unit) = match rest.split_once('*') {
        Some((e, u)) => (e, u.trim()),
        None => (rest, "1"),
    };
    let base: BigInt = base.trim().parse().map_err(|_| bad())?;
    let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
    let unit = crate::lattice::parse_rational_str(unit).ok_or_else(bad)?;
    Ok(BigRational::from_integer(base.pow(exp)) * unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(12), 2).unwrap(), 2);
        assert_eq!(valuation(&q(1, 2), 2).unwrap(), -1);
        assert_eq!(valuation(&rat(45), 3).unwrap(), 2);
        assert_eq!(valuation(&rat(0), 3), Err(Error::ZeroValuation));
        assert_eq!(valuation(&rat(5), 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn square_class_examples() {
        let c = |a, p| square_class(&rat(a), p).unwrap();
        assert_eq!(
            c(7, 2),
            SquareClass {
                prime: 2,
                order: 0,
                unit_rep: 7
            }
        );
        assert_eq!(
            c(12, 2),
            SquareClass {
                prime: 2,
                order: 2,
                unit_rep: 3
            }
        );
        // 50 = 2 mod 3 and the squares mod 9 are {0,1,4,7}: 50 = 5 mod 9 is not one.
        let squares_mod_9: Vec<i64> = (0..9).map(|x| x * x % 9).collect();
        assert!(!squares_mod_9.contains(&(50 % 9)));
        assert_eq!(
            c(50, 3),
            SquareClass {
                prime: 3,
                order: 0,
                unit_rep: 2
            }
        );
        assert!(square_class(&q(1, 2), 2).is_err());
        assert!(square_class(&rat(0), 2).is_err());
        assert_eq!(c(-1, 2).unit_rep, 7);
        assert_eq!(square_class(&q(5, 3), 2).unwrap().unit_rep, 7);
    }

    #[test]
    fn is_square_examples() {
        assert!(is_square(&rat(17), 2).unwrap());
        assert!(!is_square(&rat(5), 2).unwrap());
        assert!(is_square(&rat(4), 3).unwrap());
        assert!(!is_square(&q(1, 4), 2).unwrap());
        assert!(is_qp_square(&q(1, 4), 2).unwrap());
        assert!(is_square(&rat(-1), 5).unwrap());
        assert!(!is_square(&rat(-1), 3).unwrap());
    }

    #[test]
    fn nonresidues() {
        assert_eq!(nonresidue(3), 2);
        assert_eq!(nonresidue(5), 2);
        assert_eq!(nonresidue(7), 3);
        assert_eq!(nonresidue(17), 3);
        assert_eq!(nonresidue(41), 3);
    }

    #[test]
    fn square_class_idempotent_on_representatives() {
        for p in [2u64, 3, 5, 7, 11] {
            for c in SquareClass::up_to(p, 5) {
                assert_eq!(square_class(&c.representative_rational(), p).unwrap(), c);
            }
        }
    }

    #[test]
    fn target_syntax() {
        assert_eq!(parse_target("12").unwrap(), rat(12));
        assert_eq!(parse_target(" 2^3*5 ").unwrap(), rat(40));
        assert_eq!(parse_target("3^2").unwrap(), rat(9));
        assert_eq!(parse_target("-1/2").unwrap(), q(-1, 2));
        assert!(matches!(parse_target("2^x"), Err(Error::Target(_))));
        assert!(parse_target("").is_err());
    }

    #[test]
    fn hilbert_examples() {
        for p in [2u64, 3, 5, 7] {
            for b in [-7i64, -1, 2, 3, 10, 12] {
                assert_eq!(hilbert_symbol(&rat(1), &rat(b), p).unwrap(), 1);
            }
        }
        assert_eq!(hilbert_symbol(&rat(2), &rat(5), 5).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(-1), &rat(-1), 2).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(3), &rat(3), 3).unwrap(), -1);
        assert!(hilbert_symbol(&rat(0), &rat(3), 3).is_err());
    }

    #[test]
    fn det_class_sign_and_product() {
        let h = DetClass::of(&rat(-1), 2).unwrap();
        assert_eq!((h.order, h.unit_rep, h.negative), (0, 7, true));
        let d = DetClass::of(&q(-1, 4), 2).unwrap();
        assert_eq!((d.order, d.unit_rep), (-2, 7));
        let a = DetClass::of(&rat(3), 2).unwrap();
        let prod = h.mul(&a);
        assert!(prod.same_class(&DetClass::of(&rat(-3), 2).unwrap()));
        assert!(prod.negative);
    }
}
