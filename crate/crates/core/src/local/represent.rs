use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::residue::{check_integral, gradient_bound, Hit, ResidueForm};
use crate::error::{Error, Result};
use crate::lattice::FormMatrix;
use crate::padic::{check_prime, valuation, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Represented,
    NotRepresented,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Represented => "REPRESENTED",
            Decision::NotRepresented => "NOT_REPRESENTED",
        })
    }
}

/// A residue vector whose value lifts to an exact representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vector: Vec<i128>,
    /// `q(vector) ≡ target (mod p^modulus_exp)`.
    pub modulus_exp: u32,
    /// `min_i ord_p((G2 vector)_i)`, at most `(modulus_exp - 1) / 2`.
    pub gradient_ord: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepVerdict {
    #[serde(with = "crate::serde_util::rational")]
    pub target: BigRational,
    pub prime: u64,
    pub primitive: bool,
    pub decided: Decision,
    pub witness: Option<Witness>,
    /// The level `K*` at which the residue search is complete.
    pub exhaustion_level: u32,
}

impl RepVerdict {
    pub fn is_represented(&self) -> bool {
        self.decided == Decision::Represented
    }
}

/// `ord_p(2a)`.
fn euler_order(a: &BigRational, p: u64) -> u32 {
    let t2 = u32::from(p == 2);
    valuation(a, p).expect("nonzero target") as u32 + t2
}

fn primitive_hit(l: &FormMatrix, p: u64, a: &BigRational) -> Result<Option<Hit>> {
    let kstar = 2 * euler_order(a, p) + 1;
    let prec = kstar.min(2 * gradient_bound(l, p) + 1);
    let r = ResidueForm::new(l, p, prec)?;
    Ok(r.find(r.target2(a), kstar))
}

/// Decides `a → L` (or `a →* L` when `primitive`) over `Z_p` exactly.
pub fn decide_representation(
    l: &FormMatrix,
    p: u64,
    a: &BigRational,
    primitive: bool,
) -> Result<RepVerdict> {
    check_prime(p)?;
    if a.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let e = valuation(a, p)?;
    if e < 0 {
        return Err(Error::NegativeValuation {
            value: a.to_string(),
            prime: p,
        });
    }
    check_integral(l, p)?;
    let exhaustion_level = 2 * euler_order(a, p) + 1;
    let mut witness = None;
    // a = p^(2j) a' with a' primitively represented, witness p^j v'.
    let max_j = if primitive { 0 } else { e / 2 };
    let pb = BigRational::from_integer(BigInt::from(p));
    for j in 0..=max_j as u32 {
        let reduced = a / num_traits::pow(pb.clone(), 2 * j as usize);
        if let Some(hit) = primitive_hit(l, p, &reduced)? {
            let pj = (p as i128).pow(j);
            witness = Some(Witness {
                vector: hit.vector.iter().map(|x| x * pj).collect(),
                modulus_exp: hit.exponent + 2 * j,
                gradient_ord: hit.gradient + j,
            });
            break;
        }
    }
    Ok(RepVerdict {
        target: a.clone(),
        prime: p,
        primitive,
        decided: if witness.is_some() {
            Decision::Represented
        } else {
            Decision::NotRepresented
        },
        witness,
        exhaustion_level,
    })
}

pub(crate) fn decide_class(l: &FormMatrix, c: &SquareClass, primitive: bool) -> Result<RepVerdict> {
    decide_representation(l, c.prime, &c.representative_rational(), primitive)
}

/// Square classes of order at most `e_max` that are (primitively) represented.
pub fn spectrum(
    l: &FormMatrix,
    p: u64,
    e_max: u32,
    primitive: bool,
) -> Result<BTreeSet<SquareClass>> {
    check_prime(p)?;
    let mut out = BTreeSet::new();
    for c in SquareClass::up_to(p, e_max) {
        if decide_class(l, &c, primitive)?.is_represented() {
            out.insert(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalCheck {
    pub prime: u64,
    pub universal: bool,
    /// One verdict per class of order 0 or 1.
    pub verdicts: Vec<(SquareClass, RepVerdict)>,
}

impl UniversalCheck {
    pub fn missing(&self) -> Vec<SquareClass> {
        self.verdicts
            .iter()
            .filter(|(_, v)| !v.is_represented())
            .map(|(c, _)| *c)
            .collect()
    }
}

/// `q(L) = Z_p`, decided on the classes of order 0 and 1.
pub fn is_universal_local(l: &FormMatrix, p: u64) -> Result<UniversalCheck> {
    check_prime(p)?;
    let mut verdicts = Vec::new();
    for c in SquareClass::up_to(p, 1) {
        verdicts.push((c, decide_class(l, &c, false)?));
    }
    Ok(UniversalCheck {
        prime: p,
        universal: verdicts.iter().all(|(_, v)| v.is_represented()),
        verdicts,
    })
}

/// Whether every unit class is represented.
pub(crate) fn represents_all_units(l: &FormMatrix, p: u64) -> Result<bool> {
    for c in SquareClass::up_to(p, 0) {
        if !decide_class(l, &c, false)?.is_represented() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the Hensel certificate of a witness with exact integer arithmetic.
pub fn verify_witness(l: &FormMatrix, verdict: &RepVerdict) -> bool {
    let Some(w) = &verdict.witness else {
        return false;
    };
    let p = verdict.prime;
    let v: Vec<BigInt> = w.vector.iter().map(|&x| BigInt::from(x)).collect();
    let diff = l.q(&v) - &verdict.target;
    let congruent = diff.is_zero()
        || valuation(&diff, p)
            .map(|o| o >= w.modulus_exp as i64)
            .unwrap_or(false);
    let grad = l
        .g2()
        .iter()
        .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum::<BigInt>())
        .filter_map(|x| crate::padic::int_valuation(&x, p))
        .min();
    let primitive_ok =
        !verdict.primitive || v.iter().any(|x| (x % BigInt::from(p)).to_i64() != Some(0));
    congruent && grad == Some(w.gradient_ord) && w.modulus_exp > 2 * w.gradient_ord && primitive_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rat;

    fn diag(a: &[i64]) -> FormMatrix {
        FormMatrix::diagonal(a).unwrap()
    }

    fn decide(l: &FormMatrix, p: u64, a: i64, primitive: bool) -> RepVerdict {
        let v = decide_representation(l, p, &rat(a), primitive).unwrap();
        if v.is_represented() {
            assert!(verify_witness(l, &v), "{v:?}");
        }
        v
    }

    #[test]
    fn worked_examples() {
        assert!(decide(&FormMatrix::hyperbolic_hat(), 2, 6, true).is_represented());
        assert!(!decide(&FormMatrix::a_plane_hat(), 2, 2, true).is_represented());
        assert!(!decide(&diag(&[1, 1, 3, 3]), 3, 9, true).is_represented());
        assert!(!decide(&diag(&[1, 1, 1, 9]), 2, 8, true).is_represented());
        let v = decide(&diag(&[1]), 5, 4, false);
        assert!(v.is_represented());
        assert_eq!(v.witness.unwrap().vector, vec![2]);
    }

    #[test]
    fn exhaustion_level_is_euler_bound() {
        let v = decide(&diag(&[1, 1, 1, 9]), 2, 8, true);
        assert_eq!(v.exhaustion_level, 9);
        assert_eq!(decide(&diag(&[1, 1]), 3, 2, false).exhaustion_level, 1);
    }

    #[test]
    fn errors() {
        let l = diag(&[1, 1]);
        assert_eq!(
            decide_representation(&l, 3, &rat(0), true),
            Err(Error::ZeroTarget)
        );
        let half = FormMatrix::from_gram2_i64(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(
            decide_representation(&half, 2, &rat(1), true),
            Err(Error::NonIntegral(2))
        );
        assert!(decide_representation(&half, 3, &rat(1), true).is_ok());
        let q = BigRational::new(1.into(), 3.into());
        assert!(matches!(
            decide_representation(&l, 3, &q, false),
            Err(Error::NegativeValuation { .. })
        ));
        assert!(decide_representation(&l, 5, &q, false)
            .unwrap()
            .is_represented());
    }

    #[test]
    fn spectra() {
        let all = spectrum(&FormMatrix::a_plane_hat(), 2, 3, true).unwrap();
        assert_eq!(all, SquareClass::up_to(2, 0).into_iter().collect());
        let l = diag(&[1, 1, 3, 3]);
        let s = spectrum(&l, 3, 3, true).unwrap();
        assert_eq!(s, SquareClass::up_to(3, 1).into_iter().collect());
    }

    #[test]
    fn universality_examples() {
        assert!(
            is_universal_local(&diag(&[1, 1, 3, 3]), 3)
                .unwrap()
                .universal
        );
        assert!(
            is_universal_local(&diag(&[1, 1, 1, 1]), 2)
                .unwrap()
                .universal
        );
        assert!(!is_universal_local(&diag(&[1, 1]), 2).unwrap().universal);
        let c = is_universal_local(&diag(&[1, 1, 1]), 2).unwrap();
        assert!(!c.universal);
        assert_eq!(c.missing(), vec![SquareClass::new(2, 0, 7).unwrap()]);
    }
}
