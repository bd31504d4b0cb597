use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::FormMatrix;
use crate::local::{
    decide_representation, is_primitively_universal_local, UniversalityReport, Verdict,
};
use crate::padic::{check_prime, unit_residue, SquareClass};

const DET_LIMIT: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TriState {
    Yes,
    No,
    Undetermined,
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::Yes => "YES",
            TriState::No => "NO",
            TriState::Undetermined => "UNDETERMINED",
        })
    }
}

/// No integer congruent to `residue` modulo `p^modulus_exp` is (primitively)
/// represented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionWitness {
    pub prime: u64,
    pub residue: u64,
    pub modulus_exp: u32,
    pub modulus: u64,
    pub primitive: bool,
}

impl fmt::Display for ProgressionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}k{}",
            self.residue,
            self.modulus,
            if self.primitive { " (primitive)" } else { "" }
        )
    }
}

/// `(a mod p^K, p^K)` for the exhaustion level `K` of a failed representation.
pub fn progression_witness(
    l: &FormMatrix,
    p: u64,
    a: &BigRational,
    primitive: bool,
) -> Result<ProgressionWitness> {
    check_prime(p)?;
    let v = decide_representation(l, p, a, primitive)?;
    if v.is_represented() {
        return Err(Error::Represented {
            target: a.to_string(),
            prime: p,
        });
    }
    let k = v.exhaustion_level;
    let modulus = BigInt::from(p).pow(k);
    let (e, u) = unit_residue(a, p, k);
    let residue = (BigInt::from(p).pow(e as u32) * u).mod_floor(&modulus);
    let too_big = || Error::PrecisionExceeded {
        prime: p,
        exponent: k,
    };
    Ok(ProgressionWitness {
        prime: p,
        residue: residue.to_u64().ok_or_else(too_big)?,
        modulus_exp: k,
        modulus: modulus.to_u64().ok_or_else(too_big)?,
        primitive,
    })
}

/// Primes dividing `2 det G2`, found by trial division.
pub fn relevant_primes(l: &FormMatrix) -> Result<Vec<u64>> {
    let det = l.det_g2().abs();
    let limit = BigInt::from(DET_LIMIT) * BigInt::from(2).pow(l.rank() as u32);
    if det > limit {
        return Err(Error::DeterminantTooLarge(l.gram_det().to_string()));
    }
    let mut m = det.to_u128().expect("bounded") * 2;
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= m {
        if m % d == 0 {
            out.push(d as u64);
            while m % d == 0 {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m as u64);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalVerdict {
    pub relevant_primes: Vec<u64>,
    pub per_prime: Vec<UniversalityReport>,
    pub almost_universal: TriState,
    pub almost_primitively_universal: TriState,
    pub progression_witnesses: Vec<ProgressionWitness>,
    pub notes: Vec<String>,
}

impl GlobalVerdict {
    pub fn report_at(&self, p: u64) -> Option<&UniversalityReport> {
        self.per_prime.iter().find(|r| r.prime == p)
    }
}

pub(crate) fn check_positive_definite(l: &FormMatrix) -> Result<()> {
    if l.is_positive_definite() {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite)
    }
}

pub fn almost_universality_verdict(l: &FormMatrix) -> Result<GlobalVerdict> {
    check_positive_definite(l)?;
    let n = l.rank();
    if n <= 3 {
        return Err(Error::OutOfScope(format!(
            "rank {n}: almost universality needs rank at least 4"
        )));
    }
    let primes = relevant_primes(l)?;
    let mut notes = vec![format!(
        "primes not dividing 2 det are unimodular of rank {n} >= 3 there, hence primitively universal"
    )];
    let mut per_prime = Vec::new();
    let mut witnesses = Vec::new();
    for &p in &primes {
        let r = is_primitively_universal_local(l, p)?;
        if let Verdict::No { class: Some(c) } = r.primitively_universal {
            witnesses.push(progression_witness(
                l,
                p,
                &c.representative_rational(),
                true,
            )?);
        }
        if let Some(check) = &r.universal_check {
            if let Some(c) = check.missing().first() {
                witnesses.push(progression_witness(
                    l,
                    p,
                    &c.representative_rational(),
                    false,
                )?);
            }
        }
        per_prime.push(r);
    }
    let apu = if per_prime.iter().all(|r| r.primitively_universal.is_yes()) {
        TriState::Yes
    } else if per_prime.iter().any(|r| r.primitively_universal.is_no()) {
        TriState::No
    } else {
        TriState::Undetermined
    };
    let all_universal = per_prime.iter().all(|r| r.universal);
    let au = if !all_universal {
        TriState::No
    } else if n >= 5 || apu == TriState::Yes {
        TriState::Yes
    } else {
        notes.push(
            "rank 4 and universal everywhere: almost universality is not decided locally"
                .to_string(),
        );
        TriState::Undetermined
    };
    notes.push("YES means all sufficiently large integers; the threshold is not effective".into());
    Ok(GlobalVerdict {
        relevant_primes: primes,
        per_prime,
        almost_universal: au,
        almost_primitively_universal: apu,
        progression_witnesses: witnesses,
        notes,
    })
}

/// Failure classes of the local reports, for display.
pub fn failure_classes(v: &GlobalVerdict) -> Vec<SquareClass> {
    v.per_prime
        .iter()
        .filter_map(|r| match r.primitively_universal {
            Verdict::No { class } => class,
            _ => None,
        })
        .collect()
}

pub(crate) fn gram_det_integer(l: &FormMatrix) -> Option<BigInt> {
    let d = l.gram_det();
    (d.is_integer() && !d.is_zero()).then(|| d.to_integer())
}
