use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::residue::{gradient_bound, ResidueForm, ZeroSearch};
use crate::error::{Error, Result};
use crate::lattice::{jordan_decompose, scale_exp, FormMatrix};
use crate::padic::check_prime;

/// Outcome of the exact residue search for primitive zeros of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResidueIsotropy {
    /// A primitive residue vector that lifts to an exact zero.
    Isotropic {
        vector: Vec<i128>,
        modulus_exp: u32,
        gradient_ord: u32,
    },
    /// No primitive `v` has `q(v) ≡ 0 (mod p^empirical_min)`.
    Anisotropic { empirical_min: u32 },
}

impl ResidueIsotropy {
    pub fn is_isotropic(&self) -> bool {
        matches!(self, ResidueIsotropy::Isotropic { .. })
    }
}

/// Decides isotropy by the residue search alone.
pub fn residue_isotropy(l: &FormMatrix, p: u64) -> Result<ResidueIsotropy> {
    check_prime(p)?;
    let prec = 2 * gradient_bound(l, p) + 2;
    let r = ResidueForm::new(l, p, prec)?;
    Ok(match r.zero_search() {
        ZeroSearch::Isotropic(hit) => ResidueIsotropy::Isotropic {
            vector: hit.vector,
            modulus_exp: hit.exponent,
            gradient_ord: hit.gradient,
        },
        ZeroSearch::MaxOrder(m) => ResidueIsotropy::Anisotropic {
            empirical_min: m + 1,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnisotropicGap {
    /// `t + 3` for the top Jordan exponent `t` of the rescaled lattice.
    pub bound: u32,
    /// Least `l` with no primitive `v` satisfying `q(v) ≡ 0 (mod p^l)`.
    pub empirical_min: u32,
    /// The lattice was rescaled by `p^-scale_shift` so that its scale is `Z_p`.
    pub scale_shift: i64,
}

/// Both sides are reported for the lattice rescaled to scale `Z_p`.
pub fn anisotropic_gap(l: &FormMatrix, p: u64) -> Result<AnisotropicGap> {
    check_prime(p)?;
    let s = scale_exp(l, p);
    let pb = BigRational::from_integer(BigInt::from(p));
    let factor = if s >= 0 {
        num_traits::pow(pb.recip(), s as usize)
    } else {
        num_traits::pow(pb, (-s) as usize)
    };
    let scaled = l.scaled(&factor)?;
    let t = jordan_decompose(&scaled, p)?.top_exp();
    match residue_isotropy(&scaled, p)? {
        ResidueIsotropy::Isotropic { .. } => Err(Error::GapUndefined(p)),
        ResidueIsotropy::Anisotropic { empirical_min } => Ok(AnisotropicGap {
            bound: (t + 3) as u32,
            empirical_min,
            scale_shift: s,
        }),
    }
}
