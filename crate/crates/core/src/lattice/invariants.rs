use num_rational::BigRational;
use num_traits::Zero;

use super::form::FormMatrix;
use crate::error::{Error, Result};
use crate::padic::{check_prime, hilbert_symbol, is_qp_square, rat, DetClass};

/// Discriminant `dL` as a signed square class of `Q_p`.
pub fn det_square_class(l: &FormMatrix, p: u64) -> Result<DetClass> {
    check_prime(p)?;
    let d = l.gram_det();
    if d.is_zero() {
        return Err(Error::SingularForm);
    }
    DetClass::of(&d, p)
}

/// `S_p = Π_{i<j} (a_i, a_j)_p` over a rational diagonalization `⟨a_1, …, a_n⟩`.
pub fn hasse_invariant(l: &FormMatrix, p: u64) -> Result<i8> {
    check_prime(p)?;
    let diag = l.rational_diagonal();
    let mut s = 1i8;
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            s *= hilbert_symbol(&diag[i], &diag[j], p)?;
        }
    }
    Ok(s)
}

pub fn is_isotropic(l: &FormMatrix, p: u64) -> Result<bool> {
    check_prime(p)?;
    let d = l.gram_det();
    let minus_d: BigRational = -d.clone();
    Ok(match l.rank() {
        1 => false,
        2 => is_qp_square(&minus_d, p)?,
        3 => hasse_invariant(l, p)? == hilbert_symbol(&rat(-1), &minus_d, p)?,
        4 => {
            !(is_qp_square(&d, p)?
                && hasse_invariant(l, p)? != hilbert_symbol(&rat(-1), &rat(-1), p)?)
        }
        _ => true,
    })
}
