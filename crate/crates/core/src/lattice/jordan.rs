//! Jordan splittings over `Z_p`.
//!
//! Components are indexed by the scale exponent: `L_(s)` is
//! `p^s Z_p`-modular. For `p = 2` an integral-norm lattice may have a
//! component at `s = -1` (an orthogonal sum of `Ĥ` and `Â`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::form::{add_basis_vector, FormMatrix};
use crate::error::{Error, Result};
use crate::padic::{check_prime, square_class, valuation, DetClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockTag {
    H,
    A,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComponentContent {
    /// `⟨p^s ε_1, …, p^s ε_r⟩` with canonical unit representatives `ε_i`.
    Proper { units: Vec<u64> },
    /// `2^s (H ⊥ … ⊥ H ⊥ P)` with `P` the tail block.
    Improper { hyperbolic: usize, tail: BlockTag },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JordanComponent {
    pub scale_exp: i64,
    pub rank: usize,
    pub proper: bool,
    pub norm_exp: i64,
    pub content: ComponentContent,
}

/// A basis-independent summary of one component.
pub type ComponentSignature = (i64, usize, bool, i64);

impl JordanComponent {
    pub fn signature(&self) -> ComponentSignature {
        (self.scale_exp, self.rank, self.proper, self.norm_exp)
    }

    /// The orthogonal summands visible in this component: one per diagonal
    /// entry for proper components, one per binary block otherwise.
    pub fn pieces(&self, p: u64) -> Vec<FormMatrix> {
        let scale = scale_factor(p, self.scale_exp);
        match &self.content {
            ComponentContent::Proper { units } => units
                .iter()
                .map(|&u| {
                    let g = &scale * BigRational::from_integer(BigInt::from(2 * u));
                    FormMatrix::from_gram2(vec![vec![g.to_integer()]]).expect("unit entry")
                })
                .collect(),
            ComponentContent::Improper { hyperbolic, tail } => {
                let mut out = vec![FormMatrix::hyperbolic(); *hyperbolic];
                out.push(match tail {
                    BlockTag::H => FormMatrix::hyperbolic(),
                    BlockTag::A => FormMatrix::a_plane(),
                });
                out.into_iter()
                    .map(|b| b.scaled(&scale).expect("scale exponent >= -1"))
                    .collect()
            }
        }
    }

    pub fn to_form(&self, p: u64) -> FormMatrix {
        let pieces = self.pieces(p);
        let mut it = pieces.into_iter();
        let first = it.next().expect("nonempty component");
        it.fold(first, |acc, b| acc.orthogonal_sum(&b))
    }

    pub fn det_class(&self, p: u64) -> DetClass {
        let det = self.to_form(p).gram_det();
        DetClass::of(&det, p).expect("nonzero")
    }
}

fn scale_factor(p: u64, s: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if s >= 0 {
        num_traits::pow(base, s as usize)
    } else {
        num_traits::pow(base.recip(), (-s) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanSplitting {
    pub prime: u64,
    pub components: Vec<JordanComponent>,
}

impl JordanSplitting {
    /// Largest scale exponent.
    pub fn top_exp(&self) -> i64 {
        self.components.last().map(|c| c.scale_exp).unwrap_or(0)
    }

    pub fn scale_exp(&self) -> i64 {
        self.components[0].scale_exp
    }

    pub fn norm_exp(&self) -> i64 {
        self.components.iter().map(|c| c.norm_exp).min().unwrap()
    }

    /// `ord_p` of the volume, i.e. of the gram determinant.
    pub fn volume_exp(&self) -> i64 {
        self.components
            .iter()
            .map(|c| c.scale_exp * c.rank as i64)
            .sum()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    /// `r_s`, zero when there is no component at that exponent.
    pub fn rank_at(&self, s: i64) -> usize {
        self.component_at(s).map(|c| c.rank).unwrap_or(0)
    }

    pub fn component_at(&self, s: i64) -> Option<&JordanComponent> {
        self.components.iter().find(|c| c.scale_exp == s)
    }

    pub fn is_modular(&self) -> bool {
        self.components.len() == 1
    }

    pub fn signature(&self) -> Vec<ComponentSignature> {
        self.components.iter().map(|c| c.signature()).collect()
    }

    pub fn to_form(&self) -> FormMatrix {
        let mut it = self.components.iter().map(|c| c.to_form(self.prime));
        let first = it.next().unwrap();
        it.fold(first, |acc, b| acc.orthogonal_sum(&b))
    }

    /// All visible orthogonal summands, in component order.
    pub fn pieces(&self) -> Vec<(i64, FormMatrix)> {
        self.components
            .iter()
            .flat_map(|c| {
                c.pieces(self.prime)
                    .into_iter()
                    .map(move |f| (c.scale_exp, f))
            })
            .collect()
    }
}

impl fmt::Display for JordanSplitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊥ ")?;
            }
            match &c.content {
                ComponentContent::Proper { units } => {
                    let u: Vec<String> = units.iter().map(|u| u.to_string()).collect();
                    write!(f, "{}^{}⟨{}⟩", self.prime, c.scale_exp, u.join(","))?;
                }
                ComponentContent::Improper { hyperbolic, tail } => {
                    write!(f, "{}^{}(", self.prime, c.scale_exp)?;
                    for _ in 0..*hyperbolic {
                        write!(f, "H ⊥ ")?;
                    }
                    write!(f, "{:?})", tail)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum RawBlock {
    Unary(BigRational),
    Binary([[BigRational; 2]; 2]),
}

fn ord(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(valuation(x, p).unwrap())
    }
}

pub fn jordan_decompose(l: &FormMatrix, p: u64) -> Result<JordanSplitting> {
    check_prime(p)?;
    if l.det_g2().is_zero() {
        return Err(Error::SingularForm);
    }
    let mut m = l.gram();
    let n = m.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut blocks: BTreeMap<i64, Vec<RawBlock>> = BTreeMap::new();

    while !active.is_empty() {
        let s = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .filter_map(|(i, j)| ord(&m[i][j], p))
            .min()
            .ok_or(Error::SingularForm)?;
        let diag = active.iter().position(|&i| ord(&m[i][i], p) == Some(s));
        let pos = match diag {
            Some(pos) => pos,
            None => {
                // Minimum attained only off the diagonal; first such pair in row order.
                let (i, j) = active
                    .iter()
                    .enumerate()
                    .find_map(|(a, &i)| {
                        active[a + 1..]
                            .iter()
                            .find(|&&j| ord(&m[i][j], p) == Some(s))
                            .map(|&j| (i, j))
                    })
                    .expect("minimum attained");
                if p != 2 {
                    // q(v_i + v_j) = q(v_i) + 2B(v_i, v_j) + q(v_j) has valuation s.
                    add_basis_vector(&mut m, &active, i, j);
                    active.iter().position(|&k| k == i).unwrap()
                } else {
                    let b = [
                        [m[i][i].clone(), m[i][j].clone()],
                        [m[j][i].clone(), m[j][j].clone()],
                    ];
                    active.retain(|&k| k != i && k != j);
                    eliminate_binary(&mut m, &active, i, j, &b);
                    blocks.entry(s).or_default().push(RawBlock::Binary(b));
                    continue;
                }
            }
        };
        let i = active.remove(pos);
        let piv = m[i][i].clone();
        for &j in &active {
            for &k in &active {
                let delta = &m[j][i] * &m[i][k] / &piv;
                m[j][k] -= delta;
            }
        }
        blocks.entry(s).or_default().push(RawBlock::Unary(piv));
    }

    let mut components = Vec::new();
    for (s, raw) in blocks {
        components.push(assemble_component(p, s, raw));
    }
    Ok(JordanSplitting {
        prime: p,
        components,
    })
}

fn eliminate_binary(
    m: &mut [Vec<BigRational>],
    rest: &[usize],
    i: usize,
    j: usize,
    b: &[[BigRational; 2]; 2],
) {
    let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
    let inv = [
        [&b[1][1] / &det, -(&b[0][1] / &det)],
        [-(&b[1][0] / &det), &b[0][0] / &det],
    ];
    let cols: Vec<[BigRational; 2]> = rest
        .iter()
        .map(|&k| [m[i][k].clone(), m[j][k].clone()])
        .collect();
    for (x, &k) in rest.iter().enumerate() {
        for (y, &l) in rest.iter().enumerate() {
            let c = &cols[x];
            let d = &cols[y];
            let mut delta = BigRational::zero();
            for a in 0..2 {
                for bb in 0..2 {
                    delta += &c[a] * &inv[a][bb] * &d[bb];
                }
            }
            m[k][l] -= delta;
        }
    }
}

/// Diagonalizes `⟨a⟩ ⊥ B` for an improper binary `B` of the same scale.
///
/// After `v_2 <- v_2 + v_1` the new `v_2` has norm of valuation `s`; pivoting
/// on it and then on `v_3` leaves three entries of valuation `s`.
fn absorb_improper(a: &BigRational, b: &[[BigRational; 2]; 2]) -> [BigRational; 3] {
    let m = a + &b[0][0];
    let x = a - a * a / &m;
    let y = -(a * &b[0][1] / &m);
    let z = &b[1][1] - &b[0][1] * &b[0][1] / &m;
    let last = &x - &y * &y / &z;
    [m, z, last]
}

fn assemble_component(p: u64, s: i64, raw: Vec<RawBlock>) -> JordanComponent {
    let mut unary: Vec<BigRational> = Vec::new();
    let mut binary: Vec<[[BigRational; 2]; 2]> = Vec::new();
    for b in raw {
        match b {
            RawBlock::Unary(a) => unary.push(a),
            RawBlock::Binary(b) => binary.push(b),
        }
    }
    // A component holding any diagonal entry is proper: fold binaries in.
    while !unary.is_empty() && !binary.is_empty() {
        let a = unary.pop().unwrap();
        let b = binary.pop().unwrap();
        unary.extend(absorb_improper(&a, &b));
    }
    let unit_scale = scale_factor(p, s).recip();
    if !unary.is_empty() {
        let units: Vec<u64> = unary
            .iter()
            .map(|a| {
                let u = a * &unit_scale;
                let c = square_class(&u, p).expect("unit");
                debug_assert_eq!(c.order, 0);
                c.unit_rep
            })
            .collect();
        JordanComponent {
            scale_exp: s,
            rank: units.len(),
            proper: true,
            norm_exp: s,
            content: ComponentContent::Proper { units },
        }
    } else {
        let a_count = binary
            .iter()
            .filter(|b| {
                let det = (&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]) * &unit_scale * &unit_scale;
                let c = square_class(&det, 2).expect("unit determinant");
                debug_assert!(c.order == 0 && (c.unit_rep == 3 || c.unit_rep == 7));
                c.unit_rep == 3
            })
            .count();
        // A ⊥ A ≅ H ⊥ H, so only the parity of the A count survives.
        let r = binary.len();
        JordanComponent {
            scale_exp: s,
            rank: 2 * r,
            proper: false,
            norm_exp: s + 1,
            content: ComponentContent::Improper {
                hyperbolic: r - 1,
                tail: if a_count % 2 == 1 {
                    BlockTag::A
                } else {
                    BlockTag::H
                },
            },
        }
    }
}

/// Exponent of `𝔫L`, computed from the doubled gram matrix directly.
pub fn norm_exp(l: &FormMatrix, p: u64) -> i64 {
    let t2 = if p == 2 { 1 } else { 0 };
    let g = l.g2();
    let mut best = i64::MAX;
    for i in 0..g.len() {
        for j in 0..g.len() {
            if let Some(v) = crate::padic::int_valuation(&g[i][j], p) {
                let e = if i == j { v as i64 - t2 } else { v as i64 };
                best = best.min(e);
            }
        }
    }
    best
}

/// Exponent of `𝔰L`.
pub fn scale_exp(l: &FormMatrix, p: u64) -> i64 {
    let t2 = if p == 2 { 1 } else { 0 };
    l.g2()
        .iter()
        .flatten()
        .filter_map(|x| crate::padic::int_valuation(x, p))
        .map(|v| v as i64 - t2)
        .min()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_over_three_groups_by_valuation() {
        let l = FormMatrix::diagonal(&[1, 3, 9, 2]).unwrap();
        let j = jordan_decompose(&l, 3).unwrap();
        assert_eq!(j.components.len(), 3);
        assert_eq!(
            j.components[0].content,
            ComponentContent::Proper { units: vec![1, 2] }
        );
        assert_eq!(j.components[1].scale_exp, 1);
        assert_eq!(
            j.components[1].content,
            ComponentContent::Proper { units: vec![1] }
        );
        assert_eq!(j.components[2].scale_exp, 2);
        assert_eq!(j.top_exp(), 2);
    }

    #[test]
    fn ahat_plus_a_over_two() {
        let l = FormMatrix::a_plane_hat().orthogonal_sum(&FormMatrix::a_plane());
        let j = jordan_decompose(&l, 2).unwrap();
        assert_eq!(j.components.len(), 2);
        for (c, s) in j.components.iter().zip([-1, 0]) {
            assert_eq!(c.scale_exp, s);
            assert!(!c.proper);
            assert_eq!(
                c.content,
                ComponentContent::Improper {
                    hyperbolic: 0,
                    tail: BlockTag::A
                }
            );
        }
        assert_eq!(j.norm_exp(), 0);
        assert_eq!(j.scale_exp(), -1);
    }

    #[test]
    fn hyperbolic_plane_over_two() {
        let j = jordan_decompose(&FormMatrix::hyperbolic(), 2).unwrap();
        assert_eq!(j.components.len(), 1);
        assert_eq!(j.components[0].scale_exp, 0);
        assert_eq!(
            j.components[0].content,
            ComponentContent::Improper {
                hyperbolic: 0,
                tail: BlockTag::H
            }
        );
        assert_eq!(j.components[0].norm_exp, 1);
    }

    #[test]
    fn a_plus_a_is_two_hyperbolic_planes() {
        let l = FormMatrix::a_plane().orthogonal_sum(&FormMatrix::a_plane());
        let j = jordan_decompose(&l, 2).unwrap();
        assert_eq!(
            j.components[0].content,
            ComponentContent::Improper {
                hyperbolic: 1,
                tail: BlockTag::H
            }
        );
    }

    #[test]
    fn mixed_dyadic_component_becomes_proper() {
        // ⟨1⟩ ⊥ A is unimodular and proper, hence diagonalizable.
        let l = FormMatrix::diagonal(&[1])
            .unwrap()
            .orthogonal_sum(&FormMatrix::a_plane());
        let j = jordan_decompose(&l, 2).unwrap();
        assert_eq!(j.components.len(), 1);
        let c = &j.components[0];
        assert!(c.proper);
        assert_eq!(c.rank, 3);
        assert!(c
            .det_class(2)
            .same_class(&DetClass::of(&l.gram_det(), 2).unwrap()));
    }

    #[test]
    fn odd_prime_hyperbolic_is_diagonalized() {
        let j = jordan_decompose(&FormMatrix::hyperbolic_hat(), 3).unwrap();
        assert_eq!(j.components.len(), 1);
        assert!(j.components[0].proper);
        assert_eq!(j.components[0].scale_exp, 0);
        assert_eq!(j.components[0].rank, 2);
    }

    #[test]
    fn norm_and_scale_of_forms() {
        assert_eq!(norm_exp(&FormMatrix::a_plane_hat(), 2), 0);
        assert_eq!(scale_exp(&FormMatrix::a_plane_hat(), 2), -1);
        assert_eq!(norm_exp(&FormMatrix::hyperbolic(), 2), 1);
        assert_eq!(scale_exp(&FormMatrix::hyperbolic(), 2), 0);
        assert_eq!(norm_exp(&FormMatrix::diagonal(&[3, 9]).unwrap(), 3), 1);
    }

    #[test]
    fn singular_rejected() {
        let l = FormMatrix::diagonal(&[1]).unwrap();
        assert!(jordan_decompose(&l, 4).is_err());
    }
}
