use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integral quadratic form stored by its doubled Gram matrix `G2 = 2 * Gram`.
///
/// `q(v) = vᵀ G2 v / 2`. With an even diagonal every value of `q` on `Z^n`
/// is an integer, which covers forms with half-integral cross coefficients.
/// `half` marks a matrix with some odd diagonal entry: such a lattice takes
/// values in `½Z` and is not integral at 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormMatrix {
    g2: Vec<Vec<BigInt>>,
    half: bool,
}

impl FormMatrix {
    pub fn from_gram2(g2: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = g2.len();
        if n == 0 || g2.iter().any(|row| row.len() != n) {
            return Err(Error::description(
                "gram2",
                "expected a nonempty square matrix",
            ));
        }
        for i in 0..n {
            for j in 0..i {
                if g2[i][j] != g2[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let half = g2.iter().enumerate().any(|(i, row)| row[i].is_odd());
        let form = FormMatrix { g2, half };
        if form.det_g2().is_zero() {
            return Err(Error::SingularForm);
        }
        Ok(form)
    }

    pub fn from_gram2_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_gram2(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// `⟨a_1, …, a_n⟩`.
    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Result<Self> {
        let n = entries.len();
        let mut g2 = vec![vec![BigInt::zero(); n]; n];
        for (i, a) in entries.iter().enumerate() {
            g2[i][i] = a.clone().into() * 2;
        }
        Self::from_gram2(g2)
    }

    /// The hyperbolic plane `H`, gram `(0 1 / 1 0)`.
    pub fn hyperbolic() -> Self {
        Self::from_gram2_i64(&[&[0, 2], &[2, 0]]).unwrap()
    }

    /// The plane `A`, gram `(2 1 / 1 2)`.
    pub fn a_plane() -> Self {
        Self::from_gram2_i64(&[&[4, 2], &[2, 4]]).unwrap()
    }

    /// `Ĥ`, the hyperbolic plane scaled by ½: `q(x, y) = xy`.
    pub fn hyperbolic_hat() -> Self {
        Self::from_gram2_i64(&[&[0, 1], &[1, 0]]).unwrap()
    }

    /// `Â`, the plane `A` scaled by ½: `q(x, y) = x² + xy + y²`.
    pub fn a_plane_hat() -> Self {
        Self::from_gram2_i64(&[&[2, 1], &[1, 2]]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.g2.len()
    }

    pub fn g2(&self) -> &[Vec<BigInt>] {
        &self.g2
    }

    pub fn is_half(&self) -> bool {
        self.half
    }

    /// Classically integral: every gram entry is an integer.
    pub fn is_classically_integral(&self) -> bool {
        self.g2.iter().flatten().all(|x| x.is_even())
    }

    pub fn gram(&self) -> Vec<Vec<BigRational>> {
        let two = BigInt::from(2);
        self.g2
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| BigRational::new(x.clone(), two.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn orthogonal_sum(&self, other: &FormMatrix) -> FormMatrix {
        let (n, m) = (self.rank(), other.rank());
        let mut g2 = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                g2[i][j] = self.g2[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                g2[n + i][n + j] = other.g2[i][j].clone();
            }
        }
        FormMatrix {
            g2,
            half: self.half || other.half,
        }
    }

    /// `L^(c)`: the gram matrix multiplied by `c`.
    pub fn scaled(&self, c: &BigRational) -> Result<FormMatrix> {
        if c.is_zero() {
            return Err(Error::SingularForm);
        }
        let mut g2 = Vec::with_capacity(self.rank());
        for row in &self.g2 {
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                let y = c * BigRational::from_integer(x.clone());
                if !y.is_integer() {
                    return Err(Error::NonIntegralScaling(c.to_string()));
                }
                out.push(y.to_integer());
            }
            g2.push(out);
        }
        FormMatrix::from_gram2(g2)
    }

    pub fn scaled_by_int(&self, c: i64) -> FormMatrix {
        self.scaled(&BigRational::from_integer(BigInt::from(c)))
            .expect("integer scaling")
    }

    /// `Uᵀ G2 U` for a square integer matrix `U` given by columns-as-basis.
    pub fn transform(&self, u: &[Vec<BigInt>]) -> Result<FormMatrix> {
        let n = self.rank();
        let mut tmp = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += &self.g2[i][k] * &u[k][j];
                }
                tmp[i][j] = s;
            }
        }
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += &u[k][i] * &tmp[k][j];
                }
                out[i][j] = s;
            }
        }
        FormMatrix::from_gram2(out)
    }

    /// Determinant of `G2` by fraction-free elimination.
    pub fn det_g2(&self) -> BigInt {
        bareiss_det(&self.g2)
    }

    /// Determinant of the gram matrix, `det(G2) / 2^n`.
    pub fn gram_det(&self) -> BigRational {
        BigRational::new(self.det_g2(), BigInt::from(2).pow(self.rank() as u32))
    }

    pub fn q(&self, v: &[BigInt]) -> BigRational {
        let mut s = BigInt::zero();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                s += &v[i] * &self.g2[i][j] * &v[j];
            }
        }
        BigRational::new(s, BigInt::from(2))
    }

    /// `G2` as `i128` entries, when they fit.
    pub fn g2_i128(&self) -> Option<Vec<Vec<i128>>> {
        self.g2
            .iter()
            .map(|row| row.iter().map(|x| x.to_i128()).collect())
            .collect()
    }

    /// Pivots of symmetric elimination over `Q` (a diagonalization `⟨a_1, …, a_n⟩`).
    pub fn rational_diagonal(&self) -> Vec<BigRational> {
        rational_diagonal(self.gram())
    }

    /// Positive definite iff the leading principal minors of `G2` are all positive.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.rank();
        (1..=n).all(|k| {
            let minor: Vec<Vec<BigInt>> = self.g2[..k].iter().map(|r| r[..k].to_vec()).collect();
            bareiss_det(&minor).is_positive()
        })
    }

    /// JSON form description `{"gram2": [[…]]}`.
    pub fn to_description(&self) -> serde_json::Value {
        serde_json::json!({
            "gram2": self.g2.iter()
                .map(|row| row.iter().map(big_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
    }

    /// Parses the JSON form description (`diag`, `gram2` or `blocks`).
    pub fn from_description(text: &str) -> Result<FormMatrix> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::description("<root>", e.to_string()))?;
        super::description::parse(&value)
    }
}

pub(crate) fn big_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

pub(crate) fn rational_diagonal(mut m: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let n = m.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    while !active.is_empty() {
        let pivot = match active.iter().position(|&i| !m[i][i].is_zero()) {
            Some(pos) => pos,
            None => {
                // All remaining diagonal entries vanish: replace v_i by v_i + v_j.
                let (i, j) = active
                    .iter()
                    .enumerate()
                    .find_map(|(a, &i)| {
                        active[a + 1..]
                            .iter()
                            .find(|&&j| !m[i][j].is_zero())
                            .map(|&j| (i, j))
                    })
                    .expect("nondegenerate");
                add_basis_vector(&mut m, &active, i, j);
                active.iter().position(|&k| k == i).unwrap()
            }
        };
        let i = active.remove(pivot);
        let piv = m[i][i].clone();
        for &j in &active {
            for &k in &active {
                let delta = &m[j][i] * &m[i][k] / &piv;
                m[j][k] -= delta;
            }
        }
        out.push(piv);
    }
    out
}

/// Basis change `v_i <- v_i + v_j` restricted to the active index set.
pub(crate) fn add_basis_vector(m: &mut [Vec<BigRational>], active: &[usize], i: usize, j: usize) {
    let mii = &m[i][i] + &m[i][j] * BigRational::from_integer(BigInt::from(2)) + &m[j][j];
    for &k in active {
        if k != i {
            let v = &m[i][k] + &m[j][k];
            m[i][k] = v.clone();
            m[k][i] = v;
        }
    }
    m[i][i] = mii;
}

pub(crate) fn bareiss_det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl fmt::Debug for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormMatrix{}", self)
    }
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.g2.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for FormMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_description().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FormMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        super::description::parse(&value).map_err(D::Error::custom)
    }
}
