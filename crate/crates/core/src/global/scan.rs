//! Bounded enumeration of the values of a positive definite form.
//!
//! The form is written as `q(x) = Σ c_i (x_i + Σ_{j>i} μ_ij x_j)²`, with the
//! coefficients computed exactly and then rounded. Coordinates are fixed from
//! the last one down over floating-point intervals widened by a safety margin;
//! the innermost coordinate is swept with exact integer arithmetic, which alone
//! decides which values are recorded.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::FormMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub bound: u64,
    /// Represented integers in `[1, bound]`, ascending.
    pub represented: Vec<u64>,
    pub primitively_represented: Vec<u64>,
    pub excluded: Vec<u64>,
    pub primitive_excluded: Vec<u64>,
    /// The first vector found for each represented value, primitive if one exists.
    pub witnesses: BTreeMap<u64, Vec<i64>>,
}

impl ScanReport {
    pub fn is_represented(&self, a: u64) -> bool {
        self.represented.binary_search(&a).is_ok()
    }

    pub fn is_primitively_represented(&self, a: u64) -> bool {
        self.primitively_represented.binary_search(&a).is_ok()
    }
}

struct Cholesky {
    n: usize,
    /// Diagonal coefficients `c_i`.
    c: Vec<f64>,
    /// `mu[i][j]` for `j > i`.
    mu: Vec<Vec<f64>>,
    g2: Vec<Vec<i128>>,
}

/// Relative slack on interval endpoints; far above f64 rounding at these sizes.
const SLACK: f64 = 1e-9;

impl Cholesky {
    fn new(l: &FormMatrix) -> Result<Self> {
        let n = l.rank();
        let mut q = l.gram();
        for i in 0..n {
            if !q[i][i].is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for m in k..n {
                    let delta = &q[k][i] * &q[i][m];
                    q[k][m] -= delta;
                }
            }
        }
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        let c = (0..n).map(|i| f(&q[i][i])).collect();
        let mu = q
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (0..n)
                    .map(|j| if j > i { f(&row[j]) } else { 0.0 })
                    .collect()
            })
            .collect();
        let g2 = l
            .g2_i128()
            .ok_or_else(|| Error::OutOfScope("gram entries exceed 128 bits".into()))?;
        Ok(Cholesky { n, c, mu, g2 })
    }

    /// Integers `x` with `c_i (x + shift)² <= room` (up to slack), where
    /// `shift = Σ_{j>i} μ_ij x_j`.
    fn range(&self, i: usize, x: &[i64], room: f64) -> Option<(i64, i64, f64)> {
        let shift: f64 = (i + 1..self.n).map(|j| self.mu[i][j] * x[j] as f64).sum();
        let r = (room.max(0.0) / self.c[i]).sqrt();
        let pad = SLACK * (1.0 + shift.abs() + r);
        let lo = (-shift - r - pad).ceil() as i64;
        let hi = (-shift + r + pad).floor() as i64;
        (lo <= hi).then_some((lo, hi, shift))
    }
}

#[derive(Clone)]
struct Partial {
    represented: Vec<bool>,
    primitive: Vec<bool>,
    witness: Vec<Option<Vec<i64>>>,
    primitive_witness: Vec<Option<Vec<i64>>>,
}

impl Partial {
    fn new(b: usize) -> Self {
        Partial {
            represented: vec![false; b + 1],
            primitive: vec![false; b + 1],
            witness: vec![None; b + 1],
            primitive_witness: vec![None; b + 1],
        }
    }

    fn merge(&mut self, other: Partial) {
        for (i, w) in other.witness.into_iter().enumerate() {
            if self.witness[i].is_none() {
                self.witness[i] = w;
            }
        }
        for (i, w) in other.primitive_witness.into_iter().enumerate() {
            if self.primitive_witness[i].is_none() {
                self.primitive_witness[i] = w;
            }
        }
        for i in 0..self.represented.len() {
            self.represented[i] |= other.represented[i];
            self.primitive[i] |= other.primitive[i];
        }
    }
}

struct Walker<'a> {
    ch: &'a Cholesky,
    bound: u64,
    out: Partial,
}

impl Walker<'_> {
    fn descend(&mut self, i: usize, x: &mut Vec<i64>, used: f64, g: i64) {
        let room = self.bound as f64 * (1.0 + SLACK) - used;
        let Some((lo, hi, shift)) = self.ch.range(i, x, room) else {
            return;
        };
        if i == 0 {
            self.sweep(x, lo, hi, g);
            return;
        }
        for t in lo..=hi {
            x[i] = t;
            let d = t as f64 + shift;
            self.descend(i - 1, x, used + self.ch.c[i] * d * d, g.gcd(&t));
        }
        x[i] = 0;
    }

    /// `2q = a x0² + 2 b x0 + r` with the other coordinates fixed.
    fn sweep(&mut self, x: &mut [i64], lo: i64, hi: i64, g: i64) {
        let n = self.ch.n;
        let g2 = &self.ch.g2;
        let a = g2[0][0];
        let mut b = 0i128;
        let mut r = 0i128;
        for j in 1..n {
            b += g2[0][j] * x[j] as i128;
            for k in 1..n {
                r += g2[j][k] * x[j] as i128 * x[k] as i128;
            }
        }
        for t in lo..=hi {
            let t128 = t as i128;
            let q2 = a * t128 * t128 + 2 * b * t128 + r;
            debug_assert!(q2 % 2 == 0);
            let value = (q2 / 2) as u64;
            if q2 <= 0 || value > self.bound {
                continue;
            }
            let v = value as usize;
            let primitive = g.gcd(&t) == 1;
            if !self.out.represented[v] {
                self.out.represented[v] = true;
                x[0] = t;
                self.out.witness[v] = Some(x.to_vec());
            }
            if primitive && !self.out.primitive[v] {
                self.out.primitive[v] = true;
                x[0] = t;
                self.out.primitive_witness[v] = Some(x.to_vec());
            }
        }
        x[0] = 0;
    }
}

/// Exact sets of (primitively) represented integers in `[1, bound]`.
pub fn enumerate_values(l: &FormMatrix, bound: u64) -> Result<ScanReport> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    if l.is_half() {
        return Err(Error::NonIntegral(2));
    }
    if bound == 0 {
        return Err(Error::OutOfScope("bound must be at least 1".into()));
    }
    let ch = Cholesky::new(l)?;
    let n = ch.n;
    let b = bound as usize;
    let top = n - 1;
    let x0 = vec![0i64; n];
    let (lo, hi, shift) = ch
        .range(top, &x0, bound as f64 * (1.0 + SLACK))
        .expect("zero vector fits");
    let partials: Vec<Partial> = (lo..=hi)
        .into_par_iter()
        .map(|t| {
            let mut w = Walker {
                ch: &ch,
                bound,
                out: Partial::new(b),
            };
            let mut x = x0.clone();
            if n == 1 {
                w.sweep(&mut x, t, t, 0);
            } else {
                x[top] = t;
                let d = t as f64 + shift;
                w.descend(top - 1, &mut x, ch.c[top] * d * d, t.abs());
            }
            w.out
        })
        .collect();
    let mut acc = Partial::new(b);
    for p in partials {
        acc.merge(p);
    }
    let mut report = ScanReport {
        bound,
        represented: vec![],
        primitively_represented: vec![],
        excluded: vec![],
        primitive_excluded: vec![],
        witnesses: BTreeMap::new(),
    };
    for v in 1..=b {
        let value = v as u64;
        if acc.represented[v] {
            report.represented.push(value);
        } else {
            report.excluded.push(value);
        }
        if acc.primitive[v] {
            report.primitively_represented.push(value);
        } else {
            report.primitive_excluded.push(value);
        }
        if let Some(w) = acc.primitive_witness[v]
            .take()
            .or_else(|| acc.witness[v].take())
        {
            report.witnesses.insert(value, w);
        }
    }
    Ok(report)
}

/// Runs `f` on a rayon pool with `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: &[i64]) -> FormMatrix {
        FormMatrix::diagonal(a).unwrap()
    }

    #[test]
    fn squares() {
        let r = enumerate_values(&diag(&[1]), 10).unwrap();
        assert_eq!(r.represented, vec![1, 4, 9]);
        assert_eq!(r.primitively_represented, vec![1]);
        assert_eq!(r.witnesses[&9], vec![-3]);
    }

    #[test]
    fn binary_with_cross_term() {
        // x² + xy + y² takes the Löschian numbers.
        let r = enumerate_values(&FormMatrix::a_plane_hat(), 20).unwrap();
        assert_eq!(r.represented, vec![1, 3, 4, 7, 9, 12, 13, 16, 19]);
        for (&v, w) in &r.witnesses {
            let q = w[0] * w[0] + w[0] * w[1] + w[1] * w[1];
            assert_eq!(q as u64, v);
        }
    }

    #[test]
    fn brute_force_agreement() {
        let l = FormMatrix::from_gram2_i64(&[&[4, 1, 0], &[1, 6, 2], &[0, 2, 10]]).unwrap();
        let r = enumerate_values(&l, 60).unwrap();
        let mut seen = [false; 61];
        let mut prim = [false; 61];
        for x in -8i64..=8 {
            for y in -8i64..=8 {
                for z in -8i64..=8 {
                    let q2 = 4 * x * x + 6 * y * y + 10 * z * z + 2 * x * y + 4 * y * z;
                    let q = q2 / 2;
                    if (1..=60).contains(&q) {
                        seen[q as usize] = true;
                        if x.gcd(&y).gcd(&z) == 1 {
                            prim[q as usize] = true;
                        }
                    }
                }
            }
        }
        let want: Vec<u64> = (1..=60).filter(|&v| seen[v as usize]).collect();
        let want_prim: Vec<u64> = (1..=60).filter(|&v| prim[v as usize]).collect();
        assert_eq!(r.represented, want);
        assert_eq!(r.primitively_represented, want_prim);
    }

    #[test]
    fn brute_force_agreement_rank_five() {
        // Root lattice A5; every vector with q <= 20 has coordinates in [-8, 8].
        let g: Vec<Vec<i64>> = (0..5usize)
            .map(|i| {
                (0..5usize)
                    .map(|j| {
                        if i == j {
                            2
                        } else if i.abs_diff(j) == 1 {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
        let l = FormMatrix::from_gram2_i64(&rows).unwrap();
        let r = enumerate_values(&l, 20).unwrap();
        let mut seen = [false; 21];
        let mut prim = [false; 21];
        let mut x = [-8i64; 5];
        'outer: loop {
            let mut q2 = 0i64;
            for i in 0..5 {
                for j in 0..5 {
                    q2 += x[i] * g[i][j] * x[j];
                }
            }
            let q = q2 / 2;
            if (1..=20).contains(&q) {
                seen[q as usize] = true;
                prim[q as usize] |= x.iter().fold(0i64, |a, b| a.gcd(b)) == 1;
            }
            for c in x.iter_mut() {
                *c += 1;
                if *c <= 8 {
                    continue 'outer;
                }
                *c = -8;
            }
            break;
        }
        let want: Vec<u64> = (1..=20).filter(|&v| seen[v as usize]).collect();
        let want_prim: Vec<u64> = (1..=20).filter(|&v| prim[v as usize]).collect();
        assert_eq!(r.represented, want);
        assert_eq!(r.primitively_represented, want_prim);
    }

    #[test]
    fn indefinite_rejected() {
        assert_eq!(
            enumerate_values(&FormMatrix::hyperbolic(), 10),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let l = diag(&[1, 2, 5]);
        let a = with_threads(Some(1), || enumerate_values(&l, 300).unwrap());
        let b = with_threads(Some(4), || enumerate_values(&l, 300).unwrap());
        assert_eq!(a, b);
    }
}
