//! The residue-tree search behind every local decision.
//!
//! Nodes are primitive vectors `v mod p^k`. With `d = ord_p(G2 v)` capped at
//! `k`, every lift of `v` has the same value of `q` modulo `p^(k+d)` when
//! `d < k`, and modulo `p^(2k)` otherwise. A node with `d < k` is a leaf:
//! either its value matches the target to Hensel precision `2d + 1` or none of
//! its lifts can. Only nodes with `G2 v ≡ 0 mod p^k` are expanded, and a
//! primitive `v` has `d <= ord_p(det G2)`, which bounds the depth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::FormMatrix;
use crate::padic::{check_prime, int_valuation, unit_residue};

const MODULUS_LIMIT: i128 = 1 << 62;

/// A residue solution together with its Hensel certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Hit {
    pub vector: Vec<i128>,
    /// `q(vector) ≡ target mod p^exponent`.
    pub exponent: u32,
    /// `min_i ord_p((G2 vector)_i)`; `exponent >= 2 * gradient + 1`.
    pub gradient: u32,
}

pub(crate) struct ResidueForm {
    p: i128,
    n: usize,
    g2: Vec<i128>,
    /// `ord_p 2`.
    t2: u32,
    /// `q` is tracked as `2q` modulo `p^(prec + t2)`.
    prec: u32,
    modulus: i128,
    powers: Vec<i128>,
}

/// `ord_p(det G2)`: every primitive vector has gradient valuation at most this.
pub(crate) fn gradient_bound(l: &FormMatrix, p: u64) -> u32 {
    int_valuation(&l.det_g2(), p).expect("nonsingular")
}

pub(crate) fn check_integral(l: &FormMatrix, p: u64) -> Result<()> {
    if p == 2 && l.is_half() {
        return Err(Error::NonIntegral(p));
    }
    Ok(())
}

impl ResidueForm {
    /// Tracks `q` modulo `p^prec`.
    pub fn new(l: &FormMatrix, p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        check_integral(l, p)?;
        let t2 = u32::from(p == 2);
        let pi = p as i128;
        let mut powers = vec![1i128];
        while powers.len() <= (prec + t2) as usize {
            let last = *powers.last().unwrap();
            match last.checked_mul(pi) {
                Some(x) if x < MODULUS_LIMIT => powers.push(x),
                _ => {
                    return Err(Error::PrecisionExceeded {
                        prime: p,
                        exponent: prec + t2,
                    })
                }
            }
        }
        let modulus = powers[(prec + t2) as usize];
        let mb = BigInt::from(modulus);
        let n = l.rank();
        let g2 = l
            .g2()
            .iter()
            .flatten()
            .map(|x| x.mod_floor(&mb).to_i128().unwrap())
            .collect();
        Ok(ResidueForm {
            p: pi,
            n,
            g2,
            t2,
            prec,
            modulus,
            powers,
        })
    }

    fn ord(&self, x: i128) -> u32 {
        let mut x = x.rem_euclid(self.modulus);
        if x == 0 {
            return self.prec + self.t2;
        }
        let mut e = 0;
        while x % self.p == 0 {
            x /= self.p;
            e += 1;
        }
        e
    }

    fn mulmod(&self, a: i128, b: i128) -> i128 {
        // Operands are below 2^62, so the product fits.
        a * b % self.modulus
    }

    /// `(2 q(v), G2 v)` modulo the working modulus.
    fn eval(&self, v: &[i128]) -> (i128, Vec<i128>) {
        let mut g = vec![0i128; self.n];
        for i in 0..self.n {
            let row = &self.g2[i * self.n..(i + 1) * self.n];
            let mut s = 0i128;
            for j in 0..self.n {
                s = (s + self.mulmod(row[j], v[j])) % self.modulus;
            }
            g[i] = s;
        }
        let mut q2 = 0i128;
        for i in 0..self.n {
            q2 = (q2 + self.mulmod(v[i], g[i])) % self.modulus;
        }
        (q2, g)
    }

    fn gradient_ord(&self, g: &[i128]) -> u32 {
        g.iter().map(|&x| self.ord(x)).min().unwrap_or(0)
    }

    /// `2 q ≡ 2 target (mod p^(e + t2))`.
    fn agrees(&self, q2: i128, target2: i128, e: u32) -> bool {
        let m = self.powers[(e + self.t2) as usize];
        (q2 - target2).rem_euclid(m) == 0
    }

    /// Nonzero vectors mod `p`, in lexicographic order.
    fn roots(&self) -> Vec<Vec<i128>> {
        let total = (self.p as u64).pow(self.n as u32);
        (1..total)
            .map(|mut idx| {
                let mut v = vec![0i128; self.n];
                for c in v.iter_mut().rev() {
                    *c = (idx % self.p as u64) as i128;
                    idx /= self.p as u64;
                }
                v
            })
            .collect()
    }

    fn children(&self, v: &[i128], k: u32) -> impl Iterator<Item = Vec<i128>> + '_ {
        let pk = self.powers[k as usize];
        let total = (self.p as u64).pow(self.n as u32);
        let base = v.to_vec();
        (0..total).map(move |mut idx| {
            let mut w = base.clone();
            for c in w.iter_mut().rev() {
                *c += (idx % self.p as u64) as i128 * pk;
                idx /= self.p as u64;
            }
            w
        })
    }

    /// Searches for a primitive `v` with `q(v) ≡ target (mod p^kstar)`.
    ///
    /// Requires `kstar >= 2 ord_p(2 target) + 1` and
    /// `self.prec >= min(kstar, 2 * gradient_bound + 1)`.
    pub fn find(&self, target2: i128, kstar: u32) -> Option<Hit> {
        self.roots()
            .into_par_iter()
            .find_map_first(|v| self.find_from(v, 1, target2, kstar))
    }

    fn find_from(&self, v: Vec<i128>, k: u32, target2: i128, kstar: u32) -> Option<Hit> {
        let (q2, g) = self.eval(&v);
        let d = self.gradient_ord(&g);
        if d < k {
            let e = (k + d).min(kstar);
            return self.agrees(q2, target2, e).then_some(Hit {
                vector: v,
                exponent: e,
                gradient: d,
            });
        }
        let e = (2 * k).min(kstar);
        if !self.agrees(q2, target2, e) {
            return None;
        }
        if e == kstar {
            // q ≡ target mod p^kstar forces d <= ord_p(2 target) < kstar.
            return Some(Hit {
                vector: v,
                exponent: e,
                gradient: d,
            });
        }
        self.children(&v, k)
            .find_map(|w| self.find_from(w, k + 1, target2, kstar))
    }

    /// Largest `ord_p q(v)` over primitive `v`, or a Hensel-certified zero.
    ///
    /// Requires `self.prec >= 2 * gradient_bound + 2`.
    pub fn zero_search(&self) -> ZeroSearch {
        let results: Vec<ZeroSearch> = self
            .roots()
            .into_par_iter()
            .map(|v| self.zero_from(v, 1))
            .collect();
        let mut best = 0;
        for r in results {
            match r {
                ZeroSearch::Isotropic(hit) => return ZeroSearch::Isotropic(hit),
                ZeroSearch::MaxOrder(m) => best = best.max(m),
            }
        }
        ZeroSearch::MaxOrder(best)
    }

    fn zero_from(&self, v: Vec<i128>, k: u32) -> ZeroSearch {
        let (q2, g) = self.eval(&v);
        let d = self.gradient_ord(&g);
        let oq = self.ord(q2).saturating_sub(self.t2);
        if d < k {
            if oq >= k + d {
                return ZeroSearch::Isotropic(Hit {
                    vector: v,
                    exponent: k + d,
                    gradient: d,
                });
            }
            return ZeroSearch::MaxOrder(oq);
        }
        if oq < 2 * k {
            return ZeroSearch::MaxOrder(oq);
        }
        let mut best = 0;
        for w in self.children(&v, k) {
            match self.zero_from(w, k + 1) {
                ZeroSearch::Isotropic(hit) => return ZeroSearch::Isotropic(hit),
                ZeroSearch::MaxOrder(m) => best = best.max(m),
            }
        }
        ZeroSearch::MaxOrder(best)
    }

    /// `2 a mod p^(prec + t2)` for `a` with `ord_p a >= 0`.
    pub fn target2(&self, a: &BigRational) -> i128 {
        let (e, u) = unit_residue(a, self.p as u64, self.prec + self.t2);
        let u = u.to_i128().unwrap();
        let pe = if e as u32 >= self.prec + self.t2 {
            0
        } else {
            self.powers[e as usize]
        };
        self.mulmod(self.mulmod(u, pe), 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ZeroSearch {
    Isotropic(Hit),
    MaxOrder(u32),
}
