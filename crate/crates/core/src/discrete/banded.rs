#![allow(clippy::needless_range_loop)] // band algebra reads clearest with explicit indices

//! Banded LU factorization with partial pivoting.
//!
//! Standard band storage: entry `(i, j)` lives at row `kl + ku + i - j` of
//! column `j`; the extra `kl` leading rows hold fill-in produced by row
//! interchanges, so the effective upper bandwidth after factorization is
//! `kl + ku`.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(
            i + self.ku + self.kl >= j && j + self.kl >= i,
            "entry ({i},{j}) outside band"
        );
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.ab[k] = v;
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.ab[j * self.ldab + (self.kl + self.ku + i - j)]
    }

    /// Row residuals `A x - rhs`.
    pub fn residual(&self, x: &[f64], rhs: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        assert_eq!(rhs.len(), self.n);
        let mut r = vec![0.0; self.n];
        for i in 0..self.n {
            let j_lo = i.saturating_sub(self.kl);
            let j_hi = (i + self.ku).min(self.n - 1);
            let mut acc = -rhs[i];
            for j in j_lo..=j_hi {
                acc += self.at(i, j) * x[j];
            }
            r[i] = acc;
        }
        r
    }

    /// LU factorization with partial pivoting. Consumes the matrix; a zero
    /// pivot reports the offending row.
    pub fn factorize(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let i_hi = (j + kl).min(n - 1);
            let mut piv_row = j;
            let mut piv_val = self.at(j, j).abs();
            for i in (j + 1)..=i_hi {
                let v = self.at(i, j).abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val == 0.0 {
                return Err(CoreError::Factorization { pivot: j });
            }
            ipiv[j] = piv_row;
            let j_hi = (j + kl + ku).min(n - 1);
            if piv_row != j {
                for col in j..=j_hi {
                    let a = self.idx(j, col);
                    let b = self.idx(piv_row, col);
                    self.ab.swap(a, b);
                }
            }
            let diag = self.at(j, j);
            for i in (j + 1)..=i_hi {
                let m = self.at(i, j) / diag;
                self.set(i, j, m);
                if m != 0.0 {
                    for col in (j + 1)..=j_hi {
                        let v = m * self.at(j, col);
                        let k = self.idx(i, col);
                        self.ab[k] -= v;
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab: self.ldab,
            ab: self.ab,
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.ab[j * self.ldab + (self.kl + self.ku + i - j)]
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n, "right-hand side length mismatch");
        let n = self.n;
        // forward: apply interchanges and the unit lower factor
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let i_hi = (j + self.kl).min(n - 1);
            let bj = b[j];
            if bj != 0.0 {
                for i in (j + 1)..=i_hi {
                    b[i] -= self.at(i, j) * bj;
                }
            }
        }
        // back substitution with the banded upper factor
        for j in (0..n).rev() {
            b[j] /= self.at(j, j);
            let bj = b[j];
            if bj != 0.0 {
                let i_lo = j.saturating_sub(self.kl + self.ku);
                for i in i_lo..j {
                    b[i] -= self.at(i, j) * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
