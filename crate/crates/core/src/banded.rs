//! Banded matrices with an LU factorisation using partial pivoting.
//!
//! Storage is row-major over the band; the factorisation follows the usual
//! `gbtrf` layout where row interchanges widen the upper band by `kl`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field scalars the banded routines work over (`f64` and `Complex64`).
pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn from_real(x: f64) -> Self;
    fn re(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
}

/// Square matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![T::zero(); n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize, kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::zero()
        }
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Nonzero pattern iterator over `(i, j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            (lo..=hi).map(move |j| (i, j, self.get(i, j)))
        })
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        let w = self.kl + self.ku + 1;
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = T::zero();
            for j in lo..=hi {
                acc += row[j + self.kl - i] * x[j];
            }
            *yi = acc;
        }
    }

    /// `αI + βA` with the same band.
    pub fn shifted(&self, alpha: T, beta: T) -> Self {
        let mut out = Self {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data: self.data.iter().map(|&a| beta * a).collect(),
        };
        for i in 0..self.n {
            out.add_to(i, i, alpha);
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> BandMatrix<U> {
        BandMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn factor(&self) -> Result<BandLu<T>> {
        BandLu::new(self)
    }
}

impl BandMatrix<f64> {
    /// Real matrix times a vector over any [`Scalar`].
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let w = self.kl + self.ku + 1;
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                let row = &self.data[i * w..(i + 1) * w];
                let mut acc = T::zero();
                for j in lo..=hi {
                    acc += x[j] * row[j + self.kl - i];
                }
                acc
            })
            .collect()
    }

    /// `Re xᴴ A x` without allocating.
    pub fn quadratic_form<T: Scalar>(&self, x: &[T]) -> f64 {
        assert_eq!(x.len(), self.n);
        let w = self.kl + self.ku + 1;
        let mut acc = 0.0;
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * w..(i + 1) * w];
            let mut r = T::zero();
            for j in lo..=hi {
                r += x[j] * row[j + self.kl - i];
            }
            acc += (x[i].conj() * r).re();
        }
        acc
    }

    pub fn to_complex(&self) -> BandMatrix<num_complex::Complex64> {
        self.map(|a| num_complex::Complex64::new(a, 0.0))
    }
}

/// LU factors of a [`BandMatrix`] with row interchanges.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    width: usize,
    // row i holds columns i-kl ..= i+ku+kl
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    fn new(a: &BandMatrix<T>) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let width = 2 * kl + ku + 1;
        let mut data = vec![T::zero(); n * width];
        for (i, j, v) in a.entries() {
            data[i * width + (j + kl - i)] = v;
        }
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut p = k;
            let mut best = data[at(k, k)].modulus();
            for i in k + 1..=last_row {
                let v = data[at(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::FactorizationFailure { row: k });
            }
            if p != k {
                for j in k..=last_col {
                    data.swap(at(k, j), at(p, j));
                }
            }
            let pivot = data[at(k, k)];
            for i in k + 1..=last_row {
                let l = data[at(i, k)] / pivot;
                data[at(i, k)] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = data[at(k, j)];
                    data[at(i, j)] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            data,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.width + (j + self.kl - i)]
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let (n, kl) = (self.n, self.kl);
        let ku_eff = self.width - kl - 1;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.at(i, k) * bk;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + ku_eff).min(n - 1) {
                acc -= self.at(i, j) * b[j];
            }
            b[i] = acc / self.at(i, i);
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve `Aᴴ x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [T]) {
        let (n, kl) = (self.n, self.kl);
        let ku_eff = self.width - kl - 1;
        // Uᴴ z = b
        for i in 0..n {
            let mut acc = b[i];
            for j in i.saturating_sub(ku_eff)..i {
                acc -= self.at(j, i).conj() * b[j];
            }
            b[i] = acc / self.at(i, i).conj();
        }
        // apply the transposed elimination steps in reverse
        for k in (0..n).rev() {
            let mut acc = T::zero();
            for i in k + 1..=(k + kl).min(n - 1) {
                acc += self.at(i, k).conj() * b[i];
            }
            b[k] -= acc;
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }

    pub fn solve_adjoint(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_adjoint_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.set(i, j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        m
    }

    fn dense(m: &BandMatrix<Complex64>) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(m.dim(), m.dim(), |i, j| m.get(i, j))
    }

    #[test]
    fn solve_matches_dense_lu() {
        let m = random_band(40, 3, 2, 7);
        let b: Vec<Complex64> = (0..40).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let x = m.factor().unwrap().solve(&b);
        let r = m.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-10);
        }
        let xd = dense(&m).lu().solve(&nalgebra::DVector::from_vec(b.clone())).unwrap();
        for (a, b) in x.iter().zip(xd.iter()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn adjoint_solve() {
        let m = random_band(33, 2, 3, 11);
        let b: Vec<Complex64> = (0..33).map(|k| Complex64::new(1.0, -(k as f64))).collect();
        let x = m.factor().unwrap().solve_adjoint(&b);
        let r = dense(&m).adjoint() * nalgebra::DVector::from_vec(x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-9);
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut m = BandMatrix::<f64>::zeros(3, 1, 1);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 2, 1.0);
        m.set(2, 1, 1.0);
        m.set(2, 2, 1.0);
        let x = m.factor().unwrap().solve(&[1.0, 2.0, 3.0]);
        assert_eq!(m.matvec(&x), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandMatrix::<f64>::zeros(4, 1, 1);
        assert!(matches!(m.factor(), Err(Error::FactorizationFailure { row: 0 })));
    }
}
