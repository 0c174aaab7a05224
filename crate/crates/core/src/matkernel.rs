//! Dense complex matrix kernel.
//!
//! Square complex matrices stored row-major, plus the handful of
//! factorizations the rest of the crate relies on: Hermitian
//! eigendecomposition (cyclic Jacobi), singular values (one-sided Jacobi),
//! inverses and determinants (partial-pivot elimination), and spectral
//! functions of Hermitian matrices.
//!
//! Everything here is sized for block dimensions p <= 8 and truncations of a
//! few hundred rows; no attempt is made at cache blocking.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for the Hermitian test.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative tolerance for positive definiteness.
pub const PD_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, C64::new(1.0, 0.0))
    }

    pub fn scalar(n: usize, s: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    /// Builds a matrix from rows; every row must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = c(x, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// max |a_ij - conj(a_ji)|
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + self.max_abs())
    }

    /// (A + A*)/2, the Hermitian part.
    pub fn hermitian_part(&self) -> HermitianMatrix {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        HermitianMatrix(m)
    }

    /// (A - A*)/(2i), so that A = Re A + i Im A with both parts Hermitian.
    pub fn imaginary_part(&self) -> HermitianMatrix {
        let half_over_i = c(0.0, -0.5);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = (self[(i, j)] - self[(j, i)].conj()) * half_over_i;
            }
        }
        HermitianMatrix(m)
    }

    pub fn block(&self, r0: usize, c0: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        for i in 0..b.n {
            for j in 0..b.n {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// out = a * b, without allocating.
    pub fn mul_into(out: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) {
        debug_assert!(a.n == b.n && out.n == a.n);
        let n = a.n;
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += a.data[i * n + k] * b.data[k * n + j];
                }
                out.data[i * n + j] = s;
            }
        }
    }

    /// acc += a* b
    pub fn add_adjoint_mul(acc: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) {
        let n = a.n;
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += a.data[k * n + i].conj() * b.data[k * n + j];
                }
                acc.data[i * n + j] += s;
            }
        }
    }

    /// a* b
    pub fn adjoint_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.n);
        Self::add_adjoint_mul(&mut out, a, b);
        out
    }

    /// a b*
    pub fn mul_adjoint(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let n = a.n;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| a.data[i * n + k] * b.data[j * n + k].conj()).sum()
        })
    }

    fn check_same(&self, other: &ComplexMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// LU with partial pivoting. Returns (lu, perm, sign) or `None` when a
    /// pivot vanishes exactly.
    fn lu(&self) -> Option<(Vec<C64>, Vec<usize>, f64)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let d = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                for j in (k + 1)..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn determinant(&self) -> C64 {
        match self.lu() {
            None => C64::new(0.0, 0.0),
            Some((a, _, sign)) => {
                let n = self.n;
                (0..n).map(|i| a[i * n + i]).product::<C64>() * sign
            }
        }
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails when the matrix is singular to working precision (smallest
    /// pivot below `n * eps * max|a|`) or the result is not finite.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        if !self.is_finite() {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular("zero matrix".into()));
        }
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let floor = (n as f64) * f64::EPSILON * scale;
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= floor {
                return Err(Error::Singular(format!("pivot {best:e} at column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                    inv.swap(k * n + j, piv * n + j);
                }
            }
            let d = a[k * n + k].inv();
            for j in 0..n {
                a[k * n + j] *= d;
                inv[k * n + j] *= d;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (ta, ti) = (a[k * n + j], inv[k * n + j]);
                    a[i * n + j] -= f * ta;
                    inv[i * n + j] -= f * ti;
                }
            }
        }
        let out = ComplexMatrix { n, data: inv };
        if !out.is_finite() {
            return Err(Error::Singular("inverse overflowed".into()));
        }
        Ok(out)
    }

    /// Singular values in descending order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        let n = self.n;
        // column-major working copy: cols[j] is column j
        let mut cols: Vec<Vec<C64>> =
            (0..n).map(|j| (0..n).map(|i| self[(i, j)]).collect()).collect();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma: C64 =
                        cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                    if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0
                    {
                        continue;
                    }
                    rotated = true;
                    let rot = JacobiRotation::new(alpha, beta, gamma);
                    let (left, right) = cols.split_at_mut(q);
                    rot.apply_columns(&mut left[p], &mut right[0]);
                }
            }
            if !rotated {
                break;
            }
        }
        let mut s: Vec<f64> =
            cols.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }
}

/// Rotation diagonalizing the 2x2 Hermitian [[app, apq], [conj(apq), aqq]].
///
/// As a unitary acting on coordinates (p, q):
/// R = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] with e^{i phi} = apq/|apq|.
struct JacobiRotation {
    c: f64,
    s: f64,
    phase: C64, // e^{-i phi}
}

impl JacobiRotation {
    fn new(app: f64, aqq: f64, apq: C64) -> Self {
        let r = apq.norm();
        let phase = (apq / r).conj();
        let theta = (aqq - app) / (2.0 * r);
        let t = if theta >= 0.0 {
            1.0 / (theta + (theta * theta + 1.0).sqrt())
        } else {
            -1.0 / (-theta + (theta * theta + 1.0).sqrt())
        };
        let cos = 1.0 / (t * t + 1.0).sqrt();
        JacobiRotation { c: cos, s: t * cos, phase }
    }

    /// [x, y] <- [x, y] R
    #[inline]
    fn apply_pair(&self, x: C64, y: C64) -> (C64, C64) {
        (x * self.c - y * self.phase * self.s, x * self.s + y * self.phase * self.c)
    }

    fn apply_columns(&self, xp: &mut [C64], xq: &mut [C64]) {
        for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
            let (u, v) = self.apply_pair(*a, *b);
            *a = u;
            *b = v;
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.n);
        ComplexMatrix::mul_into(&mut out, self, rhs);
        out
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// A Hermitian matrix. Construction through [`HermitianMatrix::new`] checks
/// the defect against [`HERMITIAN_TOL`] and stores the exact Hermitian part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

/// Eigendecomposition H = V diag(values) V*, values ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column k is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL * (1.0 + m.max_abs()) {
            return Err(Error::invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(m.hermitian_part())
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(n))
    }

    pub fn diag(d: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::diag_real(d))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Cyclic Jacobi eigendecomposition.
    pub fn eigh(&self) -> Eigh {
        let n = self.dim();
        let mut a = self.0.clone();
        let mut v = ComplexMatrix::identity(n);
        let total = a.frobenius_norm();
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * 0.5 * total || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.norm() == 0.0 {
                        continue;
                    }
                    let rot = JacobiRotation::new(a[(p, p)].re, a[(q, q)].re, apq);
                    // A <- A R (columns p, q)
                    for k in 0..n {
                        let (u, w) = rot.apply_pair(a[(k, p)], a[(k, q)]);
                        a[(k, p)] = u;
                        a[(k, q)] = w;
                    }
                    // A <- R* A (rows p, q): conjugate of the column update
                    for k in 0..n {
                        let (u, w) = rot.apply_pair(a[(p, k)].conj(), a[(q, k)].conj());
                        a[(p, k)] = u.conj();
                        a[(q, k)] = w.conj();
                    }
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    a[(p, p)].im = 0.0;
                    a[(q, q)].im = 0.0;
                    for k in 0..n {
                        let (u, w) = rot.apply_pair(v[(k, p)], v[(k, q)]);
                        v[(k, p)] = u;
                        v[(k, q)] = w;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
        Eigh { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// f(H) = V f(Λ) V*.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let e = self.eigh();
        Self::from_eigen(&e.vectors, &e.values.iter().map(|&x| f(x)).collect::<Vec<_>>())
    }

    pub(crate) fn from_eigen(vectors: &ComplexMatrix, values: &[f64]) -> HermitianMatrix {
        let n = vectors.dim();
        let m = ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| vectors[(i, k)] * values[k] * vectors[(j, k)].conj()).sum()
        });
        m.hermitian_part()
    }

    fn require_pd(&self, what: &str) -> Result<Eigh> {
        let e = self.eigh();
        let lo = e.values.first().copied().unwrap_or(0.0);
        let hi = e.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !(lo > PD_TOL * hi.max(f64::MIN_POSITIVE)) {
            return Err(Error::NotPositiveDefinite { what: what.into(), min_eigenvalue: lo });
        }
        Ok(e)
    }

    /// Principal inverse square root of a positive definite matrix.
    pub fn inv_sqrt(&self) -> Result<HermitianMatrix> {
        let e = self.require_pd("matrix")?;
        let vals: Vec<f64> = e.values.iter().map(|x| 1.0 / x.sqrt()).collect();
        Ok(Self::from_eigen(&e.vectors, &vals))
    }

    /// Principal square root of a positive definite matrix.
    pub fn sqrt_pd(&self) -> Result<HermitianMatrix> {
        let e = self.require_pd("matrix")?;
        let vals: Vec<f64> = e.values.iter().map(|x| x.sqrt()).collect();
        Ok(Self::from_eigen(&e.vectors, &vals))
    }

    /// Inverse of a positive definite matrix through its spectrum.
    pub fn inverse_pd(&self) -> Result<HermitianMatrix> {
        let e = self.require_pd("matrix")?;
        let vals: Vec<f64> = e.values.iter().map(|x| 1.0 / x).collect();
        Ok(Self::from_eigen(&e.vectors, &vals))
    }

    /// Inverse of a positive definite matrix after symmetric diagonal
    /// scaling to unit diagonal, for matrices whose entries span many orders
    /// of magnitude (the scaled matrix must pass the PD test).
    pub fn inverse_pd_scaled(&self) -> Result<HermitianMatrix> {
        let n = self.dim();
        let mut sc = Vec::with_capacity(n);
        for i in 0..n {
            let d = self.0[(i, i)].re;
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::NotPositiveDefinite { what: "matrix".into(), min_eigenvalue: d });
            }
            sc.push(1.0 / d.sqrt());
        }
        let scaled = HermitianMatrix(ComplexMatrix::from_fn(n, |r, c| self.0[(r, c)] * sc[r] * sc[c]));
        let inv = scaled.inverse_pd()?.0;
        Ok(HermitianMatrix(ComplexMatrix::from_fn(n, |r, c| inv[(r, c)] * sc[r] * sc[c])))
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Largest singular value: the smallest mu >= 0 with C*C <= mu^2 I.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(m.singular_values().first().copied().unwrap_or(0.0))
}

/// A <= B in the Loewner order, up to `tol` on the smallest eigenvalue of B - A.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    a.as_matrix().check_same(b.as_matrix())?;
    let d = HermitianMatrix(b.as_matrix() - a.as_matrix());
    Ok(d.min_eigenvalue() >= -tol)
}

/// Number of eigenvalues with |λ| > rel_tol * max(1, max |λ|).
pub fn numerical_rank(h: &HermitianMatrix, rel_tol: f64) -> usize {
    let vals = h.eigenvalues();
    let top = vals.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    vals.iter().filter(|x| x.abs() > rel_tol * top).count()
}

/// Principal K with K H K = I.
pub fn hermitian_inv_sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    h.inv_sqrt()
}
