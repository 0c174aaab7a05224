//! Matrix polynomials with left matrix coefficients, the first-kind
//! polynomials of a regular J_p-matrix, expansion in that basis, and the
//! matrix-valued form `{P, Q}`.

use crate::error::{Error, Result};
use crate::jacobi::{offdiag_defect, BlockJacobiMatrix, REG_TOL};
use crate::matkernel::{ComplexMatrix, C64, HERMITIAN_TOL};

/// `C_0 + C_1 λ + ... + C_n λ^n` with p x p complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    p: usize,
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixPoly {
    pub fn new(p: usize, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("block dimension p must be >= 1"));
        }
        for (i, m) in coeffs.iter().enumerate() {
            if m.dim() != p {
                return Err(Error::invalid(format!("coefficient {i} is not {p}x{p}")));
            }
        }
        Ok(MatrixPoly { p, coeffs })
    }

    pub fn zero(p: usize) -> Self {
        MatrixPoly { p, coeffs: Vec::new() }
    }

    pub fn constant(c: ComplexMatrix) -> Self {
        MatrixPoly { p: c.dim(), coeffs: vec![c] }
    }

    pub fn identity(p: usize) -> Self {
        Self::constant(ComplexMatrix::identity(p))
    }

    /// `c λ^deg`
    pub fn monomial(deg: usize, c: ComplexMatrix) -> Self {
        let p = c.dim();
        let mut coeffs = vec![ComplexMatrix::zeros(p); deg];
        coeffs.push(c);
        MatrixPoly { p, coeffs }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ComplexMatrix {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ComplexMatrix::zeros(self.p))
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn trimmed(mut self) -> Self {
        let len = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    /// Each coefficient replaced by its conjugate transpose, so that
    /// `star(P)(conj z) = P(z)*`.
    pub fn star(&self) -> Self {
        MatrixPoly { p: self.p, coeffs: self.coeffs.iter().map(|c| c.adjoint()).collect() }
    }

    /// Horner evaluation of `Σ C_i z^i`.
    pub fn eval(&self, z: C64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.p);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(z) + c;
        }
        acc
    }

    /// `λ P(λ)`
    pub fn times_lambda(&self) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ComplexMatrix::zeros(self.p));
        coeffs.extend(self.coeffs.iter().cloned());
        MatrixPoly { p: self.p, coeffs }
    }

    /// `C P(λ)`
    pub fn left_mul(&self, c: &ComplexMatrix) -> Self {
        MatrixPoly { p: self.p, coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    /// `P(λ) C`
    pub fn right_mul(&self, c: &ComplexMatrix) -> Self {
        MatrixPoly { p: self.p, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        MatrixPoly { p: self.p, coeffs: self.coeffs.iter().map(|x| x.scale(s)).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Self {
        assert_eq!(self.p, other.p, "block dimension mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f(&self.coeff(i), &other.coeff(i))).collect();
        MatrixPoly { p: self.p, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest coefficient magnitude, used as a residual scale.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

/// Precomputed blocks for running the three-term recurrence
/// `B_{k-1}* X_{k-1} + (A_k - z) X_k + B_k X_{k+1} = 0` pointwise.
#[derive(Clone, Debug)]
pub struct Recurrence {
    p: usize,
    diag: Vec<ComplexMatrix>,
    offdiag_inv: Vec<ComplexMatrix>,
    offdiag_adj: Vec<ComplexMatrix>,
}

impl Recurrence {
    /// Blocks needed to reach `X_n`: `A_0..A_{n-1}` and `B_0..B_{n-1}`.
    pub fn new(j: &BlockJacobiMatrix, n: usize) -> Result<Self> {
        if let Some(max) = j.max_degree() {
            if n > max {
                return Err(Error::OutOfRange { requested: n, available: max });
            }
        }
        let mut diag = Vec::with_capacity(n);
        let mut offdiag_inv = Vec::with_capacity(n);
        let mut offdiag_adj = Vec::with_capacity(n);
        for k in 0..n {
            let a = j.diag_block(k)?;
            if !a.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::invalid(format!("diagonal block {k} is not Hermitian")));
            }
            let b = j.offdiag_block(k)?;
            if let Some(rel) = offdiag_defect(&b) {
                return Err(Error::invalid(format!(
                    "off-diagonal block {k} is singular (relative min singular value {rel:e})"
                )));
            }
            diag.push(a.hermitian_part().into_matrix());
            offdiag_inv.push(b.inverse()?);
            offdiag_adj.push(b.adjoint());
        }
        Ok(Recurrence { p: j.p(), diag, offdiag_inv, offdiag_adj })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn diag(&self, k: usize) -> &ComplexMatrix {
        &self.diag[k]
    }

    pub fn offdiag_inv(&self, k: usize) -> &ComplexMatrix {
        &self.offdiag_inv[k]
    }

    pub fn offdiag_adj(&self, k: usize) -> &ComplexMatrix {
        &self.offdiag_adj[k]
    }

    /// Runs the recurrence at `z` from `X_0 = x0`, `X_1 = x1` and hands
    /// `(k, X_k)` to `f` for k = 0..=n.
    pub fn run(
        &self,
        z: C64,
        x0: &ComplexMatrix,
        x1: &ComplexMatrix,
        n: usize,
        mut f: impl FnMut(usize, &ComplexMatrix),
    ) {
        assert!(n <= self.len(), "recurrence prepared for {} steps, asked for {n}", self.len());
        let mut st = Stepper::new(self, z, x0.clone(), x1.clone());
        f(0, st.current());
        while st.index() < n {
            st.advance();
            f(st.index(), st.current());
        }
    }

    pub fn first_kind_start(&self, d0: &ComplexMatrix, z: C64) -> (ComplexMatrix, ComplexMatrix) {
        let x1 = if self.is_empty() {
            ComplexMatrix::zeros(self.p)
        } else {
            &self.offdiag_inv[0] * &(&d0.scale(z) - &(&self.diag[0] * d0))
        };
        (d0.clone(), x1)
    }

    pub fn second_kind_start(&self, d0_inv_adj: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let x0 = ComplexMatrix::zeros(self.p);
        let x1 = if self.is_empty() { x0.clone() } else { &self.offdiag_inv[0] * d0_inv_adj };
        (x0, x1)
    }

    /// `D_0(z)..D_n(z)` for the given `D_0`.
    pub fn first_kind(&self, d0: &ComplexMatrix, z: C64, n: usize, f: impl FnMut(usize, &ComplexMatrix)) {
        let (x0, x1) = self.first_kind_start(d0, z);
        self.run(z, &x0, &x1, n, f)
    }

    /// `E_0(z)..E_n(z)`: `E_0 = 0`, `E_1 = B_0^{-1} D_0^{-*}`, then the same
    /// recurrence as the first kind.
    pub fn second_kind(
        &self,
        d0_inv_adj: &ComplexMatrix,
        z: C64,
        n: usize,
        f: impl FnMut(usize, &ComplexMatrix),
    ) {
        let (x0, x1) = self.second_kind_start(d0_inv_adj);
        self.run(z, &x0, &x1, n, f)
    }
}

/// Advances one solution of the recurrence at a fixed point `z`, so several
/// solutions can be walked in lockstep.
pub struct Stepper<'a> {
    rec: &'a Recurrence,
    z: C64,
    k: usize,
    prev: ComplexMatrix,
    cur: ComplexMatrix,
    next: ComplexMatrix,
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    started: bool,
}

impl<'a> Stepper<'a> {
    /// Positioned at index 0 with `X_0 = x0`; the first `advance` yields `x1`.
    pub fn new(rec: &'a Recurrence, z: C64, x0: ComplexMatrix, x1: ComplexMatrix) -> Self {
        let p = rec.p;
        Stepper {
            rec,
            z,
            k: 0,
            prev: x1,
            cur: x0,
            next: ComplexMatrix::zeros(p),
            t1: ComplexMatrix::zeros(p),
            t2: ComplexMatrix::zeros(p),
            started: false,
        }
    }

    pub fn index(&self) -> usize {
        self.k
    }

    pub fn current(&self) -> &ComplexMatrix {
        &self.cur
    }

    /// Moves to `X_{k+1}`. Panics past the prepared length.
    pub fn advance(&mut self) {
        if !self.started {
            // prev holds x1 until the first step
            std::mem::swap(&mut self.prev, &mut self.cur);
            self.started = true;
            self.k = 1;
            return;
        }
        let k = self.k;
        assert!(k < self.rec.len(), "recurrence prepared for {} steps", self.rec.len());
        // t1 = A_k X_k + B_{k-1}* X_{k-1};  next = B_k^{-1} (z X_k - t1)
        ComplexMatrix::mul_into(&mut self.t1, &self.rec.diag[k], &self.cur);
        ComplexMatrix::mul_into(&mut self.t2, &self.rec.offdiag_adj[k - 1], &self.prev);
        for ((a, b), x) in self.t1.as_mut_slice().iter_mut().zip(self.t2.as_slice()).zip(self.cur.as_slice()) {
            *a = self.z * x - (*a + b);
        }
        ComplexMatrix::mul_into(&mut self.next, &self.rec.offdiag_inv[k], &self.t1);
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.k = k + 1;
    }
}

/// First-kind polynomials `D_0..D_n` of a regular J_p-matrix.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    jacobi: BlockJacobiMatrix,
    d0: ComplexMatrix,
    polys: Vec<MatrixPoly>,
    lead_inv: Vec<ComplexMatrix>,
}

impl OrthoBasis {
    pub fn jacobi(&self) -> &BlockJacobiMatrix {
        &self.jacobi
    }

    pub fn d0(&self) -> &ComplexMatrix {
        &self.d0
    }

    pub fn polys(&self) -> &[MatrixPoly] {
        &self.polys
    }

    pub fn poly(&self, k: usize) -> &MatrixPoly {
        &self.polys[k]
    }

    /// Highest available degree n (the basis holds D_0..D_n).
    pub fn max_degree(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn p(&self) -> usize {
        self.d0.dim()
    }
}

pub(crate) fn check_nonsingular(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::invalid(format!("{what} has non-finite entries")));
    }
    let s = m.singular_values();
    let hi = s.first().copied().unwrap_or(0.0);
    let lo = s.last().copied().unwrap_or(0.0);
    if !(lo > REG_TOL * hi.max(1.0)) {
        return Err(Error::invalid(format!("{what} is singular (min singular value {lo:e})")));
    }
    Ok(())
}

/// Builds `D_0..D_n` from `D_{k+1} = B_k^{-1}[(λ - A_k) D_k - B_{k-1}* D_{k-1}]`
/// with `D_{-1} = 0`.
pub fn generate_first_kind(j: &BlockJacobiMatrix, n: usize, d0: &ComplexMatrix) -> Result<OrthoBasis> {
    let p = j.p();
    if d0.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: d0.dim() });
    }
    check_nonsingular(d0, "D_0")?;
    let rec = Recurrence::new(j, n)?;
    let mut polys = vec![MatrixPoly::constant(d0.clone())];
    for k in 0..n {
        let dk = &polys[k];
        let mut r = dk.times_lambda().sub(&dk.left_mul(rec.diag(k)));
        if k > 0 {
            r = r.sub(&polys[k - 1].left_mul(rec.offdiag_adj(k - 1)));
        }
        polys.push(r.left_mul(rec.offdiag_inv(k)));
    }
    // lead(D_{k+1}) = B_k^{-1} lead(D_k), so the inverses follow by products.
    let mut lead_inv = Vec::with_capacity(n + 1);
    lead_inv.push(d0.inverse()?);
    for k in 0..n {
        let next = &lead_inv[k] * &j.offdiag_block(k)?;
        lead_inv.push(next);
    }
    Ok(OrthoBasis { jacobi: j.clone(), d0: d0.clone(), polys, lead_inv })
}

/// Coefficients `U_0..U_m` with `P = Σ U_k D_k`, found by peeling the
/// highest degree first against the leading coefficients of the basis.
pub fn expand(poly: &MatrixPoly, basis: &OrthoBasis) -> Result<Vec<ComplexMatrix>> {
    if poly.p() != basis.p() {
        return Err(Error::DimensionMismatch { expected: basis.p(), found: poly.p() });
    }
    let deg = match poly.degree() {
        None => return Ok(Vec::new()),
        Some(d) => d,
    };
    if deg > basis.max_degree() {
        return Err(Error::OutOfRange { requested: deg, available: basis.max_degree() });
    }
    let mut rem: Vec<ComplexMatrix> = poly.coeffs()[..=deg].to_vec();
    let mut u = vec![ComplexMatrix::zeros(poly.p()); deg + 1];
    for k in (0..=deg).rev() {
        let uk = &rem[k] * &basis.lead_inv[k];
        let dk = basis.poly(k);
        for (i, c) in dk.coeffs().iter().enumerate().take(k) {
            rem[i] -= &(&uk * c);
        }
        rem[k] = ComplexMatrix::zeros(poly.p());
        u[k] = uk;
    }
    Ok(u)
}

/// `{P, Q} = Σ_k U_k V_k*` over the common expansion range.
pub fn form(pp: &MatrixPoly, qq: &MatrixPoly, basis: &OrthoBasis) -> Result<ComplexMatrix> {
    let u = expand(pp, basis)?;
    let v = expand(qq, basis)?;
    let mut acc = ComplexMatrix::zeros(basis.p());
    for (a, b) in u.iter().zip(&v) {
        acc += &ComplexMatrix::mul_adjoint(a, b);
    }
    Ok(acc)
}
