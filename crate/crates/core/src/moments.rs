//! Power moments `S_n = {λ^n I, I}` of a Jacobi matrix, block Hankel
//! positivity, and the inverse map from moments back to a Jacobi matrix.

use crate::error::{Error, Result};
use crate::jacobi::BlockJacobiMatrix;
use crate::matkernel::{hermitian_inv_sqrt, ComplexMatrix, HermitianMatrix, HERMITIAN_TOL, PD_TOL};
use crate::measures::StepMeasure;
use crate::polys::{expand, generate_first_kind, MatrixPoly};

/// Relative floor for the smallest eigenvalue of a Hankel section.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    p: usize,
    s: Vec<HermitianMatrix>,
}

impl MomentSequence {
    pub fn new(p: usize, s: Vec<HermitianMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("block dimension p must be >= 1"));
        }
        if s.is_empty() {
            return Err(Error::invalid("moment sequence needs at least S_0"));
        }
        for (i, m) in s.iter().enumerate() {
            if m.dim() != p {
                return Err(Error::invalid(format!("moment S_{i} is not {p}x{p}")));
            }
            if !m.as_matrix().is_finite() {
                return Err(Error::invalid(format!("moment S_{i} has non-finite entries")));
            }
        }
        Ok(MomentSequence { p, s })
    }

    /// Like `new` but takes general matrices and checks they are Hermitian.
    pub fn from_matrices(p: usize, s: Vec<ComplexMatrix>) -> Result<Self> {
        let mut out = Vec::with_capacity(s.len());
        for (i, m) in s.into_iter().enumerate() {
            let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
            if m.dim() == p && !m.is_hermitian(tol) {
                return Err(Error::invalid(format!("moment S_{i} is not Hermitian")));
            }
            out.push(m.hermitian_part());
        }
        Self::new(p, out)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn moments(&self) -> &[HermitianMatrix] {
        &self.s
    }

    pub fn get(&self, n: usize) -> &HermitianMatrix {
        &self.s[n]
    }

    /// Highest moment index m.
    pub fn max_index(&self) -> usize {
        self.s.len() - 1
    }

    /// The Hankel pairing `⟨P, Q⟩ = Σ_{j,k} P_j S_{j+k} Q_k*`.
    pub fn pairing(&self, pp: &MatrixPoly, qq: &MatrixPoly) -> Result<ComplexMatrix> {
        let (dp, dq) = (pp.coeffs().len(), qq.coeffs().len());
        if dp + dq >= 2 && dp + dq - 2 > self.max_index() {
            return Err(Error::OutOfRange { requested: dp + dq - 2, available: self.max_index() });
        }
        let mut acc = ComplexMatrix::zeros(self.p);
        for (j, a) in pp.coeffs().iter().enumerate() {
            for (k, b) in qq.coeffs().iter().enumerate() {
                let t = a * self.s[j + k].as_matrix();
                acc += &ComplexMatrix::mul_adjoint(&t, b);
            }
        }
        Ok(acc)
    }

    /// The block Hankel section `[S_{j+k}]_{j,k=0..n}`.
    pub fn hankel_section(&self, n: usize) -> Result<HermitianMatrix> {
        if 2 * n > self.max_index() {
            return Err(Error::OutOfRange { requested: 2 * n, available: self.max_index() });
        }
        let p = self.p;
        let mut h = ComplexMatrix::zeros((n + 1) * p);
        for j in 0..=n {
            for k in 0..=n {
                h.set_block(j * p, k * p, self.s[j + k].as_matrix());
            }
        }
        Ok(h.hermitian_part())
    }
}

/// `S_0..S_{n_max}` of `J` with first polynomial `D_0`. Shift symmetry
/// gives `S_n = {λ^j I, λ^{n-j} I}` with `j = ceil(n/2)`, so the basis only
/// has to reach degree `ceil(n_max/2)`.
pub fn moments_from_jacobi(j: &BlockJacobiMatrix, d0: &ComplexMatrix, n_max: usize) -> Result<MomentSequence> {
    let p = j.p();
    let half = n_max.div_ceil(2);
    let basis = generate_first_kind(j, half, d0)?;
    let powers: Vec<Vec<ComplexMatrix>> = (0..=half)
        .map(|k| expand(&MatrixPoly::monomial(k, ComplexMatrix::identity(p)), &basis))
        .collect::<Result<_>>()?;
    let mut s = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let hi = n.div_ceil(2);
        let mut acc = ComplexMatrix::zeros(p);
        for (u, v) in powers[hi].iter().zip(&powers[n - hi]) {
            acc += &ComplexMatrix::mul_adjoint(u, v);
        }
        s.push(acc.hermitian_part());
    }
    MomentSequence::new(p, s)
}

/// Independent route: the (0,0) block of `truncate(J, n+1)^n`. Exact for
/// `D_0 = I` since no length-n walk from block 0 leaves the first n+1 blocks.
pub fn moments_oracle(j: &BlockJacobiMatrix, n: usize) -> Result<HermitianMatrix> {
    let p = j.p();
    let t = j.truncate(n + 1)?.into_matrix();
    let mut pw = ComplexMatrix::identity(t.dim());
    let mut tmp = ComplexMatrix::zeros(t.dim());
    for _ in 0..n {
        ComplexMatrix::mul_into(&mut tmp, &pw, &t);
        std::mem::swap(&mut pw, &mut tmp);
    }
    Ok(pw.block(0, 0, p).hermitian_part())
}

/// Outcome of the block Hankel positivity test.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityVerdict {
    pub positive: bool,
    /// First section size n (and its smallest eigenvalue) that failed.
    pub witness: Option<(usize, f64)>,
    /// Largest n with `2n <= m` that was examined.
    pub checked_up_to: usize,
    /// Set when the last moment index is odd and `S_m` was not used.
    pub odd_tail_ignored: bool,
    /// Smallest eigenvalue of each examined section.
    pub min_eigenvalues: Vec<f64>,
}

pub fn hankel_positive(s: &MomentSequence) -> PositivityVerdict {
    let m = s.max_index();
    let top = m / 2;
    let mut mins = Vec::with_capacity(top + 1);
    let mut witness = None;
    for n in 0..=top {
        let ev = s.hankel_section(n).expect("2n <= m").eigenvalues();
        let lo = ev[0];
        let hi = ev[ev.len() - 1];
        mins.push(lo);
        if !(lo > PSD_TOL * hi.abs()) || hi <= 0.0 {
            witness = Some((n, lo));
            break;
        }
    }
    PositivityVerdict {
        positive: witness.is_none(),
        witness,
        checked_up_to: top,
        odd_tail_ignored: m % 2 == 1,
        min_eigenvalues: mins,
    }
}

/// Block Lanczos in the Hankel pairing. From `S_0..S_{2n}` returns the
/// n-block Jacobi matrix (n diagonal and n off-diagonal blocks, off-diagonal
/// blocks Hermitian positive definite) and `D_0 = S_0^{-1/2}`.
pub fn jacobi_from_moments(s: &MomentSequence) -> Result<(BlockJacobiMatrix, ComplexMatrix)> {
    let m = s.max_index();
    if m % 2 == 1 || m == 0 {
        return Err(Error::invalid(format!(
            "inverse problem needs S_0..S_2n with n >= 1, got last index {m}"
        )));
    }
    let verdict = hankel_positive(s);
    if let Some((n, lo)) = verdict.witness {
        return Err(Error::invalid(format!(
            "moments fail block Hankel positivity at section {n} (min eigenvalue {lo:e})"
        )));
    }
    let p = s.p();
    let n = m / 2;
    let d0 = hermitian_inv_sqrt(s.get(0))?.into_matrix();
    let mut diag = Vec::with_capacity(n);
    let mut offdiag: Vec<ComplexMatrix> = Vec::with_capacity(n);
    let mut prev: Option<MatrixPoly> = None;
    let mut cur = MatrixPoly::constant(d0.clone());
    for k in 0..n {
        let lam = cur.times_lambda();
        let a = s.pairing(&lam, &cur)?.hermitian_part().into_matrix();
        let mut r = lam.sub(&cur.left_mul(&a));
        if let Some(pv) = &prev {
            r = r.sub(&pv.left_mul(&offdiag[k - 1].adjoint()));
        }
        let g = s.pairing(&r, &r)?.hermitian_part();
        let ev = g.eigenvalues();
        let (lo, hi) = (ev[0], ev[p - 1]);
        if !(hi > 0.0 && lo > PD_TOL * hi) {
            return Err(Error::IllConditioned { step: k, min_eigenvalue: lo });
        }
        let b = g.sqrt_pd()?;
        let b_inv = g.inv_sqrt()?;
        diag.push(a);
        offdiag.push(b.into_matrix());
        prev = Some(cur);
        cur = r.left_mul(b_inv.as_matrix());
    }
    Ok((BlockJacobiMatrix::new(p, diag, offdiag)?, d0))
}

/// `S_0..S_{n_max}` of a step measure.
pub fn moments_of_measure(t: &StepMeasure, n_max: usize) -> MomentSequence {
    MomentSequence::new(t.p(), t.power_moments(n_max)).expect("measure moments are well-formed")
}
