//! Regular block Jacobi (J_p) matrices.
//!
//! An infinite Hermitian block-tridiagonal matrix with p x p blocks,
//! diagonal blocks `A_k = A_{k,k}` and nonsingular super-diagonal blocks
//! `B_k = A_{k,k+1}`; the sub-diagonal is implicit, `A_{k+1,k} = B_k*`.
//!
//! The infinite object is held as a finite stored prefix plus an optional
//! generator that produces block `k` on demand. Every algorithm downstream
//! asks for an explicit working length.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matkernel::{c, ComplexMatrix, HermitianMatrix, HERMITIAN_TOL};

/// Threshold for "nonsingular" off-diagonal blocks:
/// min singular value > REG_TOL * max(1, spectral norm).
pub const REG_TOL: f64 = 1e-10;

/// Number of blocks scanned by [`BlockJacobiMatrix::validate_regular`] past
/// the stored prefix when a generator is attached.
pub const GENERATOR_SCAN: usize = 64;

/// Produces `(A_k, B_k)` for block index k.
pub type BlockFn = dyn Fn(usize) -> (ComplexMatrix, ComplexMatrix) + Send + Sync;

#[derive(Clone)]
struct Generator {
    name: String,
    blocks: Arc<BlockFn>,
}

#[derive(Clone)]
pub struct BlockJacobiMatrix {
    p: usize,
    diag: Vec<ComplexMatrix>,
    offdiag: Vec<ComplexMatrix>,
    generator: Option<Generator>,
}

impl fmt::Debug for BlockJacobiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockJacobiMatrix")
            .field("p", &self.p)
            .field("stored_diag", &self.diag.len())
            .field("stored_offdiag", &self.offdiag.len())
            .field("generator", &self.generator.as_ref().map(|g| g.name.as_str()))
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NotHermitian,
    SingularOffdiag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub block: usize,
    pub kind: ViolationKind,
    /// Hermitian defect, or the relative smallest singular value.
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub ok: bool,
    pub first_violation: Option<Violation>,
}

fn check_block(p: usize, m: &ComplexMatrix, what: &str, k: usize) -> Result<()> {
    if m.dim() != p {
        return Err(Error::invalid(format!(
            "{what} block {k} is {}x{}, expected {p}x{p}",
            m.dim(),
            m.dim()
        )));
    }
    if !m.is_finite() {
        return Err(Error::invalid(format!("{what} block {k} has non-finite entries")));
    }
    Ok(())
}

/// Relative smallest singular value of an off-diagonal block, or `None` when
/// it clears [`REG_TOL`].
pub(crate) fn offdiag_defect(b: &ComplexMatrix) -> Option<f64> {
    let s = b.singular_values();
    let hi = s.first().copied().unwrap_or(0.0);
    let lo = s.last().copied().unwrap_or(0.0);
    let rel = lo / hi.max(1.0);
    if rel > REG_TOL {
        None
    } else {
        Some(rel)
    }
}

impl BlockJacobiMatrix {
    /// A finite matrix from its blocks. `offdiag` holds either N-1 blocks (a
    /// plain N-block section) or N blocks (the section together with the
    /// coupling to the next, unknown, block row).
    pub fn new(p: usize, diag: Vec<ComplexMatrix>, offdiag: Vec<ComplexMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("block dimension p must be >= 1"));
        }
        if diag.is_empty() {
            return Err(Error::invalid("at least one diagonal block is required"));
        }
        if offdiag.len() + 1 != diag.len() && offdiag.len() != diag.len() {
            return Err(Error::invalid(format!(
                "{} diagonal blocks need {} or {} off-diagonal blocks, got {}",
                diag.len(),
                diag.len() - 1,
                diag.len(),
                offdiag.len()
            )));
        }
        for (k, m) in diag.iter().enumerate() {
            check_block(p, m, "diagonal", k)?;
        }
        for (k, m) in offdiag.iter().enumerate() {
            check_block(p, m, "off-diagonal", k)?;
        }
        Ok(BlockJacobiMatrix { p, diag, offdiag, generator: None })
    }

    /// An infinite matrix: a stored prefix (equal numbers of diagonal and
    /// off-diagonal blocks, possibly none) continued by `blocks(k)`.
    pub fn with_generator(
        p: usize,
        diag: Vec<ComplexMatrix>,
        offdiag: Vec<ComplexMatrix>,
        name: impl Into<String>,
        blocks: Arc<BlockFn>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("block dimension p must be >= 1"));
        }
        if diag.len() != offdiag.len() {
            return Err(Error::invalid("a generated tail needs equal-length stored prefixes"));
        }
        for (k, m) in diag.iter().enumerate() {
            check_block(p, m, "diagonal", k)?;
        }
        for (k, m) in offdiag.iter().enumerate() {
            check_block(p, m, "off-diagonal", k)?;
        }
        let (a, b) = blocks(diag.len());
        check_block(p, &a, "generated diagonal", diag.len())?;
        check_block(p, &b, "generated off-diagonal", diag.len())?;
        Ok(BlockJacobiMatrix {
            p,
            diag,
            offdiag,
            generator: Some(Generator { name: name.into(), blocks }),
        })
    }

    /// Same generated tail, with the first blocks overridden by a stored
    /// prefix. Fails if the matrix has no generator.
    pub fn with_prefix(&self, diag: Vec<ComplexMatrix>, offdiag: Vec<ComplexMatrix>) -> Result<Self> {
        let g = self.generator.as_ref().ok_or_else(|| Error::invalid("matrix has no generated tail"))?;
        Self::with_generator(self.p, diag, offdiag, g.name.clone(), g.blocks.clone())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn generator_name(&self) -> Option<&str> {
        self.generator.as_ref().map(|g| g.name.as_str())
    }

    pub fn stored_diag(&self) -> &[ComplexMatrix] {
        &self.diag
    }

    pub fn stored_offdiag(&self) -> &[ComplexMatrix] {
        &self.offdiag
    }

    pub fn is_infinite(&self) -> bool {
        self.generator.is_some()
    }

    /// Number of available diagonal blocks (`None` when unbounded).
    pub fn block_len(&self) -> Option<usize> {
        if self.generator.is_some() {
            None
        } else {
            Some(self.diag.len())
        }
    }

    /// Highest k for which `D_k` can be generated (`None` when unbounded).
    pub fn max_degree(&self) -> Option<usize> {
        if self.generator.is_some() {
            None
        } else {
            Some(self.offdiag.len())
        }
    }

    /// A_{k,k}
    pub fn diag_block(&self, k: usize) -> Result<ComplexMatrix> {
        if let Some(m) = self.diag.get(k) {
            return Ok(m.clone());
        }
        match &self.generator {
            Some(g) => Ok((g.blocks)(k).0),
            None => Err(Error::OutOfRange { requested: k, available: self.diag.len() }),
        }
    }

    /// A_{k,k+1}
    pub fn offdiag_block(&self, k: usize) -> Result<ComplexMatrix> {
        if let Some(m) = self.offdiag.get(k) {
            return Ok(m.clone());
        }
        match &self.generator {
            Some(g) => Ok((g.blocks)(k).1),
            None => Err(Error::OutOfRange { requested: k, available: self.offdiag.len() }),
        }
    }

    /// Scans the stored blocks (and the first [`GENERATOR_SCAN`] generated
    /// ones) in the order A_0, B_0, A_1, B_1, ... and reports the first
    /// violation of the regularity invariants.
    pub fn validate_regular(&self) -> RegularityReport {
        let n = match &self.generator {
            Some(_) => self.diag.len().max(GENERATOR_SCAN),
            None => self.diag.len(),
        };
        for k in 0..n {
            // blocks inside the scan window always exist
            let a = self.diag_block(k).expect("diagonal block in range");
            let defect = a.hermitian_defect();
            if defect > HERMITIAN_TOL * (1.0 + a.max_abs()) {
                return RegularityReport {
                    ok: false,
                    first_violation: Some(Violation {
                        block: k,
                        kind: ViolationKind::NotHermitian,
                        magnitude: defect,
                    }),
                };
            }
            if let Ok(b) = self.offdiag_block(k) {
                if let Some(rel) = offdiag_defect(&b) {
                    return RegularityReport {
                        ok: false,
                        first_violation: Some(Violation {
                            block: k,
                            kind: ViolationKind::SingularOffdiag,
                            magnitude: rel,
                        }),
                    };
                }
            }
        }
        RegularityReport { ok: true, first_violation: None }
    }

    /// Hermitian pN x pN section built from the first N block rows.
    pub fn truncate(&self, n: usize) -> Result<HermitianMatrix> {
        if n == 0 {
            return Err(Error::invalid("truncation length must be >= 1"));
        }
        if let Some(len) = self.block_len() {
            if n > len {
                return Err(Error::OutOfRange { requested: n, available: len });
            }
        }
        let p = self.p;
        let mut m = ComplexMatrix::zeros(n * p);
        for k in 0..n {
            m.set_block(k * p, k * p, &self.diag_block(k)?.hermitian_part().into_matrix());
            if k + 1 < n {
                let b = self.offdiag_block(k)?;
                m.set_block(k * p, (k + 1) * p, &b);
                m.set_block((k + 1) * p, k * p, &b.adjoint());
            }
        }
        Ok(HermitianMatrix::new(m).expect("assembled section is Hermitian"))
    }

    /// Partitions a Hermitian band matrix of bandwidth p into p x p blocks.
    ///
    /// Requires `a[i][k] = 0` for `|i - k| > p` and `a[i][i+p] != 0`; the
    /// resulting off-diagonal blocks are lower triangular with diagonal
    /// `a[jp+r][(j+1)p+r]`.
    pub fn from_scalar_band(entries: &ComplexMatrix, p: usize) -> Result<Self> {
        let n = entries.dim();
        if p == 0 || !n.is_multiple_of(p) {
            return Err(Error::invalid(format!("size {n} is not a multiple of p = {p}")));
        }
        if !entries.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::invalid("band matrix is not Hermitian"));
        }
        for i in 0..n {
            for k in 0..n {
                if i.abs_diff(k) > p && entries[(i, k)].norm() != 0.0 {
                    return Err(Error::invalid(format!(
                        "entry ({i},{k}) lies outside the bandwidth {p}"
                    )));
                }
            }
            if i + p < n && entries[(i, i + p)].norm() == 0.0 {
                return Err(Error::invalid(format!(
                    "extreme diagonal entry ({i},{}) is zero",
                    i + p
                )));
            }
        }
        let blocks = n / p;
        let diag = (0..blocks).map(|j| entries.block(j * p, j * p, p)).collect();
        let offdiag = (0..blocks.saturating_sub(1))
            .map(|j| entries.block(j * p, (j + 1) * p, p))
            .collect();
        Self::new(p, diag, offdiag)
    }

    /// Canonical representative of the first `n` blocks under block-diagonal
    /// unitary conjugation with the first unitary fixed to I: every
    /// off-diagonal block is replaced by the positive definite factor of its
    /// polar decomposition.
    pub fn pd_normalized(&self, n: usize) -> Result<BlockJacobiMatrix> {
        let p = self.p;
        let mut w = ComplexMatrix::identity(p);
        let mut diag = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.diag_block(k)?;
            diag.push(ComplexMatrix::mul_adjoint(&(&w * &a), &w));
            if let Ok(b) = self.offdiag_block(k) {
                let m = &w * &b;
                let pos = ComplexMatrix::mul_adjoint(&m, &m).hermitian_part().sqrt_pd()?;
                w = &pos.inverse_pd()?.into_matrix() * &m;
                offdiag.push(pos.into_matrix());
            }
        }
        if offdiag.len() > n {
            offdiag.truncate(n);
        }
        BlockJacobiMatrix::new(p, diag, offdiag)
    }
}

/// Named fixtures used throughout the tests, the CLI and the demo.
pub mod fixtures {
    use super::*;

    /// CH: p = 1, A_k = 0, B_k = 1/2. Determinate.
    pub fn chebyshev() -> BlockJacobiMatrix {
        BlockJacobiMatrix::with_generator(
            1,
            vec![],
            vec![],
            "CH",
            Arc::new(|_| (ComplexMatrix::zeros(1), ComplexMatrix::scalar(1, c(0.5, 0.0)))),
        )
        .expect("fixture is well-formed")
    }

    /// IND: p = 1, A_k = 0, B_k = (k+1)^2. Completely indeterminate.
    pub fn indeterminate() -> BlockJacobiMatrix {
        BlockJacobiMatrix::with_generator(
            1,
            vec![],
            vec![],
            "IND",
            Arc::new(|k| {
                let a = (k as f64 + 1.0).powi(2);
                (ComplexMatrix::zeros(1), ComplexMatrix::scalar(1, c(a, 0.0)))
            }),
        )
        .expect("fixture is well-formed")
    }

    /// DS: p = 2, A_k = 0, B_k = diag(1/2, (k+1)^2); CH and IND interleaved.
    pub fn direct_sum() -> BlockJacobiMatrix {
        BlockJacobiMatrix::with_generator(
            2,
            vec![],
            vec![],
            "DS",
            Arc::new(|k| {
                let a = (k as f64 + 1.0).powi(2);
                (ComplexMatrix::zeros(2), ComplexMatrix::diag_real(&[0.5, a]))
            }),
        )
        .expect("fixture is well-formed")
    }

    pub fn by_name(name: &str) -> Option<BlockJacobiMatrix> {
        match name {
            "CH" => Some(chebyshev()),
            "IND" => Some(indeterminate()),
            "DS" => Some(direct_sum()),
            _ => None,
        }
    }
}
