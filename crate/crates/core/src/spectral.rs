//! Kernel sums `K_n(z) = Σ_{k<=n} D_k(z)* D_k(z)`, estimation of the limit
//! `H(z) = lim K_n(z)^{-1}` and its rank, deficiency indices and the
//! determinacy class, growth diagnostics, and block Gauss quadrature.

use crate::error::{Error, Result};
use crate::jacobi::BlockJacobiMatrix;
use crate::matkernel::{c, spectral_norm, ComplexMatrix, HermitianMatrix, C64};
use crate::measures::StepMeasure;
use crate::polys::{check_nonsingular, Recurrence, Stepper};
use crate::series::{Ladder, SeriesParams};

/// Relative eigenvalue gap below which quadrature nodes are merged.
pub const NODE_MERGE_TOL: f64 = 1e-9;

/// Heuristics for deciding whether an eigen-direction of `K_n(z)` stays bounded.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierParams {
    pub n_max: usize,
    /// A direction is convergent if `λ(K_n) / λ(K_{n/2}) < growth_factor`.
    pub growth_factor: f64,
    /// and divergent if that ratio is at least `divergence_ratio`; ratios in
    /// between leave the estimate indecisive.
    pub divergence_ratio: f64,
    /// Eigenvalues at or above `cap` count as divergent; accumulation stops there.
    pub cap: f64,
    pub samples: Vec<C64>,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            n_max: 200,
            growth_factor: 1.5,
            divergence_ratio: 2.0,
            cap: 1e12,
            samples: default_samples(),
        }
    }
}

impl ClassifierParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::invalid("classifier n_max must be >= 2"));
        }
        if !(self.growth_factor > 1.0 && self.divergence_ratio >= self.growth_factor) {
            return Err(Error::invalid("need 1 < growth_factor <= divergence_ratio"));
        }
        if !(self.cap > 1.0 && self.cap.is_finite()) {
            return Err(Error::invalid("cap must be a finite number > 1"));
        }
        Ok(())
    }
}

/// Five points in each open half-plane, the lower ones mirrored.
pub fn default_samples() -> Vec<C64> {
    let upper = [c(0.0, 1.0), c(0.0, 2.0), c(1.0, 1.0), c(3.0, 2.0), c(-2.0, 0.5)];
    upper.iter().copied().chain(upper.iter().map(|z| z.conj())).collect()
}

/// `K_n(z)` with first polynomial `D_0`.
pub fn kernel_partial_with(j: &BlockJacobiMatrix, d0: &ComplexMatrix, z: C64, n: usize) -> Result<HermitianMatrix> {
    check_nonsingular(d0, "D_0")?;
    let rec = Recurrence::new(j, n)?;
    let mut acc = ComplexMatrix::zeros(j.p());
    rec.first_kind(d0, z, n, |_, d| ComplexMatrix::add_adjoint_mul(&mut acc, d, d));
    Ok(acc.hermitian_part())
}

/// `K_n(z)` with `D_0 = I`. Real `z` is allowed.
pub fn kernel_partial(j: &BlockJacobiMatrix, z: C64, n: usize) -> Result<HermitianMatrix> {
    kernel_partial_with(j, &ComplexMatrix::identity(j.p()), z, n)
}

/// `K_∞(z)` summed with extrapolation; meaningful only where the series
/// converges (completely indeterminate case).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelLimit {
    pub value: HermitianMatrix,
    pub n_used: usize,
    pub tail_norm: f64,
    pub converged: bool,
}

pub(crate) fn matrix_from_slice(p: usize, v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(p, |r, col| v[r * p + col])
}

pub(crate) fn kernel_limit_rec(rec: &Recurrence, d0: &ComplexMatrix, z: C64, params: &SeriesParams) -> Result<KernelLimit> {
    let p = rec.p();
    let mut ladder = Ladder::new(params)?;
    if rec.len() < ladder.last_checkpoint() {
        return Err(Error::OutOfRange { requested: ladder.last_checkpoint(), available: rec.len() });
    }
    let (x0, x1) = rec.first_kind_start(d0, z);
    let mut st = Stepper::new(rec, z, x0, x1);
    let mut acc = ComplexMatrix::zeros(p);
    ComplexMatrix::add_adjoint_mul(&mut acc, st.current(), st.current());
    loop {
        st.advance();
        ComplexMatrix::add_adjoint_mul(&mut acc, st.current(), st.current());
        if st.index() == ladder.next_checkpoint() {
            if !acc.is_finite() {
                return Err(Error::NumericalFailure(format!("kernel series overflowed at z = {z}")));
            }
            if let Some(s) = ladder.record(acc.as_slice()) {
                return Ok(KernelLimit {
                    value: matrix_from_slice(p, &s.values).hermitian_part(),
                    n_used: s.n_used,
                    tail_norm: s.tail_norm,
                    converged: s.converged,
                });
            }
        }
    }
}

pub fn kernel_limit(j: &BlockJacobiMatrix, d0: &ComplexMatrix, z: C64, params: &SeriesParams) -> Result<KernelLimit> {
    check_nonsingular(d0, "D_0")?;
    let rec = Recurrence::new(j, params.terms())?;
    kernel_limit_rec(&rec, d0, z, params)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSummary {
    pub z: C64,
    pub n_used: usize,
    pub k_n: HermitianMatrix,
    /// `(n, ascending eigenvalues of K_n)` at n = 1, 2, 4, ... and the last n.
    pub eigen_trajectories: Vec<(usize, Vec<f64>)>,
    /// `λ_i(K_n) / λ_i(K_{n'})` with n' the last sample at or below n/2.
    pub ratios: Vec<f64>,
    pub converged_dirs: usize,
    pub diverged_dirs: usize,
    pub decisive: bool,
    /// Inverse of `K_n` on the convergent eigen-directions, zero elsewhere.
    pub h: HermitianMatrix,
}

impl KernelSummary {
    pub fn rank(&self) -> usize {
        self.converged_dirs
    }
}

pub fn estimate_h(j: &BlockJacobiMatrix, z: C64, params: &ClassifierParams) -> Result<KernelSummary> {
    params.validate()?;
    if !(z.im != 0.0) || !z.is_finite() {
        return Err(Error::HalfPlane { z, requirement: "Im z must be nonzero" });
    }
    let p = j.p();
    let n_max = match j.max_degree() {
        Some(m) if m < params.n_max => {
            return Err(Error::OutOfRange { requested: params.n_max, available: m });
        }
        _ => params.n_max,
    };
    let rec = Recurrence::new(j, n_max)?;
    let (x0, x1) = rec.first_kind_start(&ComplexMatrix::identity(p), z);
    let mut st = Stepper::new(&rec, z, x0, x1);
    let mut acc = ComplexMatrix::zeros(p);
    ComplexMatrix::add_adjoint_mul(&mut acc, st.current(), st.current());
    let mut traj: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut next_sample = 1;
    let mut n_used = 0;
    while st.index() < n_max {
        st.advance();
        let k = st.index();
        ComplexMatrix::add_adjoint_mul(&mut acc, st.current(), st.current());
        // trace bounds the top eigenvalue of a PSD matrix within a factor p
        let capped = !(acc.trace().re < params.cap);
        if k == next_sample || k == n_max || capped {
            if !acc.is_finite() {
                return Err(Error::NumericalFailure(format!("kernel sum overflowed at step {k}")));
            }
            traj.push((k, acc.hermitian_part().eigenvalues()));
            if k == next_sample {
                next_sample *= 2;
            }
        }
        n_used = k;
        if capped {
            break;
        }
    }
    let k_n = acc.hermitian_part();
    let eig = k_n.eigh();
    let last = &traj.last().expect("n_max >= 2").1;
    let half = traj
        .iter()
        .rev()
        .find(|(n, _)| 2 * n <= n_used)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| vec![1.0; p]);
    let mut ratios = Vec::with_capacity(p);
    let (mut conv, mut div) = (0, 0);
    let mut keep = vec![false; p];
    for i in 0..p {
        let r = last[i] / half[i];
        ratios.push(r);
        if last[i] >= params.cap || r >= params.divergence_ratio {
            div += 1;
        } else if r < params.growth_factor {
            conv += 1;
            keep[i] = true;
        }
    }
    let mut h = ComplexMatrix::zeros(p);
    for i in 0..p {
        if keep[i] {
            let v = ComplexMatrix::from_fn(p, |r, col| if col == 0 { eig.vectors[(r, i)] } else { c(0.0, 0.0) });
            h += &ComplexMatrix::mul_adjoint(&v, &v).scale_real(1.0 / eig.values[i]);
        }
    }
    Ok(KernelSummary {
        z,
        n_used,
        k_n,
        eigen_trajectories: traj,
        ratios,
        converged_dirs: conv,
        diverged_dirs: div,
        decisive: conv + div == p,
        h: h.hermitian_part(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRank {
    pub z: C64,
    pub rank: usize,
    pub decisive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyReport {
    pub p: usize,
    pub nu_plus: usize,
    pub nu_minus: usize,
    pub samples_upper: Vec<SampleRank>,
    pub samples_lower: Vec<SampleRank>,
    pub decisive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminacyClass {
    Determinate,
    Indeterminate { nu_plus: usize, nu_minus: usize },
    CompletelyIndeterminate,
}

impl std::fmt::Display for DeterminacyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeterminacyClass::Determinate => write!(f, "Determinate"),
            DeterminacyClass::Indeterminate { nu_plus, nu_minus } => {
                write!(f, "Indeterminate({nu_plus},{nu_minus})")
            }
            DeterminacyClass::CompletelyIndeterminate => write!(f, "CompletelyIndeterminate"),
        }
    }
}

impl DeficiencyReport {
    pub fn class(&self) -> Result<DeterminacyClass> {
        if !self.decisive {
            let show = |v: &[SampleRank]| {
                v.iter()
                    .map(|s| format!("{}{:+}i:{}{}", s.z.re, s.z.im, s.rank, if s.decisive { "" } else { "?" }))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Err(Error::ClassificationUnavailable(format!(
                "ranks upper [{}] lower [{}]",
                show(&self.samples_upper),
                show(&self.samples_lower)
            )));
        }
        Ok(if self.nu_plus == 0 || self.nu_minus == 0 {
            DeterminacyClass::Determinate
        } else if self.nu_plus == self.p && self.nu_minus == self.p {
            DeterminacyClass::CompletelyIndeterminate
        } else {
            DeterminacyClass::Indeterminate { nu_plus: self.nu_plus, nu_minus: self.nu_minus }
        })
    }
}

fn common_rank(s: &[SampleRank]) -> (usize, bool) {
    let first = s[0].rank;
    let agree = s.iter().all(|x| x.decisive && x.rank == first);
    // report the most frequent rank (smallest on ties) when they disagree
    let mut best = (0usize, first);
    for r in s.iter().map(|x| x.rank) {
        let count = s.iter().filter(|x| x.rank == r).count();
        if count > best.0 || (count == best.0 && r < best.1) {
            best = (count, r);
        }
    }
    (best.1, agree)
}

pub fn deficiency_indices(j: &BlockJacobiMatrix, params: &ClassifierParams) -> Result<DeficiencyReport> {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &z in &params.samples {
        if !(z.im != 0.0) {
            return Err(Error::HalfPlane { z, requirement: "sample points must be off the real axis" });
        }
    }
    let n_up = params.samples.iter().filter(|z| z.im > 0.0).count();
    if n_up < 3 || params.samples.len() - n_up < 3 {
        return Err(Error::invalid("need at least 3 sample points in each half-plane"));
    }
    for &z in &params.samples {
        let s = estimate_h(j, z, params)?;
        let entry = SampleRank { z, rank: s.rank(), decisive: s.decisive };
        if z.im > 0.0 {
            upper.push(entry);
        } else {
            lower.push(entry);
        }
    }
    let (nu_plus, ok_up) = common_rank(&upper);
    let (nu_minus, ok_low) = common_rank(&lower);
    Ok(DeficiencyReport {
        p: j.p(),
        nu_plus,
        nu_minus,
        samples_upper: upper,
        samples_lower: lower,
        decisive: ok_up && ok_low,
    })
}

pub fn classify(j: &BlockJacobiMatrix, params: &ClassifierParams) -> Result<DeterminacyClass> {
    deficiency_indices(j, params)?.class()
}

/// Fails with a refusal unless `J` classifies as completely indeterminate.
pub fn require_completely_indeterminate(j: &BlockJacobiMatrix, params: &ClassifierParams) -> Result<()> {
    match classify(j, params) {
        Ok(DeterminacyClass::CompletelyIndeterminate) => Ok(()),
        Ok(other) => Err(Error::NotCompletelyIndeterminate(format!("classified as {other}"))),
        Err(Error::ClassificationUnavailable(msg)) => {
            Err(Error::NotCompletelyIndeterminate(format!("classification unavailable: {msg}")))
        }
        Err(e) => Err(e),
    }
}

/// Eight unit directions `e^{iπk/4}`.
pub fn default_directions() -> Vec<C64> {
    (0..8).map(|k| C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64)).collect()
}

/// Rows `(r, max_dir ln ‖K_∞(r·dir)‖ / r)`.
pub fn growth_diagnostic(
    j: &BlockJacobiMatrix,
    radii: &[f64],
    directions: &[C64],
    classifier: &ClassifierParams,
    series: &SeriesParams,
) -> Result<Vec<(f64, f64)>> {
    require_completely_indeterminate(j, classifier)?;
    growth_table(j, radii, directions, series)
}

pub(crate) fn growth_table(
    j: &BlockJacobiMatrix,
    radii: &[f64],
    directions: &[C64],
    series: &SeriesParams,
) -> Result<Vec<(f64, f64)>> {
    let rec = Recurrence::new(j, series.terms())?;
    let d0 = ComplexMatrix::identity(j.p());
    growth_rows(radii, directions, |z| Ok(kernel_limit_rec(&rec, &d0, z, series)?.value))
}

/// Shared table builder over any `K_∞` evaluator.
pub(crate) fn growth_rows(
    radii: &[f64],
    directions: &[C64],
    kernel: impl Fn(C64) -> Result<HermitianMatrix>,
) -> Result<Vec<(f64, f64)>> {
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("radii must be positive and finite"));
    }
    if directions.iter().any(|d| !(d.norm() > 0.0 && d.is_finite())) {
        return Err(Error::invalid("directions must be nonzero and finite"));
    }
    if directions.is_empty() && !radii.is_empty() {
        return Err(Error::invalid("need at least one direction"));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut best = f64::NEG_INFINITY;
        for dir in directions {
            let k = kernel(dir.scale(r / dir.norm()))?;
            best = best.max(spectral_norm(k.as_matrix())?.ln() / r);
        }
        rows.push((r, best));
    }
    Ok(rows)
}

/// Block Gauss quadrature of the `n`-block truncation with `D_0 = I`.
pub fn gauss_quadrature(j: &BlockJacobiMatrix, n: usize) -> Result<StepMeasure> {
    gauss_quadrature_with(j, n, &ComplexMatrix::identity(j.p()))
}

/// Quadrature for the moments `D_0^{-1} (J^k)_{00} D_0^{-*}`.
pub fn gauss_quadrature_with(j: &BlockJacobiMatrix, n: usize, d0: &ComplexMatrix) -> Result<StepMeasure> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs N >= 1"));
    }
    check_nonsingular(d0, "D_0")?;
    let p = j.p();
    let t = j.truncate(n)?;
    let eig = t.eigh();
    let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let merge = NODE_MERGE_TOL * scale;
    let dim = n * p;
    // clusters of eigenvalue indices
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        match clusters.last_mut() {
            Some(cl) if eig.values[i] - eig.values[*cl.last().expect("nonempty")] <= merge => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let rec = Recurrence::new(j, n - 1)?;
    let d0_inv = d0.inverse()?;
    let mut nodes = Vec::with_capacity(clusters.len());
    let mut weights = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        let lam = cl.iter().map(|&i| eig.values[i]).sum::<f64>() / cl.len() as f64;
        let w = cluster_weight(&rec, &eig.vectors, cl, lam, p)
            .unwrap_or_else(|| first_block_gram(&eig.vectors, cl, p));
        nodes.push(lam);
        weights.push(ComplexMatrix::mul_adjoint(&(&d0_inv * &w), &d0_inv).hermitian_part());
    }
    StepMeasure::new(p, nodes, weights)
}

/// `Σ b b*` over the cluster, b the first p components of each eigenvector.
fn first_block_gram(vectors: &ComplexMatrix, cl: &[usize], p: usize) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(p);
    for &i in cl {
        let b = ComplexMatrix::from_fn(p, |r, col| if col == 0 { vectors[(r, i)] } else { c(0.0, 0.0) });
        w += &ComplexMatrix::mul_adjoint(&b, &b);
    }
    w
}

/// Eigenvectors at λ have the form `[D_k(λ) C]_k` (D_0 = I), so the first
/// block equals C. Fitting C by least squares over every block keeps relative
/// accuracy for nodes whose eigenvector is tiny in its first block; the
/// weight is then `C C*` because the eigenvectors are orthonormal.
fn cluster_weight(rec: &Recurrence, vectors: &ComplexMatrix, cl: &[usize], lam: f64, p: usize) -> Option<ComplexMatrix> {
    if cl.len() > p {
        return None;
    }
    let n = rec.len() + 1;
    let mut k_mat = ComplexMatrix::zeros(p);
    let mut rhs = ComplexMatrix::zeros(p);
    let id = ComplexMatrix::identity(p);
    rec.first_kind(&id, c(lam, 0.0), n - 1, |k, d| {
        ComplexMatrix::add_adjoint_mul(&mut k_mat, d, d);
        // block k of the cluster's eigenvectors, padded to p columns
        let vk = ComplexMatrix::from_fn(p, |r, col| {
            if col < cl.len() {
                vectors[(k * p + r, cl[col])]
            } else {
                c(0.0, 0.0)
            }
        });
        ComplexMatrix::add_adjoint_mul(&mut rhs, d, &vk);
    });
    // columns of [D_k(λ)] can differ by many orders of magnitude, e.g. for
    // direct sums of determinate and indeterminate parts
    let inv = k_mat.hermitian_part().inverse_pd_scaled().ok()?.into_matrix();
    let cc = &inv * &rhs;
    let w = ComplexMatrix::mul_adjoint(&cc, &cc);
    w.is_finite().then_some(w)
}
