//! Second-kind polynomials, the entire matrix functions `F1, F2, G1, G2` of a
//! completely indeterminate problem, Stieltjes transforms of its extremal and
//! parametrized solutions, and spectra of the self-adjoint extensions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jacobi::BlockJacobiMatrix;
use crate::matkernel::{c, spectral_norm, ComplexMatrix, HermitianMatrix, C64};
use crate::moments::moments_from_jacobi;
use crate::polys::{MatrixPoly, OrthoBasis, Recurrence, Stepper};
use crate::series::{Ladder, SeriesParams, SeriesSum};
use crate::spectral::{
    growth_rows, kernel_limit_rec, kernel_partial, matrix_from_slice, require_completely_indeterminate,
    ClassifierParams, KernelLimit,
};

/// Slack allowed on `‖V‖ <= 1` and on `U*U = I`.
pub const CONTRACTION_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
/// Default root scan resolution and acceptance ratio.
pub const DEFAULT_GRID: usize = 2000;
pub const ROOT_TOL: f64 = 1e-9;

/// `E_0..E_n` alongside the first-kind basis.
#[derive(Clone, Debug)]
pub struct SecondKindBasis {
    pub basis: OrthoBasis,
    pub epolys: Vec<MatrixPoly>,
}

/// `E_k(z) = {(D_k(λ) − D_k(z))/(λ − z), I}`. With `D_k = Σ_j C_j λ^j` this is
/// `Σ_j Σ_{i<j} C_j S_i z^{j−1−i}`.
pub fn second_kind(basis: &OrthoBasis, n: usize) -> Result<SecondKindBasis> {
    if n > basis.max_degree() {
        return Err(Error::OutOfRange { requested: n, available: basis.max_degree() });
    }
    let p = basis.p();
    let s = if n >= 1 { Some(moments_from_jacobi(basis.jacobi(), basis.d0(), n - 1)?) } else { None };
    let mut epolys = Vec::with_capacity(n + 1);
    epolys.push(MatrixPoly::zero(p));
    for k in 1..=n {
        let s = s.as_ref().expect("n >= 1");
        let dk = basis.poly(k);
        let mut coeffs = vec![ComplexMatrix::zeros(p); k];
        for (j, cj) in dk.coeffs().iter().enumerate().skip(1) {
            for i in 0..j {
                coeffs[j - 1 - i] += &(cj * s.get(i).as_matrix());
            }
        }
        epolys.push(MatrixPoly::new(p, coeffs)?);
    }
    Ok(SecondKindBasis { basis: basis.clone(), epolys })
}

/// `K_n(ξ)^{-1}`: an upper bound for the jump of any solution at real ξ.
pub fn jump_bound(j: &BlockJacobiMatrix, xi: f64, n: usize) -> Result<HermitianMatrix> {
    if !xi.is_finite() {
        return Err(Error::invalid("xi must be finite"));
    }
    kernel_partial(j, c(xi, 0.0), n)?
        .inverse_pd_scaled()
        .map_err(|e| Error::NumericalFailure(format!("kernel at xi = {xi} not invertible: {e}")))
}

/// `V(z)` in the parametrization: a constant contraction or a caller-supplied
/// function. Holomorphy of a sampler cannot be checked pointwise and is the
/// caller's responsibility; only `‖V(z)‖ <= 1` is verified at each use.
#[derive(Clone)]
pub enum ContractionParam {
    Constant(ComplexMatrix),
    Sampler(Arc<dyn Fn(C64) -> ComplexMatrix + Send + Sync>),
}

impl std::fmt::Debug for ContractionParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContractionParam::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            ContractionParam::Sampler(_) => f.write_str("Sampler(..)"),
        }
    }
}

impl ContractionParam {
    pub fn at(&self, z: C64) -> ComplexMatrix {
        match self {
            ContractionParam::Constant(v) => v.clone(),
            ContractionParam::Sampler(f) => f(z),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuartetValue {
    pub z: C64,
    pub f1: ComplexMatrix,
    pub f2: ComplexMatrix,
    pub g1: ComplexMatrix,
    pub g2: ComplexMatrix,
    pub n_used: usize,
    pub tail_norm: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionRoot {
    pub lambda: f64,
    /// Smallest singular value of the bracket at the root over its largest
    /// singular value at the neighbouring grid points.
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelParams {
    pub series: SeriesParams,
    pub classifier: ClassifierParams,
}

/// A completely indeterminate Jacobi matrix (`D_0 = I`) with the values
/// `D_k(0)`, `E_k(0)` cached for the series.
#[derive(Clone, Debug)]
pub struct IndeterminateModel {
    p: usize,
    rec: Recurrence,
    d_at0: Vec<ComplexMatrix>,
    e_at0: Vec<ComplexMatrix>,
    series: SeriesParams,
}

impl IndeterminateModel {
    /// Classifies `j` first and refuses unless it is completely indeterminate.
    pub fn new(j: &BlockJacobiMatrix, params: &ModelParams) -> Result<Self> {
        params.series.validate()?;
        require_completely_indeterminate(j, &params.classifier)?;
        let n = params.series.terms();
        let rec = Recurrence::new(j, n)?;
        let p = j.p();
        let id = ComplexMatrix::identity(p);
        let mut d_at0 = Vec::with_capacity(n + 1);
        rec.first_kind(&id, c(0.0, 0.0), n, |_, d| d_at0.push(d.clone()));
        let mut e_at0 = Vec::with_capacity(n + 1);
        rec.second_kind(&id, c(0.0, 0.0), n, |_, e| e_at0.push(e.clone()));
        Ok(IndeterminateModel { p, rec, d_at0, e_at0, series: params.series })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn series_params(&self) -> &SeriesParams {
        &self.series
    }

    /// Sums the lockstep series fed by `step`, which receives the index k and
    /// adds the k-th terms into the flat accumulator.
    fn sum(&self, width: usize, mut step: impl FnMut(usize, &mut [C64])) -> Result<SeriesSum> {
        let mut ladder = Ladder::new(&self.series)?;
        let mut acc = vec![c(0.0, 0.0); width];
        step(0, &mut acc);
        let mut k = 0;
        loop {
            k += 1;
            step(k, &mut acc);
            if k == ladder.next_checkpoint() {
                if acc.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NumericalFailure(format!("series overflowed after {k} terms")));
                }
                if let Some(s) = ladder.record(&acc) {
                    return Ok(s);
                }
            }
        }
    }

    fn stepper_d(&self, w: C64) -> Stepper<'_> {
        let (x0, x1) = self.rec.first_kind_start(&ComplexMatrix::identity(self.p), w);
        Stepper::new(&self.rec, w, x0, x1)
    }

    fn stepper_e(&self, w: C64) -> Stepper<'_> {
        let (x0, x1) = self.rec.second_kind_start(&ComplexMatrix::identity(self.p));
        Stepper::new(&self.rec, w, x0, x1)
    }

    /// `F1 = I + z Σ_{k≥1} E_k*(z) D_k(0)`, `F2 = z Σ_{k≥1} E_k*(z) E_k(0)`,
    /// `G1 = −z Σ_{k≥0} D_k*(z) D_k(0)`, `G2 = I − z Σ_{k≥1} D_k*(z) E_k(0)`,
    /// where `X*(z) = X(conj z)*`.
    pub fn quartet(&self, z: C64) -> Result<QuartetValue> {
        let p = self.p;
        let id = ComplexMatrix::identity(p);
        if !z.is_finite() {
            return Err(Error::invalid("z must be finite"));
        }
        if z == c(0.0, 0.0) {
            return Ok(QuartetValue {
                z,
                f1: id.clone(),
                f2: ComplexMatrix::zeros(p),
                g1: ComplexMatrix::zeros(p),
                g2: id,
                n_used: 0,
                tail_norm: 0.0,
                converged: true,
            });
        }
        let w = z.conj();
        let mut sd = self.stepper_d(w);
        let mut se = self.stepper_e(w);
        let pp = p * p;
        let s = self.sum(4 * pp, |k, acc| {
            if k > 0 {
                sd.advance();
                se.advance();
            }
            let (d, e) = (sd.current(), se.current());
            let (d0k, e0k) = (&self.d_at0[k], &self.e_at0[k]);
            add_adj_prod(&mut acc[0..pp], e, d0k, p);
            add_adj_prod(&mut acc[pp..2 * pp], e, e0k, p);
            add_adj_prod(&mut acc[2 * pp..3 * pp], d, d0k, p);
            add_adj_prod(&mut acc[3 * pp..], d, e0k, p);
        })?;
        let part = |i: usize| matrix_from_slice(p, &s.values[i * pp..(i + 1) * pp]);
        Ok(QuartetValue {
            z,
            f1: &id + &part(0).scale(z),
            f2: part(1).scale(z),
            g1: part(2).scale(-z),
            g2: &id - &part(3).scale(z),
            n_used: s.n_used,
            tail_norm: z.norm() * s.tail_norm,
            converged: s.converged,
        })
    }

    /// `K_∞(z) = Σ_k D_k(z)* D_k(z)`.
    pub fn kernel(&self, z: C64) -> Result<KernelLimit> {
        kernel_limit_rec(&self.rec, &ComplexMatrix::identity(self.p), z, &self.series)
    }

    /// Stieltjes transform of the extremal solution `T_ξ` (maximal jump at
    /// ξ), for `Im z < 0`:
    /// `(ξ − z)^{-1} [I + (z − ξ) Σ_{k≥1} E_k*(z) D_k(ξ)] [Σ_{k≥0} D_k*(z) D_k(ξ)]^{-1}`.
    pub fn transform_extremal(&self, xi: f64, z: C64) -> Result<ComplexMatrix> {
        if !(z.im < 0.0) {
            return Err(Error::HalfPlane { z, requirement: "Im z < 0" });
        }
        if !xi.is_finite() || !z.is_finite() {
            return Err(Error::invalid("xi and z must be finite"));
        }
        let p = self.p;
        let pp = p * p;
        let w = z.conj();
        let mut sd = self.stepper_d(w);
        let mut se = self.stepper_e(w);
        let mut sx = self.stepper_d(c(xi, 0.0));
        let s = self.sum(2 * pp, |k, acc| {
            if k > 0 {
                sd.advance();
                se.advance();
                sx.advance();
            }
            add_adj_prod(&mut acc[..pp], se.current(), sx.current(), p);
            add_adj_prod(&mut acc[pp..], sd.current(), sx.current(), p);
        })?;
        let num = &ComplexMatrix::identity(p) + &matrix_from_slice(p, &s.values[..pp]).scale(z - xi);
        let den = matrix_from_slice(p, &s.values[pp..]);
        let sv = den.singular_values();
        let (hi, lo) = (sv[0], sv[p - 1]);
        if !(lo > 1e-14 * hi) {
            return Err(Error::NumericalFailure(format!(
                "kernel bracket singular at z = {z} (condition estimate {:e})",
                hi / lo
            )));
        }
        Ok((&num * &den.inverse()?).scale((c(xi, 0.0) - z).inv()))
    }

    /// Point mass of `T_ξ` at ξ: `iε m(ξ − iε)` at ε = 1e-2, 1e-3, 1e-4,
    /// extrapolated to ε = 0 through the quadratic interpolant.
    pub fn extremal_mass(&self, xi: f64) -> Result<ComplexMatrix> {
        let eps = [1e-2, 1e-3, 1e-4];
        let vals: Vec<ComplexMatrix> = eps
            .iter()
            .map(|&e| Ok(self.transform_extremal(xi, c(xi, -e))?.scale(c(0.0, e))))
            .collect::<Result<_>>()?;
        // Lagrange weights at 0 for nodes eps
        let mut out = ComplexMatrix::zeros(self.p);
        for i in 0..3 {
            let mut l = 1.0;
            for j in 0..3 {
                if j != i {
                    l *= eps[j] / (eps[j] - eps[i]);
                }
            }
            out += &vals[i].scale_real(l);
        }
        Ok(out)
    }

    /// Stieltjes transform of the solution attached to `V`, for `Im z > 0`:
    /// `[F1(I+V) − iF2(I−V)] [G1(I+V) − iG2(I−V)]^{-1}`.
    ///
    /// With `+i` in both brackets the map sends strict contractions to
    /// functions that are not Herglotz (already for p = 1, V = 0), so the
    /// conjugate unit is used. For unitary `V` the two conventions differ
    /// only by `V ↦ V*`.
    pub fn transform_from_v(&self, z: C64, v: &ContractionParam) -> Result<ComplexMatrix> {
        if !(z.im > 0.0) {
            return Err(Error::HalfPlane { z, requirement: "Im z > 0" });
        }
        let vz = v.at(z);
        if vz.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: vz.dim() });
        }
        let nv = spectral_norm(&vz)?;
        if nv > 1.0 + CONTRACTION_TOL {
            return Err(Error::invalid(format!("V(z) has spectral norm {nv} > 1 at z = {z}")));
        }
        let q = self.quartet(z)?;
        self.combine(&q, &vz)
    }

    /// The parametrization applied to already evaluated quartet values.
    pub fn combine(&self, q: &QuartetValue, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        let id = ComplexMatrix::identity(self.p);
        let plus = &id + v;
        let minus = &id - v;
        let i = c(0.0, -1.0);
        let num = &(&q.f1 * &plus) + &(&q.f2 * &minus).scale(i);
        let den = &(&q.g1 * &plus) + &(&q.g2 * &minus).scale(i);
        let sv = den.singular_values();
        if !(sv[self.p - 1] > 1e-14 * sv[0].max(f64::MIN_POSITIVE)) {
            return Err(Error::Pole(q.z));
        }
        Ok(&num * &den.inverse().map_err(|_| Error::Pole(q.z))?)
    }

    /// `(G1(λ), G2(λ))` at real λ (two series only).
    fn g_pair(&self, lam: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let p = self.p;
        let pp = p * p;
        let z = c(lam, 0.0);
        if lam == 0.0 {
            return Ok((ComplexMatrix::zeros(p), ComplexMatrix::identity(p)));
        }
        let mut sd = self.stepper_d(z);
        let s = self.sum(2 * pp, |k, acc| {
            if k > 0 {
                sd.advance();
            }
            add_adj_prod(&mut acc[..pp], sd.current(), &self.d_at0[k], p);
            add_adj_prod(&mut acc[pp..], sd.current(), &self.e_at0[k], p);
        })?;
        let g1 = matrix_from_slice(p, &s.values[..pp]).scale(-z);
        let g2 = &ComplexMatrix::identity(p) - &matrix_from_slice(p, &s.values[pp..]).scale(z);
        Ok((g1, g2))
    }

    /// `G1(λ)(I+U) − iG2(λ)(I−U)`, the denominator of the transform for
    /// `V = U`, so its roots are exactly that transform's poles.
    pub fn extension_bracket(&self, lam: f64, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (g1, g2) = self.g_pair(lam)?;
        let id = ComplexMatrix::identity(self.p);
        Ok(&(&g1 * &(&id + u)) + &(&g2 * &(&id - u)).scale(c(0.0, -1.0)))
    }

    /// Real roots in `[a, b]` of `det[G1(λ)(I+U) − iG2(λ)(I−U)]`: local minima
    /// of `|det|` on a uniform grid, refined by golden-section search and
    /// accepted when `|det|` drops below `root_tol` times the larger value at
    /// the neighbouring grid points.
    pub fn extension_spectrum(
        &self,
        u: &ComplexMatrix,
        interval: (f64, f64),
        grid: usize,
        root_tol: f64,
    ) -> Result<Vec<ExtensionRoot>> {
        check_unitary(u, self.p)?;
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("interval [{a}, {b}] must be finite with a < b")));
        }
        if grid < 3 {
            return Err(Error::invalid("grid must have at least 3 points"));
        }
        let xs: Vec<f64> = (0..grid).map(|i| a + (b - a) * i as f64 / (grid - 1) as f64).collect();
        let mut brackets = Vec::with_capacity(grid);
        for &x in &xs {
            brackets.push(self.extension_bracket(x, u)?);
        }
        let g: Vec<f64> = brackets.iter().map(|m| m.determinant().norm()).collect();
        let mut roots: Vec<ExtensionRoot> = Vec::new();
        for i in 0..grid {
            let left = if i > 0 { g[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < grid { g[i + 1] } else { f64::INFINITY };
            if !(g[i] <= left && g[i] <= right) || (g[i] == left && i > 0 && g[i] > 0.0) {
                continue;
            }
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(grid - 1)];
            let (x, gx) = if g[i] == 0.0 { (xs[i], 0.0) } else { self.golden_min(u, lo, hi)? };
            let local = [i.checked_sub(1), Some(i + 1).filter(|&k| k < grid)]
                .iter()
                .flatten()
                .map(|&k| g[k])
                .fold(0.0f64, f64::max);
            if !(gx < root_tol * local) {
                continue;
            }
            let scale = [i.checked_sub(1), Some(i + 1).filter(|&k| k < grid)]
                .iter()
                .flatten()
                .map(|&k| brackets[k].singular_values()[0])
                .fold(0.0f64, f64::max);
            let at = self.extension_bracket(x, u)?;
            let residual = at.singular_values()[self.p - 1] / scale;
            if let Some(last) = roots.last() {
                if (x - last.lambda).abs() <= 1e-9 * x.abs().max(1.0) {
                    continue;
                }
            }
            roots.push(ExtensionRoot { lambda: x, residual });
        }
        Ok(roots)
    }

    fn golden_min(&self, u: &ComplexMatrix, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        let f = |x: f64| -> Result<f64> { Ok(self.extension_bracket(x, u)?.determinant().norm()) };
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        for _ in 0..200 {
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2)?;
            }
            if f1 == 0.0 {
                return Ok((x1, 0.0));
            }
        }
        Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
    }

    /// Rows `(r, max_dir ln ‖K_∞(r·dir)‖ / r)`.
    pub fn growth_diagnostic(&self, radii: &[f64], directions: &[C64]) -> Result<Vec<(f64, f64)>> {
        growth_rows(radii, directions, |z| Ok(self.kernel(z)?.value))
    }
}

/// `acc += x* y` on a flat row-major p x p block.
fn add_adj_prod(acc: &mut [C64], x: &ComplexMatrix, y: &ComplexMatrix, p: usize) {
    let (xs, ys) = (x.as_slice(), y.as_slice());
    for i in 0..p {
        for j in 0..p {
            let mut s = c(0.0, 0.0);
            for k in 0..p {
                s += xs[k * p + i].conj() * ys[k * p + j];
            }
            acc[i * p + j] += s;
        }
    }
}

pub fn check_unitary(u: &ComplexMatrix, p: usize) -> Result<()> {
    if u.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: u.dim() });
    }
    let defect = (&ComplexMatrix::adjoint_mul(u, u) - &ComplexMatrix::identity(p)).max_abs();
    if !(defect <= UNITARY_TOL) {
        return Err(Error::invalid(format!("U is not unitary (|U*U - I| = {defect:e})")));
    }
    Ok(())
}

/// One row of an η-smoothed density table; `density` is `None` where the
/// sampler failed.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPoint {
    pub lambda: f64,
    pub density: Option<HermitianMatrix>,
}

/// `d(λ) = (1/π) Im m(λ + iη)`: the Poisson-smoothed density of the measure
/// whose Stieltjes transform is `sampler`, not an exact inverse.
pub fn stieltjes_invert(
    sampler: impl Fn(C64) -> Result<ComplexMatrix>,
    grid: &[f64],
    eta: f64,
) -> Result<Vec<DensityPoint>> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta must be positive"));
    }
    Ok(grid
        .iter()
        .map(|&x| DensityPoint {
            lambda: x,
            density: sampler(c(x, eta))
                .ok()
                .map(|m| m.imaginary_part().into_matrix().scale_real(1.0 / std::f64::consts::PI).hermitian_part()),
        })
        .collect())
}
