//! Finite matrix-valued step measures `T = Σ_j W_j δ_{λ_j}`.
//!
//! Only finitely supported measures are represented. They arise as Gauss
//! quadratures, extension spectra with their residues, or user input, and
//! approximate (rather than equal) solutions with infinitely many points of
//! increase.

use crate::error::{Error, Result};
use crate::matkernel::{c, ComplexMatrix, HermitianMatrix, C64};

/// Relative tolerance for a weight's negative eigenvalues.
pub const WEIGHT_PSD_TOL: f64 = 1e-10;
/// Relative gap below which two nodes are merged.
pub const NODE_MERGE_TOL: f64 = 1e-9;
/// Absolute distance from a node treated as a pole of the transform.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct StepMeasure {
    p: usize,
    nodes: Vec<f64>,
    weights: Vec<HermitianMatrix>,
}

impl StepMeasure {
    /// Checks shapes, finiteness and positivity; does not reorder.
    pub fn new(p: usize, nodes: Vec<f64>, weights: Vec<HermitianMatrix>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidMeasure("block dimension p must be >= 1".into()));
        }
        if nodes.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        for (j, (x, w)) in nodes.iter().zip(&weights).enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidMeasure(format!("node {j} is not finite")));
            }
            if w.dim() != p {
                return Err(Error::InvalidMeasure(format!("weight {j} is not {p}x{p}")));
            }
            if !w.as_matrix().is_finite() {
                return Err(Error::InvalidMeasure(format!("weight {j} has non-finite entries")));
            }
            let ev = w.eigenvalues();
            let lo = ev[0];
            let hi = ev[ev.len() - 1].abs().max(lo.abs());
            if lo < -WEIGHT_PSD_TOL * hi.max(1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "weight {j} at node {x} has negative eigenvalue {lo:e}"
                )));
            }
        }
        Ok(StepMeasure { p, nodes, weights })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[HermitianMatrix] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Canonical form: nodes ascending, nodes closer than
    /// `NODE_MERGE_TOL * max(1, |λ|)` merged by adding weights (the merged
    /// node is the weight-trace-averaged location), exactly-zero weights dropped.
    pub fn normalize(&self) -> StepMeasure {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| self.nodes[a].total_cmp(&self.nodes[b]));
        let mut nodes: Vec<f64> = Vec::new();
        let mut weights: Vec<ComplexMatrix> = Vec::new();
        let mut traces: Vec<f64> = Vec::new();
        for i in order {
            let (x, w) = (self.nodes[i], self.weights[i].as_matrix());
            if w.is_zero() {
                continue;
            }
            let t = w.trace().re;
            if let Some(last) = nodes.last_mut() {
                let lx = *last;
                if (x - lx).abs() <= NODE_MERGE_TOL * lx.abs().max(x.abs()).max(1.0) {
                    let k = weights.len() - 1;
                    let tt = traces[k] + t;
                    if tt > 0.0 {
                        *last = (lx * traces[k] + x * t) / tt;
                    }
                    traces[k] = tt;
                    weights[k] += w;
                    continue;
                }
            }
            nodes.push(x);
            weights.push(w.clone());
            traces.push(t);
        }
        StepMeasure {
            p: self.p,
            nodes,
            weights: weights.into_iter().map(|w| w.hermitian_part()).collect(),
        }
    }

    /// `T(λ)`: sum of weights at nodes strictly below λ (left-continuous).
    pub fn cumulative(&self, lambda: f64) -> HermitianMatrix {
        let mut acc = ComplexMatrix::zeros(self.p);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            if *x < lambda {
                acc += w.as_matrix();
            }
        }
        acc.hermitian_part()
    }

    pub fn total_mass(&self) -> HermitianMatrix {
        self.cumulative(f64::INFINITY)
    }

    /// `Σ_j W_j / (λ_j − z)`.
    pub fn stieltjes_transform(&self, z: C64) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(self.p);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let d = c(*x, 0.0) - z;
            if d.norm() <= POLE_TOL {
                return Err(Error::Pole(z));
            }
            acc += &w.as_matrix().scale(d.inv());
        }
        Ok(acc)
    }

    /// `S_n = Σ_j λ_j^n W_j` for n = 0..=n_max.
    pub fn power_moments(&self, n_max: usize) -> Vec<HermitianMatrix> {
        let mut out = vec![ComplexMatrix::zeros(self.p); n_max + 1];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let mut pw = 1.0;
            for s in out.iter_mut() {
                *s += &w.as_matrix().scale_real(pw);
                pw *= x;
            }
        }
        out.into_iter().map(|m| m.hermitian_part()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn scalar(x: f64) -> HermitianMatrix {
        HermitianMatrix::diag(&[x])
    }

    fn ch2() -> StepMeasure {
        StepMeasure::new(1, vec![-0.5, 0.5], vec![scalar(0.5), scalar(0.5)]).unwrap()
    }

    fn random_measure(rng: &mut StdRng, p: usize, k: usize) -> StepMeasure {
        let nodes = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let weights = (0..k)
            .map(|_| {
                let g = ComplexMatrix::from_fn(p, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                ComplexMatrix::mul_adjoint(&g, &g).hermitian_part()
            })
            .collect();
        StepMeasure::new(p, nodes, weights).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let m = StepMeasure::new(1, vec![1.0, -1.0], vec![scalar(0.25), scalar(0.75)]).unwrap().normalize();
        assert_eq!(m.nodes(), &[-1.0, 1.0]);
        assert_eq!(m.weights()[0], scalar(0.75));

        let id = HermitianMatrix::identity(2);
        let m = StepMeasure::new(2, vec![3.0, 3.0], vec![id.clone(), id.clone()]).unwrap().normalize();
        assert_eq!(m.nodes(), &[3.0]);
        assert_eq!(m.weights()[0], HermitianMatrix::diag(&[2.0, 2.0]));

        let m = StepMeasure::new(1, vec![0.0, 1.0], vec![scalar(0.0), scalar(1.0)]).unwrap().normalize();
        assert_eq!(m.nodes(), &[1.0]);

        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_measure(&mut rng, 2, 5).normalize();
            assert_eq!(m.normalize(), m);
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let neg = HermitianMatrix::diag(&[1.0, -0.1]);
        assert!(matches!(StepMeasure::new(2, vec![0.0], vec![neg]), Err(Error::InvalidMeasure(_))));
        assert!(StepMeasure::new(1, vec![0.0, 1.0], vec![scalar(1.0)]).is_err());
        assert!(StepMeasure::new(1, vec![f64::NAN], vec![scalar(1.0)]).is_err());
    }

    #[test]
    fn cumulative_examples() {
        let m = ch2();
        assert_eq!(m.cumulative(-1.0), scalar(0.0));
        assert_eq!(m.cumulative(0.5), scalar(0.5));
        assert_eq!(m.cumulative(0.5000001), scalar(1.0));
        assert_eq!(m.cumulative(10.0), m.power_moments(0)[0]);
    }

    #[test]
    fn transform_examples() {
        let one = StepMeasure::new(2, vec![0.0], vec![HermitianMatrix::identity(2)]).unwrap();
        let z = c(0.3, 1.7);
        let got = one.stieltjes_transform(z).unwrap();
        assert!((&got - &ComplexMatrix::identity(2).scale(-z.inv())).max_abs() < 1e-15);
        assert!(matches!(one.stieltjes_transform(c(0.0, 0.0)), Err(Error::Pole(_))));

        let m = StepMeasure::new(1, vec![-1.0, 1.0], vec![scalar(0.5), scalar(0.5)]).unwrap();
        let got = m.stieltjes_transform(c(0.0, 1.0)).unwrap()[(0, 0)];
        assert!((got - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn transform_sign_and_symmetry() {
        let mut rng = StdRng::seed_from_u64(11);
        let m = random_measure(&mut rng, 3, 6);
        for _ in 0..20 {
            let z = c(rng.gen_range(-4.0..4.0), rng.gen_range(0.01..3.0));
            let up = m.stieltjes_transform(z).unwrap();
            let down = m.stieltjes_transform(z.conj()).unwrap();
            assert!((&down - &up.adjoint()).max_abs() < 1e-12);
            let x: Vec<C64> = (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let mut q = c(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    q += x[i] * up[(i, j)] * x[j].conj();
                }
            }
            assert!(q.im > 0.0);
        }
    }

    #[test]
    fn moments_examples() {
        let one = StepMeasure::new(1, vec![2.0], vec![scalar(1.0)]).unwrap();
        let s = one.power_moments(5);
        assert_eq!(s[5], scalar(32.0));
        assert_eq!(ch2().power_moments(2)[2], scalar(0.25));
        let zero = StepMeasure::new(1, vec![1.0], vec![scalar(0.0)]).unwrap();
        assert!(zero.power_moments(3).iter().all(|s| s.as_matrix().is_zero()));
        let mut rng = StdRng::seed_from_u64(5);
        let m = random_measure(&mut rng, 2, 4);
        assert!((m.power_moments(0)[0].as_matrix() - m.total_mass().as_matrix()).max_abs() < 1e-15);
    }
}
