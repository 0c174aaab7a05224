//! Summation of the kernel-type series `Σ_k X_k` whose terms may decay only
//! algebraically. Partial sums are sampled on a doubling ladder of even
//! indices and extrapolated to `n = ∞` by Neville's scheme in `h = 1/n`.
//! Geometrically convergent series stop early once two consecutive ladder
//! samples agree.

use crate::error::{Error, Result};
use crate::matkernel::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesParams {
    /// Largest number of terms summed.
    pub n_max: usize,
    /// Ladder samples at `n_max / 2^j`, `j < levels`.
    pub levels: usize,
    pub tol: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams { n_max: 4096, levels: 6, tol: 1e-12 }
    }
}

impl SeriesParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("series tolerance must be positive"));
        }
        if self.levels == 0 {
            return Err(Error::invalid("series ladder needs at least one level"));
        }
        if self.levels > 30 || (self.n_max >> (self.levels - 1)) < 2 {
            return Err(Error::invalid(format!(
                "n_max = {} too small for {} ladder levels",
                self.n_max, self.levels
            )));
        }
        Ok(())
    }

    /// Ascending, even, distinct ladder indices ending at (even) `n_max`.
    pub fn checkpoints(&self) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.levels).rev().map(|j| ((self.n_max >> j) & !1).max(2)).collect();
        out.dedup();
        out
    }

    /// The last ladder index, i.e. the number of terms a full run consumes.
    pub fn terms(&self) -> usize {
        *self.checkpoints().last().expect("at least one level")
    }
}

/// Result of summing a vector of series component-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum {
    pub values: Vec<C64>,
    /// Number of terms actually summed.
    pub n_used: usize,
    /// Max-entry size of the last correction (raw increment, or the gap
    /// between the two highest-order extrapolants).
    pub tail_norm: f64,
    pub converged: bool,
    pub extrapolated: bool,
}

/// Collects partial sums at the ladder indices and decides when to stop.
#[derive(Clone, Debug)]
pub struct Ladder {
    checkpoints: Vec<usize>,
    tol: f64,
    samples: Vec<Vec<C64>>,
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl Ladder {
    pub fn new(params: &SeriesParams) -> Result<Self> {
        params.validate()?;
        Ok(Ladder { checkpoints: params.checkpoints(), tol: params.tol, samples: Vec::new() })
    }

    /// Number of terms after which the next partial sum is wanted.
    pub fn next_checkpoint(&self) -> usize {
        self.checkpoints[self.samples.len()]
    }

    pub fn last_checkpoint(&self) -> usize {
        *self.checkpoints.last().expect("nonempty ladder")
    }

    /// Records the partial sums after `next_checkpoint()` terms. Returns the
    /// final estimate once the series is judged summed or the ladder is full.
    pub fn record(&mut self, partial: &[C64]) -> Option<SeriesSum> {
        let n = self.next_checkpoint();
        self.samples.push(partial.to_vec());
        let m = self.samples.len();
        if m >= 2 {
            let inc = max_diff(&self.samples[m - 1], &self.samples[m - 2]);
            if inc <= self.tol * max_abs(partial).max(1.0) {
                return Some(SeriesSum {
                    values: partial.to_vec(),
                    n_used: n,
                    tail_norm: inc,
                    converged: true,
                    extrapolated: false,
                });
            }
        }
        if m < self.checkpoints.len() {
            return None;
        }
        Some(self.extrapolate())
    }

    fn extrapolate(&self) -> SeriesSum {
        let m = self.samples.len();
        let n_used = self.last_checkpoint();
        if m == 1 {
            return SeriesSum {
                values: self.samples[0].clone(),
                n_used,
                tail_norm: f64::INFINITY,
                converged: false,
                extrapolated: false,
            };
        }
        let h: Vec<f64> = self.checkpoints.iter().map(|&n| 1.0 / n as f64).collect();
        let width = self.samples[0].len();
        let mut values = Vec::with_capacity(width);
        let mut runner_up = Vec::with_capacity(width);
        let mut col = vec![C64::new(0.0, 0.0); m];
        for c in 0..width {
            for (i, s) in self.samples.iter().enumerate() {
                col[i] = s[c];
            }
            // After pass `len`, col[i] holds the interpolant through i..=i+len at h = 0.
            for len in 1..m {
                for i in 0..m - len {
                    let (hi, hj) = (h[i], h[i + len]);
                    col[i] = (col[i + 1] * hi - col[i] * hj) / (hi - hj);
                }
                if len == m - 2 {
                    runner_up.push(col[1]);
                }
            }
            values.push(col[0]);
        }
        if runner_up.is_empty() {
            // two samples: compare with the raw last partial sum
            runner_up = self.samples[m - 1].clone();
        }
        let tail_norm = max_diff(&values, &runner_up);
        let converged = tail_norm <= self.tol * max_abs(&values).max(1.0);
        SeriesSum { values, n_used, tail_norm, converged, extrapolated: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_with(params: &SeriesParams, term: impl Fn(usize) -> f64) -> SeriesSum {
        let mut ladder = Ladder::new(params).unwrap();
        let mut acc = 0.0;
        let mut k = 0;
        loop {
            k += 1;
            acc += term(k);
            if k == ladder.next_checkpoint() {
                if let Some(s) = ladder.record(&[C64::new(acc, 0.0)]) {
                    return s;
                }
            }
        }
    }

    #[test]
    fn checkpoints_are_even_and_ascending() {
        let p = SeriesParams { n_max: 1001, levels: 4, tol: 1e-12 };
        assert_eq!(p.checkpoints(), vec![124, 250, 500, 1000]);
        assert_eq!(SeriesParams::default().checkpoints(), vec![128, 256, 512, 1024, 2048, 4096]);
        assert!(SeriesParams { n_max: 8, levels: 4, tol: 1e-12 }.validate().is_err());
        assert!(SeriesParams { n_max: 8, levels: 0, tol: 1e-12 }.validate().is_err());
    }

    #[test]
    fn algebraic_decay_is_extrapolated() {
        let s = sum_with(&SeriesParams::default(), |k| 1.0 / (k as f64).powi(2));
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!(s.extrapolated);
        assert!((s.values[0].re - exact).abs() < 1e-12, "{}", s.values[0].re - exact);
        assert!(s.converged, "tail {}", s.tail_norm);
    }

    #[test]
    fn parity_structured_terms() {
        // only even terms contribute, as for odd-vanishing polynomial values
        let s = sum_with(&SeriesParams::default(), |k| if k % 2 == 0 { 4.0 / (k as f64).powi(2) } else { 0.0 });
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((s.values[0].re - exact).abs() < 1e-12);
    }

    #[test]
    fn geometric_decay_stops_early() {
        let s = sum_with(&SeriesParams::default(), |k| 0.5f64.powi(k as i32));
        assert!(!s.extrapolated && s.converged);
        assert_eq!(s.n_used, 256);
        assert!((s.values[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergent_series_is_not_converged() {
        let s = sum_with(&SeriesParams { n_max: 512, levels: 4, tol: 1e-12 }, |k| 1.0 / k as f64);
        assert!(!s.converged);
    }
}
