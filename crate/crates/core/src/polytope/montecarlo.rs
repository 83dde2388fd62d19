//! Hit-or-miss volume estimates inside the bounding box.
//!
//! Membership in `conv(points)` is decided by phase I of the simplex method
//! on `Σ λ_i (p_i − q) = 0, Σ λ_i = 1, λ ≥ 0`. Trials are split into blocks
//! of [`BLOCK`] samples; block `b` draws from the ChaCha8 stream `b` of the
//! seed, so `(seed, trials)` fixes the estimate independently of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MIN_TRIALS: u64 = 10_000;
pub const BLOCK: u64 = 4096;

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub volume: f64,
    /// Binomial standard error of `volume`, using `(hits + 1) / (trials + 2)`
    /// as the hit rate.
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

pub fn hull_volume_montecarlo(points: &[Vec<f64>], trials: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidInput(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let d = points.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if box_volume <= 0.0 {
        return Ok(MonteCarloEstimate { volume: 0.0, stderr: 0.0, hits: 0, trials });
    }
    let blocks = trials.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BLOCK.min(trials - b * BLOCK);
            let mut lp = MembershipLp::new(points);
            let mut q = vec![0.0; d];
            let mut hits = 0;
            for _ in 0..count {
                for i in 0..d {
                    q[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                }
                if lp.contains(&q) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let f = hits as f64 / trials as f64;
    // add-one estimate of the hit rate, so zero hits still carry an error
    let p = (hits as f64 + 1.0) / (trials as f64 + 2.0);
    Ok(MonteCarloEstimate {
        volume: f * box_volume,
        stderr: box_volume * (p * (1.0 - p) / trials as f64).sqrt(),
        hits,
        trials,
    })
}

/// Whether `q ∈ conv(points)` (closed hull, tolerance `1e-9` relative to
/// the point cloud's extent).
pub fn in_convex_hull(points: &[Vec<f64>], q: &[f64]) -> bool {
    MembershipLp::new(points).contains(q)
}

/// Reusable dense tableau for the membership problem.
struct MembershipLp<'a> {
    points: &'a [Vec<f64>],
    scale: f64,
    rows: usize,
    cols: usize,
    tableau: Vec<f64>,
    basis: Vec<usize>,
}

impl<'a> MembershipLp<'a> {
    fn new(points: &'a [Vec<f64>]) -> Self {
        let d = points.first().map(Vec::len).unwrap_or(0);
        let scale = points
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        let rows = d + 1;
        // λ_0..λ_{n-1}, artificials a_0..a_d, right-hand side
        let cols = points.len() + rows + 1;
        Self { points, scale, rows, cols, tableau: vec![0.0; (rows + 1) * cols], basis: vec![0; rows] }
    }

    fn contains(&mut self, q: &[f64]) -> bool {
        let (m, n, cols) = (self.rows, self.points.len(), self.cols);
        let d = m - 1;
        let t = &mut self.tableau;
        t.iter_mut().for_each(|x| *x = 0.0);
        for (j, p) in self.points.iter().enumerate() {
            for i in 0..d {
                t[i * cols + j] = (p[i] - q[i]) / self.scale;
            }
            t[d * cols + j] = 1.0;
        }
        t[d * cols + cols - 1] = 1.0;
        // right-hand sides are (0, …, 0, 1) ≥ 0 already
        for r in 0..m {
            t[r * cols + n + r] = 1.0;
            self.basis[r] = n + r;
        }
        // objective row: minimize Σ a_r, expressed in nonbasic variables
        let obj = m * cols;
        for j in 0..cols {
            let s: f64 = (0..m).map(|r| t[r * cols + j]).sum();
            t[obj + j] = if (n..n + m).contains(&j) { 0.0 } else { -s };
        }
        let bland_after = 4 * (m + n);
        for iter in 0..50 * (m + n) {
            // entering column: most negative reduced cost, or Bland once stalled
            let mut enter = None;
            let mut best = -PIVOT_TOL;
            for j in 0..n + m {
                let c = t[obj + j];
                if c < best {
                    enter = Some(j);
                    if iter >= bland_after {
                        break;
                    }
                    best = c;
                }
            }
            let Some(e) = enter else { break };
            let mut leave = None;
            let mut ratio = f64::INFINITY;
            for r in 0..m {
                let a = t[r * cols + e];
                if a > PIVOT_TOL {
                    let rr = t[r * cols + cols - 1] / a;
                    if rr < ratio - 1e-15 || (rr <= ratio + 1e-15 && leave.is_some_and(|l: usize| self.basis[r] < self.basis[l])) {
                        ratio = rr;
                        leave = Some(r);
                    }
                }
            }
            let Some(l) = leave else { break };
            let piv = t[l * cols + e];
            for j in 0..cols {
                t[l * cols + j] /= piv;
            }
            for r in 0..=m {
                if r == l {
                    continue;
                }
                let f = t[r * cols + e];
                if f != 0.0 {
                    for j in 0..cols {
                        t[r * cols + j] -= f * t[l * cols + j];
                    }
                }
            }
            self.basis[l] = e;
        }
        // remaining infeasibility Σ a_r = −(objective value)
        -t[obj + cols - 1] <= FEAS_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        assert!(in_convex_hull(&sq, &[0.5, 0.5]));
        assert!(in_convex_hull(&sq, &[1.0, 0.3]));
        assert!(in_convex_hull(&sq, &[0.0, 0.0]));
        assert!(!in_convex_hull(&sq, &[1.01, 0.5]));
        assert!(!in_convex_hull(&sq, &[-0.2, -0.2]));
        let tri = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(in_convex_hull(&tri, &[0.2, 0.2, 0.2]));
        assert!(!in_convex_hull(&tri, &[0.4, 0.4, 0.4]));
    }

    #[test]
    fn square_and_simplex() {
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let est = hull_volume_montecarlo(&sq, 20_000, 1).unwrap();
        assert_eq!(est.volume, 1.0);
        let tri = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let est = hull_volume_montecarlo(&tri, 200_000, 7).unwrap();
        assert!((est.volume - 1.0 / 6.0).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn deterministic_and_validated() {
        let tri = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]];
        let a = hull_volume_montecarlo(&tri, 50_000, 42).unwrap();
        let b = hull_volume_montecarlo(&tri, 50_000, 42).unwrap();
        assert_eq!(a, b);
        let c = hull_volume_montecarlo(&tri, 50_000, 43).unwrap();
        assert_ne!(a.hits, c.hits);
        assert!(hull_volume_montecarlo(&tri, 9_999, 0).is_err());
    }
}
