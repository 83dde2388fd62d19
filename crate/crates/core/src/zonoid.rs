//! The zonotope `Z(x′) = Σ_i [−Δx_i/2, Δx_i/2]` of a polygonal curve.
//!
//! Its volume is `2^d Σ_{i_1<…<i_d} |det(g_{i_1}, …, g_{i_d})|`, which for a
//! cyclic curve equals `d! · vol(conv(x))`.

use serde::Serialize;

use crate::curve::PiecewiseLinearCurve;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl Zonotope {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("no generators".into()))?;
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }
}

/// Generators `Δx_i / 2` of the non-degenerate segments.
pub fn zonotope_of_curve(curve: &PiecewiseLinearCurve) -> Result<Zonotope> {
    let gens: Vec<Vec<f64>> =
        curve.nonzero_segments().into_iter().map(|s| s.iter().map(|x| 0.5 * x).collect()).collect();
    if gens.is_empty() {
        return Err(Error::InvalidInput("curve has no non-degenerate segment".into()));
    }
    Zonotope::new(gens)
}

/// Support function `h(u) = Σ |⟨u, g_i⟩|`.
pub fn support(z: &Zonotope, u: &[f64]) -> Result<f64> {
    if u.len() != z.dim {
        return Err(Error::DimensionMismatch { expected: z.dim, found: u.len() });
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidInput("support direction must be non-zero".into()));
    }
    let mut acc = linalg::PairwiseSum::new();
    for g in &z.generators {
        acc.push(linalg::dot(u, g).abs());
    }
    Ok(acc.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZonotopeVolume {
    pub volume: f64,
    /// Fewer than `d` generators, or all `d`-subsets dependent.
    pub degenerate: bool,
}

pub fn zonotope_volume(z: &Zonotope) -> ZonotopeVolume {
    let d = z.dim;
    if z.generators.len() < d {
        return ZonotopeVolume { volume: 0.0, degenerate: true };
    }
    let rows: Vec<usize> = (0..d).collect();
    let sum = linalg::subset_determinant_sum(&z.generators, &rows, f64::abs);
    let volume = 2f64.powi(d as i32) * sum;
    ZonotopeVolume { volume, degenerate: volume == 0.0 }
}

/// Vertices of a planar zonotope, counter-clockwise from `−Σ g_i`
/// (generators taken in the upper half-plane). Parallel generators leave
/// collinear vertices in place.
pub fn zonotope_polygon(z: &Zonotope) -> Result<Vec<[f64; 2]>> {
    if z.dim != 2 {
        return Err(Error::Unsupported(format!("zonotope polygon needs d = 2, got {}", z.dim)));
    }
    let mut gens: Vec<[f64; 2]> = z
        .generators
        .iter()
        .filter(|g| g[0] != 0.0 || g[1] != 0.0)
        .map(|g| if g[1] < 0.0 || (g[1] == 0.0 && g[0] < 0.0) { [-g[0], -g[1]] } else { [g[0], g[1]] })
        .collect();
    gens.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let mut p = [0.0, 0.0];
    for g in &gens {
        p[0] -= g[0];
        p[1] -= g[1];
    }
    let mut out = Vec::with_capacity(2 * gens.len());
    for sign in [2.0, -2.0] {
        for g in &gens {
            out.push(p);
            p[0] += sign * g[0];
            p[1] += sign * g[1];
        }
    }
    Ok(out)
}

/// The two polynomials whose non-negativity cuts out the zonoid of the
/// parabola's derivative `t ↦ (1, 2t)`:
/// `−4x² + 4x − 4y + 1` and `−4x² − 4x + 4y + 1`.
pub fn moment_zonoid_inequalities(p: [f64; 2]) -> [f64; 2] {
    let [x, y] = p;
    [-4.0 * x * x + 4.0 * x - 4.0 * y + 1.0, -4.0 * x * x - 4.0 * x + 4.0 * y + 1.0]
}

/// Membership in the planar moment-curve zonoid.
pub fn membership_2d_moment_zonoid(p: [f64; 2]) -> bool {
    moment_zonoid_inequalities(p).iter().all(|&v| v >= 0.0)
}

/// Boundary of the planar moment-curve zonoid: `samples + 1` points on the
/// upper arc `y = −x² + x + 1/4` from `x = −1/2` to `1/2`, then back along
/// the lower arc `y = x² + x − 1/4`. Each point is tagged with the arc
/// (`0` upper, `1` lower) on which the corresponding polynomial vanishes.
pub fn moment_zonoid_boundary(samples: usize) -> Vec<([f64; 2], usize)> {
    let samples = samples.max(1);
    let xs = |k: usize| -0.5 + k as f64 / samples as f64;
    let upper = (0..=samples).map(|k| {
        let x = xs(k);
        ([x, -x * x + x + 0.25], 0)
    });
    let lower = (0..=samples).rev().map(|k| {
        let x = xs(k);
        ([x, x * x + x - 0.25], 1)
    });
    upper.chain(lower).collect()
}
