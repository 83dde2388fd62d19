//! Triangulations and facets of cyclic polytopes.

use crate::error::{Error, Result};
use crate::linalg::{self, factorial, PairwiseSum};

/// Simplices `(i_0, …, i_d)` triangulating the cyclic polytope on points
/// `p_0, …, p_n` of a d-order curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaleTriangulation {
    pub d: usize,
    pub n: usize,
    pub simplices: Vec<Vec<usize>>,
}

impl GaleTriangulation {
    /// Closed-form size: `C(n - m, m)` for `d = 2m`, `C(n - 1 - m, m)` for
    /// `d = 2m + 1`.
    pub fn expected_count(d: usize, n: usize) -> u128 {
        let m = d / 2;
        if d % 2 == 0 {
            if n < m { 0 } else { linalg::binomial(n - m, m) }
        } else if n < 1 + m {
            0
        } else {
            linalg::binomial(n - 1 - m, m)
        }
    }

    /// Whether `tuple` satisfies the pulling-triangulation rules: `i_0 = 0`,
    /// consecutive pairs `(i_{2l+1}, i_{2l+2})` for every pair inside the
    /// tuple, and `i_d = n` when `d` is odd.
    pub fn admits(d: usize, n: usize, tuple: &[usize]) -> bool {
        if tuple.len() != d + 1 || tuple[0] != 0 {
            return false;
        }
        if tuple.windows(2).any(|w| w[0] >= w[1]) || tuple[d] > n {
            return false;
        }
        let paired = if d % 2 == 0 { d } else { d - 1 };
        if d % 2 == 1 && tuple[d] != n {
            return false;
        }
        (1..paired).step_by(2).all(|i| tuple[i] + 1 == tuple[i + 1])
    }
}

/// All simplices of the Gale-evenness pulling triangulation, generated
/// directly from the pairing rule (lexicographic order).
pub fn gale_index_set(d: usize, n: usize) -> Result<GaleTriangulation> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    if n < d {
        return Err(Error::InvalidInput(format!("need n >= d, got n = {n}, d = {d}")));
    }
    let pairs = d / 2;
    let odd = d % 2 == 1;
    // largest index a pair may end on
    let last = if odd { n - 1 } else { n };
    let mut simplices = Vec::new();
    let mut tuple = vec![0usize];
    fn place(
        remaining: usize,
        min_start: usize,
        last: usize,
        odd: bool,
        n: usize,
        tuple: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            if odd {
                tuple.push(n);
                out.push(tuple.clone());
                tuple.pop();
            } else {
                out.push(tuple.clone());
            }
            return;
        }
        let mut a = min_start;
        // leave room for the remaining pairs after this one
        while a + 1 + 2 * (remaining - 1) <= last {
            tuple.push(a);
            tuple.push(a + 1);
            place(remaining - 1, a + 2, last, odd, n, tuple, out);
            tuple.truncate(tuple.len() - 2);
            a += 1;
        }
    }
    place(pairs, 1, last, odd, n, &mut tuple, &mut simplices);
    Ok(GaleTriangulation { d, n, simplices })
}

/// Facets of the cyclic `d`-polytope on `n + 1` vertices by the Gale
/// evenness criterion: a `d`-subset `F` is a facet iff every two indices
/// outside `F` are separated by an even number of elements of `F`.
pub fn gale_facets(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    linalg::for_each_combination(0, n + 1, d, |f| {
        let mut inside = vec![false; n + 1];
        f.iter().for_each(|&i| inside[i] = true);
        let outside: Vec<usize> = (0..=n).filter(|&i| !inside[i]).collect();
        let even = outside.windows(2).all(|w| (w[0] + 1..w[1]).filter(|&i| inside[i]).count() % 2 == 0);
        if even {
            out.push(f.to_vec());
        }
        true
    });
    out
}

/// `(1/d!) det [1 … 1; p_0 … p_d]`.
pub fn simplex_volume_signed(points: &[&[f64]]) -> f64 {
    let d = points.len() - 1;
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(p, points[0])).collect();
    let cols: Vec<&[f64]> = diffs.iter().map(|c| c.as_slice()).collect();
    linalg::det_full(&cols) / factorial(d)
}

/// Volume of the cyclic polytope on `points` (ordered along a d-order
/// curve) as the sum of its Gale-triangulation simplices.
///
/// Every simplex must have positive signed volume; otherwise the points are
/// not positively oriented d-order samples and the offending tuple is
/// reported.
pub fn cyclic_hull_volume(points: &[Vec<f64>]) -> Result<f64> {
    let d = check_points(points)?;
    let tri = gale_index_set(d, points.len() - 1)?;
    let mut acc = PairwiseSum::new();
    for s in &tri.simplices {
        let ps: Vec<&[f64]> = s.iter().map(|&i| points[i].as_slice()).collect();
        let v = simplex_volume_signed(&ps);
        if v <= 0.0 {
            return Err(Error::InputNotDOrder { tuple: s.clone(), volume: v });
        }
        acc.push(v);
    }
    Ok(acc.total())
}

/// Volume of `conv(points)` as the cone from `p_0` over the Gale facets not
/// containing vertex 0. Valid for points in cyclic position; used to
/// validate [`gale_index_set`].
pub fn pulling_cone_volume(points: &[Vec<f64>]) -> Result<f64> {
    let d = check_points(points)?;
    let mut acc = PairwiseSum::new();
    for f in gale_facets(d, points.len() - 1).into_iter().filter(|f| f[0] != 0) {
        let mut ps: Vec<&[f64]> = vec![points[0].as_slice()];
        ps.extend(f.iter().map(|&i| points[i].as_slice()));
        acc.push(simplex_volume_signed(&ps).abs());
    }
    Ok(acc.total())
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let d = points.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    if points.len() < d + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least d + 1 = {} points, got {}",
            d + 1,
            points.len()
        )));
    }
    Ok(d)
}
