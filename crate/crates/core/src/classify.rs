//! Sampling certificates for the nested curve classes
//! `torsion ⊂ strict determinant ⊂ d-order ⊂ cyclic`.
//!
//! Every determinant is divided by the product of its column norms before
//! the sign test, so tolerances are scale-free. A `Holds` status means no
//! violation was found at the sampled resolution.
//!
//! Parametric scans are coarse-to-fine over the dyadic levels
//! `{i / 2^L : 0 < i < 2^L}`; the reported witness is the lexicographically
//! smallest failing tuple on the coarsest level that has one.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::CurveFamily;
use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope;
use crate::signature;

/// Strict positivity threshold on normalized determinants.
pub const STRICT_TOL: f64 = 1e-12;
/// Non-negativity threshold for the relaxed (cyclic) test.
pub const RELAXED_TOL: f64 = -1e-10;
/// Point lists up to this size are scanned exhaustively.
pub const EXHAUSTIVE_POINTS: usize = 20;
/// Random tuples drawn for larger point lists (in addition to all runs of
/// consecutive points).
pub const SUBSAMPLE_TUPLES: usize = 100_000;
/// Parametric levels with more tuples than this are subsampled the same way.
pub const EXHAUSTIVE_TUPLES: u128 = 2_000_000;
pub const DEFAULT_GRID: usize = 101;

/// Default grid for a curve in `R^d`. Normalized determinants of tuples
/// spaced `h` apart shrink roughly like `h^(d(d−1)/2)`, so finer grids
/// would push genuine positives of smooth curves below [`STRICT_TOL`] for
/// `d >= 4`.
pub fn default_grid(d: usize) -> usize {
    match d {
        0..=3 => DEFAULT_GRID,
        4 => 31,
        _ => 15,
    }
}

const SUBSAMPLE_SEED: u64 = 0x5EED_C1A5_51F1_ED00;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassResult {
    pub status: Status,
    /// Curve parameters of the failing tuple (empty unless `Fails`).
    pub witness: Vec<f64>,
    /// Sample indices of the failing tuple, for point-list tests.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_indices: Vec<usize>,
    /// Smallest normalized determinant seen; `None` if nothing was tested.
    pub min_det: Option<f64>,
    /// Normalized determinant at the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_det: Option<f64>,
    pub samples_used: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClassResult {
    fn inapplicable(note: impl Into<String>) -> Self {
        Self {
            status: Status::Inapplicable,
            witness: Vec::new(),
            witness_indices: Vec::new(),
            min_det: None,
            witness_det: None,
            samples_used: 0,
            note: Some(note.into()),
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Positive,
    /// The curve was reflected in its first coordinate before testing.
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub curve: String,
    pub dim: usize,
    pub grid: usize,
    pub orientation: Orientation,
    pub torsion: ClassResult,
    pub strict_det: ClassResult,
    pub d_order: ClassResult,
    pub cyclic_relaxed: ClassResult,
    pub samples_used: u64,
}

/// A curve with an optional reflection `x_1 ↦ −x_1`.
#[derive(Clone, Copy)]
struct Oriented<'a> {
    curve: &'a CurveFamily,
    flip: bool,
}

impl Oriented<'_> {
    fn derivative(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        let mut v = self.curve.derivative(t, order)?;
        if self.flip {
            v[0] = -v[0];
        }
        Some(v)
    }

    fn point(&self, t: f64) -> Vec<f64> {
        let mut v = self.curve.point(t);
        if self.flip {
            v[0] = -v[0];
        }
        v
    }
}

/// Smallest dyadic level `L` with `2^L − 1 ≥ grid`.
fn dyadic_level(grid: usize) -> u32 {
    let mut level = 1;
    while (1usize << level) - 1 < grid.max(1) {
        level += 1;
    }
    level
}

fn dyadic_points(level: u32) -> Vec<f64> {
    let m = 1usize << level;
    (1..m).map(|i| i as f64 / m as f64).collect()
}

/// `det(cols) / Π ‖col‖` over the leading `rows` coordinates; zero columns
/// give zero.
fn normalized_det(cols: &[&[f64]], rows: &[usize]) -> f64 {
    let mut scale = 1.0;
    for c in cols {
        let n = rows.iter().map(|&r| c[r] * c[r]).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        scale *= n;
    }
    linalg::det_of_columns(cols, rows) / scale
}

/// Outcome of scanning a family of index tuples.
struct Scan {
    min: Option<f64>,
    /// Lexicographically smallest failing tuple and its value.
    failure: Option<(Vec<usize>, f64)>,
    tested: u64,
}

/// Evaluates `value` on increasing `k`-tuples from `0..m`: all of them when
/// `exhaustive`, otherwise a fixed pseudo-random subsample plus every run of
/// consecutive indices. A tuple fails when `value <= threshold`.
fn scan_tuples(m: usize, k: usize, exhaustive: bool, threshold: f64, mut value: impl FnMut(&[usize]) -> f64) -> Scan {
    let mut scan = Scan { min: None, failure: None, tested: 0 };
    let mut visit = |t: &[usize], scan: &mut Scan| {
        let v = value(t);
        scan.tested += 1;
        scan.min = Some(scan.min.map_or(v, |m: f64| m.min(v)));
        if v <= threshold && scan.failure.as_ref().is_none_or(|(w, _)| t < w.as_slice()) {
            scan.failure = Some((t.to_vec(), v));
        }
    };
    if m < k {
        return scan;
    }
    if exhaustive {
        linalg::for_each_combination(0, m, k, |t| {
            visit(t, &mut scan);
            true
        });
        return scan;
    }
    let mut tuples: BTreeSet<Vec<usize>> = (0..=m - k).map(|i| (i..i + k).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SUBSAMPLE_SEED);
    for _ in 0..SUBSAMPLE_TUPLES {
        let mut t = rand::seq::index::sample(&mut rng, m, k).into_vec();
        t.sort_unstable();
        tuples.insert(t);
    }
    for t in &tuples {
        visit(t, &mut scan);
    }
    scan
}

fn result_from_scan(scan: Scan, witness: impl Fn(&[usize]) -> Vec<f64>, samples: u64) -> ClassResult {
    let (status, witness, indices, wdet) = match scan.failure {
        Some((t, v)) => (Status::Fails, witness(&t), t, Some(v)),
        None => (Status::Holds, Vec::new(), Vec::new(), None),
    };
    ClassResult {
        status,
        witness,
        witness_indices: indices,
        min_det: scan.min,
        witness_det: wdet,
        samples_used: samples,
        note: None,
    }
}

/// Reference parameters whose QR rotations are tried when the curve fails
/// in its own coordinates.
const TORSION_REFERENCES: [f64; 3] = [0.5, 0.25, 0.75];

/// Positivity of the leading principal minors of `(x′(t), …, x^(d)(t))` on
/// the dyadic grid covering `grid` interior points.
///
/// The class is taken up to rotation. If the curve fails in its own
/// coordinates, the test retries with `Qᵀ` from `(x′, …, x^(d))(t_c) = Q R`
/// (`R` with positive diagonal, `Q ∈ SO(d)`) at a few reference parameters
/// `t_c`; such a rotation makes every minor positive at `t_c`. The witness
/// of a failure is the one found in the curve's own coordinates.
pub fn torsion_test(curve: &CurveFamily, grid: usize) -> ClassResult {
    torsion_oriented(Oriented { curve, flip: false }, grid)
}

fn derivative_matrix(c: Oriented<'_>, t: f64) -> DMatrix<f64> {
    let d = c.curve.dim();
    let cols: Vec<Vec<f64>> = (1..=d).map(|k| c.derivative(t, k).expect("checked")).collect();
    DMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Smallest normalized leading minor of `rot · (x′, …, x^(d))(t)`.
fn worst_minor(c: Oriented<'_>, rot: Option<&DMatrix<f64>>, t: f64) -> f64 {
    let d = c.curve.dim();
    let m = derivative_matrix(c, t);
    let m = match rot {
        Some(r) => r * m,
        None => m,
    };
    let cols: Vec<Vec<f64>> = m.column_iter().map(|col| col.iter().copied().collect()).collect();
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    (1..=d).map(|k| normalized_det(&refs[..k], &(0..k).collect::<Vec<_>>())).fold(f64::INFINITY, f64::min)
}

/// `Qᵀ` from the QR factorization of the derivative matrix at `t`, or
/// `None` when that matrix is singular or negatively oriented.
fn reference_rotation(c: Oriented<'_>, t: f64) -> Option<DMatrix<f64>> {
    let d = c.curve.dim();
    let qr = derivative_matrix(c, t).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] == 0.0 {
            return None;
        }
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    (q.determinant() > 0.0).then(|| q.transpose())
}

fn torsion_oriented(c: Oriented<'_>, grid: usize) -> ClassResult {
    let d = c.curve.dim();
    if !(1..=d).all(|k| c.curve.has_exact_derivative(k)) {
        return ClassResult::inapplicable("derivatives up to the ambient dimension are unavailable");
    }
    if c.curve.is_polyline() {
        return ClassResult::inapplicable("polygonal curves have no higher derivatives");
    }
    let level = dyadic_level(grid);
    // coarse to fine: each level adds the odd multiples of 2^-l
    let ts: Vec<f64> = (1..=level)
        .flat_map(|l| {
            let m = 1usize << l;
            (1..m).step_by(2).map(move |i| i as f64 / m as f64)
        })
        .collect();
    let mut tested = 0u64;
    // first failing parameter and minor, plus the smallest minor seen
    let mut scan = |rot: Option<&DMatrix<f64>>| {
        let mut min = f64::INFINITY;
        for &t in &ts {
            let worst = worst_minor(c, rot, t);
            tested += 1;
            min = min.min(worst);
            if worst <= STRICT_TOL {
                return (Some((t, worst)), min);
            }
        }
        (None, min)
    };

    let (failure, min) = scan(None);
    let Some((witness, witness_det)) = failure else {
        return ClassResult {
            status: Status::Holds,
            witness: Vec::new(),
            witness_indices: Vec::new(),
            min_det: Some(min),
            witness_det: None,
            samples_used: tested,
            note: None,
        };
    };
    for &tc in &TORSION_REFERENCES {
        let Some(rot) = reference_rotation(c, tc) else { continue };
        if let (None, rot_min) = scan(Some(&rot)) {
            return ClassResult {
                status: Status::Holds,
                witness: Vec::new(),
                witness_indices: Vec::new(),
                min_det: Some(rot_min),
                witness_det: None,
                samples_used: tested,
                note: Some(format!("holds after the rotation fixed by the derivative frame at t = {tc}")),
            };
        }
    }
    ClassResult {
        status: Status::Fails,
        witness: vec![witness],
        witness_indices: Vec::new(),
        min_det: Some(min),
        witness_det: Some(witness_det),
        samples_used: tested,
        note: None,
    }
}

/// `det(x′(t_1), …, x′(t_d)) > 0` on increasing tuples of dyadic points.
pub fn strict_det_test(curve: &CurveFamily, grid: usize) -> ClassResult {
    strict_det_oriented(Oriented { curve, flip: false }, grid)
}

fn strict_det_oriented(c: Oriented<'_>, grid: usize) -> ClassResult {
    let d = c.curve.dim();
    if c.derivative(0.5, 1).is_none() {
        return ClassResult::inapplicable("first derivative unavailable");
    }
    let rows: Vec<usize> = (0..d).collect();
    let level = dyadic_level(grid);
    let mut min = None::<f64>;
    let mut tested = 0;
    for l in 1..=level {
        let ts = dyadic_points(l);
        let vel: Vec<Vec<f64>> = ts.iter().map(|&t| c.derivative(t, 1).expect("checked")).collect();
        let exhaustive = linalg::binomial(ts.len(), d) <= EXHAUSTIVE_TUPLES;
        let scan = scan_tuples(ts.len(), d, exhaustive, STRICT_TOL, |t| {
            let cols: Vec<&[f64]> = t.iter().map(|&i| vel[i].as_slice()).collect();
            normalized_det(&cols, &rows)
        });
        tested += scan.tested;
        if let Some(m) = scan.min {
            min = Some(min.map_or(m, |x| x.min(m)));
        }
        if scan.failure.is_some() || l == level {
            let mut r = result_from_scan(scan, |t| t.iter().map(|&i| ts[i]).collect(), tested);
            r.min_det = min;
            return r;
        }
    }
    unreachable!("level >= 1")
}

/// Drops a repeated closing vertex.
fn open_points(points: &[Vec<f64>]) -> &[Vec<f64>] {
    match points {
        [first, .., last] if points.len() > 2 && first == last => &points[..points.len() - 1],
        _ => points,
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let d = points.first().map(Vec::len).unwrap_or(0);
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    if d == 0 || points.len() < d + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least d + 1 = {} points, got {}",
            d + 1,
            points.len()
        )));
    }
    Ok(d)
}

fn point_scan(points: &[Vec<f64>], threshold: f64) -> Scan {
    let d = points[0].len();
    let rows: Vec<usize> = (0..d).collect();
    let exhaustive = points.len() <= EXHAUSTIVE_POINTS;
    scan_tuples(points.len(), d + 1, exhaustive, threshold, |t| {
        let diffs: Vec<Vec<f64>> = t[1..].iter().map(|&i| linalg::sub(&points[i], &points[t[0]])).collect();
        let cols: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
        normalized_det(&cols, &rows)
    })
}

/// Normalized bordered determinant `det(1 … 1; p_{i_0} … p_{i_d})` of a
/// tuple of sample indices.
pub fn bordered_det(points: &[Vec<f64>], tuple: &[usize]) -> f64 {
    let d = points[0].len();
    let diffs: Vec<Vec<f64>> = tuple[1..].iter().map(|&i| linalg::sub(&points[i], &points[tuple[0]])).collect();
    let cols: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
    normalized_det(&cols, &(0..d).collect::<Vec<_>>())
}

/// Strict positivity of all bordered determinants of increasing
/// `(d+1)`-tuples. Points are assumed ordered by parameter; a repeated
/// closing point is ignored. Witnesses are reported as indices.
pub fn d_order_test(points: &[Vec<f64>]) -> Result<ClassResult> {
    check_points(points)?;
    let pts = open_points(points);
    let scan = point_scan(pts, STRICT_TOL);
    let tested = scan.tested;
    Ok(result_from_scan(scan, |_| Vec::new(), tested))
}

/// Non-negativity of the bordered determinants, valid only when the points
/// span `R^d`; rank-deficient inputs are `Inapplicable`.
pub fn cyclic_relaxed_test(points: &[Vec<f64>]) -> Result<ClassResult> {
    let d = check_points(points)?;
    let pts = open_points(points);
    if affine_rank(pts) < d {
        return Ok(ClassResult::inapplicable("points do not span the ambient space"));
    }
    let scan = point_scan(pts, RELAXED_TOL);
    // the relaxed test only fails on strictly negative determinants
    let scan = Scan { failure: scan.failure.filter(|(_, v)| *v < RELAXED_TOL), ..scan };
    let tested = scan.tested;
    Ok(result_from_scan(scan, |_| Vec::new(), tested))
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    let d = points[0].len();
    let n = points.len();
    let mean: Vec<f64> = (0..d).map(|i| points.iter().map(|p| p[i]).sum::<f64>() / n as f64).collect();
    let m = DMatrix::from_fn(d, n, |i, j| points[j][i] - mean[i]);
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    /// Fraction of the input points on the hull boundary.
    pub fraction_on_boundary: f64,
    /// Indices of points in the interior of the hull.
    pub offenders: Vec<usize>,
    /// The hull has empty interior; every point counts as boundary.
    pub degenerate: bool,
}

/// Which sample points lie strictly inside `conv(points)`, `d ∈ {2, 3}`.
pub fn boundary_membership(points: &[Vec<f64>]) -> Result<BoundaryReport> {
    let hull = polytope::convex_hull(points)?;
    if hull.degenerate {
        return Ok(BoundaryReport { fraction_on_boundary: 1.0, offenders: Vec::new(), degenerate: true });
    }
    let offenders: Vec<usize> = (0..points.len()).filter(|&i| hull.is_interior(&points[i])).collect();
    Ok(BoundaryReport {
        fraction_on_boundary: 1.0 - offenders.len() as f64 / points.len() as f64,
        offenders,
        degenerate: false,
    })
}

/// Orientation of a curve from the sign of `α^(d)` of its polygonal
/// approximation; values indistinguishable from zero count as positive.
pub fn orientation(curve: &CurveFamily, n: usize) -> Result<Orientation> {
    let pl = curve.to_polyline(n)?;
    let alpha = signature::top_alternating(&pl)?;
    let scale: f64 = pl
        .vertices()
        .iter()
        .map(|v| linalg::norm(&linalg::sub(v, &pl.vertices()[0])))
        .fold(0.0, f64::max)
        .powi(pl.dim() as i32);
    Ok(if alpha < -1e-12 * scale.max(f64::MIN_POSITIVE) { Orientation::Negative } else { Orientation::Positive })
}

/// Runs all four class tests. Negatively oriented curves are reflected in
/// their first coordinate first, since every class is defined up to
/// orientation-preserving symmetry; the report records this.
pub fn classify(curve: &CurveFamily, grid: usize) -> Result<ClassificationReport> {
    if grid < 1 {
        return Err(Error::InvalidInput("grid must be at least 1".into()));
    }
    let d = curve.dim();
    let orient = orientation(curve, grid.max(256))?;
    let c = Oriented { curve, flip: orient == Orientation::Negative };

    let torsion = torsion_oriented(c, grid);
    let strict_det = strict_det_oriented(c, grid);

    let (points, params): (Vec<Vec<f64>>, Vec<f64>) = if curve.is_polyline() {
        let pl = curve.to_polyline(grid)?;
        let m = pl.num_segments().max(1) as f64;
        let mut pts = pl.vertices().to_vec();
        if c.flip {
            pts.iter_mut().for_each(|p| p[0] = -p[0]);
        }
        let params = (0..pts.len()).map(|k| k as f64 / m).collect();
        (pts, params)
    } else {
        (0..=grid)
            .map(|k| {
                let t = if k == grid { 1.0 } else { k as f64 / grid as f64 };
                (c.point(t), t)
            })
            .unzip()
    };
    let to_params = |mut r: ClassResult| {
        r.witness = r.witness_indices.iter().map(|&i| params[i]).collect();
        r
    };
    let (d_order, cyclic_relaxed) = if points.len() < d + 1 {
        let r = ClassResult::inapplicable("fewer than d + 1 sample points");
        (r.clone(), r)
    } else {
        (to_params(d_order_test(&points)?), to_params(cyclic_relaxed_test(&points)?))
    };
    Ok(ClassificationReport {
        curve: curve.name(),
        dim: d,
        grid,
        orientation: orient,
        torsion,
        strict_det,
        d_order,
        cyclic_relaxed,
        samples_used: points.len() as u64,
    })
}
