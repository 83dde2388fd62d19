//! Exact convex hulls in two and three dimensions.
//!
//! Coordinates are centred and scaled to the unit box before any predicate
//! is evaluated; orientation tests then use an absolute tolerance of
//! `1e-12`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::{self, PairwiseSum};

const EPS: f64 = 1e-12;

/// Supporting half-space `normal · x <= offset` (unit normal, original
/// coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    pub dim: usize,
    pub facets: Vec<Facet>,
    /// Indices of the hull vertices (input order).
    pub vertices: Vec<usize>,
    pub volume: f64,
    /// Set when the points do not span `R^d`; the volume is then 0 and
    /// there are no facets.
    pub degenerate: bool,
    scale: f64,
}

impl ConvexHull {
    /// Whether `p` lies strictly inside every facet half-space.
    pub fn is_interior(&self, p: &[f64]) -> bool {
        if self.degenerate {
            return false;
        }
        let tol = 1e-9 * self.scale;
        self.facets.iter().all(|f| linalg::dot(&f.normal, p) - f.offset < -tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullVolume {
    pub volume: f64,
    pub degenerate: bool,
}

/// `vol(conv(points))` for `d ∈ {2, 3}`.
pub fn hull_volume_exact(points: &[Vec<f64>]) -> Result<HullVolume> {
    let h = convex_hull(points)?;
    Ok(HullVolume { volume: h.volume, degenerate: h.degenerate })
}

pub fn convex_hull(points: &[Vec<f64>]) -> Result<ConvexHull> {
    let d = points.first().map(Vec::len).unwrap_or(0);
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    if !(2..=3).contains(&d) {
        return Err(Error::Unsupported(format!("exact hulls need d in {{2, 3}}, got {d}")));
    }
    if points.len() < d + 1 {
        return Err(Error::InvalidInput(format!("need at least {} points, got {}", d + 1, points.len())));
    }
    let norm = Normalizer::new(points);
    let local: Vec<Vec<f64>> = points.iter().map(|p| norm.apply(p)).collect();
    let hull = if d == 2 { hull_2d(&local) } else { hull_3d(&local) };
    Ok(hull.into_original(&norm))
}

struct Normalizer {
    center: Vec<f64>,
    scale: f64,
}

impl Normalizer {
    fn new(points: &[Vec<f64>]) -> Self {
        let d = points[0].len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in points {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let half = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).fold(0.0, f64::max);
        Self { center, scale: if half > 0.0 { half } else { 1.0 } }
    }

    fn apply(&self, p: &[f64]) -> Vec<f64> {
        p.iter().zip(&self.center).map(|(x, c)| (x - c) / self.scale).collect()
    }
}

/// Hull in normalized coordinates.
struct LocalHull {
    dim: usize,
    // (unit normal, offset, vertex indices)
    facets: Vec<(Vec<f64>, f64, Vec<usize>)>,
    vertices: Vec<usize>,
    volume: f64,
    degenerate: bool,
}

impl LocalHull {
    fn degenerate(dim: usize) -> Self {
        Self { dim, facets: Vec::new(), vertices: Vec::new(), volume: 0.0, degenerate: true }
    }

    fn into_original(self, norm: &Normalizer) -> ConvexHull {
        let s = norm.scale;
        let facets = self
            .facets
            .into_iter()
            .map(|(normal, offset, vertices)| {
                // n·(x - c)/s <= off  <=>  n·x <= off·s + n·c
                let off = offset * s + linalg::dot(&normal, &norm.center);
                Facet { normal, offset: off, vertices }
            })
            .collect();
        ConvexHull {
            dim: self.dim,
            facets,
            vertices: self.vertices,
            volume: self.volume * s.powi(self.dim as i32),
            degenerate: self.degenerate,
            scale: s,
        }
    }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn hull_2d(pts: &[Vec<f64>]) -> LocalHull {
    let order = merged_order(pts);
    if order.len() < 3 {
        return LocalHull::degenerate(2);
    }
    let mut chain: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(order.iter()) } else { Box::new(order.iter().rev()) };
        for &i in iter {
            while chain.len() >= start + 2
                && cross2(&pts[chain[chain.len() - 2]], &pts[chain[chain.len() - 1]], &pts[i]) <= EPS
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
    }
    if chain.len() < 3 {
        return LocalHull::degenerate(2);
    }
    let m = chain.len();
    let mut area = PairwiseSum::new();
    let mut facets = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (&pts[chain[k]], &pts[chain[(k + 1) % m]]);
        area.push(0.5 * (a[0] * b[1] - a[1] * b[0]));
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len = (ex * ex + ey * ey).sqrt();
        // outward normal of a counter-clockwise edge
        let normal = vec![ey / len, -ex / len];
        let offset = linalg::dot(&normal, a);
        facets.push((normal, offset, vec![chain[k], chain[(k + 1) % m]]));
    }
    let volume = area.total();
    if volume <= EPS {
        return LocalHull::degenerate(2);
    }
    LocalHull { dim: 2, facets, vertices: chain, volume, degenerate: false }
}

fn orient3(a: &[f64], b: &[f64], c: &[f64], p: &[f64]) -> f64 {
    let u = linalg::sub(b, a);
    let v = linalg::sub(c, a);
    let w = linalg::sub(p, a);
    u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
}

fn cross3(u: &[f64], v: &[f64]) -> Vec<f64> {
    vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Incremental hull: points are inserted in lexicographic order; faces are
/// kept counter-clockwise seen from outside.
fn hull_3d(pts: &[Vec<f64>]) -> LocalHull {
    let order = merged_order(pts);

    let Some(seed) = initial_tetrahedron(pts, &order) else {
        return LocalHull::degenerate(3);
    };
    let [a, b, c, d] = seed;
    let mut faces: Vec<[usize; 3]> = if orient3(&pts[a], &pts[b], &pts[c], &pts[d]) < 0.0 {
        vec![[a, b, c], [a, c, d], [a, d, b], [b, d, c]]
    } else {
        vec![[a, c, b], [a, d, c], [a, b, d], [b, c, d]]
    };

    for &p in &order {
        if seed.contains(&p) {
            continue;
        }
        let height: Vec<f64> =
            faces.iter().map(|f| orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[p])).collect();
        let Some(start) = (0..faces.len()).filter(|&i| height[i] > EPS).max_by(|&i, &j| height[i].total_cmp(&height[j]))
        else {
            continue;
        };
        // grow the visible region from the most visible face so that it
        // stays connected and its boundary is a single horizon cycle
        let edge_face: HashMap<(usize, usize), usize> = faces
            .iter()
            .enumerate()
            .flat_map(|(i, f)| (0..3).map(move |k| ((f[k], f[(k + 1) % 3]), i)))
            .collect();
        let mut visible = vec![false; faces.len()];
        visible[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let f = faces[i];
            for k in 0..3 {
                if let Some(&j) = edge_face.get(&(f[(k + 1) % 3], f[k])) {
                    if !visible[j] && height[j] > EPS {
                        visible[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        let mut next = Vec::with_capacity(faces.len() + 8);
        let mut horizon = Vec::new();
        for (i, f) in faces.iter().enumerate() {
            if !visible[i] {
                next.push(*f);
                continue;
            }
            for k in 0..3 {
                let (u, v) = (f[k], f[(k + 1) % 3]);
                if edge_face.get(&(v, u)).is_none_or(|&j| !visible[j]) {
                    horizon.push((u, v));
                }
            }
        }
        next.extend(horizon.into_iter().map(|(u, v)| [u, v, p]));
        faces = next;
    }

    // signed volume from an interior reference point
    let reference: Vec<f64> =
        (0..3).map(|i| seed.iter().map(|&s| pts[s][i]).sum::<f64>() / 4.0).collect();
    let mut vol = PairwiseSum::new();
    let mut facets = Vec::with_capacity(faces.len());
    let mut verts = HashSet::new();
    for f in &faces {
        let (p0, p1, p2) = (&pts[f[0]], &pts[f[1]], &pts[f[2]]);
        vol.push(orient3(p0, p1, p2, &reference) / -6.0);
        let n = cross3(&linalg::sub(p1, p0), &linalg::sub(p2, p0));
        let len = linalg::norm(&n);
        let normal: Vec<f64> = n.iter().map(|x| x / len).collect();
        let offset = linalg::dot(&normal, p0);
        facets.push((normal, offset, f.to_vec()));
        verts.extend(f.iter().copied());
    }
    let mut vertices: Vec<usize> = verts.into_iter().collect();
    vertices.sort_unstable();
    LocalHull { dim: 3, facets, vertices, volume: vol.total(), degenerate: false }
}

/// Indices in lexicographic order with near-coincident points (within
/// `1e-12` in every coordinate) merged into their first occurrence.
fn merged_order(pts: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].partial_cmp(&pts[j]).unwrap());
    let mut kept: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        let dup = kept
            .iter()
            .rev()
            .take_while(|&&j| pts[i][0] - pts[j][0] <= EPS)
            .any(|&j| pts[i].iter().zip(&pts[j]).all(|(x, y)| (x - y).abs() <= EPS));
        if !dup {
            kept.push(i);
        }
    }
    kept
}

fn initial_tetrahedron(pts: &[Vec<f64>], order: &[usize]) -> Option<[usize; 4]> {
    let a = *order.first()?;
    let b = *order
        .iter()
        .max_by(|&&i, &&j| dist2(&pts[a], &pts[i]).partial_cmp(&dist2(&pts[a], &pts[j])).unwrap())?;
    if dist2(&pts[a], &pts[b]).sqrt() <= EPS {
        return None;
    }
    let line = linalg::sub(&pts[b], &pts[a]);
    let area = |i: usize| linalg::norm(&cross3(&line, &linalg::sub(&pts[i], &pts[a])));
    let c = *order.iter().max_by(|&&i, &&j| area(i).partial_cmp(&area(j)).unwrap())?;
    if area(c) <= EPS {
        return None;
    }
    let height = |i: usize| orient3(&pts[a], &pts[b], &pts[c], &pts[i]).abs();
    let d = *order.iter().max_by(|&&i, &&j| height(i).partial_cmp(&height(j)).unwrap())?;
    if height(d) <= EPS {
        return None;
    }
    Some([a, b, c, d])
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
