//! Truncated path signatures and alternating signatures.
//!
//! Two independent routes to `α^(k)` are provided for polygonal curves:
//!
//! * the tensor route, [`pl_signature`] followed by [`alt`], which
//!   materializes `σ^(k)` through Chen's identity; and
//! * the exterior route, [`pl_alternating`], which accumulates
//!   `Σ_{i_1<…<i_k} Δx_{i_1} ∧ … ∧ Δx_{i_k}` segment by segment without ever
//!   forming a `d^k` tensor.
//!
//! [`alternating_by_enumeration`] evaluates the same sum as an explicit
//! determinant enumeration and [`alt_volume_quadrature`] integrates the
//! smooth definition directly.

mod quadrature;

pub use quadrature::{gauss_legendre, ordered_simplex_det_integral};

use nalgebra::DMatrix;

use crate::curve::{CurveFamily, PiecewiseLinearCurve};
use crate::error::{Error, Result};
use crate::linalg::{self, factorial};

/// Deepest level the tensor route will materialize.
pub const MAX_TENSOR_LEVEL: usize = 6;

/// Largest dimension handled by the nested quadrature.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// Largest ambient dimension handled by the exterior route (`2^d` storage).
pub const MAX_EXTERIOR_DIM: usize = 20;

/// Dense level-`k` tensor in `(R^d)^{⊗k}`, multi-indices stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTensor {
    dim: usize,
    level: usize,
    data: Vec<f64>,
}

impl SignatureTensor {
    pub fn zeros(dim: usize, level: usize) -> Self {
        Self { dim, level, data: vec![0.0; dim.pow(level as u32)] }
    }

    pub fn from_data(dim: usize, level: usize, data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(level as u32);
        if data.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: data.len() });
        }
        Ok(Self { dim, level, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.level);
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Entry `σ_{i_1 … i_k}` (zero-based indices).
    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn tensor(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Self { dim: self.dim, level: self.level + other.level, data }
    }
}

/// `v^{⊗k} / k!`, the level-`k` signature of a straight segment.
pub fn segment_signature(v: &[f64], level: usize) -> SignatureTensor {
    let dim = v.len();
    let mut out = SignatureTensor { dim, level: 0, data: vec![1.0] };
    let base = SignatureTensor { dim, level: 1, data: v.to_vec() };
    for _ in 0..level {
        out = out.tensor(&base);
    }
    let scale = 1.0 / factorial(level);
    out.data.iter_mut().for_each(|x| *x *= scale);
    out
}

/// Signature series truncated at `depth`; `levels[0]` is the scalar 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSignature {
    dim: usize,
    levels: Vec<SignatureTensor>,
}

impl TruncatedSignature {
    /// Signature of the constant path: `(1, 0, 0, …)`.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut levels = vec![SignatureTensor { dim, level: 0, data: vec![1.0] }];
        levels.extend((1..=depth).map(|k| SignatureTensor::zeros(dim, k)));
        Self { dim, levels }
    }

    pub fn of_segment(v: &[f64], depth: usize) -> Self {
        Self { dim: v.len(), levels: (0..=depth).map(|k| segment_signature(v, k)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &SignatureTensor {
        &self.levels[k]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.levels.iter().zip(&other.levels).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}

/// Chen's identity: the signature of the concatenated path, level by level
/// `Σ_{a+b=k} s1^(a) ⊗ s2^(b)`.
pub fn chen_concat(s1: &TruncatedSignature, s2: &TruncatedSignature) -> Result<TruncatedSignature> {
    if s1.dim != s2.dim {
        return Err(Error::DimensionMismatch { expected: s1.dim, found: s2.dim });
    }
    if s1.depth() != s2.depth() {
        return Err(Error::DimensionMismatch { expected: s1.depth(), found: s2.depth() });
    }
    let levels = (0..=s1.depth())
        .map(|k| {
            let mut acc = SignatureTensor::zeros(s1.dim, k);
            for a in 0..=k {
                let term = s1.levels[a].tensor(&s2.levels[k - a]);
                acc.data.iter_mut().zip(&term.data).for_each(|(x, y)| *x += y);
            }
            acc
        })
        .collect();
    Ok(TruncatedSignature { dim: s1.dim, levels })
}

/// Exact truncated signature of a polygonal path, folding segment
/// signatures together with [`chen_concat`].
pub fn pl_signature(curve: &PiecewiseLinearCurve, depth: usize) -> Result<TruncatedSignature> {
    if depth == 0 || depth > MAX_TENSOR_LEVEL {
        return Err(Error::Unsupported(format!(
            "tensor signature depth must be in 1..={MAX_TENSOR_LEVEL}, got {depth}"
        )));
    }
    let mut sig = TruncatedSignature::identity(curve.dim(), depth);
    for seg in curve.segments() {
        sig = chen_concat(&sig, &TruncatedSignature::of_segment(&seg, depth))?;
    }
    Ok(sig)
}

/// Order-preserving injections `[k] -> [d]` (zero-based), lexicographic.
pub fn injections(dim: usize, level: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    linalg::for_each_combination(0, dim, level, |c| {
        out.push(c.to_vec());
        true
    });
    out
}

/// Coordinates `α_P` of an element of `Λ^k R^d`, indexed by the
/// lexicographically ordered injections `P`.
///
/// For `k > d` the exterior power is zero; such tensors have no coordinates
/// and report [`AlternatingTensor::is_vanishing_space`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingTensor {
    dim: usize,
    level: usize,
    data: Vec<f64>,
}

impl AlternatingTensor {
    fn vanishing(dim: usize, level: usize) -> Self {
        Self { dim, level, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_vanishing_space(&self) -> bool {
        self.level > self.dim
    }

    /// `α_P` for a strictly increasing zero-based `P`.
    pub fn get(&self, injection: &[usize]) -> f64 {
        if self.is_vanishing_space() {
            return 0.0;
        }
        self.data[combination_rank(self.dim, injection)]
    }

    /// The single coordinate of a top-level (`k = d`) tensor.
    pub fn scalar(&self) -> f64 {
        assert_eq!(self.level, self.dim, "scalar() needs a top-level tensor");
        self.data[0]
    }

    /// Level-2 coordinates as the skew-symmetric `d x d` matrix.
    pub fn to_skew_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.level, 2, "only level 2 maps to a matrix");
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i + 1..d {
                let a = self.get(&[i, j]);
                m[(i, j)] = a;
                m[(j, i)] = -a;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Rank of a strictly increasing combination among all `k`-subsets of
/// `0..n` in lexicographic order.
fn combination_rank(n: usize, comb: &[usize]) -> usize {
    let k = comb.len();
    let mut rank = 0usize;
    let mut prev = 0usize;
    for (i, &c) in comb.iter().enumerate() {
        for skipped in prev..c {
            rank += linalg::binomial(n - skipped - 1, k - i - 1) as usize;
        }
        prev = c + 1;
    }
    rank
}

/// Antisymmetrization `Alt(σ)_P = (1/k!) Σ_τ sgn(τ) σ_{P∘τ}`.
pub fn alt(sig: &SignatureTensor) -> AlternatingTensor {
    let (dim, k) = (sig.dim, sig.level);
    if k > dim {
        return AlternatingTensor::vanishing(dim, k);
    }
    let perms = linalg::permutations_with_sign(k);
    let norm = 1.0 / factorial(k);
    let mut index = vec![0usize; k];
    let data = injections(dim, k)
        .into_iter()
        .map(|p| {
            let s: f64 = perms
                .iter()
                .map(|(tau, sign)| {
                    for (slot, &t) in index.iter_mut().zip(tau) {
                        *slot = p[t];
                    }
                    sign * sig.get(&index)
                })
                .sum();
            norm * s
        })
        .collect();
    AlternatingTensor { dim, level: k, data }
}

/// Exterior-algebra accumulator: coefficients of
/// `Σ_{i_1<…<i_m} Δ_{i_1} ∧ … ∧ Δ_{i_m}` on every basis blade `e_S`,
/// `|S| <= max_level`, indexed by the bitmask of `S`.
#[derive(Debug, Clone)]
pub(crate) struct ExteriorAccumulator {
    dim: usize,
    max_level: usize,
    coeffs: Vec<f64>,
    by_grade: Vec<Vec<u32>>,
}

impl ExteriorAccumulator {
    pub(crate) fn new(dim: usize, max_level: usize) -> Result<Self> {
        if dim > MAX_EXTERIOR_DIM {
            return Err(Error::Unsupported(format!(
                "exterior accumulation supports d <= {MAX_EXTERIOR_DIM}, got {dim}"
            )));
        }
        let mut by_grade = vec![Vec::new(); max_level + 1];
        for mask in 0u32..(1u32 << dim) {
            let g = mask.count_ones() as usize;
            if g <= max_level {
                by_grade[g].push(mask);
            }
        }
        let mut coeffs = vec![0.0; 1 << dim];
        coeffs[0] = 1.0;
        Ok(Self { dim, max_level, coeffs, by_grade })
    }

    /// Appends one segment: `W_m += W_{m-1} ∧ v` for every grade `m`.
    pub(crate) fn push(&mut self, v: &[f64]) {
        for grade in (1..=self.max_level).rev() {
            for &mask in &self.by_grade[grade] {
                let mut add = 0.0;
                let mut bits = mask;
                while bits != 0 {
                    let j = bits.trailing_zeros();
                    bits &= bits - 1;
                    let rest = mask & !(1 << j);
                    // e_rest ∧ e_j: move e_j left past the larger indices in rest
                    let swaps = (rest >> (j + 1)).count_ones();
                    let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
                    add += sign * self.coeffs[rest as usize] * v[j as usize];
                }
                self.coeffs[mask as usize] += add;
            }
        }
    }

    pub(crate) fn coefficient(&self, injection: &[usize]) -> f64 {
        let mask: usize = injection.iter().map(|&i| 1usize << i).sum();
        self.coeffs[mask]
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }
}

/// Exact `α^(k)` of a polygonal curve:
/// `α_P = (1/k!) Σ_{i_1<…<i_k} det([Δx_{i_1}]_P, …, [Δx_{i_k}]_P)`.
///
/// The sum is accumulated segment by segment in the exterior algebra, in
/// `O(m · 2^d · d)` for `m` segments.
pub fn pl_alternating(curve: &PiecewiseLinearCurve, level: usize) -> Result<AlternatingTensor> {
    let dim = curve.dim();
    if level > dim {
        return Ok(AlternatingTensor::vanishing(dim, level));
    }
    let mut acc = ExteriorAccumulator::new(dim, level)?;
    for seg in curve.segments() {
        if seg.iter().any(|&x| x != 0.0) {
            acc.push(&seg);
        }
    }
    let norm = 1.0 / factorial(level);
    let data = injections(acc.dim(), level).iter().map(|p| norm * acc.coefficient(p)).collect();
    Ok(AlternatingTensor { dim, level, data })
}

/// `α^(d)` of a polygonal curve in `R^d`: its signed volume.
pub fn top_alternating(curve: &PiecewiseLinearCurve) -> Result<f64> {
    Ok(pl_alternating(curve, curve.dim())?.scalar())
}

/// Same quantity as [`pl_alternating`], evaluated as an explicit sum of
/// `C(m, k)` determinants per coordinate (parallel, pairwise-reduced).
pub fn alternating_by_enumeration(curve: &PiecewiseLinearCurve, level: usize) -> AlternatingTensor {
    let dim = curve.dim();
    if level > dim {
        return AlternatingTensor::vanishing(dim, level);
    }
    let segs = curve.nonzero_segments();
    let norm = 1.0 / factorial(level);
    let data = injections(dim, level)
        .iter()
        .map(|p| norm * linalg::subset_determinant_sum(&segs, p, |x| x))
        .collect();
    AlternatingTensor { dim, level, data }
}

/// The signed-area matrix `A_ij = α_ij = (σ_ij - σ_ji) / 2`.
pub fn signed_area_matrix(curve: &PiecewiseLinearCurve) -> DMatrix<f64> {
    let d = curve.dim();
    let mut m = DMatrix::<f64>::zeros(d, d);
    let mut prefix = vec![0.0; d];
    for seg in curve.segments() {
        for i in 0..d {
            for j in i + 1..d {
                m[(i, j)] += 0.5 * (prefix[i] * seg[j] - prefix[j] * seg[i]);
            }
        }
        prefix.iter_mut().zip(&seg).for_each(|(p, s)| *p += s);
    }
    for i in 0..d {
        for j in i + 1..d {
            m[(j, i)] = -m[(i, j)];
        }
    }
    m
}

/// `α^(d)(x) = (1/d!) ∫_{Δ^d} det(x'(t_1), …, x'(t_d)) dt` by nested
/// Gauss–Legendre quadrature with `nodes` points per axis.
pub fn alt_volume_quadrature(curve: &CurveFamily, nodes: usize) -> Result<f64> {
    let d = curve.dim();
    if d > MAX_QUADRATURE_DIM {
        return Err(Error::Unsupported(format!(
            "nested quadrature supports d <= {MAX_QUADRATURE_DIM} (got {d}); refine a polygonal \
             approximation instead"
        )));
    }
    if curve.derivative(0.5, 1).is_none() {
        return Err(Error::Unsupported(format!("no derivative available for {}", curve.name())));
    }
    if nodes == 0 {
        return Err(Error::InvalidInput("quadrature needs at least one node".into()));
    }
    let v = |t: f64| curve.derivative(t, 1).expect("checked above");
    Ok(ordered_simplex_det_integral(d, nodes, &v) / factorial(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(vs: &[&[f64]]) -> PiecewiseLinearCurve {
        PiecewiseLinearCurve::new(vs.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    fn l_path() -> PiecewiseLinearCurve {
        pl(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]])
    }

    #[test]
    fn segment_signatures() {
        let s = segment_signature(&[1.0, 0.0], 2);
        assert_eq!(s.data(), &[0.5, 0.0, 0.0, 0.0]);
        let z = segment_signature(&[0.0, 0.0, 0.0], 3);
        assert!(z.data().iter().all(|&x| x == 0.0));
        assert_eq!(segment_signature(&[1.0, 2.0], 1).data(), &[1.0, 2.0]);
        assert_eq!(segment_signature(&[1.0, 2.0], 0).data(), &[1.0]);
    }

    #[test]
    fn chen_identity_examples() {
        let a = TruncatedSignature::of_segment(&[1.0, 0.0], 3);
        let b = TruncatedSignature::of_segment(&[0.0, 1.0], 3);
        let e = TruncatedSignature::identity(2, 3);
        assert_eq!(chen_concat(&a, &e).unwrap(), a);
        assert_eq!(chen_concat(&e, &a).unwrap(), a);
        let ab = chen_concat(&a, &b).unwrap();
        assert_eq!(ab.level(1).data(), &[1.0, 1.0]);
        // ∫∫_{t1<t2} dx_1(t1) dx_2(t2) over the L path: all of x_1 precedes x_2
        assert_eq!(ab.level(2).get(&[0, 1]), 1.0);
        assert_eq!(ab.level(2).get(&[1, 0]), 0.0);
        let c = TruncatedSignature::of_segment(&[0.0, 2.0, 1.0], 2);
        assert!(chen_concat(&a, &c).is_err());
        let d = TruncatedSignature::of_segment(&[1.0, 1.0], 2);
        assert!(chen_concat(&a, &d).is_err());
    }

    #[test]
    fn pl_signature_examples() {
        let seg = pl(&[&[0.0, 0.0], &[2.0, -1.0]]);
        let sig = pl_signature(&seg, 4).unwrap();
        for k in 0..=4 {
            assert!(sig.level(k).max_abs_diff(&segment_signature(&[2.0, -1.0], k)) < 1e-15);
        }
        let sig = pl_signature(&l_path(), 2).unwrap();
        assert_eq!(sig.level(1).get(&[0]), 1.0);
        let lvl2 = sig.level(2);
        assert!((lvl2.get(&[0, 1]) - lvl2.get(&[1, 0]) - 1.0).abs() < 1e-15);
        assert!(pl_signature(&seg, 7).is_err());
    }

    #[test]
    fn alt_examples() {
        // symmetric input vanishes
        let sym = SignatureTensor::from_data(2, 2, vec![1.0, 3.0, 3.0, 2.0]).unwrap();
        assert_eq!(alt(&sym).data(), &[0.0]);
        let lvl1 = SignatureTensor::from_data(3, 1, vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(alt(&lvl1).data(), lvl1.data());
        let sig = pl_signature(&l_path(), 2).unwrap();
        assert!((alt(sig.level(2)).get(&[0, 1]) - 0.5).abs() < 1e-15);
        let high = alt(&SignatureTensor::zeros(2, 3));
        assert!(high.is_vanishing_space());
        assert_eq!(high.get(&[0, 1, 1]), 0.0);
    }

    #[test]
    fn alt_is_idempotent_on_alternating_input() {
        // build an alternating level-3 tensor in R^3: ε_{ijk}
        let mut t = SignatureTensor::zeros(3, 3);
        for (p, s) in linalg::permutations_with_sign(3) {
            let off = t.offset(&p);
            t.data[off] = s;
        }
        let a = alt(&t);
        assert_eq!(a.data(), &[1.0]);
    }

    #[test]
    fn pl_alternating_examples() {
        let seg = pl(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]]);
        for k in 2..=3 {
            assert!(pl_alternating(&seg, k).unwrap().data().iter().all(|&x| x == 0.0));
        }
        assert_eq!(pl_alternating(&l_path(), 2).unwrap().get(&[0, 1]), 0.5);
        assert!(pl_alternating(&l_path(), 3).unwrap().is_vanishing_space());
    }

    #[test]
    fn combination_rank_matches_enumeration() {
        for (d, k) in [(5, 2), (6, 3), (4, 4), (5, 0)] {
            for (r, p) in injections(d, k).iter().enumerate() {
                assert_eq!(combination_rank(d, p), r);
            }
        }
    }

    #[test]
    fn signed_areas() {
        let m2 = CurveFamily::moment(2).unwrap().discretize(2000).unwrap();
        let a = signed_area_matrix(&m2);
        assert!((a[(0, 1)] - 1.0 / 6.0).abs() < 1e-7);
        assert_eq!(a[(1, 0)], -a[(0, 1)]);
        let line = pl(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[3.0, 3.0, 3.0]]);
        assert!(signed_area_matrix(&line).iter().all(|&x| x == 0.0));
        let a = signed_area_matrix(&crate::curve::examples::double_loop());
        assert!((a[(0, 1)] - 30.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_examples() {
        let m3 = CurveFamily::moment(3).unwrap();
        assert!((alt_volume_quadrature(&m3, 24).unwrap() - 1.0 / 180.0).abs() < 1e-9);
        let line = CurveFamily::Polyline(pl(&[&[0.0, 0.0], &[1.0, 2.0]]));
        assert!(alt_volume_quadrature(&line, 8).unwrap().abs() < 1e-15);
        let v = alt_volume_quadrature(&CurveFamily::Circle3dTriple, 24).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
        assert!(alt_volume_quadrature(&CurveFamily::moment(5).unwrap(), 4).is_err());
    }
}
