//! Curve representations.
//!
//! Every computation in the crate ultimately runs on a
//! [`PiecewiseLinearCurve`]; smooth families are described by
//! [`CurveFamily`] and sampled with [`CurveFamily::discretize`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Ordered vertex list in `R^d`, parametrized uniformly over `[0, 1]`
/// (vertex `k` of `m + 1` sits at parameter `k / m`).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCurve {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl PiecewiseLinearCurve {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a polygonal curve needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("vertices must have dimension >= 1".into()));
        }
        if let Some(bad) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("vertex coordinates must be finite".into()));
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn num_segments(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Segment displacements `v_{i+1} - v_i`, zero-length segments included.
    pub fn segments(&self) -> Vec<Vec<f64>> {
        self.vertices.windows(2).map(|w| linalg::sub(&w[1], &w[0])).collect()
    }

    /// Segment displacements with exactly-zero segments removed.
    pub fn nonzero_segments(&self) -> Vec<Vec<f64>> {
        self.segments().into_iter().filter(|s| s.iter().any(|&x| x != 0.0)).collect()
    }

    /// `x(1) - x(0)`.
    pub fn displacement(&self) -> Vec<f64> {
        linalg::sub(self.vertices.last().unwrap(), &self.vertices[0])
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let m = self.num_segments();
        if t <= 0.0 {
            return self.vertices[0].clone();
        }
        if t >= 1.0 {
            return self.vertices[m].clone();
        }
        let s = t * m as f64;
        let seg = (s.floor() as usize).min(m - 1);
        let local = s - seg as f64;
        if local == 0.0 {
            return self.vertices[seg].clone();
        }
        let (a, b) = (&self.vertices[seg], &self.vertices[seg + 1]);
        a.iter().zip(b).map(|(x, y)| x + local * (y - x)).collect()
    }

    /// Velocity of the uniform parametrization; right-continuous except at
    /// `t = 1`.
    pub fn velocity_at(&self, t: f64) -> Vec<f64> {
        let m = self.num_segments();
        let seg = ((t.clamp(0.0, 1.0) * m as f64).floor() as usize).min(m - 1);
        linalg::sub(&self.vertices[seg + 1], &self.vertices[seg])
            .into_iter()
            .map(|x| x * m as f64)
            .collect()
    }

    /// The sub-path between parameters `a < b`, keeping every vertex strictly
    /// inside the window.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        check_window(a, b)?;
        let m = self.num_segments() as f64;
        let mut vertices = vec![self.point_at(a)];
        for (k, v) in self.vertices.iter().enumerate() {
            let t = k as f64 / m;
            if t > a && t < b {
                vertices.push(v.clone());
            }
        }
        vertices.push(self.point_at(b));
        Self::new(vertices)
    }

    /// The vertex-reversed curve.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { dim: self.dim, vertices }
    }

    /// Applies the row-major `d x d` matrix to every vertex.
    pub fn transformed(&self, matrix: &[f64]) -> Self {
        let d = self.dim;
        assert_eq!(matrix.len(), d * d, "transform must be {d}x{d}");
        let vertices = self
            .vertices
            .iter()
            .map(|v| (0..d).map(|r| linalg::dot(&matrix[r * d..(r + 1) * d], v)).collect())
            .collect();
        Self { dim: d, vertices }
    }

    /// Keeps only the listed coordinates, in order.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        if coords.iter().any(|&c| c >= self.dim) {
            return Err(Error::InvalidInput("projection coordinate out of range".into()));
        }
        Self::new(self.vertices.iter().map(|v| coords.iter().map(|&c| v[c]).collect()).collect())
    }
}

fn check_window(a: f64, b: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
        return Err(Error::InvalidInput(format!(
            "restriction window must satisfy 0 <= a < b <= 1, got [{a}, {b}]"
        )));
    }
    Ok(())
}

type PointFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
type DerivativeFn = Arc<dyn Fn(f64, usize) -> Vec<f64> + Send + Sync>;

/// User-supplied parametric curve on `[0, 1]`.
#[derive(Clone)]
pub struct CustomCurve {
    name: String,
    dim: usize,
    point: PointFn,
    /// `derivative(t, order)` for `order >= 1`.
    derivative: Option<DerivativeFn>,
}

impl CustomCurve {
    pub const FD_STEP: f64 = 1e-6;

    pub fn new(
        name: impl Into<String>,
        dim: usize,
        point: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dim, point: Arc::new(point), derivative: None }
    }

    /// Supplies exact derivatives of every order. Rejected unless the first
    /// derivative agrees with a central difference of the point function
    /// (relative error below `1e-6` at step `1e-5`) at a handful of
    /// deterministic pseudo-random parameters.
    pub fn with_derivatives(
        mut self,
        derivative: impl Fn(f64, usize) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        self.derivative = Some(Arc::new(derivative));
        self.check_derivative_consistency()?;
        Ok(self)
    }

    fn check_derivative_consistency(&self) -> Result<()> {
        let deriv = self.derivative.as_ref().expect("derivative present");
        let h = 1e-5;
        for i in 0..8 {
            // golden-ratio sequence, kept away from the endpoints
            let t = 0.05 + 0.9 * ((i as f64 * 0.618_033_988_749_895) % 1.0);
            let exact = deriv(t, 1);
            let plus = (self.point)(t + h);
            let minus = (self.point)(t - h);
            if exact.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: exact.len() });
            }
            let fd: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect();
            let err = linalg::norm(&linalg::sub(&exact, &fd));
            let scale = linalg::norm(&exact).max(1.0);
            if err / scale >= 1e-6 {
                return Err(Error::InvalidInput(format!(
                    "derivative of `{}` disagrees with central differences at t = {t:.4} \
                     (relative error {:.2e})",
                    self.name,
                    err / scale
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CustomCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomCurve")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("exact_derivatives", &self.derivative.is_some())
            .finish()
    }
}

/// A parametric curve `x: [0, 1] -> R^d`.
#[derive(Debug, Clone)]
pub enum CurveFamily {
    /// `(t, t^2, ..., t^d)`.
    Moment { dim: usize },
    /// `x_i(t) = log(1 + a_i t)` with distinct non-negative `a_i`.
    Log { params: Vec<f64> },
    /// `(cos 2πt, sin 2πt)`.
    Circle2d,
    /// `(cos 2πt, sin 2πt, cos 6πt)`.
    Circle3dTriple,
    Polyline(PiecewiseLinearCurve),
    Custom(CustomCurve),
    /// `t ↦ inner(a + t (b - a))`.
    Restricted { inner: Box<CurveFamily>, a: f64, b: f64 },
}

impl CurveFamily {
    pub fn moment(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("moment curve needs dim >= 1".into()));
        }
        Ok(Self::Moment { dim })
    }

    pub fn log(params: Vec<f64>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidInput("log curve needs at least one parameter".into()));
        }
        if params.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(Error::InvalidInput("log-curve parameters must be non-negative".into()));
        }
        for (i, a) in params.iter().enumerate() {
            if params[i + 1..].contains(a) {
                return Err(Error::InvalidInput("log-curve parameters must be distinct".into()));
            }
        }
        Ok(Self::Log { params })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Moment { dim } => *dim,
            Self::Log { params } => params.len(),
            Self::Circle2d => 2,
            Self::Circle3dTriple => 3,
            Self::Polyline(pl) => pl.dim(),
            Self::Custom(c) => c.dim,
            Self::Restricted { inner, .. } => inner.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Moment { dim } => format!("moment({dim})"),
            Self::Log { params } => {
                let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
                format!("log({})", ps.join(","))
            }
            Self::Circle2d => "circle2d".into(),
            Self::Circle3dTriple => "circle3d_triple".into(),
            Self::Polyline(pl) => format!("pl({} vertices)", pl.vertices().len()),
            Self::Custom(c) => c.name.clone(),
            Self::Restricted { inner, a, b } => format!("{}|[{a},{b}]", inner.name()),
        }
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Moment { dim } => (1..=*dim as i32).map(|p| t.powi(p)).collect(),
            Self::Log { params } => params.iter().map(|a| (a * t).ln_1p()).collect(),
            Self::Circle2d => vec![(2.0 * PI * t).cos(), (2.0 * PI * t).sin()],
            Self::Circle3dTriple => {
                vec![(2.0 * PI * t).cos(), (2.0 * PI * t).sin(), (6.0 * PI * t).cos()]
            }
            Self::Polyline(pl) => pl.point_at(t),
            Self::Custom(c) => (c.point)(t),
            Self::Restricted { inner, a, b } => inner.point(a + t * (b - a)),
        }
    }

    /// Whether derivatives of the given order are known exactly (rather than
    /// by finite differences).
    pub fn has_exact_derivative(&self, order: usize) -> bool {
        match self {
            Self::Custom(c) => c.derivative.is_some(),
            Self::Restricted { inner, .. } => inner.has_exact_derivative(order),
            _ => true,
        }
    }

    /// The `order`-th derivative at `t`, or `None` when it is unavailable.
    ///
    /// Custom curves without a derivative function fall back to a central
    /// difference (step `1e-6`) for the first derivative only. Polygonal
    /// curves report the right-hand velocity and zero higher derivatives.
    pub fn derivative(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        if order == 0 {
            return Some(self.point(t));
        }
        let k = order as i32;
        let out = match self {
            Self::Moment { dim } => (1..=*dim)
                .map(|p| {
                    if order > p {
                        0.0
                    } else {
                        falling_factorial(p, order) * t.powi(p as i32 - k)
                    }
                })
                .collect(),
            Self::Log { params } => {
                let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                let coef = sign * linalg::factorial(order - 1);
                params.iter().map(|a| coef * (a / (1.0 + a * t)).powi(k)).collect()
            }
            Self::Circle2d => {
                let (w, phase) = (2.0 * PI, order as f64 * PI / 2.0);
                let s = w.powi(k);
                vec![s * (w * t + phase).cos(), s * (w * t + phase).sin()]
            }
            Self::Circle3dTriple => {
                let phase = order as f64 * PI / 2.0;
                let (w, w3) = (2.0 * PI, 6.0 * PI);
                vec![
                    w.powi(k) * (w * t + phase).cos(),
                    w.powi(k) * (w * t + phase).sin(),
                    w3.powi(k) * (w3 * t + phase).cos(),
                ]
            }
            Self::Polyline(pl) => {
                if order == 1 {
                    pl.velocity_at(t)
                } else {
                    vec![0.0; pl.dim()]
                }
            }
            Self::Custom(c) => match &c.derivative {
                Some(f) => f(t, order),
                None if order == 1 => {
                    let h = CustomCurve::FD_STEP;
                    let (lo, hi) = ((t - h).max(0.0), (t + h).min(1.0));
                    let (p, m) = ((c.point)(hi), (c.point)(lo));
                    p.iter().zip(&m).map(|(p, m)| (p - m) / (hi - lo)).collect()
                }
                None => return None,
            },
            Self::Restricted { inner, a, b } => {
                let scale = (b - a).powi(k);
                inner.derivative(a + t * (b - a), order)?.into_iter().map(|x| x * scale).collect()
            }
        };
        Some(out)
    }

    /// `x(1) - x(0)`.
    pub fn displacement(&self) -> Vec<f64> {
        linalg::sub(&self.point(1.0), &self.point(0.0))
    }

    /// Uniform-parameter polygonal approximation through `x(k / n)`,
    /// `k = 0..=n`.
    pub fn discretize(&self, n: usize) -> Result<PiecewiseLinearCurve> {
        if n == 0 {
            return Err(Error::InvalidInput("discretization needs n >= 1".into()));
        }
        let vertices = (0..=n)
            .map(|k| self.point(if k == n { 1.0 } else { k as f64 / n as f64 }))
            .collect();
        PiecewiseLinearCurve::new(vertices)
    }

    /// Polygonal data for the signature routes: polygonal curves (and their
    /// restrictions) are used exactly, everything else is discretized.
    pub fn to_polyline(&self, n: usize) -> Result<PiecewiseLinearCurve> {
        match self {
            Self::Polyline(pl) => Ok(pl.clone()),
            Self::Restricted { inner, a, b } => match inner.as_ref() {
                Self::Polyline(pl) => pl.restrict(*a, *b),
                _ => self.discretize(n),
            },
            _ => self.discretize(n),
        }
    }

    /// Reparametrized restriction `t ↦ x(a + t (b - a))`. Nested restrictions
    /// are flattened onto the underlying curve.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        check_window(a, b)?;
        Ok(match self {
            Self::Restricted { inner, a: a0, b: b0 } => {
                let w = b0 - a0;
                Self::Restricted { inner: inner.clone(), a: a0 + a * w, b: a0 + b * w }
            }
            other => Self::Restricted { inner: Box::new(other.clone()), a, b },
        })
    }

    pub fn is_polyline(&self) -> bool {
        match self {
            Self::Polyline(_) => true,
            Self::Restricted { inner, .. } => inner.is_polyline(),
            _ => false,
        }
    }
}

fn falling_factorial(p: usize, k: usize) -> f64 {
    (p + 1 - k..=p).map(|i| i as f64).product()
}

/// Curve-definition file:
/// `{"kind": ..., "dim": int, "params": [...], "vertices": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl CurveSpec {
    pub const KINDS: [&'static str; 6] = ["moment", "log", "circle2d", "circle3d_triple", "pl", "samples"];

    pub fn build(&self) -> Result<CurveFamily> {
        let check_dim = |natural: usize| match self.dim {
            Some(d) if d != natural => Err(Error::DimensionMismatch { expected: natural, found: d }),
            _ => Ok(()),
        };
        match self.kind.as_str() {
            "moment" => {
                let dim = self
                    .dim
                    .ok_or_else(|| Error::InvalidInput("moment curve needs `dim`".into()))?;
                CurveFamily::moment(dim)
            }
            "log" => {
                let params = self
                    .params
                    .clone()
                    .ok_or_else(|| Error::InvalidInput("log curve needs `params`".into()))?;
                check_dim(params.len())?;
                CurveFamily::log(params)
            }
            "circle2d" => {
                check_dim(2)?;
                Ok(CurveFamily::Circle2d)
            }
            "circle3d_triple" => {
                check_dim(3)?;
                Ok(CurveFamily::Circle3dTriple)
            }
            "pl" | "samples" => {
                let vertices = self
                    .vertices
                    .clone()
                    .ok_or_else(|| Error::InvalidInput(format!("`{}` curve needs `vertices`", self.kind)))?;
                let pl = PiecewiseLinearCurve::new(vertices)?;
                check_dim(pl.dim())?;
                Ok(CurveFamily::Polyline(pl))
            }
            other => Err(Error::InvalidInput(format!(
                "unknown curve kind `{other}` (expected one of {})",
                Self::KINDS.join(", ")
            ))),
        }
    }
}


/// Named curves used throughout the tests and the command-line tool.
pub mod examples {
    use super::{CurveFamily, CustomCurve, PiecewiseLinearCurve};

    /// Two loops in the plane: a 3x2 rectangle traced first, then a 5x6
    /// rectangle with a 3x2 notch cut from its top edge. Its hull is the
    /// 5x6 rectangle and its total signed area is 6 + 24 = 30, yet the
    /// inner loop is not on the hull boundary.
    pub fn double_loop() -> PiecewiseLinearCurve {
        let v = [
            (0, 0), (3, 0), (3, 2), (0, 2), (0, 0), (3, 0), (5, 0), (5, 6), (4, 6), (4, 4),
            (1, 4), (1, 6), (0, 6), (0, 0),
        ];
        PiecewiseLinearCurve::new(v.iter().map(|&(x, y)| vec![x as f64, y as f64]).collect())
            .expect("valid fixture")
    }

    /// `(t, (t - 1/2)^4)`: strictly positive determinant condition holds
    /// but the torsion minor vanishes at `t = 1/2`.
    pub fn quartic_graph() -> CurveFamily {
        let curve = CustomCurve::new("quartic_graph", 2, |t| vec![t, (t - 0.5).powi(4)])
            .with_derivatives(|t, k| {
                let s = t - 0.5;
                match k {
                    1 => vec![1.0, 4.0 * s.powi(3)],
                    2 => vec![0.0, 12.0 * s * s],
                    3 => vec![0.0, 24.0 * s],
                    4 => vec![0.0, 24.0],
                    _ => vec![0.0, 0.0],
                }
            })
            .expect("consistent derivatives");
        CurveFamily::Custom(curve)
    }

    /// Segment, quarter arc in the plane `x_3 = 1/2`, segment: cyclic in
    /// `R^3` but not d-order, since the arc is planar.
    pub fn segment_arc_segment(arc_samples: usize) -> PiecewiseLinearCurve {
        let mut v = vec![vec![0.0, 0.0, 0.0]];
        for k in 0..=arc_samples {
            let th = std::f64::consts::FRAC_PI_2 * k as f64 / arc_samples as f64;
            v.push(vec![th.cos(), th.sin(), 0.5]);
        }
        v.push(vec![0.0, 0.0, 1.5]);
        PiecewiseLinearCurve::new(v).expect("valid fixture")
    }
}
