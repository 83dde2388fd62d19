//! Gauss–Legendre rules and nested quadrature over the ordered simplex.

use crate::linalg;

/// Gauss–Legendre nodes and weights on `[0, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// `∫_{0 < t_1 < ... < t_d < 1} det(v(t_1), ..., v(t_d)) dt` with `nodes`
/// Gauss–Legendre points per axis, using the substitution
/// `t_j = t_{j+1} s_j` from the outermost variable inwards.
pub fn ordered_simplex_det_integral(
    dim: usize,
    nodes: usize,
    v: &dyn Fn(f64) -> Vec<f64>,
) -> f64 {
    let (xs, ws) = gauss_legendre(nodes);
    let mut cols = vec![vec![0.0; dim]; dim];
    nest(dim, 1.0, &xs, &ws, &mut cols, v)
}

fn nest(
    level: usize,
    upper: f64,
    xs: &[f64],
    ws: &[f64],
    cols: &mut Vec<Vec<f64>>,
    v: &dyn Fn(f64) -> Vec<f64>,
) -> f64 {
    if level == 0 {
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        return linalg::det_full(&refs);
    }
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        let t = upper * x;
        cols[level - 1] = v(t);
        acc += w * upper * nest(level - 1, t, xs, ws, cols, v);
    }
    acc
}
