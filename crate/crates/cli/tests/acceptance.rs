//! Acceptance criteria, one verdict line each:
//!
//! ```text
//! cargo test -p sigvol-cli --test acceptance -- --nocapture --test-threads 1
//! ```

use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;
use sigvol::classify::{self, cyclic_relaxed_test};
use sigvol::curve::{examples, CurveFamily};
use sigvol::decomposition::{decompose_even, decompose_odd, volume_via_eigenvalues};
use sigvol::polytope::{cyclic_hull_volume, hull_volume_exact};
use sigvol::signature::{alt, alt_volume_quadrature, injections, pl_alternating, pl_signature, top_alternating};
use sigvol::PiecewiseLinearCurve;

const MOMENT3: f64 = 1.0 / 180.0;

fn verdict(id: &str, ok: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id}: {detail}");
}

fn sigvol_json(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_sigvol"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).expect("JSON report");
    (out.status.code().unwrap(), v)
}

fn oracle_value(v: &Value, name: &str) -> Option<f64> {
    v["oracles"].as_array()?.iter().find(|o| o["name"] == name)?["value"].as_f64()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_curve(rng: &mut impl Rng, d: usize, max_vertices: usize) -> PiecewiseLinearCurve {
    let m = rng.random_range(2..=max_vertices);
    PiecewiseLinearCurve::new((0..m).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
        .unwrap()
}

fn random_rotation(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let qr = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            let c = -q.column(j);
            q.set_column(j, &c);
        }
    }
    if q.determinant() < 0.0 {
        let c = -q.column(0);
        q.set_column(0, &c);
    }
    q
}

/// Shoelace area of the curve projected onto the plane orthogonal to its
/// displacement, by an explicit orthonormal frame.
fn projected_area(pl: &PiecewiseLinearCurve) -> f64 {
    let disp = pl.displacement();
    let e3: Vec<f64> = {
        let n = disp.iter().map(|x| x * x).sum::<f64>().sqrt();
        disp.iter().map(|x| x / n).collect()
    };
    // Gram–Schmidt against e3, starting from the standard basis
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for i in 0..3 {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        for b in frame.iter().chain(std::iter::once(&e3)) {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 && frame.len() < 2 {
            frame.push(v.iter().map(|x| x / n).collect());
        }
    }
    // (e1, e2, e3) right-handed
    let cross = [
        frame[0][1] * frame[1][2] - frame[0][2] * frame[1][1],
        frame[0][2] * frame[1][0] - frame[0][0] * frame[1][2],
        frame[0][0] * frame[1][1] - frame[0][1] * frame[1][0],
    ];
    let orient: f64 = cross.iter().zip(&e3).map(|(x, y)| x * y).sum();
    let uv: Vec<(f64, f64)> = pl
        .vertices()
        .iter()
        .map(|p| {
            let u: f64 = p.iter().zip(&frame[0]).map(|(x, y)| x * y).sum();
            let v: f64 = p.iter().zip(&frame[1]).map(|(x, y)| x * y).sum();
            (u, orient.signum() * v)
        })
        .collect();
    uv.windows(2).map(|w| 0.5 * (w[0].0 * w[1].1 - w[0].1 * w[1].0)).sum::<f64>()
        + 0.5 * (uv[uv.len() - 1].0 * uv[0].1 - uv[uv.len() - 1].1 * uv[0].0)
}

#[test]
fn criterion_1_moment_curve_volume() {
    let start = Instant::now();
    let (code, v) = sigvol_json(&["compare", "--builtin", "moment", "--dim", "3", "--n", "2000", "--tol", "1e-4"]);
    let secs = start.elapsed().as_secs_f64();
    let vals: Vec<(&str, Option<f64>)> = ["alpha_pl", "alpha_quadrature", "cyclic_polytope"]
        .iter()
        .map(|&n| (n, oracle_value(&v, n)))
        .collect();
    let all: Vec<f64> = vals.iter().filter_map(|(_, x)| *x).collect();
    let spread = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - all.iter().cloned().fold(f64::INFINITY, f64::min);
    let off = all.iter().map(|x| (x - MOMENT3).abs()).fold(0.0, f64::max);
    let ok = all.len() == 3 && spread <= 1e-4 && off <= 2e-4 && secs <= 60.0 && code == 0;
    verdict(
        "1",
        ok,
        format!("{vals:?}; spread {spread:.3e} <= 1e-4, max |v - 1/180| {off:.3e} <= 2e-4, runtime {secs:.1}s <= 60s"),
    );
}

#[test]
fn criterion_2_eigenvalue_lambda() {
    let pl = CurveFamily::moment(3).unwrap().discretize(2000).unwrap();
    let ev = volume_via_eigenvalues(&pl).unwrap();
    let lambda = ev.lambdas[0];
    let target = 1.0 / (30.0 * 3f64.sqrt());
    let shoelace = projected_area(&pl);
    verdict(
        "2 (lambda_1)",
        (lambda - target).abs() <= 1e-6,
        format!(
            "lambda_1 = {lambda:.9} vs 1/(30 sqrt 3) = {target:.9} (tol 1e-6); independent shoelace area of the \
             projection = {shoelace:.9}, 1/(60 sqrt 3) = {:.9}",
            1.0 / (60.0 * 3f64.sqrt())
        ),
    );
}

#[test]
fn criterion_2_eigenvalue_volume() {
    let pl = CurveFamily::moment(3).unwrap().discretize(2000).unwrap();
    let ev = volume_via_eigenvalues(&pl).unwrap();
    let direct = top_alternating(&pl).unwrap();
    let diff = (ev.alpha - direct).abs();
    verdict("2 (volume)", diff <= 1e-6, format!("eigen {:.12e} vs alpha_pl {direct:.12e}, diff {diff:.2e} <= 1e-6", ev.alpha));
}

#[test]
fn criterion_3_zonoid_identity() {
    let (_, v) = sigvol_json(&["zonoid", "--builtin", "moment", "--dim", "2", "--n", "2000"]);
    let z = v["zonotope_volume"].as_f64().unwrap();
    let alpha = v["alpha_d"].as_f64().unwrap();
    let (d1, d2) = ((z - 1.0 / 3.0).abs(), (z - 2.0 * alpha).abs());
    verdict(
        "3",
        d1 <= 1e-5 && d2 <= 1e-8,
        format!("vol(Z) = {z:.12}; |vol - 1/3| = {d1:.2e} <= 1e-5, |vol - 2 alpha| = {d2:.2e} <= 1e-8"),
    );
}

#[test]
fn criterion_4_counterexample() {
    let c = CurveFamily::Circle3dTriple;
    let q = alt_volume_quadrature(&c, 24).unwrap();
    let v1 = hull_volume_exact(c.discretize(2000).unwrap().vertices()).unwrap().volume;
    let v2 = hull_volume_exact(c.discretize(4000).unwrap().vertices()).unwrap().volume;
    let rel = (v2 - v1).abs() / v2;
    verdict(
        "4",
        q.abs() <= 1e-6 && v1 > 0.5 && rel <= 0.01,
        format!("|alpha| = {:.2e} <= 1e-6; hull(2000) = {v1:.6} > 0.5; hull(4000) = {v2:.6}, rel change {rel:.2e} <= 1%", q.abs()),
    );
}

#[test]
fn criterion_5_double_loop() {
    let pl = examples::double_loop();
    let alpha = top_alternating(&pl).unwrap();
    let hull = hull_volume_exact(pl.vertices()).unwrap().volume;
    // shoelace: the signed area of a closed polygon
    let v = pl.vertices();
    let shoelace: f64 = v.windows(2).map(|w| 0.5 * (w[0][0] * w[1][1] - w[0][1] * w[1][0])).sum();
    let cyc = cyclic_relaxed_test(v).unwrap();
    let ok = (alpha - 30.0).abs() <= 1e-10
        && (hull - 30.0).abs() <= 1e-10
        && (shoelace - 30.0).abs() <= 1e-10
        && cyc.fails()
        && cyc.witness_det.is_some_and(|d| d < 0.0)
        && !cyc.witness_indices.is_empty();
    verdict(
        "5",
        ok,
        format!(
            "alpha = {alpha}, hull = {hull}, shoelace = {shoelace} (tol 1e-10); cyclic_relaxed {:?} at indices {:?}, det {:?}",
            cyc.status, cyc.witness_indices, cyc.witness_det
        ),
    );
}

#[test]
fn criterion_6_classification_table() {
    let mut failures = Vec::new();
    let circle = classify::classify(&CurveFamily::Circle2d, classify::default_grid(2)).unwrap();
    if !circle.d_order.holds() {
        failures.push("circle2d d_order".to_string());
    }
    if !(circle.strict_det.fails() && circle.strict_det.witness == [0.25, 0.75]) {
        failures.push(format!("circle2d strict_det {:?} {:?}", circle.strict_det.status, circle.strict_det.witness));
    }
    let quartic = examples::quartic_graph();
    let qr = classify::classify(&quartic, classify::default_grid(2)).unwrap();
    if !qr.strict_det.holds() {
        failures.push(format!("quartic strict_det {:?}", qr.strict_det.status));
    }
    if !(qr.torsion.fails() && qr.torsion.witness.first().is_some_and(|t| (t - 0.5).abs() <= 0.02)) {
        failures.push(format!("quartic torsion {:?} {:?}", qr.torsion.status, qr.torsion.witness));
    }
    let mut held = Vec::new();
    for c in [
        CurveFamily::moment(2).unwrap(),
        CurveFamily::moment(3).unwrap(),
        CurveFamily::moment(4).unwrap(),
        CurveFamily::log(vec![1.0, 2.0, 3.0]).unwrap(),
    ] {
        let r = classify::classify(&c, classify::default_grid(c.dim())).unwrap();
        for (name, res) in [("torsion", &r.torsion), ("strict_det", &r.strict_det), ("d_order", &r.d_order), ("cyclic", &r.cyclic_relaxed)] {
            if res.fails() {
                failures.push(format!("{} {name} fails at {:?}", c.name(), res.witness));
            }
        }
        held.push(format!("{} ({:?})", c.name(), r.orientation));
    }
    verdict(
        "6",
        failures.is_empty(),
        format!("circle2d Ord/SDet-fail at (0.25, 0.75), quartic SDet/Tor-fail near 0.5, all classes hold for {held:?}; failures {failures:?}"),
    );
}

#[test]
fn criterion_7a_exterior_matches_tensor_route() {
    let mut rng = rng(0x7A);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 1 + i % 5;
        let curve = random_curve(&mut rng, d, 8);
        let sig = pl_signature(&curve, d).unwrap();
        for k in 1..=d {
            worst = worst.max(alt(sig.level(k)).max_abs_diff(&pl_alternating(&curve, k).unwrap()));
        }
    }
    verdict("7a", worst <= 1e-11, format!("100 curves, k <= d <= 5: max abs diff {worst:.2e} <= 1e-11"));
}

#[test]
fn criterion_7b_rotation_invariance() {
    let mut rng = rng(0x7B);
    let mut worst = 0.0f64;
    for d in 2..=5 {
        let curve = random_curve(&mut rng, d, 10);
        let base = top_alternating(&curve).unwrap();
        for _ in 0..20 {
            let q = random_rotation(&mut rng, d);
            let row_major: Vec<f64> = q.transpose().iter().copied().collect();
            worst = worst.max((top_alternating(&curve.transformed(&row_major)).unwrap() - base).abs());
        }
    }
    verdict("7b", worst <= 1e-10, format!("20 rotations per d in 2..=5: max abs diff {worst:.2e} <= 1e-10"));
}

#[test]
fn criterion_7c_closed_odd_curves() {
    let mut rng = rng(0x7C);
    let mut worst = 0.0f64;
    for d in [1, 3, 5] {
        for _ in 0..30 {
            let mut v = random_curve(&mut rng, d, 10).vertices().to_vec();
            v.push(v[0].clone());
            worst = worst.max(top_alternating(&PiecewiseLinearCurve::new(v).unwrap()).unwrap().abs());
        }
    }
    verdict("7c", worst <= 1e-12, format!("closed curves, d in {{1, 3, 5}}: max |alpha| {worst:.2e} <= 1e-12"));
}

#[test]
fn criterion_7d_gale_partition() {
    let mut rng = rng(0x7D);
    let mut worst = 0.0f64;
    for d in [2, 3] {
        for n in d + 1..=12 {
            for _ in 0..5 {
                let mut ts: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                ts.sort_by(f64::total_cmp);
                // moment-curve points under an orientation-preserving shear
                let shear: Vec<f64> = (0..d * d)
                    .map(|k| match (k / d, k % d) {
                        (i, j) if i == j => rng.random_range(0.5..2.0),
                        (i, j) if i < j => rng.random_range(-1.0..1.0),
                        _ => 0.0,
                    })
                    .collect();
                let pts: Vec<Vec<f64>> = ts
                    .iter()
                    .map(|&t| (0..d).map(|i| (0..d).map(|j| shear[i * d + j] * t.powi(j as i32 + 1)).sum()).collect())
                    .collect();
                let tri = cyclic_hull_volume(&pts).unwrap();
                worst = worst.max((tri - hull_volume_exact(&pts).unwrap().volume).abs());
            }
        }
    }
    verdict("7d", worst <= 1e-10, format!("d in {{2, 3}}, n <= 12: max |triangulation - exact hull| {worst:.2e} <= 1e-10"));
}

#[test]
fn criterion_7e_decompositions() {
    let mut rng = rng(0x7E);
    let mut worst = 0.0f64;
    for i in 0..40 {
        let d = 1 + i % 5;
        let curve = random_curve(&mut rng, d, 8);
        let sig = pl_signature(&curve, d).unwrap();
        for k in 1..=d {
            let direct = alt(sig.level(k));
            for p in injections(d, k) {
                let got = if k % 2 == 0 { decompose_even(&curve, &p) } else { decompose_odd(&curve, &p) }.unwrap();
                worst = worst.max((got - direct.get(&p)).abs());
            }
        }
    }
    verdict("7e", worst <= 1e-9, format!("even/odd decompositions vs alt(signature): max abs diff {worst:.2e} <= 1e-9"));
}

#[test]
fn criterion_8_log_curve() {
    let c = CurveFamily::log(vec![1.0, 2.0, 3.0]).unwrap();
    let pl = c.discretize(2000).unwrap();
    let alpha = top_alternating(&pl).unwrap();
    let quad = alt_volume_quadrature(&c, 24).unwrap();
    // the curve is negatively oriented; reflect x_1 for the polytope oracle
    let pts: Vec<Vec<f64>> = pl
        .vertices()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p[0] = -p[0];
            p
        })
        .collect();
    let cyc = cyclic_hull_volume(&pts).unwrap();
    let (dq, dc) = ((alpha - quad).abs(), (alpha.abs() - cyc).abs());
    verdict(
        "8",
        dq <= 1e-6 && dc <= 1e-4,
        format!("alpha_pl = {alpha:.12e}, quadrature = {quad:.12e} (diff {dq:.2e} <= 1e-6), cyclic = {cyc:.12e} (diff {dc:.2e} <= 1e-4)"),
    );
}

