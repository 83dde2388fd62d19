use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;
use sigvol::classify::{self, ClassResult};
use sigvol::decomposition::{self, align_displacement, skew_spectrum, volume_via_eigenvalues};
use sigvol::polytope::{cyclic_hull_volume, hull_volume_exact, hull_volume_montecarlo};
use sigvol::signature::{alt_volume_quadrature, signed_area_matrix, top_alternating, MAX_QUADRATURE_DIM};
use sigvol::zonoid::{self, moment_zonoid_boundary, zonotope_of_curve, zonotope_polygon, zonotope_volume};
use sigvol::{CurveFamily, Error, PiecewiseLinearCurve};

use crate::output::{fmt_f64, Table};
use crate::{CliError, CommandKind, PlotKind, Report, RunConfig};

pub const DEFAULT_N: usize = 2000;
pub const DEFAULT_ROWS: usize = 200;
pub const QUADRATURE_NODES: usize = 24;

pub fn execute(cfg: &RunConfig, curve: &CurveFamily) -> Result<Report, CliError> {
    match cfg.command {
        CommandKind::Volume => volume(cfg, curve),
        CommandKind::Classify => classify(cfg, curve),
        CommandKind::Compare { trials } => compare(cfg, curve, trials),
        CommandKind::Zonoid => zonoid(cfg, curve),
        CommandKind::Decompose => decompose(cfg, curve),
        CommandKind::Plotdata { plot } => plotdata(cfg, curve, plot),
        CommandKind::Subpath { grid } => subpath(cfg, curve, grid),
    }
}

fn report<T: Serialize>(value: &T, exit_code: i32) -> Report {
    Report { value: serde_json::to_value(value).expect("plain data"), table: None, tabular: false, exit_code }
}

/// Quadrature value when the curve is smooth with known derivatives and
/// `d <= 4`; polygonal curves are left to the exact route.
fn quadrature(curve: &CurveFamily) -> Option<f64> {
    if curve.is_polyline() || curve.dim() > MAX_QUADRATURE_DIM || !curve.has_exact_derivative(1) {
        return None;
    }
    alt_volume_quadrature(curve, QUADRATURE_NODES).ok()
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct VolumeReport {
    curve: String,
    d: usize,
    n: usize,
    method: &'static str,
    alpha_d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_quadrature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature_nodes: Option<usize>,
}

fn volume(cfg: &RunConfig, curve: &CurveFamily) -> Result<Report, CliError> {
    let pl = curve.to_polyline(cfg.n.unwrap_or(DEFAULT_N))?;
    let alpha_quadrature = quadrature(curve);
    Ok(report(
        &VolumeReport {
            curve: curve.name(),
            d: pl.dim(),
            n: pl.num_segments(),
            method: "pl_exterior",
            alpha_d: top_alternating(&pl)?,
            alpha_quadrature,
            quadrature_nodes: alpha_quadrature.map(|_| QUADRATURE_NODES),
        },
        0,
    ))
}

#[derive(Serialize)]
struct Oracle {
    name: &'static str,
    applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl Oracle {
    fn value(name: &'static str, value: f64) -> Self {
        Self { name, applicable: true, value: Some(value), stderr: None, note: None }
    }

    fn inapplicable(name: &'static str, note: impl Into<String>) -> Self {
        Self { name, applicable: false, value: None, stderr: None, note: Some(note.into()) }
    }

    /// Signature values are signed; hull volumes are not.
    fn is_signature(&self) -> bool {
        self.name.starts_with("alpha")
    }
}

#[derive(Serialize)]
struct Difference {
    a: &'static str,
    b: &'static str,
    abs_diff: f64,
    allowed: f64,
    agree: bool,
}

#[derive(Serialize)]
struct CompareReport {
    curve: String,
    d: usize,
    n: usize,
    tolerance: f64,
    oracles: Vec<Oracle>,
    differences: Vec<Difference>,
    agree: bool,
}

fn compare(cfg: &RunConfig, curve: &CurveFamily, trials: u64) -> Result<Report, CliError> {
    let pl = curve.to_polyline(cfg.n.unwrap_or(DEFAULT_N))?;
    let d = pl.dim();
    let alpha = top_alternating(&pl)?;
    let mut oracles = vec![Oracle::value("alpha_pl", alpha)];
    oracles.push(match quadrature(curve) {
        Some(q) => Oracle::value("alpha_quadrature", q),
        None => Oracle::inapplicable("alpha_quadrature", "needs a smooth curve with d <= 4"),
    });

    // The cyclic formula expects positively oriented points.
    let mut points = pl.vertices().to_vec();
    if alpha < 0.0 {
        points.iter_mut().for_each(|p| p[0] = -p[0]);
    }
    oracles.push(match cyclic_hull_volume(&points) {
        Ok(v) => Oracle::value("cyclic_polytope", v),
        Err(e) => Oracle::inapplicable("cyclic_polytope", e.to_string()),
    });
    oracles.push(if d == 2 || d == 3 {
        let h = hull_volume_exact(pl.vertices())?;
        Oracle::value("exact_hull", h.volume)
    } else {
        Oracle::inapplicable("exact_hull", "exact hulls cover d = 2, 3")
    });
    oracles.push(if d >= 4 {
        match hull_volume_montecarlo(pl.vertices(), trials, cfg.seed) {
            Ok(mc) => Oracle { stderr: Some(mc.stderr), ..Oracle::value("monte_carlo", mc.volume) },
            Err(e) => Oracle::inapplicable("monte_carlo", e.to_string()),
        }
    } else {
        Oracle::inapplicable("monte_carlo", "used for d >= 4")
    });

    let mut differences = Vec::new();
    let live: Vec<&Oracle> = oracles.iter().filter(|o| o.applicable).collect();
    for (i, a) in live.iter().enumerate() {
        for b in &live[i + 1..] {
            let (mut x, mut y) = (a.value.unwrap(), b.value.unwrap());
            if !(a.is_signature() && b.is_signature()) {
                x = x.abs();
                y = y.abs();
            }
            let abs_diff = (x - y).abs();
            // Monte-Carlo estimates get three standard errors on top.
            let allowed = cfg.tolerance + 3.0 * (a.stderr.unwrap_or(0.0) + b.stderr.unwrap_or(0.0));
            differences.push(Difference { a: a.name, b: b.name, abs_diff, allowed, agree: abs_diff <= allowed });
        }
    }
    let agree = differences.iter().all(|d| d.agree);
    let r = CompareReport {
        curve: curve.name(),
        d,
        n: pl.num_segments(),
        tolerance: cfg.tolerance,
        oracles,
        differences,
        agree,
    };
    Ok(report(&r, if agree { 0 } else { 1 }))
}

fn class_row(name: &str, r: &ClassResult) -> Vec<String> {
    let witness: Vec<String> = r.witness.iter().map(|&t| fmt_f64(t)).collect();
    vec![
        name.to_string(),
        serde_json::to_value(r.status).unwrap().as_str().unwrap_or_default().to_string(),
        witness.join(" "),
        r.min_det.map(fmt_f64).unwrap_or_default(),
        r.witness_det.map(fmt_f64).unwrap_or_default(),
        r.samples_used.to_string(),
        r.note.clone().unwrap_or_default(),
    ]
}

fn classify(cfg: &RunConfig, curve: &CurveFamily) -> Result<Report, CliError> {
    let d = curve.dim();
    let grid = cfg.n.unwrap_or_else(|| classify::default_grid(d));
    let rep = classify::classify(curve, grid)?;
    let mut value = serde_json::to_value(&rep).expect("plain data");
    if d == 2 || d == 3 {
        let pl = if curve.is_polyline() { curve.to_polyline(grid)? } else { curve.discretize(grid)? };
        let boundary = match classify::boundary_membership(pl.vertices()) {
            Ok(b) => serde_json::to_value(b).expect("plain data"),
            Err(e) => json!({ "error": e.to_string() }),
        };
        value["boundary"] = boundary;
    }
    let mut table = Table::new(&["class", "status", "witness", "min_det", "witness_det", "samples_used", "note"]);
    for (name, r) in [
        ("torsion", &rep.torsion),
        ("strict_det", &rep.strict_det),
        ("d_order", &rep.d_order),
        ("cyclic_relaxed", &rep.cyclic_relaxed),
    ] {
        table.push(class_row(name, r));
    }
    Ok(Report { value, table: Some(table), tabular: false, exit_code: 0 })
}

/// Default resolution: the zonotope volume sums over all `d`-subsets of
/// segments, so higher dimensions get coarser polygons.
fn zonoid_default_n(d: usize) -> usize {
    match d {
        0..=2 => 2000,
        3 => 600,
        4 => 400,
        _ => 60,
    }
}

#[derive(Serialize)]
struct ZonoidReport {
    curve: String,
    d: usize,
    n: usize,
    generators: usize,
    zonotope_volume: f64,
    degenerate: bool,
    alpha_d: f64,
    d_factorial_alpha: f64,
    abs_diff: f64,
    /// `h(e_i)` for the coordinate directions.
    support: Vec<f64>,
}

fn zonoid(cfg: &RunConfig, curve: &CurveFamily) -> Result<Report, CliError> {
    let d = curve.dim();
    let pl = curve.to_polyline(cfg.n.unwrap_or_else(|| zonoid_default_n(d)))?;
    let z = zonotope_of_curve(&pl)?;
    let vol = zonotope_volume(&z);
    let alpha = top_alternating(&pl)?;
    let scaled = sigvol::linalg::factorial(d) * alpha.abs();
    let support = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            zonoid::support(&z, &e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(report(
        &ZonoidReport {
            curve: curve.name(),
            d,
            n: pl.num_segments(),
            generators: z.generators().len(),
            zonotope_volume: vol.volume,
            degenerate: vol.degenerate,
            alpha_d: alpha,
            d_factorial_alpha: scaled,
            abs_diff: (vol.volume - scaled).abs(),
            support,
        },
        0,
    ))
}

#[derive(Serialize)]
struct DecomposeReport {
    curve: String,
    d: usize,
    n: usize,
    alpha_pl: f64,
    alpha_eigen: f64,
    abs_diff: f64,
    volume: f64,
    constant: f64,
    lambdas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    displacement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pfaffian: Option<f64>,
    signed_area_matrix: Vec<Vec<f64>>,
    /// Matrix whose spectrum gives `lambdas`: the signed-area matrix itself
    /// for even `d`, that of the displacement-aligned projection for odd `d`.
    reduced_matrix: Vec<Vec<f64>>,
    /// `Qᵀ A Q` is block diagonal.
    q: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alignment: Option<Vec<Vec<f64>>>,
}

fn decompose(cfg: &RunConfig, curve: &CurveFamily) -> Result<Report, CliError> {
    let pl = curve.to_polyline(cfg.n.unwrap_or(DEFAULT_N))?;
    let d = pl.dim();
    let a = signed_area_matrix(&pl);
    let alpha = top_alternating(&pl)?;
    let ev = volume_via_eigenvalues(&pl)?;
    let aligned = match align_displacement(&pl) {
        Ok(aligned) if d % 2 == 1 && d > 1 => Some(aligned),
        Ok(_) | Err(Error::ZeroDisplacement) => None,
        Err(e) => return Err(e.into()),
    };
    let (reduced, alignment) = match aligned {
        Some(aligned) => {
            let coords: Vec<usize> = (0..d - 1).collect();
            (signed_area_matrix(&aligned.curve.project(&coords)?), Some(rows(&aligned.q)))
        }
        None => (a.clone(), None),
    };
    let spec = skew_spectrum(&reduced)?;
    let pfaffian = if d % 2 == 0 && d <= decomposition::MAX_PFAFFIAN_DIM {
        Some(decomposition::pfaffian(&a)?)
    } else {
        None
    };
    Ok(report(
        &DecomposeReport {
            curve: curve.name(),
            d,
            n: pl.num_segments(),
            alpha_pl: alpha,
            alpha_eigen: ev.alpha,
            abs_diff: (alpha - ev.alpha).abs(),
            volume: ev.volume,
            constant: ev.constant,
            lambdas: ev.lambdas,
            displacement: ev.displacement,
            pfaffian,
            signed_area_matrix: rows(&a),
            reduced_matrix: rows(&reduced),
            q: rows(&spec.q),
            alignment,
        },
        0,
    ))
}

/// Parameters and points: the vertices of polygonal curves, otherwise a
/// uniform grid of `rows` parameters.
fn samples(curve: &CurveFamily, rows: usize) -> Result<(Vec<f64>, PiecewiseLinearCurve), CliError> {
    let pl = if curve.is_polyline() { curve.to_polyline(rows)? } else { curve.discretize(rows.max(2) - 1)? };
    let m = pl.num_segments() as f64;
    let ts = (0..pl.vertices().len()).map(|k| k as f64 / m).collect();
    Ok((ts, pl))
}

fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn plotdata(cfg: &RunConfig, curve: &CurveFamily, plot: PlotKind) -> Result<Report, CliError> {
    let d = curve.dim();
    let rows = cfg.n.unwrap_or(DEFAULT_ROWS);
    let (header, data): (Vec<String>, Vec<Vec<f64>>) = match plot {
        PlotKind::Trace => {
            let (ts, pl) = samples(curve, rows)?;
            let header = std::iter::once("t".to_string()).chain(numbered("x", d)).collect();
            let data = ts.iter().zip(pl.vertices()).map(|(&t, p)| std::iter::once(t).chain(p.iter().copied()).collect()).collect();
            (header, data)
        }
        PlotKind::Projection => {
            if d < 2 {
                return Err(Error::InvalidInput("projection needs d >= 2".into()).into());
            }
            let (ts, pl) = samples(curve, rows)?;
            let aligned = align_displacement(&pl)?;
            let header = std::iter::once("t".to_string()).chain(numbered("u", d - 1)).collect();
            let data = ts
                .iter()
                .zip(aligned.curve.vertices())
                .map(|(&t, p)| std::iter::once(t).chain(p[..d - 1].iter().copied()).collect())
                .collect();
            (header, data)
        }
        PlotKind::Zonoid => {
            if d != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: d }.into());
            }
            if matches!(curve, CurveFamily::Moment { .. }) {
                let header = vec!["x".into(), "y".into(), "arc".into()];
                let data = moment_zonoid_boundary(rows)
                    .into_iter()
                    .map(|(p, arc)| vec![p[0], p[1], arc as f64])
                    .collect();
                (header, data)
            } else {
                let pl = curve.to_polyline(cfg.n.unwrap_or(DEFAULT_N))?;
                let poly = zonotope_polygon(&zonotope_of_curve(&pl)?)?;
                (vec!["x".into(), "y".into()], poly.iter().map(|p| p.to_vec()).collect())
            }
        }
    };
    let mut table = Table { header: header.clone(), rows: Vec::new() };
    for row in &data {
        let cells = row
            .iter()
            .enumerate()
            .map(|(j, &x)| if header[j] == "arc" { (x as usize).to_string() } else { fmt_f64(x) })
            .collect();
        table.push(cells);
    }
    let value = json!({ "curve": curve.name(), "columns": header, "rows": data });
    Ok(Report { value, table: Some(table), tabular: true, exit_code: 0 })
}

#[derive(Serialize)]
struct Window {
    a: f64,
    b: f64,
    alpha: f64,
    hull_volume: f64,
    discrepancy: f64,
}

#[derive(Serialize)]
struct SubpathReport {
    curve: String,
    d: usize,
    n: usize,
    grid: usize,
    tolerance: f64,
    /// Sign applied to α so that positively oriented curves compare directly.
    orientation: f64,
    max_discrepancy: f64,
    worst_window: [f64; 2],
    agree: bool,
    windows: Vec<Window>,
}

fn subpath(cfg: &RunConfig, curve: &CurveFamily, grid: usize) -> Result<Report, CliError> {
    let d = curve.dim();
    if d != 2 && d != 3 {
        return Err(Error::InvalidInput(format!("subpath scan needs the exact hull oracle (d = 2, 3), got d = {d}")).into());
    }
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let sign = if top_alternating(&curve.to_polyline(n)?)? < 0.0 { -1.0 } else { 1.0 };
    let mut windows = Vec::new();
    for i in 0..grid {
        for j in i + 1..=grid {
            let (a, b) = (i as f64 / grid as f64, if j == grid { 1.0 } else { j as f64 / grid as f64 });
            let pl = curve.restrict(a, b)?.to_polyline(n)?;
            let alpha = top_alternating(&pl)?;
            let hull_volume = hull_volume_exact(pl.vertices())?.volume;
            windows.push(Window { a, b, alpha, hull_volume, discrepancy: (hull_volume - sign * alpha).abs() });
        }
    }
    let worst = windows
        .iter()
        .fold(&windows[0], |w, x| if x.discrepancy > w.discrepancy { x } else { w });
    let max_discrepancy = worst.discrepancy;
    let agree = max_discrepancy <= cfg.tolerance;
    let mut table = Table::new(&["a", "b", "alpha", "hull_volume", "discrepancy"]);
    for w in &windows {
        table.push([w.a, w.b, w.alpha, w.hull_volume, w.discrepancy].map(fmt_f64).to_vec());
    }
    let r = SubpathReport {
        curve: curve.name(),
        d,
        n,
        grid,
        tolerance: cfg.tolerance,
        orientation: sign,
        max_discrepancy,
        worst_window: [worst.a, worst.b],
        agree,
        windows,
    };
    let mut rep = report(&r, if agree { 0 } else { 1 });
    rep.table = Some(table);
    Ok(rep)
}
