//! Runs a validated scenario and writes its datasets.
//!
//! Every CSV starts with a `# scenario_hash=… version=…` line followed by the header row;
//! numbers carry 9 significant digits. Each CSV has a JSON sidecar holding the resolved
//! scenario and its derived block.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{lightfront_density, FourVector};
use crate::error::{Error, Result};
use crate::field::CachedFieldIntegrals;
use crate::kinematics::{design_va, on_shell, peak_velocity_infield, slope_check, singularity_guard, dressed_momentum};
use crate::lifetime::{edge_trajectories, peak_lifetime, LifetimeReport};
use crate::scenario::{caption_checks, preset, preset_file, validate, CaptionCheck, Derived, Scenario, ScenarioFile, VERSION};
use crate::spectral::momentum_density_map;
use crate::synthesis::{
    density_grid, locate_peak, PartialWavepacket, resolution_bound, slice_origin, Axis, DensityField, SpacetimeGrid,
    WavepacketModel,
};
use crate::trajectory::{
    comoving_transform, envelope_center_at, expectation_velocity_approx, peak_track_at, trajectories,
    ExpectationMoments, TrajectoryRecord,
};

/// Files written by a run and a short human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl RunReport {
    fn merge(&mut self, other: RunReport) {
        self.files.extend(other.files);
        self.lines.extend(other.lines);
    }
}

pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.8e}")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn stem(s: &Scenario) -> &str {
    if s.name().is_empty() {
        "scenario"
    } else {
        s.name()
    }
}

pub fn write_csv(dir: &Path, file: &str, hash: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut out = String::with_capacity(rows.len() * header.len() * 16 + 128);
    let _ = writeln!(out, "# scenario_hash={hash} version={VERSION}");
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        debug_assert_eq!(r.len(), header.len());
        for (i, v) in r.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format_number(*v));
        }
        out.push('\n');
    }
    let path = dir.join(file);
    fs::write(&path, out).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    scenario_hash: &'a str,
    version: &'a str,
    scenario: &'a ScenarioFile,
    derived: &'a Derived,
    warnings: &'a [String],
    #[serde(flatten)]
    product: T,
}

pub fn write_json(dir: &Path, file: &str, value: &impl Serialize) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(file);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn sidecar(dir: &Path, file: &str, s: &Scenario, product: impl Serialize) -> Result<PathBuf> {
    write_json(
        dir,
        file,
        &Sidecar {
            scenario_hash: &s.hash,
            version: VERSION,
            scenario: &s.file,
            derived: &s.derived,
            warnings: &s.warnings,
            product,
        },
    )
}

/// Quadrature sizes chosen for a grid and how much doubling each would still change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureReport {
    pub n_eta: usize,
    pub n_p1: usize,
    pub escalated: bool,
    /// max |Δρ|/max ρ on the probe slices when n_eta is doubled.
    pub change_eta: Option<f64>,
    pub change_p1: Option<f64>,
    pub converged: bool,
    pub history: Vec<EscalationStep>,
}

/// One set of node counts tried and what doubling each dimension changed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscalationStep {
    pub n_eta: usize,
    pub n_p1: usize,
    pub change_eta: Option<f64>,
    pub change_p1: Option<f64>,
}

fn probe(model: &WavepacketModel, grid: &SpacetimeGrid) -> Result<Vec<f64>> {
    let xs = grid.x_minus.values();
    let mid = xs[xs.len() / 2];
    let far = xs.iter().cloned().fold(mid, |a, b| if b.abs() > a.abs() { b } else { a });
    let n = grid.x3.steps.min(64);
    let h = (grid.x3.max - grid.x3.min) / (n - 1) as f64;
    let mut out = Vec::with_capacity(2 * n);
    for xm in [mid, far] {
        let (x1, origin) = slice_origin(model, grid, xm)?;
        out.extend(model.slice(xm, x1, origin + grid.x3.min, h, n)?);
    }
    Ok(out)
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().cloned().fold(0.0, f64::max);
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Model at the scenario's quadrature sizes, doubling either size while that moves the
/// probe slices by more than the tolerance.
pub fn resolve_quadrature(s: &Scenario, grid: &SpacetimeGrid) -> Result<(WavepacketModel, QuadratureReport)> {
    let q = s.file.quadrature;
    let cache = s.cache();
    let build = |ne: usize, np: usize| WavepacketModel::new(s.distribution(), cache.clone(), ne, np);
    let (mut ne, mut np) = (q.n_eta, q.n_p1);
    let mut history = Vec::new();
    loop {
        let model = build(ne, np)?;
        if !q.escalate {
            history.push(EscalationStep {
                n_eta: ne,
                n_p1: np,
                change_eta: None,
                change_p1: None,
            });
            return Ok((
                model,
                QuadratureReport {
                    n_eta: ne,
                    n_p1: np,
                    escalated: false,
                    change_eta: None,
                    change_p1: None,
                    converged: true,
                    history,
                },
            ));
        }
        let base = probe(&model, grid)?;
        let ce = if 2 * ne <= q.max_nodes {
            Some(relative_change(&base, &probe(&build(2 * ne, np)?, grid)?))
        } else {
            None
        };
        let cp = if 2 * np <= q.max_nodes {
            Some(relative_change(&base, &probe(&build(ne, 2 * np)?, grid)?))
        } else {
            None
        };
        history.push(EscalationStep {
            n_eta: ne,
            n_p1: np,
            change_eta: ce,
            change_p1: cp,
        });
        let grow_e = ce.is_some_and(|c| c > q.tolerance);
        let grow_p = cp.is_some_and(|c| c > q.tolerance);
        if !grow_e && !grow_p {
            let converged = ce.is_some_and(|c| c <= q.tolerance) && cp.is_some_and(|c| c <= q.tolerance);
            return Ok((
                model,
                QuadratureReport {
                    n_eta: ne,
                    n_p1: np,
                    escalated: history.len() > 1,
                    change_eta: ce,
                    change_p1: cp,
                    converged,
                    history,
                },
            ));
        }
        if grow_e {
            ne *= 2;
        }
        if grow_p {
            np *= 2;
        }
    }
}

fn require_grid(s: &Scenario) -> Result<SpacetimeGrid> {
    s.file
        .grid
        .ok_or_else(|| Error::invalid("grid", "this run needs a [grid] section"))
}

/// Sub-grid maximum of one density slice with the analytic peak position next to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlicePeak {
    pub x_minus: f64,
    pub x3_peak: f64,
    pub density_peak: f64,
    pub x3_track: f64,
    pub flat: bool,
}

pub fn slice_peaks(s: &Scenario, field: &DensityField, cache: &CachedFieldIntegrals) -> Result<Vec<SlicePeak>> {
    let h = field.grid.x3.step();
    (0..field.x_minus.len())
        .map(|i| {
            let xm = field.x_minus[i];
            let row = field.slice(i);
            let track = peak_track_at(&s.spec, cache, xm)?;
            Ok(match locate_peak(field.x3_start[i], h, row) {
                Some(p) => SlicePeak {
                    x_minus: xm,
                    x3_peak: p.x3,
                    density_peak: p.value,
                    x3_track: track,
                    flat: false,
                },
                None => {
                    let (k, v) = row
                        .iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |b, (k, &v)| if v > b.1 { (k, v) } else { b });
                    SlicePeak {
                        x_minus: xm,
                        x3_peak: field.x3_start[i] + h * k as f64,
                        density_peak: v,
                        x3_track: track,
                        flat: true,
                    }
                }
            })
        })
        .collect()
}

#[derive(Serialize)]
struct DensityProduct<'a> {
    grid: &'a SpacetimeGrid,
    quadrature: &'a QuadratureReport,
    norm_factor: f64,
    resolution_bound: f64,
    x1: &'a [f64],
    x3_start: &'a [f64],
    line_integrals: &'a [f64],
}

/// Density grid, its per-slice peaks, and the model that produced them.
pub struct DensityRun {
    pub field: DensityField,
    pub peaks: Vec<SlicePeak>,
    pub quadrature: QuadratureReport,
    pub report: RunReport,
}

pub fn run_density(s: &Scenario, dir: &Path) -> Result<DensityRun> {
    let grid = require_grid(s)?;
    let (model, quadrature) = resolve_quadrature(s, &grid)?;
    let field = density_grid(&model, &grid)?;
    let peaks = slice_peaks(s, &field, &model.cache)?;
    let name = stem(s);
    let h = grid.x3.step();
    let mut rows = Vec::with_capacity(field.samples.len());
    for (i, &xm) in field.x_minus.iter().enumerate() {
        for (k, &v) in field.slice(i).iter().enumerate() {
            rows.push(vec![xm, field.x3_start[i] + h * k as f64, v]);
        }
    }
    let mut report = RunReport::default();
    report
        .files
        .push(write_csv(dir, &format!("{name}_density.csv"), &s.hash, &["x_minus", "x3", "density"], &rows)?);
    report.files.push(sidecar(
        dir,
        &format!("{name}_density.json"),
        s,
        DensityProduct {
            grid: &grid,
            quadrature: &quadrature,
            norm_factor: model.norm_factor(),
            resolution_bound: resolution_bound(&model),
            x1: &field.x1,
            x3_start: &field.x3_start,
            line_integrals: &field.meta.line_integrals,
        },
    )?);
    let peak_rows: Vec<Vec<f64>> = peaks
        .iter()
        .map(|p| vec![p.x_minus, p.x3_peak, p.density_peak, p.x3_track, if p.flat { 1.0 } else { 0.0 }])
        .collect();
    report.files.push(write_csv(
        dir,
        &format!("{name}_peaks.csv"),
        &s.hash,
        &["x_minus", "x3_peak", "density_peak", "x3_track", "flat"],
        &peak_rows,
    )?);
    report.lines.push(format!(
        "{name}: density on {}x{} points with {}x{} nodes{}",
        grid.x_minus.steps,
        grid.x3.steps,
        quadrature.n_eta,
        quadrature.n_p1,
        if quadrature.converged { "" } else { " (not converged)" }
    ));
    Ok(DensityRun {
        field,
        peaks,
        quadrature,
        report,
    })
}

const TRAJECTORY_HEADER: [&str; 7] = ["x_minus", "xf1", "xf3", "xf3_tilde", "ex1", "ex3", "ex3_tilde"];

fn trajectory_rows(rec: &TrajectoryRecord, co: Option<&TrajectoryRecord>) -> Vec<Vec<f64>> {
    rec.samples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut r = vec![t.x_minus, t.xf1, t.xf3, t.xf3_tilde, t.ex1, t.ex3, t.ex3_tilde];
            if let Some(c) = co {
                let c = &c.samples[i];
                r.extend([c.xf3, c.xf3_tilde, c.ex3, c.ex3_tilde]);
            }
            r
        })
        .collect()
}

#[derive(Serialize)]
struct TrajectoryProduct {
    moments: ExpectationMoments,
    comoving_velocity: Option<f64>,
    light_front_velocity_free: f64,
    light_front_velocity_peak: f64,
    expectation_velocity_free: f64,
    expectation_velocity_peak: f64,
}

/// Lab-frame velocity dx₃/dx₀ from a light-front slope dx₃/dx₋.
pub fn lab_velocity(light_front: f64) -> f64 {
    light_front / (1.0 + light_front)
}

pub fn moments(s: &Scenario) -> Result<ExpectationMoments> {
    let q = s.file.quadrature;
    ExpectationMoments::from_distribution(&s.distribution(), q.n_eta.max(64), q.n_p1.max(64))
}

pub fn run_trajectories(s: &Scenario, dir: &Path) -> Result<(TrajectoryRecord, RunReport)> {
    let t = s
        .file
        .trajectory
        .ok_or_else(|| Error::invalid("trajectory", "this run needs a [trajectory] section"))?;
    let cache = s.cache();
    let m = moments(s)?;
    let rec = trajectories(&s.spec, &m, &cache, &t.x_minus)?;
    let v = s.comoving_velocity();
    let co = v.map(|v| comoving_transform(&rec, v));
    let mut header: Vec<&str> = TRAJECTORY_HEADER.to_vec();
    if co.is_some() {
        header.extend(["xf3_co", "xf3_tilde_co", "ex3_co", "ex3_tilde_co"]);
    }
    let name = stem(s);
    let mut report = RunReport::default();
    report.files.push(write_csv(
        dir,
        &format!("{name}_trajectory.csv"),
        &s.hash,
        &header,
        &trajectory_rows(&rec, co.as_ref()),
    )?);
    let mut overlay = Vec::with_capacity(t.x_minus.steps);
    for x in t.x_minus.values() {
        let (rise, fall) = edge_trajectories(&s.spec, &cache, &s.envelope, x)?;
        overlay.push(vec![
            x,
            s.field.potential(x),
            s.field.profile.envelope(x),
            envelope_center_at(&s.spec, &cache, x)?,
            rise,
            fall,
        ]);
    }
    report.files.push(write_csv(
        dir,
        &format!("{name}_overlay.csv"),
        &s.hash,
        &["x_minus", "potential", "envelope", "center", "edge_rising", "edge_falling"],
        &overlay,
    )?);
    let xi = s.derived.xi_star;
    let product = TrajectoryProduct {
        moments: m,
        comoving_velocity: v,
        light_front_velocity_free: m.light_front_velocity(0.0),
        light_front_velocity_peak: m.light_front_velocity(xi),
        expectation_velocity_free: lab_velocity(m.light_front_velocity(0.0)),
        expectation_velocity_peak: lab_velocity(m.light_front_velocity(xi)),
    };
    report.lines.push(format!(
        "{name}: <v3> = {:.4} at xi = 0 and {:.4} at xi* = {xi}",
        product.expectation_velocity_free, product.expectation_velocity_peak
    ));
    report
        .files
        .push(sidecar(dir, &format!("{name}_trajectory.json"), s, product)?);
    Ok((rec, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeProduct {
    pub status: &'static str,
    pub delta_x3: f64,
    pub delta_x0_analytic: Option<f64>,
    pub delta_x0_numeric: Option<f64>,
    pub roots: Option<(f64, f64)>,
    pub x0_roots: Option<(f64, f64)>,
    pub search: f64,
    pub c_n: f64,
    pub c_n_convention: &'static str,
}

pub const C_N_CONVENTION: &str =
    "delta_x3 is the half width at half maximum of the field-free envelope along x3";

pub fn lifetime_product(s: &Scenario) -> Result<LifetimeProduct> {
    let cache = s.cache();
    let base = LifetimeProduct {
        status: "ok",
        delta_x3: s.envelope.delta_x3,
        delta_x0_analytic: None,
        delta_x0_numeric: None,
        roots: None,
        x0_roots: None,
        search: s.lifetime_search(),
        c_n: s.envelope.c_n,
        c_n_convention: C_N_CONVENTION,
    };
    match peak_lifetime(&s.spec, &cache, &s.envelope) {
        Ok(LifetimeReport {
            delta_x0_analytic,
            delta_x0_numeric,
            roots,
            x0_roots,
            ..
        }) => Ok(LifetimeProduct {
            delta_x0_analytic,
            delta_x0_numeric: Some(delta_x0_numeric),
            roots: Some(roots),
            x0_roots: Some(x0_roots),
            ..base
        }),
        Err(Error::NoIntersection { .. }) => Ok(LifetimeProduct {
            status: "no-intersection",
            ..base
        }),
        Err(e) => Err(e),
    }
}

pub fn run_lifetime(s: &Scenario, dir: &Path) -> Result<(LifetimeProduct, RunReport)> {
    let p = lifetime_product(s)?;
    let name = stem(s);
    let mut report = RunReport::default();
    report
        .files
        .push(sidecar(dir, &format!("{name}_lifetime.json"), s, &p)?);
    report.lines.push(match p.delta_x0_numeric {
        Some(d) => format!(
            "{name}: peak lifetime {d:.6e} (analytic {})",
            p.delta_x0_analytic.map_or("n/a".to_string(), |a| format!("{a:.6e}"))
        ),
        None => format!("{name}: peak never leaves the envelope within ±{:.3e}", p.search),
    });
    Ok((p, report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignRow {
    pub scenario: String,
    pub v_a: f64,
    pub v_f: f64,
    pub v_fstar_design: f64,
    pub v_a_design: f64,
    pub v_1d: f64,
    pub eta_center: f64,
    pub free_slope: f64,
    pub dressed_slope: f64,
}

pub fn design_row(s: &Scenario, v_fstar_design: f64) -> Result<DesignRow> {
    let d = &s.derived;
    let slopes = slope_check(&s.spec, d.eta_center, d.xi_star)?;
    Ok(DesignRow {
        scenario: stem(s).to_string(),
        v_a: d.v_a,
        v_f: d.v_f,
        v_fstar_design,
        v_a_design: design_va(v_fstar_design, d.xi_star, d.p_minus)?,
        v_1d: d.v_1d,
        eta_center: d.eta_center,
        free_slope: slopes.free_slope,
        dressed_slope: slopes.dressed_slope,
    })
}

const DESIGN_HEADER: [&str; 8] = [
    "v_a",
    "v_f",
    "v_fstar_design",
    "v_a_design",
    "v_1d",
    "eta_center",
    "free_slope",
    "dressed_slope",
];

fn design_values(r: &DesignRow) -> Vec<f64> {
    vec![
        r.v_a,
        r.v_f,
        r.v_fstar_design,
        r.v_a_design,
        r.v_1d,
        r.eta_center,
        r.free_slope,
        r.dressed_slope,
    ]
}

#[derive(Serialize)]
struct DesignProduct<'a> {
    rows: &'a [DesignRow],
    singular: bool,
    luminal: bool,
    notes: Vec<String>,
}

pub fn run_design(s: &Scenario, dir: &Path) -> Result<RunReport> {
    let d = &s.derived;
    let row = design_row(s, d.v_fstar_target.unwrap_or(d.v_f))?;
    let name = stem(s);
    let diag = singularity_guard(d.v_a, d.eta_center);
    let mut report = RunReport::default();
    report.files.push(write_csv(
        dir,
        &format!("{name}_design.csv"),
        &s.hash,
        &DESIGN_HEADER,
        &[design_values(&row)],
    )?);
    report.files.push(sidecar(
        dir,
        &format!("{name}_design.json"),
        s,
        DesignProduct {
            rows: std::slice::from_ref(&row),
            singular: diag.singular,
            luminal: diag.luminal,
            notes: vec![],
        },
    )?);
    report.lines.push(format!(
        "{name}: v_a = {:.6}, <eta> = {:.6}, P3 = {:.6}, E = {:.6}, v_1D = {:.6}, v_f(xi*) = {:.6}",
        d.v_a, d.eta_center, d.p3, d.energy, d.v_1d, d.v_f
    ));
    Ok(report)
}

fn check_lines(name: &str, checks: &[CaptionCheck]) -> Vec<String> {
    checks
        .iter()
        .map(|c| {
            format!(
                "{name}: {} = {:.6} (caption {} ± {})",
                c.label, c.value, c.expected, c.tolerance
            )
        })
        .collect()
}

/// Command-line replacements applied to a scenario file before validation, so the hash
/// covers them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Fixes both node counts and turns escalation off.
    pub quadrature: Option<usize>,
    /// (x₃, x₋) axes of the density grid.
    pub grid: Option<(Axis, Axis)>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ScenarioFile) {
        if let Some(n) = self.quadrature {
            file.quadrature.n_eta = n;
            file.quadrature.n_p1 = n;
            file.quadrature.escalate = false;
        }
        if let Some((x3, x_minus)) = self.grid {
            match &mut file.grid {
                Some(g) => {
                    g.x3 = x3;
                    g.x_minus = x_minus;
                }
                None => {
                    file.grid = Some(SpacetimeGrid {
                        x_minus,
                        x3,
                        frame: Default::default(),
                        transverse: crate::synthesis::TransverseSlice::Peak,
                    })
                }
            }
        }
    }
}

/// Validated preset with the overrides applied; the first validation error is returned.
pub fn load_preset(name: &str, overrides: &Overrides) -> Result<Scenario> {
    let mut file = preset_file(name)?;
    overrides.apply(&mut file);
    let s = validate(file).map_err(|mut e| e.remove(0))?;
    for c in caption_checks(name, &s) {
        if !c.passed() {
            return Err(Error::invalid(
                name,
                format!("{} = {} differs from the caption value {}", c.label, c.value, c.expected),
            ));
        }
    }
    Ok(s)
}

/// Peak of the cycle-averaged trajectory at time x₀: x₃ = x̃_f3(x₀ − x₃).
fn peak_at_time(s: &Scenario, cache: &CachedFieldIntegrals, x0: f64) -> Result<f64> {
    let g = |x3: f64| -> Result<f64> { Ok(x3 - peak_track_at(&s.spec, cache, x0 - x3)?) };
    let (mut a, mut b) = (-2e5 + s.spec.v_a.clamp(-1.0, 1.0) * x0, 2e5 + s.spec.v_a.clamp(-1.0, 1.0) * x0);
    let mut ga = g(a)?;
    if ga.signum() == g(b)?.signum() {
        return Err(Error::NoIntersection { lo: a, hi: b });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub const FIGURE1_TIMES: [f64; 3] = [-6e4, 0.0, 6e4];

/// Partial-wavepacket snapshots at three times and the η-slice of the mass shell.
pub fn run_figure1(dir: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut report = RunReport::default();
    for name in ["fig1a", "fig1c", "fig1e"] {
        let s = load_preset(name, overrides)?;
        report.lines.extend(check_lines(name, &caption_checks(name, &s)));
        let cut = s.file.cut.expect("figure 1 presets carry a cut");
        let cache = CachedFieldIntegrals::new(&s.field, -5e5, 5e5);
        let with_field = (!s.field.is_off()).then_some(&cache);
        let eta = s.derived.eta_center;
        let n_p1 = s.file.quadrature.n_p1;
        let phi = PartialWavepacket::new(eta, &s.spec, &s.transverse, s.spin, n_p1)?;
        let mut rows = Vec::new();
        let mut centres = Vec::new();
        for x0 in FIGURE1_TIMES {
            let x3c = peak_at_time(&s, &cache, x0)?;
            let x1c = -cache.integrals(x0 - x3c)?.i1 / s.spec.p_minus_ref;
            centres.push([x0, x1c, x3c]);
            let block: Result<Vec<Vec<Vec<f64>>>> = cut
                .x1
                .values()
                .par_iter()
                .map(|a| {
                    cut.x3
                        .values()
                        .iter()
                        .map(|b| {
                            let x = FourVector::new(x0, x1c + a, 0.0, x3c + b);
                            Ok(vec![x0, x.x1, x.x3, lightfront_density(&phi.at(&x, with_field)?)])
                        })
                        .collect()
                })
                .collect();
            rows.extend(block?.into_iter().flatten());
        }
        report.files.push(write_csv(
            dir,
            &format!("{name}_partial.csv"),
            &s.hash,
            &["x0", "x1", "x3", "density"],
            &rows,
        )?);
        let reach = {
            let g2 = 1.0 / (1.0 - s.spec.v_a * s.spec.v_a);
            if g2 > 0.0 {
                (eta * eta * g2 - 1.0).max(0.0).sqrt() * 0.999
            } else {
                2.0
            }
        };
        let mut shell = Vec::new();
        for p1 in Axis::new(-reach, reach, 201).values() {
            let p = on_shell(&s.spec, eta, p1)?;
            let q = dressed_momentum(&p.four_vector(), s.derived.xi_star)?.q;
            shell.push(vec![p1, p.p3, p.energy, q.x3, q.t]);
        }
        report.files.push(write_csv(
            dir,
            &format!("{name}_shell.csv"),
            &s.hash,
            &["p1", "p3", "p0", "q3", "q0"],
            &shell,
        )?);
        report.files.push(sidecar(
            dir,
            &format!("{name}_partial.json"),
            &s,
            serde_json::json!({ "times": FIGURE1_TIMES, "peaks": centres, "eta": eta }),
        )?);
    }
    Ok(report)
}

/// Figure 2 datasets: density, trajectories, overlays and lifetimes for panels a–c, and
/// the design table.
pub fn run_figure2(dir: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut report = RunReport::default();
    let mut rows = Vec::new();
    let mut named = Vec::new();
    for (name, v_fstar) in [("fig2a", 0.0), ("fig2b", 0.2), ("fig2c", -4.1)] {
        let s = load_preset(name, overrides)?;
        report.lines.extend(check_lines(name, &caption_checks(name, &s)));
        let row = design_row(&s, v_fstar)?;
        rows.push(design_values(&row));
        named.push(row);
        report.merge(run_density(&s, dir)?.report);
        report.merge(run_trajectories(&s, dir)?.1);
        report.merge(run_lifetime(&s, dir)?.1);
    }
    let s = load_preset("fig2a", overrides)?;
    report
        .files
        .push(write_csv(dir, "fig2_design.csv", &s.hash, &DESIGN_HEADER, &rows)?);
    let a = &named[0];
    report.files.push(sidecar(
        dir,
        "fig2_design.json",
        &s,
        DesignProduct {
            rows: &named,
            singular: false,
            luminal: false,
            notes: vec![format!(
                "fig2a uses the rounded v_a = {} giving v_f = {:.4}; v_f* = 0 exactly needs v_a = {:.6}",
                a.v_a, a.v_f, a.v_a_design
            )],
        },
    )?);
    Ok(report)
}

/// Figure 3 datasets: one carrier cycle of both trajectories in the frames moving at
/// v_f* and v_1D, and the transverse density cut at x₋ = 0.
pub fn run_figure3(dir: &Path, overrides: &Overrides) -> Result<RunReport> {
    let s = load_preset("fig3", overrides)?;
    let mut report = RunReport::default();
    report.lines.extend(check_lines("fig3", &caption_checks("fig3", &s)));
    let (rec, r) = run_trajectories(&s, dir)?;
    report.merge(r);
    let drift = comoving_transform(&rec, s.derived.v_1d);
    let mut header: Vec<&str> = TRAJECTORY_HEADER.to_vec();
    header.extend(["xf3_co", "xf3_tilde_co", "ex3_co", "ex3_tilde_co"]);
    report.files.push(write_csv(
        dir,
        "fig3_trajectory_drift.csv",
        &s.hash,
        &header,
        &trajectory_rows(&rec, Some(&drift)),
    )?);
    report.merge(run_cut(&s, dir)?);
    Ok(report)
}

/// Total-wavepacket density on the (x₁, x₃) plane of the [cut] section.
pub fn run_cut(s: &Scenario, dir: &Path) -> Result<RunReport> {
    let cut = s
        .file
        .cut
        .ok_or_else(|| Error::invalid("cut", "this run needs a [cut] section"))?;
    let grid = SpacetimeGrid {
        x_minus: Axis::new(cut.x_minus, cut.x_minus, 1),
        x3: cut.x3,
        frame: cut.frame,
        transverse: crate::synthesis::TransverseSlice::Peak,
    };
    let (model, quadrature) = resolve_quadrature(s, &grid)?;
    let (xf1, origin) = slice_origin(&model, &grid, cut.x_minus)?;
    let rows: Result<Vec<Vec<f64>>> = cut
        .x1
        .values()
        .par_iter()
        .map(|&a| model.slice(cut.x_minus, xf1 + a, origin + cut.x3.min, cut.x3.step(), cut.x3.steps))
        .collect();
    let rows = rows?;
    let mut out = Vec::with_capacity(cut.x1.steps * cut.x3.steps);
    for (a, row) in cut.x1.values().iter().zip(&rows) {
        for (k, v) in row.iter().enumerate() {
            out.push(vec![xf1 + a, origin + cut.x3.min + cut.x3.step() * k as f64, *v]);
        }
    }
    let name = stem(s);
    let mut report = RunReport::default();
    report
        .files
        .push(write_csv(dir, &format!("{name}_cut.csv"), &s.hash, &["x1", "x3", "density"], &out)?);
    report.files.push(sidecar(
        dir,
        &format!("{name}_cut.json"),
        s,
        serde_json::json!({ "x_minus": cut.x_minus, "xf1": xf1, "x3_origin": origin, "quadrature": quadrature }),
    )?);
    report
        .lines
        .push(format!("{name}: transverse cut {}x{} at x_minus = {}", cut.x1.steps, cut.x3.steps, cut.x_minus));
    Ok(report)
}

/// Expectation light-front velocities at ξ* for a Figure 4 panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityShift {
    pub one_d: f64,
    pub approx: f64,
    pub full: f64,
}

pub fn velocity_shift(s: &Scenario) -> Result<VelocityShift> {
    let d = &s.derived;
    let m = moments(s)?;
    Ok(VelocityShift {
        one_d: d.v_1d / (1.0 - d.v_1d),
        approx: expectation_velocity_approx(&s.spec, s.transverse.w, d.xi_star)?,
        full: m.light_front_velocity(d.xi_star),
    })
}

/// Figure 4 datasets: the three momentum-density maps and the expectation velocities.
pub fn run_figure4(dir: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut report = RunReport::default();
    let mut vel_rows = Vec::new();
    for name in ["fig4a", "fig4b", "fig4c"] {
        let s = load_preset(name, overrides)?;
        report.lines.extend(check_lines(name, &caption_checks(name, &s)));
        let map = s.file.map.unwrap_or_default();
        let de = s.derived.delta_eta;
        let c = s.derived.eta_center;
        let etas = Axis::new(c - map.eta_span * de, c + map.eta_span * de, map.eta_steps).values();
        let pr = map.p1_span / s.transverse.w;
        let p1s = Axis::new(-pr, pr, map.p1_steps).values();
        let (rows, skipped) = momentum_density_map(&s.distribution(), s.derived.xi_star, &etas, &p1s);
        let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.eta, r.p1, r.q3_over_qminus, r.weight]).collect();
        report.files.push(write_csv(
            dir,
            &format!("{name}_map.csv"),
            &s.hash,
            &["eta", "p1", "q3_over_qminus", "weight"],
            &table,
        )?);
        let v = velocity_shift(&s)?;
        vel_rows.push(vec![s.derived.v_fstar_target.unwrap_or(s.derived.v_f), s.derived.v_a, v.one_d, v.approx, v.full]);
        report.files.push(sidecar(
            dir,
            &format!("{name}_map.json"),
            &s,
            serde_json::json!({ "skipped": skipped, "velocities": v }),
        )?);
        report.lines.push(format!(
            "{name}: 1D {:.5}, approx {:.5}, full {:.5}",
            v.one_d, v.approx, v.full
        ));
    }
    let s = load_preset("fig4a", overrides)?;
    report.files.push(write_csv(
        dir,
        "fig4_velocities.csv",
        &s.hash,
        &["v_fstar", "v_a", "one_d", "approx", "full"],
        &vel_rows,
    )?);
    Ok(report)
}

/// Quick consistency battery; each entry is (description, passed).
pub fn selftest() -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let mut check = |label: &str, ok: bool| out.push((label.to_string(), ok));
    for name in crate::scenario::PRESETS {
        match preset(name) {
            Ok(_) => check(&format!("preset {name} reproduces its caption constants"), true),
            Err(e) => check(&format!("preset {name}: {}", e[0]), false),
        }
    }
    let va = design_va(0.2, 3.0, 3.0).unwrap_or(f64::NAN);
    check("designer: v_f* = 0.2 gives v_a = 0", va.abs() < 1e-12);
    let round = (0..50).all(|k| {
        let vf = -5.0 + 5.9 * k as f64 / 49.0;
        design_va(vf, 3.0, 3.0).is_ok_and(|v| (peak_velocity_infield(v, 3.0, 3.0) - vf).abs() < 1e-10)
    });
    check("designer round trip on 50 velocities", round);
    let gamma = crate::algebra::GammaBasis::dirac();
    let m2 = crate::algebra::mat_mul(&gamma.minus(), &gamma.minus());
    check(
        "gamma_minus squares to zero",
        m2.iter().flatten().all(|z| z.norm() == 0.0),
    );
    if let Ok(s) = preset("fig3") {
        let cache = s.cache();
        let m = moments(&s);
        let ok = m.is_ok_and(|m| {
            let axis = s.file.trajectory.unwrap().x_minus;
            trajectories(&s.spec, &m, &cache, &axis).is_ok_and(|rec| {
                let co = comoving_transform(&rec, s.derived.v_f);
                let x1 = co.samples.iter().map(|t| t.xf1).fold(0.0f64, |a, b| a.max(b.abs()));
                (x1 - 100.0).abs() < 2.0
            })
        });
        check("figure-eight x1 amplitude 100", ok);
    }
    out
}
