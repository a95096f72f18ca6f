//! Scenario files: the TOML schema, validation into a resolved [`Scenario`], and the
//! built-in figure presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::Spin;
use crate::error::{Error, Result};
use crate::field::{CachedFieldIntegrals, FieldProfile, PlaneWaveField};
use crate::kinematics::{
    design_va, drift_velocity_1d, longitudinal_momentum, on_shell, peak_velocity_infield, singularity_guard, Branch,
    CorrelationSpec,
};
use crate::lifetime::EnvelopeModel;
use crate::spectral::{width_for_envelope, EtaWeight, ModalDistribution, SpectralShape, TransverseWeight};
use crate::synthesis::{Axis, SpacetimeGrid, WavepacketModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    pub correlation: CorrelationSection,
    pub momentum: MomentumSection,
    pub spectrum: SpectrumSection,
    pub transverse: TransverseSection,
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SpacetimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSection>,
    #[serde(default)]
    pub lifetime: LifetimeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default)]
    pub branch: Branch,
    #[serde(default)]
    pub spin: Spin,
}

/// Design request: the peak velocity wanted at field strength ξ* (defaults to the peak
/// of the field profile).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub v_fstar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_star: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumSection {
    pub p_minus: f64,
    /// Optional cross-check of the derived ⟨η⟩.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_center: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default)]
    pub shape: SpectralShape,
    #[serde(default = "default_order")]
    pub order: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_length: Option<f64>,
}

fn default_order() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransverseSection {
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "default_charge")]
    pub charge_sign: f64,
    #[serde(default = "off_profile")]
    pub profile: FieldProfile,
}

fn default_omega() -> f64 {
    0.01
}

fn default_charge() -> f64 {
    -1.0
}

fn off_profile() -> FieldProfile {
    FieldProfile::Off
}

impl Default for FieldSection {
    fn default() -> Self {
        FieldSection {
            omega: default_omega(),
            phase: 0.0,
            charge_sign: default_charge(),
            profile: FieldProfile::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "default_nodes")]
    pub n_eta: usize,
    #[serde(default = "default_nodes")]
    pub n_p1: usize,
    /// Double a size while doing so changes the probe slices by more than `tolerance`.
    #[serde(default = "default_true")]
    pub escalate: bool,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
}

fn default_nodes() -> usize {
    128
}

fn default_true() -> bool {
    true
}

fn default_tolerance() -> f64 {
    0.005
}

fn default_max_nodes() -> usize {
    1024
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection {
            n_eta: default_nodes(),
            n_p1: default_nodes(),
            escalate: true,
            tolerance: default_tolerance(),
            max_nodes: default_max_nodes(),
        }
    }
}

/// Frame for the co-moving trajectory columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Comoving {
    Velocity(f64),
    Named(ComovingFrame),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComovingFrame {
    /// v_f at ξ*.
    Peak,
    /// v_1D at ξ*.
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub x_minus: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comoving: Option<Comoving>,
}

/// Density on an (x₁, x₃) plane at one x₋, x₃ measured in `frame`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSection {
    pub x_minus: f64,
    pub x1: Axis,
    pub x3: Axis,
    #[serde(default)]
    pub frame: crate::synthesis::X3Frame,
}

/// Momentum-density map over η − ⟨η⟩ ∈ ±eta_span·Δη and p₁ ∈ ±p1_span/w.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    #[serde(default = "default_eta_span")]
    pub eta_span: f64,
    #[serde(default = "default_map_steps")]
    pub eta_steps: usize,
    #[serde(default = "default_p1_span")]
    pub p1_span: f64,
    #[serde(default = "default_map_steps")]
    pub p1_steps: usize,
}

fn default_eta_span() -> f64 {
    1.5
}

fn default_p1_span() -> f64 {
    3.0
}

fn default_map_steps() -> usize {
    121
}

impl Default for MapSection {
    fn default() -> Self {
        MapSection {
            eta_span: default_eta_span(),
            eta_steps: default_map_steps(),
            p1_span: default_p1_span(),
            p1_steps: default_map_steps(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifetimeSection {
    /// Half-width in x₋ of the root search, default max(4Δx₃, twice the largest grid |x₋|).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// Quantities derived during validation and echoed into every output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derived {
    pub v_a: f64,
    pub v_a_designed: Option<f64>,
    pub v_fstar_target: Option<f64>,
    pub branch: Branch,
    pub p_minus: f64,
    pub p3: f64,
    pub energy: f64,
    pub eta_center: f64,
    pub xi_star: f64,
    /// 𝒫₃/ℰ, the drift velocity without field.
    pub v_1d_free: f64,
    pub v_1d: f64,
    pub v_f: f64,
    pub delta_eta: f64,
    pub relative_width: f64,
    pub delta_x3: f64,
    pub kinematic: f64,
    pub c_n: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub hash: String,
    pub spec: CorrelationSpec,
    pub spin: Spin,
    pub field: PlaneWaveField,
    pub eta: EtaWeight,
    pub transverse: TransverseWeight,
    pub envelope: EnvelopeModel,
    pub derived: Derived,
    pub warnings: Vec<String>,
}

pub fn parse(text: &str) -> Result<ScenarioFile> {
    toml::from_str(text).map_err(|e| Error::invalid("scenario", e.message().to_string()))
}

pub fn load(path: &Path) -> std::result::Result<Scenario, Vec<Error>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![Error::Io(format!("{}: {e}", path.display()))])?;
    validate(parse(&text).map_err(|e| vec![e])?)
}

/// SHA-256 of the crate version and the scenario without its [output] section.
pub fn scenario_hash(file: &ScenarioFile) -> String {
    let mut f = file.clone();
    f.output = OutputSection::default();
    let json = serde_json::to_string(&f).expect("scenario serializes");
    let mut h = Sha256::new();
    h.update(VERSION.as_bytes());
    h.update([0u8]);
    h.update(json.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn positive(errs: &mut Vec<Error>, path: &str, v: f64) -> bool {
    if v > 0.0 && v.is_finite() {
        true
    } else {
        errs.push(Error::invalid(path, format!("must be positive and finite, got {v}")));
        false
    }
}

fn check_axis(errs: &mut Vec<Error>, path: &str, a: &Axis, min_steps: usize) {
    if a.steps < min_steps {
        errs.push(Error::invalid(&format!("{path}.steps"), format!("needs at least {min_steps}")));
    }
    if !(a.min.is_finite() && a.max.is_finite()) || (a.steps > 1 && !(a.max > a.min)) {
        errs.push(Error::invalid(path, "needs finite min < max"));
    }
}

/// Resolves a scenario, reporting every violated invariant with its field path.
pub fn validate(file: ScenarioFile) -> std::result::Result<Scenario, Vec<Error>> {
    let mut errs = Vec::new();
    let mut warnings = Vec::new();
    let c = &file.correlation;
    let pm = file.momentum.p_minus;
    let pm_ok = positive(&mut errs, "momentum.p_minus", pm);

    let f = &file.field;
    positive(&mut errs, "field.omega", f.omega);
    if f.charge_sign != 1.0 && f.charge_sign != -1.0 {
        errs.push(Error::invalid("field.charge_sign", "must be 1 or -1"));
    }
    if let Err(e) = f.profile.validate("field.profile") {
        errs.push(e);
    }
    let field = PlaneWaveField {
        omega: f.omega,
        phase: f.phase,
        charge_sign: f.charge_sign,
        profile: f.profile.clone(),
    };
    if errs.is_empty() {
        if let Some(r) = field.slowly_varying_violation() {
            warnings.push(format!("field profile varies by {r:.3} of its peak per carrier period"));
        }
    }

    let peak_xi = f.profile.peak();
    let (v_a, xi_star, designed, target) = match (c.v_a, c.target) {
        (Some(v), None) => (Some(v), peak_xi, None, None),
        (None, Some(t)) => {
            let xi = t.xi_star.unwrap_or(peak_xi);
            if !(xi >= 0.0 && xi.is_finite()) {
                errs.push(Error::invalid("correlation.target.xi_star", "must be finite and nonnegative"));
            }
            let v = if pm_ok {
                match design_va(t.v_fstar, xi, pm) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        errs.push(e);
                        None
                    }
                }
            } else {
                None
            };
            (v, xi, v, Some(t.v_fstar))
        }
        _ => {
            errs.push(Error::invalid("correlation", "give exactly one of v_a or target"));
            (None, peak_xi, None, None)
        }
    };
    let v_a = match v_a {
        Some(v) if v.is_finite() => v,
        Some(v) => {
            errs.push(Error::invalid("correlation.v_a", format!("must be finite, got {v}")));
            return Err(errs);
        }
        None => return Err(errs),
    };
    if !pm_ok {
        return Err(errs);
    }
    if v_a == 1.0 {
        errs.push(Error::LuminalVa);
        return Err(errs);
    }
    if (v_a.abs() - 1.0).abs() < 1e-12 {
        warnings.push("v_a = -1: the slice quadratic has a single finite root".to_string());
    }

    let spec = CorrelationSpec::new(v_a, c.branch, pm);
    let r = spec.reference();
    if singularity_guard(v_a, r.eta).singular {
        errs.push(Error::SingularSlice { v_a, eta: r.eta });
        return Err(errs);
    }
    match longitudinal_momentum(&spec, r.eta, 0.0) {
        Ok(p3) if (p3 - r.p3).abs() <= 1e-9 * r.p3.abs().max(1.0) => {}
        Ok(p3) => errs.push(Error::invalid(
            "correlation.branch",
            format!(
                "the {:?} root gives p3 = {p3:.6} at p_perp = 0 but p_minus = {pm} needs P3 = {:.6}; use branch = \"{}\"",
                c.branch.resolve(v_a),
                r.p3,
                match c.branch.resolve(v_a).other() {
                    Branch::Positive => "positive",
                    _ => "negative",
                }
            ),
        )),
        Err(e) => errs.push(e),
    }
    if let Some(eta) = file.momentum.eta_center {
        if (eta - r.eta).abs() > 5e-6 * r.eta.abs().max(1.0) {
            errs.push(Error::invalid(
                "momentum.eta_center",
                format!("{eta} disagrees with E - v_a P3 = {:.6}", r.eta),
            ));
        }
    }

    let s = &file.spectrum;
    positive(&mut errs, "spectrum.order", s.order);
    let kinematic = (v_a - r.p3_over_e()).abs();
    let delta_eta = match (s.delta_eta, s.envelope_length) {
        (Some(d), None) => positive(&mut errs, "spectrum.delta_eta", d).then_some(d),
        (None, Some(l)) => (positive(&mut errs, "spectrum.envelope_length", l) && s.order > 0.0)
            .then(|| width_for_envelope(s.shape, s.order, l, kinematic)),
        _ => {
            errs.push(Error::invalid("spectrum", "give exactly one of delta_eta or envelope_length"));
            None
        }
    };
    let w_ok = positive(&mut errs, "transverse.w", file.transverse.w);

    let q = &file.quadrature;
    for (k, n) in [("n_eta", q.n_eta), ("n_p1", q.n_p1)] {
        if n < 2 || n > q.max_nodes {
            errs.push(Error::invalid(&format!("quadrature.{k}"), format!("must lie in [2, {}]", q.max_nodes)));
        }
    }
    positive(&mut errs, "quadrature.tolerance", q.tolerance);
    if let Some(g) = &file.grid {
        check_axis(&mut errs, "grid.x_minus", &g.x_minus, 1);
        check_axis(&mut errs, "grid.x3", &g.x3, 3);
    }
    if let Some(t) = &file.trajectory {
        check_axis(&mut errs, "trajectory.x_minus", &t.x_minus, 2);
    }
    if let Some(cut) = &file.cut {
        check_axis(&mut errs, "cut.x1", &cut.x1, 2);
        check_axis(&mut errs, "cut.x3", &cut.x3, 2);
    }
    if let Some(m) = &file.map {
        positive(&mut errs, "map.eta_span", m.eta_span);
        positive(&mut errs, "map.p1_span", m.p1_span);
        if m.eta_steps < 1 || m.p1_steps < 1 {
            errs.push(Error::invalid("map", "needs at least one step per axis"));
        }
    }
    if let Some(sr) = file.lifetime.search {
        positive(&mut errs, "lifetime.search", sr);
    }

    let (Some(delta_eta), true) = (delta_eta, w_ok) else {
        return Err(errs);
    };
    if !errs.is_empty() {
        return Err(errs);
    }
    let eta = EtaWeight::new(r.eta, delta_eta, s.order, s.shape);
    if eta.relative_width() > 0.2 {
        warnings.push(format!("spectrum is broad: delta_eta/<eta> = {:.3}", eta.relative_width()));
    }
    let transverse = TransverseWeight { w: file.transverse.w };
    let (elo, ehi) = eta.support();
    let pmax = transverse.support().1;
    for k in 0..=8 {
        let e = elo + (ehi - elo) * k as f64 / 8.0;
        if let Err(err) = on_shell(&spec, e, pmax) {
            errs.push(Error::invalid(
                "transverse.w",
                format!("p1 support ±6/w reaches evanescent modes ({err})"),
            ));
            break;
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }

    let envelope = EnvelopeModel::new(&spec, &eta);
    let derived = Derived {
        v_a,
        v_a_designed: designed,
        v_fstar_target: target,
        branch: c.branch.resolve(v_a),
        p_minus: pm,
        p3: r.p3,
        energy: r.energy,
        eta_center: r.eta,
        xi_star,
        v_1d_free: r.p3_over_e(),
        v_1d: drift_velocity_1d(r.p3_over_e(), xi_star, pm),
        v_f: peak_velocity_infield(v_a, xi_star, pm),
        delta_eta,
        relative_width: eta.relative_width(),
        delta_x3: envelope.delta_x3,
        kinematic,
        c_n: envelope.c_n,
    };
    Ok(Scenario {
        hash: scenario_hash(&file),
        spin: c.spin,
        file,
        spec,
        field,
        eta,
        transverse,
        envelope,
        derived,
        warnings,
    })
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn distribution(&self) -> ModalDistribution {
        ModalDistribution {
            spec: self.spec,
            eta: self.eta.clone(),
            transverse: self.transverse,
            spin: self.spin,
        }
    }

    /// Largest |x₋| any product of this scenario asks for.
    pub fn x_minus_reach(&self) -> f64 {
        let mut reach: f64 = 0.0;
        if let Some(g) = &self.file.grid {
            reach = reach.max(g.x_minus.min.abs()).max(g.x_minus.max.abs());
        }
        if let Some(t) = &self.file.trajectory {
            reach = reach.max(t.x_minus.min.abs()).max(t.x_minus.max.abs());
        }
        if let Some(c) = &self.file.cut {
            reach = reach.max(c.x_minus.abs());
        }
        reach
    }

    pub fn lifetime_search(&self) -> f64 {
        self.file
            .lifetime
            .search
            .unwrap_or_else(|| (4.0 * self.envelope.delta_x3).max(2.0 * self.x_minus_reach()))
    }

    pub fn cache(&self) -> CachedFieldIntegrals {
        let reach = self.x_minus_reach().max(self.lifetime_search()).max(1.0);
        CachedFieldIntegrals::new(&self.field, -reach, reach)
    }

    pub fn model(&self, n_eta: usize, n_p1: usize) -> Result<WavepacketModel> {
        WavepacketModel::new(self.distribution(), self.cache(), n_eta, n_p1)
    }

    pub fn comoving_velocity(&self) -> Option<f64> {
        self.file.trajectory.as_ref()?.comoving.map(|c| match c {
            Comoving::Velocity(v) => v,
            Comoving::Named(ComovingFrame::Peak) => self.derived.v_f,
            Comoving::Named(ComovingFrame::Drift) => self.derived.v_1d,
        })
    }
}

/// `x3min:x3max:steps,xminusmin:xminusmax:steps`, as taken by `--grid`.
pub fn parse_grid_flag(s: &str) -> Result<(Axis, Axis)> {
    let axis = |part: &str| -> Result<Axis> {
        let v: Vec<&str> = part.split(':').collect();
        if v.len() != 3 {
            return Err(Error::invalid("--grid", format!("expected min:max:steps, got {part:?}")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::invalid("--grid", format!("bad number {t:?}")));
        let steps = v[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid("--grid", format!("bad step count {:?}", v[2])))?;
        Ok(Axis::new(num(v[0])?, num(v[1])?, steps))
    };
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::invalid("--grid", "expected two comma-separated axes"));
    }
    Ok((axis(parts[0])?, axis(parts[1])?))
}

/// One figure-caption constant re-derived from a preset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaptionCheck {
    pub label: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl CaptionCheck {
    fn new(label: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        CaptionCheck {
            label: label.to_string(),
            value,
            expected,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

pub const PRESETS: &[&str] = &[
    "fig1a", "fig1c", "fig1e", "fig2a", "fig2b", "fig2c", "fig3", "fig4a", "fig4b", "fig4c",
];

const P_MINUS: f64 = 3.0;
const XI_STAR: f64 = 3.0;
const OMEGA: f64 = 0.01;
const W_WIDE: f64 = 170.0;
const ENVELOPE: f64 = 1.8e6;

fn pulse() -> FieldSection {
    FieldSection {
        omega: OMEGA,
        phase: 0.0,
        charge_sign: -1.0,
        profile: FieldProfile::SuperGaussian {
            xi_star: XI_STAR,
            fwhm: 4.8e4,
            order: 4.0,
            center: 0.0,
        },
    }
}

fn constant() -> FieldSection {
    FieldSection {
        profile: FieldProfile::Constant { xi_star: XI_STAR },
        ..pulse()
    }
}

fn base(name: &str, v_a: Option<f64>, target: Option<f64>, field: FieldSection) -> ScenarioFile {
    ScenarioFile {
        name: name.to_string(),
        correlation: CorrelationSection {
            v_a,
            target: target.map(|v| Target {
                v_fstar: v,
                xi_star: None,
            }),
            branch: Branch::Auto,
            spin: Spin::Up,
        },
        momentum: MomentumSection {
            p_minus: P_MINUS,
            eta_center: None,
        },
        spectrum: SpectrumSection {
            shape: SpectralShape::FlatTopEnvelope,
            order: 10.0,
            delta_eta: None,
            envelope_length: Some(ENVELOPE),
        },
        transverse: TransverseSection { w: W_WIDE },
        field,
        quadrature: QuadratureSection::default(),
        grid: None,
        trajectory: None,
        cut: None,
        map: None,
        lifetime: LifetimeSection::default(),
        output: OutputSection::default(),
    }
}

fn fig2(name: &str, v_a: f64, window: f64) -> ScenarioFile {
    let x_minus = Axis::new(-window, window, 200);
    ScenarioFile {
        grid: Some(SpacetimeGrid {
            x_minus,
            x3: Axis::new(-ENVELOPE / 1.8, ENVELOPE / 1.8, 200),
            frame: crate::synthesis::X3Frame::Envelope,
            transverse: crate::synthesis::TransverseSlice::Peak,
        }),
        trajectory: Some(TrajectorySection {
            x_minus: Axis::new(-window, window, 4001),
            comoving: None,
        }),
        ..base(name, Some(v_a), None, pulse())
    }
}

fn fig4(name: &str, v_fstar: f64, branch: Branch) -> ScenarioFile {
    let mut f = base(name, None, Some(v_fstar), constant());
    f.correlation.branch = branch;
    f.transverse.w = 4.0 * std::f64::consts::PI;
    f.spectrum = SpectrumSection {
        shape: SpectralShape::SuperGaussian,
        order: 10.0,
        delta_eta: Some(0.005),
        envelope_length: None,
    };
    f.quadrature.n_eta = 64;
    f.quadrature.n_p1 = 64;
    f.map = Some(MapSection::default());
    f
}

/// The scenario file behind a built-in preset.
pub fn preset_file(name: &str) -> Result<ScenarioFile> {
    let pi = std::f64::consts::PI;
    Ok(match name {
        "fig1a" | "fig1c" | "fig1e" => {
            let (v_a, field) = match name {
                "fig1a" => (0.0, FieldSection::default()),
                "fig1c" => (-0.3, FieldSection::default()),
                _ => (-0.3, pulse()),
            };
            let mut f = base(name, Some(v_a), None, field);
            f.cut = Some(CutSection {
                x_minus: 0.0,
                x1: Axis::new(-3.0 * W_WIDE, 3.0 * W_WIDE, 121),
                x3: Axis::new(-4e4, 4e4, 121),
                frame: crate::synthesis::X3Frame::Peak,
            });
            f
        }
        "fig2a" => fig2(name, -0.3, 4.68e6),
        "fig2b" => fig2(name, 0.0, 2.25e6),
        "fig2c" => fig2(name, 19.5, 1.64e6),
        "fig3" => {
            let mut f = base(name, Some(19.5), None, constant());
            f.trajectory = Some(TrajectorySection {
                x_minus: Axis::new(-pi / OMEGA, pi / OMEGA, 257),
                comoving: Some(Comoving::Named(ComovingFrame::Peak)),
            });
            f.cut = Some(CutSection {
                x_minus: 0.0,
                x1: Axis::new(-3.0 * W_WIDE, 3.0 * W_WIDE, 121),
                x3: Axis::new(-1e6, 1e6, 201),
                frame: crate::synthesis::X3Frame::Peak,
            });
            f
        }
        "fig4a" => fig4(name, 0.0, Branch::Auto),
        "fig4b" => fig4(name, -0.5, Branch::Negative),
        "fig4c" => fig4(name, -4.1, Branch::Auto),
        _ => {
            return Err(Error::invalid(
                "preset",
                format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")),
            ))
        }
    })
}

/// Figure-caption constants each preset must reproduce.
pub fn caption_checks(name: &str, s: &Scenario) -> Vec<CaptionCheck> {
    let d = &s.derived;
    let mut out = Vec::new();
    match name {
        "fig1a" => out.push(CaptionCheck::new("<eta>", d.eta_center, 1.67, 0.005)),
        "fig1c" => out.push(CaptionCheck::new("<eta>", d.eta_center, 1.27, 0.005)),
        "fig1e" => {
            out.push(CaptionCheck::new("<eta>", d.eta_center, 1.27, 0.005));
            out.push(CaptionCheck::new("v_f(xi*)", d.v_f, 0.0, 0.02));
        }
        "fig2a" | "fig2b" | "fig2c" => {
            let (vf, designed_for) = match name {
                "fig2a" => (0.0189, 0.0),
                "fig2b" => (0.2, 0.2),
                _ => (-4.1, -4.1),
            };
            out.push(CaptionCheck::new("v_f(xi*)", d.v_f, vf, 0.005));
            let designed = design_va(designed_for, d.xi_star, d.p_minus).unwrap_or(f64::NAN);
            out.push(CaptionCheck::new("v_a vs designed", d.v_a, designed, 0.05));
            out.push(CaptionCheck::new("v_1D(xi*)", d.v_1d, -0.24, 0.005));
            out.push(CaptionCheck::new("v_1D(0)", d.v_1d_free, -0.8, 0.005));
        }
        "fig3" => {
            out.push(CaptionCheck::new("v_f(xi*)", d.v_f, -4.1, 0.005));
            let amp1 = d.xi_star / (d.p_minus * s.field.omega);
            let amp3 = d.xi_star * d.xi_star / (8.0 * d.p_minus * d.p_minus * s.field.omega);
            out.push(CaptionCheck::new("x1 amplitude", amp1, 100.0, 1e-9));
            out.push(CaptionCheck::new("x3 amplitude", amp3, 12.5, 1e-9));
        }
        "fig4a" | "fig4b" | "fig4c" => {
            out.push(CaptionCheck::new("v_1D/(1-v_1D)", d.v_1d / (1.0 - d.v_1d), -0.1944, 5e-4));
            out.push(CaptionCheck::new("v_1D", d.v_1d, -0.24, 0.005));
            out.push(CaptionCheck::new("w", s.transverse.w, 4.0 * std::f64::consts::PI, 1e-12));
            if name == "fig4c" {
                out.push(CaptionCheck::new("v_f* vs 1/v_1D", 1.0 / d.v_1d, -4.1, 0.05));
            }
        }
        _ => {}
    }
    out
}

/// Validates a preset and fails if any caption constant is off by more than its rounding.
pub fn preset(name: &str) -> std::result::Result<Scenario, Vec<Error>> {
    let s = validate(preset_file(name).map_err(|e| vec![e])?)?;
    let bad: Vec<Error> = caption_checks(name, &s)
        .into_iter()
        .filter(|c| !c.passed())
        .map(|c| {
            Error::invalid(
                &format!("preset.{name}"),
                format!("{} = {} but the caption value is {} ± {}", c.label, c.value, c.expected, c.tolerance),
            )
        })
        .collect();
    if bad.is_empty() {
        Ok(s)
    } else {
        Err(bad)
    }
}
