//! Config-driven scenario runner: builds the model, dispatches the configured
//! mode, writes CSV artifacts and a `key: value` run report.

mod config;

pub use config::{
    parse_config, CentralConfig, ClassifyConfig, ConfigError, EnsembleConfig, EnsembleLaw,
    IntegratorConfig, Mode, ModelChoice, ModelConfig, OutputConfig, ParseIssue, PotentialChoice,
    PotentialConfig, RadialChoice, RadialConfig, RunConfig, ScenarioConfig, SweepConfig,
    VelocityInit,
};

use std::fmt::{Display, Write as _};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::central::{self, AngularFunction};
use crate::dynamics::{self, IntegratorSettings, ParticleState, TrajectoryRecord};
use crate::ensemble::{self, EnsembleSpec, VelocityLaw};
use crate::geometry::{add, norm, sub, Vec3};
use crate::ode::{DenseStep, OdeSystem, StepControl, Stepper};
use crate::oracles;
use crate::potential::{self, CentralKind, ClassicalPotential, DEFAULT_FD_STEP};
use crate::wavemodels::{ModelKind, RadialKind, WaveModel};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Model {
        context: String,
        source: crate::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn model_err(context: impl Into<String>) -> impl FnOnce(crate::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Model { context, source }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

impl ScenarioConfig {
    pub fn model_kind(&self) -> ModelKind {
        let m = &self.model;
        match m.kind {
            ModelChoice::FreeGaussian => ModelKind::FreeGaussian1D,
            ModelChoice::Coherent => ModelKind::CoherentState1D { a: m.coherent_a },
            ModelChoice::Harmonic => ModelKind::HarmonicEigenstate1D { n: m.harmonic_n },
            ModelChoice::Step => ModelKind::StepEigenstate1D {
                energy: m.step_e,
                height: m.step_v,
            },
            ModelChoice::Central => {
                let c = &m.central;
                let radial = match c.radial {
                    RadialChoice::Hydrogen => RadialKind::HydrogenLike {
                        n: c.n,
                        l: c.l,
                        a0: c.a0,
                    },
                    RadialChoice::Oscillator => RadialKind::Oscillator {
                        l: c.l,
                        omega: c.omega,
                    },
                };
                ModelKind::CentralSuperposition {
                    l: c.l,
                    coefficients: c.coefficients.clone(),
                    radial,
                    hbar: c.hbar,
                    mass: c.mass,
                }
            }
        }
    }

    pub fn build_model(&self) -> Result<WaveModel, ConfigError> {
        if self.model.kind == ModelChoice::Step && self.model.step_e >= self.model.step_v {
            return Err(invalid(format!(
                "E < V required for the step model, got E = {}, V = {}",
                self.model.step_e, self.model.step_v
            )));
        }
        WaveModel::new(self.model_kind()).map_err(|e| invalid(format!("model: {e}")))
    }

    pub fn build_potential(&self, model: &WaveModel) -> Result<ClassicalPotential, ConfigError> {
        let p = &self.potential;
        let pot = match p.kind {
            PotentialChoice::Auto => return Ok(ClassicalPotential::paired_with(model)),
            PotentialChoice::Free => ClassicalPotential::Free,
            PotentialChoice::Step => ClassicalPotential::Step1D { height: p.height },
            PotentialChoice::Harmonic => ClassicalPotential::Harmonic1D {
                stiffness: p.stiffness,
            },
            PotentialChoice::Coulomb => ClassicalPotential::Central(CentralKind::Coulomb {
                strength: p.strength,
            }),
            PotentialChoice::Harmonic3D => ClassicalPotential::Central(CentralKind::Harmonic3D {
                stiffness: p.stiffness,
            }),
        };
        pot.check_pairing(model)
            .map_err(|e| invalid(format!("potential: {e}")))?;
        Ok(pot)
    }

    pub fn integrator_settings(&self) -> IntegratorSettings {
        let g = &self.integrator;
        IntegratorSettings {
            rel_tol: g.rel_tol,
            abs_tol: g.abs_tol,
            max_step: g.max_step,
            t_end: g.t_end,
            sample_times: g.sample_times.clone(),
            escape_radius: g.escape_radius,
            stop_on_escape: g.stop_on_escape,
            center_radius: g.center_radius,
            ..IntegratorSettings::default()
        }
    }

    /// Initial states of the trajectory runs; `v0` and `x0` broadcast when one has length 1.
    pub fn initial_states(&self, model: &WaveModel) -> Result<Vec<ParticleState>, CliError> {
        let run = &self.run;
        let n = match run.velocity {
            VelocityInit::Dbb => run.x0.len(),
            _ => run.x0.len().max(run.v0.len()),
        };
        (0..n)
            .map(|k| {
                let x = run.x0[k.min(run.x0.len() - 1)];
                let given = || run.v0[k.min(run.v0.len() - 1)];
                let v = match run.velocity {
                    VelocityInit::Given => given(),
                    VelocityInit::Dbb | VelocityInit::DbbPlus => {
                        let u = dynamics::dbb_initial_velocity(model, &x, run.t0)
                            .map_err(model_err(format!("initial velocity of run {k}")))?;
                        if run.velocity == VelocityInit::Dbb {
                            u
                        } else {
                            add(&u, &given())
                        }
                    }
                };
                Ok(ParticleState { x, v, t: run.t0 })
            })
            .collect()
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let e = &self.ensemble;
        EnsembleSpec {
            n: e.n,
            velocity_law: match e.law {
                EnsembleLaw::Dbb => VelocityLaw::DbbExact,
                EnsembleLaw::Gaussian => VelocityLaw::GaussianPerturbation {
                    mean: e.v0,
                    sigma_tilde: e.sigma_tilde,
                },
            },
            seed: e.seed,
            t0: self.run.t0,
        }
    }

    /// Semantic checks: model parameters, pairing, and the requirements of the selected mode.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let model = self.build_model()?;
        self.build_potential(&model)?;
        if self.output.stem.contains(['/', '\\']) {
            return Err(invalid("output.stem must not contain path separators"));
        }
        let needs_traj = matches!(self.run.mode, Mode::Trajectory | Mode::Dbb | Mode::Check);
        if needs_traj {
            self.integrator_settings()
                .validate(self.run.t0)
                .map_err(|e| invalid(format!("integrator: {e}")))?;
            let run = &self.run;
            if run.x0.is_empty() {
                return Err(invalid("run.x0 needs at least one position"));
            }
            let uses_v0 = self.run.mode != Mode::Dbb && run.velocity != VelocityInit::Dbb;
            if uses_v0 {
                let (a, b) = (run.x0.len(), run.v0.len());
                if b == 0 || !(a == b || a == 1 || b == 1) {
                    return Err(invalid(format!(
                        "run.x0 and run.v0 have {a} and {b} entries; they must match or one must have 1"
                    )));
                }
            }
            if model.dimension() == 1 {
                let off_axis = |v: &Vec3| v[1] != 0.0 || v[2] != 0.0;
                if run.x0.iter().chain(run.v0.iter()).any(off_axis) {
                    return Err(invalid(
                        "one-dimensional models take only x components in run.x0 / run.v0",
                    ));
                }
            }
        }
        if matches!(self.run.mode, Mode::Ensemble) {
            self.validate_ensemble(&model)?;
        }
        match self.run.mode {
            Mode::Sweep => {
                let s = &self.sweep;
                if s.etilde_n < 2 || s.c_n < 2 {
                    return Err(invalid("sweep grids need at least 2 points per axis"));
                }
                if !(s.etilde_min < s.etilde_max && s.c_min < s.c_max) {
                    return Err(invalid("sweep ranges need min < max"));
                }
            }
            Mode::Radial => {
                let d = &self.radial;
                if !(d.r0 > 0.0 && d.m0 > 0.0 && d.t_end > 0.0) {
                    return Err(invalid(
                        "radial.r0, radial.m0 and radial.t_end must be positive",
                    ));
                }
                if d.rdot0.len() != d.c.len() || d.c.is_empty() {
                    return Err(invalid(
                        "radial.rdot0 and radial.C must be non-empty lists of equal length",
                    ));
                }
                if d.samples < 2 {
                    return Err(invalid("radial.samples must be at least 2"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_ensemble(&self, model: &WaveModel) -> Result<(), ConfigError> {
        if !model.is_normalizable() {
            return Err(invalid(format!(
                "ensembles need a normalizable model, {} is not",
                model.name()
            )));
        }
        self.ensemble_spec()
            .validate()
            .map_err(|e| invalid(format!("ensemble: {e}")))?;
        let times = &self.ensemble.sample_times;
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < self.run.t0 {
            return Err(invalid(
                "ensemble.sample_times must be non-empty, increasing and not before run.t0",
            ));
        }
        self.integrator_settings()
            .validate(self.run.t0)
            .map_err(|e| invalid(format!("integrator: {e}")))
    }
}

/// Ordered `key: value` lines plus the pass/fail tally of checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    entries: Vec<(String, String)>,
    failures: Vec<String>,
}

impl RunReport {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Records `key.value` and `key.status`; `pass` decides the status.
    pub fn check(&mut self, key: &str, value: f64, threshold: f64, pass: bool) {
        self.push(format!("{key}.value"), value);
        self.push(format!("{key}.threshold"), threshold);
        self.push(format!("{key}.status"), if pass { "pass" } else { "fail" });
        if !pass {
            self.failures.push(key.to_string());
        }
    }

    fn check_below(&mut self, key: &str, value: f64, threshold: f64) {
        self.check(key, value, threshold, value < threshold);
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }

    /// Inverse of [`render`](Self::render) for the entry list.
    pub fn parse_entries(text: &str) -> Vec<(String, String)> {
        text.lines()
            .filter_map(|l| l.split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub files: Vec<PathBuf>,
}

struct Output {
    dir: PathBuf,
    stem: String,
    files: Vec<PathBuf>,
}

impl Output {
    fn new(cfg: &OutputConfig) -> Result<Self, CliError> {
        let dir = PathBuf::from(&cfg.dir);
        fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir,
            stem: cfg.stem.clone(),
            files: Vec::new(),
        })
    }

    fn write(
        &mut self,
        suffix: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{}_{suffix}", self.stem));
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        body(&mut w).and_then(|_| w.flush()).map_err(io)?;
        self.files.push(path.clone());
        Ok(path)
    }
}

/// Runs the configured mode and writes its artifacts plus `{stem}_report.txt`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let mut out = Output::new(&config.output)?;
    let mut report = RunReport::default();
    for (k, v) in config.key_values() {
        report.push(format!("config.{k}"), v);
    }
    let mode_result = match config.run.mode {
        Mode::Trajectory | Mode::Dbb => run_trajectories(config, &mut out, &mut report),
        Mode::Ensemble => run_ensemble(config, &mut out, &mut report),
        Mode::Classify => {
            classify_into(config.classify.etilde, config.classify.c, &mut report);
            Ok(())
        }
        Mode::Sweep => run_sweep(config, &mut out, &mut report),
        Mode::Radial => run_radial(config, &mut out, &mut report),
        Mode::Check => run_checks(config, &mut report),
    };
    if let Err(e) = &mode_result {
        report.push("error", e);
    }
    report.push("checks.failed", report.failures().len());
    let status = if mode_result.is_ok() && report.passed() {
        "ok"
    } else {
        "failed"
    };
    report.push("status", status);
    let text = report.render();
    out.write("report.txt", |w| w.write_all(text.as_bytes()))?;
    mode_result?;
    Ok(RunOutcome {
        report,
        files: out.files,
    })
}

/// Runs the invariant suite regardless of `run.mode`.
pub fn check(config: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    let mut c = config.clone();
    c.run.mode = Mode::Check;
    run(&c)
}

fn max_rel_dev(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs
        .map(|(got, want)| (got - want).abs() / want.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Closed-form `x(t)` for models that have one.
fn oracle_for(model: &WaveModel, init: &ParticleState) -> Option<impl Fn(f64) -> f64> {
    let (x0, v0, t0) = (init.x[0], init.v[0], init.t);
    let a = match model.kind() {
        ModelKind::FreeGaussian1D if t0 == 0.0 => None,
        ModelKind::CoherentState1D { a } if t0 == 0.0 => Some(*a),
        _ => return None,
    };
    Some(move |t: f64| match a {
        None => oracles::free_gaussian_trajectory(x0, v0, t),
        Some(a) => oracles::coherent_trajectory(x0, v0, a, t),
    })
}

fn run_trajectories(
    cfg: &ScenarioConfig,
    out: &mut Output,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let pot = cfg.build_potential(&model)?;
    let settings = cfg.integrator_settings();
    let dbb = cfg.run.mode == Mode::Dbb;
    let states = if dbb {
        cfg.run
            .x0
            .iter()
            .map(|&x| ParticleState {
                x,
                v: [0.0; 3],
                t: cfg.run.t0,
            })
            .collect()
    } else {
        cfg.initial_states(&model)?
    };
    report.push("runs", states.len());
    for (k, init) in states.iter().enumerate() {
        let ctx = format!("trajectory {k}");
        let rec = if dbb {
            dynamics::integrate_dbb(&model, &pot, &init.x, init.t, &settings)
        } else {
            dynamics::integrate_qpd(&model, &pot, init, &settings)
        }
        .map_err(model_err(ctx))?;
        out.write(&format!("traj_{k}.csv"), |w| rec.write_csv(w))?;
        summarize_trajectory(&format!("traj.{k}"), &rec, &model, report)?;
    }
    Ok(())
}

fn summarize_trajectory(
    key: &str,
    rec: &TrajectoryRecord,
    model: &WaveModel,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let first = rec.samples[0];
    report.push(format!("{key}.x0"), fmt_vec(&first.x));
    report.push(format!("{key}.v0"), fmt_vec(&first.v));
    report.push(format!("{key}.samples"), rec.samples.len());
    let events: Vec<String> = rec
        .events
        .iter()
        .map(|e| format!("{}@{}", e.name(), e.time()))
        .collect();
    report.push(format!("{key}.events"), events.join(" "));
    report.push(format!("{key}.terminal_event"), rec.terminal_event().name());
    report.push(format!("{key}.t_final"), rec.last().t);
    let max_r = rec.samples.iter().map(|s| norm(&s.x)).fold(0.0, f64::max);
    report.push(format!("{key}.max_abs_x"), max_r);
    report.push(
        format!("{key}.max_residual"),
        rec.samples.iter().map(|s| s.residual).fold(0.0, f64::max),
    );
    let e0 = first.etilde;
    let drift = rec
        .samples
        .iter()
        .map(|s| (s.etilde - e0).abs())
        .fold(0.0, f64::max);
    report.push(format!("{key}.etilde0"), e0);
    report.push(format!("{key}.etilde_drift"), drift);
    if rec.dynamics == dynamics::Dynamics::Qpd {
        if let Some(x_of_t) = oracle_for(model, &first.state()) {
            let dev = max_rel_dev(rec.samples.iter().map(|s| (s.x[0], x_of_t(s.t))));
            report.push(format!("{key}.oracle_max_rel_dev"), dev);
        }
    }
    if model.dimension() == 3 {
        summarize_central(key, rec, model, report)?;
    }
    Ok(())
}

fn summarize_central(
    key: &str,
    rec: &TrajectoryRecord,
    model: &WaveModel,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let ang = AngularFunction::from_model(model).map_err(model_err("angular function"))?;
    let m0 = ang.mass();
    let inv = |s: &ParticleState| central::invariants_of(s, |th, ph| ang.value(th, ph), m0);
    let first = rec.samples[0];
    let i0 = inv(&first.state()).map_err(model_err(format!("{key} invariants")))?;
    let scale = i0.etilde.abs().max(i0.c.abs()).max(1.0);
    let cls = central::classify_with_tolerance(i0.etilde, i0.c, scale);
    report.push(format!("{key}.central.etilde"), i0.etilde);
    report.push(format!("{key}.central.C"), i0.c);
    report.push(format!("{key}.central.regime"), cls.regime.name());
    report.push(
        format!("{key}.central.turning_radius"),
        cls.turning_radius.map_or("none".into(), |r| r.to_string()),
    );
    let (mut de, mut dc) = (0.0f64, 0.0f64);
    for s in &rec.samples {
        // the angular function is singular on the polar axis; skip such samples
        if let Ok(i) = inv(&s.state()) {
            de = de.max((i.etilde - i0.etilde).abs());
            dc = dc.max((i.c - i0.c).abs());
        }
    }
    report.push(format!("{key}.central.etilde_drift"), de);
    report.push(format!("{key}.central.C_drift"), dc);
    let d0 = dynamics::spherical_diagnostics(&first.x, &first.v);
    let mut dev = 0.0f64;
    for s in &rec.samples {
        if let Ok(r) = central::radial_trajectory(d0.r, d0.rdot, i0.etilde, m0, s.t - first.t) {
            dev = dev.max((norm(&s.x) - r).abs() / r.max(1e-300));
        }
    }
    report.push(format!("{key}.central.radial_max_rel_dev"), dev);
    let radii = rec.samples.iter().map(|s| norm(&s.x));
    let (rmin, rmax) = radii.fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
    report.push(format!("{key}.central.r_min"), rmin);
    report.push(format!("{key}.central.r_max"), rmax);
    Ok(())
}

fn fmt_vec(v: &Vec3) -> String {
    format!("{} {} {}", v[0], v[1], v[2])
}

fn run_ensemble(
    cfg: &ScenarioConfig,
    out: &mut Output,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let pot = cfg.build_potential(&model)?;
    let spec = cfg.ensemble_spec();
    let states = ensemble::sample_initial(&spec, &model).map_err(model_err("ensemble sampling"))?;
    let times = &cfg.ensemble.sample_times;
    let stats = ensemble::evolve_ensemble(&states, &model, &pot, &cfg.integrator_settings(), times)
        .map_err(model_err("ensemble evolution"))?;
    out.write("ensemble.csv", |w| stats.write_csv(w))?;
    report.push("ensemble.n", spec.n);
    let prediction = matches!(model.kind(), ModelKind::FreeGaussian1D) && cfg.run.t0 == 0.0;
    let (v0, st) = match spec.velocity_law {
        VelocityLaw::DbbExact => (0.0, 0.0),
        VelocityLaw::GaussianPerturbation { mean, sigma_tilde } => (mean[0], sigma_tilde),
    };
    for (k, row) in stats.rows.iter().enumerate() {
        let key = format!("ensemble.t{k}");
        report.push(format!("{key}.t"), row.t);
        report.push(format!("{key}.mean"), fmt_vec(&row.mean));
        report.push(format!("{key}.std"), row.std);
        report.push(format!("{key}.frac_escaped"), row.frac_escaped);
        report.push(format!("{key}.frac_stopped"), row.frac_stopped);
        if prediction {
            let (m, s) =
                ensemble::gaussian_prediction(v0, st, row.t).map_err(model_err("prediction"))?;
            report.push(format!("{key}.predicted_mean"), m);
            report.push(format!("{key}.predicted_std"), s);
        }
        if model.dimension() == 1 && spec.velocity_law == VelocityLaw::DbbExact {
            let cdf = ensemble::born_cdf_1d(&model, row.t).map_err(model_err("Born CDF"))?;
            let xs = stats.x_values(k);
            report.push(format!("{key}.ks"), ensemble::ks_statistic(&xs, cdf));
            report.push(
                format!("{key}.ks_critical_1pct"),
                ensemble::ks_critical_1pct(xs.len()),
            );
        }
    }
    Ok(())
}

fn classify_into(etilde: f64, c: f64, report: &mut RunReport) {
    let cls = central::classify(etilde, c);
    report.push("classify.etilde", etilde);
    report.push("classify.C", c);
    report.push("classify.regime", cls.regime.name());
    report.push("classify.bounded", cls.regime.is_bounded());
    report.push(
        "classify.turning_radius",
        cls.turning_radius.map_or("none".into(), |r| r.to_string()),
    );
}

/// `i`-th of `n` evenly spaced points from `lo` to `hi`, hitting both ends exactly.
fn grid_point(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    let d = (n - 1) as f64;
    (lo * (d - i as f64) + hi * i as f64) / d
}

fn run_sweep(
    cfg: &ScenarioConfig,
    out: &mut Output,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let s = &cfg.sweep;
    let mut counts = std::collections::BTreeMap::new();
    let mut rows = Vec::with_capacity(s.etilde_n * s.c_n);
    for i in 0..s.etilde_n {
        let e = grid_point(s.etilde_min, s.etilde_max, s.etilde_n, i);
        for j in 0..s.c_n {
            let c = grid_point(s.c_min, s.c_max, s.c_n, j);
            let cls = central::classify(e, c);
            *counts.entry(cls.regime.name()).or_insert(0usize) += 1;
            rows.push((e, c, cls));
        }
    }
    out.write("regimes.csv", |w| {
        writeln!(w, "Etilde,C,regime,turning_radius")?;
        for (e, c, cls) in &rows {
            let tr = cls.turning_radius.map_or(String::new(), |r| r.to_string());
            writeln!(w, "{e},{c},{},{tr}", cls.regime.name())?;
        }
        Ok(())
    })?;
    report.push("sweep.points", rows.len());
    for (name, n) in counts {
        report.push(format!("sweep.count.{name}"), n);
    }
    Ok(())
}

/// `m0 r'' = 2 C / r^3`: the radial equation with the angular part folded into `C`.
struct RadialOde {
    c: f64,
    m0: f64,
}

impl OdeSystem<2> for RadialOde {
    fn rhs(&self, _t: f64, y: &[f64; 2]) -> crate::Result<[f64; 2]> {
        if y[0] <= 0.0 {
            return Err(crate::Error::Domain(format!("radius reached {}", y[0])));
        }
        Ok([y[1], 2.0 * self.c / (self.m0 * y[0].powi(3))])
    }
}

/// Closed form and integrated `r(t)` at the sample times; the integration stops
/// once it fails (the fall to the center) and is `NaN` afterwards.
pub fn radial_curves(
    r0: f64,
    rdot0: f64,
    c: f64,
    m0: f64,
    times: &[f64],
    control: StepControl,
) -> Vec<(f64, f64, f64)> {
    let etilde = central::radial_energy(r0, rdot0, c, m0);
    let sys = RadialOde { c, m0 };
    let mut stepper = Stepper::new(&sys, 0.0, [r0, rdot0], control).ok();
    let mut dense: Option<DenseStep<2>> = None;
    let t_last = times.last().copied().unwrap_or(0.0);
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let closed = central::radial_trajectory(r0, rdot0, etilde, m0, t).unwrap_or(f64::NAN);
        let integrated = loop {
            if t == 0.0 {
                break r0;
            }
            if let Some(d) = dense.as_ref().filter(|d| t <= d.t1()) {
                break d.eval(t)[0];
            }
            match stepper.as_mut().map(|s| s.step(&sys, t_last)) {
                Some(Ok(d)) => dense = Some(d),
                _ => {
                    stepper = None;
                    break f64::NAN;
                }
            }
        };
        rows.push((t, closed, integrated));
    }
    rows
}

fn run_radial(
    cfg: &ScenarioConfig,
    out: &mut Output,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let d = &cfg.radial;
    let g = &cfg.integrator;
    let control = StepControl {
        rel_tol: g.rel_tol,
        abs_tol: g.abs_tol,
        max_step: g.max_step,
        initial_step: None,
    };
    let times: Vec<f64> = (0..d.samples)
        .map(|i| grid_point(0.0, d.t_end, d.samples, i))
        .collect();
    report.push("radial.runs", d.c.len());
    for (k, (&rdot0, &c)) in d.rdot0.iter().zip(&d.c).enumerate() {
        let rows = radial_curves(d.r0, rdot0, c, d.m0, &times, control);
        out.write(&format!("radial_{k}.csv"), |w| {
            writeln!(w, "t,r,r_integrated")?;
            for (t, r, ri) in &rows {
                writeln!(w, "{t},{r},{ri}")?;
            }
            Ok(())
        })?;
        let key = format!("radial.{k}");
        let etilde = central::radial_energy(d.r0, rdot0, c, d.m0);
        let cls = central::classify(etilde, c);
        report.push(format!("{key}.rdot0"), rdot0);
        report.push(format!("{key}.C"), c);
        report.push(format!("{key}.etilde"), etilde);
        report.push(format!("{key}.regime"), cls.regime.name());
        let t_center = central::center_time(d.r0, rdot0, etilde, d.m0);
        report.push(
            format!("{key}.center_time"),
            t_center.map_or("none".into(), |t| t.to_string()),
        );
        let dev = max_rel_dev(
            rows.iter()
                .filter(|r| r.1.is_finite() && r.2.is_finite())
                .map(|r| (r.2, r.1)),
        );
        report.push(format!("{key}.integrated_max_rel_dev"), dev);
    }
    Ok(())
}

/// Sample points for field checks: 1000 points along x for 1D models, a
/// 10x10x10 cell-centred cube for central ones.
fn field_grid(model: &WaveModel, t: f64) -> Vec<Vec3> {
    match model.kind() {
        ModelKind::CentralSuperposition { .. } => {
            let l = 2.0 * model.radial().expect("central").support_radius().min(20.0);
            let c = |i: usize| -l + (i as f64 + 0.5) * 2.0 * l / 10.0;
            let mut pts = Vec::with_capacity(1000);
            for i in 0..10 {
                for j in 0..10 {
                    for k in 0..10 {
                        pts.push([c(i), c(j), c(k)]);
                    }
                }
            }
            pts
        }
        ModelKind::StepEigenstate1D { .. } => (0..1000)
            .map(|i| [-10.0 + 15.0 * (i as f64 + 0.5) / 1000.0, 0.0, 0.0])
            .collect(),
        ModelKind::HarmonicEigenstate1D { n } => {
            let l = 4.0 + (2.0 * *n as f64 + 1.0).sqrt();
            (0..1000)
                .map(|i| [-l + 2.0 * l * (i as f64 + 0.5) / 1000.0, 0.0, 0.0])
                .collect()
        }
        _ => {
            let l = 4.0 * model.packet_scale(t);
            let c = match model.kind() {
                ModelKind::CoherentState1D { a } => a * t.cos(),
                _ => 0.0,
            };
            (0..1000)
                .map(|i| [c - l + 2.0 * l * (i as f64 + 0.5) / 1000.0, 0.0, 0.0])
                .collect()
        }
    }
}

const EIGEN_TOL: f64 = 1e-7;
const FD_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-6;
const COINCIDENCE_TOL: f64 = 1e-6;
const DRIFT_LAW_TOL: f64 = 1e-4;
/// Points whose finite-difference stencil comes closer than this to a node or
/// to the potential step are not smooth test points.
const SMOOTH_MARGIN: f64 = 1e-3;

fn run_checks(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let pot = cfg.build_potential(&model)?;
    let t0 = cfg.run.t0;
    let grid = field_grid(&model, t0);
    let smooth = |x: &Vec3| {
        let near_step = matches!(model.kind(), ModelKind::StepEigenstate1D { .. })
            && x[0].abs() < 4.0 * DEFAULT_FD_STEP;
        !near_step && model.node_factor(x, t0) > SMOOTH_MARGIN
    };

    if let Some(e) = model.energy() {
        let mut worst = 0.0f64;
        for x in grid.iter().filter(|x| !model.is_node(x, t0)) {
            let q = potential::quantum_potential(&model, x, t0)
                .map_err(model_err("quantum potential"))?;
            let u = model
                .phase_gradient(x, t0)
                .map_err(model_err("phase gradient"))?;
            let kin = 0.5 * model.units().mass * crate::geometry::dot(&u, &u);
            worst = worst.max((pot.value(x) + q + kin - e).abs());
        }
        report.check_below("check.eigenstate_identity", worst, EIGEN_TOL);
    }

    let mut fd_worst = 0.0f64;
    let mut fd_points = 0usize;
    for x in grid.iter().filter(|x| smooth(x)) {
        let q =
            potential::quantum_potential(&model, x, t0).map_err(model_err("quantum potential"))?;
        if let Ok(qfd) = potential::quantum_potential_fd(&model, x, t0, DEFAULT_FD_STEP) {
            fd_worst = fd_worst.max((q - qfd).abs() / q.abs().max(1.0));
            fd_points += 1;
        }
    }
    report.push("check.fd_points", fd_points);
    report.check_below("check.fd_vs_closed_form", fd_worst, FD_TOL);

    let mut settings = cfg.integrator_settings();
    if settings.sample_times.is_empty() {
        settings.sample_times = (0..=100)
            .map(|i| grid_point(t0, settings.t_end, 101, i))
            .collect();
    }
    let (mut residual, mut coincide, mut eig_drift, mut law) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, &x0) in cfg.run.x0.iter().enumerate() {
        let v0 = dynamics::dbb_initial_velocity(&model, &x0, t0)
            .map_err(model_err(format!("run {k}")))?;
        let init = ParticleState {
            x: x0,
            v: v0,
            t: t0,
        };
        let qpd = dynamics::integrate_qpd(&model, &pot, &init, &settings)
            .map_err(model_err(format!("qpd run {k}")))?;
        let dbb = dynamics::integrate_dbb(&model, &pot, &x0, t0, &settings)
            .map_err(model_err(format!("dbb run {k}")))?;
        residual = qpd
            .samples
            .iter()
            .map(|s| s.residual)
            .fold(residual, f64::max);
        for (a, b) in qpd.samples.iter().zip(&dbb.samples) {
            if a.t == b.t {
                coincide = coincide.max(norm(&sub(&a.x, &b.x)));
            }
        }
        report.push(
            format!("check.run.{k}.terminal_event"),
            qpd.terminal_event().name(),
        );

        // energy bookkeeping along a free QPD run from the same start, off the dBB constraint
        let kicked = ParticleState {
            v: add(&v0, &[0.5, 0.0, 0.0]),
            ..init
        };
        let kicked = if model.dimension() == 1 { kicked } else { init };
        if model.energy().is_some() {
            let rec = dynamics::integrate_qpd(&model, &pot, &kicked, &settings)
                .map_err(model_err(format!("energy run {k}")))?;
            let e0 = rec.samples[0].etilde;
            eig_drift = rec
                .samples
                .iter()
                .map(|s| (s.etilde - e0).abs())
                .fold(eig_drift, f64::max);
        } else {
            law = law.max(drift_law_residual(&model, &pot, &kicked, &settings)?);
        }
    }
    report.check_below("check.constraint_residual", residual, RESIDUAL_TOL);
    report.check_below("check.dbb_coincidence", coincide, COINCIDENCE_TOL);
    if model.energy().is_some() {
        report.check_below("check.etilde_drift", eig_drift, EIGEN_TOL);
    } else {
        report.check_below("check.energy_drift_law", law, DRIFT_LAW_TOL);
    }

    if model.is_normalizable() && model.dimension() == 1 {
        let spec = EnsembleSpec {
            velocity_law: VelocityLaw::DbbExact,
            ..cfg.ensemble_spec()
        };
        let states =
            ensemble::sample_initial(&spec, &model).map_err(model_err("ensemble sampling"))?;
        let mut times: Vec<f64> = cfg
            .ensemble
            .sample_times
            .iter()
            .copied()
            .filter(|&t| t >= t0)
            .collect();
        if times.is_empty() {
            times.push(t0);
        }
        let stats =
            ensemble::evolve_ensemble(&states, &model, &pot, &cfg.integrator_settings(), &times)
                .map_err(model_err("ensemble evolution"))?;
        let mut worst_ratio = 0.0f64;
        for (k, row) in stats.rows.iter().enumerate() {
            let cdf = ensemble::born_cdf_1d(&model, row.t).map_err(model_err("Born CDF"))?;
            let xs = stats.x_values(k);
            let d = ensemble::ks_statistic(&xs, cdf);
            let crit = ensemble::ks_critical_1pct(xs.len());
            report.push(format!("check.ks.t{k}.t"), row.t);
            report.push(format!("check.ks.t{k}.statistic"), d);
            report.push(format!("check.ks.t{k}.critical_1pct"), crit);
            worst_ratio = worst_ratio.max(d / crit);
        }
        report.check_below("check.ks_worst_ratio", worst_ratio, 1.0);
    }
    Ok(())
}

/// Largest `|dE~/dt - dQ/dt|` over interior check times, from centered differences.
fn drift_law_residual(
    model: &WaveModel,
    pot: &ClassicalPotential,
    init: &ParticleState,
    base: &IntegratorSettings,
) -> Result<f64, CliError> {
    let dt = 1e-3;
    let span = base.t_end - init.t;
    let mut times = Vec::new();
    for i in 1..=5 {
        let tc = init.t + span * i as f64 / 6.0;
        times.extend([tc - dt, tc, tc + dt]);
    }
    let settings = IntegratorSettings {
        sample_times: times,
        rel_tol: base.rel_tol.min(1e-11),
        abs_tol: base.abs_tol.min(1e-11),
        ..base.clone()
    };
    let rec =
        dynamics::integrate_qpd(model, pot, init, &settings).map_err(model_err("drift-law run"))?;
    let mut worst = 0.0f64;
    for w in rec.samples.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if (b.t - a.t - dt).abs() > 1e-9 || (c.t - b.t - dt).abs() > 1e-9 {
            continue;
        }
        let rate = (c.etilde - a.etilde) / (c.t - a.t);
        let dq = potential::quantum_potential_rate(model, &b.x, b.t).map_err(model_err("dQ/dt"))?;
        worst = worst.max((rate - dq).abs());
    }
    Ok(worst)
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}
