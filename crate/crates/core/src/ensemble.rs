//! Seeded ensembles: Born-rule positions, perturbed pilot-wave velocities,
//! parallel QPD evolution and summary statistics.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dynamics::{
    dbb_initial_velocity, integrate_qpd, Event, IntegratorSettings, ParticleState, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::geometry::{from_spherical, Vec3, ZERO};
use crate::potential::ClassicalPotential;
use crate::wavemodels::{ModelKind, WaveModel};

/// Knots of tabulated inverse CDFs.
pub const TABLE_KNOTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum VelocityLaw {
    DbbExact,
    /// Pilot-wave velocity plus `mean + sigma_tilde * N(0, 1)` per axis.
    GaussianPerturbation {
        mean: Vec3,
        sigma_tilde: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub velocity_law: VelocityLaw,
    pub seed: u64,
    pub t0: f64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("ensemble size must be at least 1".into()));
        }
        if let VelocityLaw::GaussianPerturbation { mean, sigma_tilde } = &self.velocity_law {
            if !(*sigma_tilde >= 0.0 && sigma_tilde.is_finite())
                || mean.iter().any(|m| !m.is_finite())
            {
                return Err(Error::Domain(format!(
                    "velocity perturbation needs finite mean and sigma_tilde >= 0, got {mean:?}, {sigma_tilde}"
                )));
            }
        }
        Ok(())
    }
}

/// Piecewise-linear CDF on a uniform grid, invertible by table lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl TabulatedCdf {
    /// Integrates an unnormalized `density` on `[lo, hi]` with the trapezoid rule.
    pub fn new(lo: f64, hi: f64, knots: usize, density: impl Fn(f64) -> f64) -> Self {
        let h = (hi - lo) / (knots - 1) as f64;
        let xs: Vec<f64> = (0..knots).map(|i| lo + i as f64 * h).collect();
        let p: Vec<f64> = xs.iter().map(|&x| density(x)).collect();
        let mut cdf = Vec::with_capacity(knots);
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in p.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * h;
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Self { xs, cdf }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let s = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.cdf[i] + s * (self.cdf[i + 1] - self.cdf[i])
    }

    pub fn inverse(&self, u: f64) -> f64 {
        let i = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let s = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + s * (self.xs[i] - self.xs[i - 1])
    }
}

/// Born-rule law of the position (of `x` for 1D models, of `r` for central ones).
#[derive(Debug, Clone)]
enum PositionLaw {
    Normal { mean: f64, std: f64 },
    Table(TabulatedCdf),
    Central { radial: TabulatedCdf },
}

fn position_law(model: &WaveModel, t: f64) -> Result<PositionLaw> {
    match model.kind() {
        ModelKind::StepEigenstate1D { .. } => Err(Error::NonNormalizable("the step eigenstate")),
        ModelKind::FreeGaussian1D => Ok(PositionLaw::Normal {
            mean: 0.0,
            std: (1.0 + t * t).sqrt(),
        }),
        ModelKind::CoherentState1D { a } => Ok(PositionLaw::Normal {
            mean: a * t.cos(),
            std: 0.5f64.sqrt(),
        }),
        ModelKind::HarmonicEigenstate1D { n } => {
            let w = (2.0 * *n as f64 + 1.0).sqrt() + 10.0;
            Ok(PositionLaw::Table(TabulatedCdf::new(
                -w,
                w,
                TABLE_KNOTS,
                |x| model.amplitude(&[x, 0.0, 0.0], t).powi(2),
            )))
        }
        ModelKind::CentralSuperposition { .. } => {
            let rad = model.radial().expect("central model has a radial profile");
            Ok(PositionLaw::Central {
                radial: TabulatedCdf::new(0.0, rad.support_radius(), TABLE_KNOTS, |r| {
                    let v: f64 = rad.value(r);
                    v * v * r * r
                }),
            })
        }
    }
}

/// CDF of the Born-rule law of `x` for a one-dimensional normalizable model at time `t`.
pub fn born_cdf_1d(model: &WaveModel, t: f64) -> Result<impl Fn(f64) -> f64> {
    if model.dimension() != 1 {
        return Err(Error::InvalidModel(
            "born_cdf_1d needs a one-dimensional model".into(),
        ));
    }
    let law = position_law(model, t)?;
    let normal = match &law {
        PositionLaw::Normal { mean, std } => Some(Normal::new(*mean, *std).expect("positive std")),
        _ => None,
    };
    Ok(move |x: f64| match (&law, &normal) {
        (_, Some(nd)) => nd.cdf(x),
        (PositionLaw::Table(tab), _) => tab.cdf(x),
        _ => unreachable!("one-dimensional laws are normal or tabulated"),
    })
}

fn particle_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Initial states, deterministic in `spec.seed`; particle `i` draws from its own stream.
pub fn sample_initial(spec: &EnsembleSpec, model: &WaveModel) -> Result<Vec<ParticleState>> {
    spec.validate()?;
    let law = position_law(model, spec.t0)?;
    let dim = model.dimension();
    let angular_bound = model.angular().map(|a| {
        let l = a.l() as f64;
        (2.0 * l + 1.0) / (4.0 * PI)
    });
    (0..spec.n)
        .map(|i| {
            let mut rng = particle_rng(spec.seed, i);
            let x = match &law {
                PositionLaw::Normal { mean, std } => {
                    let z: f64 = rng.sample(StandardNormal);
                    [mean + std * z, 0.0, 0.0]
                }
                PositionLaw::Table(tab) => [tab.inverse(rng.random::<f64>()), 0.0, 0.0],
                PositionLaw::Central { radial } => {
                    let ang = model.angular().expect("central model");
                    let bound = angular_bound.expect("central model");
                    let r = radial.inverse(rng.random::<f64>());
                    loop {
                        let cos_t = 2.0 * rng.random::<f64>() - 1.0;
                        let phi = 2.0 * PI * rng.random::<f64>();
                        let u = from_spherical(1.0, cos_t.acos(), phi);
                        if rng.random::<f64>() * bound <= ang.value_at(&u).norm_sqr() {
                            break [r * u[0], r * u[1], r * u[2]];
                        }
                    }
                }
            };
            let mut v = dbb_initial_velocity(model, &x, spec.t0)?;
            if let VelocityLaw::GaussianPerturbation { mean, sigma_tilde } = &spec.velocity_law {
                for d in 0..dim {
                    let z: f64 = rng.sample(StandardNormal);
                    v[d] += mean[d] + sigma_tilde * z;
                }
            }
            Ok(ParticleState { x, v, t: spec.t0 })
        })
        .collect()
}

/// Ensemble summary at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleRow {
    pub t: f64,
    pub mean: Vec3,
    /// `sqrt` of the trace of the sample covariance.
    pub std: f64,
    pub frac_escaped: f64,
    pub frac_stopped: f64,
    pub n_alive: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub rows: Vec<EnsembleRow>,
    /// `positions[k][i]`: particle `i` at the `k`-th sample time, `None` once
    /// it has escaped or stopped.
    pub positions: Vec<Vec<Option<Vec3>>>,
}

impl EnsembleStats {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,mean_x,mean_y,mean_z,std,frac_escaped,frac_stopped,n_alive"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.mean[0],
                r.mean[1],
                r.mean[2],
                r.std,
                r.frac_escaped,
                r.frac_stopped,
                r.n_alive
            )?;
        }
        Ok(())
    }

    /// Alive `x` coordinates at the `k`-th sample time.
    pub fn x_values(&self, k: usize) -> Vec<f64> {
        self.positions[k].iter().flatten().map(|p| p[0]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Alive(Vec3),
    Escaped,
    Stopped,
}

fn status_at(record: &Result<TrajectoryRecord>, t: f64) -> Status {
    let Ok(rec) = record else {
        return Status::Stopped;
    };
    if let Some(s) = rec.samples.iter().find(|s| s.t == t) {
        let escaped_before = rec.escaped().is_some_and(|e| e.time() < t);
        if !escaped_before {
            return Status::Alive(s.x);
        }
    }
    match rec.escaped() {
        Some(Event::Escaped { t: te, .. }) if *te <= t => Status::Escaped,
        _ => Status::Stopped,
    }
}

/// Integrates every state with QPD in parallel and aggregates at `sample_times`.
/// Failed trajectories count as stopped.
pub fn evolve_ensemble(
    states: &[ParticleState],
    model: &WaveModel,
    pot: &ClassicalPotential,
    settings: &IntegratorSettings,
    sample_times: &[f64],
) -> Result<EnsembleStats> {
    if states.is_empty() {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let mut st = settings.clone();
    st.sample_times = sample_times.to_vec();
    st.t_end = sample_times
        .last()
        .copied()
        .unwrap_or(st.t_end)
        .max(st.t_end);
    if let Some(s0) = states.first() {
        st.validate(s0.t)?;
    }
    let records: Vec<Result<TrajectoryRecord>> = states
        .par_iter()
        .map(|s| integrate_qpd(model, pot, s, &st))
        .collect();

    let n = states.len() as f64;
    let mut rows = Vec::with_capacity(sample_times.len());
    let mut positions = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let status: Vec<Status> = records.iter().map(|r| status_at(r, t)).collect();
        let alive: Vec<Vec3> = status
            .iter()
            .filter_map(|s| {
                if let Status::Alive(x) = s {
                    Some(*x)
                } else {
                    None
                }
            })
            .collect();
        let escaped = status
            .iter()
            .filter(|s| matches!(s, Status::Escaped))
            .count();
        let stopped = status
            .iter()
            .filter(|s| matches!(s, Status::Stopped))
            .count();
        let k = alive.len();
        let mut mean = ZERO;
        for x in &alive {
            for d in 0..3 {
                mean[d] += x[d];
            }
        }
        let mut std = f64::NAN;
        if k > 0 {
            for m in &mut mean {
                *m /= k as f64;
            }
        } else {
            mean = [f64::NAN; 3];
        }
        if k > 1 {
            let ss: f64 = alive
                .iter()
                .map(|x| (0..3).map(|d| (x[d] - mean[d]).powi(2)).sum::<f64>())
                .sum();
            std = (ss / (k - 1) as f64).sqrt();
        }
        rows.push(EnsembleRow {
            t,
            mean,
            std,
            frac_escaped: escaped as f64 / n,
            frac_stopped: stopped as f64 / n,
            n_alive: k,
        });
        positions.push(
            status
                .iter()
                .map(|s| {
                    if let Status::Alive(x) = s {
                        Some(*x)
                    } else {
                        None
                    }
                })
                .collect(),
        );
    }
    Ok(EnsembleStats { rows, positions })
}

/// Predicted mean `v0 sqrt(1+t^2) atan t` and std `sqrt((1+t^2)(1 + sigma_tilde^2 atan^2 t))`
/// of the free-packet ensemble with velocities `N(v0, sigma_tilde^2)`.
pub fn gaussian_prediction(v0: f64, sigma_tilde: f64, t: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::Domain(format!("prediction needs t >= 0, got {t}")));
    }
    let s = (1.0 + t * t).sqrt();
    let a = t.atan();
    Ok((
        v0 * s * a,
        s * (1.0 + sigma_tilde * sigma_tilde * a * a).sqrt(),
    ))
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
