//! Integration of QPD (`m x'' = -grad(V + Q)`) and pilot-wave guidance
//! (`x' = grad S / m`) with sampling, diagnostics and event detection.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sub, to_spherical, Vec3, ZERO};
use crate::ode::{DenseStep, OdeSystem, StepControl, Stepper};
use crate::potential::{particle_energy, quantum_potential, total_force, ClassicalPotential};
use crate::wavemodels::WaveModel;

/// A step failure with the node factor below this is attributed to the node.
const STEP_FAILURE_NODE_FACTOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub x: Vec3,
    pub v: Vec3,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_end: f64,
    /// Output times; empty means one sample per accepted step.
    pub sample_times: Vec<f64>,
    /// Escape radius in units of the model's packet scale.
    pub escape_radius: f64,
    pub stop_on_escape: bool,
    /// Node factor below which integration stops with a proximity event.
    pub node_threshold: f64,
    /// Radius (in packet-scale units) at which central runs stop; `None` disables.
    pub center_radius: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            max_step: f64::INFINITY,
            t_end: 10.0,
            sample_times: Vec::new(),
            escape_radius: 10.0,
            stop_on_escape: true,
            node_threshold: crate::wavemodels::NODE_THRESHOLD,
            center_radius: Some(1e-3),
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self, t0: f64) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!(
                "tolerances must be positive, got {} / {}",
                self.rel_tol, self.abs_tol
            ));
        }
        if !(self.max_step > 0.0) {
            return bad(format!("max_step must be positive, got {}", self.max_step));
        }
        if !(self.t_end.is_finite() && self.t_end > t0) {
            return bad(format!(
                "t_end = {} must be finite and after t0 = {t0}",
                self.t_end
            ));
        }
        if !(self.escape_radius > 0.0) {
            return bad(format!(
                "escape_radius must be positive, got {}",
                self.escape_radius
            ));
        }
        if self.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sample_times must be strictly increasing".into());
        }
        if let (Some(&first), Some(&last)) = (self.sample_times.first(), self.sample_times.last()) {
            if first < t0 || last > self.t_end {
                return bad(format!("sample_times must lie in [{t0}, {}]", self.t_end));
            }
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    /// `NaN` where `Q` is undefined.
    pub q: f64,
    pub etilde: f64,
    pub residual: f64,
}

impl Sample {
    pub fn state(&self) -> ParticleState {
        ParticleState {
            x: self.x,
            v: self.v,
            t: self.t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    Escaped { t: f64, x: Vec3 },
    NodeProximity { t: f64, x: Vec3 },
    CenterReached { t: f64, x: Vec3 },
    Completed { t: f64 },
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::Escaped { .. } => "escaped",
            Event::NodeProximity { .. } => "node_proximity",
            Event::CenterReached { .. } => "center_reached",
            Event::Completed { .. } => "completed",
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Event::Escaped { t, .. }
            | Event::NodeProximity { t, .. }
            | Event::CenterReached { t, .. }
            | Event::Completed { t } => *t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    Qpd,
    PilotWave,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub dynamics: Dynamics,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("records hold at least the initial sample")
    }

    pub fn escaped(&self) -> Option<&Event> {
        self.events
            .iter()
            .find(|e| matches!(e, Event::Escaped { .. }))
    }

    /// Event that ended the run.
    pub fn terminal_event(&self) -> &Event {
        self.events.last().expect("records end with an event")
    }

    pub fn stopped_early(&self) -> bool {
        matches!(
            self.terminal_event(),
            Event::NodeProximity { .. } | Event::CenterReached { .. }
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,z,vx,vy,vz,Q,Etilde,residual")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                s.t, s.x[0], s.x[1], s.x[2], s.v[0], s.v[1], s.v[2], s.q, s.etilde, s.residual
            )?;
        }
        Ok(())
    }
}

/// Spherical coordinates and radial speed of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDiagnostics {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub rdot: f64,
}

pub fn spherical_diagnostics(x: &Vec3, v: &Vec3) -> SphericalDiagnostics {
    let (r, theta, phi) = to_spherical(x);
    let rdot = if r > 0.0 { dot(x, v) / r } else { 0.0 };
    SphericalDiagnostics {
        r,
        theta,
        phi,
        rdot,
    }
}

/// The pilot-wave velocity `grad S / m` at `(x0, t0)`.
pub fn dbb_initial_velocity(model: &WaveModel, x0: &Vec3, t0: f64) -> Result<Vec3> {
    model.phase_gradient(x0, t0)
}

/// `|v - grad S / m|`.
pub fn constraint_residual(state: &ParticleState, model: &WaveModel) -> Result<f64> {
    let u = model.phase_gradient(&state.x, state.t)?;
    Ok(norm(&sub(&state.v, &u)))
}

struct QpdSystem<'a> {
    model: &'a WaveModel,
    pot: &'a ClassicalPotential,
    dim: usize,
}

impl<const N: usize> OdeSystem<N> for QpdSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        let mut x = ZERO;
        x[..self.dim].copy_from_slice(&y[..self.dim]);
        let f = total_force(self.model, self.pot, &x, t)?;
        let m = self.model.units().mass;
        let mut out = [0.0; N];
        for d in 0..self.dim {
            out[d] = y[self.dim + d];
            out[self.dim + d] = f[d] / m;
        }
        Ok(out)
    }
}

struct GuidanceSystem<'a> {
    model: &'a WaveModel,
}

impl<const N: usize> OdeSystem<N> for GuidanceSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        let mut x = ZERO;
        x[..N].copy_from_slice(y);
        let u = self.model.phase_gradient(&x, t)?;
        Ok(std::array::from_fn(|d| u[d]))
    }
}

/// Maps solver state to position and velocity.
trait Unpack<const N: usize> {
    fn unpack(&self, t: f64, y: &[f64; N]) -> (Vec3, Vec3);
}

struct QpdUnpack(usize);

impl<const N: usize> Unpack<N> for QpdUnpack {
    fn unpack(&self, _t: f64, y: &[f64; N]) -> (Vec3, Vec3) {
        let mut x = ZERO;
        let mut v = ZERO;
        x[..self.0].copy_from_slice(&y[..self.0]);
        v[..self.0].copy_from_slice(&y[self.0..2 * self.0]);
        (x, v)
    }
}

struct GuidanceUnpack<'a>(&'a WaveModel);

impl<const N: usize> Unpack<N> for GuidanceUnpack<'_> {
    fn unpack(&self, t: f64, y: &[f64; N]) -> (Vec3, Vec3) {
        let mut x = ZERO;
        x[..N].copy_from_slice(y);
        let v = self.0.phase_gradient(&x, t).unwrap_or([f64::NAN; 3]);
        (x, v)
    }
}

struct Driver<'a> {
    model: &'a WaveModel,
    pot: &'a ClassicalPotential,
    settings: &'a IntegratorSettings,
    dynamics: Dynamics,
}

impl Driver<'_> {
    fn sample(&self, t: f64, x: Vec3, v: Vec3) -> Sample {
        let state = ParticleState { x, v, t };
        let (q, etilde) = match particle_energy(&state, self.model, self.pot) {
            Ok(e) => (e.q, e.etilde),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let residual = match self.dynamics {
            Dynamics::PilotWave => 0.0,
            Dynamics::Qpd => constraint_residual(&state, self.model).unwrap_or(f64::NAN),
        };
        Sample {
            t,
            x,
            v,
            q,
            etilde,
            residual,
        }
    }

    /// Signed distance past the escape sphere, in packet-scale units.
    fn escape_gap(&self, t: f64, x: &Vec3) -> f64 {
        norm(x) / self.model.packet_scale(t) - self.settings.escape_radius
    }

    fn outward(&self, t: f64, x: &Vec3, v: &Vec3) -> bool {
        let s = self.model.packet_scale(t);
        dot(x, v) - dot(x, x) * self.model.packet_scale_rate(t) / s > 0.0
    }

    fn center_gap(&self, t: f64, x: &Vec3) -> Option<f64> {
        let c = self.settings.center_radius?;
        (self.model.dimension() == 3).then(|| norm(x) - c * self.model.packet_scale(t))
    }

    fn run<const N: usize, S: OdeSystem<N>, U: Unpack<N>>(
        &self,
        sys: &S,
        unpack: &U,
        t0: f64,
        y0: [f64; N],
    ) -> Result<TrajectoryRecord> {
        let st = self.settings;
        st.validate(t0)?;
        let mut stepper = Stepper::new(sys, t0, y0, st.step_control())?;
        let (x0, v0) = unpack.unpack(t0, &y0);
        let mut samples = Vec::new();
        let mut events = Vec::new();
        let mut next_sample = st.sample_times.iter().copied().peekable();
        let every_step = st.sample_times.is_empty();
        if every_step || next_sample.peek() == Some(&t0) {
            samples.push(self.sample(t0, x0, v0));
            if !every_step {
                next_sample.next();
            }
        }
        let mut escaped = self.escape_gap(t0, &x0) > 0.0 && self.outward(t0, &x0, &v0);
        if escaped {
            events.push(Event::Escaped { t: t0, x: x0 });
            if st.stop_on_escape {
                return Ok(TrajectoryRecord {
                    dynamics: self.dynamics,
                    samples,
                    events,
                });
            }
        }

        loop {
            if stepper.t() >= st.t_end {
                events.push(Event::Completed { t: stepper.t() });
                break;
            }
            let dense = match stepper.step(sys, st.t_end) {
                Ok(d) => d,
                Err(e) => {
                    let (x, _) = unpack.unpack(stepper.t(), stepper.y());
                    let near_node = matches!(e, Error::Node { .. })
                        || self.model.node_factor(&x, stepper.t()) < STEP_FAILURE_NODE_FACTOR;
                    if near_node {
                        events.push(Event::NodeProximity { t: stepper.t(), x });
                        break;
                    }
                    return Err(e);
                }
            };
            let t1 = dense.t1();

            // earliest terminating event inside this step
            let mut stop: Option<(f64, Event)> = None;
            let position = |t: f64, y: &[f64; N]| unpack.unpack(t, y).0;
            let y0s = dense.eval(dense.t0);
            let (xa, xb) = (position(dense.t0, &y0s), position(t1, stepper.y()));
            if let (Some(g0), Some(g1)) = (self.center_gap(dense.t0, &xa), self.center_gap(t1, &xb))
            {
                if g0 > 0.0 && g1 <= 0.0 {
                    let tc = bisect(&dense, |t, y| {
                        self.center_gap(t, &position(t, y)).unwrap_or(1.0)
                    });
                    let x = position(tc, &dense.eval(tc));
                    stop = Some((tc, Event::CenterReached { t: tc, x }));
                }
            }
            let (ra, rb) = (
                self.model.amplitude(&xa, dense.t0),
                self.model.amplitude(&xb, t1),
            );
            if ra.signum() != rb.signum() {
                // a real amplitude changed sign: the step crossed a node
                let tn = bisect(&dense, |t, y| {
                    self.model.amplitude(&position(t, y), t) * ra.signum()
                });
                if stop.as_ref().is_none_or(|(ts, _)| tn < *ts) {
                    let x = position(tn, &dense.eval(tn));
                    stop = Some((tn, Event::NodeProximity { t: tn, x }));
                }
            }
            if !escaped {
                let (x1, v1) = unpack.unpack(t1, stepper.y());
                if self.escape_gap(t1, &x1) > 0.0 && self.outward(t1, &x1, &v1) {
                    let te = if self.escape_gap(dense.t0, &xa) > 0.0 {
                        t1
                    } else {
                        bisect(&dense, |t, y| {
                            if self.escape_gap(t, &position(t, y)) > 0.0 {
                                -1.0
                            } else {
                                1.0
                            }
                        })
                    };
                    if stop.as_ref().is_none_or(|(ts, _)| te < *ts) {
                        let x = position(te, &dense.eval(te));
                        escaped = true;
                        events.push(Event::Escaped { t: te, x });
                        if st.stop_on_escape {
                            stop = Some((te, Event::Escaped { t: te, x }));
                        }
                    }
                }
            }
            if let Some((ts, ev)) = stop {
                self.emit_samples(
                    &dense,
                    unpack,
                    &mut next_sample,
                    every_step,
                    ts,
                    &mut samples,
                );
                if samples.last().is_none_or(|s| s.t < ts) {
                    let (x, v) = unpack.unpack(ts, &dense.eval(ts));
                    samples.push(self.sample(ts, x, v));
                }
                if !matches!(ev, Event::Escaped { .. }) {
                    events.push(ev);
                }
                break;
            }

            self.emit_samples(
                &dense,
                unpack,
                &mut next_sample,
                every_step,
                t1,
                &mut samples,
            );

            let (x1, _) = unpack.unpack(t1, stepper.y());
            if self.model.node_factor(&x1, t1) < st.node_threshold {
                events.push(Event::NodeProximity { t: t1, x: x1 });
                break;
            }
        }
        Ok(TrajectoryRecord {
            dynamics: self.dynamics,
            samples,
            events,
        })
    }

    fn emit_samples<const N: usize, U: Unpack<N>>(
        &self,
        dense: &DenseStep<N>,
        unpack: &U,
        next: &mut std::iter::Peekable<impl Iterator<Item = f64>>,
        every_step: bool,
        until: f64,
        out: &mut Vec<Sample>,
    ) {
        if every_step {
            if until > dense.t0 {
                let (x, v) = unpack.unpack(until, &dense.eval(until));
                out.push(self.sample(until, x, v));
            }
            return;
        }
        while let Some(&ts) = next.peek() {
            if ts > until {
                break;
            }
            let (x, v) = unpack.unpack(ts, &dense.eval(ts));
            out.push(self.sample(ts, x, v));
            next.next();
        }
    }
}

/// Root of `g` on the dense step, given `g(t0) > 0` and `g(t1) <= 0`;
/// returns a time at or just after the crossing.
fn bisect<const N: usize>(dense: &DenseStep<N>, g: impl Fn(f64, &[f64; N]) -> f64) -> f64 {
    let (mut a, mut b) = (dense.t0, dense.t1());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m, &dense.eval(m));
        if gm > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    b
}

fn check_start(model: &WaveModel, pot: &ClassicalPotential, x: &Vec3, t: f64) -> Result<()> {
    pot.check_pairing(model)?;
    if x.iter().any(|c| !c.is_finite()) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite initial data x = {x:?}, t = {t}"
        )));
    }
    if model.dimension() == 1 && (x[1] != 0.0 || x[2] != 0.0) {
        return Err(Error::Domain(
            "one-dimensional model needs y = z = 0".into(),
        ));
    }
    if model.is_node(x, t) {
        return Err(Error::Node { x: *x, t });
    }
    Ok(())
}

/// Integrates `m x'' = -grad(V + Q)` from `init`.
pub fn integrate_qpd(
    model: &WaveModel,
    pot: &ClassicalPotential,
    init: &ParticleState,
    settings: &IntegratorSettings,
) -> Result<TrajectoryRecord> {
    check_start(model, pot, &init.x, init.t)?;
    quantum_potential(model, &init.x, init.t)?;
    let driver = Driver {
        model,
        pot,
        settings,
        dynamics: Dynamics::Qpd,
    };
    let sys = QpdSystem {
        model,
        pot,
        dim: model.dimension(),
    };
    let (x, v) = (init.x, init.v);
    if model.dimension() == 1 {
        driver.run(&sys, &QpdUnpack(1), init.t, [x[0], v[0]])
    } else {
        driver.run(
            &sys,
            &QpdUnpack(3),
            init.t,
            [x[0], x[1], x[2], v[0], v[1], v[2]],
        )
    }
}

/// Integrates `x' = grad S / m` from `x0`.
pub fn integrate_dbb(
    model: &WaveModel,
    pot: &ClassicalPotential,
    x0: &Vec3,
    t0: f64,
    settings: &IntegratorSettings,
) -> Result<TrajectoryRecord> {
    check_start(model, pot, x0, t0)?;
    let driver = Driver {
        model,
        pot,
        settings,
        dynamics: Dynamics::PilotWave,
    };
    let sys = GuidanceSystem { model };
    let un = GuidanceUnpack(model);
    if model.dimension() == 1 {
        driver.run(&sys, &un, t0, [x0[0]])
    } else {
        driver.run(&sys, &un, t0, *x0)
    }
}

/// First sample with `|x| > escape_radius` moving outward.
pub fn detect_escape(record: &TrajectoryRecord, escape_radius: f64) -> Option<Event> {
    record
        .samples
        .iter()
        .find(|s| norm(&s.x) > escape_radius && dot(&s.x, &s.v) > 0.0)
        .map(|s| Event::Escaped { t: s.t, x: s.x })
}

/// As [`detect_escape`], with the radius in units of the model's packet scale.
pub fn detect_escape_scaled(
    record: &TrajectoryRecord,
    escape_radius: f64,
    model: &WaveModel,
) -> Option<Event> {
    record
        .samples
        .iter()
        .find(|s| {
            let sc = model.packet_scale(s.t);
            norm(&s.x) / sc > escape_radius
                && dot(&s.x, &s.v) - dot(&s.x, &s.x) * model.packet_scale_rate(s.t) / sc > 0.0
        })
        .map(|s| Event::Escaped { t: s.t, x: s.x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::from_spherical;
    use crate::wavemodels::{ModelKind, RadialKind};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn model(kind: ModelKind) -> WaveModel {
        WaveModel::new(kind).unwrap()
    }

    fn state1(x: f64, v: f64) -> ParticleState {
        ParticleState {
            x: [x, 0.0, 0.0],
            v: [v, 0.0, 0.0],
            t: 0.0,
        }
    }

    fn pure_m1() -> WaveModel {
        model(ModelKind::CentralSuperposition {
            l: 1,
            coefficients: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
            radial: RadialKind::HydrogenLike {
                n: 2,
                l: 1,
                a0: 1.0,
            },
            hbar: 1.0,
            mass: 1.0,
        })
    }

    #[test]
    fn free_packet_spreads_with_its_width() {
        let m = model(ModelKind::FreeGaussian1D);
        let s = IntegratorSettings {
            t_end: 1.0,
            sample_times: vec![0.0, 0.5, 1.0],
            ..Default::default()
        };
        let rec = integrate_qpd(&m, &ClassicalPotential::Free, &state1(1.0, 0.0), &s).unwrap();
        assert_eq!(rec.samples.len(), 3);
        assert!((rec.last().x[0] - 2f64.sqrt()).abs() < 1e-6);
        assert!(matches!(rec.terminal_event(), Event::Completed { .. }));
        let d = integrate_dbb(&m, &ClassicalPotential::Free, &[1.0, 0.0, 0.0], 0.0, &s).unwrap();
        assert!((d.last().x[0] - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn coherent_trajectories() {
        let m = model(ModelKind::CoherentState1D { a: 1.0 });
        let pot = ClassicalPotential::paired_with(&m);
        let s = IntegratorSettings {
            t_end: 2.0 * PI,
            ..Default::default()
        };
        let rec = integrate_qpd(&m, &pot, &state1(0.5, 0.0), &s).unwrap();
        for smp in &rec.samples {
            assert!((smp.x[0] - (smp.t.cos() - 0.5)).abs() < 1e-7);
        }
        let s = IntegratorSettings {
            t_end: 4.0 * PI,
            stop_on_escape: false,
            escape_radius: 5.0,
            ..Default::default()
        };
        let rec = integrate_qpd(&m, &pot, &state1(0.0, 0.25), &s).unwrap();
        assert!((rec.last().x[0] - PI).abs() < 1e-6);
        assert!(rec.escaped().is_none());
    }

    #[test]
    fn escape_event_located_on_dense_output() {
        let m = model(ModelKind::CoherentState1D { a: 1.0 });
        let pot = ClassicalPotential::paired_with(&m);
        let s = IntegratorSettings {
            t_end: 60.0,
            escape_radius: 5.0,
            ..Default::default()
        };
        let rec = integrate_qpd(&m, &pot, &state1(0.0, 0.25), &s).unwrap();
        let Some(Event::Escaped { t, x }) = rec.escaped().copied() else {
            panic!("{:?}", rec.events)
        };
        assert!((x[0] - 5.0).abs() < 1e-6);
        assert!((0.25 * t + t.cos() - 1.0 - 5.0).abs() < 1e-6);
        assert_eq!(rec.last().t, t);
        assert!(detect_escape(&rec, 5.0).is_some());
        assert!(detect_escape(&rec, 50.0).is_none());
    }

    #[test]
    fn dbb_rest_and_circular_motion() {
        let h = model(ModelKind::HarmonicEigenstate1D { n: 0 });
        let pot = ClassicalPotential::paired_with(&h);
        let rec = integrate_dbb(
            &h,
            &pot,
            &[0.7, 0.0, 0.0],
            0.0,
            &IntegratorSettings::default(),
        )
        .unwrap();
        assert!(rec.samples.iter().all(|s| s.x[0] == 0.7));

        let m = pure_m1();
        let pot = ClassicalPotential::paired_with(&m);
        let x0 = from_spherical(1.0, PI / 2.0, 0.0);
        assert!((dbb_initial_velocity(&m, &x0, 0.0).unwrap()[1] - 1.0).abs() < 1e-14);
        let rec = integrate_dbb(&m, &pot, &x0, 0.0, &IntegratorSettings::default()).unwrap();
        for s in &rec.samples {
            let d = spherical_diagnostics(&s.x, &s.v);
            assert!((d.r - 1.0).abs() < 1e-8 && (d.theta - PI / 2.0).abs() < 1e-8);
        }
        let last = rec.last();
        let phi = to_spherical(&last.x).2;
        assert!((phi.cos() - 10f64.cos()).abs() < 1e-7 && (phi.sin() - 10f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn residual_examples() {
        let coh = model(ModelKind::CoherentState1D { a: 1.0 });
        assert!((constraint_residual(&state1(0.0, 0.25), &coh).unwrap() - 0.25).abs() < 1e-15);
        let free = model(ModelKind::FreeGaussian1D);
        assert!((constraint_residual(&state1(0.0, 1.0), &free).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            dbb_initial_velocity(&free, &[1.3, 0.0, 0.0], 0.0).unwrap(),
            ZERO
        );
    }

    #[test]
    fn starting_on_a_node_is_an_error() {
        let h = model(ModelKind::HarmonicEigenstate1D { n: 1 });
        let pot = ClassicalPotential::paired_with(&h);
        let r = integrate_qpd(&h, &pot, &state1(0.0, 0.0), &IntegratorSettings::default());
        assert!(matches!(r, Err(Error::Node { .. })));
    }

    #[test]
    fn running_into_a_node_stops_with_an_event() {
        // n = 1 eigenstate: V + Q = E away from the node, so the particle moves freely onto it
        let h = model(ModelKind::HarmonicEigenstate1D { n: 1 });
        let pot = ClassicalPotential::paired_with(&h);
        let rec =
            integrate_qpd(&h, &pot, &state1(-1.0, 1.0), &IntegratorSettings::default()).unwrap();
        let Event::NodeProximity { t, x } = *rec.terminal_event() else {
            panic!("{:?}", rec.events)
        };
        assert!(x[0].abs() < 1e-5 && (t - 1.0).abs() < 1e-5, "{t} {x:?}");
    }

    #[test]
    fn rejects_mismatched_potential() {
        let m = model(ModelKind::CoherentState1D { a: 1.0 });
        let r = integrate_qpd(
            &m,
            &ClassicalPotential::Free,
            &state1(0.0, 0.0),
            &IntegratorSettings::default(),
        );
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let m = model(ModelKind::FreeGaussian1D);
        let s = IntegratorSettings {
            t_end: 1.0,
            sample_times: vec![0.0, 1.0],
            ..Default::default()
        };
        let rec = integrate_qpd(&m, &ClassicalPotential::Free, &state1(1.0, 0.0), &s).unwrap();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,x,y,z,vx,vy,vz,Q,Etilde,residual");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,1,0,0,0,0,0,"));
    }
}
