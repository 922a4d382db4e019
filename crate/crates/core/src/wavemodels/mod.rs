//! Closed-form wave functions.
//!
//! Every model reports its amplitude `R`, phase `S` (an action, so that
//! `psi = R exp(i S / hbar)`), the gradients of both and the Laplacian of `R`,
//! all in closed form. Real eigenfunctions carry a signed amplitude so that
//! `lap R / R` stays smooth where `R` changes sign.
//!
//! Unit conventions are fixed per model:
//!
//! | model | hbar | mass | other |
//! |-------|------|------|-------|
//! | free Gaussian | 1 | 1/2 | packet width 1 |
//! | potential step | 1 | 1/2 | |
//! | harmonic eigenstate, coherent state | 1 | 1 | omega = 1 |
//! | central superposition | configurable | configurable | |

mod hermite;
mod radial;
mod spherical;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Vec3, ZERO};

pub use hermite::{hermite, hermite_majorant, hermite_with_derivatives};
pub use radial::{RadialKind, RadialProfile};
pub use spherical::{
    spherical_harmonic, AngularJet, AngularSuperposition, CMat3, CVec3, LegendreTable,
};

/// Relative size below which the vanishing factor of an amplitude counts as a node.
pub const NODE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConvention {
    pub hbar: f64,
    pub mass: f64,
    pub omega: Option<f64>,
    /// Initial packet width, for spreading packets.
    pub sigma: Option<f64>,
}

impl UnitConvention {
    /// `hbar^2 / 2m`, the prefactor of the quantum potential.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

/// Parameters selecting a catalog wave function.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    FreeGaussian1D,
    CoherentState1D {
        a: f64,
    },
    HarmonicEigenstate1D {
        n: u32,
    },
    StepEigenstate1D {
        energy: f64,
        height: f64,
    },
    /// `R(r) sum_m c_m Y_lm exp(-i E t / hbar)` with coefficients indexed `m = -l..=l`.
    CentralSuperposition {
        l: u32,
        coefficients: Vec<Complex64>,
        radial: RadialKind,
        hbar: f64,
        mass: f64,
    },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::FreeGaussian1D => "free_gaussian",
            ModelKind::CoherentState1D { .. } => "coherent",
            ModelKind::HarmonicEigenstate1D { .. } => "harmonic",
            ModelKind::StepEigenstate1D { .. } => "step",
            ModelKind::CentralSuperposition { .. } => "central",
        }
    }
}

/// Closed-form field quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: Vec3,
    pub t: f64,
    /// Signed for real eigenfunctions, `|psi|` otherwise.
    pub amplitude: f64,
    /// Action units; modulo `2 pi hbar` for central superpositions.
    pub phase: f64,
    pub grad_phase: Vec3,
    pub grad_amplitude: Vec3,
    pub lap_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    Free,
    Coherent {
        a: f64,
    },
    Harmonic {
        n: u32,
        norm: f64,
    },
    Step {
        k: f64,
        kappa: f64,
        alpha: f64,
        energy: f64,
    },
    Central(Box<CentralData>),
}

#[derive(Debug, Clone, PartialEq)]
struct CentralData {
    angular: AngularSuperposition,
    radial: RadialProfile,
    energy: f64,
}

/// Local quantities of a central superposition at one point.
struct CentralLocal {
    r: f64,
    n: Vec3,
    amp: f64,
    arg: f64,
    grad_sigma: Vec3,
    grad_log_mod: Vec3,
    lap_ratio: f64,
    radial_l1: f64,
    radial_l2: f64,
    radial_l3: f64,
    jet: AngularJet,
    a2: f64,
}

/// An analytic wave function with its unit convention. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveModel {
    kind: ModelKind,
    units: UnitConvention,
    inner: Inner,
}

impl WaveModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let (units, inner) = match &kind {
            ModelKind::FreeGaussian1D => (
                UnitConvention {
                    hbar: 1.0,
                    mass: 0.5,
                    omega: None,
                    sigma: Some(1.0),
                },
                Inner::Free,
            ),
            ModelKind::CoherentState1D { a } => {
                if !a.is_finite() {
                    return Err(Error::InvalidModel(format!("coherent amplitude a = {a}")));
                }
                (oscillator_units(), Inner::Coherent { a: *a })
            }
            ModelKind::HarmonicEigenstate1D { n } => {
                let mut norm = PI.powf(-0.25);
                for k in 1..=*n {
                    norm /= (2.0 * k as f64).sqrt();
                }
                (oscillator_units(), Inner::Harmonic { n: *n, norm })
            }
            ModelKind::StepEigenstate1D { energy, height } => {
                if !(energy.is_finite() && height.is_finite() && *energy > 0.0 && energy < height) {
                    return Err(Error::InvalidModel(format!(
                        "E < V required (and E > 0), got E = {energy}, V = {height}"
                    )));
                }
                let k = energy.sqrt();
                let kappa = (height - energy).sqrt();
                (
                    UnitConvention {
                        hbar: 1.0,
                        mass: 0.5,
                        omega: None,
                        sigma: None,
                    },
                    Inner::Step {
                        k,
                        kappa,
                        alpha: 2.0 * (-kappa / k).atan(),
                        energy: *energy,
                    },
                )
            }
            ModelKind::CentralSuperposition {
                l,
                coefficients,
                radial,
                hbar,
                mass,
            } => {
                if !(*hbar > 0.0 && hbar.is_finite() && *mass > 0.0 && mass.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "hbar and mass must be positive, got {hbar}, {mass}"
                    )));
                }
                let radial_l = match radial {
                    RadialKind::HydrogenLike { l, .. } | RadialKind::Oscillator { l, .. } => *l,
                };
                if radial_l != *l {
                    return Err(Error::InvalidModel(format!(
                        "radial profile has l = {radial_l} but the superposition has l = {l}"
                    )));
                }
                let angular = AngularSuperposition::new(*l, coefficients)?;
                let radial = RadialProfile::new(*radial, *hbar, *mass)?;
                let energy = radial.energy(*hbar, *mass);
                let omega = match radial.kind() {
                    RadialKind::Oscillator { omega, .. } => Some(omega),
                    _ => None,
                };
                (
                    UnitConvention {
                        hbar: *hbar,
                        mass: *mass,
                        omega,
                        sigma: None,
                    },
                    Inner::Central(Box::new(CentralData {
                        angular,
                        radial,
                        energy,
                    })),
                )
            }
        };
        Ok(Self { kind, units, inner })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn units(&self) -> &UnitConvention {
        &self.units
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dimension(&self) -> usize {
        match self.inner {
            Inner::Central(_) => 3,
            _ => 1,
        }
    }

    /// Energy `E` of an energy eigenstate; `None` for time-dependent packets.
    pub fn energy(&self) -> Option<f64> {
        match &self.inner {
            Inner::Free | Inner::Coherent { .. } => None,
            Inner::Harmonic { n, .. } => Some(*n as f64 + 0.5),
            Inner::Step { energy, .. } => Some(*energy),
            Inner::Central(c) => Some(c.energy),
        }
    }

    pub fn is_normalizable(&self) -> bool {
        !matches!(self.inner, Inner::Step { .. })
    }

    /// Normalized angular superposition of a central model.
    pub fn angular(&self) -> Option<&AngularSuperposition> {
        match &self.inner {
            Inner::Central(c) => Some(&c.angular),
            _ => None,
        }
    }

    pub fn radial(&self) -> Option<&RadialProfile> {
        match &self.inner {
            Inner::Central(c) => Some(&c.radial),
            _ => None,
        }
    }

    /// Length scale of the bulk of `|psi|^2` at time `t`; escape radii are measured in it.
    pub fn packet_scale(&self, t: f64) -> f64 {
        match &self.inner {
            Inner::Free => (1.0 + t * t).sqrt(),
            Inner::Central(c) => c.radial.length_scale(),
            _ => 1.0,
        }
    }

    /// Time derivative of [`packet_scale`](Self::packet_scale).
    pub fn packet_scale_rate(&self, t: f64) -> f64 {
        match &self.inner {
            Inner::Free => t / (1.0 + t * t).sqrt(),
            _ => 0.0,
        }
    }

    /// Signed amplitude in any float type; used by the extended-precision
    /// finite-difference oracle. Time enters only through `f64` constants.
    pub fn amplitude_generic<T: Float>(&self, x: &[T; 3], t: f64) -> T {
        let c = |v: f64| T::from(v).unwrap();
        match &self.inner {
            Inner::Free => {
                let s = 1.0 + t * t;
                c((2.0 * PI * s).powf(-0.25)) * (-(x[0] * x[0]) / c(4.0 * s)).exp()
            }
            Inner::Coherent { a } => {
                let d = x[0] - c(a * t.cos());
                c(PI.powf(-0.25)) * (-(d * d) / c(2.0)).exp()
            }
            Inner::Harmonic { n, norm } => {
                c(*norm) * hermite(*n, x[0]) * (-(x[0] * x[0]) / c(2.0)).exp()
            }
            Inner::Step {
                k, kappa, alpha, ..
            } => {
                if x[0] < T::zero() {
                    (c(*k) * x[0] - c(alpha / 2.0)).cos()
                } else {
                    c((alpha / 2.0).cos()) * (-c(*kappa) * x[0]).exp()
                }
            }
            Inner::Central(cd) => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                cd.radial.value(r) * cd.angular.value_at(x).norm()
            }
        }
    }

    pub fn amplitude(&self, x: &Vec3, t: f64) -> f64 {
        self.amplitude_generic(x, t)
    }

    /// The complex wave function `psi(x, t)`.
    pub fn psi(&self, x: &Vec3, t: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        match &self.inner {
            Inner::Free => {
                let z = Complex64::new(1.0, t);
                (2.0 * PI).powf(-0.25) * z.powf(-0.5) * (-(x[0] * x[0]) / (4.0 * z)).exp()
            }
            Inner::Coherent { a } => {
                let d = x[0] - a * t.cos();
                let phase = t / 2.0 + x[0] * a * t.sin() - a * a * (2.0 * t).sin() / 4.0;
                PI.powf(-0.25) * (-d * d / 2.0 - i * phase).exp()
            }
            Inner::Central(cd) => {
                let r = norm(x);
                cd.radial.value(r)
                    * cd.angular.value_at(x)
                    * (-i * cd.energy * t / self.units.hbar).exp()
            }
            Inner::Harmonic { .. } | Inner::Step { .. } => {
                let e = self.energy().unwrap_or(0.0);
                self.amplitude(x, t) * (-i * e * t / self.units.hbar).exp()
            }
        }
    }

    /// Relative size of the factor of `R` that can vanish, in `[0, 1]`.
    /// Gaussian envelopes are excluded, so far tails of a packet are not nodes.
    pub fn node_factor(&self, x: &Vec3, t: f64) -> f64 {
        let _ = t;
        match &self.inner {
            Inner::Free | Inner::Coherent { .. } => 1.0,
            Inner::Harmonic { n, .. } => {
                let h: f64 = hermite(*n, x[0]);
                if h == 0.0 {
                    0.0
                } else {
                    h.abs() / hermite_majorant(*n, x[0])
                }
            }
            Inner::Step { k, alpha, .. } => {
                if x[0] < 0.0 {
                    (k * x[0] - alpha / 2.0).cos().abs()
                } else {
                    1.0
                }
            }
            Inner::Central(cd) => {
                let r = norm(x);
                if r == 0.0 {
                    return 0.0;
                }
                let ang = cd.angular.value_at(x).norm() / cd.angular.max_modulus();
                ang.min((r / cd.radial.length_scale()).min(1.0))
            }
        }
    }

    pub fn is_node(&self, x: &Vec3, t: f64) -> bool {
        self.node_factor(x, t) < NODE_THRESHOLD
    }

    fn node_guard(&self, x: &Vec3, t: f64) -> Result<()> {
        if self.is_node(x, t) {
            Err(Error::Node { x: *x, t })
        } else {
            Ok(())
        }
    }

    fn central_local(&self, cd: &CentralData, x: &Vec3, t: f64) -> Result<CentralLocal> {
        self.node_guard(x, t)?;
        let r = norm(x);
        let n = [x[0] / r, x[1] / r, x[2] / r];
        let jet = cd.angular.jet(x);
        let a = jet.value;
        let a2 = a.norm_sqr();
        let mut grad_sigma = ZERO;
        let mut grad_log_mod = ZERO;
        for d in 0..3 {
            let p = a.conj() * jet.grad[d];
            grad_sigma[d] = p.im / a2;
            grad_log_mod[d] = p.re / a2;
        }
        let (l1, l2, l3) = cd.radial.log_derivatives(r);
        let radial_part = l2 + 2.0 * l1 / r;
        let trace = jet.hess[0][0] + jet.hess[1][1] + jet.hess[2][2];
        let angular_part = (a.conj() * trace).re / a2 + dot(&grad_sigma, &grad_sigma);
        Ok(CentralLocal {
            r,
            n,
            amp: cd.radial.value(r) * a2.sqrt(),
            arg: a.arg(),
            grad_sigma,
            grad_log_mod,
            lap_ratio: radial_part + angular_part,
            radial_l1: l1,
            radial_l2: l2,
            radial_l3: l3,
            jet,
            a2,
        })
    }

    /// Closed-form `R`, `S`, `grad S`, `grad R` and `lap R` at `(x, t)`.
    pub fn evaluate(&self, x: &Vec3, t: f64) -> Result<FieldSample> {
        let mut out = FieldSample {
            x: *x,
            t,
            amplitude: 0.0,
            phase: 0.0,
            grad_phase: ZERO,
            grad_amplitude: ZERO,
            lap_amplitude: 0.0,
        };
        let hbar = self.units.hbar;
        match &self.inner {
            Inner::Free => {
                let s = 1.0 + t * t;
                let r = self.amplitude(x, t);
                out.amplitude = r;
                out.phase = hbar * (x[0] * x[0] * t / (4.0 * s) - 0.5 * t.atan());
                out.grad_phase[0] = hbar * x[0] * t / (2.0 * s);
                out.grad_amplitude[0] = -r * x[0] / (2.0 * s);
                out.lap_amplitude = r * (x[0] * x[0] / (4.0 * s * s) - 1.0 / (2.0 * s));
            }
            Inner::Coherent { a } => {
                let r = self.amplitude(x, t);
                let d = x[0] - a * t.cos();
                out.amplitude = r;
                out.phase = -hbar * (t / 2.0 + x[0] * a * t.sin() - a * a * (2.0 * t).sin() / 4.0);
                out.grad_phase[0] = -hbar * a * t.sin();
                out.grad_amplitude[0] = -d * r;
                out.lap_amplitude = (d * d - 1.0) * r;
            }
            Inner::Harmonic { n, norm } => {
                let [h0, h1, h2, _] = hermite_with_derivatives(*n, x[0]);
                let g = norm * (-x[0] * x[0] / 2.0).exp();
                out.amplitude = g * h0;
                out.phase = -(*n as f64 + 0.5) * t;
                out.grad_amplitude[0] = g * (h1 - x[0] * h0);
                out.lap_amplitude = g * (h2 - 2.0 * x[0] * h1 + (x[0] * x[0] - 1.0) * h0);
            }
            Inner::Step {
                k,
                kappa,
                alpha,
                energy,
            } => {
                out.phase = -energy * t;
                if x[0] < 0.0 {
                    let arg = k * x[0] - alpha / 2.0;
                    out.amplitude = arg.cos();
                    out.grad_amplitude[0] = -k * arg.sin();
                    out.lap_amplitude = -k * k * arg.cos();
                } else {
                    let r = (alpha / 2.0).cos() * (-kappa * x[0]).exp();
                    out.amplitude = r;
                    out.grad_amplitude[0] = -kappa * r;
                    out.lap_amplitude = kappa * kappa * r;
                }
            }
            Inner::Central(cd) => {
                let loc = self.central_local(cd, x, t)?;
                out.amplitude = loc.amp;
                out.phase = (hbar * loc.arg - cd.energy * t).rem_euclid(2.0 * PI * hbar);
                for d in 0..3 {
                    out.grad_phase[d] = hbar * loc.grad_sigma[d];
                    out.grad_amplitude[d] =
                        loc.amp * (loc.radial_l1 * loc.n[d] + loc.grad_log_mod[d]);
                }
                out.lap_amplitude = loc.amp * loc.lap_ratio;
            }
        }
        Ok(out)
    }

    /// `grad S` at `(x, t)`.
    pub fn grad_phase(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        match &self.inner {
            Inner::Central(cd) => {
                self.node_guard(x, t)?;
                let jet_a = cd.angular.jet(x);
                let a = jet_a.value;
                let a2 = a.norm_sqr();
                let mut g = ZERO;
                for d in 0..3 {
                    g[d] = self.units.hbar * (a.conj() * jet_a.grad[d]).im / a2;
                }
                Ok(g)
            }
            _ => Ok(self.evaluate(x, t)?.grad_phase),
        }
    }

    /// Pilot-wave velocity field `grad S / m`.
    pub fn phase_gradient(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        let g = self.grad_phase(x, t)?;
        let m = self.units.mass;
        Ok([g[0] / m, g[1] / m, g[2] / m])
    }

    /// `lap R / R` in closed form. Errors at nodes.
    pub fn laplacian_ratio(&self, x: &Vec3, t: f64) -> Result<f64> {
        match &self.inner {
            Inner::Free => {
                let s = 1.0 + t * t;
                Ok(x[0] * x[0] / (4.0 * s * s) - 1.0 / (2.0 * s))
            }
            Inner::Coherent { a } => {
                let d = x[0] - a * t.cos();
                Ok(d * d - 1.0)
            }
            Inner::Harmonic { n, .. } => {
                self.node_guard(x, t)?;
                let [h0, h1, h2, _] = hermite_with_derivatives(*n, x[0]);
                Ok((h2 - 2.0 * x[0] * h1 + (x[0] * x[0] - 1.0) * h0) / h0)
            }
            Inner::Step { k, kappa, .. } => {
                self.node_guard(x, t)?;
                Ok(if x[0] < 0.0 { -k * k } else { kappa * kappa })
            }
            Inner::Central(cd) => Ok(self.central_local(cd, x, t)?.lap_ratio),
        }
    }

    /// Spatial gradient of `lap R / R` in closed form. Errors at nodes.
    pub fn laplacian_ratio_gradient(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        let mut g = ZERO;
        match &self.inner {
            Inner::Free => {
                let s = 1.0 + t * t;
                g[0] = x[0] / (2.0 * s * s);
            }
            Inner::Coherent { a } => {
                g[0] = 2.0 * (x[0] - a * t.cos());
            }
            Inner::Harmonic { n, .. } => {
                self.node_guard(x, t)?;
                let xx = x[0];
                let [h0, h1, h2, h3] = hermite_with_derivatives(*n, xx);
                let num = h2 - 2.0 * xx * h1 + (xx * xx - 1.0) * h0;
                let dnum = h3 - 2.0 * h1 - 2.0 * xx * h2 + 2.0 * xx * h0 + (xx * xx - 1.0) * h1;
                g[0] = (dnum * h0 - num * h1) / (h0 * h0);
            }
            Inner::Step { .. } => {
                self.node_guard(x, t)?;
            }
            Inner::Central(cd) => {
                let loc = self.central_local(cd, x, t)?;
                let r = loc.r;
                let (l1, l2, l3) = (loc.radial_l1, loc.radial_l2, loc.radial_l3);
                let radial_part = l2 + 2.0 * l1 / r;
                let dradial = l3 + 2.0 * l2 / r - 2.0 * l1 / (r * r) - radial_part * l1;
                let ll = cd.angular.l() as f64;
                // Re(A* lap A) / |A|^2 = -l(l+1) / r^2 for a solid harmonic
                let dangular = 2.0 * ll * (ll + 1.0) / (r * r * r);
                let gs = loc.grad_sigma;
                let a = loc.jet.value;
                for j in 0..3 {
                    // d_j |grad sigma|^2 = 2 sum_i gs_i d_j gs_i
                    let mut acc = 0.0;
                    for i in 0..3 {
                        let h = ((loc.jet.grad[j].conj() * loc.jet.grad[i]).im
                            + (a.conj() * loc.jet.hess[i][j]).im)
                            / loc.a2
                            - 2.0 * gs[i] * loc.grad_log_mod[j];
                        acc += gs[i] * h;
                    }
                    g[j] = (dradial + dangular) * loc.n[j] + 2.0 * acc;
                }
            }
        }
        Ok(g)
    }
}

fn oscillator_units() -> UnitConvention {
    UnitConvention {
        hbar: 1.0,
        mass: 1.0,
        omega: Some(1.0),
        sigma: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::from_spherical;

    fn free() -> WaveModel {
        WaveModel::new(ModelKind::FreeGaussian1D).unwrap()
    }

    fn pure_m(l: u32, m: i32, n: u32) -> WaveModel {
        let mut c = vec![Complex64::new(0.0, 0.0); (2 * l + 1) as usize];
        c[(m + l as i32) as usize] = Complex64::new(1.0, 0.0);
        WaveModel::new(ModelKind::CentralSuperposition {
            l,
            coefficients: c,
            radial: RadialKind::HydrogenLike { n, l, a0: 1.0 },
            hbar: 1.0,
            mass: 1.0,
        })
        .unwrap()
    }

    /// `hbar Im(psi* d psi) / |psi|^2` from central differences of the complex wave function.
    fn fd_grad_phase(m: &WaveModel, x: &Vec3, t: f64) -> Vec3 {
        let h = 1e-6;
        let psi = m.psi(x, t);
        let mut g = ZERO;
        for d in 0..m.dimension() {
            let mut xp = *x;
            let mut xm = *x;
            xp[d] += h;
            xm[d] -= h;
            let dpsi = (m.psi(&xp, t) - m.psi(&xm, t)) / (2.0 * h);
            g[d] = m.units().hbar * (psi.conj() * dpsi).im / psi.norm_sqr();
        }
        g
    }

    #[test]
    fn free_gaussian_at_origin() {
        let s = free().evaluate(&[0.0; 3], 0.0).unwrap();
        assert!((s.amplitude - (2.0 * PI).powf(-0.25)).abs() < 1e-15);
        assert_eq!(s.phase, 0.0);
        assert_eq!(s.grad_phase[0], 0.0);
        // independent complex evaluation
        let psi = free().psi(&[0.0; 3], 0.0);
        assert!((psi.re - (2.0 * PI).powf(-0.25)).abs() < 1e-15 && psi.im.abs() < 1e-15);
    }

    #[test]
    fn phase_gradients_of_real_states_vanish() {
        let step = WaveModel::new(ModelKind::StepEigenstate1D {
            energy: 0.25,
            height: 1.0,
        })
        .unwrap();
        for x in [-3.0, -0.5, 0.0, 2.0] {
            assert_eq!(step.phase_gradient(&[x, 0.0, 0.0], 1.7).unwrap()[0], 0.0);
        }
        let coh = WaveModel::new(ModelKind::CoherentState1D { a: 1.0 }).unwrap();
        for x in [-2.0, 0.0, 0.3, 5.0] {
            assert_eq!(
                coh.evaluate(&[x, 0.0, 0.0], 0.0).unwrap().grad_phase[0],
                0.0
            );
        }
        for n in 0..4 {
            let h = WaveModel::new(ModelKind::HarmonicEigenstate1D { n }).unwrap();
            assert_eq!(h.phase_gradient(&[0.37, 0.0, 0.0], 2.0).unwrap()[0], 0.0);
        }
        let m0 = pure_m(1, 0, 2);
        let v = m0
            .phase_gradient(&from_spherical(1.5, 0.7, 0.2), 0.0)
            .unwrap();
        assert!(norm(&v) < 1e-15);
    }

    #[test]
    fn central_m1_azimuthal_velocity() {
        let m = pure_m(1, 1, 2);
        let x = from_spherical(2.0, PI / 2.0, 0.0);
        let v = m.phase_gradient(&x, 0.0).unwrap();
        // phi_hat at phi = 0 is +y
        assert!((v[1] - 0.5).abs() < 1e-14);
        assert!(v[0].abs() < 1e-14 && v[2].abs() < 1e-14);
        let fd = fd_grad_phase(&m, &x, 0.0);
        assert!((fd[1] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn step_continuity_at_origin() {
        for e in [0.05, 0.25, 0.5, 0.9] {
            let m = WaveModel::new(ModelKind::StepEigenstate1D {
                energy: e,
                height: 1.0,
            })
            .unwrap();
            let left = m.evaluate(&[-1e-300, 0.0, 0.0], 0.0).unwrap();
            let right = m.evaluate(&[0.0; 3], 0.0).unwrap();
            assert!((left.amplitude - right.amplitude).abs() < 1e-12);
            assert!((left.grad_amplitude[0] - right.grad_amplitude[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn step_requires_energy_below_height() {
        let err = WaveModel::new(ModelKind::StepEigenstate1D {
            energy: 2.0,
            height: 1.0,
        })
        .unwrap_err();
        assert!(err.to_string().contains("E < V required"));
    }

    #[test]
    fn grad_phase_matches_complex_evaluation() {
        let coh = WaveModel::new(ModelKind::CoherentState1D { a: 1.3 }).unwrap();
        let c: Vec<Complex64> = vec![
            Complex64::new(0.4, 0.3),
            Complex64::new(-0.1, 0.6),
            Complex64::new(0.5, -0.2),
        ];
        let central = WaveModel::new(ModelKind::CentralSuperposition {
            l: 1,
            coefficients: c,
            radial: RadialKind::HydrogenLike {
                n: 2,
                l: 1,
                a0: 1.0,
            },
            hbar: 1.0,
            mass: 2.0,
        })
        .unwrap();
        for (m, pts) in [
            (free(), vec![[0.4, 0.0, 0.0], [-1.5, 0.0, 0.0]]),
            (coh, vec![[0.1, 0.0, 0.0], [1.9, 0.0, 0.0]]),
            (central, vec![[0.5, 1.0, -0.7], [-1.2, 0.3, 2.0]]),
        ] {
            for x in pts {
                for t in [0.0, 0.6, 2.1] {
                    let g = m.grad_phase(&x, t).unwrap();
                    let fd = fd_grad_phase(&m, &x, t);
                    for d in 0..3 {
                        assert!(
                            (g[d] - fd[d]).abs() <= 1e-7 * (1.0 + g[d].abs()),
                            "{} x={x:?} t={t}: {g:?} vs {fd:?}",
                            m.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn laplacian_matches_second_difference() {
        let models = vec![
            free(),
            WaveModel::new(ModelKind::CoherentState1D { a: 1.0 }).unwrap(),
            WaveModel::new(ModelKind::HarmonicEigenstate1D { n: 2 }).unwrap(),
            WaveModel::new(ModelKind::StepEigenstate1D {
                energy: 0.25,
                height: 1.0,
            })
            .unwrap(),
            pure_m(2, 1, 3),
        ];
        let h = 1e-4;
        for m in &models {
            for x in [[0.8, 0.3, -0.4], [-1.7, 0.9, 0.6], [2.3, -0.5, 1.1]] {
                let x = if m.dimension() == 1 {
                    [x[0], 0.0, 0.0]
                } else {
                    x
                };
                let t = 0.4;
                let s = m.evaluate(&x, t).unwrap();
                if s.amplitude.abs() < 1e-3 {
                    continue;
                }
                let mut fd = 0.0;
                for d in 0..m.dimension() {
                    let mut xp = x;
                    let mut xm = x;
                    xp[d] += h;
                    xm[d] -= h;
                    fd += (m.amplitude(&xp, t) - 2.0 * s.amplitude + m.amplitude(&xm, t)) / (h * h);
                }
                assert!(
                    (fd - s.lap_amplitude).abs() < 1e-5,
                    "{}: {fd} vs {}",
                    m.name(),
                    s.lap_amplitude
                );
                let ratio = m.laplacian_ratio(&x, t).unwrap();
                assert!((ratio * s.amplitude - s.lap_amplitude).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_density_is_normalized_and_centered() {
        let m = WaveModel::new(ModelKind::CoherentState1D { a: 1.0 }).unwrap();
        for t in [0.0, 0.8, 2.5] {
            let (lo, hi, n) = (-12.0, 12.0, 24000);
            let h = (hi - lo) / n as f64;
            let (mut mass, mut mean) = (0.0, 0.0);
            for i in 0..=n {
                let x = lo + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                let p = m.psi(&[x, 0.0, 0.0], t).norm_sqr();
                mass += w * p * h;
                mean += w * x * p * h;
            }
            assert!((mass - 1.0).abs() < 1e-8);
            assert!((mean - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn central_normalizes_coefficients() {
        let m = WaveModel::new(ModelKind::CentralSuperposition {
            l: 1,
            coefficients: vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 4.0),
                Complex64::new(0.0, 0.0),
            ],
            radial: RadialKind::HydrogenLike {
                n: 2,
                l: 1,
                a0: 1.0,
            },
            hbar: 1.0,
            mass: 1.0,
        })
        .unwrap();
        let s: f64 = m
            .angular()
            .unwrap()
            .coefficients()
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn central_node_on_axis_for_pure_m() {
        let m = pure_m(1, 1, 2);
        assert!(matches!(
            m.evaluate(&[0.0, 0.0, 1.0], 0.0),
            Err(Error::Node { .. })
        ));
    }
}
