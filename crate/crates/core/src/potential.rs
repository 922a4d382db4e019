//! Quantum potential, total force and particle energy.

use f128::f128;
use num_traits::{Float, ToPrimitive};

use crate::dynamics::ParticleState;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Vec3, ZERO};
use crate::wavemodels::{ModelKind, RadialKind, WaveModel, NODE_THRESHOLD};

/// Default finite-difference step for [`quantum_potential_fd`], in natural length units.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentralKind {
    /// `V = -strength / r`.
    Coulomb { strength: f64 },
    /// `V = stiffness r^2 / 2`.
    Harmonic3D { stiffness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalPotential {
    Free,
    /// `V = height` for `x >= 0`, zero otherwise.
    Step1D {
        height: f64,
    },
    /// `V = stiffness x^2 / 2`.
    Harmonic1D {
        stiffness: f64,
    },
    Central(CentralKind),
}

impl ClassicalPotential {
    /// The potential a catalog model is an exact solution for.
    pub fn paired_with(model: &WaveModel) -> Self {
        let u = model.units();
        match model.kind() {
            ModelKind::FreeGaussian1D => ClassicalPotential::Free,
            ModelKind::CoherentState1D { .. } | ModelKind::HarmonicEigenstate1D { .. } => {
                ClassicalPotential::Harmonic1D { stiffness: 1.0 }
            }
            ModelKind::StepEigenstate1D { height, .. } => {
                ClassicalPotential::Step1D { height: *height }
            }
            ModelKind::CentralSuperposition { radial, .. } => match radial {
                RadialKind::HydrogenLike { a0, .. } => {
                    ClassicalPotential::Central(CentralKind::Coulomb {
                        strength: u.hbar * u.hbar / (u.mass * a0),
                    })
                }
                RadialKind::Oscillator { omega, .. } => {
                    ClassicalPotential::Central(CentralKind::Harmonic3D {
                        stiffness: u.mass * omega * omega,
                    })
                }
            },
        }
    }

    /// Errors unless `self` is the potential `model` solves.
    pub fn check_pairing(&self, model: &WaveModel) -> Result<()> {
        let want = Self::paired_with(model);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let ok = match (self, &want) {
            (ClassicalPotential::Free, ClassicalPotential::Free) => true,
            (
                ClassicalPotential::Step1D { height: a },
                ClassicalPotential::Step1D { height: b },
            ) => close(*a, *b),
            (
                ClassicalPotential::Harmonic1D { stiffness: a },
                ClassicalPotential::Harmonic1D { stiffness: b },
            ) => close(*a, *b),
            (
                ClassicalPotential::Central(CentralKind::Coulomb { strength: a }),
                ClassicalPotential::Central(CentralKind::Coulomb { strength: b }),
            ) => close(*a, *b),
            (
                ClassicalPotential::Central(CentralKind::Harmonic3D { stiffness: a }),
                ClassicalPotential::Central(CentralKind::Harmonic3D { stiffness: b }),
            ) => close(*a, *b),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!(
                "potential {self:?} does not match model {} (expected {want:?})",
                model.name()
            )))
        }
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        match self {
            ClassicalPotential::Free => 0.0,
            ClassicalPotential::Step1D { height } => {
                if x[0] >= 0.0 {
                    *height
                } else {
                    0.0
                }
            }
            ClassicalPotential::Harmonic1D { stiffness } => 0.5 * stiffness * x[0] * x[0],
            ClassicalPotential::Central(CentralKind::Coulomb { strength }) => -strength / norm(x),
            ClassicalPotential::Central(CentralKind::Harmonic3D { stiffness }) => {
                0.5 * stiffness * dot(x, x)
            }
        }
    }

    /// `grad V`; the step's delta function at the origin is not represented.
    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        match self {
            ClassicalPotential::Free | ClassicalPotential::Step1D { .. } => ZERO,
            ClassicalPotential::Harmonic1D { stiffness } => [stiffness * x[0], 0.0, 0.0],
            ClassicalPotential::Central(CentralKind::Coulomb { strength }) => {
                let r = norm(x);
                let c = strength / (r * r * r);
                [c * x[0], c * x[1], c * x[2]]
            }
            ClassicalPotential::Central(CentralKind::Harmonic3D { stiffness }) => {
                [stiffness * x[0], stiffness * x[1], stiffness * x[2]]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleEnergy {
    /// `kinetic + v + q`.
    pub etilde: f64,
    pub kinetic: f64,
    /// Classical potential `V`.
    pub v: f64,
    pub q: f64,
}

/// `Q = -(hbar^2 / 2m) lap R / R`.
pub fn quantum_potential(model: &WaveModel, x: &Vec3, t: f64) -> Result<f64> {
    Ok(-model.units().kinetic_prefactor() * model.laplacian_ratio(x, t)?)
}

/// `grad Q` in closed form.
pub fn quantum_potential_gradient(model: &WaveModel, x: &Vec3, t: f64) -> Result<Vec3> {
    let k = -model.units().kinetic_prefactor();
    let g = model.laplacian_ratio_gradient(x, t)?;
    Ok([k * g[0], k * g[1], k * g[2]])
}

/// `dQ/dt` at fixed position; zero for energy eigenstates.
pub fn quantum_potential_rate(model: &WaveModel, x: &Vec3, t: f64) -> Result<f64> {
    match model.kind() {
        ModelKind::FreeGaussian1D => {
            // Q = 1/(2s) - x^2/(4 s^2), s = 1 + t^2
            let s = 1.0 + t * t;
            Ok(2.0 * t * (x[0] * x[0] / (2.0 * s * s * s) - 1.0 / (2.0 * s * s)))
        }
        ModelKind::CoherentState1D { a } => {
            // Q = (1 - d^2)/2, d = x - a cos t
            Ok(-a * t.sin() * (x[0] - a * t.cos()))
        }
        _ => {
            model.laplacian_ratio(x, t)?;
            Ok(0.0)
        }
    }
}

/// Central second-difference estimate of `Q`, with the amplitude evaluated in
/// 113-bit precision so that the `O(h^2)` truncation error is not masked by
/// round-off. Errors if any stencil point is at a node or `R` changes sign
/// across the stencil.
pub fn quantum_potential_fd(model: &WaveModel, x: &Vec3, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let q = |v: f64| f128::from(v);
    let xq = [q(x[0]), q(x[1]), q(x[2])];
    let hq = q(h);
    let center = model.amplitude_generic(&xq, t);
    let mut lap = f128::ZERO;
    for d in 0..model.dimension() {
        let mut plus = xq;
        let mut minus = xq;
        plus[d] = plus[d] + hq;
        minus[d] = minus[d] - hq;
        let rp = model.amplitude_generic(&plus, t);
        let rm = model.amplitude_generic(&minus, t);
        for (pt, r) in [(plus, rp), (minus, rm)] {
            let p64 = [
                pt[0].to_f64().unwrap(),
                pt[1].to_f64().unwrap(),
                pt[2].to_f64().unwrap(),
            ];
            if model.node_factor(&p64, t) < NODE_THRESHOLD || r.signum() != center.signum() {
                return Err(Error::Node { x: p64, t });
            }
        }
        lap = lap + (rp - q(2.0) * center + rm) / (hq * hq);
    }
    if model.node_factor(x, t) < NODE_THRESHOLD || center == f128::ZERO {
        return Err(Error::Node { x: *x, t });
    }
    let ratio = (lap / center).to_f64().unwrap();
    Ok(-model.units().kinetic_prefactor() * ratio)
}

/// `-grad (V + Q)`.
pub fn total_force(model: &WaveModel, pot: &ClassicalPotential, x: &Vec3, t: f64) -> Result<Vec3> {
    let gq = quantum_potential_gradient(model, x, t)?;
    let gv = pot.gradient(x);
    Ok([-(gv[0] + gq[0]), -(gv[1] + gq[1]), -(gv[2] + gq[2])])
}

/// `E~ = m |v|^2 / 2 + V + Q`.
pub fn particle_energy(
    state: &ParticleState,
    model: &WaveModel,
    pot: &ClassicalPotential,
) -> Result<ParticleEnergy> {
    let q = quantum_potential(model, &state.x, state.t)?;
    let kinetic = 0.5 * model.units().mass * dot(&state.v, &state.v);
    let v = pot.value(&state.x);
    Ok(ParticleEnergy {
        etilde: kinetic + v + q,
        kinetic,
        v,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn model(kind: ModelKind) -> WaveModel {
        WaveModel::new(kind).unwrap()
    }

    #[test]
    fn free_gaussian_quantum_potential() {
        let m = model(ModelKind::FreeGaussian1D);
        assert!((quantum_potential(&m, &[0.0; 3], 0.0).unwrap() - 0.5).abs() < 1e-15);
        let fd = quantum_potential_fd(&m, &[1.0, 0.0, 0.0], 0.0, 1e-4).unwrap();
        assert!((fd - 0.25).abs() < 1e-6);
        for (x, t) in [(0.7, 0.0), (-1.3, 2.0), (2.5, 0.4)] {
            let s: f64 = 1.0 + t * t;
            let want = 1.0 / (2.0 * s) - x * x / (4.0 * s * s);
            assert!((quantum_potential(&m, &[x, 0.0, 0.0], t).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_fd_at_center() {
        let m = model(ModelKind::CoherentState1D { a: 1.0 });
        let fd = quantum_potential_fd(&m, &[1.0, 0.0, 0.0], 0.0, 1e-4).unwrap();
        assert!((fd - 0.5).abs() < 1e-6);
    }

    #[test]
    fn harmonic_ground_state_total_potential() {
        let m = model(ModelKind::HarmonicEigenstate1D { n: 0 });
        let pot = ClassicalPotential::paired_with(&m);
        assert!((quantum_potential(&m, &[0.0; 3], 0.0).unwrap() - 0.5).abs() < 1e-15);
        for x in [-3.0, -0.2, 1.1, 4.0] {
            let p = [x, 0.0, 0.0];
            let vq = pot.value(&p) + quantum_potential(&m, &p, 0.3).unwrap();
            assert!((vq - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn step_quantum_potential_and_force() {
        let m = model(ModelKind::StepEigenstate1D {
            energy: 0.25,
            height: 1.0,
        });
        let pot = ClassicalPotential::paired_with(&m);
        assert!((quantum_potential(&m, &[-0.4, 0.0, 0.0], 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((quantum_potential(&m, &[0.4, 0.0, 0.0], 0.0).unwrap() + 0.75).abs() < 1e-15);
        for x in [-2.0, -0.3, 0.0, 1.5] {
            let p = [x, 0.0, 0.0];
            assert_eq!(total_force(&m, &pot, &p, 0.0).unwrap(), ZERO);
            let fd = quantum_potential_fd(&m, &[x - 0.01, 0.0, 0.0], 0.0, 1e-4).unwrap();
            let cf = quantum_potential(&m, &[x - 0.01, 0.0, 0.0], 0.0).unwrap();
            assert!((fd - cf).abs() < 1e-6);
        }
    }

    #[test]
    fn free_and_coherent_forces() {
        let free = model(ModelKind::FreeGaussian1D);
        for (x, t) in [(1.0, 0.0), (-0.6, 1.5), (3.0, 4.0)] {
            let f = total_force(&free, &ClassicalPotential::Free, &[x, 0.0, 0.0], t).unwrap();
            let want = 0.5 * x / (1.0 + t * t).powi(2);
            assert!((f[0] - want).abs() < 1e-15);
        }
        let coh = model(ModelKind::CoherentState1D { a: 1.0 });
        let pot = ClassicalPotential::paired_with(&coh);
        for (x, t) in [(0.0, 0.0), (2.0, 1.0), (-3.0, 5.0)] {
            let f = total_force(&coh, &pot, &[x, 0.0, 0.0], t).unwrap();
            assert!((f[0] + t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn node_adjacent_stencil_is_rejected() {
        let m = model(ModelKind::HarmonicEigenstate1D { n: 1 });
        assert!(matches!(
            quantum_potential_fd(&m, &[5e-5, 0.0, 0.0], 0.0, 1e-4),
            Err(Error::Node { .. })
        ));
        assert!(matches!(
            quantum_potential(&m, &[0.0; 3], 0.0),
            Err(Error::Node { .. })
        ));
    }

    #[test]
    fn particle_energy_examples() {
        let free = model(ModelKind::FreeGaussian1D);
        let s = ParticleState {
            x: ZERO,
            v: ZERO,
            t: 0.0,
        };
        let e = particle_energy(&s, &free, &ClassicalPotential::Free).unwrap();
        assert!((e.etilde - 0.5).abs() < 1e-15);
        assert_eq!(e.etilde, e.kinetic + e.v + e.q);

        let h1 = model(ModelKind::HarmonicEigenstate1D { n: 1 });
        let pot = ClassicalPotential::paired_with(&h1);
        let x = [0.8, 0.0, 0.0];
        let v = h1.phase_gradient(&x, 0.0).unwrap();
        let e = particle_energy(&ParticleState { x, v, t: 0.0 }, &h1, &pot).unwrap();
        assert!((e.etilde - 1.5).abs() < 1e-12);
    }

    #[test]
    fn central_fd_and_gradient() {
        let m = model(ModelKind::CentralSuperposition {
            l: 1,
            coefficients: vec![
                Complex64::new(0.3, 0.2),
                Complex64::new(0.5, -0.1),
                Complex64::new(-0.4, 0.6),
            ],
            radial: RadialKind::HydrogenLike {
                n: 2,
                l: 1,
                a0: 1.0,
            },
            hbar: 1.0,
            mass: 2.0,
        });
        let x = [0.9, -0.4, 1.3];
        let cf = quantum_potential(&m, &x, 0.0).unwrap();
        let fd = quantum_potential_fd(&m, &x, 0.0, 1e-4).unwrap();
        assert!((cf - fd).abs() < 1e-6, "{cf} vs {fd}");
        let g = quantum_potential_gradient(&m, &x, 0.0).unwrap();
        let h = 1e-5;
        for d in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let num = (quantum_potential(&m, &xp, 0.0).unwrap()
                - quantum_potential(&m, &xm, 0.0).unwrap())
                / (2.0 * h);
            assert!(
                (num - g[d]).abs() < 1e-7 * (1.0 + g[d].abs()),
                "{d}: {num} vs {}",
                g[d]
            );
        }
    }

    #[test]
    fn rate_matches_time_difference() {
        let dt = 1e-5;
        for m in [
            model(ModelKind::FreeGaussian1D),
            model(ModelKind::CoherentState1D { a: 1.2 }),
        ] {
            for (x, t) in [(0.3, 0.5), (-1.7, 2.0)] {
                let p = [x, 0.0, 0.0];
                let num = (quantum_potential(&m, &p, t + dt).unwrap()
                    - quantum_potential(&m, &p, t - dt).unwrap())
                    / (2.0 * dt);
                assert!((num - quantum_potential_rate(&m, &p, t).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn pairing_is_checked() {
        let m = model(ModelKind::StepEigenstate1D {
            energy: 0.25,
            height: 1.0,
        });
        assert!(ClassicalPotential::Step1D { height: 1.0 }
            .check_pairing(&m)
            .is_ok());
        assert!(ClassicalPotential::Step1D { height: 2.0 }
            .check_pairing(&m)
            .is_err());
        assert!(ClassicalPotential::Free.check_pairing(&m).is_err());
    }
}
