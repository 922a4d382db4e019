//! Motion in a fixed-(E, l) central eigenstate: the angular function `f`,
//! the constants `E~` and `C`, the radial closed form and regime classification.
//!
//! Energies here have the constant `E` dropped: the total potential is `f / r^2`.
//! The angular derivatives use spherical harmonics in `(theta, phi)` directly,
//! independently of the Cartesian route in [`crate::wavemodels`].

use num_complex::Complex64;

use crate::dynamics::ParticleState;
use crate::error::{Error, Result};
use crate::geometry::{cross, dot, norm, spherical_frame, to_spherical, Vec3};
use crate::wavemodels::{spherical_harmonic, ModelKind, WaveModel, NODE_THRESHOLD};

/// `f(theta, phi) = -r^2 |grad S|^2 / 2 m0` of an angular superposition.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFunction {
    l: u32,
    coefficients: Vec<Complex64>,
    mass: f64,
    hbar: f64,
    /// `sqrt((2l + 1) / 4 pi)`, a bound on `|A|` used for the node test.
    scale: f64,
}

/// `f` and its angular partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularValue {
    pub f: f64,
    pub df_dtheta: f64,
    pub df_dphi: f64,
}

/// `A` and its derivatives up to second order in `(theta, phi)`.
struct AngularDerivs {
    a: Complex64,
    d: [Complex64; 2],
    dd: [[Complex64; 2]; 2],
}

impl AngularFunction {
    /// Normalizes `coefficients` (indexed `m = -l..=l`).
    pub fn new(l: u32, coefficients: &[Complex64], mass: f64, hbar: f64) -> Result<Self> {
        if coefficients.len() != (2 * l + 1) as usize {
            return Err(Error::InvalidModel(format!(
                "expected {} coefficients for l = {l}, got {}",
                2 * l + 1,
                coefficients.len()
            )));
        }
        let total: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidModel(
                "coefficients must not all vanish".into(),
            ));
        }
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidModel(format!(
                "mass and hbar must be positive, got {mass}, {hbar}"
            )));
        }
        let s = total.sqrt();
        Ok(Self {
            l,
            coefficients: coefficients.iter().map(|c| c / s).collect(),
            mass,
            hbar,
            scale: ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt(),
        })
    }

    pub fn from_model(model: &WaveModel) -> Result<Self> {
        match model.kind() {
            ModelKind::CentralSuperposition {
                l,
                coefficients,
                hbar,
                mass,
                ..
            } => Self::new(*l, coefficients, *mass, *hbar),
            _ => Err(Error::InvalidModel(format!(
                "{} is not a central model",
                model.name()
            ))),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn derivs(&self, theta: f64, phi: f64) -> Result<AngularDerivs> {
        let l = self.l as i32;
        let (s, c) = theta.sin_cos();
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "the angular route is singular on the polar axis (theta = {theta})"
            )));
        }
        let cot = c / s;
        let ll = (l * (l + 1)) as f64;
        let i = Complex64::new(0.0, 1.0);
        let mut a = Complex64::new(0.0, 0.0);
        let mut at = a;
        let mut ap = a;
        let mut att = a;
        let mut atp = a;
        let mut app = a;
        for (k, cm) in self.coefficients.iter().enumerate() {
            if *cm == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = k as i32 - l;
            let mf = m as f64;
            let y = spherical_harmonic(self.l, m, theta, phi)?;
            // ladder relation for the polar derivative
            let mut yt = mf * cot * y;
            if m < l {
                let up = spherical_harmonic(self.l, m + 1, theta, phi)?;
                let k = (((l - m) * (l + m + 1)) as f64).sqrt();
                yt += k * (-i * phi).exp() * up;
            }
            // associated Legendre equation
            let ytt = -cot * yt + (mf * mf / (s * s) - ll) * y;
            a += cm * y;
            at += cm * yt;
            ap += cm * i * mf * y;
            att += cm * ytt;
            atp += cm * i * mf * yt;
            app += cm * (-mf * mf) * y;
        }
        if a.norm() < NODE_THRESHOLD * self.scale {
            let x = crate::geometry::from_spherical(1.0, theta, phi);
            return Err(Error::Node { x, t: 0.0 });
        }
        Ok(AngularDerivs {
            a,
            d: [at, ap],
            dd: [[att, atp], [atp, app]],
        })
    }

    /// `f(theta, phi)`.
    pub fn value(&self, theta: f64, phi: f64) -> Result<f64> {
        Ok(self.with_derivatives(theta, phi)?.f)
    }

    pub fn with_derivatives(&self, theta: f64, phi: f64) -> Result<AngularValue> {
        let AngularDerivs { a, d, dd } = self.derivs(theta, phi)?;
        let a2 = a.norm_sqr();
        let sig: [f64; 2] = std::array::from_fn(|j| (a.conj() * d[j]).im / a2);
        let w: [f64; 2] = std::array::from_fn(|j| (a.conj() * d[j]).re / a2);
        // dsig[i][j] = d_j sigma_i
        let dsig: [[f64; 2]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                ((d[j].conj() * d[i]).im + (a.conj() * dd[i][j]).im) / a2 - 2.0 * sig[i] * w[j]
            })
        });
        let (s, c) = theta.sin_cos();
        let s2 = s * s;
        let big_f = sig[0] * sig[0] + sig[1] * sig[1] / s2;
        let df_t = 2.0 * sig[0] * dsig[0][0] + 2.0 * sig[1] * dsig[1][0] / s2
            - 2.0 * sig[1] * sig[1] * c / (s2 * s);
        let df_p = 2.0 * sig[0] * dsig[0][1] + 2.0 * sig[1] * dsig[1][1] / s2;
        let k = -self.hbar * self.hbar / (2.0 * self.mass);
        Ok(AngularValue {
            f: k * big_f,
            df_dtheta: k * df_t,
            df_dphi: k * df_p,
        })
    }

    /// Force `-grad(f / r^2)` at a Cartesian point.
    pub fn effective_force(&self, x: &Vec3) -> Result<Vec3> {
        let (r, theta, phi) = to_spherical(x);
        if r == 0.0 {
            return Err(Error::Domain("effective force undefined at r = 0".into()));
        }
        let v = self.with_derivatives(theta, phi)?;
        let [er, et, ep] = spherical_frame(theta, phi);
        let r3 = r * r * r;
        let (fr, ft, fp) = (
            2.0 * v.f / r3,
            -v.df_dtheta / r3,
            -v.df_dphi / (r3 * theta.sin()),
        );
        Ok(std::array::from_fn(|i| {
            fr * er[i] + ft * et[i] + fp * ep[i]
        }))
    }
}

/// `f = -r^2 grad S . grad S / 2 m0` for normalized coefficients `c` (indexed `m = -l..=l`).
pub fn angular_kinetic_f(
    l: u32,
    c: &[Complex64],
    theta: f64,
    phi: f64,
    m0: f64,
    hbar: f64,
) -> Result<f64> {
    AngularFunction::new(l, c, m0, hbar)?.value(theta, phi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralInvariants {
    /// `m0 |v|^2 / 2 + f / r^2`, with the constant `E` dropped.
    pub etilde: f64,
    /// `|L|^2 / 2 m0 + f`.
    pub c: f64,
    /// `f(theta, phi)` at the state.
    pub f: f64,
}

/// `E~` and `C` of a Cartesian state.
pub fn invariants_of(
    state: &ParticleState,
    f_at: impl Fn(f64, f64) -> Result<f64>,
    m0: f64,
) -> Result<CentralInvariants> {
    let (r, theta, phi) = to_spherical(&state.x);
    if r == 0.0 {
        return Err(Error::Domain("invariants undefined at r = 0".into()));
    }
    let f = f_at(theta, phi)?;
    let l = cross(&state.x, &state.v);
    let l2 = m0 * m0 * dot(&l, &l);
    Ok(CentralInvariants {
        etilde: 0.5 * m0 * dot(&state.v, &state.v) + f / (r * r),
        c: l2 / (2.0 * m0) + f,
        f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BoundedOscillating,
    Sphere,
    UnboundedConstantRadialSpeed,
    Unbounded,
    Infeasible,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::BoundedOscillating => "bounded_oscillating",
            Regime::Sphere => "sphere",
            Regime::UnboundedConstantRadialSpeed => "unbounded_constant_radial_speed",
            Regime::Unbounded => "unbounded",
            Regime::Infeasible => "infeasible",
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Regime::BoundedOscillating | Regime::Sphere)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub regime: Regime,
    /// `sqrt(C / E~)` when `C` and `E~` are nonzero with the same sign.
    pub turning_radius: Option<f64>,
}

/// Regime of the radial motion from exact sign tests on `(E~, C)`.
pub fn classify(etilde: f64, c: f64) -> Classification {
    use std::cmp::Ordering::*;
    let sign = |v: f64| v.partial_cmp(&0.0).unwrap_or(Equal);
    let regime = match (sign(c), sign(etilde)) {
        (Greater, Greater) => Regime::Unbounded,
        (Greater, _) => Regime::Infeasible,
        (Equal, Greater) => Regime::UnboundedConstantRadialSpeed,
        (Equal, Equal) => Regime::Sphere,
        (Equal, Less) => Regime::Infeasible,
        (Less, Less) => Regime::BoundedOscillating,
        (Less, _) => Regime::Unbounded,
    };
    let turning_radius =
        (c != 0.0 && etilde != 0.0 && (c > 0.0) == (etilde > 0.0)).then(|| (c / etilde).sqrt());
    Classification {
        regime,
        turning_radius,
    }
}

/// As [`classify`], treating `|value| < 1e-10 * scale` as zero.
pub fn classify_with_tolerance(etilde: f64, c: f64, scale: f64) -> Classification {
    let snap = |v: f64| if v.abs() < 1e-10 * scale { 0.0 } else { v };
    classify(snap(etilde), snap(c))
}

/// `r(t) = sqrt(r0^2 + 2 r0 rdot0 t + (2 E~ / m0) t^2)`.
pub fn radial_trajectory(r0: f64, rdot0: f64, etilde: f64, m0: f64, t: f64) -> Result<f64> {
    if !(r0 > 0.0 && m0 > 0.0) {
        return Err(Error::Domain(format!(
            "r0 and m0 must be positive, got {r0}, {m0}"
        )));
    }
    let q = r0 * r0 + 2.0 * r0 * rdot0 * t + 2.0 * etilde / m0 * t * t;
    if q <= 0.0 {
        return Err(Error::Domain(format!("center reached before t = {t}")));
    }
    Ok(q.sqrt())
}

/// First positive time at which the radial closed form reaches `r = 0`.
pub fn center_time(r0: f64, rdot0: f64, etilde: f64, m0: f64) -> Option<f64> {
    let (a, b, c) = (2.0 * etilde / m0, 2.0 * r0 * rdot0, r0 * r0);
    if a == 0.0 {
        return (b < 0.0).then(|| -c / b);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -0.5 * (b + b.signum() * sq);
    let roots = [q / a, if q != 0.0 { c / q } else { f64::NAN }];
    roots.into_iter().filter(|t| *t > 0.0).reduce(f64::min)
}

/// `E~` implied by the radial data, `m0 rdot^2 / 2 + C / r^2`.
pub fn radial_energy(r: f64, rdot: f64, c: f64, m0: f64) -> f64 {
    0.5 * m0 * rdot * rdot + c / (r * r)
}

/// Radial coordinate of a Cartesian point.
pub fn radius(x: &Vec3) -> f64 {
    norm(x)
}
