//! Nodeless radial profiles `R(r) = N r^l exp(-b r^p)`.

use num_traits::Float;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialKind {
    /// Coulomb bound state with `n = l + 1`; `a0` is the Bohr radius
    /// `hbar^2 / (m0 k)` of the paired potential `-k / r`.
    HydrogenLike { n: u32, l: u32, a0: f64 },
    /// Isotropic oscillator ground radial state (`n_r = 0`) for angular momentum `l`.
    Oscillator { l: u32, omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: RadialKind,
    l: u32,
    b: f64,
    p: i32,
    norm: f64,
}

impl RadialProfile {
    pub fn new(kind: RadialKind, hbar: f64, mass: f64) -> Result<Self> {
        let (l, b, p) = match kind {
            RadialKind::HydrogenLike { n, l, a0 } => {
                if !(1..=3).contains(&n) || l + 1 != n {
                    return Err(Error::InvalidModel(format!(
                        "hydrogen-like radial profile supports (n, l) in {{(1,0), (2,1), (3,2)}}, got ({n}, {l})"
                    )));
                }
                if !(a0 > 0.0 && a0.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "a0 must be positive, got {a0}"
                    )));
                }
                (l, 1.0 / (n as f64 * a0), 1)
            }
            RadialKind::Oscillator { l, omega } => {
                if !(omega > 0.0 && omega.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "omega must be positive, got {omega}"
                    )));
                }
                (l, 0.5 * mass * omega / hbar, 2)
            }
        };
        // int_0^inf r^(2l+2) exp(-2 b r^p) dr = Gamma(s) / (p (2b)^s), s = (2l+3)/p
        let s = (2 * l + 3) as f64 / p as f64;
        let norm = (p as f64 * (2.0 * b).powf(s) / gamma(s)).sqrt();
        Ok(Self {
            kind,
            l,
            b,
            p,
            norm,
        })
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn value<T: Float>(&self, r: T) -> T {
        let b = T::from(self.b).unwrap();
        T::from(self.norm).unwrap() * r.powi(self.l as i32) * (-b * r.powi(self.p)).exp()
    }

    /// `(R'/R, R''/R, R'''/R)` at `r > 0`.
    pub fn log_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let l = self.l as f64;
        let p = self.p as f64;
        let bp = self.b * p;
        // derivatives of ln R = ln N + l ln r - b r^p
        let l1 = l / r - bp * r.powi(self.p - 1);
        let l2 = -l / (r * r) - bp * (p - 1.0) * r.powi(self.p - 2);
        let l3 = 2.0 * l / (r * r * r) - bp * (p - 1.0) * (p - 2.0) * r.powi(self.p - 3);
        (l1, l1 * l1 + l2, l1 * l1 * l1 + 3.0 * l1 * l2 + l3)
    }

    /// Eigen-energy of the profile in its paired potential.
    pub fn energy(&self, hbar: f64, mass: f64) -> f64 {
        match self.kind {
            RadialKind::HydrogenLike { n, a0, .. } => {
                -hbar * hbar / (2.0 * mass * a0 * a0 * (n * n) as f64)
            }
            RadialKind::Oscillator { l, omega } => hbar * omega * (l as f64 + 1.5),
        }
    }

    /// Characteristic radius of the density.
    pub fn length_scale(&self) -> f64 {
        match self.kind {
            RadialKind::HydrogenLike { n, a0, .. } => a0 * (n * n) as f64,
            RadialKind::Oscillator { .. } => (0.5 / self.b).sqrt(),
        }
    }

    /// Radius beyond which `r^2 R^2` is negligible (below ~e^-60 of its peak).
    pub fn support_radius(&self) -> f64 {
        let peak = (self.l as f64 + 1.0) / (self.b * self.p as f64);
        let peak = peak.powf(1.0 / self.p as f64);
        peak + (30.0 / self.b).powf(1.0 / self.p as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_integral(p: &RadialProfile) -> f64 {
        let rmax = p.support_radius();
        let n = 20000;
        let h = rmax / n as f64;
        // Simpson
        let f = |r: f64| {
            let v: f64 = p.value(r);
            v * v * r * r
        };
        let mut s = f(0.0) + f(rmax);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn profiles_are_normalized() {
        for (n, l) in [(1, 0), (2, 1), (3, 2)] {
            let p =
                RadialProfile::new(RadialKind::HydrogenLike { n, l, a0: 1.3 }, 1.0, 1.0).unwrap();
            assert!((norm_integral(&p) - 1.0).abs() < 1e-10);
        }
        let p = RadialProfile::new(RadialKind::Oscillator { l: 1, omega: 0.7 }, 1.0, 2.0).unwrap();
        assert!((norm_integral(&p) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_hydrogen_closed_form() {
        let p = RadialProfile::new(
            RadialKind::HydrogenLike {
                n: 1,
                l: 0,
                a0: 1.0,
            },
            1.0,
            1.0,
        )
        .unwrap();
        let want = 2.0 * (-0.5f64).exp();
        assert!((p.value(0.5) - want).abs() < 1e-14 * want);
    }

    #[test]
    fn rejects_unsupported_states() {
        assert!(RadialProfile::new(
            RadialKind::HydrogenLike {
                n: 2,
                l: 0,
                a0: 1.0
            },
            1.0,
            1.0
        )
        .is_err());
        assert!(RadialProfile::new(
            RadialKind::HydrogenLike {
                n: 4,
                l: 3,
                a0: 1.0
            },
            1.0,
            1.0
        )
        .is_err());
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let p = RadialProfile::new(
            RadialKind::HydrogenLike {
                n: 3,
                l: 2,
                a0: 0.8,
            },
            1.0,
            1.0,
        )
        .unwrap();
        let r = 2.2;
        let h = 1e-4;
        let f = |r: f64| -> f64 { p.value(r) };
        let (d1, d2, d3) = p.log_derivatives(r);
        let r0 = f(r);
        assert!(((f(r + h) - f(r - h)) / (2.0 * h) / r0 - d1).abs() < 1e-7);
        assert!(((f(r + h) - 2.0 * r0 + f(r - h)) / (h * h) / r0 - d2).abs() < 1e-6);
        let h = 1e-3;
        let d3fd =
            (f(r + 2.0 * h) - 2.0 * f(r + h) + 2.0 * f(r - h) - f(r - 2.0 * h)) / (2.0 * h * h * h);
        assert!((d3fd / r0 - d3).abs() < 1e-5);
    }
}
