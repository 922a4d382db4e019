//! Orthonormal spherical harmonics with the Condon-Shortley phase.
//!
//! `Y_lm(theta, phi) = q_l|m|(cos theta) * (sin theta e^{i phi})^m` for `m >= 0`
//! and `Y_l,-m = (-1)^m conj(Y_lm)`, where `q_lm` is the polynomial part of the
//! normalized associated Legendre function. Writing `sin theta e^{i phi}` as
//! `(x + i y) / r` turns `r^l Y_lm` into a polynomial in `x, y, z`, so the
//! angular factor of a superposition and all its Cartesian derivatives are
//! evaluated without any coordinate singularity on the z axis.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{norm, Vec3};

pub type CVec3 = [Complex64; 3];
pub type CMat3 = [[Complex64; 3]; 3];

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial parts `q_lm(u)` for `m = 0..=l`, coefficients by ascending power.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTable {
    l: u32,
    polys: Vec<Vec<f64>>,
}

impl LegendreTable {
    pub fn new(l: u32) -> Self {
        let polys = (0..=l).map(|m| legendre_poly(l, m)).collect();
        Self { l, polys }
    }

    pub fn degree(&self) -> u32 {
        self.l
    }

    pub fn poly(&self, m: u32) -> &[f64] {
        &self.polys[m as usize]
    }
}

fn legendre_poly(l: u32, m: u32) -> Vec<f64> {
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt();
    }
    if l == m {
        return vec![pmm];
    }
    let mut prev = vec![pmm];
    let mut cur = vec![0.0, (2.0 * m as f64 + 3.0).sqrt() * pmm];
    let a = |ll: u32| {
        let (ll, mm) = (ll as f64, m as f64);
        ((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm)).sqrt()
    };
    for ll in (m + 2)..=l {
        let (alm, aprev) = (a(ll), a(ll - 1));
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += alm * c;
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= alm * p / aprev;
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub(crate) fn horner<T: Float>(c: &[f64], u: T) -> T {
    c.iter()
        .rev()
        .fold(T::zero(), |acc, &ci| acc * u + T::from(ci).unwrap())
}

/// `(q, q', q'')` at `u`.
fn horner_with_derivatives(c: &[f64], u: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &ci in c.iter().rev() {
        ddp = ddp * u + 2.0 * dp;
        dp = dp * u + p;
        p = p * u + ci;
    }
    (p, dp, ddp)
}

/// `Y_lm(theta, phi)`, orthonormal over the sphere, Condon-Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0, pi]")));
    }
    let table = LegendreTable::new(l);
    let k = m.unsigned_abs();
    let q = horner(table.poly(k), theta.cos());
    let w = Complex64::from_polar(theta.sin(), phi);
    let y = q * w.powu(k);
    Ok(if m < 0 {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        s * y.conj()
    } else {
        y
    })
}

/// `A(x) = sum_m c_m Y_lm(x / |x|)`, together with the tools to differentiate it
/// in Cartesian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSuperposition {
    l: u32,
    coefficients: Vec<Complex64>,
    table: LegendreTable,
}

/// Value, gradient and Hessian of the angular superposition at a point.
#[derive(Debug, Clone, Copy)]
pub struct AngularJet {
    pub value: Complex64,
    pub grad: CVec3,
    pub hess: CMat3,
}

impl AngularSuperposition {
    /// Coefficients are indexed `m = -l..=l` and normalized on construction.
    pub fn new(l: u32, coefficients: &[Complex64]) -> Result<Self> {
        if coefficients.len() != (2 * l + 1) as usize {
            return Err(Error::InvalidModel(format!(
                "expected {} coefficients for l = {l}, got {}",
                2 * l + 1,
                coefficients.len()
            )));
        }
        let total: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidModel(
                "coefficients must be finite and not all zero".into(),
            ));
        }
        let s = total.sqrt();
        Ok(Self {
            l,
            coefficients: coefficients.iter().map(|c| c / s).collect(),
            table: LegendreTable::new(l),
        })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Normalized coefficients, `m = -l..=l`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: i32) -> Complex64 {
        self.coefficients[(m + self.l as i32) as usize]
    }

    /// Upper bound of `|A|` on the sphere (addition theorem and Cauchy-Schwarz).
    pub fn max_modulus(&self) -> f64 {
        ((2 * self.l + 1) as f64 / (4.0 * PI)).sqrt()
    }

    fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let l = self.l as i32;
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i32 - l, *c))
            .filter(|(_, c)| c.norm_sqr() > 0.0)
    }

    /// `A` at the direction of `x`, generic over the float type.
    pub fn value_at<T: Float>(&self, x: &[T; 3]) -> Complex<T> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let u = x[2] / r;
        let w = Complex::new(x[0] / r, x[1] / r);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m, c) in self.terms() {
            let k = m.unsigned_abs();
            let q = horner(self.table.poly(k), u);
            let mut pw = Complex::new(T::one(), T::zero());
            let base = if m < 0 { w.conj() } else { w };
            for _ in 0..k {
                pw = pw * base;
            }
            let sign = if m < 0 && k % 2 == 1 { -1.0 } else { 1.0 };
            let cc = Complex::new(T::from(sign * c.re).unwrap(), T::from(sign * c.im).unwrap());
            acc = acc + cc * pw * q;
        }
        acc
    }

    /// Value, Cartesian gradient and Hessian of `A` at `x` (`x != 0`).
    pub fn jet(&self, x: &Vec3) -> AngularJet {
        let r = norm(x);
        let n = [x[0] / r, x[1] / r, x[2] / r];
        let u = n[2];
        let ez = [CZERO, CZERO, Complex64::new(1.0, 0.0)];
        let (gu, hu) = direction_jet(Complex64::new(u, 0.0), &ez, &n, r);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let w = Complex64::new(n[0], n[1]);
        let (gw, hw) = direction_jet(w, &[one, i, CZERO], &n, r);
        let wb = w.conj();
        let (gwb, hwb) = direction_jet(wb, &[one, -i, CZERO], &n, r);

        let mut value = CZERO;
        let mut grad = [CZERO; 3];
        let mut hess = [[CZERO; 3]; 3];
        for (m, c) in self.terms() {
            let k = m.unsigned_abs();
            let (q, dq, ddq) = horner_with_derivatives(self.table.poly(k), u);
            let (v, gv, hv) = if m < 0 {
                (wb, &gwb, &hwb)
            } else {
                (w, &gw, &hw)
            };
            let sign = if m < 0 && k % 2 == 1 { -1.0 } else { 1.0 };
            let coeff = c * sign;

            // W = v^k
            let kf = k as f64;
            let wk = v.powu(k);
            let (d1, d2) = match k {
                0 => (CZERO, CZERO),
                1 => (one, CZERO),
                _ => (kf * v.powu(k - 1), kf * (kf - 1.0) * v.powu(k - 2)),
            };
            let mut g_w = [CZERO; 3];
            let mut g_q = [CZERO; 3];
            for a in 0..3 {
                g_w[a] = d1 * gv[a];
                g_q[a] = dq * gu[a];
            }
            value += coeff * q * wk;
            for a in 0..3 {
                grad[a] += coeff * (wk * g_q[a] + q * g_w[a]);
                for b in 0..3 {
                    let h_q = ddq * gu[a] * gu[b] + dq * hu[a][b];
                    let h_w = d2 * gv[a] * gv[b] + d1 * hv[a][b];
                    hess[a][b] += coeff * (wk * h_q + q * h_w + g_q[a] * g_w[b] + g_w[a] * g_q[b]);
                }
            }
        }
        AngularJet { value, grad, hess }
    }
}

/// Gradient and Hessian of `v(x) = b . x / r` given `v`, `b`, `n = x / r`, `r`.
fn direction_jet(v: Complex64, b: &CVec3, n: &Vec3, r: f64) -> (CVec3, CMat3) {
    let mut g = [CZERO; 3];
    for a in 0..3 {
        g[a] = (b[a] - v * n[a]) / r;
    }
    let mut h = [[CZERO; 3]; 3];
    for a in 0..3 {
        for c in 0..3 {
            let delta = if a == c { 1.0 } else { 0.0 };
            h[a][c] = -(g[c] * n[a] + g[a] * n[c]) / r - v * (delta - n[a] * n[c]) / (r * r);
        }
    }
    (g, h)
}
