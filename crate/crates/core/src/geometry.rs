//! Small fixed-size vector helpers and spherical coordinates.
//!
//! Spherical coordinates follow `x = r sin(theta) cos(phi)`,
//! `y = r sin(theta) sin(phi)`, `z = r cos(theta)`.

pub type Vec3 = [f64; 3];

pub const ZERO: Vec3 = [0.0; 3];

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `(r, theta, phi)` of a Cartesian point. `theta` is 0 on the positive z axis.
pub fn to_spherical(x: &Vec3) -> (f64, f64, f64) {
    let r = norm(x);
    let rho = x[0].hypot(x[1]);
    (r, rho.atan2(x[2]), x[1].atan2(x[0]))
}

pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [r * st * cp, r * st * sp, r * ct]
}

/// Orthonormal frame `(r_hat, theta_hat, phi_hat)` at angles `(theta, phi)`.
pub fn spherical_frame(theta: f64, phi: f64) -> [Vec3; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_round_trip() {
        let x = [0.3, -1.2, 0.7];
        let (r, th, ph) = to_spherical(&x);
        let y = from_spherical(r, th, ph);
        for k in 0..3 {
            assert!((x[k] - y[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let f = spherical_frame(0.4, 2.1);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&f[i], &f[j]) - want).abs() < 1e-15);
            }
        }
        // right-handed: r x theta = phi
        let c = cross(&f[0], &f[1]);
        assert!(norm(&sub(&c, &f[2])) < 1e-15);
    }
}
