//! Physicists' Hermite polynomials by three-term recurrence.

use num_traits::Float;

pub fn hermite<T: Float>(n: u32, x: T) -> T {
    let two = T::one() + T::one();
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two * x;
    for k in 1..n {
        let next = two * x * cur - two * T::from(k).unwrap() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The same recurrence with all coefficients made positive, evaluated at `|x|`.
/// `|H_n(x)| / hermite_majorant(n, x)` lies in `[0, 1]` and measures how close
/// `x` is to a root relative to the size of the terms that cancel there.
pub fn hermite_majorant(n: u32, x: f64) -> f64 {
    let y = x.abs();
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur + 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[H_n, H_n', H_n'', H_n''']` at `x`, using `H_n^(k) = 2^k n!/(n-k)! H_{n-k}`.
pub fn hermite_with_derivatives(n: u32, x: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    let mut factor = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        let k = k as u32;
        if k > n {
            break;
        }
        *slot = factor * hermite(n - k, x);
        factor *= 2.0 * (n - k) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let x = 0.7;
        assert_eq!(hermite(0, x), 1.0);
        assert!((hermite(1, x) - 2.0 * x).abs() < 1e-15);
        assert!((hermite(2, x) - (4.0 * x * x - 2.0)).abs() < 1e-15);
        assert!((hermite(3, x) - (8.0 * x * x * x - 12.0 * x)).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_explicit_cubic() {
        let x = -1.3;
        let d = hermite_with_derivatives(3, x);
        assert!((d[1] - (24.0 * x * x - 12.0)).abs() < 1e-13);
        assert!((d[2] - 48.0 * x).abs() < 1e-13);
        assert!((d[3] - 48.0).abs() < 1e-13);
    }

    #[test]
    fn majorant_bounds_polynomial() {
        for n in 0..8 {
            for i in -40..=40 {
                let x = i as f64 * 0.1;
                assert!(hermite(n, x).abs() <= hermite_majorant(n, x) * (1.0 + 1e-14));
            }
        }
    }
}
