//! Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.
//!
//! Coefficients and controller constants follow the reference `DOPRI5` code.
//! The stepper is driven one accepted step at a time so callers can inspect
//! the dense output between steps for event location.

use crate::error::{Error, Result};

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Initial step; estimated from the system when `None`.
    pub initial_step: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            max_step: f64::INFINITY,
            initial_step: None,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
/// Bounds on `h_old / h_new`.
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
/// Step shrink factor after the right-hand side fails (e.g. at a node).
const RHS_FAILURE_SHRINK: f64 = 0.25;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])))
        })
    }
}

#[derive(Debug, Clone)]
pub struct Stepper<const N: usize> {
    control: StepControl,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    h: f64,
    facold: f64,
    last_rejected: bool,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<const N: usize> Stepper<N> {
    pub fn new<S: OdeSystem<N>>(
        sys: &S,
        t0: f64,
        y0: [f64; N],
        control: StepControl,
    ) -> Result<Self> {
        if !(control.rel_tol > 0.0 && control.abs_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if !(control.max_step > 0.0) {
            return Err(Error::Domain("max_step must be positive".into()));
        }
        let f = sys.rhs(t0, &y0)?;
        let h = match control.initial_step {
            Some(h) => h.min(control.max_step),
            None => initial_step(sys, t0, &y0, &f, &control),
        };
        Ok(Self {
            control,
            t: t0,
            y: y0,
            f,
            h,
            facold: 1e-4,
            last_rejected: false,
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Proposed size of the next step.
    pub fn h(&self) -> f64 {
        self.h
    }

    fn min_step(&self) -> f64 {
        1e-14 * self.t.abs().max(1.0)
    }

    /// Advances by one accepted step without passing `t_limit`.
    ///
    /// A failing right-hand side evaluation rejects the trial step and shrinks
    /// it; if the step underflows, the last such error is returned (a node
    /// error if that was the cause), or `StepFailure` otherwise.
    pub fn step<S: OdeSystem<N>>(&mut self, sys: &S, t_limit: f64) -> Result<DenseStep<N>> {
        let mut last_err: Option<Error> = None;
        loop {
            let remaining = t_limit - self.t;
            let mut h = self.h.min(self.control.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < self.min_step() && !(last && h > 0.0) {
                return Err(last_err.unwrap_or(Error::StepFailure {
                    t: self.t,
                    x: first3(&self.y),
                }));
            }
            match self.try_step(sys, h) {
                Ok((err, y1, k7, dense)) => {
                    let fac11 = err.powf(EXPO1);
                    if err <= 1.0 {
                        let fac = (fac11 / self.facold.powf(BETA) / SAFE)
                            .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                        let mut hnew = h / fac;
                        if self.last_rejected {
                            hnew = hnew.min(h);
                        }
                        self.facold = err.max(1e-4);
                        self.t = if last { t_limit } else { self.t + h };
                        self.y = y1;
                        self.f = k7;
                        // keep the proposal when clipped to the limit
                        self.h = if last { self.h.max(hnew) } else { hnew };
                        self.last_rejected = false;
                        self.accepted += 1;
                        return Ok(dense);
                    }
                    self.h = h / (fac11 / SAFE).min(1.0 / FAC_MIN);
                    self.last_rejected = true;
                    self.rejected += 1;
                }
                Err(e) => {
                    self.h = h * RHS_FAILURE_SHRINK;
                    self.last_rejected = true;
                    self.rejected += 1;
                    last_err = Some(e);
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn try_step<S: OdeSystem<N>>(
        &self,
        sys: &S,
        h: f64,
    ) -> Result<(f64, [f64; N], [f64; N], DenseStep<N>)> {
        let (t, y, k1) = (self.t, &self.y, &self.f);
        let k2 = sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
        let k3 = sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = sys.rhs(
            t + C4 * h,
            &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = sys.rhs(
            t + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = sys.rhs(
            t + h,
            &axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y1 = axpy(
            y,
            h,
            &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = sys.rhs(t + h, &y1)?;
        let mut acc = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.control.abs_tol + self.control.rel_tol * y[i].abs().max(y1[i].abs());
            acc += (e / sk).powi(2);
        }
        let err = (acc / N as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::StepFailure { t, x: first3(y) });
        }
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k7[i] - bspl;
            rcont[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Ok((err, y1, k7, DenseStep { t0: t, h, rcont }))
    }
}

fn first3<const N: usize>(y: &[f64; N]) -> [f64; 3] {
    std::array::from_fn(|i| if i < N { y[i] } else { 0.0 })
}

fn initial_step<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    c: &StepControl,
) -> f64 {
    let sk: [f64; N] = std::array::from_fn(|i| c.abs_tol + c.rel_tol * y0[i].abs());
    let dnf: f64 = (0..N).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y0[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(c.max_step);
    let y1 = axpy(y0, h, &[(1.0, f0)]);
    let Ok(f1) = sys.rhs(t0 + h, &y1) else {
        return h;
    };
    let der2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(c.max_step)
}

/// Integrates to `t_end` and returns the final state.
pub fn integrate_to<const N: usize, S: OdeSystem<N>>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    control: StepControl,
) -> Result<[f64; N]> {
    let mut s = Stepper::new(sys, t0, y0, control)?;
    while s.t() < t_end {
        s.step(sys, t_end)?;
    }
    Ok(*s.y())
}
