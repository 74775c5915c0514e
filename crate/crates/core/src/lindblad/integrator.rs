//! Classic fourth-order Runge–Kutta with step-doubling error control.
//!
//! Each attempted step of size `h` is taken once as a full step and once as
//! two half steps; their difference estimates the local error of the
//! two-half-step result, which is the one kept.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Right-hand side `dy = f(t, y)`.
pub trait Rhs {
    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

impl<F: Fn(f64, &[Complex64], &mut [Complex64])> Rhs for F {
    fn eval(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        self(t, y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Only the first `error_len` components enter the error norm; the rest
    /// (e.g. quadrature accumulators) ride along.
    pub error_len: Option<usize>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: 1e-10,
            h_min: 1e-16,
            h_max: f64::INFINITY,
            error_len: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub last_step: f64,
}

struct Workspace {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

fn rk4_step<F: Rhs + ?Sized>(
    f: &F,
    t: f64,
    y: &[Complex64],
    h: f64,
    out: &mut [Complex64],
    ws: &mut Workspace,
) {
    let n = y.len();
    f.eval(t, y, &mut ws.k1);
    for i in 0..n {
        ws.tmp[i] = y[i] + ws.k1[i] * (0.5 * h);
    }
    f.eval(t + 0.5 * h, &ws.tmp, &mut ws.k2);
    for i in 0..n {
        ws.tmp[i] = y[i] + ws.k2[i] * (0.5 * h);
    }
    f.eval(t + 0.5 * h, &ws.tmp, &mut ws.k3);
    for i in 0..n {
        ws.tmp[i] = y[i] + ws.k3[i] * h;
    }
    f.eval(t + h, &ws.tmp, &mut ws.k4);
    for i in 0..n {
        out[i] = y[i] + (ws.k1[i] + (ws.k2[i] + ws.k3[i]) * 2.0 + ws.k4[i]) * (h / 6.0);
    }
}

/// Fixed-step RK4 from `t0` to `t1` in `n_steps` equal steps.
pub fn integrate_fixed<F: Rhs + ?Sized>(
    f: &F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Vec<Complex64> {
    let mut ws = Workspace::new(y0.len());
    let mut y = y0.to_vec();
    let mut next = y.clone();
    let h = (t1 - t0) / n_steps as f64;
    for s in 0..n_steps {
        rk4_step(f, t0 + h * s as f64, &y, h, &mut next, &mut ws);
        std::mem::swap(&mut y, &mut next);
    }
    y
}

/// Adaptive integrator. `observe` is called with the state at `t0` and at
/// every time in `sample_times` (which must be sorted and lie in
/// `[t0, t1]`); the state at `t1` is returned.
pub fn integrate_adaptive<F, O>(
    f: &F,
    y0: &[Complex64],
    t0: f64,
    t1: f64,
    sample_times: &[f64],
    control: &StepControl,
    mut observe: O,
) -> Result<(Vec<Complex64>, IntegrationStats)>
where
    F: Rhs + ?Sized,
    O: FnMut(f64, &[Complex64]) -> Result<()>,
{
    if !(t1 >= t0) {
        return Err(Error::invalid(format!("integration interval {t0}..{t1} is reversed")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&s| s < t0 || s > t1)
    {
        return Err(Error::invalid("sample times must be sorted and inside the interval"));
    }
    let n = y0.len();
    let err_len = control.error_len.unwrap_or(n).min(n);
    let mut ws = Workspace::new(n);
    let mut y = y0.to_vec();
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    let mut half = full.clone();
    let mut two_half = full.clone();
    let mut stats = IntegrationStats::default();

    let mut t = t0;
    let mut h = control.h_init.min(control.h_max).max(control.h_min);
    let mut next_sample = 0;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        observe(t0, &y)?;
        next_sample += 1;
    }

    while t < t1 {
        let target = sample_times
            .get(next_sample)
            .copied()
            .unwrap_or(t1)
            .min(t1);
        let remaining = target - t;
        let lands = h >= remaining;
        let step = if lands { remaining } else { h };

        rk4_step(f, t, &y, step, &mut full, &mut ws);
        rk4_step(f, t, &y, 0.5 * step, &mut half, &mut ws);
        rk4_step(f, t + 0.5 * step, &half, 0.5 * step, &mut two_half, &mut ws);
        stats.rhs_evals += 12;

        if two_half.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Integration {
                t,
                step,
                reason: "non-finite state".into(),
            });
        }
        let mut err_ratio: f64 = 0.0;
        for i in 0..err_len {
            let scale = control.atol + control.rtol * two_half[i].norm().max(y[i].norm());
            err_ratio = err_ratio.max((two_half[i] - full[i]).norm() / 15.0 / scale);
        }

        if err_ratio <= 1.0 {
            t = if lands { target } else { t + step };
            std::mem::swap(&mut y, &mut two_half);
            stats.accepted += 1;
            stats.last_step = step;
            while next_sample < sample_times.len() && sample_times[next_sample] <= t {
                observe(sample_times[next_sample], &y)?;
                next_sample += 1;
            }
            // a step shortened to land on a sample says nothing about h
            if !lands || err_ratio > 0.0 {
                let grow = if err_ratio == 0.0 {
                    4.0
                } else {
                    (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 4.0)
                };
                if !lands {
                    h = (step * grow).min(control.h_max);
                } else {
                    h = h.max(step * grow).min(control.h_max);
                }
            }
        } else {
            stats.rejected += 1;
            h = step * (0.9 * err_ratio.powf(-0.2)).clamp(0.1, 0.5);
            if h < control.h_min {
                return Err(Error::Integration {
                    t,
                    step: h,
                    reason: format!(
                        "step size underflow (error ratio {err_ratio:.3e}, {} accepted, {} rejected)",
                        stats.accepted, stats.rejected
                    ),
                });
            }
        }
    }
    Ok((y, stats))
}
