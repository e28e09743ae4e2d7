//! Dormand–Prince 5(4) embedded Runge–Kutta for small complex systems with a
//! real independent variable.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Two complex components: `(x, p)` or `(ψ, ψ')`.
pub type State = [Complex64; 2];

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

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..2 {
            out[i] += k[i] * (coef * h);
        }
    }
    out
}

/// One trial step. Returns the fifth-order solution and the weighted error
/// norm (≤ 1 means acceptable).
pub fn dopri_step<F>(
    f: &mut F,
    t: f64,
    y: &State,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(State, f64)>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let (delta, err) = dopri_increment(f, t, y, h, rel_tol, abs_tol)?;
    Ok(([y[0] + delta[0], y[1] + delta[1]], err))
}

/// Like [`dopri_step`] but returns the increment `y_new - y`, for callers
/// that accumulate the state with compensated summation.
pub fn dopri_increment<F>(
    f: &mut F,
    t: f64,
    y: &State,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(State, f64)>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h))?;
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h))?;
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h))?;
    let k5 = f(
        t + C5 * h,
        &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
    )?;
    let k6 = f(
        t + h,
        &axpy(
            y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ),
    )?;
    let zero = Complex64::new(0.0, 0.0);
    let delta = axpy(
        &[zero, zero],
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        h,
    );
    let y_new = [y[0] + delta[0], y[1] + delta[1]];
    let k7 = f(t + h, &y_new)?;

    let mut err: f64 = 0.0;
    for i in 0..2 {
        let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        let scale = abs_tol + rel_tol * y[i].norm().max(y_new[i].norm());
        err = err.max(e.norm() / scale);
    }
    if !err.is_finite() || y_new.iter().any(|z| !z.is_finite()) {
        err = f64::INFINITY;
    }
    Ok((delta, err))
}

/// State accumulated with Kahan compensation.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedState {
    value: State,
    carry: State,
}

impl CompensatedState {
    pub fn new(value: State) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        CompensatedState {
            value,
            carry: [zero, zero],
        }
    }

    pub fn value(&self) -> State {
        self.value
    }

    /// The state after adding `delta`, without committing it.
    pub fn peek(&self, delta: &State) -> State {
        let mut out = self.value;
        for i in 0..2 {
            out[i] += delta[i] - self.carry[i];
        }
        out
    }

    pub fn add(&mut self, delta: &State) {
        for i in 0..2 {
            let corrected = delta[i] - self.carry[i];
            let sum = self.value[i] + corrected;
            self.carry[i] = (sum - self.value[i]) - corrected;
            self.value[i] = sum;
        }
    }
}

/// PI step-size controller.
#[derive(Debug, Clone, Copy)]
pub struct StepController {
    prev_err: f64,
}

impl Default for StepController {
    fn default() -> Self {
        StepController { prev_err: 1e-4 }
    }
}

impl StepController {
    /// Factor by which to scale the step after an attempt with error `err`.
    pub fn factor(&mut self, err: f64, accepted: bool) -> f64 {
        if !err.is_finite() {
            return 0.2;
        }
        let err = err.max(1e-10);
        let raw = if accepted {
            let f = 0.9 * err.powf(-0.7 / 5.0) * self.prev_err.powf(0.4 / 5.0);
            self.prev_err = err;
            f
        } else {
            0.9 * err.powf(-1.0 / 5.0)
        };
        if accepted {
            raw.clamp(0.2, 5.0)
        } else {
            raw.clamp(0.1, 0.9)
        }
    }
}

/// Integrate from `t0` to `t1` (`t1 > t0`), calling `on_step` after every
/// accepted step. The callback may rescale the state.
#[allow(clippy::too_many_arguments)]
pub fn integrate_span<F, G>(
    f: &mut F,
    t0: f64,
    y0: State,
    t1: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    mut on_step: G,
) -> Result<State>
where
    F: FnMut(f64, &State) -> Result<State>,
    G: FnMut(f64, &mut State) -> Result<()>,
{
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = (span / 100.0).min(max_step);
    let min_step = span * 1e-14;
    let mut control = StepController::default();
    while t < t1 {
        let h_try = h.min(t1 - t);
        let (y_new, err) = dopri_step(f, t, &y, h_try, rel_tol, abs_tol)?;
        if err <= 1.0 {
            t = if t1 - t <= h_try { t1 } else { t + h_try };
            y = y_new;
            on_step(t, &mut y)?;
            h = (h_try * control.factor(err, true)).min(max_step);
        } else {
            h = h_try * control.factor(err, false);
            if h < min_step {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let lambda = Complex64::new(-0.5, 2.0);
        let mut f = |_t: f64, y: &State| Ok([y[0] * lambda, y[1] * lambda.conj()]);
        let one = Complex64::new(1.0, 0.0);
        let y = integrate_span(&mut f, 0.0, [one, one], 3.0, 1e-12, 1e-14, 1.0, |_, _| Ok(()))
            .unwrap();
        assert!((y[0] - (lambda * 3.0).exp()).norm() < 1e-10);
        assert!((y[1] - (lambda.conj() * 3.0).exp()).norm() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator() {
        // x' = 2p, p' = -2x: x = cos 2t
        let mut f = |_t: f64, y: &State| Ok([y[1] * 2.0, -y[0] * 2.0]);
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let y = integrate_span(&mut f, 0.0, y0, 10.0, 1e-12, 1e-14, 0.5, |_, _| Ok(())).unwrap();
        assert!((y[0].re - 20f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn fifth_order_convergence() {
        let mut f = |t: f64, y: &State| Ok([Complex64::new(t.cos(), 0.0), y[0]]);
        let zero = Complex64::new(0.0, 0.0);
        let errs: Vec<f64> = [0.2, 0.1]
            .iter()
            .map(|&h| {
                let mut y = [zero, zero];
                let mut t = 0.0;
                for _ in 0..(2.0 / h) as usize {
                    y = dopri_step(&mut f, t, &y, h, 1.0, 1.0).unwrap().0;
                    t += h;
                }
                (y[0].re - 2f64.sin()).abs()
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 4.5, "observed order {order}");
    }
}
