//! Adaptive Dormand–Prince 5(4) integrator for complex vector ODEs.

use crate::{Error, Result, C64};

/// Step-size control tolerances. The local error estimate is measured in
/// the RMS norm with weights `atol + rtol·max(|y_n|, |y_{n+1}|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
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

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Integrates `dy/dt = f(t, y)` from `t_out[0]` and returns the state at
/// every requested time. `t_out` must be non-decreasing. Steps are shortened
/// so that each output time is hit exactly.
pub fn integrate<F>(mut f: F, y0: &[C64], t_out: &[f64], tol: Tolerances) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if t_out.is_empty() {
        return Ok(Vec::new());
    }
    if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times", "output times must be finite and non-decreasing"));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::invalid("tolerances", "rtol and atol must be positive"));
    }
    let n = y0.len();
    let zero = C64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut t = t_out[0];
    let mut out = Vec::with_capacity(t_out.len());
    out.push(y.clone());

    let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| vec![zero; n]);
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    f(t, &y, &mut k[0]);

    let span = t_out[t_out.len() - 1] - t_out[0];
    let mut h = initial_step(&y, &k[0], tol, span);

    for &target in &t_out[1..] {
        while t < target {
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                return Err(Error::StepSizeUnderflow { t, h: step });
            }

            let stage = |tmp: &mut [C64], k: &[Vec<C64>], coeffs: &[(usize, f64)]| {
                for i in 0..n {
                    let mut acc = y[i];
                    for &(j, a) in coeffs {
                        acc += k[j][i] * (a * step);
                    }
                    tmp[i] = acc;
                }
            };
            stage(&mut tmp, &k, &[(0, A21)]);
            f(t + C2 * step, &tmp, &mut k[1]);
            stage(&mut tmp, &k, &[(0, A31), (1, A32)]);
            f(t + C3 * step, &tmp, &mut k[2]);
            stage(&mut tmp, &k, &[(0, A41), (1, A42), (2, A43)]);
            f(t + C4 * step, &tmp, &mut k[3]);
            stage(&mut tmp, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            f(t + C5 * step, &tmp, &mut k[4]);
            stage(&mut tmp, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            f(t + step, &tmp, &mut k[5]);
            stage(&mut y_new, &k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
            f(t + step, &y_new, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7)
                    * step;
                let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = if n == 0 { 0.0 } else { (err / n as f64).sqrt() };
            if !err.is_finite() {
                h = step * MIN_FACTOR;
                continue;
            }

            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                t = if clipped { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                // A clipped step says nothing about the natural step size.
                if !clipped {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &[C64], f0: &[C64], tol: Tolerances, span: f64) -> f64 {
    let n = y.len().max(1) as f64;
    let rms = |v: &mut dyn Iterator<Item = f64>| (v.map(|x| x * x).sum::<f64>() / n).sqrt();
    let d0 = rms(&mut y.iter().map(|x| x.norm() / (tol.atol + tol.rtol * x.norm())));
    let d1 = rms(&mut y.iter().zip(f0).map(|(x, d)| d.norm() / (tol.atol + tol.rtol * x.norm())));
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    if span > 0.0 {
        h.min(span)
    } else {
        h.max(1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let lambda = C64::new(-1.5, 4.0);
        let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
        let ys = integrate(
            |_, y, dy| dy[0] = lambda * y[0],
            &[C64::new(1.0, 0.0)],
            &times,
            Tolerances { rtol: 1e-10, atol: 1e-12 },
        )
        .unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - (lambda * t).exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let times = [0.0, 10.0];
        let ys = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            &times,
            Tolerances { rtol: 1e-10, atol: 1e-12 },
        )
        .unwrap();
        let y = &ys[1];
        assert!((y[0].re - 10f64.cos()).abs() < 1e-7);
        assert!((y[1].re + 10f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn repeated_times_and_rejections() {
        let ys = integrate(|_, y, dy| dy[0] = -y[0], &[C64::new(1.0, 0.0)], &[0.0, 0.0, 1.0], Tolerances::default())
            .unwrap();
        assert_eq!(ys.len(), 3);
        assert_eq!(ys[0], ys[1]);
        assert!(integrate(|_, _, _| {}, &[C64::new(1.0, 0.0)], &[1.0, 0.0], Tolerances::default()).is_err());
    }

    #[test]
    fn blow_up_reports_underflow() {
        let r = integrate(
            |_, y, dy| dy[0] = y[0] * y[0],
            &[C64::new(1.0, 0.0)],
            &[0.0, 2.0],
            Tolerances::default(),
        );
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })));
    }
}
