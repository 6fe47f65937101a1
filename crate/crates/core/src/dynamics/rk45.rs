//! Dormand-Prince 5(4) with FSAL and step clipping to requested output times.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
    /// Steps shorter than this abort with [`IntegratorError::StepUnderflow`].
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-10, atol: 1e-14, max_step: f64::INFINITY, initial_step: None, min_step: 1e-14, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError<E> {
    #[error("right-hand side failed at t = {t}: {source}")]
    Rhs { t: f64, source: E },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step limit reached at t = {0}")]
    StepLimit(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(t, y)` from `t0` and return `y` at each time in
/// `outputs` (ascending, all `>= t0`). Steps are shortened to land exactly on
/// output times.
pub fn solve<E, F>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    opts: &Dopri5Options,
) -> Result<(Vec<Vec<f64>>, Stats), IntegratorError<E>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
{
    let n = y0.len();
    let mut stats = Stats::default();
    let mut eval = |t: f64, y: &[f64], dy: &mut [f64], stats: &mut Stats| {
        stats.evaluations += 1;
        f(t, y, dy).map_err(|source| IntegratorError::Rhs { t, source })
    };

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    eval(t, &y, &mut k1, &mut stats)?;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    let scale = |y: &[f64], i: usize| opts.atol + opts.rtol * y[i].abs();
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let d0 = (0..n).map(|i| (y[i] / scale(&y, i)).powi(2)).sum::<f64>().sqrt();
        let d1 = (0..n).map(|i| (k1[i] / scale(&y, i)).powi(2)).sum::<f64>().sqrt();
        if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
    });
    h = h.min(opts.max_step);

    let mut out = Vec::with_capacity(outputs.len());
    for &target in outputs {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(IntegratorError::StepLimit(t));
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h };
            if step < opts.min_step && !last {
                return Err(IntegratorError::StepUnderflow { t, h: step });
            }

            for i in 0..n {
                tmp[i] = y[i] + step * A21 * k1[i];
            }
            eval(t + C2 * step, &tmp, &mut k2, &mut stats)?;
            for i in 0..n {
                tmp[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i]);
            }
            eval(t + C3 * step, &tmp, &mut k3, &mut stats)?;
            for i in 0..n {
                tmp[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            eval(t + C4 * step, &tmp, &mut k4, &mut stats)?;
            for i in 0..n {
                tmp[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            eval(t + C5 * step, &tmp, &mut k5, &mut stats)?;
            for i in 0..n {
                tmp[i] = y[i] + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            eval(t + step, &tmp, &mut k6, &mut stats)?;
            for i in 0..n {
                y_new[i] = y[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            eval(t + step, &y_new, &mut k7, &mut stats)?;

            let err = ((0..n)
                .map(|i| {
                    let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                    (e / sc).powi(2)
                })
                .sum::<f64>()
                / n.max(1) as f64)
                .sqrt();

            let factor = if err == 0.0 {
                5.0
            } else if !err.is_finite() {
                0.2
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                if !last {
                    h = (step * factor).min(opts.max_step);
                }
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
                if h < opts.min_step {
                    return Err(IntegratorError::StepUnderflow { t, h });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), ()> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        };
        let t_end = 20.0 * std::f64::consts::PI;
        let (ys, stats) = solve(f, 0.0, &[1.0, 0.0], &[t_end], &Dopri5Options::default()).unwrap();
        assert!((ys[0][0] - 1.0).abs() < 1e-8);
        assert!(ys[0][1].abs() < 1e-8);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn outputs_are_hit_exactly() {
        let f = |_t: f64, _y: &[f64], dy: &mut [f64]| -> Result<(), ()> {
            dy[0] = 1.0;
            Ok(())
        };
        let outs = [0.1, 0.25, 0.7, 3.0];
        let (ys, _) = solve(f, 0.0, &[0.0], &outs, &Dopri5Options::default()).unwrap();
        for (y, t) in ys.iter().zip(outs) {
            assert!((y[0] - t).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_failure_is_reported() {
        let f = |t: f64, _y: &[f64], dy: &mut [f64]| -> Result<(), &'static str> {
            if t > 0.5 {
                return Err("blew up");
            }
            dy[0] = 1.0;
            Ok(())
        };
        let err = solve(f, 0.0, &[0.0], &[1.0], &Dopri5Options::default()).unwrap_err();
        assert!(matches!(err, IntegratorError::Rhs { source: "blew up", .. }));
    }

    #[test]
    fn stiff_blowup_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), ()> {
            dy[0] = y[0] * y[0];
            Ok(())
        };
        let opts = Dopri5Options { min_step: 1e-10, ..Default::default() };
        let err = solve(f, 0.0, &[1.0], &[2.0], &opts).unwrap_err();
        assert!(matches!(err, IntegratorError::StepUnderflow { .. }));
    }
}
