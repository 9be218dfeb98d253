//! Dormand–Prince 5(4) with step-size control and continuous (dense) output.

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub enum OdeError {
    StepUnderflow { t: f64, h: f64 },
    /// The acceptance check refused the state reached at `t`; `last` is the last accepted state.
    Rejected { t: f64, t_last: f64, last: Vec<f64> },
    TooManySteps { t: f64 },
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

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] = y[i] + h * s;
    }
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end` (either direction), returning the
/// state at each time in `samples` (which must be monotone in the direction of
/// integration and lie within the span). `accept(t, y)` is consulted after every
/// step; returning false stops the integration with [`OdeError::Rejected`].
pub fn integrate<F, A>(
    f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    samples: &[f64],
    opts: OdeOptions,
    mut accept: A,
) -> Result<Vec<Vec<f64>>, OdeError>
where
    F: Fn(f64, &[f64], &mut [f64]),
    A: FnMut(f64, &[f64]) -> bool,
{
    let dim = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(samples.len());
    let mut next = 0usize;
    while next < samples.len() && (samples[next] - t0) * dir <= 0.0 {
        out.push(y0.to_vec());
        next += 1;
    }
    if t_end == t0 {
        return Ok(out);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    f(t, &y, &mut k[0]);

    let span = (t_end - t0).abs();
    let scale0: f64 = y
        .iter()
        .zip(&k[0])
        .map(|(yi, fi)| (fi / (opts.atol + opts.rtol * yi.abs())).powi(2))
        .sum::<f64>()
        / dim as f64;
    let mut h = if scale0 > 0.0 {
        (0.01 / scale0.sqrt()).min(span)
    } else {
        span * 1e-3
    }
    .max(span * 1e-12);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::TooManySteps { t });
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(OdeError::StepUnderflow { t, h });
        }
        let h_step = h.min((t_end - t).abs());
        let hs = dir * h_step;

        let (k1, rest) = k.split_at_mut(1);
        let k1 = &k1[0];
        {
            let (k2, rest) = rest.split_at_mut(1);
            let (k3, rest) = rest.split_at_mut(1);
            let (k4, rest) = rest.split_at_mut(1);
            let (k5, rest) = rest.split_at_mut(1);
            let (k6, k7) = rest.split_at_mut(1);
            let (k2, k3, k4, k5, k6, k7) =
                (&mut k2[0], &mut k3[0], &mut k4[0], &mut k5[0], &mut k6[0], &mut k7[0]);
            axpy(&mut tmp, &y, hs, &[(A21, k1)]);
            f(t + C2 * hs, &tmp, k2);
            axpy(&mut tmp, &y, hs, &[(A31, k1), (A32, k2)]);
            f(t + C3 * hs, &tmp, k3);
            axpy(&mut tmp, &y, hs, &[(A41, k1), (A42, k2), (A43, k3)]);
            f(t + C4 * hs, &tmp, k4);
            axpy(&mut tmp, &y, hs, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            f(t + C5 * hs, &tmp, k5);
            axpy(
                &mut tmp,
                &y,
                hs,
                &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            );
            f(t + hs, &tmp, k6);
            axpy(
                &mut y_new,
                &y,
                hs,
                &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
            );
            f(t + hs, &y_new, k7);
        }

        let mut err = 0.0;
        for i in 0..dim {
            let e = hs
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();

        if err <= 1.0 && err.is_finite() {
            let t_new = t + hs;
            if !accept(t_new, &y_new) {
                return Err(OdeError::Rejected {
                    t: t_new,
                    t_last: t,
                    last: y,
                });
            }
            // dense output on [t, t_new]
            while next < samples.len() && (samples[next] - t_new) * dir <= 0.0 {
                let theta = (samples[next] - t) / hs;
                let th1 = 1.0 - theta;
                let v = (0..dim)
                    .map(|i| {
                        let diff = y_new[i] - y[i];
                        let bspl = hs * k[0][i] - diff;
                        let r4 = diff - hs * k[6][i] - bspl;
                        let r5 = hs
                            * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                                + D6 * k[5][i]
                                + D7 * k[6][i]);
                        y[i] + theta * (diff + th1 * (bspl + theta * (r4 + th1 * r5)))
                    })
                    .collect();
                out.push(v);
                next += 1;
            }
            t = t_new;
            y.copy_from_slice(&y_new);
            let k7 = k[6].clone();
            k[0].copy_from_slice(&k7);
            let mut fac = if err == 0.0 { 10.0 } else { 0.9 * err.powf(-0.2) };
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = h_step * fac;
            last_rejected = false;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h = h_step * fac;
            last_rejected = true;
        }
    }
    while next < samples.len() {
        out.push(y.clone());
        next += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let samples: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let ys = integrate(
            oscillator,
            0.0,
            &[1.0, 0.0],
            10.0,
            &samples,
            OdeOptions::with_tol(1e-12),
            |_, _| true,
        )
        .unwrap();
        for (t, y) in samples.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-9, "t = {t}: {}", y[0] - t.cos());
            assert!((y[1] + t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn backward_integration() {
        let samples = [0.0, -0.5, -1.0];
        let ys = integrate(
            |_, y, dy| dy[0] = y[0],
            0.0,
            &[1.0],
            -1.0,
            &samples,
            OdeOptions::with_tol(1e-12),
            |_, _| true,
        )
        .unwrap();
        assert!((ys[2][0] - (-1.0f64).exp()).abs() < 1e-11);
        assert!((ys[1][0] - (-0.5f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn rejection_reports_last_state() {
        let r = integrate(
            |_, _, dy| dy[0] = 1.0,
            0.0,
            &[0.0],
            10.0,
            &[],
            OdeOptions::with_tol(1e-8),
            |_, y| y[0] < 3.0,
        );
        match r {
            Err(OdeError::Rejected { last, .. }) => assert!(last[0] < 3.0),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn blow_up_underflows() {
        let r = integrate(
            |_, y, dy| dy[0] = y[0] * y[0],
            0.0,
            &[1.0],
            2.0,
            &[],
            OdeOptions::with_tol(1e-10),
            |_, _| true,
        );
        assert!(matches!(r, Err(OdeError::StepUnderflow { .. }) | Err(OdeError::TooManySteps { .. })));
    }
}
