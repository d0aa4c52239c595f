//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! The integrator keeps every accepted step together with the stage
//! derivatives, so solutions can be re-evaluated densely by cubic Hermite
//! interpolation without re-integrating.

/// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// 5th-order weights (same as the last A row: FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded 4th-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One accepted integration step: state and derivative at the left endpoint.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// Dense solution of an initial value problem on `[t0, t_end]`.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    /// Accepted nodes, strictly increasing in `t`; the last node is `t_end`.
    pub steps: Vec<Step<N>>,
}

impl<const N: usize> Solution<N> {
    pub fn t_end(&self) -> f64 {
        self.steps.last().map(|s| s.t).unwrap_or(f64::NAN)
    }

    /// Cubic Hermite evaluation between accepted nodes.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let steps = &self.steps;
        if steps.len() == 1 || t <= steps[0].t {
            return steps[0].y;
        }
        if t >= self.t_end() {
            return steps[steps.len() - 1].y;
        }
        let idx = match steps.binary_search_by(|s| s.t.partial_cmp(&t).unwrap()) {
            Ok(i) => return steps[i].y,
            Err(i) => i - 1,
        };
        let (a, b) = (&steps[idx], &steps[idx + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = h00 * a.y[k] + h10 * h * a.dy[k] + h01 * b.y[k] + h11 * h * b.dy[k];
        }
        out
    }
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` to `t_end` with absolute and
/// relative tolerance `tol`. Steps never exceed `max_step`, which bounds the
/// cubic Hermite dense-output error (~`max_step^4/384 * |y''''|`). An
/// optional `stop` predicate halts integration after the step on which it
/// first returns true.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    max_step: f64,
    mut stop: Option<&mut dyn FnMut(f64, &[f64; N]) -> bool>,
) -> Solution<N> {
    let mut t = t0;
    let mut y = y0;
    let mut dy = f(t, &y);
    let mut steps = vec![Step { t, y, dy }];
    let span = t_end - t0;
    let mut h = (span.abs() * 1e-2).clamp(1e-10, 0.1).min(max_step) * span.signum();
    let h_min = span.abs() * 1e-14 + 1e-15;

    while (t_end - t) * span.signum() > 1e-15 {
        if h.abs() > max_step {
            h = max_step * span.signum();
        }
        if (t + h - t_end) * span.signum() > 0.0 {
            h = t_end - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = dy;
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for n in 0..N {
                        ys[n] += h * a * kj[n];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for n in 0..N {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for j in 0..7 {
                acc5 += B5[j] * k[j][n];
                acc4 += B4[j] * k[j][n];
            }
            y5[n] += h * acc5;
            let scale = tol + tol * y[n].abs().max(y5[n].abs());
            err = err.max((h * (acc5 - acc4)).abs() / scale);
        }
        if err <= 1.0 || h.abs() <= h_min {
            t += h;
            y = y5;
            dy = k[6]; // FSAL: last stage is f at the new point
            steps.push(Step { t, y, dy });
            if let Some(cb) = stop.as_deref_mut() {
                if cb(t, &y) {
                    break;
                }
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h.abs() < h_min {
            h = h_min * span.signum();
        }
    }
    Solution { steps }
}
