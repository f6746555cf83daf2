//! Embedded Dormand–Prince 5(4) stepper with PI step-size control and
//! fourth-order dense output.
//!
//! The stepper is generic over the state dimension and drives a fallible
//! right-hand side: a field that returns [`FieldIssue`] for a probed point
//! (e.g. beyond a coordinate singularity) causes the attempted step to be
//! halved rather than aborting, so trajectories can approach chart
//! boundaries adaptively. Event localization is done by callers on the
//! [`DenseStep`] interpolant.

/// Why a right-hand side declined to evaluate at a probed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldIssue {
    /// x ≤ 0: the rotation axis is a coordinate singularity.
    AxisSingular,
    /// Outside the model chart (e.g. at or beyond the κ < 0 wall).
    OutsideChart,
}

pub type RhsResult<const N: usize> = Result<[f64; N], FieldIssue>;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on |h|; infinite by default.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Step size shrank below resolution; carries the last good state and,
    /// when the failure came from the field, the reported issue.
    StepUnderflow {
        s: f64,
        y: Vec<f64>,
        issue: Option<FieldIssue>,
    },
    MaxStepsExceeded {
        s: f64,
    },
    /// Right-hand side not evaluable at the initial state.
    BadInitialState {
        s: f64,
        issue: FieldIssue,
    },
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
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
// Error weights b5 - b4.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller (Hairer's DOPRI5 settings).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// One accepted step together with its interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub s0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn s1(&self) -> f64 {
        self.s0 + self.h
    }

    /// Evaluate the fourth-order interpolant at s ∈ [s0, s1].
    #[allow(clippy::needless_range_loop)]
    pub fn eval(&self, s: f64) -> [f64; N] {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.cont[0][i]
                + th * (self.cont[1][i]
                    + th1 * (self.cont[2][i] + th * (self.cont[3][i] + th1 * self.cont[4][i])));
        }
        out
    }
}

pub struct Dopri5<F, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> RhsResult<N>,
{
    f: F,
    cfg: SolverConfig,
    s: f64,
    y: [f64; N],
    /// Field value at (s, y); FSAL stage.
    k1: [f64; N],
    h: f64,
    err_old: f64,
    just_rejected: bool,
    steps_taken: usize,
    one_shot_cap: f64,
}

#[allow(clippy::needless_range_loop)]
impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &[f64; N]) -> RhsResult<N>,
{
    pub fn new(mut f: F, s0: f64, y0: [f64; N], cfg: SolverConfig) -> Result<Self, CoreError> {
        let k1 = f(s0, &y0).map_err(|issue| CoreError::BadInitialState { s: s0, issue })?;
        let mut solver = Dopri5 {
            f,
            cfg,
            s: s0,
            y: y0,
            k1,
            h: 0.0,
            err_old: 1e-4,
            just_rejected: false,
            steps_taken: 0,
            one_shot_cap: f64::INFINITY,
        };
        solver.h = solver.initial_step();
        Ok(solver)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Field value at the current state.
    pub fn dy(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Cap the size of the next attempted step only.
    pub fn limit_next_step(&mut self, h: f64) {
        if h > 0.0 {
            self.one_shot_cap = self.one_shot_cap.min(h);
        }
    }

    fn scaled_norm(&self, diff: &[f64; N], y0: &[f64; N], y1: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sk = self.cfg.atol + self.cfg.rtol * y0[i].abs().max(y1[i].abs());
            let r = diff[i] / sk;
            acc += r * r;
        }
        (acc / N as f64).sqrt()
    }

    /// Hairer-style starting step heuristic.
    fn initial_step(&mut self) -> f64 {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..N {
            let sk = self.cfg.atol + self.cfg.rtol * self.y[i].abs();
            d0 += (self.y[i] / sk).powi(2);
            d1 += (self.k1[i] / sk).powi(2);
        }
        d0 = (d0 / N as f64).sqrt();
        d1 = (d1 / N as f64).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(self.cfg.max_step);

        // One explicit Euler probe; retreat if the field objects.
        let mut d2 = 0.0;
        for _ in 0..8 {
            let mut y1 = self.y;
            for i in 0..N {
                y1[i] += h0 * self.k1[i];
            }
            match (self.f)(self.s + h0, &y1) {
                Ok(f1) => {
                    let mut acc = 0.0;
                    for i in 0..N {
                        let sk = self.cfg.atol + self.cfg.rtol * self.y[i].abs();
                        acc += ((f1[i] - self.k1[i]) / sk).powi(2);
                    }
                    d2 = (acc / N as f64).sqrt() / h0;
                    break;
                }
                Err(_) => h0 *= 0.1,
            }
        }
        let d_max = d1.max(d2);
        let h1 = if d_max <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d_max).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.cfg.max_step)
    }

    /// Take one accepted step, never moving past `s_target`; lands exactly on
    /// it when the proposed step would overreach.
    pub fn step_toward(&mut self, s_target: f64) -> Result<DenseStep<N>, CoreError> {
        let mut h = self.h.min(self.cfg.max_step).min(self.one_shot_cap);
        self.one_shot_cap = f64::INFINITY;
        let remaining = s_target - self.s;
        debug_assert!(remaining > 0.0);
        let mut landing = false;
        if h >= remaining {
            h = remaining;
            landing = true;
        }

        loop {
            self.steps_taken += 1;
            if self.steps_taken > self.cfg.max_steps {
                return Err(CoreError::MaxStepsExceeded { s: self.s });
            }
            let h_floor = 4.0 * f64::EPSILON * self.s.abs().max(1e-3);
            if h < h_floor {
                return Err(CoreError::StepUnderflow {
                    s: self.s,
                    y: self.y.to_vec(),
                    issue: None,
                });
            }

            match self.attempt(h) {
                Err(issue) => {
                    // Field refused somewhere inside the step: shrink hard.
                    if h * 0.5 < h_floor {
                        return Err(CoreError::StepUnderflow {
                            s: self.s,
                            y: self.y.to_vec(),
                            issue: Some(issue),
                        });
                    }
                    h *= 0.5;
                    landing = false;
                    self.just_rejected = true;
                }
                Ok((err, y1, k)) => {
                    if err <= 1.0 {
                        let step = self.accept(h, err, y1, &k);
                        if landing {
                            // Snap: avoid a dangling 1-ulp remainder.
                            self.s = s_target;
                        }
                        return Ok(step);
                    }
                    // Rejected on accuracy.
                    let fac11 = err.powf(EXPO1);
                    let fac = (fac11 / SAFETY).min(1.0 / FAC_MIN);
                    h /= fac;
                    landing = false;
                    self.just_rejected = true;
                }
            }
        }
    }

    /// Evaluate the six new stages at step size h. Returns the scaled error
    /// norm, the order-5 solution and all seven stage values.
    #[allow(clippy::type_complexity)]
    fn attempt(&mut self, h: f64) -> Result<(f64, [f64; N], [[f64; N]; 7]), FieldIssue> {
        let s = self.s;
        let y = self.y;
        let mut k = [[0.0; N]; 7];
        k[0] = self.k1;

        let mut ys = [0.0; N];
        for i in 0..N {
            ys[i] = y[i] + h * A21 * k[0][i];
        }
        k[1] = (self.f)(s + C[1] * h, &ys)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        k[2] = (self.f)(s + C[2] * h, &ys)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        k[3] = (self.f)(s + C[3] * h, &ys)?;
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        k[4] = (self.f)(s + C[4] * h, &ys)?;
        for i in 0..N {
            ys[i] = y[i]
                + h * (A61 * k[0][i]
                    + A62 * k[1][i]
                    + A63 * k[2][i]
                    + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        k[5] = (self.f)(s + C[5] * h, &ys)?;
        // Order-5 solution (b row equals the a7 row; FSAL).
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i]
                + h * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        k[6] = (self.f)(s + C[6] * h, &y1)?;

        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
        }
        let err = self.scaled_norm(&diff, &y, &y1);
        Ok((err, y1, k))
    }

    fn accept(&mut self, h: f64, err: f64, y1: [f64; N], k: &[[f64; N]; 7]) -> DenseStep<N> {
        let y0 = self.y;
        let mut cont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            cont[0][i] = y0[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k[6][i] - bspl;
            cont[4][i] = h
                * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * k[6][i]);
        }
        let step = DenseStep {
            s0: self.s,
            h,
            y0,
            y1,
            cont,
        };

        // PI step-size update.
        let err = err.max(1e-20);
        let fac11 = err.powf(EXPO1);
        let mut fac = fac11 / self.err_old.powf(BETA);
        fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;
        if self.just_rejected {
            h_new = h_new.min(h);
            self.just_rejected = false;
        }
        self.err_old = err.max(1e-4);
        self.h = h_new.min(self.cfg.max_step);

        self.s += h;
        self.y = y1;
        self.k1 = k[6];
        step
    }
}

/// Bisection of a scalar function of the interpolated state down to
/// |g| < tol (or to s-resolution). `ga` is the sign carrier at `a`.
pub fn bisect_on<G: FnMut(f64) -> f64>(
    mut g: G,
    mut a: f64,
    mut b: f64,
    mut ga: f64,
    tol: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let gm = g(mid);
        if gm.abs() < tol {
            return mid;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
