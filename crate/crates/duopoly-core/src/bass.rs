//! Coupled Bass system with cross-brand terms.
//!
//! Dimensionless form (shares of the potential market):
//!
//! ```text
//! dn1/dt = (p1 + q11*n1 + q12*n2) * (1 - n1 - n2)
//! dn2/dt = (p2 + q22*n2 + q21*n1) * (1 - n1 - n2)
//! ```
//!
//! All coefficients are non-negative, so both rates vanish exactly on the
//! saturation line `n1 + n2 = 1` and nowhere else; trajectories are
//! componentwise non-decreasing and bounded by the simplex.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Slack tolerated on `n1 + n2 <= 1` from accumulated integration error.
pub const STATE_SLACK: f64 = 1e-9;

/// Default fixed integration step.
pub const DEFAULT_DT: f64 = 0.01;

/// Default saturation detection threshold on `1 - (n1 + n2)`.
pub const SATURATION_TOL: f64 = 1e-6;

/// The six macroscopic coefficients plus the optional potential market size.
///
/// `p1`, `p2` are external-influence (innovation) rates, `q11`, `q22`
/// within-brand imitation rates, `q12` the influence of brand-2 adopters on
/// brand 1 and `q21` the converse. All in 1/time. Dimensionless work uses
/// `m = None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BassParams {
    pub p1: f64,
    pub p2: f64,
    pub q11: f64,
    pub q22: f64,
    pub q12: f64,
    pub q21: f64,
    pub m: Option<f64>,
}

impl BassParams {
    pub fn new(p1: f64, q11: f64, p2: f64, q22: f64, q12: f64, q21: f64) -> Self {
        Self { p1, p2, q11, q22, q12, q21, m: None }
    }

    /// Within-brand only system (`q12 = q21 = 0`).
    pub fn within_brand(p1: f64, q11: f64, p2: f64, q22: f64) -> Self {
        Self::new(p1, q11, p2, q22, 0.0, 0.0)
    }

    pub fn with_cross(mut self, q12: f64, q21: f64) -> Self {
        self.q12 = q12;
        self.q21 = q21;
        self
    }

    pub fn with_market(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs = [
            (self.p1, "p1"),
            (self.p2, "p2"),
            (self.q11, "q11"),
            (self.q22, "q22"),
            (self.q12, "q12"),
            (self.q21, "q21"),
        ];
        for (v, name) in coeffs {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(match name {
                    "p1" => "p1 must be >= 0",
                    "p2" => "p2 must be >= 0",
                    "q11" => "q11 must be >= 0",
                    "q22" => "q22 must be >= 0",
                    "q12" => "q12 must be >= 0",
                    _ => "q21 must be >= 0",
                }));
            }
        }
        if let Some(m) = self.m {
            if !(m > 0.0) {
                return Err(Error::InvalidParams("m must be > 0"));
            }
        }
        Ok(())
    }
}

/// Adopter shares at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
}

impl MarketState {
    pub const fn new(t: f64, n1: f64, n2: f64) -> Self {
        Self { t, n1, n2 }
    }

    /// Initial condition `n1(0) = n2(0) = 0`.
    pub const ORIGIN: MarketState = MarketState::new(0.0, 0.0, 0.0);

    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 0.0 || self.n2 < 0.0 || self.total() > 1.0 + STATE_SLACK {
            return Err(Error::InvalidState { n1: self.n1, n2: self.n2 });
        }
        Ok(())
    }
}

/// Uniformly sampled integration output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<MarketState>,
    dt: f64,
}

impl Trajectory {
    pub fn from_samples(samples: Vec<MarketState>, dt: f64) -> Self {
        Self { samples, dt }
    }

    pub fn samples(&self) -> &[MarketState] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn final_state(&self) -> MarketState {
        *self.samples.last().expect("trajectory has at least the initial sample")
    }

    /// Keep every `stride`-th sample (always keeping the first).
    pub fn thin(&self, stride: usize) -> Trajectory {
        let samples: Vec<MarketState> =
            self.samples.iter().step_by(stride.max(1)).copied().collect();
        Trajectory { samples, dt: self.dt * stride as f64 }
    }
}

/// Right-hand side of the dimensionless system.
///
/// The saturation factor is clamped at zero so the line `n1 + n2 = 1` is
/// exactly absorbing even when integration slack puts the state a hair past it.
pub fn bass_rhs(params: &BassParams, state: &MarketState) -> Result<(f64, f64)> {
    params.validate()?;
    state.validate()?;
    Ok(rhs_unchecked(params, state.n1, state.n2))
}

#[inline]
fn rhs_unchecked(params: &BassParams, n1: f64, n2: f64) -> (f64, f64) {
    // grouped so the swap symmetry n1 <-> n2 holds bit-exactly
    let remaining = (1.0 - (n1 + n2)).max(0.0);
    (
        (params.p1 + params.q11 * n1 + params.q12 * n2) * remaining,
        (params.p2 + params.q22 * n2 + params.q21 * n1) * remaining,
    )
}

/// What ended an equilibrium-seeking integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `1 - (n1 + n2)` fell below the saturation tolerance.
    Saturated,
    /// The time horizon ran out first.
    HorizonReached,
}

/// Classical fixed-step RK4 over `[init.t, t_end]`.
///
/// Deterministic for identical inputs. Overshoot of the saturation line
/// below [`STATE_SLACK`] is clamped at write-out; an overshoot above 1%
/// in any substep aborts with [`Error::StepTooLarge`].
pub fn integrate(
    params: &BassParams,
    init: &MarketState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    params.validate()?;
    init.validate()?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParams("dt must be > 0"));
    }
    if t_end < init.t {
        return Err(Error::InvalidParams("t_end must be >= initial time"));
    }
    let steps = libm::round((t_end - init.t) / dt) as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = *init;
    samples.push(state);
    for _ in 0..steps {
        state = rk4_step(params, &state, dt)?;
        samples.push(state);
    }
    Ok(Trajectory::from_samples(samples, dt))
}

/// Integrate until `1 - (n1 + n2) < sat_tol` or `t_max`, whichever first.
pub fn integrate_to_saturation(
    params: &BassParams,
    init: &MarketState,
    dt: f64,
    sat_tol: f64,
    t_max: f64,
) -> Result<(Trajectory, StopReason)> {
    params.validate()?;
    init.validate()?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParams("dt must be > 0"));
    }
    let steps = libm::ceil((t_max - init.t) / dt) as usize;
    let mut samples = Vec::new();
    let mut state = *init;
    samples.push(state);
    if 1.0 - state.total() < sat_tol {
        return Ok((Trajectory::from_samples(samples, dt), StopReason::Saturated));
    }
    for _ in 0..steps {
        state = rk4_step(params, &state, dt)?;
        samples.push(state);
        if 1.0 - state.total() < sat_tol {
            return Ok((Trajectory::from_samples(samples, dt), StopReason::Saturated));
        }
    }
    Ok((Trajectory::from_samples(samples, dt), StopReason::HorizonReached))
}

fn rk4_step(params: &BassParams, state: &MarketState, dt: f64) -> Result<MarketState> {
    let (n1, n2) = (state.n1, state.n2);
    let check = |a: f64, b: f64, t: f64| -> Result<()> {
        if a + b > 1.01 {
            Err(Error::StepTooLarge { t })
        } else {
            Ok(())
        }
    };
    let (k1a, k1b) = rhs_unchecked(params, n1, n2);
    let (y1a, y1b) = (n1 + 0.5 * dt * k1a, n2 + 0.5 * dt * k1b);
    check(y1a, y1b, state.t)?;
    let (k2a, k2b) = rhs_unchecked(params, y1a, y1b);
    let (y2a, y2b) = (n1 + 0.5 * dt * k2a, n2 + 0.5 * dt * k2b);
    check(y2a, y2b, state.t)?;
    let (k3a, k3b) = rhs_unchecked(params, y2a, y2b);
    let (y3a, y3b) = (n1 + dt * k3a, n2 + dt * k3b);
    check(y3a, y3b, state.t)?;
    let (k4a, k4b) = rhs_unchecked(params, y3a, y3b);

    let mut next1 = n1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    let mut next2 = n2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    let total = next1 + next2;
    if total > 1.0 {
        if total > 1.0 + STATE_SLACK {
            return Err(Error::StepTooLarge { t: state.t });
        }
        // RK4 can overshoot the absorbing line by O(dt^5); rescale onto it.
        next1 /= total;
        next2 /= total;
    }
    Ok(MarketState::new(state.t + dt, next1, next2))
}

/// Single-brand Bass parameters for the closed-form curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBrandParams {
    pub p: f64,
    pub q: f64,
}

impl SingleBrandParams {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) {
            return Err(Error::InvalidParams("p must be > 0"));
        }
        if !(self.q >= 0.0) {
            return Err(Error::InvalidParams("q must be >= 0"));
        }
        Ok(())
    }
}

/// Closed-form single-brand adoption share:
/// `n(t) = (1 - e^{-(p+q)t}) / (1 + (q/p) e^{-(p+q)t})`.
pub fn closed_form_single(sb: &SingleBrandParams, t: f64) -> Result<f64> {
    sb.validate()?;
    let e = libm::exp(-(sb.p + sb.q) * t);
    Ok((1.0 - e) / (1.0 + sb.q / sb.p * e))
}

/// Rescale shares to adopter counts `N_i = m * n_i`.
pub fn to_dimensional(traj: &Trajectory, m: f64) -> Result<Vec<(f64, f64, f64)>> {
    if !(m > 0.0) {
        return Err(Error::InvalidParams("m must be > 0"));
    }
    Ok(traj.samples().iter().map(|s| (s.t, m * s.n1, m * s.n2)).collect())
}
