//! Dormand–Prince 5(4) integrator for the regularised oscillator
//! x' = y, y' = −x/(x² + k²).

use serde::Serialize;

use crate::error::{HbmError, Result};

/// One sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTolerances {
    fn default() -> Self {
        OdeTolerances { rtol: 1e-12, atol: 1e-12 }
    }
}

/// Accepted steps of an integration, with the largest energy deviation seen.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<PhasePoint>,
    pub max_energy_drift: f64,
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct Oscillator {
    k2: f64,
}

impl Oscillator {
    pub(crate) fn new(k: f64) -> Self {
        Oscillator { k2: k * k }
    }

    fn rhs(&self, s: [f64; 2]) -> [f64; 2] {
        [s[1], -s[0] / (s[0] * s[0] + self.k2)]
    }

    pub(crate) fn energy(&self, s: [f64; 2]) -> f64 {
        0.5 * s[1] * s[1] + 0.5 * (s[0] * s[0] + self.k2).ln()
    }

    /// One Dormand–Prince step; returns the fifth-order state and the error vector.
    fn step(&self, s: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
        let mut k = [[0.0; 2]; 7];
        k[0] = self.rhs(s);
        for i in 1..7 {
            let mut st = s;
            for (j, kj) in k.iter().enumerate().take(i) {
                st[0] += h * A[i][j] * kj[0];
                st[1] += h * A[i][j] * kj[1];
            }
            k[i] = self.rhs(st);
        }
        let mut hi = s;
        let mut err = [0.0; 2];
        for i in 0..7 {
            for d in 0..2 {
                hi[d] += h * B5[i] * k[i][d];
                err[d] += h * (B5[i] - B4[i]) * k[i][d];
            }
        }
        (hi, err)
    }
}

/// Adaptive driver with PI step-size control.
pub(crate) struct Driver<'a> {
    osc: &'a Oscillator,
    tol: OdeTolerances,
    pub(crate) t: f64,
    pub(crate) state: [f64; 2],
    h: f64,
    prev_err: f64,
    energy0: f64,
    pub(crate) max_drift: f64,
}

impl<'a> Driver<'a> {
    pub(crate) fn new(osc: &'a Oscillator, tol: OdeTolerances, state: [f64; 2], h0: f64) -> Self {
        let energy0 = osc.energy(state);
        Driver { osc, tol, t: 0.0, state, h: h0, prev_err: 1e-4, energy0, max_drift: 0.0 }
    }

    /// Advances by one accepted step, never past `t_stop`. Returns the previous state.
    pub(crate) fn advance(&mut self, t_stop: f64) -> Result<[f64; 2]> {
        let (alpha, beta, safety) = (0.7 / 5.0, 0.4 / 5.0, 0.9);
        loop {
            let h = self.h.min(t_stop - self.t);
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(HbmError::StepSizeUnderflow { t: self.t, h });
            }
            let (next, err) = self.osc.step(self.state, h);
            let mut norm = 0.0f64;
            for d in 0..2 {
                let scale = self.tol.atol + self.tol.rtol * self.state[d].abs().max(next[d].abs());
                norm = norm.max((err[d] / scale).abs());
            }
            if !norm.is_finite() {
                self.h = h / 10.0;
                continue;
            }
            if norm <= 1.0 {
                let factor = if norm == 0.0 {
                    5.0
                } else {
                    (safety * norm.powf(-alpha) * self.prev_err.powf(beta)).clamp(0.2, 5.0)
                };
                self.prev_err = norm.max(1e-4);
                let previous = self.state;
                self.state = next;
                self.t += h;
                self.h = h * factor;
                let drift = (self.osc.energy(next) - self.energy0).abs();
                self.max_drift = self.max_drift.max(drift);
                return Ok(previous);
            }
            self.h = h * (safety * norm.powf(-alpha)).max(0.2);
        }
    }

    /// Fifth-order state at `t_from + theta` obtained by re-stepping from `from`.
    pub(crate) fn partial(&self, from: [f64; 2], theta: f64) -> [f64; 2] {
        if theta == 0.0 {
            return from;
        }
        self.osc.step(from, theta).0
    }
}

/// Integrates from (x, y) = (A, 0) up to `t_max`, recording every accepted step.
pub fn simulate_regularized(amplitude: f64, k: f64, t_max: f64, tol: OdeTolerances) -> Result<Trajectory> {
    validate(amplitude, k)?;
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(HbmError::InvalidInput(format!("t_max must be finite and non-negative, got {t_max}")));
    }
    let osc = Oscillator::new(k);
    let mut driver = Driver::new(&osc, tol, [amplitude, 0.0], initial_step(amplitude, k));
    let mut points = vec![PhasePoint { t: 0.0, x: amplitude, y: 0.0 }];
    while driver.t < t_max {
        driver.advance(t_max)?;
        points.push(PhasePoint { t: driver.t, x: driver.state[0], y: driver.state[1] });
    }
    Ok(Trajectory { points, max_energy_drift: driver.max_drift })
}

pub(crate) fn initial_step(amplitude: f64, k: f64) -> f64 {
    1e-3 * amplitude.min(k.max(1e-6))
}

pub(crate) fn validate(amplitude: f64, k: f64) -> Result<()> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(HbmError::InvalidInput(format!("amplitude must be positive, got {amplitude}")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(HbmError::InvalidInput(format!("k must be positive, got {k}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_limit() {
        // For k ≫ A the force is ≈ −x/k², a harmonic oscillator with ω = 1/k.
        let k = 100.0;
        let t = std::f64::consts::PI * k;
        let traj = simulate_regularized(1e-3, k, t, OdeTolerances::default()).unwrap();
        let last = traj.points.last().unwrap();
        assert_eq!(last.t, t);
        assert!((last.x + 1e-3).abs() < 1e-9, "{last:?}");
    }

    #[test]
    fn energy_is_conserved() {
        for k in [1.0, 1e-2] {
            let traj = simulate_regularized(1.0, k, 20.0, OdeTolerances::default()).unwrap();
            assert!(traj.max_energy_drift <= 1e-8, "k = {k}: {}", traj.max_energy_drift);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(simulate_regularized(0.0, 1.0, 1.0, OdeTolerances::default()).is_err());
        assert!(simulate_regularized(1.0, -1.0, 1.0, OdeTolerances::default()).is_err());
    }
}
