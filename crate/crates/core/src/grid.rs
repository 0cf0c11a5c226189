//! Periodic spatial grids and sampled fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid: `points` samples over a torus of circumference
/// `length`, abscissae `x_m = m · length/points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    length: f64,
    points: usize,
}

impl SpaceGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::parameter("length", format!("must be positive, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::parameter(
                "points",
                format!("must be a power of two >= 8, got {points}"),
            ));
        }
        Ok(SpaceGrid { length, points })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn abscissa(&self, m: usize) -> f64 {
        m as f64 * self.dx()
    }

    /// |k|/L in cycles per unit length for FFT bin `k`.
    pub fn frequency_magnitude(&self, k: usize) -> f64 {
        crate::fft::signed_index(k, self.points).unsigned_abs() as f64 / self.length
    }

    /// Fractional-Laplacian symbol eigenvalue `λ_k = (2π |k|/L)^α`.
    pub fn symbol_eigenvalue(&self, k: usize, alpha: f64) -> f64 {
        let f = self.frequency_magnitude(k);
        (2.0 * std::f64::consts::PI * f).powf(alpha)
    }

    /// Nearest grid index of a spatial offset, if it is a grid multiple.
    pub fn lag_index(&self, lag: f64) -> Result<usize> {
        let steps = lag / self.dx();
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * steps.abs().max(1.0) || rounded < 0.0 {
            return Err(Error::Input(format!(
                "lag {lag} is not a nonnegative multiple of dx = {}",
                self.dx()
            )));
        }
        Ok(rounded as usize % self.points)
    }
}

/// Space grid plus time discretization for the evolution problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub space: SpaceGrid,
    pub dt: f64,
    pub horizon: f64,
}

impl GridSpec {
    pub fn new(space: SpaceGrid, dt: f64, horizon: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::parameter("dt", format!("must be positive, got {dt}")));
        }
        if horizon < 0.0 || !horizon.is_finite() {
            return Err(Error::parameter(
                "horizon",
                format!("must be nonnegative, got {horizon}"),
            ));
        }
        Ok(GridSpec { space, dt, horizon })
    }

    pub fn step_count(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }

    /// Step index of a snapshot time; the time must sit on the step grid.
    pub fn step_of_time(&self, t: f64) -> Result<u64> {
        let steps = t / self.dt;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 || rounded < 0.0 {
            return Err(Error::Input(format!(
                "time {t} is not a multiple of dt = {}",
                self.dt
            )));
        }
        Ok(rounded as u64)
    }
}

/// Real field over a [`SpaceGrid`] at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub time: f64,
    pub values: Vec<f64>,
}

impl FieldSnapshot {
    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn spatial_mean(&self) -> f64 {
        crate::util::mean(&self.values)
    }
}
