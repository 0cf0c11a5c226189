//! Run configuration: one JSON document with per-subcommand sections, all
//! optional with documented defaults. A manifest echoing every resolved
//! parameter is written for each run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fracheat_core::grid::{GridSpec, SpaceGrid};
use fracheat_core::noise::ZeroModeRule;
use fracheat_core::solver::{InitialCondition, ModelSpec, Sigma, SolverConfig};

/// Default seed when the config omits one; fixed, never wall-clock.
pub const DEFAULT_SEED: u64 = 0xF2AC_4EA7_0001;

fn default_alpha() -> f64 {
    1.5
}
fn default_beta() -> f64 {
    0.5
}
fn default_k() -> f64 {
    1.0
}
fn default_rho() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_sigma")]
    pub sigma: Sigma,
    #[serde(default = "default_k")]
    pub lipschitz_k: f64,
    #[serde(default = "default_initial")]
    pub initial: InitialCondition,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_sigma() -> Sigma {
    Sigma::Constant(1.0)
}
fn default_initial() -> InitialCondition {
    InitialCondition::Constant(0.0)
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            alpha: default_alpha(),
            beta: default_beta(),
            sigma: default_sigma(),
            lipschitz_k: default_k(),
            initial: default_initial(),
            rho: default_rho(),
        }
    }
}

impl ModelSection {
    pub fn to_model(&self) -> ModelSpec {
        ModelSpec {
            alpha: self.alpha,
            beta: self.beta,
            sigma: self.sigma,
            lipschitz_k: self.lipschitz_k,
            initial: self.initial,
            rho: self.rho,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_paths")]
    pub path_count: usize,
    #[serde(default)]
    pub zero_mode: ZeroModeChoice,
    #[serde(default)]
    pub dealias: bool,
}

fn default_length() -> f64 {
    32.0
}
fn default_points() -> usize {
    1 << 10
}
fn default_dt() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    0.5
}
fn default_paths() -> usize {
    64
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            length: default_length(),
            points: default_points(),
            dt: default_dt(),
            horizon: default_horizon(),
            snapshot_times: Vec::new(),
            path_count: default_paths(),
            zero_mode: ZeroModeChoice::default(),
            dealias: false,
        }
    }
}

/// Zero-mode rule as config text: `"drop"`, `"kernel_matched"`, or
/// `{"finite": value}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModeChoice {
    #[default]
    Drop,
    KernelMatched,
    Finite(f64),
}

impl ZeroModeChoice {
    pub fn resolve(&self, beta: f64, length: f64) -> fracheat_core::Result<ZeroModeRule> {
        Ok(match self {
            ZeroModeChoice::Drop => ZeroModeRule::Drop,
            ZeroModeChoice::KernelMatched => ZeroModeRule::kernel_matched(beta, length)?,
            ZeroModeChoice::Finite(v) => ZeroModeRule::Finite(*v),
        })
    }
}

impl SolverSection {
    pub fn space_grid(&self) -> fracheat_core::Result<SpaceGrid> {
        SpaceGrid::new(self.length, self.points)
    }

    pub fn to_solver_config(
        &self,
        beta: f64,
        seed_base: u64,
        snapshot_times: Vec<f64>,
        path_count: usize,
    ) -> fracheat_core::Result<SolverConfig> {
        Ok(SolverConfig {
            grid: GridSpec::new(self.space_grid()?, self.dt, self.horizon)?,
            snapshot_times,
            seed_base,
            path_count,
            zero_mode: self.zero_mode.resolve(beta, self.length)?,
            dealias: self.dealias,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    #[serde(default = "default_k_list")]
    pub k_list: Vec<u32>,
    /// Time at which spatial structure is measured; default: horizon.
    #[serde(default)]
    pub spatial_time: Option<f64>,
    /// Window for the scaling-slope fit; default [4dx, 16dx].
    #[serde(default)]
    pub slope_window: Option<(f64, f64)>,
    /// Window for the per-lag oracle comparison; default [16dx, L/8].
    #[serde(default)]
    pub oracle_window: Option<(f64, f64)>,
    /// Base time for temporal increments; default horizon/2 (burn-in T/2).
    #[serde(default)]
    pub temporal_base: Option<f64>,
    /// Temporal lags; default {8,16,32,64,128}·dt.
    #[serde(default)]
    pub temporal_deltas: Option<Vec<f64>>,
    #[serde(default = "default_oracle_tol")]
    pub oracle_rel_tol: f64,
}

fn default_k_list() -> Vec<u32> {
    vec![2, 4]
}
fn default_oracle_tol() -> f64 {
    0.05
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            k_list: default_k_list(),
            spatial_time: None,
            slope_window: None,
            oracle_window: None,
            temporal_base: None,
            temporal_deltas: None,
            oracle_rel_tol: default_oracle_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// Covariance validation lags; default {0.25, 0.5, 1, 2}.
    #[serde(default = "default_lags")]
    pub lags: Vec<f64>,
    #[serde(default = "default_cov_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_noise_zero_mode")]
    pub zero_mode: ZeroModeChoice,
}

fn default_draws() -> usize {
    10_000
}
fn default_lags() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0]
}
fn default_cov_tol() -> f64 {
    0.05
}
fn default_noise_zero_mode() -> ZeroModeChoice {
    ZeroModeChoice::KernelMatched
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            draws: default_draws(),
            lags: default_lags(),
            rel_tol: default_cov_tol(),
            zero_mode: default_noise_zero_mode(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(default = "default_kernel_queries")]
    pub queries: Vec<KernelQuerySection>,
    #[serde(default = "default_kernel_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_csv_stride")]
    pub csv_stride: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelQuerySection {
    pub alpha: f64,
    pub t: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
}

fn default_kernel_queries() -> Vec<KernelQuerySection> {
    vec![
        KernelQuerySection { alpha: 1.5, t: 1.0, x_max: 10.0 },
        KernelQuerySection { alpha: 2.0, t: 1.0, x_max: 10.0 },
    ]
}
fn default_kernel_betas() -> Vec<f64> {
    vec![0.2, 0.5, 0.8]
}
fn default_csv_stride() -> usize {
    16
}
fn default_x_max() -> f64 {
    10.0
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            queries: default_kernel_queries(),
            betas: default_kernel_betas(),
            csv_stride: default_csv_stride(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifierSection {
    /// Use the built-in default grids unless overridden.
    #[serde(default)]
    pub quick: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub verifier: VerifierSection,
    #[serde(default)]
    pub seed_base: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed_base.unwrap_or(DEFAULT_SEED)
    }
}
