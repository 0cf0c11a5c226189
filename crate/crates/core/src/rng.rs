//! Counter-based Gaussian stream: the generator state is a pure function of
//! `(seed_base, stream_id, step_index)`, so any step of any path can be
//! regenerated in isolation and paths may be sampled in any order or in
//! parallel with results identical to sequential generation.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 256-bit key derived by absorbing the coordinates into a splitmix chain.
fn derive_key(seed_base: u64, stream_id: u64, step_index: u64) -> [u8; 32] {
    let mut state = seed_base;
    let _ = splitmix_next(&mut state);
    state ^= stream_id.wrapping_mul(GOLDEN);
    let _ = splitmix_next(&mut state);
    state ^= step_index.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    let _ = splitmix_next(&mut state);
    let mut key = [0u8; 32];
    for i in 0..4 {
        let w = splitmix_next(&mut state);
        key[8 * i..8 * (i + 1)].copy_from_slice(&w.to_le_bytes());
    }
    key
}

/// Standard-normal source for one `(seed_base, stream_id, step_index)` cell.
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn at(seed_base: u64, stream_id: u64, step_index: u64) -> Self {
        GaussianStream {
            rng: ChaCha8Rng::from_seed(derive_key(seed_base, stream_id, step_index)),
        }
    }

    fn uniform_open(&mut self) -> f64 {
        // (0, 1]: avoids log(0) in Box-Muller.
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Box-Muller pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}
