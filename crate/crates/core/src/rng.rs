//! Counter-based random streams.
//!
//! A ChaCha key is derived from `(seed, domain, trial)` and the ChaCha stream
//! id encodes the matrix position `(i, j)`. Every entry therefore owns an
//! independent stream, and sampled matrices do not depend on thread count or
//! evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Separates the streams used by different samplers under one master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Checkerboard = 1,
    Hollow = 2,
}

/// Law of the i.i.d. real components of random entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    #[default]
    Normal,
    /// Fair ±1 coin.
    Rademacher,
}

impl EntryDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::Rademacher => "rademacher",
        }
    }

    pub fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            Self::Normal => rng.sample(StandardNormal),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random source for one trial of one sampler.
#[derive(Clone, Debug)]
pub struct TrialStream {
    template: ChaCha8Rng,
}

impl TrialStream {
    pub fn new(seed: u64, domain: Domain, trial: u64) -> Self {
        let mut state = splitmix64(seed);
        state = splitmix64(state ^ splitmix64(domain as u64));
        state = splitmix64(state ^ splitmix64(trial.wrapping_add(0x632b_e59b_d9b4_e019)));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Self {
            template: ChaCha8Rng::from_seed(key),
        }
    }

    /// Independent generator for matrix position `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> ChaCha8Rng {
        let mut rng = self.template.clone();
        rng.set_stream(((i as u64) << 32) | (j as u64 & 0xffff_ffff));
        rng
    }
}
