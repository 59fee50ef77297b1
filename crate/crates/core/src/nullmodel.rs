//! Synthetic binary data: independence nulls, planted holes, and the five toy datasets.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullConfig {
    pub n_obs: usize,
    pub n_vars: usize,
    pub activity_rate: f64,
    pub seed: u64,
}

impl NullConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_obs == 0 || self.n_vars == 0 {
            return Err(Error::invalid("null model needs at least one observation and one variable"));
        }
        if !(self.activity_rate > 0.0 && self.activity_rate < 1.0) {
            return Err(Error::invalid("activity rate must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Ones per column: `round(rate · n_obs)`, capped at `n_obs`.
    pub fn ones_per_column(&self) -> usize {
        ((self.activity_rate * self.n_obs as f64).round() as usize).min(self.n_obs)
    }
}

pub fn default_labels(n_vars: usize) -> Vec<String> {
    (1..=n_vars).map(|i| format!("x{i}")).collect()
}

/// Independent columns, each with exactly `round(rate · n_obs)` ones placed uniformly.
pub fn generate_independent(cfg: &NullConfig) -> Result<BinaryMatrix> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.ones_per_column();
    let mut bits = vec![0u8; cfg.n_obs * cfg.n_vars];
    for v in 0..cfg.n_vars {
        for o in sample(&mut rng, cfg.n_obs, k) {
            bits[o * cfg.n_vars + v] = 1;
        }
    }
    Ok(BinaryMatrix::from_parts(default_labels(cfg.n_vars), cfg.n_obs, bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Toy {
    I,
    II,
    III,
    IV,
    V,
}

impl std::str::FromStr for Toy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Toy::I),
            "II" | "2" => Ok(Toy::II),
            "III" | "3" => Ok(Toy::III),
            "IV" | "4" => Ok(Toy::IV),
            "V" | "5" => Ok(Toy::V),
            other => Err(Error::invalid(format!("unknown fixture {other:?}"))),
        }
    }
}

const FIVE: [&str; 5] = ["V", "W", "X", "Y", "Z"];
const FOUR: [&str; 4] = ["V", "W", "X", "Z"];

const DATASET_I: [[u8; 5]; 11] = [
    [0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1],
    [0, 0, 1, 0, 1],
    [0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1],
    [0, 0, 1, 0, 1],
    [0, 0, 1, 1, 0],
    [1, 0, 0, 0, 1],
    [0, 1, 1, 0, 0],
    [1, 1, 0, 0, 0],
];

const DATASET_II: [[u8; 5]; 11] = [
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 1],
    [0, 0, 1, 0, 1],
    [0, 0, 1, 1, 0],
    [0, 0, 1, 1, 1],
    [1, 0, 0, 0, 1],
    [0, 1, 1, 0, 0],
    [1, 1, 0, 0, 0],
];

const DATASET_III: [[u8; 5]; 11] = [
    [0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 1, 1, 1],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 1, 1, 1],
    [1, 0, 0, 0, 1],
    [0, 1, 1, 0, 0],
    [1, 1, 0, 0, 0],
];

const DATASET_IV: [[u8; 4]; 4] = [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]];

/// The toy datasets: I–III share all one- and two-way marginals, IV is a
/// hollow tetrahedron, V is IV without its first row.
pub fn toy_fixture(name: Toy) -> BinaryMatrix {
    let bm = match name {
        Toy::I => BinaryMatrix::from_rows(FIVE, &DATASET_I),
        Toy::II => BinaryMatrix::from_rows(FIVE, &DATASET_II),
        Toy::III => BinaryMatrix::from_rows(FIVE, &DATASET_III),
        Toy::IV => BinaryMatrix::from_rows(FOUR, &DATASET_IV),
        Toy::V => BinaryMatrix::from_rows(FOUR, &DATASET_IV[1..]),
    };
    bm.expect("fixtures are well formed")
}

/// Probability that a noise row activates each of the non-planted variables.
const NOISE_RATE: f64 = 0.3;

/// The `d + 2` facets of a `(d+1)`-simplex on the first `d + 2` variables,
/// one observation each, followed by `noise_obs` random rows that only touch
/// the remaining variables (so nothing can fill the planted shell).
pub fn planted_hole(d: usize, n_vars: usize, noise_obs: usize, seed: u64) -> Result<BinaryMatrix> {
    let shell = d + 2;
    if n_vars < shell {
        return Err(Error::invalid(format!("planted {d}-hole needs at least {shell} variables")));
    }
    let mut rows: Vec<Vec<u8>> = (0..shell)
        .map(|skip| (0..n_vars).map(|v| u8::from(v < shell && v != skip)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..noise_obs {
        rows.push(
            (0..n_vars)
                .map(|v| u8::from(v >= shell && rng.gen_bool(NOISE_RATE)))
                .collect(),
        );
    }
    BinaryMatrix::new(default_labels(n_vars), rows)
}
