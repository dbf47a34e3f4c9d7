//! All randomness in the engine.
//!
//! Every transaction gets its own [`RngStream`], seeded from the ledger's
//! global seed and the transaction's sequence number, so replaying a log
//! reproduces every pack and every combine result bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::card::{base_catalog, Rarity, TrigFunction, Variant};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Tolerance on the sum of a distribution's probabilities.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("probability {0} is negative or not finite")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    BadSum(f64),
    #[error("pack must contain at least one card")]
    EmptyPack,
    #[error("pack catalog is empty")]
    EmptyCatalog,
    #[error("pair table is not symmetric at levels {0} and {1}")]
    Asymmetric(u8, u8),
}

/// SplitMix64 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        RngStream { state: seed }
    }

    /// Stream for transaction `tx_index` under `global_seed`.
    pub fn for_tx(global_seed: u64, tx_index: u64) -> Self {
        RngStream::from_seed(global_seed ^ tx_index)
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..n` by plain modulo.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        (self.next_u64() % n as u64) as usize
    }

    pub fn next_variant(&mut self) -> Variant {
        Variant::new((self.next_u64() % u64::from(Variant::COUNT)) as u8).expect("in range")
    }
}

pub fn seed_for_tx(global_seed: u64, tx_index: u64) -> RngStream {
    RngStream::for_tx(global_seed, tx_index)
}

/// Probability of each rarity level, indexed by [`Rarity::level`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct RarityDistribution([f64; 4]);

impl RarityDistribution {
    pub fn new(probabilities: [f64; 4]) -> Result<Self, DistributionError> {
        if let Some(&p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(DistributionError::BadProbability(p));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(DistributionError::BadSum(sum));
        }
        Ok(RarityDistribution(probabilities))
    }

    pub fn degenerate(rarity: Rarity) -> Self {
        let mut p = [0.0; 4];
        p[usize::from(rarity.level())] = 1.0;
        RarityDistribution(p)
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.0
    }

    pub fn probability(&self, rarity: Rarity) -> f64 {
        self.0[usize::from(rarity.level())]
    }

    /// CDF inversion on `u = next_u64 / 2^64`: the lowest level whose
    /// cumulative probability exceeds `u`.
    pub fn sample(&self, stream: &mut RngStream) -> Rarity {
        let u = stream.next_u64() as f64 / 18_446_744_073_709_551_616.0;
        let mut cumulative = 0.0;
        for (rarity, p) in Rarity::ALL.into_iter().zip(self.0) {
            cumulative += p;
            if cumulative > u {
                return rarity;
            }
        }
        // u rounded up to 1.0, or the cumulative sum fell short of it
        Rarity::ALL
            .into_iter()
            .rev()
            .find(|r| self.probability(*r) > 0.0)
            .expect("a valid distribution has positive mass")
    }
}

impl TryFrom<[f64; 4]> for RarityDistribution {
    type Error = DistributionError;

    fn try_from(p: [f64; 4]) -> Result<Self, Self::Error> {
        RarityDistribution::new(p)
    }
}

impl From<RarityDistribution> for [f64; 4] {
    fn from(d: RarityDistribution) -> [f64; 4] {
        d.0
    }
}

pub fn sample_rarity(dist: &RarityDistribution, stream: &mut RngStream) -> Rarity {
    dist.sample(stream)
}

/// Outcome probabilities for combining two cards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "RawCombineTable")]
pub enum CombineTable {
    /// One row per rarity level, chosen by the higher of the two inputs.
    ByMax([RarityDistribution; 4]),
    /// Full override, `rows[a][b]` for input levels `a` and `b`. Must be
    /// symmetric: input order never matters.
    ByPair([[RarityDistribution; 4]; 4]),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawCombineTable {
    ByMax([RarityDistribution; 4]),
    ByPair([[RarityDistribution; 4]; 4]),
}

impl TryFrom<RawCombineTable> for CombineTable {
    type Error = DistributionError;

    fn try_from(raw: RawCombineTable) -> Result<Self, Self::Error> {
        let table = match raw {
            RawCombineTable::ByMax(rows) => CombineTable::ByMax(rows),
            RawCombineTable::ByPair(rows) => CombineTable::ByPair(rows),
        };
        table.validate()?;
        Ok(table)
    }
}

impl CombineTable {
    pub fn validate(&self) -> Result<(), DistributionError> {
        if let CombineTable::ByPair(rows) = self {
            for a in 0..4 {
                for b in a + 1..4 {
                    if rows[a][b] != rows[b][a] {
                        return Err(DistributionError::Asymmetric(a as u8, b as u8));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn distribution(&self, a: Rarity, b: Rarity) -> RarityDistribution {
        let (a, b) = (usize::from(a.level()), usize::from(b.level()));
        match self {
            CombineTable::ByMax(rows) => rows[a.max(b)],
            CombineTable::ByPair(rows) => rows[a][b],
        }
    }
}

impl Default for CombineTable {
    fn default() -> Self {
        let row = |p| RarityDistribution::new(p).expect("default row is valid");
        CombineTable::ByMax([
            row([0.70, 0.24, 0.05, 0.01]),
            row([0.10, 0.65, 0.20, 0.05]),
            row([0.05, 0.10, 0.65, 0.20]),
            row([0.02, 0.08, 0.15, 0.75]),
        ])
    }
}

pub fn combine_distribution(a: Rarity, b: Rarity, table: &CombineTable) -> RarityDistribution {
    table.distribution(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPackSpec")]
pub struct PackSpec {
    cards_per_pack: u32,
    rarity_weights: RarityDistribution,
    catalog: Vec<TrigFunction>,
}

#[derive(Deserialize)]
struct RawPackSpec {
    cards_per_pack: u32,
    rarity_weights: RarityDistribution,
    catalog: Vec<TrigFunction>,
}

impl TryFrom<RawPackSpec> for PackSpec {
    type Error = DistributionError;

    fn try_from(raw: RawPackSpec) -> Result<Self, Self::Error> {
        PackSpec::new(raw.cards_per_pack, raw.rarity_weights, raw.catalog)
    }
}

impl PackSpec {
    pub fn new(
        cards_per_pack: u32,
        rarity_weights: RarityDistribution,
        catalog: Vec<TrigFunction>,
    ) -> Result<Self, DistributionError> {
        if cards_per_pack == 0 {
            return Err(DistributionError::EmptyPack);
        }
        if catalog.is_empty() {
            return Err(DistributionError::EmptyCatalog);
        }
        Ok(PackSpec {
            cards_per_pack,
            rarity_weights,
            catalog,
        })
    }

    pub fn cards_per_pack(&self) -> u32 {
        self.cards_per_pack
    }

    pub fn rarity_weights(&self) -> &RarityDistribution {
        &self.rarity_weights
    }

    pub fn catalog(&self) -> &[TrigFunction] {
        &self.catalog
    }
}

impl Default for PackSpec {
    fn default() -> Self {
        PackSpec {
            cards_per_pack: 5,
            rarity_weights: RarityDistribution::new([0.65, 0.22, 0.10, 0.03]).expect("valid"),
            catalog: base_catalog(),
        }
    }
}

/// One freshly rolled card, before it is minted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardDraw {
    pub function: TrigFunction,
    pub rarity: Rarity,
    pub variant: Variant,
}

/// Rolls a pack. Each card consumes three draws: rarity, function, variant.
pub fn roll_pack(spec: &PackSpec, stream: &mut RngStream) -> Vec<CardDraw> {
    (0..spec.cards_per_pack)
        .map(|_| {
            let rarity = spec.rarity_weights.sample(stream);
            let function = spec.catalog[stream.next_index(spec.catalog.len())];
            let variant = stream.next_variant();
            CardDraw {
                function,
                rarity,
                variant,
            }
        })
        .collect()
}
