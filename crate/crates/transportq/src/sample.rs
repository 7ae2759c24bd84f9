//! Multinomial sampling of statevectors in the computational basis.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::statevector::Statevector;

/// Measurement outcomes as counts per bitstring. Counts sum to `shots`;
/// iteration order is basis-index order, so serialization is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    pub n: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl SampleSet {
    pub fn iter(&self) -> impl Iterator<Item = (Bits, u64)> + '_ {
        self.counts.iter().map(|(&raw, &c)| (Bits::new(raw, self.n), c))
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// JSON form keyed by canonical bitstrings.
#[derive(Serialize, Deserialize)]
struct SampleSetJson {
    n: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl Serialize for SampleSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SampleSetJson {
            n: self.n,
            shots: self.shots,
            counts: self.iter().map(|(b, c)| (b.to_string(), c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SampleSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = SampleSetJson::deserialize(d)?;
        let mut counts = BTreeMap::new();
        for (k, v) in dto.counts {
            let bits = Bits::parse(&k, dto.n).map_err(serde::de::Error::custom)?;
            counts.insert(bits.value, v);
        }
        Ok(SampleSet { n: dto.n, shots: dto.shots, counts })
    }
}

/// Derives an independent seed for a named stream from a base seed.
/// Deterministic across platforms: FNV-1a over the tag, finalized with a
/// splitmix64 round.
pub fn derive_seed(base: u64, stream: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in stream.as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws `shots` outcomes from `|amp|^2` with a seeded generator. The draw
/// is a deterministic function of (state, shots, seed).
pub fn sample(sv: &Statevector, shots: u64, seed: u64) -> SampleSet {
    let mut cumulative = Vec::with_capacity(sv.dim());
    let mut acc = 0.0;
    for a in sv.amps() {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = match cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
        .min(sv.dim() - 1);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    SampleSet { n: sv.n(), shots, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_to_shots() {
        let sv = Statevector::plus_state(3).unwrap();
        let s = sample(&sv, 1000, 5);
        assert_eq!(s.counts.values().sum::<u64>(), 1000);
    }

    #[test]
    fn basis_state_samples_one_outcome() {
        let sv = Statevector::basis_state(4, 9).unwrap();
        let s = sample(&sv, 500, 1);
        assert_eq!(s.counts.len(), 1);
        assert_eq!(s.counts[&9], 500);
    }

    #[test]
    fn single_qubit_frequencies_within_five_sigma() {
        let sv = Statevector::plus_state(1).unwrap();
        let s = sample(&sv, 10_000, 123);
        let sigma = (0.25f64 / 10_000.0).sqrt();
        for raw in 0..2u64 {
            let freq = *s.counts.get(&raw).unwrap_or(&0) as f64 / 10_000.0;
            assert!((freq - 0.5).abs() < 5.0 * sigma, "outcome {raw}: {freq}");
        }
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let mut sv = Statevector::plus_state(4).unwrap();
        sv.rx(0.7, 2);
        sv.rzz(0.3, 0, 3);
        assert_eq!(sample(&sv, 2000, 42), sample(&sv, 2000, 42));
        assert_ne!(sample(&sv, 2000, 42), sample(&sv, 2000, 43));
    }

    #[test]
    fn json_roundtrip_uses_bitstring_keys() {
        let sv = Statevector::basis_state(3, 4).unwrap();
        let s = sample(&sv, 10, 0);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"001\""), "{json}");
        let back: SampleSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
