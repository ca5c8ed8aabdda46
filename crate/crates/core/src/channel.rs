//! QPSK over AWGN and the binary erasure channel.
//!
//! Gray-mapped QPSK is two independent BPSK dimensions of amplitude `1/√2`,
//! bit 0 mapping to `+`. Per-bit LLRs are `2·A·y/σ²` with `A = 1/√2`, so a
//! positive LLR favours bit 0.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Name of the generator used for every random draw, recorded in outputs.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), SplitMix64-derived per-trial seeds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    EbN0,
    EsN0,
}

impl std::str::FromStr for SnrConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ebn0" | "eb/n0" => Ok(SnrConvention::EbN0),
            "esn0" | "es/n0" => Ok(SnrConvention::EsN0),
            _ => Err(Error::Config(format!("unknown SNR convention {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    /// QPSK over AWGN with noise standard deviation `sigma` per real dimension.
    AwgnQpsk { sigma: f64 },
    /// Erasure channel with erasure probability `epsilon`.
    Bec { epsilon: f64 },
}

impl ChannelSpec {
    pub fn awgn(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::OutOfRange(format!("sigma = {sigma}")));
        }
        Ok(ChannelSpec::AwgnQpsk { sigma })
    }

    pub fn bec(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::OutOfRange(format!("epsilon = {epsilon}")));
        }
        Ok(ChannelSpec::Bec { epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symbol {
    pub i: f64,
    pub q: f64,
}

impl Symbol {
    pub fn energy(&self) -> f64 {
        self.i * self.i + self.q * self.q
    }
}

#[inline]
fn amplitude(bit: u8) -> f64 {
    if bit & 1 == 0 {
        FRAC_1_SQRT_2
    } else {
        -FRAC_1_SQRT_2
    }
}

/// Maps bit pairs onto unit-energy QPSK symbols. An odd-length input is
/// padded with a zero bit; the flag reports whether that happened.
pub fn modulate_qpsk(bits: &[u8]) -> (Vec<Symbol>, bool) {
    let padded = bits.len() % 2 == 1;
    let symbols = bits
        .chunks(2)
        .map(|pair| Symbol {
            i: amplitude(pair[0]),
            q: amplitude(pair.get(1).copied().unwrap_or(0)),
        })
        .collect();
    (symbols, padded)
}

/// Adds Gaussian noise to each real dimension and returns two LLRs per
/// symbol (in-phase bit first).
pub fn awgn_llr(symbols: &[Symbol], sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    let scale = 2.0 * FRAC_1_SQRT_2 / (sigma * sigma);
    let mut out = Vec::with_capacity(2 * symbols.len());
    for s in symbols {
        let ni: f64 = rng.sample(StandardNormal);
        let nq: f64 = rng.sample(StandardNormal);
        out.push(scale * (s.i + sigma * ni));
        out.push(scale * (s.q + sigma * nq));
    }
    out
}

/// Modulates, transmits and demaps a codeword, trimming any padding.
pub fn transmit_awgn(bits: &[u8], sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    let (symbols, _) = modulate_qpsk(bits);
    let mut llr = awgn_llr(&symbols, sigma, rng);
    llr.truncate(bits.len());
    llr
}

/// Noise standard deviation per real dimension for a unit-energy symbol.
pub fn snr_to_sigma(snr_db: f64, convention: SnrConvention, rate: f64, bits_per_symbol: usize) -> Result<f64> {
    let lin = 10f64.powf(snr_db / 10.0);
    let var = match convention {
        SnrConvention::EsN0 => 1.0 / (2.0 * lin),
        SnrConvention::EbN0 => {
            if !(rate > 0.0) {
                return Err(Error::OutOfRange(format!("rate = {rate}")));
            }
            1.0 / (2.0 * rate * bits_per_symbol as f64 * lin)
        }
    };
    Ok(var.sqrt())
}

pub fn sigma_to_snr(sigma: f64, convention: SnrConvention, rate: f64, bits_per_symbol: usize) -> f64 {
    let var = sigma * sigma;
    let lin = match convention {
        SnrConvention::EsN0 => 1.0 / (2.0 * var),
        SnrConvention::EbN0 => 1.0 / (2.0 * rate * bits_per_symbol as f64 * var),
    };
    10.0 * lin.log10()
}

/// Erases each bit independently with probability `epsilon`.
pub fn bec_erase(bits: &[u8], epsilon: f64, rng: &mut impl Rng) -> Vec<Option<u8>> {
    bits.iter()
        .map(|&b| (!rng.random_bool(epsilon)).then_some(b & 1))
        .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of grid point `point` under `master`.
pub fn derive_seed(master: u64, point: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ point) ^ trial)
}

pub fn trial_rng(master: u64, point: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, point, trial))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpsk_mapping() {
        let (s, padded) = modulate_qpsk(&[0, 0, 1, 1, 0, 1, 1, 0]);
        assert!(!padded);
        assert_eq!(s[0], Symbol { i: FRAC_1_SQRT_2, q: FRAC_1_SQRT_2 });
        assert_eq!(s[1], Symbol { i: -FRAC_1_SQRT_2, q: -FRAC_1_SQRT_2 });
        assert_eq!(s[2], Symbol { i: FRAC_1_SQRT_2, q: -FRAC_1_SQRT_2 });
        for sym in &s {
            assert!((sym.energy() - 1.0).abs() < 1e-15);
        }
        let (s, padded) = modulate_qpsk(&[1]);
        assert!(padded);
        assert_eq!(s, vec![Symbol { i: -FRAC_1_SQRT_2, q: FRAC_1_SQRT_2 }]);
    }

    #[test]
    fn noiseless_llr_value_and_sign() {
        // sigma scales only the noise; a tiny sigma shows the mean LLR clearly
        let sigma = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let llr = transmit_awgn(&[0, 1], sigma, &mut rng);
        assert!(llr[0] > 0.0 && llr[1] < 0.0);
        let expected = 1.0 / (sigma * sigma);
        assert!((llr[0] / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn llr_is_consistent_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let bits = vec![0u8; 1_000_000];
        let llr = transmit_awgn(&bits, 1.0, &mut rng);
        let n = llr.len() as f64;
        let mean = llr.iter().sum::<f64>() / n;
        let var = llr.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
        assert!((var - 2.0 * mean).abs() < 0.03, "var {var} mean {mean}");
    }

    #[test]
    fn snr_conventions() {
        let s = snr_to_sigma(0.0, SnrConvention::EsN0, 1.0, 2).unwrap();
        assert!((s * s - 0.5).abs() < 1e-15);
        let s = snr_to_sigma(0.0, SnrConvention::EbN0, 1.0 / 12.0, 2).unwrap();
        assert!((s * s - 3.0).abs() < 1e-12);
        for snr in [-3.0, 0.0, 1.7, 6.0] {
            for conv in [SnrConvention::EbN0, SnrConvention::EsN0] {
                let s = snr_to_sigma(snr, conv, 0.0823, 2).unwrap();
                let back = snr_to_sigma(sigma_to_snr(s, conv, 0.0823, 2), conv, 0.0823, 2).unwrap();
                assert!((s - back).abs() < 1e-12);
            }
        }
        assert!(snr_to_sigma(1.0, SnrConvention::EbN0, 0.0, 2).is_err());
    }

    #[test]
    fn erasure_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bits: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        let out = bec_erase(&bits, 0.0, &mut rng);
        assert!(out.iter().zip(&bits).all(|(o, &b)| *o == Some(b)));
        assert!(bec_erase(&bits, 1.0, &mut rng).iter().all(Option::is_none));

        let n = 1_000_000;
        let out = bec_erase(&vec![0u8; n], 0.3, &mut rng);
        let erased = out.iter().filter(|x| x.is_none()).count() as f64;
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((erased - 0.3 * n as f64).abs() < 3.0 * sd);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<f64> = transmit_awgn(&[0; 10], 1.0, &mut trial_rng(5, 1, 2));
        let b: Vec<f64> = transmit_awgn(&[0; 10], 1.0, &mut trial_rng(5, 1, 2));
        let c: Vec<f64> = transmit_awgn(&[0; 10], 1.0, &mut trial_rng(5, 2, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, 0, 0), derive_seed(0, 1, 0));
    }
}
