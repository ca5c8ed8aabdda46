//! Outer hard-decision code model and the concatenated transmission chain.
//!
//! The outer code is modelled as a genie-aided bounded-distance decoder: a
//! block is recovered iff the inner decoder leaves at most `t` errors in the
//! information bits it hands over. Miscorrection is not modelled.

use rand::Rng;

use crate::channel::{bec_erase, transmit_awgn, trial_rng, ChannelSpec};
use crate::decoder::BpDecoder;
use crate::error::{Error, Result};
use crate::graph::GldpcCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OuterCodeModel {
    pub n_out: usize,
    pub k_out: usize,
    pub t: usize,
}

impl OuterCodeModel {
    pub fn new(n_out: usize, k_out: usize, t: usize) -> Result<Self> {
        if k_out == 0 || k_out >= n_out || t > n_out {
            return Err(Error::OutOfRange(format!(
                "outer code ({n_out}, {k_out}) with t = {t}"
            )));
        }
        Ok(OuterCodeModel { n_out, k_out, t })
    }

    /// Shortens the frame to `info_len` bits when the inner code carries
    /// fewer than `n_out`, keeping `k/n` and rounding the dimension down.
    pub fn shortened_to(&self, info_len: usize) -> Self {
        if info_len >= self.n_out {
            return *self;
        }
        OuterCodeModel {
            n_out: info_len,
            k_out: info_len * self.k_out / self.n_out,
            t: self.t.min(info_len),
        }
    }

    pub fn rate(&self) -> f64 {
        self.k_out as f64 / self.n_out as f64
    }
}

/// `true` iff `decoded` is within Hamming distance `t` of `truth`.
pub fn outer_decode_model(decoded: &[u8], truth: &[u8], t: usize) -> bool {
    assert_eq!(decoded.len(), truth.len(), "outer frame lengths differ");
    decoded.iter().zip(truth).filter(|(a, b)| a != b).count() <= t
}

pub fn overall_rate(inner_actual_rate: f64, n_out: usize, k_out: usize) -> f64 {
    inner_actual_rate * k_out as f64 / n_out as f64
}

/// Inner code plus optional outer model. Without an outer model a block
/// fails on any information-bit error.
#[derive(Clone, Copy)]
pub struct ConcatenatedSystem<'a> {
    pub code: &'a GldpcCode,
    pub outer: Option<OuterCodeModel>,
    pub i_max: usize,
}

impl<'a> ConcatenatedSystem<'a> {
    pub fn new(code: &'a GldpcCode, outer: Option<OuterCodeModel>, i_max: usize) -> Self {
        let outer = outer.map(|o| o.shortened_to(code.k()));
        ConcatenatedSystem { code, outer, i_max }
    }

    /// Information bits per channel use after both codes.
    pub fn rate(&self) -> f64 {
        match self.outer {
            Some(o) => overall_rate(self.code.rate(), o.n_out, o.k_out),
            None => self.code.rate(),
        }
    }

    pub fn radius(&self) -> usize {
        self.outer.map_or(0, |o| o.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialVerdict {
    pub success: bool,
    /// Codeword positions decoded wrongly or left erased.
    pub inner_bit_errors: usize,
    /// Information bits decoded wrongly or left erased.
    pub info_bit_errors: usize,
    pub iterations_used: usize,
}

/// One seeded transmission: random information, inner encoding, channel,
/// BP decoding, then the outer model on the information block.
pub fn run_concatenated_trial(
    system: &ConcatenatedSystem<'_>,
    decoder: &mut BpDecoder<'_>,
    channel: ChannelSpec,
    seed: (u64, u64, u64),
) -> TrialVerdict {
    let code = system.code;
    let mut rng = trial_rng(seed.0, seed.1, seed.2);
    let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
    let cw = code.encoder.encode(&info).expect("info length matches encoder");
    let (decoded, iterations) = match channel {
        ChannelSpec::AwgnQpsk { sigma } => {
            let llr = transmit_awgn(&cw, sigma, &mut rng);
            let out = decoder.decode(&llr, system.i_max);
            let bits: Vec<Option<u8>> = out.hard_bits.into_iter().map(Some).collect();
            (bits, out.iterations_used)
        }
        ChannelSpec::Bec { epsilon } => {
            let rx = bec_erase(&cw, epsilon, &mut rng);
            let out = decoder.decode_bec(&rx, system.i_max);
            (out.bits, out.iterations_used)
        }
    };
    let inner_bit_errors = decoded.iter().zip(&cw).filter(|(d, &c)| **d != Some(c)).count();
    // an erased bit is handed to the outer decoder as a wrong bit
    let decoded_info: Vec<u8> = code
        .encoder
        .info_positions()
        .iter()
        .zip(&info)
        .map(|(&p, &b)| decoded[p].unwrap_or(b ^ 1))
        .collect();
    let info_bit_errors = decoded_info.iter().zip(&info).filter(|(a, b)| a != b).count();
    TrialVerdict {
        success: outer_decode_model(&decoded_info, &info, system.radius()),
        inner_bit_errors,
        info_bit_errors,
        iterations_used: iterations,
    }
}
