//! Component codes enforced at generalized constraint nodes.
//!
//! A component code is small enough to enumerate, so both the soft MAP
//! update and the erasure recoverability test work directly on the codebook.
//! LLRs follow the convention `log(P(bit = 0) / P(bit = 1))`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Default magnitude limit applied to LLRs entering and leaving the GC update.
pub const DEFAULT_LLR_LIMIT: f64 = 30.0;

/// Largest dimension accepted for codebook enumeration (2^12 = 4096 codewords).
pub const MAX_DIMENSION: usize = 12;

/// Largest length for which the erasure profile is tabulated.
const MAX_PROFILE_LENGTH: usize = 24;

#[derive(Debug, Clone)]
pub struct ComponentCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity: BitMatrix,
    codebook: BitMatrix,
    // codeword supports as bit masks, same order as `codebook`
    words: Vec<u64>,
    // erasure_profile[e]: number of (position, pattern) pairs with `e` of the
    // other n-1 positions erased for which the position is unrecoverable
    erasure_profile: Vec<u64>,
    llr_limit: f64,
}

/// Enumerates all `2^k` codewords spanned by `generator`.
///
/// Row `i` is the codeword for message `i` read as a k-bit integer whose most
/// significant bit multiplies the first generator row.
pub fn enumerate_codebook(generator: &BitMatrix) -> Result<BitMatrix> {
    let k = generator.rows();
    if k > MAX_DIMENSION {
        return Err(Error::CodeTooLarge(k));
    }
    let rank = generator.rank();
    if rank < k {
        return Err(Error::RankDeficient { rank, rows: k });
    }
    let n = generator.cols();
    let mut book = BitMatrix::zeros(1 << k, n);
    for msg in 0..(1usize << k) {
        for r in 0..k {
            if (msg >> (k - 1 - r)) & 1 == 1 {
                for c in generator.row_support(r) {
                    book.flip(msg, c);
                }
            }
        }
    }
    Ok(book)
}

impl ComponentCode {
    pub fn from_generator(generator: BitMatrix) -> Result<Self> {
        let codebook = enumerate_codebook(&generator)?;
        let n = generator.cols();
        let k = generator.rows();
        if n > 64 {
            return Err(Error::OutOfRange(format!("component length {n} exceeds 64")));
        }
        let parity = generator.null_space_basis();
        let words: Vec<u64> = (0..codebook.rows())
            .map(|i| {
                codebook
                    .row_support(i)
                    .iter()
                    .fold(0u64, |acc, &c| acc | (1 << c))
            })
            .collect();
        let union = words.iter().fold(0u64, |a, &w| a | w);
        if let Some(j) = (0..n).find(|&j| union >> j & 1 == 0) {
            return Err(Error::OutOfRange(format!(
                "coordinate {j} is zero in every codeword"
            )));
        }
        let mut code = ComponentCode {
            n,
            k,
            generator,
            parity,
            codebook,
            words,
            erasure_profile: Vec::new(),
            llr_limit: DEFAULT_LLR_LIMIT,
        };
        if n <= MAX_PROFILE_LENGTH {
            code.erasure_profile = code.tabulate_erasure_profile();
        }
        Ok(code)
    }

    /// The rate-1/2 shortened (6,3) Hamming code.
    pub fn hamming_6_3() -> Self {
        let g = BitMatrix::from_strs(&["100110", "010101", "001011"]).expect("static generator");
        Self::from_generator(g).expect("static generator is valid")
    }

    /// Parses a generator matrix written as rows of `0`/`1` characters.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_generator_text(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if rows.is_empty() {
            return Err(Error::parse(1, "empty generator matrix"));
        }
        Self::from_generator(BitMatrix::from_strs(&rows)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_generator_text(&std::fs::read_to_string(path)?)
    }

    pub fn to_generator_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.generator.rows() {
            s.extend(self.generator.row(r).iter().map(|&b| if b == 1 { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    pub fn with_llr_limit(mut self, limit: f64) -> Self {
        assert!(limit > 0.0, "llr limit must be positive");
        self.llr_limit = limit;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    pub fn codebook(&self) -> &BitMatrix {
        &self.codebook
    }

    pub fn llr_limit(&self) -> f64 {
        self.llr_limit
    }

    /// Codeword supports as bit masks (bit `m` set when position `m` is one).
    pub fn codeword_masks(&self) -> &[u64] {
        &self.words
    }

    pub fn is_codeword_mask(&self, word: u64) -> bool {
        self.words.contains(&word)
    }

    /// Extrinsic MAP LLR for position `j` (0-based).
    pub fn map_extrinsic_llr(&self, llr_in: &[f64], j: usize) -> f64 {
        assert!(j < self.n, "position {j} out of range");
        let mut out = vec![0.0; self.n];
        let mut scratch = Vec::new();
        self.map_extrinsic_into(llr_in, &mut out, &mut scratch);
        out[j]
    }

    /// Extrinsic MAP LLRs for every position at once.
    ///
    /// Each codeword is weighted by `exp(Σ_{m≠j, c_m=0} Λ_m)`; the output is
    /// the log ratio of the weight sums over codewords with `c_j = 0` and
    /// `c_j = 1`, each evaluated with its own max subtracted.
    pub fn map_extrinsic_into(&self, llr_in: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        assert_eq!(llr_in.len(), self.n);
        assert_eq!(out.len(), self.n);
        let lim = self.llr_limit;
        let mut lam = [0.0f64; 64];
        for (l, &x) in lam.iter_mut().zip(llr_in) {
            *l = clamp(x, lim);
        }
        for (j, o) in out.iter_mut().enumerate() {
            scratch.clear();
            scratch.extend(self.words.iter().map(|&w| {
                let mut s = 0.0;
                for (m, l) in lam.iter().enumerate().take(self.n) {
                    if m != j && w >> m & 1 == 0 {
                        s += l;
                    }
                }
                s
            }));
            let (mut max0, mut max1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for (&w, &s) in self.words.iter().zip(scratch.iter()) {
                if w >> j & 1 == 0 {
                    max0 = max0.max(s);
                } else {
                    max1 = max1.max(s);
                }
            }
            let (mut sum0, mut sum1) = (0.0, 0.0);
            for (&w, &s) in self.words.iter().zip(scratch.iter()) {
                if w >> j & 1 == 0 {
                    sum0 += (s - max0).exp();
                } else {
                    sum1 += (s - max1).exp();
                }
            }
            *o = clamp(max0 + sum0.ln() - max1 - sum1.ln(), lim);
        }
    }

    /// True when position `j` is determined by the positions in `known`,
    /// i.e. no codeword with a one at `j` avoids every known position.
    /// A position that is itself known is trivially determined.
    pub fn erasure_recoverable(&self, known: &[usize], j: usize) -> bool {
        let mask = known.iter().fold(0u64, |acc, &p| acc | (1 << p));
        self.recoverable_mask(mask, j)
    }

    /// Bit-mask form of [`Self::erasure_recoverable`].
    #[inline]
    pub fn recoverable_mask(&self, known: u64, j: usize) -> bool {
        if known >> j & 1 == 1 {
            return true;
        }
        !self
            .words
            .iter()
            .any(|&w| w >> j & 1 == 1 && w & known == 0)
    }

    fn tabulate_erasure_profile(&self) -> Vec<u64> {
        let n = self.n;
        let mut profile = vec![0u64; n];
        let full = (1u64 << n) - 1;
        for j in 0..n {
            for erased in 0..(1u64 << n) {
                if erased >> j & 1 == 1 {
                    continue;
                }
                let known = full & !erased & !(1 << j);
                if !self.recoverable_mask(known, j) {
                    profile[erased.count_ones() as usize] += 1;
                }
            }
        }
        profile
    }

    /// Unrecoverable-pattern counts indexed by the number of erased
    /// neighbours, summed over positions. Empty for codes longer than 24.
    pub fn erasure_profile(&self) -> &[u64] {
        &self.erasure_profile
    }

    /// Probability that a uniformly chosen position cannot be recovered when
    /// each of the other `n - 1` positions is erased independently with
    /// probability `x`.
    pub fn exit_erasure(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(format!("erasure probability {x}")));
        }
        if self.erasure_profile.is_empty() {
            return Err(Error::CodeTooLarge(self.n));
        }
        let others = self.n - 1;
        let total: f64 = self
            .erasure_profile
            .iter()
            .enumerate()
            .map(|(e, &count)| count as f64 * x.powi(e as i32) * (1.0 - x).powi((others - e) as i32))
            .sum();
        Ok(total / self.n as f64)
    }
}

#[inline]
pub(crate) fn clamp(x: f64, lim: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(-lim, lim)
    }
}
