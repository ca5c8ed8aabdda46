//! Quasi-cyclic lifting of an all-ones J×K base matrix.
//!
//! Block `(i, j)` of the lifted matrix is the `s×s` identity with every row
//! circularly shifted by `shift[i][j]`: row `r` of the block has its one in
//! column `(r + shift) mod s`. Row 0 and column 0 shifts are zero.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycles::girth_of;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Girth ceiling for QC lifts of an all-ones base with J ≥ 2, K ≥ 3.
pub const MAX_QC_GIRTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QcProfile {
    j: usize,
    k: usize,
    lift: usize,
    shifts: Vec<Vec<usize>>,
}

impl QcProfile {
    pub fn new(lift: usize, shifts: Vec<Vec<usize>>) -> Result<Self> {
        let j = shifts.len();
        if j == 0 || lift == 0 {
            return Err(Error::InvalidProfile("empty profile".into()));
        }
        let k = shifts[0].len();
        if k == 0 || shifts.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidProfile("ragged shift rows".into()));
        }
        if shifts.iter().flatten().any(|&x| x >= lift) {
            return Err(Error::InvalidProfile(format!("shift outside [0, {lift})")));
        }
        if shifts[0].iter().any(|&x| x != 0) || shifts.iter().any(|r| r[0] != 0) {
            return Err(Error::InvalidProfile(
                "row 0 and column 0 shifts must be zero".into(),
            ));
        }
        Ok(QcProfile { j, k, lift, shifts })
    }

    /// Two-row profile with `row1` as the shifts of columns 1..K.
    pub fn two_row(lift: usize, row1: &[usize]) -> Result<Self> {
        let k = row1.len() + 1;
        let mut second = vec![0];
        second.extend_from_slice(row1);
        Self::new(lift, vec![vec![0; k], second])
    }

    /// Random profile whose non-zero rows hold distinct non-zero shifts.
    pub fn random_row_distinct(lift: usize, j: usize, k: usize, rng: &mut impl Rng) -> Result<Self> {
        if k > lift {
            return Err(Error::InvalidProfile("more columns than shift values".into()));
        }
        let mut shifts = vec![vec![0; k]];
        for _ in 1..j {
            let mut row = vec![0];
            row.extend(sample(rng, lift - 1, k - 1).into_iter().map(|x| x + 1));
            shifts.push(row);
        }
        Self::new(lift, shifts)
    }

    pub fn base_rows(&self) -> usize {
        self.j
    }

    pub fn base_cols(&self) -> usize {
        self.k
    }

    pub fn lift(&self) -> usize {
        self.lift
    }

    pub fn shift(&self, i: usize, j: usize) -> usize {
        self.shifts[i][j]
    }

    pub fn shifts(&self) -> &[Vec<usize>] {
        &self.shifts
    }

    pub fn block_length(&self) -> usize {
        self.k * self.lift
    }

    /// Expands to the `(J·s) × (K·s)` parity-check matrix.
    pub fn expand(&self) -> BitMatrix {
        let s = self.lift;
        let mut h = BitMatrix::zeros(self.j * s, self.k * s);
        for (bi, row) in self.shifts.iter().enumerate() {
            for (bj, &shift) in row.iter().enumerate() {
                for r in 0..s {
                    h.set(bi * s + r, bj * s + (r + shift) % s, true);
                }
            }
        }
        h
    }

    /// Plain-text form: `J K s` followed by J lines of K shifts.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.j, self.k, self.lift);
        for row in &self.shifts {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let dims = parse_numbers(ln, header)?;
        let [j, k, lift] = dims[..] else {
            return Err(Error::parse(ln, "header must be `J K s`"));
        };
        let mut shifts = Vec::with_capacity(j);
        for _ in 0..j {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, "missing shift row"))?;
            let row = parse_numbers(ln, l)?;
            if row.len() != k {
                return Err(Error::parse(ln, format!("expected {k} shifts")));
            }
            shifts.push(row);
        }
        Self::new(lift, shifts)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(line, format!("bad integer {t:?}")))
        })
        .collect()
}

/// Checks the algebraic girth condition: every closed, non-backtracking walk
/// of length `2m` (`2 ≤ m < target/2`) through the base matrix must have a
/// non-zero alternating shift sum modulo `s`.
///
/// A walk alternates rows and columns, `j₀ k₀ j₁ k₁ … j_{m-1} k_{m-1} j₀`,
/// with `j_t ≠ j_{t+1}` and `k_t ≠ k_{t+1}` cyclically; its sum is
/// `Σ (shift[j_t][k_t] − shift[j_{t+1}][k_t])`.
pub fn girth_condition_holds(profile: &QcProfile, target_girth: usize) -> bool {
    assert!(
        target_girth >= 4 && target_girth % 2 == 0,
        "target girth must be even and at least 4"
    );
    let max_m = target_girth / 2 - 1;
    if max_m < 2 {
        return true;
    }
    let walker = Walker {
        p: profile,
        max_m,
    };
    (0..profile.j).all(|j0| (0..profile.k).all(|k0| walker.clean_from(j0, k0)))
}

struct Walker<'a> {
    p: &'a QcProfile,
    max_m: usize,
}

impl Walker<'_> {
    // Walks starting with row j0 and first column k0.
    fn clean_from(&self, j0: usize, k0: usize) -> bool {
        (0..self.p.j)
            .filter(|&j1| j1 != j0)
            .all(|j1| {
                let sum = self.delta(j0, j1, k0);
                self.extend(j0, k0, j1, k0, sum, 1)
            })
    }

    // `rows_done` row transitions made; currently at row `j`, arrived via column `k_prev`.
    fn extend(&self, j0: usize, k0: usize, j: usize, k_prev: usize, sum: i64, rows_done: usize) -> bool {
        let s = self.p.lift as i64;
        for k in (0..self.p.k).filter(|&k| k != k_prev) {
            for jn in (0..self.p.j).filter(|&jn| jn != j) {
                let total = sum + self.delta(j, jn, k);
                let m = rows_done + 1;
                if jn == j0 && k != k0 && m >= 2 && total.rem_euclid(s) == 0 {
                    return false;
                }
                if m < self.max_m && !self.extend(j0, k0, jn, k, total, m) {
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    fn delta(&self, from: usize, to: usize, k: usize) -> i64 {
        self.p.shifts[from][k] as i64 - self.p.shifts[to][k] as i64
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Power-construction shifts `a·b^j mod s` for `j = 1..K-1`.
pub fn power_shifts(a: u64, b: u64, s: u64, k: usize) -> Result<Vec<usize>> {
    if !is_prime(s) {
        return Err(Error::NotPrime(s));
    }
    if a % s == 0 || b % s == 0 {
        return Err(Error::OutOfRange("power construction needs non-zero a and b".into()));
    }
    Ok((1..k as u64)
        .map(|j| (a % s * pow_mod(b, j, s) % s) as usize)
        .collect())
}

/// Power construction for every row: `shift[i][j] = a^i b^j mod s`.
pub fn power_profile(a: u64, b: u64, s: u64, j: usize, k: usize) -> Result<QcProfile> {
    if !is_prime(s) {
        return Err(Error::NotPrime(s));
    }
    if a % s == 0 || b % s == 0 {
        return Err(Error::OutOfRange("power construction needs non-zero a and b".into()));
    }
    let shifts = (0..j as u64)
        .map(|i| {
            (0..k as u64)
                .map(|c| {
                    if i == 0 || c == 0 {
                        0
                    } else {
                        (pow_mod(a, i, s) * pow_mod(b, c, s) % s) as usize
                    }
                })
                .collect()
        })
        .collect();
    QcProfile::new(s as usize, shifts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Iterate distinct non-zero pairs `(a, b)` in lexicographic order.
    PowerSweep,
    /// Uniform random shifts from a seeded generator.
    Random { seed: u64, max_tries: usize },
    /// Depth-first enumeration of the second row (J = 2 only), pruned by
    /// the girth condition on each column prefix.
    ExhaustiveRow,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub profile: QcProfile,
    /// Girth of the expanded matrix measured by cycle search.
    pub girth: usize,
    pub candidates_tried: usize,
    /// `(a, b)` when found by the power sweep.
    pub power_pair: Option<(u64, u64)>,
}

/// Largest girth a lift of the all-ones `j × k` base can reach.
pub fn girth_limit(j: usize, k: usize) -> usize {
    if j == 2 {
        (2 * k).min(MAX_QC_GIRTH)
    } else if j >= 2 && k >= 3 {
        MAX_QC_GIRTH
    } else {
        usize::MAX
    }
}

/// Finds a profile whose expanded graph has girth at least `target_girth`.
///
/// The algebraic condition filters candidates; the winner is always
/// confirmed by [`girth_of`] on the expanded matrix.
pub fn search_shifts(
    s: usize,
    j: usize,
    k: usize,
    target_girth: usize,
    strategy: SearchStrategy,
) -> Result<SearchOutcome> {
    let limit = girth_limit(j, k);
    if target_girth > limit {
        return Err(Error::GirthUnreachable {
            target: target_girth,
            limit,
        });
    }
    if target_girth < 4 || target_girth % 2 == 1 {
        return Err(Error::OutOfRange(format!("target girth {target_girth}")));
    }
    let mut tried = 0;
    let verify = |p: QcProfile, pair: Option<(u64, u64)>, tried: usize| -> Option<SearchOutcome> {
        if !girth_condition_holds(&p, target_girth) {
            return None;
        }
        let girth = girth_of(&p.expand());
        (girth >= target_girth).then_some(SearchOutcome {
            profile: p,
            girth,
            candidates_tried: tried,
            power_pair: pair,
        })
    };
    match strategy {
        SearchStrategy::PowerSweep => {
            let sp = s as u64;
            if !is_prime(sp) {
                return Err(Error::NotPrime(sp));
            }
            for a in 1..sp {
                for b in (1..sp).filter(|&b| b != a) {
                    tried += 1;
                    let p = power_profile(a, b, sp, j, k)?;
                    if let Some(out) = verify(p, Some((a, b)), tried) {
                        return Ok(out);
                    }
                }
            }
        }
        SearchStrategy::Random { seed, max_tries } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..max_tries {
                tried += 1;
                let mut shifts = vec![vec![0; k]; j];
                for row in shifts.iter_mut().skip(1) {
                    for x in row.iter_mut().skip(1) {
                        *x = rng.random_range(0..s);
                    }
                }
                if let Some(out) = verify(QcProfile::new(s, shifts)?, None, tried) {
                    return Ok(out);
                }
            }
        }
        SearchStrategy::ExhaustiveRow => {
            if j != 2 {
                return Err(Error::InvalidProfile("exhaustive-row search needs J = 2".into()));
            }
            let mut row = vec![0usize];
            if let Some(p) = exhaustive_extend(s, k, target_girth, &mut row, &mut tried)? {
                if let Some(out) = verify(p, None, tried) {
                    return Ok(out);
                }
            }
        }
    }
    Err(Error::SearchExhausted(target_girth))
}

fn exhaustive_extend(
    s: usize,
    k: usize,
    target: usize,
    row: &mut Vec<usize>,
    tried: &mut usize,
) -> Result<Option<QcProfile>> {
    if row.len() == k {
        return Ok(Some(QcProfile::two_row(s, &row[1..])?));
    }
    for x in 0..s {
        row.push(x);
        *tried += 1;
        let prefix = QcProfile::two_row(s, &row[1..])?;
        if girth_condition_holds(&prefix, target) {
            if let Some(p) = exhaustive_extend(s, k, target, row, tried)? {
                return Ok(Some(p));
            }
        }
        row.pop();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_identity_blocks() {
        let p = QcProfile::new(3, vec![vec![0, 0], vec![0, 0]]).unwrap();
        let h = p.expand();
        assert_eq!((h.rows(), h.cols()), (6, 6));
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(h.get(r, c), r % 3 == c % 3);
            }
        }
    }

    #[test]
    fn single_shift_block() {
        let p = QcProfile::new(3, vec![vec![0, 0], vec![0, 1]]).unwrap();
        let h = p.expand();
        let block: Vec<Vec<u8>> = (3..6).map(|r| h.row(r)[3..6].to_vec()).collect();
        assert_eq!(block, vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
    }

    #[test]
    fn expand_two_by_six_at_83() {
        let p = QcProfile::two_row(83, &[6, 18, 54, 79, 71]).unwrap();
        let h = p.expand();
        assert_eq!((h.rows(), h.cols()), (166, 498));
        assert!((0..166).all(|r| h.row_weight(r) == 6));
        assert!((0..498).all(|c| h.col_weight(c) == 2));
    }

    #[test]
    fn profile_validation() {
        assert!(QcProfile::new(5, vec![vec![0, 1], vec![0, 2]]).is_err());
        assert!(QcProfile::new(5, vec![vec![0, 0], vec![1, 2]]).is_err());
        assert!(QcProfile::new(5, vec![vec![0, 0], vec![0, 5]]).is_err());
    }

    #[test]
    fn power_shift_examples() {
        assert_eq!(power_shifts(1, 1, 83, 6).unwrap(), vec![1; 5]);
        assert_eq!(power_shifts(2, 3, 83, 6).unwrap(), vec![6, 18, 54, 79, 71]);
        assert_eq!(power_shifts(2, 3, 7, 3).unwrap(), vec![6, 4]);
        assert!(matches!(power_shifts(2, 3, 84, 6), Err(Error::NotPrime(84))));
        assert!(power_shifts(0, 3, 83, 6).is_err());
        assert!(power_shifts(2, 83, 83, 6).is_err());
    }

    #[test]
    fn two_row_condition_for_girth_six() {
        let distinct = QcProfile::two_row(13, &[1, 4, 9, 3, 12]).unwrap();
        assert!(girth_condition_holds(&distinct, 6));
        let repeated = QcProfile::two_row(13, &[1, 4, 4, 3, 12]).unwrap();
        assert!(!girth_condition_holds(&repeated, 6));
        // a repeated zero against column 0
        let zero = QcProfile::two_row(13, &[0, 4, 5, 3, 12]).unwrap();
        assert!(!girth_condition_holds(&zero, 6));
    }

    #[test]
    fn search_rejects_unreachable_targets() {
        assert!(matches!(
            search_shifts(83, 2, 6, 14, SearchStrategy::PowerSweep),
            Err(Error::GirthUnreachable { target: 14, limit: 12 })
        ));
    }

    #[test]
    fn random_search_target_six_succeeds_immediately() {
        let out = search_shifts(
            83,
            2,
            6,
            6,
            SearchStrategy::Random {
                seed: 1,
                max_tries: 10,
            },
        )
        .unwrap();
        assert!(out.girth >= 6);
        assert!(out.candidates_tried <= 3);
    }

    #[test]
    fn exhaustive_row_search_small() {
        let out = search_shifts(13, 2, 4, 8, SearchStrategy::ExhaustiveRow).unwrap();
        assert!(out.girth >= 8);
    }

    #[test]
    fn text_round_trip() {
        let p = QcProfile::two_row(83, &[6, 18, 54, 79, 71]).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("2 6 83\n0 0 0 0 0 0\n"));
        assert_eq!(QcProfile::from_text(&text).unwrap(), p);
        assert!(QcProfile::from_text("2 6 83\n0 0 0 0 0 0\n").is_err());
        assert!(QcProfile::from_text("2 2\n").is_err());
    }
}
