//! GLDPC Tanner graphs: GC node placement, full parity-check expansion and
//! systematic encoding.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::component::ComponentCode;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Spc,
    Gc,
}

/// Bipartite graph of a parity-check matrix. Each check keeps its variables
/// in ascending order; for GC nodes that order is what a position map acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n_vars: usize,
    check_vars: Vec<Vec<usize>>,
    var_checks: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn from_parity(h: &BitMatrix) -> Self {
        let check_vars: Vec<Vec<usize>> = (0..h.rows()).map(|r| h.row_support(r)).collect();
        let mut var_checks = vec![Vec::new(); h.cols()];
        for (c, vars) in check_vars.iter().enumerate() {
            for &v in vars {
                var_checks[v].push(c);
            }
        }
        TannerGraph {
            n_vars: h.cols(),
            check_vars,
            var_checks,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_vars.len()
    }

    pub fn n_edges(&self) -> usize {
        self.check_vars.iter().map(Vec::len).sum()
    }

    pub fn check_vars(&self, c: usize) -> &[usize] {
        &self.check_vars[c]
    }

    pub fn var_checks(&self, v: usize) -> &[usize] {
        &self.var_checks[v]
    }

    /// `(J, K)` when every variable has degree J and every check degree K.
    pub fn regular_degrees(&self) -> Option<(usize, usize)> {
        let j = self.var_checks.first()?.len();
        let k = self.check_vars.first()?.len();
        let regular = self.var_checks.iter().all(|c| c.len() == j)
            && self.check_vars.iter().all(|v| v.len() == k);
        regular.then_some((j, k))
    }

    pub fn to_parity(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.n_checks(), self.n_vars);
        for (c, vars) in self.check_vars.iter().enumerate() {
            for &v in vars {
                h.set(c, v, true);
            }
        }
        h
    }
}

/// Which checks are GC nodes, and how each GC node's edges map onto
/// component-code positions.
#[derive(Debug, Clone, PartialEq)]
pub struct GcPlacement {
    n_checks: usize,
    gc_indices: Vec<usize>,
    // position_maps[i][e]: component position of the e-th edge of check gc_indices[i]
    position_maps: Vec<Vec<usize>>,
    // slot[c]: index into gc_indices, or usize::MAX for SPC
    slot: Vec<usize>,
}

impl GcPlacement {
    pub fn new(n_checks: usize, gc_indices: Vec<usize>, position_maps: Vec<Vec<usize>>) -> Result<Self> {
        if gc_indices.len() != position_maps.len() {
            return Err(Error::DimensionMismatch {
                expected: gc_indices.len(),
                got: position_maps.len(),
            });
        }
        if gc_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange("GC indices must be strictly increasing".into()));
        }
        if gc_indices.last().is_some_and(|&c| c >= n_checks) {
            return Err(Error::OutOfRange("GC index beyond check count".into()));
        }
        for map in &position_maps {
            let mut seen = vec![false; map.len()];
            for &p in map {
                if p >= map.len() || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::OutOfRange(format!("{map:?} is not a permutation")));
                }
            }
        }
        let mut slot = vec![usize::MAX; n_checks];
        for (i, &c) in gc_indices.iter().enumerate() {
            slot[c] = i;
        }
        Ok(GcPlacement {
            n_checks,
            gc_indices,
            position_maps,
            slot,
        })
    }

    /// All checks are single parity checks.
    pub fn none(n_checks: usize) -> Self {
        Self::new(n_checks, Vec::new(), Vec::new()).expect("empty placement")
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn gc_indices(&self) -> &[usize] {
        &self.gc_indices
    }

    pub fn n_gc(&self) -> usize {
        self.gc_indices.len()
    }

    pub fn n_spc(&self) -> usize {
        self.n_checks - self.gc_indices.len()
    }

    pub fn nu_actual(&self) -> f64 {
        if self.n_checks == 0 {
            0.0
        } else {
            self.gc_indices.len() as f64 / self.n_checks as f64
        }
    }

    pub fn kind(&self, c: usize) -> CheckKind {
        if self.slot[c] == usize::MAX {
            CheckKind::Spc
        } else {
            CheckKind::Gc
        }
    }

    /// Position map of check `c`, if it is a GC node.
    pub fn position_map(&self, c: usize) -> Option<&[usize]> {
        match self.slot[c] {
            usize::MAX => None,
            i => Some(&self.position_maps[i]),
        }
    }

    /// Text form: `nu_actual`, the sorted GC indices, then one position map
    /// per GC node in index order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.nu_actual());
        let idx: Vec<String> = self.gc_indices.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", idx.join(" "));
        for map in &self.position_maps {
            let m: Vec<String> = map.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", m.join(" "));
        }
        out
    }

    pub fn from_text(text: &str, n_checks: usize) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.starts_with('#'));
        let (ln, first) = lines.next().ok_or_else(|| Error::parse(1, "empty placement"))?;
        let nu: f64 = first
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad nu_actual {first:?}")))?;
        let (ln, idx_line) = lines.next().unwrap_or((ln + 1, ""));
        let gc_indices = parse_list(ln, idx_line)?;
        let mut maps = Vec::with_capacity(gc_indices.len());
        for _ in 0..gc_indices.len() {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, "missing position map"))?;
            maps.push(parse_list(ln, l)?);
        }
        let placement = Self::new(n_checks, gc_indices, maps)?;
        if (placement.nu_actual() - nu).abs() > 1e-9 {
            return Err(Error::parse(
                1,
                format!("nu_actual {nu} disagrees with {} GC of {n_checks} checks", placement.n_gc()),
            ));
        }
        Ok(placement)
    }

    pub fn load(path: impl AsRef<Path>, n_checks: usize) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?, n_checks)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_list(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::parse(line, format!("bad integer {t:?}"))))
        .collect()
}

/// Design rate `R₀ − ν(1 − R₀)(k − 1)` with `R₀ = 1 − J/K`.
pub fn design_rate(j: usize, k: usize, nu: f64, k_comp: usize) -> f64 {
    let (j, k) = (j as f64, k as f64);
    (k - j - nu * j * (k_comp as f64 - 1.0)) / k
}

/// Number of GC nodes for a fraction `nu` of `n_checks`, rounding halves up.
pub fn gc_count(nu: f64, n_checks: usize) -> usize {
    ((nu * n_checks as f64 + 0.5).floor() as usize).min(n_checks)
}

/// Marks a uniformly random subset of `round(nu · checks)` checks as GC nodes,
/// each with an independent uniformly random position map.
pub fn place_gc_nodes(graph: &TannerGraph, nu: f64, seed: u64) -> Result<GcPlacement> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::OutOfRange(format!("nu = {nu}")));
    }
    let m = graph.n_checks();
    let count = gc_count(nu, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gc: Vec<usize> = sample(&mut rng, m, count).into_vec();
    gc.sort_unstable();
    let maps = gc
        .iter()
        .map(|&c| {
            let mut p: Vec<usize> = (0..graph.check_vars(c).len()).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    GcPlacement::new(m, gc, maps)
}

/// Full binary parity-check matrix: one row per SPC node, `n − k` rows per
/// GC node (the component parity rows routed through the position map).
pub fn expand_full_parity(graph: &TannerGraph, placement: &GcPlacement, comp: &ComponentCode) -> Result<BitMatrix> {
    if placement.n_checks() != graph.n_checks() {
        return Err(Error::DimensionMismatch {
            expected: graph.n_checks(),
            got: placement.n_checks(),
        });
    }
    let r = comp.n() - comp.k();
    let rows = placement.n_spc() + placement.n_gc() * r;
    let mut h = BitMatrix::zeros(rows, graph.n_vars());
    let mut row = 0;
    for c in 0..graph.n_checks() {
        let vars = graph.check_vars(c);
        match placement.position_map(c) {
            None => {
                for &v in vars {
                    h.set(row, v, true);
                }
                row += 1;
            }
            Some(map) => {
                if vars.len() != comp.n() || map.len() != comp.n() {
                    return Err(Error::DegreeMismatch {
                        check: c,
                        degree: vars.len(),
                        n: comp.n(),
                    });
                }
                for pr in 0..r {
                    for (e, &v) in vars.iter().enumerate() {
                        if comp.parity().get(pr, map[e]) {
                            h.set(row, v, true);
                        }
                    }
                    row += 1;
                }
            }
        }
    }
    Ok(h)
}

/// Systematic encoder derived from a parity-check matrix.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    rank: usize,
    pivots: Vec<usize>,
    info_positions: Vec<usize>,
    // parity_map[r][i]: contribution of info bit i to pivot bit r
    parity_map: BitMatrix,
}

impl Encoder {
    pub fn from_parity(h: &BitMatrix) -> Result<Self> {
        let sf = h.systematic_form();
        let rank = sf.rank();
        let n = h.cols();
        if rank >= n {
            return Err(Error::NoInformationBits);
        }
        let info_positions = sf.permutation[rank..].to_vec();
        let k = n - rank;
        let mut parity_map = BitMatrix::zeros(rank, k);
        for r in 0..rank {
            for i in 0..k {
                if sf.reduced.get(r, rank + i) {
                    parity_map.set(r, i, true);
                }
            }
        }
        Ok(Encoder {
            n,
            rank,
            pivots: sf.pivots,
            info_positions,
            parity_map,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `(n − rank) / n`.
    pub fn actual_rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let parity = self.parity_map.mul_vec(info)?;
        let mut cw = vec![0u8; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            cw[pos] = b & 1;
        }
        for (&pos, b) in self.pivots.iter().zip(parity) {
            cw[pos] = b;
        }
        Ok(cw)
    }

    pub fn extract_info(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| codeword[p]).collect()
    }

    /// `k × n` generator matrix whose rows encode the unit info vectors.
    pub fn generator(&self) -> BitMatrix {
        let k = self.k();
        let mut g = BitMatrix::zeros(k, self.n);
        let mut unit = vec![0u8; k];
        for i in 0..k {
            unit[i] = 1;
            let cw = self.encode(&unit).expect("length matches");
            for (c, &b) in cw.iter().enumerate() {
                g.set(i, c, b == 1);
            }
            unit[i] = 0;
        }
        g
    }
}

pub fn build_encoder(h_full: &BitMatrix) -> Result<Encoder> {
    Encoder::from_parity(h_full)
}

/// A complete GLDPC code: graph, GC placement, component code, the expanded
/// parity-check matrix and an encoder for it.
#[derive(Debug, Clone)]
pub struct GldpcCode {
    pub graph: TannerGraph,
    pub placement: GcPlacement,
    pub component: ComponentCode,
    pub h_full: BitMatrix,
    pub encoder: Encoder,
}

impl GldpcCode {
    pub fn new(graph: TannerGraph, placement: GcPlacement, component: ComponentCode) -> Result<Self> {
        let h_full = expand_full_parity(&graph, &placement, &component)?;
        let encoder = build_encoder(&h_full)?;
        Ok(GldpcCode {
            graph,
            placement,
            component,
            h_full,
            encoder,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n_vars()
    }

    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn rate(&self) -> f64 {
        self.encoder.actual_rate()
    }

    /// True when `word` satisfies every SPC and GC constraint.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        (0..self.graph.n_checks()).all(|c| self.check_satisfied(c, word))
    }

    pub fn check_satisfied(&self, c: usize, word: &[u8]) -> bool {
        let vars = self.graph.check_vars(c);
        match self.placement.position_map(c) {
            None => vars.iter().fold(0u8, |acc, &v| acc ^ word[v]) == 0,
            Some(map) => {
                let mask = vars
                    .iter()
                    .zip(map)
                    .fold(0u64, |acc, (&v, &p)| acc | ((word[v] as u64 & 1) << p));
                self.component.is_codeword_mask(mask)
            }
        }
    }
}
