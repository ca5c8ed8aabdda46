//! Girth measurement and short-cycle enumeration on Tanner graphs.

use std::collections::{HashSet, VecDeque};

use crate::gf2::BitMatrix;
use crate::graph::{CheckKind, GcPlacement, TannerGraph};

/// Returned by [`girth_of`] for a graph without cycles.
pub const ACYCLIC: usize = usize::MAX;

/// Length of the shortest cycle in the Tanner graph of `h`, found by a
/// breadth-first search rooted at every variable node.
pub fn girth_of(h: &BitMatrix) -> usize {
    girth_of_graph(&TannerGraph::from_parity(h))
}

pub fn girth_of_graph(g: &TannerGraph) -> usize {
    let n = g.n_vars();
    let total = n + g.n_checks();
    let mut best = ACYCLIC;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    let mut touched = Vec::new();
    for root in 0..n {
        for &t in &touched {
            dist[t] = usize::MAX;
            parent[t] = usize::MAX;
        }
        touched.clear();
        queue.clear();
        dist[root] = 0;
        touched.push(root);
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            // nothing shorter than `best` can be closed beyond this depth
            if best != ACYCLIC && 2 * dist[u] >= best {
                break;
            }
            for w in neighbours(g, u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                    if best == 4 {
                        break 'bfs;
                    }
                }
            }
        }
        if best == 4 {
            break;
        }
    }
    best
}

fn neighbours(g: &TannerGraph, node: usize) -> impl Iterator<Item = usize> + '_ {
    let n = g.n_vars();
    let (vars, checks): (&[usize], &[usize]) = if node < n {
        (&[], g.var_checks(node))
    } else {
        (g.check_vars(node - n), &[])
    };
    vars.iter().copied().chain(checks.iter().map(move |&c| c + n))
}

/// A simple cycle as an alternating node sequence. Variable nodes are
/// `0..n_vars`; check `c` appears as `n_vars + c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle(pub Vec<usize>);

impl Cycle {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn checks(&self, n_vars: usize) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().filter(move |&&x| x >= n_vars).map(move |&x| x - n_vars)
    }
}

/// Every simple cycle of length at most `max_len`, each reported once.
pub fn enumerate_cycles(g: &TannerGraph, max_len: usize) -> Vec<Cycle> {
    let total = g.n_vars() + g.n_checks();
    let mut out = Vec::new();
    let mut on_path = vec![false; total];
    let mut path = Vec::with_capacity(max_len);
    for start in 0..total {
        path.push(start);
        on_path[start] = true;
        dfs(g, start, max_len, &mut path, &mut on_path, &mut out);
        on_path[start] = false;
        path.pop();
    }
    out
}

// Extends `path` through nodes with index above `start`; a cycle is kept
// when it closes at `start` with path[1] < path[last] so each direction
// pair is recorded once.
fn dfs(
    g: &TannerGraph,
    start: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Cycle>,
) {
    let u = *path.last().expect("non-empty path");
    for w in neighbours(g, u) {
        if w == start && path.len() >= 4 && path[1] < u {
            out.push(Cycle(path.clone()));
        } else if w > start && !on_path[w] && path.len() < max_len {
            path.push(w);
            on_path[w] = true;
            dfs(g, start, max_len, path, on_path, out);
            on_path[w] = false;
            path.pop();
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructureCounts {
    /// Unordered pairs of distinct 4-cycles sharing a GC check node.
    pub structure1: usize,
    /// 8-cycles whose check nodes are all SPC.
    pub structure2: usize,
    /// All cycles of length at most 10.
    pub short_cycles: usize,
    /// Cycle counts for lengths 4, 6, 8 and 10.
    pub by_length: [usize; 4],
}

impl StructureCounts {
    pub fn is_clean(&self) -> bool {
        self.structure1 == 0 && self.structure2 == 0 && self.short_cycles == 0
    }
}

/// Counts the dominant error structures of (2,K)-regular GLDPC graphs: two
/// 4-cycles joined at a GC node, and 8-cycles made only of SPC nodes.
pub fn scan_error_structures(g: &TannerGraph, placement: &GcPlacement) -> StructureCounts {
    let n = g.n_vars();
    let cycles = enumerate_cycles(g, 10);
    let mut counts = StructureCounts {
        short_cycles: cycles.len(),
        ..Default::default()
    };
    let mut four_by_check: Vec<Vec<usize>> = vec![Vec::new(); g.n_checks()];
    let mut n_four = 0;
    for cyc in &cycles {
        counts.by_length[cyc.len() / 2 - 2] += 1;
        match cyc.len() {
            4 => {
                for c in cyc.checks(n) {
                    if placement.kind(c) == CheckKind::Gc {
                        four_by_check[c].push(n_four);
                    }
                }
                n_four += 1;
            }
            8 => {
                if cyc.checks(n).all(|c| placement.kind(c) == CheckKind::Spc) {
                    counts.structure2 += 1;
                }
            }
            _ => {}
        }
    }
    let mut pairs = HashSet::new();
    for ids in &four_by_check {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    counts.structure1 = pairs.len();
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qc::QcProfile;

    #[test]
    fn smallest_cycle() {
        let h = BitMatrix::from_strs(&["11", "11"]).unwrap();
        assert_eq!(girth_of(&h), 4);
        assert_eq!(enumerate_cycles(&TannerGraph::from_parity(&h), 10).len(), 1);
    }

    #[test]
    fn tree_is_acyclic() {
        let h = BitMatrix::from_strs(&["1100", "0110", "0011"]).unwrap();
        assert_eq!(girth_of(&h), ACYCLIC);
        assert!(enumerate_cycles(&TannerGraph::from_parity(&h), 12).is_empty());
    }

    #[test]
    fn six_cycle() {
        let h = BitMatrix::from_strs(&["110", "011", "101"]).unwrap();
        assert_eq!(girth_of(&h), 6);
        let cycles = enumerate_cycles(&TannerGraph::from_parity(&h), 10);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 6);
    }

    #[test]
    fn complete_bipartite_cycle_counts() {
        // K_{3,3}: 9 four-cycles and 6 six-cycles
        let h = BitMatrix::from_strs(&["111", "111", "111"]).unwrap();
        let cycles = enumerate_cycles(&TannerGraph::from_parity(&h), 6);
        assert_eq!(cycles.iter().filter(|c| c.len() == 4).count(), 9);
        assert_eq!(cycles.iter().filter(|c| c.len() == 6).count(), 6);
    }

    #[test]
    fn qc_girth_matches_condition_on_small_lifts() {
        let girth8 = QcProfile::two_row(13, &[1, 2, 4]).unwrap();
        let g = girth_of(&girth8.expand());
        assert_eq!(g >= 8, crate::qc::girth_condition_holds(&girth8, 8));
        assert_eq!(g >= 12, crate::qc::girth_condition_holds(&girth8, 12));
    }
}
