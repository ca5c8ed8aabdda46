//! Flooding belief propagation over GLDPC Tanner graphs.
//!
//! Each iteration updates every variable-to-check message, then every
//! check-to-variable message (tanh rule at SPC nodes, component-code MAP at
//! GC nodes), then takes hard decisions on the posteriors and stops as soon
//! as every constraint is satisfied.

use crate::component::clamp;
use crate::graph::GldpcCode;

pub const DEFAULT_I_MAX: usize = 10;

/// Saturation applied to all messages.
pub const LLR_LIMIT: f64 = 30.0;

/// Extrinsic SPC output for edge `j`: `2·atanh(Π_{m≠j} tanh(Λ_m/2))`.
/// Inputs at or beyond the saturation limit count as certain.
pub fn spc_update(llrs_in: &[f64], j: usize) -> f64 {
    let mut out = vec![0.0; llrs_in.len()];
    spc_update_all(llrs_in, &mut out);
    out[j]
}

#[inline]
fn half_tanh(x: f64) -> f64 {
    if x >= LLR_LIMIT {
        1.0
    } else if x <= -LLR_LIMIT {
        -1.0
    } else {
        (0.5 * x).tanh()
    }
}

/// SPC update for every edge, using prefix/suffix products.
pub fn spc_update_all(llrs_in: &[f64], out: &mut [f64]) {
    let d = llrs_in.len();
    debug_assert_eq!(out.len(), d);
    // out[i] temporarily holds the product of tanh values left of i
    let mut acc = 1.0;
    for i in 0..d {
        out[i] = acc;
        acc *= half_tanh(llrs_in[i]);
    }
    let mut right = 1.0;
    for i in (0..d).rev() {
        let p = out[i] * right;
        out[i] = clamp(2.0 * p.atanh(), LLR_LIMIT);
        right *= half_tanh(llrs_in[i]);
    }
}

/// Variable-to-check message on edge `j`: channel plus all other incoming.
pub fn variable_update(channel_llr: f64, incoming: &[f64], j: usize) -> f64 {
    channel_llr
        + incoming
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != j)
            .map(|(_, x)| x)
            .sum::<f64>()
}

/// Decoding cost in equivalent additions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperationTally {
    /// `J·N·(11 + 17ν)`.
    pub per_iteration: f64,
    /// `J·N`, the variable-node share of one iteration.
    pub variable_nodes: f64,
    pub iterations: usize,
    pub total: f64,
}

/// Per-iteration complexity: 27K equivalent additions per GC node, 10K per
/// SPC node and one per variable edge, i.e. `J·N·(11 + 17ν)`.
pub fn count_operations(j: usize, n: usize, nu: f64, iterations: usize) -> OperationTally {
    let jn = (j * n) as f64;
    let per_iteration = jn * (11.0 + 17.0 * nu);
    OperationTally {
        per_iteration,
        variable_nodes: jn,
        iterations,
        total: per_iteration * iterations as f64,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub hard_bits: Vec<u8>,
    pub converged: bool,
    pub iterations_used: usize,
    pub op_count: OperationTally,
    /// Equivalent additions actually executed by this implementation.
    pub measured_ops: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BecOutcome {
    /// Recovered bits; `None` marks a residual erasure.
    pub bits: Vec<Option<u8>>,
    pub residual_erasures: usize,
    pub converged: bool,
    pub iterations_used: usize,
    /// Known values at some check were inconsistent with its constraint.
    pub contradiction: bool,
}

impl BecOutcome {
    pub fn residual_erasure_rate(&self) -> f64 {
        self.residual_erasures as f64 / self.bits.len() as f64
    }
}

const ERASED: i8 = -1;

/// Reusable decoder state for one code. Not shared between threads.
pub struct BpDecoder<'a> {
    code: &'a GldpcCode,
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    // component position of each edge, usize::MAX on SPC edges
    edge_pos: Vec<usize>,
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    channel: Vec<f64>,
    posterior: Vec<f64>,
    hard: Vec<u8>,
    scratch: Vec<f64>,
    measured_per_iteration: u64,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a GldpcCode) -> Self {
        let g = &code.graph;
        let mut check_start = vec![0];
        let mut edge_var = Vec::with_capacity(g.n_edges());
        let mut edge_pos = Vec::with_capacity(g.n_edges());
        for c in 0..g.n_checks() {
            let vars = g.check_vars(c);
            edge_var.extend_from_slice(vars);
            match code.placement.position_map(c) {
                Some(map) => edge_pos.extend_from_slice(map),
                None => edge_pos.extend(std::iter::repeat_n(usize::MAX, vars.len())),
            }
            check_start.push(edge_var.len());
        }
        let n = g.n_vars();
        let mut per_var: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &v) in edge_var.iter().enumerate() {
            per_var[v].push(e);
        }
        let mut var_start = vec![0];
        let mut var_edges = Vec::with_capacity(edge_var.len());
        for edges in per_var {
            var_edges.extend(edges);
            var_start.push(var_edges.len());
        }
        let ne = edge_var.len();
        let mut dec = BpDecoder {
            code,
            check_start,
            edge_var,
            edge_pos,
            var_start,
            var_edges,
            v2c: vec![0.0; ne],
            c2v: vec![0.0; ne],
            channel: vec![0.0; n],
            posterior: vec![0.0; n],
            hard: vec![0; n],
            scratch: Vec::new(),
            measured_per_iteration: 0,
        };
        dec.measured_per_iteration = dec.measure_iteration_cost();
        dec
    }

    // Equivalent additions per iteration of the loops below: comparisons
    // weigh two, transcendental evaluations one (table look-up).
    fn measure_iteration_cost(&self) -> u64 {
        let mut ops = 0u64;
        for v in 0..self.code.n() {
            let d = (self.var_start[v + 1] - self.var_start[v]) as u64;
            ops += d * d.saturating_sub(1) + d;
        }
        let comp = &self.code.component;
        let (n, words) = (comp.n() as u64, 1u64 << comp.k());
        let gc_cost = n * (words * (n - 1) + 2 * words + 3 * words + 5);
        for c in 0..self.code.graph.n_checks() {
            let d = (self.check_start[c + 1] - self.check_start[c]) as u64;
            ops += if self.code.placement.position_map(c).is_some() {
                gc_cost
            } else {
                2 * d + 3 * d.saturating_sub(1) + d
            };
        }
        ops
    }

    pub fn measured_ops_per_iteration(&self) -> u64 {
        self.measured_per_iteration
    }

    pub fn decode(&mut self, channel_llr: &[f64], i_max: usize) -> DecodeOutcome {
        self.run(channel_llr, i_max, None)
    }

    /// Like [`Self::decode`], also returning the hard decisions after every
    /// iteration.
    pub fn decode_traced(&mut self, channel_llr: &[f64], i_max: usize) -> (DecodeOutcome, Vec<Vec<u8>>) {
        let mut trace = Vec::new();
        let out = self.run(channel_llr, i_max, Some(&mut trace));
        (out, trace)
    }

    fn run(&mut self, channel_llr: &[f64], i_max: usize, mut trace: Option<&mut Vec<Vec<u8>>>) -> DecodeOutcome {
        let n = self.code.n();
        assert_eq!(channel_llr.len(), n, "channel LLR length");
        for (c, &x) in self.channel.iter_mut().zip(channel_llr) {
            *c = clamp(x, LLR_LIMIT);
        }
        self.c2v.fill(0.0);
        let mut converged = false;
        let mut iterations = 0;
        if i_max == 0 {
            self.posterior.copy_from_slice(&self.channel);
            self.harden();
            converged = self.code.is_codeword(&self.hard);
        }
        for it in 1..=i_max {
            self.variable_phase();
            self.check_phase();
            self.update_posterior();
            self.harden();
            iterations = it;
            if let Some(t) = trace.as_deref_mut() {
                t.push(self.hard.clone());
            }
            if self.code.is_codeword(&self.hard) {
                converged = true;
                break;
            }
        }
        let p = &self.code.placement;
        let (j, _) = self.code.graph.regular_degrees().unwrap_or((2, 0));
        DecodeOutcome {
            hard_bits: self.hard.clone(),
            converged,
            iterations_used: iterations,
            op_count: count_operations(j, n, p.nu_actual(), iterations),
            measured_ops: self.measured_per_iteration * iterations as u64,
        }
    }

    fn variable_phase(&mut self) {
        for v in 0..self.code.n() {
            let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
            for &e in edges {
                let mut m = self.channel[v];
                for &o in edges {
                    if o != e {
                        m += self.c2v[o];
                    }
                }
                self.v2c[e] = clamp(m, LLR_LIMIT);
            }
        }
    }

    fn check_phase(&mut self) {
        let comp = &self.code.component;
        let kn = comp.n();
        let mut input = [0.0f64; 64];
        let mut output = [0.0f64; 64];
        for c in 0..self.check_start.len() - 1 {
            let range = self.check_start[c]..self.check_start[c + 1];
            if self.edge_pos[range.start] == usize::MAX {
                spc_update_all(&self.v2c[range.clone()], &mut self.c2v[range]);
            } else {
                for e in range.clone() {
                    input[self.edge_pos[e]] = self.v2c[e];
                }
                comp.map_extrinsic_into(&input[..kn], &mut output[..kn], &mut self.scratch);
                for e in range {
                    self.c2v[e] = clamp(output[self.edge_pos[e]], LLR_LIMIT);
                }
            }
        }
    }

    fn update_posterior(&mut self) {
        for v in 0..self.code.n() {
            let mut s = self.channel[v];
            for &e in &self.var_edges[self.var_start[v]..self.var_start[v + 1]] {
                s += self.c2v[e];
            }
            self.posterior[v] = s;
        }
    }

    fn harden(&mut self) {
        for (h, &p) in self.hard.iter_mut().zip(&self.posterior) {
            *h = (p < 0.0) as u8;
        }
    }

    /// Erasure message passing: an SPC edge is resolved once all other
    /// edges are known, a GC edge once the component code pins its position.
    pub fn decode_bec(&mut self, input: &[Option<u8>], i_max: usize) -> BecOutcome {
        let n = self.code.n();
        assert_eq!(input.len(), n, "input length");
        let ne = self.edge_var.len();
        let chan: Vec<i8> = input.iter().map(|b| b.map_or(ERASED, |x| (x & 1) as i8)).collect();
        let mut v2c = vec![ERASED; ne];
        let mut c2v = vec![ERASED; ne];
        let mut value = chan.clone();
        let mut contradiction = false;
        let mut known = value.iter().filter(|&&x| x != ERASED).count();
        let mut iterations = 0;
        let comp = &self.code.component;
        while known < n && iterations < i_max {
            iterations += 1;
            for v in 0..n {
                let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
                for &e in edges {
                    let mut m = chan[v];
                    for &o in edges {
                        if o != e && c2v[o] != ERASED {
                            if m != ERASED && m != c2v[o] {
                                contradiction = true;
                            }
                            m = c2v[o];
                        }
                    }
                    v2c[e] = m;
                }
            }
            for c in 0..self.check_start.len() - 1 {
                let range = self.check_start[c]..self.check_start[c + 1];
                if self.edge_pos[range.start] == usize::MAX {
                    let erased = range.clone().filter(|&e| v2c[e] == ERASED).count();
                    let parity = range.clone().filter(|&e| v2c[e] == 1).count() as i8 & 1;
                    for e in range {
                        c2v[e] = match (erased, v2c[e] == ERASED) {
                            (1, true) => parity,
                            (0, false) => parity ^ v2c[e],
                            _ => ERASED,
                        };
                    }
                } else {
                    let (mut kmask, mut vmask) = (0u64, 0u64);
                    for e in range.clone() {
                        if v2c[e] != ERASED {
                            kmask |= 1 << self.edge_pos[e];
                            vmask |= (v2c[e] as u64) << self.edge_pos[e];
                        }
                    }
                    for e in range {
                        let pos = self.edge_pos[e];
                        let others = kmask & !(1 << pos);
                        c2v[e] = if comp.recoverable_mask(others, pos) {
                            match comp
                                .codeword_masks()
                                .iter()
                                .find(|&&w| w & others == vmask & others)
                            {
                                Some(w) => (w >> pos & 1) as i8,
                                None => {
                                    contradiction = true;
                                    ERASED
                                }
                            }
                        } else {
                            ERASED
                        };
                    }
                }
            }
            let mut now_known = 0;
            for v in 0..n {
                if value[v] == ERASED {
                    if let Some(&e) = self.var_edges[self.var_start[v]..self.var_start[v + 1]]
                        .iter()
                        .find(|&&e| c2v[e] != ERASED)
                    {
                        value[v] = c2v[e];
                    }
                }
                now_known += (value[v] != ERASED) as usize;
            }
            if now_known == known {
                break;
            }
            known = now_known;
        }
        if known == n {
            let bits: Vec<u8> = value.iter().map(|&x| x as u8).collect();
            if !self.code.is_codeword(&bits) {
                contradiction = true;
            }
        }
        BecOutcome {
            bits: value.iter().map(|&x| (x != ERASED).then_some(x as u8)).collect(),
            residual_erasures: n - known,
            converged: known == n && !contradiction,
            iterations_used: iterations,
            contradiction,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::ComponentCode;
    use crate::gf2::BitMatrix;
    use crate::graph::{place_gc_nodes, GcPlacement, TannerGraph};
    use crate::qc::QcProfile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(nu: f64, seed: u64) -> GldpcCode {
        let h = QcProfile::two_row(83, &[8, 64, 14, 29, 66]).unwrap().expand();
        let g = TannerGraph::from_parity(&h);
        let p = place_gc_nodes(&g, nu, seed).unwrap();
        GldpcCode::new(g, p, ComponentCode::hamming_6_3()).unwrap()
    }

    fn strong(cw: &[u8], b: f64) -> Vec<f64> {
        cw.iter().map(|&x| if x == 0 { b } else { -b }).collect()
    }

    #[test]
    fn spc_examples() {
        assert_eq!(spc_update(&[0.0, 3.0, -2.0], 0), 2.0 * (1.5f64.tanh() * (-1.0f64).tanh()).atanh());
        assert_eq!(spc_update(&[0.0, 3.0, -2.0], 1), 0.0);
        assert_eq!(spc_update(&[f64::INFINITY, f64::INFINITY, 0.0], 2), LLR_LIMIT);
        let expected = 2.0 * (0.5f64.tanh().powi(2)).atanh();
        assert!((spc_update(&[1.0, 1.0, 0.0], 2) - expected).abs() < 1e-15);
    }

    #[test]
    fn spc_is_extrinsic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let mut x: Vec<f64> = (0..6).map(|_| rng.random_range(-10.0..10.0)).collect();
            let j = rng.random_range(0..6);
            let a = spc_update(&x, j);
            x[j] = rng.random_range(-10.0..10.0);
            assert_eq!(a, spc_update(&x, j));
        }
    }

    #[test]
    fn variable_examples() {
        assert_eq!(variable_update(0.5, &[1.0, 2.0], 0), 2.5);
        assert_eq!(variable_update(-0.7, &[0.0, 0.0], 1), -0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let ch: f64 = rng.random_range(-5.0..5.0);
            let inc: Vec<f64> = (0..4).map(|_| rng.random_range(-5.0..5.0)).collect();
            let total: f64 = ch + inc.iter().sum::<f64>();
            for j in 0..4 {
                assert!((variable_update(ch, &inc, j) + inc[j] - total).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn operation_counts() {
        let t = count_operations(2, 498, 0.75, 1);
        assert_eq!(t.per_iteration, 23655.0);
        assert_eq!(t.variable_nodes, 996.0);
        assert_eq!(count_operations(2, 498, 0.0, 1).per_iteration, 10956.0);
        assert_eq!(count_operations(2, 498, 0.75, 10).total, 236550.0);
    }

    #[test]
    fn noiseless_codeword_converges_in_one_iteration() {
        let code = code(0.75, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encoder.encode(&info).unwrap();
        let mut dec = BpDecoder::new(&code);
        let out = dec.decode(&strong(&cw, 20.0), 10);
        assert!(out.converged);
        assert_eq!(out.iterations_used, 1);
        assert_eq!(out.hard_bits, cw);
        assert!(code.h_full.mul_vec(&out.hard_bits).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn zero_iterations_is_channel_hard_decision() {
        let code = code(0.75, 1);
        let mut dec = BpDecoder::new(&code);
        let mut llr = vec![4.0; code.n()];
        llr[3] = -1.0;
        let out = dec.decode(&llr, 0);
        assert_eq!(out.iterations_used, 0);
        assert_eq!(out.hard_bits[3], 1);
        assert!(!out.converged);
        assert_eq!(out.measured_ops, 0);
    }

    #[test]
    fn single_flip_at_gc_variable_is_corrected() {
        let code = code(0.75, 2);
        let gc = code.placement.gc_indices()[0];
        let v = code.graph.check_vars(gc)[0];
        let mut llr = vec![8.0; code.n()];
        llr[v] = -8.0;
        let mut dec = BpDecoder::new(&code);
        let out = dec.decode(&llr, 10);
        assert!(out.converged);
        assert!(out.iterations_used <= 2);
        assert!(out.hard_bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn strong_correct_input_never_flips() {
        let code = code(0.75, 3);
        let mut dec = BpDecoder::new(&code);
        let (out, trace) = dec.decode_traced(&vec![25.0; code.n()], 5);
        assert!(out.converged);
        assert!(trace.iter().flatten().all(|&b| b == 0));
        assert!(dec.c2v.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn op_count_follows_iterations() {
        let code = code(0.75, 1);
        let mut dec = BpDecoder::new(&code);
        let out = dec.decode(&vec![0.1; code.n()], 3);
        assert_eq!(out.op_count.per_iteration, 996.0 * (11.0 + 17.0 * 125.0 / 166.0));
        assert_eq!(out.op_count.total, out.op_count.per_iteration * out.iterations_used as f64);
        assert_eq!(out.measured_ops, dec.measured_ops_per_iteration() * out.iterations_used as u64);
    }

    #[test]
    fn bec_no_erasures_and_all_erased() {
        let code = code(0.75, 1);
        let mut dec = BpDecoder::new(&code);
        let zero = vec![Some(0u8); code.n()];
        let out = dec.decode_bec(&zero, 10);
        assert!(out.converged);
        assert_eq!(out.iterations_used, 0);
        let out = dec.decode_bec(&vec![None; code.n()], 10);
        assert!(!out.converged);
        assert_eq!(out.residual_erasure_rate(), 1.0);
    }

    #[test]
    fn bec_isolated_gc_node_recovers_single_erasure() {
        let h = BitMatrix::from_strs(&["111111"]).unwrap();
        let g = TannerGraph::from_parity(&h);
        let p = GcPlacement::new(1, vec![0], vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let code = GldpcCode::new(g, p, ComponentCode::hamming_6_3()).unwrap();
        let mut dec = BpDecoder::new(&code);
        let cw = [1u8, 0, 1, 1, 0, 1];
        for erased in 0..6 {
            let input: Vec<Option<u8>> = (0..6).map(|i| (i != erased).then_some(cw[i])).collect();
            let out = dec.decode_bec(&input, 5);
            assert!(out.converged);
            assert_eq!(out.bits[erased], Some(cw[erased]));
        }
        // erasing the support of a weight-3 codeword leaves it ambiguous
        let input = vec![None, Some(0), Some(1), None, None, Some(1)];
        let out = dec.decode_bec(&input, 5);
        assert!(out.residual_erasures > 0);
    }

    #[test]
    fn bec_flags_contradictions() {
        let h = BitMatrix::from_strs(&["111111"]).unwrap();
        let g = TannerGraph::from_parity(&h);
        let p = GcPlacement::new(1, vec![0], vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let code = GldpcCode::new(g, p, ComponentCode::hamming_6_3()).unwrap();
        let mut dec = BpDecoder::new(&code);
        let out = dec.decode_bec(&[Some(1), Some(0), Some(0), Some(0), Some(0), None], 5);
        assert!(out.contradiction);
        assert!(!out.converged);
    }

    #[test]
    fn bec_recovers_light_erasures_on_full_code() {
        let code = code(0.75, 5);
        let mut dec = BpDecoder::new(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encoder.encode(&info).unwrap();
        let input = crate::channel::bec_erase(&cw, 0.2, &mut rng);
        let out = dec.decode_bec(&input, 50);
        assert!(out.converged);
        assert!(out.bits.iter().zip(&cw).all(|(b, &c)| *b == Some(c)));
    }
}
