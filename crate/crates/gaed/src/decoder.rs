//! Flooding belief propagation on a Tanner graph: sum-product and normalized
//! min-sum check-node updates, erasure-aware inputs (zero LLRs), message
//! clamping, and early termination on a zero syndrome.

use serde::{Deserialize, Serialize};

use crate::code::TannerGraph;
use crate::gf2::BitVector;

/// Check-node update rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderVariant {
    SumProduct,
    NormalizedMinSum,
}

/// Decoder parameters. Defaults follow the usual short-block setup:
/// normalized min-sum with factor 3/4, 30 iterations, message clamp 30.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecoderConfig {
    #[serde(default = "default_variant")]
    pub variant: DecoderVariant,
    /// Normalization factor for min-sum, in (0, 1].
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Magnitude cap applied to channel inputs and every message.
    #[serde(default = "default_llr_clamp")]
    pub llr_clamp: f64,
    /// Stop as soon as the hard decision has zero syndrome. Disable to run
    /// a fixed iteration count (e.g. to read exact posteriors on trees).
    #[serde(default = "default_early_stop")]
    pub early_stop: bool,
}

fn default_variant() -> DecoderVariant {
    DecoderVariant::NormalizedMinSum
}
fn default_alpha() -> f64 {
    0.75
}
fn default_max_iters() -> usize {
    30
}
fn default_llr_clamp() -> f64 {
    30.0
}
fn default_early_stop() -> bool {
    true
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            variant: default_variant(),
            alpha: default_alpha(),
            max_iters: default_max_iters(),
            llr_clamp: default_llr_clamp(),
            early_stop: default_early_stop(),
        }
    }
}

impl DecoderConfig {
    pub fn sum_product() -> Self {
        DecoderConfig {
            variant: DecoderVariant::SumProduct,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "normalization factor must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.max_iters == 0 {
            return Err(crate::Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.llr_clamp > 0.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "llr_clamp must be positive, got {}",
                self.llr_clamp
            )));
        }
        Ok(())
    }
}

/// Outcome of one decoding attempt.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    /// Hard decision per variable node (LLR >= 0 decodes to 0).
    pub hard_bits: BitVector,
    /// Whether the hard decision satisfied every check at exit.
    pub converged: bool,
    /// Iterations actually run; 0 when the channel word was already valid.
    pub iters_used: usize,
    /// Posterior LLR per variable node at exit.
    pub posterior_llrs: Vec<f64>,
}

/// Pairwise box-plus `2 atanh(tanh(a/2) tanh(b/2))`, clamped.
#[inline]
pub fn boxplus(a: f64, b: f64, clamp: f64) -> f64 {
    let v = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
    v.clamp(-clamp, clamp)
}

/// Left-fold of the box-plus over a nonempty list. A single operand is
/// returned unchanged; every pairwise result is clamped.
pub fn boxplus_fold(values: &[f64], clamp: f64) -> f64 {
    assert!(!values.is_empty(), "box-plus fold over an empty list");
    values[1..]
        .iter()
        .fold(values[0], |acc, &v| boxplus(acc, v, clamp))
}

/// A decoder instance: owns mutable message buffers over a borrowed graph.
/// Single-threaded; run one instance per worker for parallel decoding.
pub struct Decoder<'g> {
    graph: &'g TannerGraph,
    cfg: DecoderConfig,
    channel: Vec<f64>,
    vn_to_cn: Vec<f64>,
    cn_to_vn: Vec<f64>,
    posterior: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g TannerGraph, cfg: DecoderConfig) -> Self {
        let max_degree = (0..graph.cn_count())
            .map(|c| graph.cn_neighbors(c).len())
            .max()
            .unwrap_or(0);
        Decoder {
            graph,
            cfg,
            channel: vec![0.0; graph.vn_count()],
            vn_to_cn: vec![0.0; graph.edge_count()],
            cn_to_vn: vec![0.0; graph.edge_count()],
            posterior: vec![0.0; graph.vn_count()],
            prefix: vec![0.0; max_degree],
            suffix: vec![0.0; max_degree],
        }
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    /// Runs flooding BP on `channel_llrs` (zero entries are erasures).
    pub fn decode(&mut self, channel_llrs: &[f64]) -> DecodeResult {
        let graph = self.graph;
        assert_eq!(
            channel_llrs.len(),
            graph.vn_count(),
            "channel LLR length does not match the graph"
        );
        let clamp = self.cfg.llr_clamp;
        for (dst, &l) in self.channel.iter_mut().zip(channel_llrs) {
            *dst = l.clamp(-clamp, clamp);
        }
        self.posterior.copy_from_slice(&self.channel);

        let mut hard = hard_decision(&self.posterior);
        if self.syndrome_ok(&hard) && self.cfg.early_stop {
            return DecodeResult {
                hard_bits: hard,
                converged: true,
                iters_used: 0,
                posterior_llrs: self.posterior.clone(),
            };
        }

        for v in 0..graph.vn_count() {
            for &e in graph.vn_edges(v) {
                self.vn_to_cn[e] = self.channel[v];
            }
        }

        let mut iters_used = 0;
        for iter in 1..=self.cfg.max_iters {
            iters_used = iter;
            self.update_check_nodes();
            self.update_variable_nodes();
            hard = hard_decision(&self.posterior);
            if self.cfg.early_stop && self.syndrome_ok(&hard) {
                return DecodeResult {
                    hard_bits: hard,
                    converged: true,
                    iters_used,
                    posterior_llrs: self.posterior.clone(),
                };
            }
        }

        let converged = self.syndrome_ok(&hard);
        DecodeResult {
            hard_bits: hard,
            converged,
            iters_used,
            posterior_llrs: self.posterior.clone(),
        }
    }

    fn update_check_nodes(&mut self) {
        let clamp = self.cfg.llr_clamp;
        for c in 0..self.graph.cn_count() {
            let edges = self.graph.cn_edges(c);
            let degree = edges.len();
            match degree {
                0 => {}
                1 => {
                    // A degree-1 check pins its only variable to zero: the
                    // empty extrinsic set yields a saturated message.
                    self.cn_to_vn[edges.start] = clamp;
                }
                _ => match self.cfg.variant {
                    DecoderVariant::SumProduct => self.check_update_sum_product(edges, clamp),
                    DecoderVariant::NormalizedMinSum => self.check_update_min_sum(edges, clamp),
                },
            }
        }
    }

    fn check_update_sum_product(&mut self, edges: std::ops::Range<usize>, clamp: f64) {
        let d = edges.len();
        let base = edges.start;
        // Extrinsic box-plus via prefix/suffix folds.
        self.prefix[0] = self.vn_to_cn[base];
        for i in 1..d {
            self.prefix[i] = boxplus(self.prefix[i - 1], self.vn_to_cn[base + i], clamp);
        }
        self.suffix[d - 1] = self.vn_to_cn[base + d - 1];
        for i in (0..d - 1).rev() {
            self.suffix[i] = boxplus(self.vn_to_cn[base + i], self.suffix[i + 1], clamp);
        }
        self.cn_to_vn[base] = self.suffix[1];
        self.cn_to_vn[base + d - 1] = self.prefix[d - 2];
        for i in 1..d - 1 {
            self.cn_to_vn[base + i] = boxplus(self.prefix[i - 1], self.suffix[i + 1], clamp);
        }
    }

    fn check_update_min_sum(&mut self, edges: std::ops::Range<usize>, clamp: f64) {
        let alpha = self.cfg.alpha;
        let mut sign = 1.0f64;
        let mut min1 = f64::INFINITY;
        let mut min2 = f64::INFINITY;
        let mut argmin = edges.start;
        for e in edges.clone() {
            let m = self.vn_to_cn[e];
            if m < 0.0 {
                sign = -sign;
            }
            let mag = m.abs();
            if mag < min1 {
                min2 = min1;
                min1 = mag;
                argmin = e;
            } else if mag < min2 {
                min2 = mag;
            }
        }
        for e in edges {
            let m = self.vn_to_cn[e];
            let own_sign = if m < 0.0 { -1.0 } else { 1.0 };
            let mag = if e == argmin { min2 } else { min1 };
            self.cn_to_vn[e] = (alpha * sign * own_sign * mag).clamp(-clamp, clamp);
        }
    }

    fn update_variable_nodes(&mut self) {
        let clamp = self.cfg.llr_clamp;
        for v in 0..self.graph.vn_count() {
            let mut total = self.channel[v];
            for &e in self.graph.vn_edges(v) {
                total += self.cn_to_vn[e];
            }
            self.posterior[v] = total;
            for &e in self.graph.vn_edges(v) {
                self.vn_to_cn[e] = (total - self.cn_to_vn[e]).clamp(-clamp, clamp);
            }
        }
    }

    fn syndrome_ok(&self, hard: &BitVector) -> bool {
        (0..self.graph.cn_count()).all(|c| {
            !self
                .graph
                .cn_neighbors(c)
                .iter()
                .fold(false, |parity, &v| parity ^ hard.get(v))
        })
    }

    #[cfg(test)]
    fn max_message_magnitude(&self) -> f64 {
        self.vn_to_cn
            .iter()
            .chain(&self.cn_to_vn)
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }
}

fn hard_decision(llrs: &[f64]) -> BitVector {
    let mut bits = BitVector::zeros(llrs.len());
    for (i, &l) in llrs.iter().enumerate() {
        if l < 0.0 {
            bits.set(i, true);
        }
    }
    bits
}

/// One-shot decode with a fresh decoder instance.
pub fn decode(graph: &TannerGraph, channel_llrs: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    Decoder::new(graph, *cfg).decode(channel_llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;

    fn repetition_graph(n: usize) -> TannerGraph {
        let mut rows = Vec::new();
        for i in 0..n - 1 {
            let mut row = vec![0u8; n];
            row[i] = 1;
            row[i + 1] = 1;
            rows.push(row);
        }
        TannerGraph::from_pcm(&BitMatrix::from_rows(&rows))
    }

    fn hamming_graph() -> TannerGraph {
        let mut h = BitMatrix::zeros(3, 7);
        for c in 0..7u32 {
            for r in 0..3 {
                if (c + 1) >> r & 1 == 1 {
                    h.set(r, c as usize, true);
                }
            }
        }
        TannerGraph::from_pcm(&h)
    }

    #[test]
    fn boxplus_single_operand_is_identity() {
        assert_eq!(boxplus_fold(&[1.75], 30.0), 1.75);
    }

    #[test]
    fn boxplus_zero_absorbs() {
        assert_eq!(boxplus_fold(&[2.0, 0.0], 30.0), 0.0);
        assert_eq!(boxplus_fold(&[0.0, -5.0, 3.0], 30.0), 0.0);
    }

    #[test]
    fn boxplus_of_two_twos() {
        // Independent route: a boxplus b = ln((1 + e^(a+b)) / (e^a + e^b)).
        let expected = ((1.0 + (4.0f64).exp()) / (2.0 * (2.0f64).exp())).ln();
        let got = boxplus_fold(&[2.0, 2.0], 30.0);
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 1.3251).abs() < 1e-3);
    }

    #[test]
    #[should_panic(expected = "empty list")]
    fn boxplus_rejects_empty_list() {
        boxplus_fold(&[], 30.0);
    }

    #[test]
    fn boxplus_magnitude_never_exceeds_min_operand() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..1000 {
            let a = rng.gen_range(-10.0..10.0);
            let b = rng.gen_range(-10.0..10.0);
            let v = boxplus(a, b, 30.0);
            assert!(v.abs() <= a.abs().min(b.abs()) + 1e-12, "a={a} b={b} v={v}");
        }
    }

    #[test]
    fn noiseless_word_converges_without_iterating() {
        let graph = repetition_graph(3);
        let result = decode(&graph, &[20.0, 20.0, 20.0], &DecoderConfig::default());
        assert!(result.converged);
        assert_eq!(result.iters_used, 0);
        assert!(result.hard_bits.is_zero());
    }

    #[test]
    fn corrects_single_flipped_bit_on_hamming() {
        for cfg in [DecoderConfig::default(), DecoderConfig::sum_product()] {
            let graph = hamming_graph();
            let mut llrs = vec![4.0; 7];
            llrs[2] = -1.0;
            let result = decode(&graph, &llrs, &cfg);
            assert!(result.converged, "variant {:?}", cfg.variant);
            assert!(result.hard_bits.is_zero());
        }
    }

    #[test]
    fn tree_posteriors_match_exact_marginals() {
        // On the (n,1) repetition code the exact bitwise MAP LLR is the sum
        // of all channel LLRs, for every bit.
        for n in [3, 5] {
            let graph = repetition_graph(n);
            let cfg = DecoderConfig {
                variant: DecoderVariant::SumProduct,
                early_stop: false,
                max_iters: n,
                ..Default::default()
            };
            use rand::{rngs::StdRng, Rng, SeedableRng};
            let mut rng = StdRng::seed_from_u64(n as u64);
            for _ in 0..100 {
                let llrs: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let total: f64 = llrs.iter().sum();
                let result = decode(&graph, &llrs, &cfg);
                for &p in &result.posterior_llrs {
                    assert!((p - total).abs() < 1e-9, "posterior {p} vs exact {total}");
                }
            }
        }
    }

    #[test]
    fn degree_one_check_pins_its_variable() {
        // Last row of the pruned worked-example matrix is (0 0 0 1 0): the
        // fourth variable must decode to zero even with an erased input.
        let h = BitMatrix::from_rows(&[
            vec![0, 1, 1, 1, 0],
            vec![1, 0, 1, 0, 1],
            vec![1, 0, 0, 0, 1],
            vec![0, 0, 0, 1, 0],
        ]);
        let graph = TannerGraph::from_pcm(&h);
        let cfg = DecoderConfig {
            early_stop: false,
            max_iters: 5,
            ..Default::default()
        };
        let result = decode(&graph, &[6.0, 6.0, 6.0, 0.0, 0.0], &cfg);
        assert!(result.converged);
        assert!(result.hard_bits.is_zero());
        // The degree-1 check saturates its variable toward bit 0.
        assert!(result.posterior_llrs[3] >= cfg.llr_clamp);
    }

    #[test]
    fn messages_stay_within_clamp() {
        let graph = hamming_graph();
        let cfg = DecoderConfig {
            llr_clamp: 8.0,
            early_stop: false,
            max_iters: 20,
            ..Default::default()
        };
        for variant in [DecoderVariant::SumProduct, DecoderVariant::NormalizedMinSum] {
            let mut decoder = Decoder::new(&graph, DecoderConfig { variant, ..cfg });
            let llrs = vec![100.0, -50.0, 3.0, -2.0, 7.5, 0.0, -9.0];
            let _ = decoder.decode(&llrs);
            assert!(decoder.max_message_magnitude() <= 8.0 + 1e-12);
        }
    }

    #[test]
    fn negating_inputs_negates_posteriors() {
        let graph = hamming_graph();
        for variant in [DecoderVariant::SumProduct, DecoderVariant::NormalizedMinSum] {
            let cfg = DecoderConfig {
                variant,
                early_stop: false,
                max_iters: 10,
                ..Default::default()
            };
            let llrs = vec![1.25, -0.5, 2.0, -3.5, 0.75, -1.0, 0.25];
            let neg: Vec<f64> = llrs.iter().map(|&l| -l).collect();
            let a = decode(&graph, &llrs, &cfg);
            let b = decode(&graph, &neg, &cfg);
            for (x, y) in a.posterior_llrs.iter().zip(&b.posterior_llrs) {
                assert!((x + y).abs() < 1e-9, "{x} vs {y}");
            }
            for i in 0..7 {
                if a.posterior_llrs[i].abs() > 1e-9 {
                    assert_ne!(a.hard_bits.get(i), b.hard_bits.get(i));
                }
            }
        }
    }

    #[test]
    fn result_invariants_hold() {
        let graph = hamming_graph();
        let cfg = DecoderConfig::default();
        let llrs = vec![-1.0, 2.0, -0.5, 1.5, -2.0, 0.5, 1.0];
        let result = decode(&graph, &llrs, &cfg);
        assert!(result.iters_used <= cfg.max_iters);
        if result.converged {
            let h = graph.to_pcm();
            assert!(h.mul_vec(&result.hard_bits).is_zero());
        }
    }
}
