//! Ensemble decoding: parallel GAED / iGAED paths over one received frame,
//! reduced by ML-in-the-list selection.
//!
//! A GAED path preprocesses the channel LLRs through the box-plus image of
//! `T`, runs BP on the code graph, and maps the estimate back through
//! `T^-1`. An iGAED path skips the explicit preprocessing: it embeds the
//! channel LLRs into the merged-and-pruned extended graph (preprocessed
//! variables start erased) and reads the original bits straight off the
//! channel variables, no inverse map involved.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automorphism::GenAutomorphism;
use crate::code::{LinearCode, TannerGraph};
use crate::decoder::{boxplus_fold, Decoder, DecoderConfig};
use crate::gf2::{BitMatrix, BitVector};
use crate::graph::{prune_extended, PrunedGraph};
use crate::Error;

/// How a path turns the automorphism into a decoding problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Plain BP on the code graph (Path-1 convention).
    Identity,
    /// Explicit box-plus preprocessing, BP on the code graph, inverse map.
    Gaed,
    /// BP on the pruned extended graph with erased preprocessed variables.
    Igaed,
}

enum Prepared {
    /// Decodes on the code's own Tanner graph (identity and GAED paths).
    OnCode(Arc<TannerGraph>),
    /// Decodes on the pruned extended graph (iGAED paths).
    OnPruned {
        pruned: PrunedGraph,
        tanner: TannerGraph,
    },
}

/// One ensemble path: an automorphism, a mode, and its prepared graph.
pub struct PathSpec {
    automorphism: GenAutomorphism,
    mode: PathMode,
    decoder_cfg: DecoderConfig,
    prepared: Prepared,
}

impl PathSpec {
    /// The conventional Path-1: plain BP with the identity mapping.
    pub fn identity(graph: Arc<TannerGraph>, decoder_cfg: DecoderConfig) -> Self {
        PathSpec {
            automorphism: GenAutomorphism::identity(graph.vn_count()),
            mode: PathMode::Identity,
            decoder_cfg,
            prepared: Prepared::OnCode(graph),
        }
    }

    pub fn gaed(
        automorphism: GenAutomorphism,
        graph: Arc<TannerGraph>,
        decoder_cfg: DecoderConfig,
    ) -> Self {
        assert_eq!(automorphism.n(), graph.vn_count(), "dimension mismatch");
        PathSpec {
            automorphism,
            mode: PathMode::Gaed,
            decoder_cfg,
            prepared: Prepared::OnCode(graph),
        }
    }

    /// Builds the merged-and-pruned graph for `T` and the code's PCM.
    pub fn igaed(
        automorphism: GenAutomorphism,
        h: &BitMatrix,
        decoder_cfg: DecoderConfig,
    ) -> Result<Self, Error> {
        assert_eq!(automorphism.n(), h.cols(), "dimension mismatch");
        let pruned = prune_extended(automorphism.t(), h)?;
        let tanner = TannerGraph::from_pcm(pruned.h_pruned());
        Ok(PathSpec {
            automorphism,
            mode: PathMode::Igaed,
            decoder_cfg,
            prepared: Prepared::OnPruned { pruned, tanner },
        })
    }

    pub fn mode(&self) -> PathMode {
        self.mode
    }

    pub fn automorphism(&self) -> &GenAutomorphism {
        &self.automorphism
    }

    pub fn decoder_cfg(&self) -> &DecoderConfig {
        &self.decoder_cfg
    }

    /// The pruned graph, when this is an iGAED path.
    pub fn pruned_graph(&self) -> Option<&PrunedGraph> {
        match &self.prepared {
            Prepared::OnPruned { pruned, .. } => Some(pruned),
            Prepared::OnCode(_) => None,
        }
    }

    fn decoding_graph(&self) -> &TannerGraph {
        match &self.prepared {
            Prepared::OnCode(g) => g,
            Prepared::OnPruned { tanner, .. } => tanner,
        }
    }

    /// Runs this path on one frame; validity is judged against the original
    /// code, not the path's internal graph.
    pub fn run(&self, llrs: &[f64], code: &LinearCode) -> PathOutput {
        let mut decoder = Decoder::new(self.decoding_graph(), self.decoder_cfg);
        self.run_with(&mut decoder, llrs, code)
    }

    fn run_with(&self, decoder: &mut Decoder<'_>, llrs: &[f64], code: &LinearCode) -> PathOutput {
        match (&self.mode, &self.prepared) {
            (PathMode::Identity, Prepared::OnCode(_)) => {
                let result = decoder.decode(llrs);
                let valid = result.converged && code.is_codeword(&result.hard_bits);
                PathOutput {
                    hard_bits: result.hard_bits,
                    valid,
                    converged: result.converged,
                }
            }
            (PathMode::Gaed, Prepared::OnCode(_)) => {
                let preprocessed =
                    gaed_preprocess(llrs, self.automorphism.t(), self.decoder_cfg.llr_clamp);
                let result = decoder.decode(&preprocessed);
                let candidate = self.automorphism.t_inv().mul_vec(&result.hard_bits);
                let valid = result.converged && code.is_codeword(&candidate);
                PathOutput {
                    hard_bits: candidate,
                    valid,
                    converged: result.converged,
                }
            }
            (PathMode::Igaed, Prepared::OnPruned { pruned, .. }) => {
                let embedded = pruned.embed_llrs(llrs);
                let result = decoder.decode(&embedded);
                let candidate = pruned.read_out(&result.hard_bits);
                let valid = code.is_codeword(&candidate);
                PathOutput {
                    hard_bits: candidate,
                    valid,
                    converged: result.converged,
                }
            }
            _ => unreachable!("mode and prepared graph are constructed together"),
        }
    }
}

/// Raw per-path estimate before list selection.
#[derive(Clone, Debug)]
pub struct PathOutput {
    pub hard_bits: BitVector,
    pub valid: bool,
    pub converged: bool,
}

/// A per-path candidate as scored by the list selection.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub hard_bits: BitVector,
    pub valid: bool,
    pub converged: bool,
    pub correlation: f64,
}

/// Ensemble selection outcome.
#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub chosen: BitVector,
    pub chosen_path: usize,
    pub any_valid: bool,
    pub candidates: Vec<Candidate>,
}

/// The GAED preprocessing: output `j` is the box-plus fold of the channel
/// LLRs over the support of row `j` of `T`.
pub fn gaed_preprocess(llrs: &[f64], t: &BitMatrix, llr_clamp: f64) -> Vec<f64> {
    assert_eq!(llrs.len(), t.cols(), "LLR length does not match T");
    let mut out = Vec::with_capacity(t.rows());
    let mut operands = Vec::new();
    for j in 0..t.rows() {
        operands.clear();
        operands.extend((0..t.cols()).filter(|&i| t.get(j, i)).map(|i| llrs[i]));
        assert!(
            !operands.is_empty(),
            "row {j} of T has weight zero; T cannot be nonsingular"
        );
        out.push(boxplus_fold(&operands, llr_clamp));
    }
    out
}

/// Correlation metric `sum_i (1 - 2 x_i) L_i`: the inner product of the
/// candidate's BPSK image with the channel LLRs.
pub fn correlation(x: &BitVector, llrs: &[f64]) -> f64 {
    assert_eq!(x.len(), llrs.len(), "length mismatch in correlation");
    llrs.iter()
        .enumerate()
        .map(|(i, &l)| if x.get(i) { -l } else { l })
        .sum()
}

/// Selects the output among candidates: highest correlation among the valid
/// ones; if none is valid, highest correlation overall. Ties break toward
/// the lowest path index.
pub fn ml_in_the_list(outputs: Vec<PathOutput>, llrs: &[f64]) -> EnsembleResult {
    assert!(!outputs.is_empty(), "ML-in-the-list needs at least one candidate");
    let candidates: Vec<Candidate> = outputs
        .into_iter()
        .map(|o| Candidate {
            correlation: correlation(&o.hard_bits, llrs),
            hard_bits: o.hard_bits,
            valid: o.valid,
            converged: o.converged,
        })
        .collect();
    let any_valid = candidates.iter().any(|c| c.valid);
    let mut chosen_path = None;
    for (idx, c) in candidates.iter().enumerate() {
        if any_valid && !c.valid {
            continue;
        }
        match chosen_path {
            None => chosen_path = Some(idx),
            Some(best) => {
                if c.correlation > candidates[best].correlation {
                    chosen_path = Some(idx);
                }
            }
        }
    }
    let chosen_path = chosen_path.expect("at least one candidate");
    EnsembleResult {
        chosen: candidates[chosen_path].hard_bits.clone(),
        chosen_path,
        any_valid,
        candidates,
    }
}

/// A fixed list of paths over one code. Path 0 is the identity path by
/// convention; constructors in the simulation layer enforce that.
pub struct Ensemble {
    code: Arc<LinearCode>,
    paths: Vec<PathSpec>,
}

impl Ensemble {
    pub fn new(code: Arc<LinearCode>, paths: Vec<PathSpec>) -> Self {
        assert!(!paths.is_empty(), "an ensemble needs at least one path");
        Ensemble { code, paths }
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn paths(&self) -> &[PathSpec] {
        &self.paths
    }

    /// Runs every path on the frame and reduces with ML-in-the-list.
    pub fn decode(&self, llrs: &[f64]) -> EnsembleResult {
        let outputs: Vec<PathOutput> = self
            .paths
            .iter()
            .map(|p| p.run(llrs, &self.code))
            .collect();
        ml_in_the_list(outputs, llrs)
    }
}
