//! Extended Tanner graph construction and pruning.
//!
//! The preprocessing induced by a transformation matrix `T` is itself a
//! Tanner graph: the LDGM block `[T | I]` stacked on top of `[0 | H]` couples
//! the n channel variables to n preprocessed variables. Rows of `T` with a
//! single one create degree-2 preprocessing checks, which are pruned by
//! merging the preprocessed variable into its channel variable.

use crate::gf2::{BitMatrix, BitVector};
use crate::Error;

/// What a variable node of the pruned graph stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VnKind {
    /// Estimates original code bit `bit`. When `merged` is set the node also
    /// carries preprocessed bit `merged`: its degree-2 check was pruned and
    /// the two variables coincide.
    Channel { bit: usize, merged: Option<usize> },
    /// Preprocessed bit `preprocessed`; receives no channel observation.
    Erased { preprocessed: usize },
}

/// The merged-and-pruned decoding graph for one iGAED path.
#[derive(Clone, Debug)]
pub struct PrunedGraph {
    h_pruned: BitMatrix,
    vn_map: Vec<VnKind>,
    readout: Vec<usize>,
    n: usize,
    m: usize,
}

/// Stacks the preprocessing block on top of the code constraints:
/// `[[T, I], [0, H]]`, an `(n+m) x 2n` parity-check matrix.
pub fn build_extended_pcm(t: &BitMatrix, h: &BitMatrix) -> BitMatrix {
    let n = h.cols();
    assert!(
        t.is_square() && t.rows() == n,
        "transformation matrix must be {n}x{n} to match the {m}x{n} PCM",
        m = h.rows()
    );
    let m = h.rows();
    let mut ext = BitMatrix::zeros(n + m, 2 * n);
    for r in 0..n {
        for c in 0..n {
            if t.get(r, c) {
                ext.set(r, c, true);
            }
        }
        ext.set(r, n + r, true);
    }
    for r in 0..m {
        for c in 0..n {
            if h.get(r, c) {
                ext.set(n + r, n + c, true);
            }
        }
    }
    ext
}

/// Builds the extended graph and prunes every degree-2 preprocessing check.
///
/// For each weight-1 row `j` of `T` with support `{i}`, the preprocessed
/// variable `v_tau_j` is merged into channel variable `v_i` (column addition)
/// and both the check row `j` and the column of `v_tau_j` are removed.
/// Rows of weight 2 or more are left untouched.
pub fn prune_extended(t: &BitMatrix, h: &BitMatrix) -> Result<PrunedGraph, Error> {
    if t.inverse().is_none() {
        return Err(Error::Singular);
    }
    let n = h.cols();
    let m = h.rows();
    let mut ext = build_extended_pcm(t, h);

    // merged_with[j] = Some(i) when preprocessing row j collapses onto bit i.
    let mut merged_with: Vec<Option<usize>> = vec![None; n];
    let mut merge_target_seen = vec![false; n];
    for j in 0..n {
        if t.row_weight(j) == 1 {
            let i = t.row_support(j)[0];
            // Two weight-1 rows sharing a support would make T singular.
            assert!(!merge_target_seen[i], "duplicate weight-1 rows in nonsingular T");
            merge_target_seen[i] = true;
            merged_with[j] = Some(i);
        }
    }

    // Column additions: v_tau_j's column lands on v_i's column. The identity
    // block guarantees column n+j touches no other preprocessing row, so the
    // merge order cannot matter.
    for (j, target) in merged_with.iter().enumerate() {
        if let Some(i) = target {
            for r in 0..n + m {
                if ext.get(r, n + j) {
                    let v = ext.get(r, *i);
                    ext.set(r, *i, !v);
                }
            }
        }
    }

    let keep_rows: Vec<usize> = (0..n + m)
        .filter(|&r| r >= n || merged_with[r].is_none())
        .collect();
    let mut vn_map = Vec::with_capacity(2 * n);
    let mut keep_cols = Vec::with_capacity(2 * n);
    let mut merged_onto = vec![None; n];
    for (j, target) in merged_with.iter().enumerate() {
        if let Some(i) = target {
            merged_onto[*i] = Some(j);
        }
    }
    for c in 0..n {
        keep_cols.push(c);
        vn_map.push(VnKind::Channel {
            bit: c,
            merged: merged_onto[c],
        });
    }
    for j in 0..n {
        if merged_with[j].is_none() {
            keep_cols.push(n + j);
            vn_map.push(VnKind::Erased { preprocessed: j });
        }
    }

    let mut h_pruned = BitMatrix::zeros(keep_rows.len(), keep_cols.len());
    for (new_r, &r) in keep_rows.iter().enumerate() {
        for (new_c, &c) in keep_cols.iter().enumerate() {
            if ext.get(r, c) {
                h_pruned.set(new_r, new_c, true);
            }
        }
    }

    let mut readout = vec![usize::MAX; n];
    for (vn, kind) in vn_map.iter().enumerate() {
        if let VnKind::Channel { bit, .. } = kind {
            debug_assert_eq!(readout[*bit], usize::MAX);
            readout[*bit] = vn;
        }
    }
    debug_assert!(readout.iter().all(|&vn| vn != usize::MAX));

    Ok(PrunedGraph {
        h_pruned,
        vn_map,
        readout,
        n,
        m,
    })
}

impl PrunedGraph {
    pub fn h_pruned(&self) -> &BitMatrix {
        &self.h_pruned
    }

    pub fn vn_map(&self) -> &[VnKind] {
        &self.vn_map
    }

    /// Pruned VN index that estimates original bit `i`.
    pub fn readout(&self) -> &[usize] {
        &self.readout
    }

    /// Original code block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Original PCM row count.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vn_count(&self) -> usize {
        self.vn_map.len()
    }

    /// Extends channel LLRs over the pruned graph: channel variables take
    /// their observation, erased preprocessed variables take zero.
    pub fn embed_llrs(&self, channel_llrs: &[f64]) -> Vec<f64> {
        assert_eq!(channel_llrs.len(), self.n, "channel LLR length mismatch");
        self.vn_map
            .iter()
            .map(|kind| match kind {
                VnKind::Channel { bit, .. } => channel_llrs[*bit],
                VnKind::Erased { .. } => 0.0,
            })
            .collect()
    }

    /// Projects hard decisions on the pruned graph down to the original bits.
    pub fn read_out(&self, pruned_bits: &BitVector) -> BitVector {
        assert_eq!(pruned_bits.len(), self.vn_count(), "pruned word length mismatch");
        let mut x = BitVector::zeros(self.n);
        for (i, &vn) in self.readout.iter().enumerate() {
            if pruned_bits.get(vn) {
                x.set(i, true);
            }
        }
        x
    }

    /// Projects an extended codeword `(x, Tx)` onto the pruned variables,
    /// dropping the merged coordinates.
    pub fn project_extended(&self, extended: &BitVector) -> BitVector {
        assert_eq!(extended.len(), 2 * self.n, "extended word length mismatch");
        let mut y = BitVector::zeros(self.vn_count());
        for (vn, kind) in self.vn_map.iter().enumerate() {
            let bit = match kind {
                VnKind::Channel { bit, .. } => extended.get(*bit),
                VnKind::Erased { preprocessed } => extended.get(self.n + preprocessed),
            };
            if bit {
                y.set(vn, true);
            }
        }
        y
    }
}
