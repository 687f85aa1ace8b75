//! Monte-Carlo FER/BER sweeps over BI-AWGN, the brute-force ML oracle, and
//! CSV emission.
//!
//! Frames are simulated in fixed-size batches with per-frame random streams
//! and folded in frame order, so a sweep produces the same counts as a
//! serial run no matter how many workers execute it.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphism;
use crate::channel::{frame_rng, transmit_frame, ChannelParams};
use crate::code::{self, LinearCode, TannerGraph};
use crate::decoder::DecoderConfig;
use crate::ensemble::{Ensemble, PathMode, PathSpec};
use crate::gf2::{BitVector, ENUMERATION_CAP_K};
use crate::Error;

/// Frames per dispatch batch. Stop conditions are evaluated frame by frame
/// inside each collected batch, which keeps results worker-independent; the
/// batch size only bounds wasted work past the stopping frame.
const BATCH_FRAMES: u64 = 1024;

/// Codeword selection per frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmitMode {
    /// Uniform information words through the generator basis. Exercises the
    /// automorphism post-processing, which the all-zero shortcut would mask.
    #[default]
    Random,
    /// All-zero codeword shortcut.
    AllZero,
}

/// One auxiliary path: an exponent of the loaded transformation matrix and
/// the path construction to use. Path-1 (identity) is always implicit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PathEntry {
    pub exp: i32,
    #[serde(default = "default_path_mode")]
    pub mode: PathMode,
}

fn default_path_mode() -> PathMode {
    PathMode::Igaed
}

/// Sweep configuration, read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Parity-check matrix file (`.alist` or dense text).
    pub code_file: PathBuf,
    /// Transformation matrix file (dense text); required when `paths` is
    /// nonempty.
    #[serde(default)]
    pub t_file: Option<PathBuf>,
    /// Auxiliary paths, e.g. `[{"exp": 1}, {"exp": -1}]`.
    #[serde(default)]
    pub paths: Vec<PathEntry>,
    #[serde(default)]
    pub decoder: DecoderConfig,
    /// Eb/N0 grid in dB.
    pub ebn0_db: Vec<f64>,
    #[serde(default = "default_min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub transmit: TransmitMode,
    /// Accept transformation matrices that fail automorphism verification.
    #[serde(default)]
    pub force_unverified: bool,
    /// Record wall-clock seconds in the CSV; disable for byte-reproducible
    /// output.
    #[serde(default = "default_true")]
    pub timing: bool,
}

fn default_min_frame_errors() -> u64 {
    400
}
fn default_max_frames() -> u64 {
    100_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_true() -> bool {
    true
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidConfig("ebn0_db grid is empty".into()));
        }
        if self.min_frame_errors == 0 {
            return Err(Error::InvalidConfig("min_frame_errors must be at least 1".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidConfig("max_frames must be at least 1".into()));
        }
        self.decoder.validate()?;
        for entry in &self.paths {
            if entry.mode == PathMode::Identity {
                return Err(Error::InvalidConfig(
                    "auxiliary paths must be gaed or igaed; Path-1 is the implicit identity".into(),
                ));
            }
            if !automorphism::SUPPORTED_EXPONENTS.contains(&entry.exp) {
                return Err(Error::InvalidConfig(format!(
                    "unsupported exponent {}; supported: {:?}",
                    entry.exp,
                    automorphism::SUPPORTED_EXPONENTS
                )));
            }
        }
        if !self.paths.is_empty() && self.t_file.is_none() {
            return Err(Error::InvalidConfig(
                "auxiliary paths requested but no t_file given".into(),
            ));
        }
        Ok(())
    }
}

/// One Eb/N0 point of a finished sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SimResultRow {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub wall_seconds: f64,
}

pub const CSV_HEADER: &str = "ebn0_db,frames,bit_errors,frame_errors,fer,ber,wall_seconds";

impl SimResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.6e},{:.6e},{:.3}",
            self.ebn0_db,
            self.frames,
            self.bit_errors,
            self.frame_errors,
            self.fer,
            self.ber,
            self.wall_seconds
        )
    }
}

/// Renders rows as a CSV document with header.
pub fn csv_string(rows: &[SimResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

struct FrameOutcome {
    bit_errors: u64,
    frame_error: bool,
}

/// A loaded, verified simulation: code, ensemble, and sweep parameters.
pub struct Simulation {
    cfg: SimConfig,
    code: Arc<LinearCode>,
    ensemble: Ensemble,
}

impl Simulation {
    /// Loads code and transformation files, verifies the transformation
    /// (unless forced), and builds the path list: implicit identity Path-1
    /// followed by the configured auxiliary paths.
    pub fn load(cfg: SimConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let h = code::load_pcm(&cfg.code_file)?;
        let code = Arc::new(LinearCode::from_pcm(h)?);
        let graph = Arc::new(TannerGraph::from_pcm(code.h()));
        let mut paths = vec![PathSpec::identity(graph.clone(), cfg.decoder)];
        if !cfg.paths.is_empty() {
            let t_file = cfg.t_file.as_ref().expect("validated");
            let loaded = automorphism::load_transformation(t_file, &code, cfg.force_unverified)?;
            for entry in &cfg.paths {
                let power = automorphism::automorphism_powers(loaded.t(), &[entry.exp])?
                    .pop()
                    .expect("one exponent in, one automorphism out");
                let path = match entry.mode {
                    PathMode::Gaed => PathSpec::gaed(power, graph.clone(), cfg.decoder),
                    PathMode::Igaed => PathSpec::igaed(power, code.h(), cfg.decoder)?,
                    PathMode::Identity => unreachable!("rejected by validate"),
                };
                paths.push(path);
            }
        }
        let ensemble = Ensemble::new(code.clone(), paths);
        Ok(Simulation { cfg, code, ensemble })
    }

    pub fn code(&self) -> &Arc<LinearCode> {
        &self.code
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Display name in the usual `GAED-K-BP-p` convention.
    pub fn label(&self) -> String {
        let k = self.ensemble.paths().len();
        let p = self.cfg.decoder.max_iters;
        if k == 1 {
            return format!("BP-{p}");
        }
        let modes: Vec<PathMode> = self.ensemble.paths()[1..].iter().map(|s| s.mode()).collect();
        if modes.iter().all(|&m| m == PathMode::Igaed) {
            format!("iGAED-{k}-BP-{p}")
        } else if modes.iter().all(|&m| m == PathMode::Gaed) {
            format!("GAED-{k}-BP-{p}")
        } else {
            format!("ENS-{k}-BP-{p}")
        }
    }

    /// Runs the ensemble sweep over the configured Eb/N0 grid.
    pub fn run_sweep(&self) -> Vec<SimResultRow> {
        self.with_pool(|| {
            sweep_points(&self.cfg, self.code.rate(), self.code.n(), |snr_index, frame, params| {
                self.simulate_frame(snr_index, frame, params)
            })
        })
    }

    /// Runs a brute-force ML sweep over the same grid and frames.
    pub fn run_ml_sweep(&self) -> Result<Vec<SimResultRow>, Error> {
        if self.code.k() > ENUMERATION_CAP_K {
            return Err(Error::EnumerationTooLarge {
                k: self.code.k(),
                cap: ENUMERATION_CAP_K,
            });
        }
        Ok(self.with_pool(|| {
            sweep_points(&self.cfg, self.code.rate(), self.code.n(), |snr_index, frame, params| {
                let (codeword, llrs) = self.draw_frame(snr_index, frame, params);
                let decoded = bruteforce_ml_decode(&self.code, &llrs).expect("k checked above");
                outcome(&decoded, &codeword)
            })
        }))
    }

    fn with_pool<T: Send>(&self, run: impl FnOnce() -> T + Send) -> T {
        match self.cfg.workers {
            0 => run(),
            w => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("failed to build worker pool")
                .install(run),
        }
    }

    fn draw_frame(
        &self,
        snr_index: usize,
        frame_index: u64,
        params: &ChannelParams,
    ) -> (BitVector, Vec<f64>) {
        let mut rng = frame_rng(self.cfg.seed, snr_index, frame_index);
        let codeword = match self.cfg.transmit {
            TransmitMode::AllZero => BitVector::zeros(self.code.n()),
            TransmitMode::Random => {
                use rand::Rng;
                let mut info = BitVector::zeros(self.code.k());
                for i in 0..self.code.k() {
                    if rng.gen::<bool>() {
                        info.set(i, true);
                    }
                }
                self.code.encode(&info)
            }
        };
        let frame = transmit_frame(&codeword, params, &mut rng);
        (codeword, frame.llrs)
    }

    fn simulate_frame(
        &self,
        snr_index: usize,
        frame_index: u64,
        params: &ChannelParams,
    ) -> FrameOutcome {
        let (codeword, llrs) = self.draw_frame(snr_index, frame_index, params);
        let result = self.ensemble.decode(&llrs);
        outcome(&result.chosen, &codeword)
    }
}

fn outcome(decoded: &BitVector, transmitted: &BitVector) -> FrameOutcome {
    let bit_errors = decoded.hamming_distance(transmitted) as u64;
    FrameOutcome {
        bit_errors,
        frame_error: bit_errors > 0,
    }
}

fn verbose() -> bool {
    std::env::var("ENSEMBLE_LOG").is_ok_and(|v| !v.is_empty() && v != "0")
}

/// The generic per-point loop: batches of frames run in parallel, outcomes
/// folded in frame order until the stop rule fires.
fn sweep_points(
    cfg: &SimConfig,
    rate: f64,
    n: usize,
    frame_fn: impl Fn(usize, u64, &ChannelParams) -> FrameOutcome + Sync,
) -> Vec<SimResultRow> {
    let mut rows = Vec::with_capacity(cfg.ebn0_db.len());
    for (snr_index, &ebn0_db) in cfg.ebn0_db.iter().enumerate() {
        let params = ChannelParams::new(ebn0_db, rate);
        let start = Instant::now();
        let mut frames = 0u64;
        let mut frame_errors = 0u64;
        let mut bit_errors = 0u64;
        'point: while frames < cfg.max_frames && frame_errors < cfg.min_frame_errors {
            let batch = BATCH_FRAMES.min(cfg.max_frames - frames);
            let outcomes: Vec<FrameOutcome> = (frames..frames + batch)
                .into_par_iter()
                .map(|f| frame_fn(snr_index, f, &params))
                .collect();
            for o in outcomes {
                frames += 1;
                if o.frame_error {
                    frame_errors += 1;
                    bit_errors += o.bit_errors;
                }
                if frame_errors >= cfg.min_frame_errors {
                    break 'point;
                }
            }
            if verbose() && frames % (BATCH_FRAMES * 256) == 0 {
                eprintln!(
                    "[{ebn0_db} dB] {frames} frames, {frame_errors} frame errors so far"
                );
            }
        }
        let wall_seconds = if cfg.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        let row = SimResultRow {
            ebn0_db,
            frames,
            bit_errors,
            frame_errors,
            fer: frame_errors as f64 / frames as f64,
            ber: bit_errors as f64 / (frames as f64 * n as f64),
            wall_seconds,
        };
        if verbose() {
            eprintln!("[{ebn0_db} dB] done: {}", row.csv_line());
        }
        rows.push(row);
    }
    rows
}

/// Exact maximum-likelihood decoding by enumerating all 2^k codewords in
/// Gray-code order; ties resolve to the lexicographically smallest codeword.
pub fn bruteforce_ml_decode(code: &LinearCode, llrs: &[f64]) -> Result<BitVector, Error> {
    let k = code.k();
    if k > ENUMERATION_CAP_K {
        return Err(Error::EnumerationTooLarge {
            k,
            cap: ENUMERATION_CAP_K,
        });
    }
    assert_eq!(llrs.len(), code.n(), "LLR length does not match the code");
    let generators = code.generator();
    let mut current = BitVector::zeros(code.n());
    let mut correlation: f64 = llrs.iter().sum();
    let mut best = current.clone();
    let mut best_correlation = correlation;
    for i in 1u64..(1u64 << k) {
        let g = &generators[i.trailing_zeros() as usize];
        for idx in g.ones() {
            correlation += if current.get(idx) {
                2.0 * llrs[idx]
            } else {
                -2.0 * llrs[idx]
            };
            current.flip(idx);
        }
        if correlation > best_correlation
            || (correlation == best_correlation && current < best)
        {
            best_correlation = correlation;
            best = current.clone();
        }
    }
    Ok(best)
}
