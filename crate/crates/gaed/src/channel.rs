//! BPSK over the binary-input AWGN channel: Eb/N0 bookkeeping, LLR
//! generation, and reproducible per-frame random streams.
//!
//! Noise is drawn once and multiplied by the transmitted symbol, which keeps
//! the noise exactly Gaussian while making the LLR vector of a codeword the
//! sign-flipped LLR vector of its complement under the same draw. That exact
//! symmetry is what justifies the all-zero-codeword shortcut.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::gf2::BitVector;

/// BI-AWGN operating point. `sigma` is derived from Eb/N0 and the code rate
/// with unit symbol energy: `sigma^2 = 1 / (2 * rate * 10^(ebn0_db/10))`.
#[derive(Clone, Copy, Debug)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Self {
        ChannelParams {
            ebn0_db,
            rate,
            sigma: ebn0_to_sigma(ebn0_db, rate),
        }
    }
}

/// Noise standard deviation for a given Eb/N0 (dB) and code rate.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> f64 {
    assert!(
        rate > 0.0 && rate <= 1.0,
        "code rate must be in (0, 1], got {rate}"
    );
    let ebn0 = 10.0f64.powf(ebn0_db / 10.0);
    (1.0 / (2.0 * rate * ebn0)).sqrt()
}

/// One transmitted frame: noisy symbols and their channel LLRs.
#[derive(Clone, Debug)]
pub struct TransmittedFrame {
    pub received: Vec<f64>,
    pub llrs: Vec<f64>,
}

/// Modulates `codeword` with BPSK (bit 0 -> +1), adds Gaussian noise from
/// `rng`, and maps to LLRs `2 y / sigma^2`. Positive LLR favors bit 0.
pub fn transmit_frame(
    codeword: &BitVector,
    params: &ChannelParams,
    rng: &mut impl Rng,
) -> TransmittedFrame {
    let sigma = params.sigma;
    let scale = 2.0 / (sigma * sigma);
    let mut received = Vec::with_capacity(codeword.len());
    let mut llrs = Vec::with_capacity(codeword.len());
    for bit in codeword.iter_bits() {
        let symbol = if bit { -1.0 } else { 1.0 };
        let z: f64 = rng.sample(StandardNormal);
        let y = symbol * (1.0 + sigma * z);
        received.push(y);
        llrs.push(scale * y);
    }
    TransmittedFrame { received, llrs }
}

/// Deterministic per-frame random stream derived from the master seed, the
/// SNR-point index, and the frame index. Frames are reproducible under any
/// worker scheduling.
pub fn frame_rng(master_seed: u64, snr_index: usize, frame_index: u64) -> ChaCha8Rng {
    let mut state = master_seed
        ^ (snr_index as u64).wrapping_mul(0xA24B_AED4_963E_E407)
        ^ frame_index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_closed_forms() {
        assert!((ebn0_to_sigma(0.0, 0.5) - 1.0).abs() < 1e-12);
        // 10 log10(2) dB doubles Eb/N0.
        let db_for_2 = 10.0 * 2.0f64.log10();
        assert!((ebn0_to_sigma(db_for_2, 0.5) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((ebn0_to_sigma(0.0, 1.0) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "code rate")]
    fn sigma_rejects_nonpositive_rate() {
        ebn0_to_sigma(0.0, 0.0);
    }

    #[test]
    fn high_snr_llr_signs_match_symbols() {
        let params = ChannelParams::new(40.0, 0.5);
        let codeword = BitVector::from_bits(&[0, 1, 0, 1, 1, 0, 0, 1]);
        let mut rng = frame_rng(1, 0, 0);
        let frame = transmit_frame(&codeword, &params, &mut rng);
        for (llr, bit) in frame.llrs.iter().zip(codeword.iter_bits()) {
            assert_eq!(*llr < 0.0, bit);
        }
    }

    #[test]
    fn fixed_seed_reproduces_llrs() {
        let params = ChannelParams::new(2.0, 0.5);
        let codeword = BitVector::from_bits(&[0, 1, 1, 0]);
        let a = transmit_frame(&codeword, &params, &mut frame_rng(7, 3, 99));
        let b = transmit_frame(&codeword, &params, &mut frame_rng(7, 3, 99));
        assert_eq!(a.llrs, b.llrs);
        assert_eq!(a.received, b.received);
    }

    #[test]
    fn distinct_frames_get_distinct_streams() {
        let params = ChannelParams::new(2.0, 0.5);
        let codeword = BitVector::from_bits(&[0, 0, 0, 0]);
        let a = transmit_frame(&codeword, &params, &mut frame_rng(7, 3, 99));
        let b = transmit_frame(&codeword, &params, &mut frame_rng(7, 3, 100));
        let c = transmit_frame(&codeword, &params, &mut frame_rng(7, 4, 99));
        assert_ne!(a.llrs, b.llrs);
        assert_ne!(a.llrs, c.llrs);
    }

    #[test]
    fn all_one_llrs_are_negated_all_zero_llrs() {
        let params = ChannelParams::new(1.0, 0.5);
        let n = 16;
        let zero = BitVector::zeros(n);
        let one = BitVector::from_bits(&vec![1; n]);
        let a = transmit_frame(&zero, &params, &mut frame_rng(5, 0, 42));
        let b = transmit_frame(&one, &params, &mut frame_rng(5, 0, 42));
        for (x, y) in a.llrs.iter().zip(&b.llrs) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn llr_mean_matches_theory_for_bit_zero() {
        let params = ChannelParams::new(0.0, 0.5); // sigma = 1
        let codeword = BitVector::zeros(1);
        let draws = 1_000_000u64;
        let mut sum = 0.0;
        for f in 0..draws {
            let frame = transmit_frame(&codeword, &params, &mut frame_rng(11, 0, f));
            sum += frame.llrs[0];
        }
        let mean = sum / draws as f64;
        // E[L] = 2 / sigma^2 = 2; sd(L) = 2 / sigma = 2.
        let standard_error = 2.0 / (draws as f64).sqrt();
        assert!(
            (mean - 2.0).abs() < 3.0 * standard_error,
            "mean {mean} outside 3 standard errors"
        );
    }
}
