//! Counter-based random streams and circularly-symmetric Gaussian sampling.
//!
//! Each Monte Carlo trial draws from an independent substream derived from
//! (seed, trial index), so estimates are identical for any work-splitting
//! across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The simulation generator. ChaCha with an explicit stream counter: the
/// key comes from the user seed, the 64-bit stream from the trial index.
pub type SimRng = ChaCha8Rng;

/// Independent substream for trial `trial` of run `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Fill `out` with i.i.d. unit-variance circularly-symmetric complex
/// Gaussians: real and imaginary parts are independent N(0, 1/2).
#[inline]
pub fn fill_complex_gaussian<R: Rng + ?Sized>(rng: &mut R, out: &mut [Complex64]) {
    for slot in out {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *slot = Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
    }
}

/// `n` fresh unit-variance circularly-symmetric complex Gaussians.
pub fn sample_complex_gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n];
    fill_complex_gaussian(rng, &mut out);
    out
}
