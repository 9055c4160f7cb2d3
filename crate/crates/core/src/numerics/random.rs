//! Seeded randomness.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed from a
//! 64-bit seed through `rand_core`'s `seed_from_u64` (PCG32 expansion).
//! ChaCha output is specified bit-for-bit, so a seed yields the same stream
//! on every platform. Gaussian variates use the ziggurat sampler of
//! `rand_distr::StandardNormal`; field elements use unbiased rejection
//! sampling from `rand`'s integer range sampler.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::field::{Fp, PrimeFieldMatrix, MODULUS};
use super::matrix::{DenseMatrix, Real};
use super::NumericsError;

/// Name of the generator behind [`SeededRng`], recorded in outputs.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64";

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `master` with [`mix64`]: `h ← mix64(h ^ mix64(part))`
/// for each part in order. Used to give every unit of work its own stream
/// independent of scheduling.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(master), |h, &part| mix64(h ^ mix64(part)))
}

fn check_shape(rows: usize, cols: usize) -> Result<(), NumericsError> {
    if rows == 0 || cols == 0 {
        return Err(NumericsError::Shape(format!(
            "sample shape must be positive, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// `rows x cols` matrix of independent standard normal draws, filled in
/// row-major order.
pub fn sample_standard_normal<T>(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
) -> Result<DenseMatrix<T>, NumericsError>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    check_shape(rows, cols)?;
    Ok(DenseMatrix::from_fn(rows, cols, |_, _| {
        StandardNormal.sample(rng)
    }))
}

/// `rows x cols` matrix of uniform residues modulo the field prime.
pub fn sample_uniform_field(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
) -> Result<PrimeFieldMatrix, NumericsError> {
    check_shape(rows, cols)?;
    Ok(DenseMatrix::from_fn(rows, cols, |_, _| {
        Fp::new(rng.gen_range(0..MODULUS))
    }))
}
