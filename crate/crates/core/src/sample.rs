//! Seeded sampling with per-cell streams and a resampling budget.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rat::{self, Rat};
use crate::symplectic::{GroupShape, NilpotentPair};

/// Attempts per genericity failure before a cell is declared inconclusive.
pub const RESAMPLE_BUDGET: usize = 100;

pub const DEFAULT_BOUND: i64 = 10;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3))
}

/// Seed for one independent cell; independent of evaluation order.
pub fn cell_seed(master: u64, suite: &str, r: usize, m: usize, idx: u64) -> u64 {
    let mut h = splitmix64(master);
    for v in [fnv1a(suite), r as u64, m as u64, idx] {
        h = splitmix64(h ^ v);
    }
    h
}

pub fn cell_rng(master: u64, suite: &str, r: usize, m: usize, idx: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cell_seed(master, suite, r, m, idx))
}

pub fn random_symmetric<R: rand::Rng + ?Sized>(rng: &mut R, r: usize, bound: i64) -> Mat {
    let mut z = Mat::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let v = rat::random(rng, bound);
            z[(i, j)] = v.clone();
            z[(j, i)] = v;
        }
    }
    z
}

/// Uniform-ish random `n(X, Z)` with independent entries.
pub fn random_pair<R: rand::Rng + ?Sized>(rng: &mut R, shape: GroupShape, bound: i64) -> NilpotentPair {
    let x = Mat::random(rng, shape.r, 2 * shape.m, bound);
    let z = random_symmetric(rng, shape.r, bound);
    NilpotentPair::from_xz(shape, x, z).expect("symmetric by construction")
}

pub fn random_unit_rat<R: rand::Rng + ?Sized>(rng: &mut R, bound: i64) -> Rat {
    rat::random_nonzero(rng, bound)
}

/// Outcome of a resampled draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<T> {
    pub value: T,
    pub attempts: usize,
}

/// Calls `f` until it stops returning a non-generic error, at most
/// [`RESAMPLE_BUDGET`] times. Other errors propagate immediately.
pub fn resample<T, R, F>(rng: &mut R, mut f: F) -> Result<Sampled<T>>
where
    R: rand::Rng + ?Sized,
    F: FnMut(&mut R) -> Result<T>,
{
    let mut last = String::new();
    for attempt in 1..=RESAMPLE_BUDGET {
        match f(rng) {
            Ok(value) => return Ok(Sampled { value, attempts: attempt }),
            Err(Error::NonGeneric { site }) => last = site,
            Err(e) => return Err(e),
        }
    }
    Err(Error::non_generic(format!("resample budget exhausted, last failure at {last}")))
}
