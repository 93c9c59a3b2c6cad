//! Deterministic per-operation random sources.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Operation salts keep independent searches decorrelated under one master
/// seed while staying reproducible.
#[derive(Debug, Clone, Copy)]
pub enum Salt {
    OracleProbe = 1,
    Legendre = 2,
    Oscillation = 3,
    Certificate = 4,
    SphereAverage = 5,
    Mollify = 6,
    HitAndRun = 7,
    RatioSearch = 8,
    NormProbe = 9,
}

pub fn rng_for(seed: u64, salt: Salt) -> ChaCha8Rng {
    // splitmix-style scramble so nearby seeds do not produce nearby streams
    let mut z = seed ^ ((salt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}
