use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic stream keyed by `(seed, a, b)`; used as `(seed, node, round)`
/// and `(seed, class, 0)`.
pub fn stream(seed: u64, a: u64, b: u64) -> Rng {
    let k = splitmix(splitmix(splitmix(seed) ^ a) ^ b.rotate_left(17));
    Rng::seed_from_u64(k)
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
