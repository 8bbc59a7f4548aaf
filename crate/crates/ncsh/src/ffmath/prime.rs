//! Miller-Rabin primality testing and random prime generation.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use super::{mod_pow, FfError, FfResult};

/// Rounds used for key generation; error probability below 4^-40.
pub const KEYGEN_ROUNDS: u32 = 40;

/// Probabilistic primality test. For n < 2048 this is deterministic trial
/// division; above that, Miller-Rabin with `rounds` random bases drawn from
/// the supplied rng, so the false-positive rate is under 4^-rounds.
pub fn is_probable_prime_with<R: Rng + ?Sized>(n: &BigUint, rounds: u32, rng: &mut R) -> bool {
    assert!(rounds >= 1, "rounds must be >= 1");
    if *n < BigUint::from(2048u16) {
        let small = n.to_u64_digits().first().copied().unwrap_or(0);
        if small < 2 {
            return false;
        }
        return (2..small).take_while(|d| d * d <= small).all(|d| small % d != 0);
    }

    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if (n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = n - &one;
    // n - 1 = d * 2^s with d odd
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = mod_pow(&a, &d, n).expect("modulus >= 2");
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `is_probable_prime_with` using the thread-local rng for witness bases.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    is_probable_prime_with(n, rounds, &mut rand::thread_rng())
}

/// Generates a random prime with exactly `bits` bits (top bit set), odd,
/// passing 40 Miller-Rabin rounds.
pub fn gen_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> FfResult<BigUint> {
    if bits < 8 {
        return Err(FfError::InvalidArgument("prime size must be >= 8 bits"));
    }
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if is_probable_prime_with(&candidate, KEYGEN_ROUNDS, rng) {
            return Ok(candidate);
        }
    }
}
