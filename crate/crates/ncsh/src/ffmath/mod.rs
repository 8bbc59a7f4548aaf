//! Finite-field and number-theory core.
//!
//! GF(p) arithmetic with extended-Euclidean inversion, GF(2^8) arithmetic
//! for the block cipher, modular exponentiation, and probabilistic prime
//! generation. All operations are pure functions of their inputs; the only
//! stateful input is a caller-supplied random source.

mod gf256;
mod gfp;
mod prime;

pub use gf256::Gf256;
pub use gfp::PrimeField;
pub use prime::{gen_prime, is_probable_prime, is_probable_prime_with};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("element is not invertible modulo n")]
    NotInvertible,
    #[error("zero has no multiplicative inverse")]
    NoInverse,
}

pub type FfResult<T> = Result<T, FfError>;

/// True iff a finite field with exactly `q` elements exists, i.e. q = p^m
/// for some prime p and positive integer m.
pub fn field_exists(q: u64) -> FfResult<bool> {
    if q < 2 {
        return Err(FfError::InvalidArgument("q must be >= 2"));
    }
    // Find the smallest prime factor, then require q to be a power of it.
    let mut p = 0u64;
    let mut d = 2u64;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Ok(true); // q itself is prime
    }
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
    }
    Ok(rest == 1)
}

/// Extended Euclidean algorithm: returns (g, x, y) with a*x + b*y = g = gcd(a, b).
///
/// The Bezout coefficients are signed, so they come back as `BigInt`.
pub fn egcd(a: &BigUint, b: &BigUint) -> FfResult<(BigUint, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(FfError::InvalidArgument("gcd(0, 0) is undefined"));
    }
    let mut r0 = BigInt::from(a.clone());
    let mut r1 = BigInt::from(b.clone());
    let (mut x0, mut x1) = (BigInt::one(), BigInt::zero());
    let (mut y0, mut y1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let next_x = x0 - &q * &x1;
        x0 = std::mem::replace(&mut x1, next_x);
        let next_y = y0 - &q * &y1;
        y0 = std::mem::replace(&mut y1, next_y);
    }
    let g = r0.to_biguint().expect("gcd of non-negative inputs");
    Ok((g, x0, y0))
}

/// Multiplicative inverse of `a` modulo `n`: the unique t in [1, n) with
/// a*t = 1 (mod n). Fails with `NotInvertible` when gcd(a, n) != 1, which
/// signals the caller to regenerate e or reject the input.
pub fn mod_inv(a: &BigUint, n: &BigUint) -> FfResult<BigUint> {
    if *n < BigUint::from(2u8) {
        return Err(FfError::InvalidArgument("modulus must be >= 2"));
    }
    let a_red = a % n;
    let (g, x, _) = egcd(&a_red, n)?;
    if !g.is_one() {
        return Err(FfError::NotInvertible);
    }
    let n_int = BigInt::from(n.clone());
    let t = ((x % &n_int) + &n_int) % &n_int;
    Ok(t.to_biguint().expect("reduced into [0, n)"))
}

/// base^exp mod n by square-and-multiply, O(len(exp)) multiplications.
pub fn mod_pow(base: &BigUint, exp: &BigUint, n: &BigUint) -> FfResult<BigUint> {
    if n.is_zero() {
        return Err(FfError::InvalidArgument("modulus must be >= 1"));
    }
    if n.is_one() {
        return Ok(BigUint::zero());
    }
    let mut acc = BigUint::one();
    let mut sq = base % n;
    for i in 0..exp.bits() {
        if exp.bit(i) {
            acc = &acc * &sq % n;
        }
        sq = &sq * &sq % n;
    }
    Ok(acc)
}
