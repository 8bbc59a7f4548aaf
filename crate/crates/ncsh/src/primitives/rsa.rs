//! Textbook RSA: key generation over ffmath primes, the raw modular
//! exponentiation primitive, and deterministic blockwise framing (2-octet
//! big-endian length header per chunk, no OAEP/PKCS#1 padding).

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;

use crate::ffmath::{gen_prime, mod_inv, mod_pow, FfError};
use crate::handshake::SecurityLevel;

use super::PrimitiveError;

/// Public exponent preference order; 65537 first, small fallbacks for tiny
/// demo moduli.
const PUBLIC_EXPONENTS: [u32; 4] = [65537, 3, 5, 17];

const KEYGEN_ATTEMPTS: usize = 16;

/// The public half (e, n) of an RSA key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    pub e: BigUint,
    pub n: BigUint,
}

/// A full RSA key pair. `e * d = 1 (mod phi(n))`, n = p*q with p != q prime,
/// and n has exactly `modulus_bits` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaKeyPair {
    pub n: BigUint,
    pub e: BigUint,
    pub d: BigUint,
    pub modulus_bits: u64,
    pub level: SecurityLevel,
}

impl RsaKeyPair {
    pub fn public(&self) -> RsaPublicKey {
        RsaPublicKey { e: self.e.clone(), n: self.n.clone() }
    }

    /// Builds a key pair from explicit primes, for the tiny textbook demo
    /// keys (e.g. p=5, q=11, e=3 giving n=55, d=27).
    pub fn from_primes(p: u64, q: u64, e: u64) -> Result<Self, PrimitiveError> {
        if p == q {
            return Err(PrimitiveError::InvalidArgument("p and q must differ"));
        }
        let n = BigUint::from(p) * BigUint::from(q);
        let phi = BigUint::from(p - 1) * BigUint::from(q - 1);
        let e = BigUint::from(e);
        let d = mod_inv(&e, &phi).map_err(|_| PrimitiveError::KeygenFailure)?;
        let modulus_bits = n.bits();
        Ok(Self { n, e, d, modulus_bits, level: SecurityLevel::L1 })
    }
}

/// Generates an RSA key pair with a modulus of exactly `modulus_bits` bits.
/// 512/1024/2048 are the calibrated sizes; 32 exists for test and demo use.
pub fn rsa_keygen<R: Rng + ?Sized>(
    modulus_bits: u64,
    rng: &mut R,
) -> Result<RsaKeyPair, PrimitiveError> {
    if ![32, 512, 1024, 2048].contains(&modulus_bits) {
        return Err(PrimitiveError::InvalidArgument(
            "modulus size must be one of 32, 512, 1024, 2048 bits",
        ));
    }
    let gen = |rng: &mut R| gen_prime(modulus_bits / 2, rng).map_err(|_| PrimitiveError::KeygenFailure);
    for _ in 0..KEYGEN_ATTEMPTS {
        let p = gen(rng)?;
        let q = gen(rng)?;
        if p == q {
            continue;
        }
        let n = &p * &q;
        if n.bits() != modulus_bits {
            continue;
        }
        let phi = (&p - 1u8) * (&q - 1u8);
        let Some(e) = PUBLIC_EXPONENTS
            .iter()
            .map(|&e| BigUint::from(e))
            .find(|e| *e < phi && matches!(mod_inv(e, &phi), Ok(_)))
        else {
            continue;
        };
        let d = mod_inv(&e, &phi).expect("checked invertible");
        let level = SecurityLevel::for_modulus_bits(modulus_bits).unwrap_or(SecurityLevel::L1);
        return Ok(RsaKeyPair { n, e, d, modulus_bits, level });
    }
    Err(PrimitiveError::KeygenFailure)
}

/// The raw RSA primitive: block^exponent mod n. Encryption and decryption
/// are both this operation with different exponents.
pub fn rsa_apply(exponent: &BigUint, n: &BigUint, block: &BigUint) -> Result<BigUint, PrimitiveError> {
    if block >= n {
        return Err(PrimitiveError::BlockTooLarge);
    }
    mod_pow(block, exponent, n).map_err(|e| match e {
        FfError::InvalidArgument(msg) => PrimitiveError::InvalidArgument(msg),
        _ => PrimitiveError::InvalidArgument("modular exponentiation failed"),
    })
}

/// Octets of payload carried per RSA block: floor((modulus_bits - 16)/8),
/// leaving room for the 2-octet length header. Zero means the modulus is too
/// small for header framing and blockwise transfer degenerates to one octet
/// per block.
pub fn rsa_chunk_capacity(modulus_bits: u64) -> usize {
    if modulus_bits <= 16 {
        0
    } else {
        ((modulus_bits - 16) / 8) as usize
    }
}

/// Splits `data` into chunks, frames each with a 2-octet big-endian length
/// header, interprets the frame big-endian as an integer below n, and
/// applies the public exponent.
pub fn rsa_encrypt_blockwise(pubkey: &RsaPublicKey, data: &[u8]) -> Result<Vec<BigUint>, PrimitiveError> {
    let cap = rsa_chunk_capacity(pubkey.n.bits());
    if cap == 0 {
        // Tiny demo moduli: one octet per block, no header.
        return data
            .iter()
            .map(|&b| rsa_apply(&pubkey.e, &pubkey.n, &BigUint::from(b)))
            .collect();
    }
    data.chunks(cap)
        .map(|chunk| {
            let mut frame = Vec::with_capacity(cap + 2);
            frame.extend_from_slice(&(chunk.len() as u16).to_be_bytes());
            frame.extend_from_slice(chunk);
            frame.resize(cap + 2, 0);
            rsa_apply(&pubkey.e, &pubkey.n, &BigUint::from_bytes_be(&frame))
        })
        .collect()
}

/// Inverts `rsa_encrypt_blockwise` exactly; any block at or above the
/// modulus or with a malformed length header is corrupt ciphertext.
pub fn rsa_decrypt_blockwise(
    d: &BigUint,
    n: &BigUint,
    blocks: &[BigUint],
) -> Result<Vec<u8>, PrimitiveError> {
    let cap = rsa_chunk_capacity(n.bits());
    let mut out = Vec::new();
    for block in blocks {
        if block >= n {
            return Err(PrimitiveError::CorruptCiphertext);
        }
        let plain = rsa_apply(d, n, block)?;
        if cap == 0 {
            let bytes = plain.to_bytes_be();
            if plain.is_zero() {
                out.push(0);
            } else if bytes.len() == 1 {
                out.push(bytes[0]);
            } else {
                return Err(PrimitiveError::CorruptCiphertext);
            }
            continue;
        }
        let raw = plain.to_bytes_be();
        if raw.len() > cap + 2 {
            return Err(PrimitiveError::CorruptCiphertext);
        }
        let mut frame = vec![0u8; cap + 2 - raw.len()];
        frame.extend_from_slice(&raw);
        let len = u16::from_be_bytes([frame[0], frame[1]]) as usize;
        if len > cap {
            return Err(PrimitiveError::CorruptCiphertext);
        }
        if frame[2 + len..].iter().any(|&b| b != 0) {
            return Err(PrimitiveError::CorruptCiphertext);
        }
        out.extend_from_slice(&frame[2..2 + len]);
    }
    Ok(out)
}
