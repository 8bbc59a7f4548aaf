//! The digital signature protocol: literal mode applies the signer's
//! private exponent to every ciphertext block (sign = decrypt, verify =
//! encrypt), digest mode signs the SHA-1 digest of the serialized
//! ciphertext. Plus the executable RSA multiplicative-homomorphism check.

use num_bigint::BigUint;

use crate::primitives::{rsa_apply, sha1, RsaKeyPair, RsaPublicKey};

use super::HandshakeError;

/// Literal-mode signing: every ciphertext block c becomes c^d_A mod n_A.
/// Requires the signer's modulus to exceed the recipient's so each block
/// fits; otherwise the caller falls back to digest mode.
pub fn sign_literal(
    signer: &RsaKeyPair,
    ct_blocks: &[BigUint],
    recipient_n: &BigUint,
) -> Result<Vec<BigUint>, HandshakeError> {
    if signer.n <= *recipient_n {
        return Err(HandshakeError::IncompatibleModuli);
    }
    ct_blocks
        .iter()
        .map(|c| rsa_apply(&signer.d, &signer.n, c).map_err(HandshakeError::from))
        .collect()
}

/// Literal-mode verification: encrypting each signed block with the
/// signer's public exponent recovers the original ciphertext blocks.
pub fn verify_literal(
    signer_public: &RsaPublicKey,
    m1_blocks: &[BigUint],
) -> Result<Vec<BigUint>, HandshakeError> {
    m1_blocks
        .iter()
        .map(|b| {
            if b >= &signer_public.n {
                return Err(HandshakeError::CorruptSignature);
            }
            rsa_apply(&signer_public.e, &signer_public.n, b).map_err(HandshakeError::from)
        })
        .collect()
}

/// Digest-mode signing: one RSA block over the SHA-1 digest of the
/// serialized ciphertext.
pub fn sign_digest(signer: &RsaKeyPair, ciphertext: &[u8]) -> Result<Vec<BigUint>, HandshakeError> {
    let digest = BigUint::from_bytes_be(&sha1(ciphertext).0);
    let reduced = &digest % &signer.n;
    let sig = rsa_apply(&signer.d, &signer.n, &reduced)?;
    Ok(vec![sig])
}

/// Digest-mode verification. Returns false on any mismatch; never errors
/// for well-formed input.
pub fn verify_digest(signer_public: &RsaPublicKey, ciphertext: &[u8], sig: &[BigUint]) -> bool {
    let [sig_block] = sig else {
        return false;
    };
    if sig_block >= &signer_public.n {
        return false;
    }
    let Ok(recovered) = rsa_apply(&signer_public.e, &signer_public.n, sig_block) else {
        return false;
    };
    let digest = BigUint::from_bytes_be(&sha1(ciphertext).0);
    recovered == &digest % &signer_public.n
}

/// Executable demonstration of RSA's multiplicative homomorphism:
/// E(x) * E(y) = E(x * y) (mod n). True for all honest inputs.
pub fn homomorphic_product_check(
    pubkey: &RsaPublicKey,
    x: &BigUint,
    y: &BigUint,
) -> Result<bool, HandshakeError> {
    let ex = rsa_apply(&pubkey.e, &pubkey.n, x)?;
    let ey = rsa_apply(&pubkey.e, &pubkey.n, y)?;
    let exy = rsa_apply(&pubkey.e, &pubkey.n, &(x * y % &pubkey.n))?;
    Ok(ex * ey % &pubkey.n == exy)
}
