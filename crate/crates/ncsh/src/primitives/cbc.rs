//! CBC chaining with PKCS#7 padding over the AES-128 and DES block ciphers.

use rand::Rng;

use crate::handshake::CipherSuite;

use super::{aes, des, PrimitiveError};

/// A session key for one of the symmetric suites; 16 octets for AES-128,
/// 8 for DES.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricKey {
    pub bytes: Vec<u8>,
    pub suite: CipherSuite,
}

impl SymmetricKey {
    pub fn generate<R: Rng + ?Sized>(suite: CipherSuite, rng: &mut R) -> Result<Self, PrimitiveError> {
        let len = suite
            .sym_key_octets()
            .ok_or(PrimitiveError::InvalidArgument("RSA suite has no symmetric key"))?;
        let mut bytes = vec![0u8; len];
        rng.fill(&mut bytes[..]);
        Ok(Self { bytes, suite })
    }

    pub fn from_bytes(suite: CipherSuite, bytes: Vec<u8>) -> Result<Self, PrimitiveError> {
        match suite.sym_key_octets() {
            Some(len) if len == bytes.len() => Ok(Self { bytes, suite }),
            Some(len) => Err(PrimitiveError::InvalidLength { what: "symmetric key", expected: len }),
            None => Err(PrimitiveError::InvalidArgument("RSA suite has no symmetric key")),
        }
    }
}

enum Cipher {
    Aes { key: [u8; aes::AES_KEY] },
    Des(des::Des),
}

impl Cipher {
    fn new(suite: CipherSuite, key: &SymmetricKey) -> Result<Self, PrimitiveError> {
        if key.suite != suite {
            return Err(PrimitiveError::InvalidArgument("key does not match suite"));
        }
        match suite {
            CipherSuite::Aes => Ok(Cipher::Aes {
                key: key.bytes.as_slice().try_into().map_err(|_| PrimitiveError::InvalidLength {
                    what: "AES key",
                    expected: aes::AES_KEY,
                })?,
            }),
            CipherSuite::Des => Ok(Cipher::Des(des::Des::new(&key.bytes)?)),
            CipherSuite::Rsa => Err(PrimitiveError::InvalidArgument("CBC requires a block suite")),
        }
    }

    fn block_size(&self) -> usize {
        match self {
            Cipher::Aes { .. } => aes::AES_BLOCK,
            Cipher::Des(_) => des::DES_BLOCK,
        }
    }

    fn encrypt(&self, block: &mut [u8]) {
        match self {
            Cipher::Aes { key } => {
                let out = aes::aes128_encrypt_block(key, block).expect("exact block");
                block.copy_from_slice(&out);
            }
            Cipher::Des(des) => {
                let out = des.encrypt_block((&*block).try_into().expect("exact block"));
                block.copy_from_slice(&out);
            }
        }
    }

    fn decrypt(&self, block: &mut [u8]) {
        match self {
            Cipher::Aes { key } => {
                let out = aes::aes128_decrypt_block(key, block).expect("exact block");
                block.copy_from_slice(&out);
            }
            Cipher::Des(des) => {
                let out = des.decrypt_block((&*block).try_into().expect("exact block"));
                block.copy_from_slice(&out);
            }
        }
    }
}

/// PKCS#7 padding then CBC chaining. The IV must match the suite's block
/// size and should be fresh per message.
pub fn cbc_seal(
    suite: CipherSuite,
    key: &SymmetricKey,
    iv: &[u8],
    plaintext: &[u8],
) -> Result<Vec<u8>, PrimitiveError> {
    let cipher = Cipher::new(suite, key)?;
    let bs = cipher.block_size();
    if iv.len() != bs {
        return Err(PrimitiveError::InvalidLength { what: "IV", expected: bs });
    }
    let pad = bs - plaintext.len() % bs;
    let mut data = plaintext.to_vec();
    data.resize(plaintext.len() + pad, pad as u8);

    let mut prev = iv.to_vec();
    for block in data.chunks_exact_mut(bs) {
        for (b, p) in block.iter_mut().zip(&prev) {
            *b ^= p;
        }
        cipher.encrypt(block);
        prev.copy_from_slice(block);
    }
    Ok(data)
}

/// Inverts `cbc_seal`, validating and stripping the padding. All framing
/// and padding failures collapse into the single `CorruptCiphertext` code.
pub fn cbc_open(
    suite: CipherSuite,
    key: &SymmetricKey,
    iv: &[u8],
    ciphertext: &[u8],
) -> Result<Vec<u8>, PrimitiveError> {
    let cipher = Cipher::new(suite, key)?;
    let bs = cipher.block_size();
    if iv.len() != bs {
        return Err(PrimitiveError::InvalidLength { what: "IV", expected: bs });
    }
    if ciphertext.is_empty() || ciphertext.len() % bs != 0 {
        return Err(PrimitiveError::CorruptCiphertext);
    }
    let mut data = ciphertext.to_vec();
    let mut prev = iv.to_vec();
    for block in data.chunks_exact_mut(bs) {
        let this_ct = block.to_vec();
        cipher.decrypt(block);
        for (b, p) in block.iter_mut().zip(&prev) {
            *b ^= p;
        }
        prev = this_ct;
    }
    let pad = *data.last().expect("non-empty") as usize;
    if pad == 0 || pad > bs || data.len() < pad {
        return Err(PrimitiveError::CorruptCiphertext);
    }
    if data[data.len() - pad..].iter().any(|&b| b as usize != pad) {
        return Err(PrimitiveError::CorruptCiphertext);
    }
    data.truncate(data.len() - pad);
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn key_iv(suite: CipherSuite, seed: u64) -> (SymmetricKey, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let key = SymmetricKey::generate(suite, &mut rng).unwrap();
        let mut iv = vec![0u8; if suite == CipherSuite::Aes { 16 } else { 8 }];
        rng.fill(&mut iv[..]);
        (key, iv)
    }

    #[test]
    fn empty_plaintext_is_one_padding_block() {
        for suite in [CipherSuite::Aes, CipherSuite::Des] {
            let (key, iv) = key_iv(suite, 1);
            let ct = cbc_seal(suite, &key, &iv, b"").unwrap();
            assert_eq!(ct.len(), iv.len());
            assert_eq!(cbc_open(suite, &key, &iv, &ct).unwrap(), b"");
        }
    }

    #[test]
    fn roundtrip_many_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for suite in [CipherSuite::Aes, CipherSuite::Des] {
            let (key, iv) = key_iv(suite, 3);
            for _ in 0..250 {
                let len = rng.gen_range(0..=4096);
                let mut pt = vec![0u8; len];
                rng.fill(&mut pt[..]);
                let ct = cbc_seal(suite, &key, &iv, &pt).unwrap();
                assert_eq!(cbc_open(suite, &key, &iv, &ct).unwrap(), pt);
            }
        }
    }

    #[test]
    fn boundary_lengths_roundtrip() {
        for suite in [CipherSuite::Aes, CipherSuite::Des] {
            let bs = if suite == CipherSuite::Aes { 16 } else { 8 };
            let (key, iv) = key_iv(suite, 4);
            for len in [0, 1, bs - 1, bs, bs + 1] {
                let pt = vec![0x7Eu8; len];
                let ct = cbc_seal(suite, &key, &iv, &pt).unwrap();
                assert_eq!(cbc_open(suite, &key, &iv, &ct).unwrap(), pt, "len = {len}");
            }
        }
    }

    #[test]
    fn bit_flips_fail_or_change_plaintext() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (key, iv) = key_iv(CipherSuite::Aes, 6);
        let pt = b"tamper detection trial payload".to_vec();
        let ct = cbc_seal(CipherSuite::Aes, &key, &iv, &pt).unwrap();
        for _ in 0..200 {
            let mut corrupted = ct.clone();
            let bit = rng.gen_range(0..corrupted.len() * 8);
            corrupted[bit / 8] ^= 1 << (bit % 8);
            match cbc_open(CipherSuite::Aes, &key, &iv, &corrupted) {
                Err(PrimitiveError::CorruptCiphertext) => {}
                Ok(other) => assert_ne!(other, pt),
                Err(e) => panic!("unexpected error class: {e}"),
            }
        }
    }

    #[test]
    fn wrong_iv_length_rejected() {
        let (key, _) = key_iv(CipherSuite::Aes, 7);
        assert!(cbc_seal(CipherSuite::Aes, &key, &[0u8; 8], b"x").is_err());
    }

    #[test]
    fn rsa_suite_has_no_cbc() {
        let (key, iv) = key_iv(CipherSuite::Aes, 8);
        assert!(cbc_seal(CipherSuite::Rsa, &key, &iv, b"x").is_err());
        assert!(SymmetricKey::generate(CipherSuite::Rsa, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
