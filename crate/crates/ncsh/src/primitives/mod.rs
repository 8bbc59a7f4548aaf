//! The four algorithms of the implementation pipeline — textbook RSA,
//! AES-128, DES, SHA-1 — plus CBC sealing and the key file format.

mod aes;
mod cbc;
mod des;
mod keyfile;
mod rsa;
mod sha1;

pub use aes::{aes128_decrypt_block, aes128_encrypt_block, sbox, AES_BLOCK, AES_KEY};
pub use cbc::{cbc_open, cbc_seal, SymmetricKey};
pub use des::{des_decrypt_block, des_encrypt_block, Des, DES_BLOCK, DES_KEY};
pub use keyfile::{read_private_key, read_public_key, write_key_files};
pub use rsa::{
    rsa_apply, rsa_chunk_capacity, rsa_decrypt_blockwise, rsa_encrypt_blockwise, rsa_keygen,
    RsaKeyPair, RsaPublicKey,
};
pub use sha1::{sha1, Digest};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrimitiveError {
    #[error("{what} must be exactly {expected} octets")]
    InvalidLength { what: &'static str, expected: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("RSA input block is not below the modulus")]
    BlockTooLarge,
    #[error("ciphertext is corrupt")]
    CorruptCiphertext,
    #[error("key generation failed after repeated attempts")]
    KeygenFailure,
    #[error("malformed key file: {0}")]
    MalformedKeyFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
