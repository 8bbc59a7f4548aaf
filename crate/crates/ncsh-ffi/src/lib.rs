//! C ABI for the ncsh handshake library. Key pairs are opaque handles,
//! every function returns a status code, and variable-length output comes
//! back as an `NcshBuffer` the caller releases with `ncsh_buffer_free`.
//!
//! All pointers must be valid for the duration of the call; null where a
//! value is required yields `NCSH_STATUS_NULL_ARGUMENT` instead of a crash.

use std::ffi::{c_char, CStr};
use std::path::Path;
use std::ptr;

use ncsh::handshake::{
    calibrate, CipherSuite, HandshakeError, Phase, SecurityLevel, SessionState,
};
use ncsh::netio::{decode_envelope, encode_envelope};
use ncsh::primitives::{
    aes128_decrypt_block, aes128_encrypt_block, read_private_key, rsa_keygen, sha1,
    write_key_files, PrimitiveError, RsaKeyPair, AES_BLOCK, AES_KEY,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcshStatus {
    NcshStatusOk = 0,
    NcshStatusNullArgument = 1,
    NcshStatusInvalidArgument = 2,
    NcshStatusCryptoFailure = 3,
    NcshStatusVerificationFailed = 4,
    NcshStatusIoFailure = 5,
    NcshStatusMalformed = 6,
}

use NcshStatus::*;

/// Opaque RSA key pair handle.
pub struct NcshKeyPair(RsaKeyPair);

/// Heap buffer owned by the library; release with `ncsh_buffer_free`.
#[repr(C)]
pub struct NcshBuffer {
    pub data: *mut u8,
    pub len: usize,
}

/// Calibration result for one security level and cipher suite.
#[repr(C)]
pub struct NcshSuiteParams {
    pub suite: u8,
    pub sig_mode: u8,
    pub rsa_modulus_bits: u64,
    pub sym_key_octets: usize,
}

fn status_of_handshake(err: &HandshakeError) -> NcshStatus {
    match err {
        HandshakeError::SignatureInvalid => NcshStatusVerificationFailed,
        HandshakeError::CorruptSignature
        | HandshakeError::CorruptCiphertext
        | HandshakeError::IncompatibleModuli => NcshStatusCryptoFailure,
        HandshakeError::ProtocolViolation => NcshStatusInvalidArgument,
        HandshakeError::Primitive(p) => status_of_primitive(p),
    }
}

fn status_of_primitive(err: &PrimitiveError) -> NcshStatus {
    match err {
        PrimitiveError::InvalidLength { .. } | PrimitiveError::InvalidArgument(_) => {
            NcshStatusInvalidArgument
        }
        PrimitiveError::BlockTooLarge
        | PrimitiveError::CorruptCiphertext
        | PrimitiveError::KeygenFailure => NcshStatusCryptoFailure,
        PrimitiveError::MalformedKeyFile(_) => NcshStatusMalformed,
        PrimitiveError::Io(_) => NcshStatusIoFailure,
    }
}

fn buffer_from(mut bytes: Vec<u8>) -> NcshBuffer {
    bytes.shrink_to_fit();
    let mut bytes = std::mem::ManuallyDrop::new(bytes);
    NcshBuffer { data: bytes.as_mut_ptr(), len: bytes.len() }
}

/// Borrows `(ptr, len)` as a slice; a null `ptr` is only acceptable when
/// `len` is zero.
unsafe fn slice_arg<'a>(ptr: *const u8, len: usize) -> Result<&'a [u8], NcshStatus> {
    if ptr.is_null() {
        if len == 0 {
            return Ok(&[]);
        }
        return Err(NcshStatusNullArgument);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn path_arg<'a>(ptr: *const c_char) -> Result<&'a Path, NcshStatus> {
    if ptr.is_null() {
        return Err(NcshStatusNullArgument);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(NcshStatusInvalidArgument),
    }
}

/// Human-readable description of a status code. The returned string is
/// static; do not free it.
#[no_mangle]
pub extern "C" fn ncsh_status_message(status: NcshStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        NcshStatusOk => b"ok\0",
        NcshStatusNullArgument => b"a required argument was null\0",
        NcshStatusInvalidArgument => b"invalid argument\0",
        NcshStatusCryptoFailure => b"cryptographic operation failed\0",
        NcshStatusVerificationFailed => b"signature verification failed\0",
        NcshStatusIoFailure => b"I/O failure\0",
        NcshStatusMalformed => b"malformed input\0",
    };
    msg.as_ptr() as *const c_char
}

/// Releases a buffer returned by this library. A zeroed buffer is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ncsh_buffer_free(buf: NcshBuffer) {
    if !buf.data.is_null() {
        drop(Vec::from_raw_parts(buf.data, buf.len, buf.len));
    }
}

/// Generates an RSA key pair at security level 1, 2 or 3 (512, 1024 or
/// 2048 modulus bits). `seed` makes generation reproducible; distinct
/// seeds yield independent keys.
#[no_mangle]
pub unsafe extern "C" fn ncsh_keygen(
    level: u8,
    seed: u64,
    out: *mut *mut NcshKeyPair,
) -> NcshStatus {
    if out.is_null() {
        return NcshStatusNullArgument;
    }
    let bits = match level {
        1 => SecurityLevel::L1,
        2 => SecurityLevel::L2,
        3 => SecurityLevel::L3,
        _ => return NcshStatusInvalidArgument,
    }
    .rsa_modulus_bits();
    match rsa_keygen(bits, &mut ChaCha20Rng::seed_from_u64(seed)) {
        Ok(keys) => {
            *out = Box::into_raw(Box::new(NcshKeyPair(keys)));
            NcshStatusOk
        }
        Err(e) => status_of_primitive(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ncsh_keypair_free(keys: *mut NcshKeyPair) {
    if !keys.is_null() {
        drop(Box::from_raw(keys));
    }
}

/// Writes `<prefix>.pub` and `<prefix>.key` for the pair.
#[no_mangle]
pub unsafe extern "C" fn ncsh_keypair_write(
    keys: *const NcshKeyPair,
    prefix: *const c_char,
) -> NcshStatus {
    let Some(keys) = keys.as_ref() else {
        return NcshStatusNullArgument;
    };
    let prefix = match path_arg(prefix) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match write_key_files(prefix, &keys.0) {
        Ok(()) => NcshStatusOk,
        Err(e) => status_of_primitive(&e),
    }
}

/// Loads a key pair from a `.key` private key file.
#[no_mangle]
pub unsafe extern "C" fn ncsh_keypair_read(
    path: *const c_char,
    out: *mut *mut NcshKeyPair,
) -> NcshStatus {
    if out.is_null() {
        return NcshStatusNullArgument;
    }
    let path = match path_arg(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match read_private_key(path) {
        Ok(keys) => {
            *out = Box::into_raw(Box::new(NcshKeyPair(keys)));
            NcshStatusOk
        }
        Err(e) => status_of_primitive(&e),
    }
}

/// SHA-1 of `data` into a caller-provided 20-octet buffer.
#[no_mangle]
pub unsafe extern "C" fn ncsh_sha1(
    data: *const u8,
    len: usize,
    digest_out: *mut u8,
) -> NcshStatus {
    if digest_out.is_null() {
        return NcshStatusNullArgument;
    }
    let data = match slice_arg(data, len) {
        Ok(d) => d,
        Err(s) => return s,
    };
    let digest = sha1(data);
    ptr::copy_nonoverlapping(digest.0.as_ptr(), digest_out, digest.0.len());
    NcshStatusOk
}

unsafe fn aes_block_op(
    key: *const u8,
    input: *const u8,
    output: *mut u8,
    op: fn(&[u8], &[u8]) -> Result<[u8; AES_BLOCK], PrimitiveError>,
) -> NcshStatus {
    if key.is_null() || input.is_null() || output.is_null() {
        return NcshStatusNullArgument;
    }
    let key = std::slice::from_raw_parts(key, AES_KEY);
    let input = std::slice::from_raw_parts(input, AES_BLOCK);
    match op(key, input) {
        Ok(block) => {
            ptr::copy_nonoverlapping(block.as_ptr(), output, AES_BLOCK);
            NcshStatusOk
        }
        Err(e) => status_of_primitive(&e),
    }
}

/// One AES-128 block encryption: 16-octet key, 16-octet input and output.
#[no_mangle]
pub unsafe extern "C" fn ncsh_aes128_encrypt_block(
    key: *const u8,
    input: *const u8,
    output: *mut u8,
) -> NcshStatus {
    aes_block_op(key, input, output, aes128_encrypt_block)
}

/// One AES-128 block decryption: 16-octet key, 16-octet input and output.
#[no_mangle]
pub unsafe extern "C" fn ncsh_aes128_decrypt_block(
    key: *const u8,
    input: *const u8,
    output: *mut u8,
) -> NcshStatus {
    aes_block_op(key, input, output, aes128_decrypt_block)
}

/// Fills `params` with the calibration for `level` (1..=3) and `suite`
/// (1 AES, 2 DES, 3 RSA).
#[no_mangle]
pub unsafe extern "C" fn ncsh_calibrate(
    level: u8,
    suite: u8,
    params: *mut NcshSuiteParams,
) -> NcshStatus {
    if params.is_null() {
        return NcshStatusNullArgument;
    }
    let level = match level {
        1 => SecurityLevel::L1,
        2 => SecurityLevel::L2,
        3 => SecurityLevel::L3,
        _ => return NcshStatusInvalidArgument,
    };
    let Some(suite) = CipherSuite::from_wire_code(suite) else {
        return NcshStatusInvalidArgument;
    };
    let p = calibrate(level, suite);
    *params = NcshSuiteParams {
        suite: p.suite.wire_code(),
        sig_mode: p.sig_mode.wire_code(),
        rsa_modulus_bits: p.rsa_modulus_bits,
        sym_key_octets: p.sym_key_octets,
    };
    NcshStatusOk
}

fn ready_session(own: &RsaKeyPair, peer: &RsaKeyPair, suite: CipherSuite, seed: u64) -> SessionState {
    let level = own.level;
    let mut session = SessionState::command_centre(seed, own.clone(), calibrate(level, suite), Vec::new());
    session.peer_public = Some(peer.public());
    session.phase = Phase::Ready;
    session
}

/// Seals `plaintext` from `sender` to `recipient` in one shot: signs,
/// wraps the session key, encrypts, and serializes the envelope to its
/// wire form. `suite` is 1 AES, 2 DES, 3 RSA; `seed` drives the IV and
/// session key. The security level is the sender's key level.
#[no_mangle]
pub unsafe extern "C" fn ncsh_seal(
    sender: *const NcshKeyPair,
    recipient: *const NcshKeyPair,
    suite: u8,
    seed: u64,
    plaintext: *const u8,
    plaintext_len: usize,
    out: *mut NcshBuffer,
) -> NcshStatus {
    let (Some(sender), Some(recipient)) = (sender.as_ref(), recipient.as_ref()) else {
        return NcshStatusNullArgument;
    };
    if out.is_null() {
        return NcshStatusNullArgument;
    }
    let Some(suite) = CipherSuite::from_wire_code(suite) else {
        return NcshStatusInvalidArgument;
    };
    let plaintext = match slice_arg(plaintext, plaintext_len) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let mut session = ready_session(&sender.0, &recipient.0, suite, seed);
    match session.seal(plaintext) {
        Ok(env) => {
            *out = buffer_from(encode_envelope(&env));
            NcshStatusOk
        }
        Err(e) => status_of_handshake(&e),
    }
}

/// Opens a serialized envelope addressed to `recipient`: verifies the
/// signature first, then unwraps and decrypts. On success `out` holds the
/// plaintext.
#[no_mangle]
pub unsafe extern "C" fn ncsh_open(
    recipient: *const NcshKeyPair,
    envelope: *const u8,
    envelope_len: usize,
    out: *mut NcshBuffer,
) -> NcshStatus {
    let Some(recipient) = recipient.as_ref() else {
        return NcshStatusNullArgument;
    };
    if out.is_null() {
        return NcshStatusNullArgument;
    }
    let envelope = match slice_arg(envelope, envelope_len) {
        Ok(e) => e,
        Err(s) => return s,
    };
    let env = match decode_envelope(envelope) {
        Ok(env) => env,
        Err(_) => return NcshStatusMalformed,
    };
    let mut session = SessionState::shooter_target(
        0,
        recipient.0.clone(),
        calibrate(recipient.0.level, env.suite),
    );
    session.phase = Phase::Ready;
    match session.open(&env) {
        Ok(plaintext) => {
            *out = buffer_from(plaintext);
            NcshStatusOk
        }
        Err(e) => status_of_handshake(&e),
    }
}
