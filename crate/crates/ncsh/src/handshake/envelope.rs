//! Envelope seal/open: the unit transferred as DATA. AES/DES suites carry
//! CBC ciphertext with the session key wrapped under the peer's RSA key;
//! the RSA suite carries blockwise textbook-RSA ciphertext directly. The
//! envelope is signed over its serialized ciphertext and opened
//! signature-first.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;

use crate::primitives::{
    cbc_open, cbc_seal, rsa_decrypt_blockwise, rsa_encrypt_blockwise, RsaKeyPair, RsaPublicKey,
    SymmetricKey,
};

use super::{
    sig::{sign_digest, sign_literal, verify_digest, verify_literal},
    CipherSuite, HandshakeError, SigMode, SuiteParams,
};

/// Payload ciphertext: octets for the CBC suites, RSA blocks for the RSA
/// suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CipherPayload {
    Sym(Vec<u8>),
    Rsa(Vec<BigUint>),
}

impl CipherPayload {
    /// The single normative byte serialization of the ciphertext, the input
    /// to digest-mode signing and the wire encoding inside DATA frames.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            CipherPayload::Sym(ct) => ct.clone(),
            CipherPayload::Rsa(blocks) => {
                let mut out = Vec::new();
                out.extend_from_slice(&(blocks.len() as u16).to_be_bytes());
                for block in blocks {
                    let bytes = block.to_bytes_be();
                    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
                    out.extend_from_slice(&bytes);
                }
                out
            }
        }
    }
}

/// Ciphertext + signature + sender public key + wrapped session key + IV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub suite: CipherSuite,
    pub sig_mode: SigMode,
    pub sender_public: RsaPublicKey,
    pub wrapped_key: Vec<BigUint>,
    pub iv: Vec<u8>,
    pub ciphertext: CipherPayload,
    pub signature: Vec<BigUint>,
}

/// Phase timings and instrumented buffer accounting from one seal or open.
/// `payload_*` covers only the payload cipher itself (CBC or blockwise
/// RSA), which is what the suite comparison measures; signing, key wrap
/// and verification are protocol overhead common to all suites.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnvelopeMetrics {
    pub payload_encrypt: Duration,
    pub payload_decrypt: Duration,
    pub verify: Duration,
    /// Maximum of the sum of live transient buffers during the payload
    /// cipher phase, in octets.
    pub payload_peak_buffer: usize,
}

/// Tracks live transient buffer octets and their maximum.
struct BufferMeter {
    live: usize,
    peak: usize,
}

impl BufferMeter {
    fn new() -> Self {
        Self { live: 0, peak: 0 }
    }

    fn alloc(&mut self, octets: usize) {
        self.live += octets;
        self.peak = self.peak.max(self.live);
    }

    fn free(&mut self, octets: usize) {
        self.live = self.live.saturating_sub(octets);
    }
}

/// Working-set octets of one square-and-multiply exponentiation: base,
/// accumulator, running square, and the double-width product before
/// reduction.
fn mod_pow_working_set(modulus_bits: u64) -> usize {
    let limb = modulus_bits.div_ceil(8) as usize;
    3 * limb + 2 * limb
}

fn rsa_block_octets(n: &BigUint) -> usize {
    n.bits().div_ceil(8) as usize
}

// Diagnostics for the signature-first ordering guarantee: counts every
// attempt to unwrap a session key. Tests assert it does not move when
// verification fails.
static UNWRAP_ATTEMPTS: AtomicU64 = AtomicU64::new(0);

pub fn key_unwrap_attempts() -> u64 {
    UNWRAP_ATTEMPTS.load(Ordering::Relaxed)
}

pub(crate) fn seal_envelope<R: Rng + ?Sized>(
    own_keys: &RsaKeyPair,
    peer_public: &RsaPublicKey,
    params: &SuiteParams,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<(Envelope, EnvelopeMetrics), HandshakeError> {
    let mut metrics = EnvelopeMetrics::default();
    let mut meter = BufferMeter::new();
    meter.alloc(plaintext.len());

    let (ciphertext, wrapped_key, iv) = match params.suite {
        CipherSuite::Rsa => {
            let started = Instant::now();
            let block_octets = rsa_block_octets(&peer_public.n);
            let cap = crate::primitives::rsa_chunk_capacity(peer_public.n.bits()).max(1);
            // Account each chunk staging frame and the exponentiation
            // working set as they come and go; ciphertext blocks stay live.
            let working_set = mod_pow_working_set(peer_public.n.bits());
            for _ in 0..plaintext.len().div_ceil(cap) {
                meter.alloc(cap + 2 + working_set);
                meter.free(cap + 2 + working_set);
                meter.alloc(block_octets);
            }
            let blocks = rsa_encrypt_blockwise(peer_public, plaintext)?;
            metrics.payload_encrypt = started.elapsed();
            (CipherPayload::Rsa(blocks), Vec::new(), Vec::new())
        }
        suite => {
            let key = SymmetricKey::generate(suite, rng)?;
            let block = suite.block_octets().expect("symmetric suite");
            let mut iv = vec![0u8; block];
            rng.fill(&mut iv[..]);

            let started = Instant::now();
            meter.alloc(key.bytes.len());
            meter.alloc(iv.len());
            let padded = plaintext.len() + (block - plaintext.len() % block);
            meter.alloc(padded);
            let ct = cbc_seal(suite, &key, &iv, plaintext)?;
            metrics.payload_encrypt = started.elapsed();

            let wrapped = rsa_encrypt_blockwise(peer_public, &key.bytes)?;
            (CipherPayload::Sym(ct), wrapped, iv)
        }
    };
    metrics.payload_peak_buffer = meter.peak;

    let ct_bytes = ciphertext.to_bytes();
    let (sig_mode, signature) = match (params.sig_mode, &ciphertext) {
        (SigMode::Literal, CipherPayload::Rsa(blocks)) => {
            match sign_literal(own_keys, blocks, &peer_public.n) {
                Ok(sig) => (SigMode::Literal, sig),
                // Modulus ordering unsatisfied: fall back to digest mode.
                Err(HandshakeError::IncompatibleModuli) => {
                    (SigMode::Digest, sign_digest(own_keys, &ct_bytes)?)
                }
                Err(e) => return Err(e),
            }
        }
        _ => (SigMode::Digest, sign_digest(own_keys, &ct_bytes)?),
    };

    Ok((
        Envelope {
            suite: params.suite,
            sig_mode,
            sender_public: own_keys.public(),
            wrapped_key,
            iv,
            ciphertext,
            signature,
        },
        metrics,
    ))
}

pub(crate) fn open_envelope(
    own_keys: &RsaKeyPair,
    env: &Envelope,
) -> Result<(Vec<u8>, EnvelopeMetrics), HandshakeError> {
    let mut metrics = EnvelopeMetrics::default();

    // Verify first; no decryption work until the signature checks out.
    let verify_started = Instant::now();
    match env.sig_mode {
        SigMode::Digest => {
            let ct_bytes = env.ciphertext.to_bytes();
            if !verify_digest(&env.sender_public, &ct_bytes, &env.signature) {
                return Err(HandshakeError::SignatureInvalid);
            }
        }
        SigMode::Literal => {
            let CipherPayload::Rsa(blocks) = &env.ciphertext else {
                return Err(HandshakeError::SignatureInvalid);
            };
            let recovered = verify_literal(&env.sender_public, &env.signature)
                .map_err(|_| HandshakeError::SignatureInvalid)?;
            if recovered != *blocks {
                return Err(HandshakeError::SignatureInvalid);
            }
        }
    }
    metrics.verify = verify_started.elapsed();

    let decrypt_started = Instant::now();
    let plaintext = match (&env.ciphertext, env.suite) {
        (CipherPayload::Rsa(blocks), CipherSuite::Rsa) => {
            rsa_decrypt_blockwise(&own_keys.d, &own_keys.n, blocks)
                .map_err(|_| HandshakeError::CorruptCiphertext)?
        }
        (CipherPayload::Sym(ct), suite @ (CipherSuite::Aes | CipherSuite::Des)) => {
            UNWRAP_ATTEMPTS.fetch_add(1, Ordering::Relaxed);
            let key_bytes = rsa_decrypt_blockwise(&own_keys.d, &own_keys.n, &env.wrapped_key)
                .map_err(|_| HandshakeError::CorruptCiphertext)?;
            let key = SymmetricKey::from_bytes(suite, key_bytes)
                .map_err(|_| HandshakeError::CorruptCiphertext)?;
            cbc_open(suite, &key, &env.iv, ct).map_err(|_| HandshakeError::CorruptCiphertext)?
        }
        _ => return Err(HandshakeError::CorruptCiphertext),
    };
    metrics.payload_decrypt = decrypt_started.elapsed();
    Ok((plaintext, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handshake::{calibrate, SecurityLevel, SessionState};
    use crate::primitives::rsa_keygen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ready_pair(suite: CipherSuite, level: SecurityLevel) -> (SessionState, SessionState) {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let bits = level.rsa_modulus_bits();
        let cc_keys = rsa_keygen(bits, &mut rng).unwrap();
        let st_keys = rsa_keygen(bits, &mut rng).unwrap();
        let params = calibrate(level, suite);
        let mut cc = SessionState::command_centre(1, cc_keys, params, vec![]);
        let st = SessionState::shooter_target(1, st_keys.clone(), params);
        cc.phase = crate::handshake::Phase::Ready;
        cc.peer_public = Some(st_keys.public());
        let mut st = st;
        st.phase = crate::handshake::Phase::Ready;
        (cc, st)
    }

    #[test]
    fn roundtrip_every_suite() {
        for suite in CipherSuite::all() {
            let (mut cc, st) = ready_pair(suite, SecurityLevel::L1);
            for len in [0usize, 1, 15, 16, 17, 100] {
                let pt = vec![0xC3u8; len];
                let env = cc.seal(&pt).unwrap();
                assert_eq!(st.open(&env).unwrap(), pt, "suite {suite} len {len}");
            }
        }
    }

    #[test]
    fn rsa_suite_envelope_shape() {
        let (mut cc, _) = ready_pair(CipherSuite::Rsa, SecurityLevel::L1);
        let env = cc.seal(b"direct rsa payload").unwrap();
        assert!(env.iv.is_empty());
        assert!(env.wrapped_key.is_empty());
        assert!(!env.signature.is_empty());
        assert!(matches!(env.ciphertext, CipherPayload::Rsa(_)));
    }

    #[test]
    fn fresh_randomness_per_seal() {
        let (mut cc, _) = ready_pair(CipherSuite::Aes, SecurityLevel::L1);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            let env = cc.seal(b"same plaintext").unwrap();
            assert!(seen.insert((env.iv.clone(), env.ciphertext.to_bytes())));
        }
    }

    #[test]
    fn tampered_ciphertext_is_signature_invalid_without_unwrap() {
        let (mut cc, st) = ready_pair(CipherSuite::Aes, SecurityLevel::L1);
        let env = cc.seal(b"the wire is hostile").unwrap();
        let before = key_unwrap_attempts();
        let mut bad = env.clone();
        if let CipherPayload::Sym(ct) = &mut bad.ciphertext {
            ct[0] ^= 0x01;
        }
        assert!(matches!(st.open(&bad), Err(HandshakeError::SignatureInvalid)));
        assert_eq!(key_unwrap_attempts(), before);
        // The untampered envelope still opens, and does unwrap.
        assert_eq!(st.open(&env).unwrap(), b"the wire is hostile");
        assert_eq!(key_unwrap_attempts(), before + 1);
    }

    #[test]
    fn duplicate_open_is_pure() {
        let (mut cc, st) = ready_pair(CipherSuite::Des, SecurityLevel::L1);
        let env = cc.seal(b"replayed datagram").unwrap();
        assert_eq!(st.open(&env).unwrap(), st.open(&env).unwrap());
    }

    #[test]
    fn wrong_phase_rejected() {
        let (mut cc, mut st) = ready_pair(CipherSuite::Aes, SecurityLevel::L1);
        let env = cc.seal(b"x").unwrap();
        st.phase = crate::handshake::Phase::Idle;
        assert!(matches!(st.open(&env), Err(HandshakeError::ProtocolViolation)));
        cc.phase = crate::handshake::Phase::Closed;
        assert!(matches!(cc.seal(b"y"), Err(HandshakeError::ProtocolViolation)));
    }

    #[test]
    fn literal_mode_end_to_end_when_moduli_allow() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = rsa_keygen(512, &mut rng).unwrap();
        let b = rsa_keygen(512, &mut rng).unwrap();
        let (sender, receiver) = if a.n > b.n { (a, b) } else { (b, a) };
        let mut params = calibrate(SecurityLevel::L1, CipherSuite::Rsa);
        params.sig_mode = SigMode::Literal;
        let mut cc = SessionState::command_centre(2, sender, params, vec![]);
        cc.phase = crate::handshake::Phase::Ready;
        cc.peer_public = Some(receiver.public());
        let mut st = SessionState::shooter_target(2, receiver, params);
        st.phase = crate::handshake::Phase::Ready;

        let env = cc.seal(b"literal chain payload").unwrap();
        assert_eq!(env.sig_mode, SigMode::Literal);
        assert_eq!(st.open(&env).unwrap(), b"literal chain payload");
    }

    #[test]
    fn literal_mode_falls_back_to_digest_on_small_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = rsa_keygen(512, &mut rng).unwrap();
        let b = rsa_keygen(512, &mut rng).unwrap();
        let (smaller, larger) = if a.n < b.n { (a, b) } else { (b, a) };
        let mut params = calibrate(SecurityLevel::L1, CipherSuite::Rsa);
        params.sig_mode = SigMode::Literal;
        let mut cc = SessionState::command_centre(3, smaller, params, vec![]);
        cc.phase = crate::handshake::Phase::Ready;
        cc.peer_public = Some(larger.public());
        let env = cc.seal(b"fallback").unwrap();
        assert_eq!(env.sig_mode, SigMode::Digest);
    }
}
