//! The digital signature protocol, security-level calibration, envelope
//! seal/open across the three cipher suites, and the session state machine
//! driving the key exchange flow.

mod envelope;
mod session;
mod sig;
mod suite;

pub use envelope::{key_unwrap_attempts, CipherPayload, Envelope, EnvelopeMetrics};
pub use session::{
    Phase, ProtocolAction, ProtocolErrorCode, ProtocolEvent, Role, SessionState, TimeReport,
    MAX_RETRIES, RETRANSMIT_TIMEOUT_MS,
};
pub use sig::{homomorphic_product_check, sign_digest, sign_literal, verify_digest, verify_literal};
pub use suite::{calibrate, CipherSuite, SecurityLevel, SigMode, SuiteParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HandshakeError {
    #[error("signature verification failed")]
    SignatureInvalid,
    #[error("signature is malformed")]
    CorruptSignature,
    #[error("ciphertext is corrupt")]
    CorruptCiphertext,
    #[error("signer modulus must exceed recipient modulus for literal signing")]
    IncompatibleModuli,
    #[error("operation not allowed in the current protocol phase")]
    ProtocolViolation,
    #[error(transparent)]
    Primitive(#[from] crate::primitives::PrimitiveError),
}
