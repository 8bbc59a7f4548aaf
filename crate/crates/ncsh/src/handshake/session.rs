//! The session state machine driving the key request -> public-key response
//! -> encrypt -> sign -> verify -> decrypt message flow. `step` is a pure
//! transition function over (state, event); all sending and timer side
//! effects are performed by the caller from the returned action list.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::primitives::{RsaKeyPair, RsaPublicKey};

use super::envelope::{open_envelope, seal_envelope, Envelope, EnvelopeMetrics};
use super::{HandshakeError, SuiteParams};

pub const MAX_RETRIES: u32 = 5;
pub const RETRANSMIT_TIMEOUT_MS: u64 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    CommandCentre,
    ShooterTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Idle,
    AwaitingKey,
    Ready,
    AwaitingAck,
    Closed,
}

/// Decrypt/verify timing observed at the shooter target and reported back
/// to the command centre in the ACK.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TimeReport {
    pub verify_us: u64,
    pub decrypt_us: u64,
}

#[derive(Debug, Clone)]
pub enum ProtocolEvent {
    Start,
    KeyRequestReceived,
    KeyResponseReceived(RsaPublicKey),
    DataReceived(Envelope),
    AckReceived(TimeReport),
    Timeout,
}

#[derive(Debug, Clone)]
pub enum ProtocolAction {
    SendKeyRequest,
    SendKeyResponse(RsaPublicKey),
    SendData(Envelope),
    SendAck(TimeReport),
    SendError(ProtocolErrorCode),
    /// Shooter target: decrypted plaintext surfaced to the caller.
    Deliver(Vec<u8>),
    /// Command centre: the session completed; the peer's observed timing.
    ReportComplete(TimeReport),
    ReportFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolErrorCode {
    SignatureInvalid = 0x01,
    CorruptCiphertext = 0x02,
}

/// One endpoint's view of a handshake session.
#[derive(Debug)]
pub struct SessionState {
    pub role: Role,
    pub phase: Phase,
    pub session_id: u64,
    pub own_keys: RsaKeyPair,
    pub peer_public: Option<RsaPublicKey>,
    pub params: SuiteParams,
    pub retries: u32,
    pub max_retries: u32,
    /// Command centre: the message awaiting delivery once the peer key
    /// arrives.
    pending: Option<Vec<u8>>,
    /// Command centre: the sealed envelope kept for retransmission.
    last_envelope: Option<Envelope>,
    /// Command centre: timing reported by the peer's last ACK.
    pub last_report: Option<TimeReport>,
    /// Session-owned deterministic randomness for IVs and session keys.
    rng: ChaCha20Rng,
}

impl SessionState {
    pub fn command_centre(
        session_id: u64,
        own_keys: RsaKeyPair,
        params: SuiteParams,
        message: Vec<u8>,
    ) -> Self {
        Self {
            role: Role::CommandCentre,
            phase: Phase::Idle,
            session_id,
            own_keys,
            peer_public: None,
            params,
            retries: 0,
            max_retries: MAX_RETRIES,
            pending: Some(message),
            last_envelope: None,
            last_report: None,
            rng: ChaCha20Rng::seed_from_u64(session_id),
        }
    }

    pub fn shooter_target(session_id: u64, own_keys: RsaKeyPair, params: SuiteParams) -> Self {
        Self {
            role: Role::ShooterTarget,
            phase: Phase::Idle,
            session_id,
            own_keys,
            peer_public: None,
            params,
            retries: 0,
            max_retries: MAX_RETRIES,
            pending: None,
            last_envelope: None,
            last_report: None,
            rng: ChaCha20Rng::seed_from_u64(session_id ^ 0x5354_5354),
        }
    }

    /// Seals `plaintext` for the peer. Requires phase READY with the peer
    /// key known.
    pub fn seal(&mut self, plaintext: &[u8]) -> Result<Envelope, HandshakeError> {
        self.seal_instrumented(plaintext).map(|(env, _)| env)
    }

    pub fn seal_instrumented(
        &mut self,
        plaintext: &[u8],
    ) -> Result<(Envelope, EnvelopeMetrics), HandshakeError> {
        if self.phase != Phase::Ready {
            return Err(HandshakeError::ProtocolViolation);
        }
        let peer = self.peer_public.clone().ok_or(HandshakeError::ProtocolViolation)?;
        seal_envelope(&self.own_keys, &peer, &self.params, plaintext, &mut self.rng)
    }

    /// Verifies the signature first, then unwraps and decrypts. Pure given
    /// the state: a duplicate envelope opens identically.
    pub fn open(&self, env: &Envelope) -> Result<Vec<u8>, HandshakeError> {
        if self.phase != Phase::Ready {
            return Err(HandshakeError::ProtocolViolation);
        }
        open_envelope(&self.own_keys, env).map(|(pt, _)| pt)
    }

    pub fn open_instrumented(
        &self,
        env: &Envelope,
    ) -> Result<(Vec<u8>, EnvelopeMetrics), HandshakeError> {
        if self.phase != Phase::Ready {
            return Err(HandshakeError::ProtocolViolation);
        }
        open_envelope(&self.own_keys, env)
    }

    /// The deterministic transition table. An undefined (state, event) pair
    /// leaves the state unchanged and reports a protocol violation.
    pub fn step(&mut self, event: ProtocolEvent) -> Result<Vec<ProtocolAction>, HandshakeError> {
        use Phase::*;
        use ProtocolEvent::*;
        use Role::*;

        match (self.role, self.phase, event) {
            (CommandCentre, Idle, Start) => {
                self.phase = AwaitingKey;
                Ok(vec![ProtocolAction::SendKeyRequest])
            }
            (CommandCentre, AwaitingKey, KeyResponseReceived(peer)) => {
                self.peer_public = Some(peer);
                self.phase = Ready;
                self.retries = 0;
                // With a message pending, READY immediately advances to
                // AWAITING_ACK by sealing and emitting DATA.
                if let Some(message) = self.pending.take() {
                    let env = self.seal(&message)?;
                    self.last_envelope = Some(env.clone());
                    self.phase = AwaitingAck;
                    Ok(vec![ProtocolAction::SendData(env)])
                } else {
                    Ok(vec![])
                }
            }
            (CommandCentre, AwaitingAck, AckReceived(report)) => {
                self.last_report = Some(report);
                self.phase = Ready;
                self.retries = 0;
                Ok(vec![ProtocolAction::ReportComplete(report)])
            }
            (CommandCentre, AwaitingKey, Timeout) => self.retransmit(ProtocolAction::SendKeyRequest),
            (CommandCentre, AwaitingAck, Timeout) => {
                let env = self.last_envelope.clone().ok_or(HandshakeError::ProtocolViolation)?;
                self.retransmit(ProtocolAction::SendData(env))
            }
            (ShooterTarget, Idle, KeyRequestReceived) => {
                self.phase = Ready;
                Ok(vec![ProtocolAction::SendKeyResponse(self.own_keys.public())])
            }
            // Duplicate KEY_REQUEST after a lost KEY_RESPONSE: answer again.
            (ShooterTarget, Ready, KeyRequestReceived) => {
                Ok(vec![ProtocolAction::SendKeyResponse(self.own_keys.public())])
            }
            (ShooterTarget, Ready, DataReceived(env)) => {
                match open_envelope(&self.own_keys, &env) {
                    Ok((plaintext, metrics)) => {
                        let report = TimeReport {
                            verify_us: metrics.verify.as_micros() as u64,
                            decrypt_us: metrics.payload_decrypt.as_micros() as u64,
                        };
                        Ok(vec![
                            ProtocolAction::Deliver(plaintext),
                            ProtocolAction::SendAck(report),
                        ])
                    }
                    Err(HandshakeError::SignatureInvalid) => {
                        Ok(vec![ProtocolAction::SendError(ProtocolErrorCode::SignatureInvalid)])
                    }
                    Err(_) => {
                        Ok(vec![ProtocolAction::SendError(ProtocolErrorCode::CorruptCiphertext)])
                    }
                }
            }
            _ => Err(HandshakeError::ProtocolViolation),
        }
    }

    fn retransmit(&mut self, action: ProtocolAction) -> Result<Vec<ProtocolAction>, HandshakeError> {
        if self.retries >= self.max_retries {
            self.phase = Phase::Closed;
            return Ok(vec![ProtocolAction::ReportFailure]);
        }
        self.retries += 1;
        Ok(vec![action])
    }
}
