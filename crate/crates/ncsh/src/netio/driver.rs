//! Session drivers: run the handshake state machine over an endpoint,
//! turning protocol actions into reliable message exchanges.

use std::time::{Duration, Instant};

use crate::handshake::{
    HandshakeError, Phase, ProtocolAction, ProtocolEvent, SessionState, TimeReport, MAX_RETRIES,
    RETRANSMIT_TIMEOUT_MS,
};

use super::reliable::Delivery;
use super::{
    decode_envelope, decode_public_key, decode_time_report, encode_envelope, encode_public_key,
    encode_time_report, frames_for_message, recv_message, send_message, send_reliable, Endpoint,
    MsgType, NetError, MAX_FRAGMENT,
};

#[derive(Debug, Clone, Copy)]
pub struct DriverConfig {
    pub max_fragment: usize,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Listener: how long to wait for a session to begin. `None` waits
    /// indefinitely.
    pub idle_timeout_ms: Option<u64>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            max_fragment: MAX_FRAGMENT,
            timeout_ms: RETRANSMIT_TIMEOUT_MS,
            max_retries: MAX_RETRIES,
            idle_timeout_ms: None,
        }
    }
}

fn send_one(
    endpoint: &mut dyn Endpoint,
    session_id: u64,
    msg_type: MsgType,
    payload: &[u8],
    cfg: &DriverConfig,
) -> Result<(), NetError> {
    send_message(endpoint, &frames_for_message(session_id, msg_type, payload, cfg.max_fragment))
}

fn response_event(
    session: &mut SessionState,
    resp: Delivery,
) -> Result<Vec<ProtocolAction>, NetError> {
    let event = match resp.msg_type {
        MsgType::KeyResponse => {
            ProtocolEvent::KeyResponseReceived(decode_public_key(&resp.payload)?)
        }
        MsgType::Ack => ProtocolEvent::AckReceived(decode_time_report(&resp.payload)?),
        MsgType::Error => {
            return Err(NetError::PeerError(resp.payload.first().copied().unwrap_or(0)))
        }
        _ => return Err(NetError::Malformed("unexpected response type")),
    };
    session.step(event).map_err(NetError::from)
}

/// Drives a command-centre session to completion: key request, data
/// delivery, and the peer's timing report from the ACK.
pub fn run_command_centre(
    endpoint: &mut dyn Endpoint,
    session: &mut SessionState,
    cfg: &DriverConfig,
) -> Result<TimeReport, NetError> {
    let mut actions = session.step(ProtocolEvent::Start)?;
    loop {
        let mut next = Vec::new();
        for action in actions {
            match action {
                ProtocolAction::SendKeyRequest => {
                    let frames = frames_for_message(
                        session.session_id,
                        MsgType::KeyRequest,
                        &[],
                        cfg.max_fragment,
                    );
                    let resp = send_reliable(
                        endpoint,
                        &frames,
                        cfg.timeout_ms,
                        cfg.max_retries,
                        &[MsgType::KeyResponse, MsgType::Error],
                    )?;
                    next.extend(response_event(session, resp)?);
                }
                ProtocolAction::SendData(env) => {
                    let frames = frames_for_message(
                        session.session_id,
                        MsgType::Data,
                        &encode_envelope(&env),
                        cfg.max_fragment,
                    );
                    let resp = send_reliable(
                        endpoint,
                        &frames,
                        cfg.timeout_ms,
                        cfg.max_retries,
                        &[MsgType::Ack, MsgType::Error],
                    )?;
                    next.extend(response_event(session, resp)?);
                }
                ProtocolAction::ReportComplete(report) => return Ok(report),
                ProtocolAction::ReportFailure => return Err(NetError::DeliveryFailed),
                _ => return Err(NetError::Handshake(HandshakeError::ProtocolViolation)),
            }
        }
        if next.is_empty() {
            return Err(NetError::Handshake(HandshakeError::ProtocolViolation));
        }
        actions = next;
    }
}

/// Serves one shooter-target session: answers the key request, verifies and
/// decrypts the data message, ACKs with the timing report, and keeps
/// answering duplicates until the link goes quiet. Returns the delivered
/// plaintext.
pub fn run_shooter_target(
    endpoint: &mut dyn Endpoint,
    session: &mut SessionState,
    cfg: &DriverConfig,
) -> Result<Vec<u8>, NetError> {
    let mut delivered: Option<Vec<u8>> = None;
    loop {
        // After delivery, linger long enough to re-ACK several retransmitted
        // DATA attempts before concluding the command centre heard us.
        let wait_ms = if delivered.is_some() {
            cfg.timeout_ms * 4
        } else {
            cfg.idle_timeout_ms.unwrap_or(1000)
        };
        let deadline = Instant::now() + Duration::from_millis(wait_ms);
        let Some((msg_type, session_id, payload)) = recv_message(endpoint, deadline, None)? else {
            if let Some(plaintext) = delivered {
                return Ok(plaintext);
            }
            if cfg.idle_timeout_ms.is_some() {
                return Err(NetError::DeliveryFailed);
            }
            continue;
        };
        if session.phase == Phase::Idle {
            // The session id is the command centre's choice.
            session.session_id = session_id;
        } else if session_id != session.session_id {
            continue;
        }
        let event = match msg_type {
            MsgType::KeyRequest => ProtocolEvent::KeyRequestReceived,
            MsgType::Data => ProtocolEvent::DataReceived(decode_envelope(&payload)?),
            _ => continue,
        };
        let actions = match session.step(event) {
            Ok(actions) => actions,
            // A stale or duplicated message the machine does not define a
            // transition for; ignore it.
            Err(HandshakeError::ProtocolViolation) => continue,
            Err(e) => return Err(e.into()),
        };
        for action in actions {
            match action {
                ProtocolAction::SendKeyResponse(pk) => send_one(
                    endpoint,
                    session.session_id,
                    MsgType::KeyResponse,
                    &encode_public_key(&pk),
                    cfg,
                )?,
                ProtocolAction::SendAck(report) => send_one(
                    endpoint,
                    session.session_id,
                    MsgType::Ack,
                    &encode_time_report(&report),
                    cfg,
                )?,
                ProtocolAction::SendError(code) => {
                    send_one(endpoint, session.session_id, MsgType::Error, &[code as u8], cfg)?;
                    return Err(NetError::CryptoReject(code));
                }
                ProtocolAction::Deliver(plaintext) => delivered = Some(plaintext),
                _ => {}
            }
        }
    }
}
