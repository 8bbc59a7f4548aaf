//! Datagram transport: bit-exact frame codec, fragmentation, envelope wire
//! encoding, stop-and-wait reliable delivery, and session drivers over real
//! UDP sockets or a deterministic simulated link.

mod driver;
mod fragment;
mod frame;
mod link;
mod reliable;
mod wire;

pub use driver::{run_command_centre, run_shooter_target, DriverConfig};
pub use fragment::{fragment, reassemble, Reassembler};
pub use frame::{decode_frame, encode_frame, Frame, MsgType, FRAME_CHECK, FRAME_HEADER, MAX_PAYLOAD};
pub use link::{lossy_link, Endpoint, SimEndpoint, UdpEndpoint};
pub use reliable::{frames_for_message, recv_message, send_message, send_reliable, Delivery};
pub use wire::{
    decode_envelope, decode_public_key, decode_time_report, encode_envelope, encode_public_key,
    encode_time_report,
};

use crate::handshake::{HandshakeError, ProtocolErrorCode};

pub const DEFAULT_PORT: u16 = 47001;
pub const MAX_FRAGMENT: usize = 1400;

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("bad magic")]
    BadMagic,
    #[error("bad version")]
    BadVersion,
    #[error("bad checksum")]
    BadChecksum,
    #[error("truncated frame")]
    Truncated,
    #[error("unknown message type {0:#04x}")]
    UnknownMsgType(u8),
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
    #[error("payload of {0} octets exceeds the frame limit")]
    PayloadTooLarge(usize),
    #[error("conflicting duplicate fragment")]
    ConflictingDuplicate,
    #[error("missing fragment")]
    MissingFragment,
    #[error("malformed payload: {0}")]
    Malformed(&'static str),
    #[error("delivery failed after retries")]
    DeliveryFailed,
    #[error("peer reported error code {0:#04x}")]
    PeerError(u8),
    #[error("rejected inbound data: {0:?}")]
    CryptoReject(ProtocolErrorCode),
    #[error("socket: {0}")]
    Socket(#[from] std::io::Error),
    #[error(transparent)]
    Handshake(#[from] HandshakeError),
}
