//! The datagram frame codec. Every field is fixed-position big-endian; the
//! trailing check is the first 4 octets of SHA-1 over everything before it,
//! filtering accidental corruption only (integrity comes from the
//! signature).

use crate::primitives::sha1;

use super::NetError;

const MAGIC: &[u8; 4] = b"NCSH";
const VERSION: u8 = 1;

/// Octets before the payload: magic 4, version 1, msg_type 1, session_id 8,
/// frag_index 2, frag_count 2, payload_len 4.
pub const FRAME_HEADER: usize = 22;
pub const FRAME_CHECK: usize = 4;
pub const MAX_PAYLOAD: usize = 60000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MsgType {
    KeyRequest,
    KeyResponse,
    Data,
    Ack,
    Error,
    TimeReport,
}

impl MsgType {
    pub fn wire_code(self) -> u8 {
        match self {
            MsgType::KeyRequest => 0x01,
            MsgType::KeyResponse => 0x02,
            MsgType::Data => 0x03,
            MsgType::Ack => 0x04,
            MsgType::Error => 0x05,
            MsgType::TimeReport => 0x06,
        }
    }

    pub fn from_wire_code(code: u8) -> Result<Self, NetError> {
        match code {
            0x01 => Ok(MsgType::KeyRequest),
            0x02 => Ok(MsgType::KeyResponse),
            0x03 => Ok(MsgType::Data),
            0x04 => Ok(MsgType::Ack),
            0x05 => Ok(MsgType::Error),
            0x06 => Ok(MsgType::TimeReport),
            other => Err(NetError::UnknownMsgType(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub session_id: u64,
    pub frag_index: u16,
    pub frag_count: u16,
    pub payload: Vec<u8>,
}

pub fn encode_frame(f: &Frame) -> Result<Vec<u8>, NetError> {
    if f.payload.len() > MAX_PAYLOAD {
        return Err(NetError::PayloadTooLarge(f.payload.len()));
    }
    if f.frag_index >= f.frag_count {
        return Err(NetError::InvalidFrame("frag_index must be below frag_count"));
    }
    let mut buf = Vec::with_capacity(FRAME_HEADER + f.payload.len() + FRAME_CHECK);
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.push(f.msg_type.wire_code());
    buf.extend_from_slice(&f.session_id.to_be_bytes());
    buf.extend_from_slice(&f.frag_index.to_be_bytes());
    buf.extend_from_slice(&f.frag_count.to_be_bytes());
    buf.extend_from_slice(&(f.payload.len() as u32).to_be_bytes());
    buf.extend_from_slice(&f.payload);
    let check = sha1(&buf);
    buf.extend_from_slice(&check.0[..FRAME_CHECK]);
    Ok(buf)
}

pub fn decode_frame(buf: &[u8]) -> Result<Frame, NetError> {
    if buf.len() < FRAME_HEADER + FRAME_CHECK {
        return Err(NetError::Truncated);
    }
    if &buf[0..4] != MAGIC {
        return Err(NetError::BadMagic);
    }
    if buf[4] != VERSION {
        return Err(NetError::BadVersion);
    }
    let payload_len = u32::from_be_bytes(buf[18..22].try_into().unwrap()) as usize;
    let total = FRAME_HEADER + payload_len + FRAME_CHECK;
    if buf.len() < total {
        return Err(NetError::Truncated);
    }
    if buf.len() > total {
        return Err(NetError::InvalidFrame("trailing octets"));
    }
    let body = &buf[..FRAME_HEADER + payload_len];
    if sha1(body).0[..FRAME_CHECK] != buf[FRAME_HEADER + payload_len..] {
        return Err(NetError::BadChecksum);
    }
    let msg_type = MsgType::from_wire_code(buf[5])?;
    let frame = Frame {
        msg_type,
        session_id: u64::from_be_bytes(buf[6..14].try_into().unwrap()),
        frag_index: u16::from_be_bytes(buf[14..16].try_into().unwrap()),
        frag_count: u16::from_be_bytes(buf[16..18].try_into().unwrap()),
        payload: buf[FRAME_HEADER..FRAME_HEADER + payload_len].to_vec(),
    };
    if frame.frag_index >= frame.frag_count {
        return Err(NetError::InvalidFrame("frag_index must be below frag_count"));
    }
    if frame.payload.len() > MAX_PAYLOAD {
        return Err(NetError::PayloadTooLarge(frame.payload.len()));
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_key_request_is_26_octets() {
        let f = Frame {
            msg_type: MsgType::KeyRequest,
            session_id: 0,
            frag_index: 0,
            frag_count: 1,
            payload: vec![],
        };
        let buf = encode_frame(&f).unwrap();
        assert_eq!(buf.len(), FRAME_HEADER + FRAME_CHECK);
        assert_eq!(&buf[18..22], &[0, 0, 0, 0]);
        assert_eq!(decode_frame(&buf).unwrap(), f);
    }

    #[test]
    fn roundtrip_1000_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let types = [
            MsgType::KeyRequest,
            MsgType::KeyResponse,
            MsgType::Data,
            MsgType::Ack,
            MsgType::Error,
            MsgType::TimeReport,
        ];
        for _ in 0..1000 {
            let count = rng.gen_range(1..=8u16);
            let mut payload = vec![0u8; rng.gen_range(0..2000)];
            rng.fill(&mut payload[..]);
            let f = Frame {
                msg_type: types[rng.gen_range(0..types.len())],
                session_id: rng.gen(),
                frag_index: rng.gen_range(0..count),
                frag_count: count,
                payload,
            };
            assert_eq!(decode_frame(&encode_frame(&f).unwrap()).unwrap(), f);
        }
    }

    #[test]
    fn every_single_octet_corruption_is_rejected() {
        let f = Frame {
            msg_type: MsgType::Data,
            session_id: 0x0123_4567_89ab_cdef,
            frag_index: 1,
            frag_count: 3,
            payload: b"single-octet corruption sweep target".to_vec(),
        };
        let good = encode_frame(&f).unwrap();
        for pos in 0..good.len() {
            for bit in 0..8 {
                let mut bad = good.clone();
                bad[pos] ^= 1 << bit;
                assert!(decode_frame(&bad).is_err(), "octet {pos} bit {bit} accepted");
            }
        }
    }

    #[test]
    fn truncation_prefixes_rejected() {
        let f = Frame {
            msg_type: MsgType::Ack,
            session_id: 5,
            frag_index: 0,
            frag_count: 1,
            payload: vec![1, 2, 3],
        };
        let buf = encode_frame(&f).unwrap();
        for len in 0..buf.len() {
            assert!(decode_frame(&buf[..len]).is_err(), "prefix of {len} accepted");
        }
    }

    #[test]
    fn distinct_error_classes() {
        let f = Frame {
            msg_type: MsgType::KeyRequest,
            session_id: 9,
            frag_index: 0,
            frag_count: 1,
            payload: vec![],
        };
        let good = encode_frame(&f).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode_frame(&bad), Err(NetError::BadMagic)));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(decode_frame(&bad), Err(NetError::BadVersion)));

        let mut bad = good.clone();
        bad[6] ^= 0xFF; // session_id octet: caught by the checksum
        assert!(matches!(decode_frame(&bad), Err(NetError::BadChecksum)));

        assert!(matches!(decode_frame(&good[..10]), Err(NetError::Truncated)));
    }

    #[test]
    fn oversize_payload_never_encoded() {
        let f = Frame {
            msg_type: MsgType::Data,
            session_id: 0,
            frag_index: 0,
            frag_count: 1,
            payload: vec![0u8; MAX_PAYLOAD + 1],
        };
        assert!(matches!(encode_frame(&f), Err(NetError::PayloadTooLarge(_))));
    }

    #[test]
    fn bad_frag_invariant_rejected_on_encode() {
        let f = Frame {
            msg_type: MsgType::Data,
            session_id: 0,
            frag_index: 1,
            frag_count: 1,
            payload: vec![],
        };
        assert!(encode_frame(&f).is_err());
    }
}
