//! Payload serializations carried inside frames: the DATA envelope, the
//! KEY_RESPONSE public key, and the ACK/TIME_REPORT timing report. All
//! integers are minimal big-endian magnitudes behind explicit length
//! prefixes; this is the single normative encoding.

use num_bigint::BigUint;

use crate::handshake::{CipherPayload, CipherSuite, Envelope, SigMode, TimeReport};
use crate::primitives::RsaPublicKey;

use super::NetError;

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], NetError> {
        if self.buf.len() < n {
            return Err(NetError::Malformed("short field"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, NetError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, NetError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, NetError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NetError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn done(&self) -> Result<(), NetError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(NetError::Malformed("trailing octets"))
        }
    }
}

fn put_bigint(out: &mut Vec<u8>, v: &BigUint) {
    let bytes = v.to_bytes_be();
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(&bytes);
}

fn get_bigint(r: &mut Reader) -> Result<BigUint, NetError> {
    let len = r.u32()? as usize;
    Ok(BigUint::from_bytes_be(r.take(len)?))
}

fn put_blocks(out: &mut Vec<u8>, blocks: &[BigUint]) {
    out.extend_from_slice(&(blocks.len() as u16).to_be_bytes());
    for b in blocks {
        put_bigint(out, b);
    }
}

fn get_blocks(r: &mut Reader) -> Result<Vec<BigUint>, NetError> {
    let count = r.u16()? as usize;
    (0..count).map(|_| get_bigint(r)).collect()
}

pub fn encode_envelope(env: &Envelope) -> Vec<u8> {
    let mut out = Vec::new();
    out.push(env.suite.wire_code());
    out.push(env.sig_mode.wire_code());
    put_bigint(&mut out, &env.sender_public.e);
    put_bigint(&mut out, &env.sender_public.n);
    put_blocks(&mut out, &env.wrapped_key);
    out.push(env.iv.len() as u8);
    out.extend_from_slice(&env.iv);
    let ct = env.ciphertext.to_bytes();
    out.extend_from_slice(&(ct.len() as u32).to_be_bytes());
    out.extend_from_slice(&ct);
    put_blocks(&mut out, &env.signature);
    out
}

pub fn decode_envelope(buf: &[u8]) -> Result<Envelope, NetError> {
    let mut r = Reader::new(buf);
    let suite = CipherSuite::from_wire_code(r.u8()?)
        .ok_or(NetError::Malformed("unknown cipher suite"))?;
    let sig_mode =
        SigMode::from_wire_code(r.u8()?).ok_or(NetError::Malformed("unknown signature mode"))?;
    let e = get_bigint(&mut r)?;
    let n = get_bigint(&mut r)?;
    let wrapped_key = get_blocks(&mut r)?;
    let iv_len = r.u8()? as usize;
    let iv = r.take(iv_len)?.to_vec();
    let ct_len = r.u32()? as usize;
    let ct = r.take(ct_len)?;
    let ciphertext = match suite {
        CipherSuite::Rsa => {
            // The ciphertext field nests its own blockwise framing.
            let mut inner = Reader::new(ct);
            let blocks = get_blocks(&mut inner)?;
            inner.done()?;
            CipherPayload::Rsa(blocks)
        }
        _ => CipherPayload::Sym(ct.to_vec()),
    };
    let signature = get_blocks(&mut r)?;
    r.done()?;
    Ok(Envelope {
        suite,
        sig_mode,
        sender_public: RsaPublicKey { e, n },
        wrapped_key,
        iv,
        ciphertext,
        signature,
    })
}

pub fn encode_public_key(pk: &RsaPublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    put_bigint(&mut out, &pk.e);
    put_bigint(&mut out, &pk.n);
    out
}

pub fn decode_public_key(buf: &[u8]) -> Result<RsaPublicKey, NetError> {
    let mut r = Reader::new(buf);
    let e = get_bigint(&mut r)?;
    let n = get_bigint(&mut r)?;
    r.done()?;
    Ok(RsaPublicKey { e, n })
}

pub fn encode_time_report(report: &TimeReport) -> Vec<u8> {
    let mut out = Vec::with_capacity(16);
    out.extend_from_slice(&report.verify_us.to_be_bytes());
    out.extend_from_slice(&report.decrypt_us.to_be_bytes());
    out
}

pub fn decode_time_report(buf: &[u8]) -> Result<TimeReport, NetError> {
    let mut r = Reader::new(buf);
    let report = TimeReport { verify_us: r.u64()?, decrypt_us: r.u64()? };
    r.done()?;
    Ok(report)
}
