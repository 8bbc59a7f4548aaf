//! Stop-and-wait reliable delivery: transmit a whole fragment set, await
//! the protocol-level response message, retransmit the full set on timeout.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::{
    decode_frame, encode_frame, fragment, Endpoint, Frame, MsgType, NetError, Reassembler,
};

/// Builds the fragment set carrying one protocol message.
pub fn frames_for_message(
    session_id: u64,
    msg_type: MsgType,
    payload: &[u8],
    max_fragment: usize,
) -> Vec<Frame> {
    fragment(payload, max_fragment)
        .into_iter()
        .map(|(frag_index, frag_count, chunk)| Frame {
            msg_type,
            session_id,
            frag_index,
            frag_count,
            payload: chunk,
        })
        .collect()
}

/// Transmits a full fragment set. `encode_frame` enforces the emission-side
/// payload ceiling.
pub fn send_message(endpoint: &mut dyn Endpoint, frames: &[Frame]) -> Result<(), NetError> {
    for frame in frames {
        endpoint.send(&encode_frame(frame)?)?;
    }
    Ok(())
}

/// Receives and reassembles one complete message before `deadline`.
/// Corrupt datagrams and frames for other sessions are dropped silently;
/// a retransmitted fragment restarts that message's reassembly.
pub fn recv_message(
    endpoint: &mut dyn Endpoint,
    deadline: Instant,
    session_filter: Option<u64>,
) -> Result<Option<(MsgType, u64, Vec<u8>)>, NetError> {
    let mut assembling: HashMap<(u64, MsgType), Reassembler> = HashMap::new();
    loop {
        let now = Instant::now();
        if now >= deadline {
            return Ok(None);
        }
        let Some(datagram) = endpoint.recv(deadline - now)? else {
            continue;
        };
        let Ok(frame) = decode_frame(&datagram) else {
            continue;
        };
        if session_filter.is_some_and(|want| want != frame.session_id) {
            continue;
        }
        let key = (frame.session_id, frame.msg_type);
        let slot = assembling.entry(key).or_default();
        match slot.accept(frame.frag_index, frame.frag_count, frame.payload.clone()) {
            Ok(Some(payload)) => return Ok(Some((frame.msg_type, frame.session_id, payload))),
            Ok(None) => {}
            // A duplicate means the sender restarted the set; begin anew.
            Err(NetError::ConflictingDuplicate) => {
                let mut fresh = Reassembler::new();
                if let Ok(Some(payload)) =
                    fresh.accept(frame.frag_index, frame.frag_count, frame.payload)
                {
                    return Ok(Some((frame.msg_type, frame.session_id, payload)));
                }
                assembling.insert(key, fresh);
            }
            Err(_) => {}
        }
    }
}

/// The response that ended one stop-and-wait exchange.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    /// Transmissions of the outbound fragment set, including the first.
    pub attempts: u32,
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

/// Sends `frames` and waits for a response whose type is in `accept`
/// (empty accepts anything) on the same session. Retransmits the whole set
/// on timeout; after `max_retries` retransmissions reports delivery-failed.
/// Socket errors propagate as their own variant.
pub fn send_reliable(
    endpoint: &mut dyn Endpoint,
    frames: &[Frame],
    timeout_ms: u64,
    max_retries: u32,
    accept: &[MsgType],
) -> Result<Delivery, NetError> {
    assert!(timeout_ms > 0, "timeout_ms must be positive");
    let session_id = frames.first().map(|f| f.session_id);
    for attempt in 1..=max_retries + 1 {
        send_message(endpoint, frames)?;
        let deadline = Instant::now() + Duration::from_millis(timeout_ms);
        while let Some((msg_type, _, payload)) = recv_message(endpoint, deadline, session_id)? {
            if accept.is_empty() || accept.contains(&msg_type) {
                return Ok(Delivery { attempts: attempt, msg_type, payload });
            }
        }
    }
    Err(NetError::DeliveryFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netio::lossy_link;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TIMEOUT_MS: u64 = 20;

    /// Echoes every complete inbound message back as an ACK until the link
    /// goes quiet.
    fn spawn_echo(mut ep: impl Endpoint + 'static) -> std::thread::JoinHandle<()> {
        std::thread::spawn(move || loop {
            let deadline = Instant::now() + Duration::from_millis(500);
            match recv_message(&mut ep, deadline, None) {
                Ok(Some((_, session_id, payload))) => {
                    let frames = frames_for_message(session_id, MsgType::Ack, &payload, 64);
                    let _ = send_message(&mut ep, &frames);
                }
                _ => return,
            }
        })
    }

    #[test]
    fn zero_loss_is_one_transmission() {
        let (mut a, b) = lossy_link(61, 0.0, 0.0);
        let echo = spawn_echo(b);
        let frames = frames_for_message(5, MsgType::Data, b"one shot", 4);
        let d = send_reliable(&mut a, &frames, TIMEOUT_MS, 5, &[MsgType::Ack]).unwrap();
        assert_eq!(d.attempts, 1);
        assert_eq!(d.payload, b"one shot");
        echo.join().unwrap();
    }

    /// An endpoint that swallows every datagram of the first transmission.
    struct DropFirstSet<E> {
        inner: E,
        dropped: usize,
        drop_n: usize,
    }

    impl<E: Endpoint> Endpoint for DropFirstSet<E> {
        fn send(&mut self, datagram: &[u8]) -> Result<(), NetError> {
            if self.dropped < self.drop_n {
                self.dropped += 1;
                return Ok(());
            }
            self.inner.send(datagram)
        }

        fn recv(&mut self, timeout: Duration) -> Result<Option<Vec<u8>>, NetError> {
            self.inner.recv(timeout)
        }
    }

    #[test]
    fn first_attempt_dropped_means_two_transmissions() {
        let (a, b) = lossy_link(62, 0.0, 0.0);
        let echo = spawn_echo(b);
        let frames = frames_for_message(6, MsgType::Data, b"retry me", 4);
        let mut ep = DropFirstSet { inner: a, dropped: 0, drop_n: frames.len() };
        let d = send_reliable(&mut ep, &frames, TIMEOUT_MS, 5, &[MsgType::Ack]).unwrap();
        assert_eq!(d.attempts, 2);
        echo.join().unwrap();
    }

    #[test]
    fn dead_link_reports_delivery_failed() {
        let (mut a, _b) = lossy_link(63, 1.0, 0.0);
        let frames = frames_for_message(7, MsgType::Data, b"void", 4);
        let err = send_reliable(&mut a, &frames, TIMEOUT_MS, 2, &[MsgType::Ack]);
        assert!(matches!(err, Err(NetError::DeliveryFailed)));
    }

    #[test]
    fn lossy_link_mostly_delivers() {
        let (mut a, b) = lossy_link(64, 0.2, 0.1);
        let echo = spawn_echo(b);
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let mut delivered = 0;
        // Single-fragment messages: the per-attempt chain is one DATA
        // datagram plus one ACK, so six attempts fail with p = 0.36^6.
        for i in 0..100u64 {
            let mut payload = vec![0u8; rng.gen_range(1..60)];
            rng.fill(&mut payload[..]);
            let frames = frames_for_message(i, MsgType::Data, &payload, 64);
            match send_reliable(&mut a, &frames, TIMEOUT_MS, 5, &[MsgType::Ack]) {
                Ok(d) => {
                    assert_eq!(d.payload, payload);
                    delivered += 1;
                }
                Err(NetError::DeliveryFailed) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(delivered >= 99, "only {delivered}/100 delivered");
        drop(a);
        echo.join().unwrap();
    }

    #[test]
    fn responses_of_unexpected_type_are_skipped() {
        let (mut a, mut b) = lossy_link(66, 0.0, 0.0);
        let noise = frames_for_message(8, MsgType::TimeReport, b"noise", 64);
        send_message(&mut b, &noise).unwrap();
        let real = frames_for_message(8, MsgType::Ack, b"real", 64);
        send_message(&mut b, &real).unwrap();
        let frames = frames_for_message(8, MsgType::Data, b"query", 64);
        let d = send_reliable(&mut a, &frames, TIMEOUT_MS, 0, &[MsgType::Ack]).unwrap();
        assert_eq!(d.payload, b"real");
    }

    #[test]
    fn other_sessions_are_ignored() {
        let (mut a, mut b) = lossy_link(67, 0.0, 0.0);
        send_message(&mut b, &frames_for_message(999, MsgType::Ack, b"stranger", 64)).unwrap();
        let frames = frames_for_message(9, MsgType::Data, b"q", 64);
        let err = send_reliable(&mut a, &frames, TIMEOUT_MS, 0, &[MsgType::Ack]);
        assert!(matches!(err, Err(NetError::DeliveryFailed)));
    }
}
