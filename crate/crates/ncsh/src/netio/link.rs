//! Datagram endpoints: real UDP sockets and a deterministic in-process
//! simulated link with Bernoulli drops and adjacent-swap reordering.

use std::net::{SocketAddr, ToSocketAddrs, UdpSocket};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NetError;

/// One side of an unreliable datagram channel.
pub trait Endpoint: Send {
    fn send(&mut self, datagram: &[u8]) -> Result<(), NetError>;
    /// Blocks up to `timeout`; `None` means nothing arrived.
    fn recv(&mut self, timeout: Duration) -> Result<Option<Vec<u8>>, NetError>;
}

pub struct UdpEndpoint {
    socket: UdpSocket,
    peer: Option<SocketAddr>,
}

impl UdpEndpoint {
    /// Client side: ephemeral local port, fixed peer.
    pub fn connect<A: ToSocketAddrs>(peer: A) -> std::io::Result<Self> {
        let peer = peer
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "no address"))?;
        let bind_addr = if peer.is_ipv4() { "0.0.0.0:0" } else { "[::]:0" };
        Ok(Self { socket: UdpSocket::bind(bind_addr)?, peer: Some(peer) })
    }

    /// Listener side: the peer is learned from the first inbound datagram.
    pub fn listen(port: u16) -> std::io::Result<Self> {
        Ok(Self { socket: UdpSocket::bind(("0.0.0.0", port))?, peer: None })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.socket.local_addr()
    }
}

impl Endpoint for UdpEndpoint {
    fn send(&mut self, datagram: &[u8]) -> Result<(), NetError> {
        let peer = self.peer.ok_or_else(|| {
            NetError::Socket(std::io::Error::new(std::io::ErrorKind::NotConnected, "no peer yet"))
        })?;
        self.socket.send_to(datagram, peer)?;
        Ok(())
    }

    fn recv(&mut self, timeout: Duration) -> Result<Option<Vec<u8>>, NetError> {
        // A zero Duration would disable the timeout entirely.
        self.socket.set_read_timeout(Some(timeout.max(Duration::from_millis(1))))?;
        let mut buf = vec![0u8; 65536];
        match self.socket.recv_from(&mut buf) {
            Ok((n, from)) => {
                self.peer.get_or_insert(from);
                buf.truncate(n);
                Ok(Some(buf))
            }
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                Ok(None)
            }
            Err(e) => Err(NetError::Socket(e)),
        }
    }
}

/// One side of the simulated link. Loss and reordering are applied on the
/// sending side from a per-direction seeded generator, so a given seed
/// yields an identical delivery trace on every run.
pub struct SimEndpoint {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    rng: ChaCha8Rng,
    drop_rate: f64,
    reorder_rate: f64,
    /// Datagram held back for an adjacent swap with the next send.
    held: Option<Vec<u8>>,
}

impl SimEndpoint {
    fn forward(&mut self, datagram: Vec<u8>) {
        // The peer having hung up just makes the link a black hole.
        let _ = self.tx.send(datagram);
    }
}

impl Endpoint for SimEndpoint {
    fn send(&mut self, datagram: &[u8]) -> Result<(), NetError> {
        if self.rng.gen::<f64>() < self.drop_rate {
            return Ok(());
        }
        if let Some(held) = self.held.take() {
            self.forward(datagram.to_vec());
            self.forward(held);
        } else if self.rng.gen::<f64>() < self.reorder_rate {
            self.held = Some(datagram.to_vec());
        } else {
            self.forward(datagram.to_vec());
        }
        Ok(())
    }

    fn recv(&mut self, timeout: Duration) -> Result<Option<Vec<u8>>, NetError> {
        // An adjacent swap needs a next send to swap with; once this side
        // turns to listening, the held datagram goes out as-is.
        if let Some(held) = self.held.take() {
            self.forward(held);
        }
        match self.rx.recv_timeout(timeout) {
            Ok(datagram) => Ok(Some(datagram)),
            Err(RecvTimeoutError::Timeout) => Ok(None),
            Err(RecvTimeoutError::Disconnected) => {
                // Keep the timeout contract after the peer hangs up instead
                // of returning instantly and spinning the caller.
                std::thread::sleep(timeout);
                Ok(None)
            }
        }
    }
}

/// A deterministic endpoint pair joined by two lossy directions.
pub fn lossy_link(seed: u64, drop_rate: f64, reorder_rate: f64) -> (SimEndpoint, SimEndpoint) {
    assert!((0.0..=1.0).contains(&drop_rate) && (0.0..=1.0).contains(&reorder_rate));
    let (a_tx, b_rx) = channel();
    let (b_tx, a_rx) = channel();
    let a = SimEndpoint {
        tx: a_tx,
        rx: a_rx,
        rng: ChaCha8Rng::seed_from_u64(seed),
        drop_rate,
        reorder_rate,
        held: None,
    };
    let b = SimEndpoint {
        tx: b_tx,
        rx: b_rx,
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15),
        drop_rate,
        reorder_rate,
        held: None,
    };
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TICK: Duration = Duration::from_millis(5);

    fn drain(ep: &mut SimEndpoint) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        while let Some(d) = ep.recv(TICK).unwrap() {
            out.push(d);
        }
        out
    }

    #[test]
    fn lossless_link_delivers_in_order() {
        let (mut a, mut b) = lossy_link(1, 0.0, 0.0);
        for i in 0u8..50 {
            a.send(&[i]).unwrap();
        }
        let got = drain(&mut b);
        assert_eq!(got, (0u8..50).map(|i| vec![i]).collect::<Vec<_>>());
    }

    #[test]
    fn full_loss_delivers_nothing() {
        let (mut a, mut b) = lossy_link(2, 1.0, 0.0);
        for i in 0u8..50 {
            a.send(&[i]).unwrap();
        }
        assert!(drain(&mut b).is_empty());
    }

    #[test]
    fn same_seed_same_trace() {
        let trace = |seed| {
            let (mut a, mut b) = lossy_link(seed, 0.3, 0.2);
            for i in 0u8..100 {
                a.send(&[i]).unwrap();
            }
            drain(&mut b)
        };
        assert_eq!(trace(7), trace(7));
        assert_ne!(trace(7), trace(8));
    }

    #[test]
    fn reordering_only_swaps_adjacent_pairs() {
        let (mut a, mut b) = lossy_link(3, 0.0, 0.5);
        for i in 0u8..100 {
            a.send(&[i]).unwrap();
        }
        let got = drain(&mut b);
        // No drops: everything sent after the last held datagram arrives.
        assert!(got.len() >= 99);
        for (pos, d) in got.iter().enumerate() {
            let sent_index = d[0] as usize;
            assert!(pos.abs_diff(sent_index) <= 1, "datagram {sent_index} landed at {pos}");
        }
    }

    #[test]
    fn directions_are_independent() {
        let (mut a, mut b) = lossy_link(4, 0.0, 0.0);
        a.send(b"to b").unwrap();
        b.send(b"to a").unwrap();
        assert_eq!(b.recv(TICK).unwrap().unwrap(), b"to b");
        assert_eq!(a.recv(TICK).unwrap().unwrap(), b"to a");
    }

    #[test]
    fn udp_loopback_pair() {
        let mut listener = UdpEndpoint::listen(0).unwrap();
        let port = listener.local_addr().unwrap().port();
        let mut client = UdpEndpoint::connect(("127.0.0.1", port)).unwrap();
        client.send(b"ping").unwrap();
        assert_eq!(listener.recv(Duration::from_millis(500)).unwrap().unwrap(), b"ping");
        // The listener learned the client's address from the datagram.
        listener.send(b"pong").unwrap();
        assert_eq!(client.recv(Duration::from_millis(500)).unwrap().unwrap(), b"pong");
        assert!(client.recv(TICK).unwrap().is_none());
    }
}
