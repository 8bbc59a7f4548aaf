//! Secure handshake between a command centre and a shooter target over UDP.
//!
//! The library stacks up as:
//! - [`ffmath`]: GF(p) and GF(2^8) arithmetic, modular exponentiation, prime
//!   generation.
//! - [`primitives`]: textbook RSA, AES-128, DES, SHA-1, CBC sealing, key files.
//! - [`handshake`]: security-level calibration, sign-then-encrypt envelopes,
//!   and the session state machine.
//! - [`netio`]: datagram framing, fragmentation, stop-and-wait delivery, a
//!   deterministic lossy-link simulator, and UDP session drivers.
//! - [`bench`]: the AES/DES/RSA time and buffer-usage comparison harness.
//! - [`cli`]: the `ncsh` command-line frontend.

pub mod bench;
pub mod cli;
pub mod ffmath;
pub mod handshake;
pub mod netio;
pub mod primitives;
