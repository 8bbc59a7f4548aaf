//! Desk-scale benchmark of the three cipher suites: encrypt/decrypt time
//! and instrumented peak buffer usage across a text-size sweep, emitted as
//! CSV plus an ordering summary. Times and buffers cover the payload cipher
//! phase only; signing, key wrap and verification are identical protocol
//! overhead across suites and would mask the comparison.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::handshake::{calibrate, CipherSuite, Phase, SecurityLevel, SessionState};
use crate::primitives::{rsa_keygen, RsaKeyPair};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid benchmark config: {0}")]
    InvalidConfig(&'static str),
    #[error("records do not cover at least two suites at common sizes")]
    MismatchedCoverage,
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error(transparent)]
    Handshake(#[from] crate::handshake::HandshakeError),
    #[error(transparent)]
    Primitive(#[from] crate::primitives::PrimitiveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub suites: Vec<CipherSuite>,
    pub trials: usize,
    pub level: SecurityLevel,
    pub include_keygen: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10, 100, 500, 1000, 1500, 2000],
            suites: CipherSuite::all().to_vec(),
            trials: 10,
            level: SecurityLevel::L1,
            include_keygen: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&s| s < 1) {
            return Err(BenchError::InvalidConfig("sizes must be non-empty, each at least 1"));
        }
        if self.suites.is_empty() {
            return Err(BenchError::InvalidConfig("at least one suite required"));
        }
        if self.trials < 3 {
            return Err(BenchError::InvalidConfig("at least 3 trials required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub suite: CipherSuite,
    pub size: usize,
    pub keygen_us: u64,
    pub encrypt_us: u64,
    pub decrypt_us: u64,
    pub ciphertext_bytes: u64,
    pub peak_buffer_bytes: u64,
}

/// Upper median of the collected samples.
fn median(samples: &mut [Duration]) -> u64 {
    samples.sort_unstable();
    samples[samples.len() / 2].as_micros() as u64
}

fn median_u64(samples: &mut [u64]) -> u64 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

/// One sealer/opener pair wired READY so the measured path is exactly the
/// handshake's seal/open.
fn ready_pair(
    suite: CipherSuite,
    level: SecurityLevel,
    sender: RsaKeyPair,
    recipient: RsaKeyPair,
) -> (SessionState, SessionState) {
    let params = calibrate(level, suite);
    let mut cc = SessionState::command_centre(0xBE7C, sender, params, vec![]);
    cc.phase = Phase::Ready;
    cc.peer_public = Some(recipient.public());
    let mut st = SessionState::shooter_target(0xBE7C, recipient, params);
    st.phase = Phase::Ready;
    (cc, st)
}

pub fn run_bench<R: Rng + ?Sized>(
    cfg: &BenchConfig,
    rng: &mut R,
) -> Result<Vec<BenchRecord>, BenchError> {
    cfg.validate()?;
    let bits = cfg.level.rsa_modulus_bits();
    // Shared session keys when keygen is excluded from measurement.
    let fixed_sender = rsa_keygen(bits, rng)?;
    let fixed_recipient = rsa_keygen(bits, rng)?;

    let mut records = Vec::new();
    for &suite in &cfg.suites {
        for &size in &cfg.sizes {
            let mut keygen = Vec::with_capacity(cfg.trials);
            let mut encrypt = Vec::with_capacity(cfg.trials);
            let mut decrypt = Vec::with_capacity(cfg.trials);
            let mut peaks = Vec::with_capacity(cfg.trials);
            let mut ct_bytes = 0u64;
            for _ in 0..cfg.trials {
                let (sender, recipient) = if cfg.include_keygen {
                    let started = Instant::now();
                    let pair = (rsa_keygen(bits, rng)?, rsa_keygen(bits, rng)?);
                    keygen.push(started.elapsed());
                    pair
                } else {
                    keygen.push(Duration::ZERO);
                    (fixed_sender.clone(), fixed_recipient.clone())
                };
                let (mut cc, st) = ready_pair(suite, cfg.level, sender, recipient);
                let mut text = vec![0u8; size];
                rng.fill(&mut text[..]);
                let (env, seal_metrics) = cc.seal_instrumented(&text)?;
                let (recovered, open_metrics) = st.open_instrumented(&env)?;
                assert_eq!(recovered, text, "benchmark roundtrip must be lossless");
                encrypt.push(seal_metrics.payload_encrypt);
                decrypt.push(open_metrics.payload_decrypt);
                peaks.push(seal_metrics.payload_peak_buffer as u64);
                ct_bytes = env.ciphertext.to_bytes().len() as u64;
            }
            records.push(BenchRecord {
                suite,
                size,
                keygen_us: median(&mut keygen),
                encrypt_us: median(&mut encrypt),
                decrypt_us: median(&mut decrypt),
                ciphertext_bytes: ct_bytes,
                peak_buffer_bytes: median_u64(&mut peaks),
            });
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "suite,size,keygen_us,encrypt_us,decrypt_us,ciphertext_bytes,peak_buffer_bytes";

pub fn write_csv<W: Write>(records: &[BenchRecord], out: &mut W) -> Result<(), BenchError> {
    if records.is_empty() {
        return Err(BenchError::InvalidConfig("no records to write"));
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.suite, r.size, r.keygen_us, r.encrypt_us, r.decrypt_us, r.ciphertext_bytes,
            r.peak_buffer_bytes
        )?;
    }
    Ok(())
}

pub fn parse_csv(input: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut lines = input.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => return Err(BenchError::MalformedCsv(format!("bad header: {other:?}"))),
    }
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let [suite, size, keygen, encrypt, decrypt, ct, peak] = fields[..] else {
                return Err(BenchError::MalformedCsv(format!("bad row: {line}")));
            };
            let num =
                |s: &str| s.parse::<u64>().map_err(|e| BenchError::MalformedCsv(e.to_string()));
            Ok(BenchRecord {
                suite: suite.parse().map_err(BenchError::MalformedCsv)?,
                size: num(size)? as usize,
                keygen_us: num(keygen)?,
                encrypt_us: num(encrypt)?,
                decrypt_us: num(decrypt)?,
                ciphertext_bytes: num(ct)?,
                peak_buffer_bytes: num(peak)?,
            })
        })
        .collect()
}

/// JSON mirror of the CSV with identical field names.
pub fn records_to_json(records: &[BenchRecord]) -> String {
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            serde_json::json!({
                "suite": r.suite.to_string(),
                "size": r.size,
                "keygen_us": r.keygen_us,
                "encrypt_us": r.encrypt_us,
                "decrypt_us": r.decrypt_us,
                "ciphertext_bytes": r.ciphertext_bytes,
                "peak_buffer_bytes": r.peak_buffer_bytes,
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("records serialize")
}

/// Suite rankings per size. Ties rank by the stable suite order
/// AES < DES < RSA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeOrdering {
    pub size: usize,
    /// Fastest to slowest by encrypt_us.
    pub by_encrypt_time: Vec<CipherSuite>,
    /// Smallest to largest by peak_buffer_bytes.
    pub by_peak_buffer: Vec<CipherSuite>,
    /// Observation only, never asserted: was AES faster than DES here?
    pub aes_faster_than_des: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingSummary {
    pub per_size: Vec<SizeOrdering>,
    pub rsa_slowest_everywhere: bool,
    pub rsa_largest_buffer_everywhere: bool,
}

pub fn summarize(records: &[BenchRecord]) -> Result<OrderingSummary, BenchError> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut suites: Vec<CipherSuite> = records.iter().map(|r| r.suite).collect();
    suites.sort_unstable_by_key(|s| s.wire_code());
    suites.dedup();
    if suites.len() < 2 {
        return Err(BenchError::MismatchedCoverage);
    }

    let mut per_size = Vec::new();
    for &size in &sizes {
        let at_size: Vec<&BenchRecord> = records.iter().filter(|r| r.size == size).collect();
        let mut covered: Vec<CipherSuite> = at_size.iter().map(|r| r.suite).collect();
        covered.sort_unstable_by_key(|s| s.wire_code());
        covered.dedup();
        if covered != suites {
            return Err(BenchError::MismatchedCoverage);
        }
        let rank = |key: fn(&BenchRecord) -> u64| -> Vec<CipherSuite> {
            let mut sorted = at_size.clone();
            sorted.sort_by_key(|r| (key(r), r.suite.wire_code()));
            sorted.iter().map(|r| r.suite).collect()
        };
        let encrypt_of = |suite| {
            at_size.iter().find(|r| r.suite == suite).map(|r| r.encrypt_us)
        };
        let aes_faster_than_des = match (encrypt_of(CipherSuite::Aes), encrypt_of(CipherSuite::Des))
        {
            (Some(aes), Some(des)) => Some(aes < des),
            _ => None,
        };
        per_size.push(SizeOrdering {
            size,
            by_encrypt_time: rank(|r| r.encrypt_us),
            by_peak_buffer: rank(|r| r.peak_buffer_bytes),
            aes_faster_than_des,
        });
    }

    let has_rsa = suites.contains(&CipherSuite::Rsa);
    let rsa_last = |pick: fn(&SizeOrdering) -> &Vec<CipherSuite>| {
        has_rsa && per_size.iter().all(|s| pick(s).last() == Some(&CipherSuite::Rsa))
    };
    Ok(OrderingSummary {
        rsa_slowest_everywhere: rsa_last(|s| &s.by_encrypt_time),
        rsa_largest_buffer_everywhere: rsa_last(|s| &s.by_peak_buffer),
        per_size,
    })
}
