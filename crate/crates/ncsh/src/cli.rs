//! Command-line frontend: key generation, the shooter-target listener, the
//! command-centre sender, the benchmark sweep, and a self-test.
//!
//! Exit codes: 0 success, 2 usage, 3 delivery failure, 4 crypto or
//! verification failure, 5 I/O failure.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use rand::Rng;

use crate::bench::{run_bench, records_to_json, summarize, write_csv, BenchConfig};
use crate::handshake::{calibrate, CipherSuite, HandshakeError, SecurityLevel, SessionState};
use crate::netio::{
    run_command_centre, run_shooter_target, DriverConfig, NetError, UdpEndpoint, DEFAULT_PORT,
};
use crate::primitives::{
    read_private_key, rsa_keygen, write_key_files, PrimitiveError, RsaKeyPair,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DELIVERY: i32 = 3;
pub const EXIT_CRYPTO: i32 = 4;
pub const EXIT_IO: i32 = 5;

fn parse_level(s: &str) -> Result<SecurityLevel, String> {
    SecurityLevel::from_str(s)
}

fn parse_suite(s: &str) -> Result<CipherSuite, String> {
    CipherSuite::from_str(s)
}

#[derive(Debug, Parser)]
#[command(name = "ncsh", version, about = "Calibrated RSA handshake over UDP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an RSA key pair as <prefix>.pub and <prefix>.key.
    Keygen {
        #[arg(long, default_value = "L1", value_parser = parse_level)]
        level: SecurityLevel,
        /// Output path prefix for the key pair.
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve shooter-target sessions on a UDP port.
    Listen {
        /// UDP port; NCSH_PORT overrides the default when unset.
        #[arg(long)]
        port: Option<u16>,
        /// Key pair prefix; an ephemeral pair is generated when absent.
        #[arg(long)]
        key_prefix: Option<PathBuf>,
        #[arg(long, default_value = "L1", value_parser = parse_level)]
        level: SecurityLevel,
        /// Exit after one completed or failed session.
        #[arg(long)]
        once: bool,
    },
    /// Deliver one message to a listener as the command centre.
    #[command(group(ArgGroup::new("payload").required(true).args(["msg", "file"])))]
    Send {
        /// Listener host name or address.
        host: String,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Key pair prefix; an ephemeral pair is generated when absent.
        #[arg(long)]
        key_prefix: Option<PathBuf>,
        #[arg(long, default_value = "aes", value_parser = parse_suite)]
        suite: CipherSuite,
        #[arg(long, default_value = "L1", value_parser = parse_level)]
        level: SecurityLevel,
        /// Message text to deliver.
        #[arg(long)]
        msg: Option<String>,
        /// File whose bytes are the message.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Time the three suites across a text-size sweep.
    Bench {
        /// Comma-separated payload sizes in octets.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = "L1", value_parser = parse_level)]
        level: SecurityLevel,
        /// Generate fresh keys inside each measured trial.
        #[arg(long)]
        include_keygen: bool,
        /// Destination path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in vector and property checks.
    Selftest,
}

fn exit_code_for_net(e: &NetError) -> i32 {
    match e {
        NetError::DeliveryFailed => EXIT_DELIVERY,
        NetError::PeerError(_) | NetError::CryptoReject(_) => EXIT_CRYPTO,
        NetError::Handshake(_) => EXIT_CRYPTO,
        NetError::Socket(_) => EXIT_IO,
        _ => EXIT_CRYPTO,
    }
}

fn exit_code_for_primitive(e: &PrimitiveError) -> i32 {
    match e {
        PrimitiveError::Io(_) | PrimitiveError::MalformedKeyFile(_) => EXIT_IO,
        _ => EXIT_CRYPTO,
    }
}

fn load_or_generate_keys(
    key_prefix: Option<&Path>,
    level: SecurityLevel,
) -> Result<RsaKeyPair, PrimitiveError> {
    match key_prefix {
        Some(prefix) => read_private_key(&prefix.with_extension("key")),
        None => rsa_keygen(level.rsa_modulus_bits(), &mut rand::thread_rng()),
    }
}

fn listener_port(flag: Option<u16>) -> u16 {
    flag.or_else(|| std::env::var("NCSH_PORT").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_PORT)
}

fn print_plaintext(plaintext: &[u8]) {
    match std::str::from_utf8(plaintext) {
        Ok(text) => println!("{text}"),
        Err(_) => println!("{}", hex::encode(plaintext)),
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Keygen { level, out } => {
            let keys = match rsa_keygen(level.rsa_modulus_bits(), &mut rand::thread_rng()) {
                Ok(keys) => keys,
                Err(e) => {
                    eprintln!("keygen failed: {e}");
                    return exit_code_for_primitive(&e);
                }
            };
            if let Err(e) = write_key_files(&out, &keys) {
                eprintln!("writing key files failed: {e}");
                return exit_code_for_primitive(&e);
            }
            println!(
                "wrote {} and {}",
                out.with_extension("pub").display(),
                out.with_extension("key").display()
            );
            EXIT_OK
        }
        Command::Listen { port, key_prefix, level, once } => {
            let keys = match load_or_generate_keys(key_prefix.as_deref(), level) {
                Ok(keys) => keys,
                Err(e) => {
                    eprintln!("loading keys failed: {e}");
                    return exit_code_for_primitive(&e);
                }
            };
            let port = listener_port(port);
            let mut endpoint = match UdpEndpoint::listen(port) {
                Ok(ep) => ep,
                Err(e) => {
                    eprintln!("binding port {port} failed: {e}");
                    return EXIT_IO;
                }
            };
            eprintln!("listening on udp port {port} at {}", keys.level);
            let params = calibrate(keys.level, CipherSuite::Aes);
            loop {
                let mut session = SessionState::shooter_target(0, keys.clone(), params);
                let result =
                    run_shooter_target(&mut endpoint, &mut session, &DriverConfig::default());
                let code = match result {
                    Ok(plaintext) => {
                        print_plaintext(&plaintext);
                        EXIT_OK
                    }
                    Err(e) => {
                        eprintln!("session failed: {e}");
                        exit_code_for_net(&e)
                    }
                };
                if once {
                    return code;
                }
            }
        }
        Command::Send { host, port, key_prefix, suite, level, msg, file } => {
            let message = match (msg, file) {
                (Some(text), None) => text.into_bytes(),
                (None, Some(path)) => match std::fs::read(&path) {
                    Ok(bytes) => bytes,
                    Err(e) => {
                        eprintln!("reading {} failed: {e}", path.display());
                        return EXIT_IO;
                    }
                },
                _ => unreachable!("clap enforces msg xor file"),
            };
            let keys = match load_or_generate_keys(key_prefix.as_deref(), level) {
                Ok(keys) => keys,
                Err(e) => {
                    eprintln!("loading keys failed: {e}");
                    return exit_code_for_primitive(&e);
                }
            };
            let mut endpoint = match UdpEndpoint::connect((host.as_str(), port)) {
                Ok(ep) => ep,
                Err(e) => {
                    eprintln!("connecting to {host}:{port} failed: {e}");
                    return EXIT_IO;
                }
            };
            let params = calibrate(level, suite);
            let session_id: u64 = rand::thread_rng().gen();
            let mut session = SessionState::command_centre(session_id, keys, params, message);
            let started = Instant::now();
            match run_command_centre(&mut endpoint, &mut session, &DriverConfig::default()) {
                Ok(report) => {
                    let rtt = started.elapsed();
                    println!(
                        "delivered in {} us (peer verify {} us, decrypt {} us)",
                        rtt.as_micros(),
                        report.verify_us,
                        report.decrypt_us
                    );
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("send failed: {e}");
                    exit_code_for_net(&e)
                }
            }
        }
        Command::Bench { sizes, trials, level, include_keygen, out, json } => {
            let mut cfg = BenchConfig { level, include_keygen, ..BenchConfig::default() };
            if let Some(sizes) = sizes {
                cfg.sizes = sizes;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            let records = match run_bench(&cfg, &mut rand::thread_rng()) {
                Ok(records) => records,
                Err(e) => {
                    eprintln!("benchmark failed: {e}");
                    return EXIT_CRYPTO;
                }
            };
            let output = if json {
                records_to_json(&records)
            } else {
                let mut buf = Vec::new();
                if let Err(e) = write_csv(&records, &mut buf) {
                    eprintln!("formatting failed: {e}");
                    return EXIT_IO;
                }
                String::from_utf8(buf).expect("CSV is UTF-8")
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &output) {
                        eprintln!("writing {} failed: {e}", path.display());
                        return EXIT_IO;
                    }
                }
                None => print!("{output}"),
            }
            match summarize(&records) {
                Ok(summary) => {
                    eprintln!(
                        "rsa slowest at every size: {}; rsa largest buffers at every size: {}",
                        summary.rsa_slowest_everywhere, summary.rsa_largest_buffer_everywhere
                    );
                    for s in &summary.per_size {
                        if let Some(aes_faster) = s.aes_faster_than_des {
                            eprintln!(
                                "size {}: aes {} des on encrypt time (observed, not asserted)",
                                s.size,
                                if aes_faster { "faster than" } else { "not faster than" }
                            );
                        }
                    }
                }
                Err(e) => eprintln!("no ordering summary: {e}"),
            }
            EXIT_OK
        }
        Command::Selftest => selftest(),
    }
}

fn selftest() -> i32 {
    let checks: [(&str, fn() -> Result<(), String>); 6] = [
        ("field existence", check_fields),
        ("sha1 vectors", check_sha1),
        ("aes-128 vector", check_aes),
        ("des vector", check_des),
        ("signature protocol demo keys", check_demo_chain),
        ("seal/open round trip", check_roundtrip),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ok   {name}"),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CRYPTO
    }
}

fn expect(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn check_fields() -> Result<(), String> {
    let exists = |q| crate::ffmath::field_exists(q).map_err(|e| e.to_string());
    expect(exists(11)?, "GF(11) must exist")?;
    expect(exists(256)?, "GF(256) must exist")?;
    expect(!exists(12)?, "GF(12) must not exist")
}

fn check_sha1() -> Result<(), String> {
    expect(
        crate::primitives::sha1(b"").to_hex() == "da39a3ee5e6b4b0d3255bfef95601890afd80709",
        "empty-string digest",
    )?;
    expect(
        crate::primitives::sha1(b"abc").to_hex() == "a9993e364706816aba3e25717850c26c9cd0d89d",
        "abc digest",
    )
}

fn check_aes() -> Result<(), String> {
    let ct = crate::primitives::aes128_encrypt_block(&[0u8; 16], &[0u8; 16])
        .map_err(|e| e.to_string())?;
    expect(hex::encode(ct) == "66e94bd4ef8a2c3b884cfa59ca342b2e", "zero-vector ciphertext")
}

fn check_des() -> Result<(), String> {
    let key = hex::decode("133457799bbcdff1").unwrap();
    let block = hex::decode("0123456789abcdef").unwrap();
    let ct = crate::primitives::des_encrypt_block(&key, &block).map_err(|e| e.to_string())?;
    expect(hex::encode(ct) == "85e813540f0ab405", "reference ciphertext")
}

fn check_demo_chain() -> Result<(), String> {
    use num_bigint::BigUint;
    let bob = RsaKeyPair::from_primes(5, 11, 3).map_err(|e| e.to_string())?;
    let alice = RsaKeyPair::from_primes(5, 17, 3).map_err(|e| e.to_string())?;
    let m = BigUint::from(2u8);
    let eb = crate::primitives::rsa_apply(&bob.e, &bob.n, &m).map_err(|e| e.to_string())?;
    expect(eb == BigUint::from(8u8), "E_B(2) must be 8")?;
    let m1 = crate::handshake::sign_literal(&alice, &[eb.clone()], &bob.n)
        .map_err(|e| e.to_string())?;
    expect(m1 == [BigUint::from(2u8)], "D_A(8) must be 2")?;
    let back =
        crate::handshake::verify_literal(&alice.public(), &m1).map_err(|e| e.to_string())?;
    expect(back == [eb], "E_A(D_A(E_B(M))) must equal E_B(M)")?;
    let recovered =
        crate::primitives::rsa_apply(&bob.d, &bob.n, &back[0]).map_err(|e| e.to_string())?;
    expect(recovered == m, "D_B must recover M")
}

fn check_roundtrip() -> Result<(), String> {
    use num_bigint::BigUint;
    use num_traits::One;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC1);
    for suite in CipherSuite::all() {
        let sender = rsa_keygen(512, &mut rng).map_err(|e| e.to_string())?;
        let receiver = rsa_keygen(512, &mut rng).map_err(|e| e.to_string())?;
        let params = calibrate(SecurityLevel::L1, suite);
        let mut cc = SessionState::command_centre(1, sender, params, vec![]);
        cc.phase = crate::handshake::Phase::Ready;
        cc.peer_public = Some(receiver.public());
        let mut st = SessionState::shooter_target(1, receiver, params);
        st.phase = crate::handshake::Phase::Ready;
        let env = cc.seal(b"selftest payload").map_err(|e| e.to_string())?;
        let pt = st.open(&env).map_err(|e| e.to_string())?;
        expect(pt == b"selftest payload", "round trip must be identity")?;
        let mut bad = env.clone();
        match &mut bad.ciphertext {
            crate::handshake::CipherPayload::Sym(ct) => ct[0] ^= 1,
            crate::handshake::CipherPayload::Rsa(blocks) => blocks[0] ^= BigUint::one(),
        }
        expect(
            matches!(st.open(&bad), Err(HandshakeError::SignatureInvalid)),
            "tampered ciphertext must fail verification",
        )?;
    }
    Ok(())
}
