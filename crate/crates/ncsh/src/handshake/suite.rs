//! Security-level calibration: the runtime knob that picks RSA modulus size
//! and the cipher-suite parameter set.

use std::fmt;
use std::str::FromStr;

/// Runtime security level; selects the RSA modulus size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SecurityLevel {
    L1,
    L2,
    L3,
}

impl SecurityLevel {
    pub fn rsa_modulus_bits(self) -> u64 {
        match self {
            SecurityLevel::L1 => 512,
            SecurityLevel::L2 => 1024,
            SecurityLevel::L3 => 2048,
        }
    }

    pub fn for_modulus_bits(bits: u64) -> Option<Self> {
        match bits {
            512 => Some(SecurityLevel::L1),
            1024 => Some(SecurityLevel::L2),
            2048 => Some(SecurityLevel::L3),
            _ => None,
        }
    }

    pub fn all() -> [SecurityLevel; 3] {
        [SecurityLevel::L1, SecurityLevel::L2, SecurityLevel::L3]
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SecurityLevel::L1 => "L1",
            SecurityLevel::L2 => "L2",
            SecurityLevel::L3 => "L3",
        })
    }
}

impl FromStr for SecurityLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L1" | "l1" => Ok(SecurityLevel::L1),
            "L2" | "l2" => Ok(SecurityLevel::L2),
            "L3" | "l3" => Ok(SecurityLevel::L3),
            other => Err(format!("unknown security level: {other}")),
        }
    }
}

/// Payload encryption choice: AES-CBC or DES-CBC with an RSA-wrapped session
/// key, or blockwise textbook RSA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CipherSuite {
    Aes,
    Des,
    Rsa,
}

impl CipherSuite {
    /// Symmetric key length in octets; None for the RSA suite.
    pub fn sym_key_octets(self) -> Option<usize> {
        match self {
            CipherSuite::Aes => Some(16),
            CipherSuite::Des => Some(8),
            CipherSuite::Rsa => None,
        }
    }

    pub fn block_octets(self) -> Option<usize> {
        match self {
            CipherSuite::Aes => Some(16),
            CipherSuite::Des => Some(8),
            CipherSuite::Rsa => None,
        }
    }

    pub fn wire_code(self) -> u8 {
        match self {
            CipherSuite::Aes => 0x01,
            CipherSuite::Des => 0x02,
            CipherSuite::Rsa => 0x03,
        }
    }

    pub fn from_wire_code(code: u8) -> Option<Self> {
        match code {
            0x01 => Some(CipherSuite::Aes),
            0x02 => Some(CipherSuite::Des),
            0x03 => Some(CipherSuite::Rsa),
            _ => None,
        }
    }

    pub fn all() -> [CipherSuite; 3] {
        [CipherSuite::Aes, CipherSuite::Des, CipherSuite::Rsa]
    }
}

impl fmt::Display for CipherSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CipherSuite::Aes => "aes",
            CipherSuite::Des => "des",
            CipherSuite::Rsa => "rsa",
        })
    }
}

impl FromStr for CipherSuite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aes" => Ok(CipherSuite::Aes),
            "des" => Ok(CipherSuite::Des),
            "rsa" => Ok(CipherSuite::Rsa),
            other => Err(format!("unknown cipher suite: {other}")),
        }
    }
}

/// How the envelope is signed: over the SHA-1 digest of the ciphertext
/// (default) or literally over every ciphertext block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigMode {
    Digest,
    Literal,
}

impl SigMode {
    pub fn wire_code(self) -> u8 {
        match self {
            SigMode::Digest => 0x01,
            SigMode::Literal => 0x02,
        }
    }

    pub fn from_wire_code(code: u8) -> Option<Self> {
        match code {
            0x01 => Some(SigMode::Digest),
            0x02 => Some(SigMode::Literal),
            _ => None,
        }
    }
}

/// Calibration output: everything the session needs to know about its
/// negotiated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    pub suite: CipherSuite,
    pub rsa_modulus_bits: u64,
    pub sym_key_octets: usize,
    pub sig_mode: SigMode,
}

/// Pure calibration table: L1/L2/L3 map to RSA 512/1024/2048 bits; the
/// signature mode defaults to DIGEST.
pub fn calibrate(level: SecurityLevel, suite: CipherSuite) -> SuiteParams {
    SuiteParams {
        suite,
        rsa_modulus_bits: level.rsa_modulus_bits(),
        sym_key_octets: suite.sym_key_octets().unwrap_or(0),
        sig_mode: SigMode::Digest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_table() {
        let p = calibrate(SecurityLevel::L1, CipherSuite::Aes);
        assert_eq!(
            p,
            SuiteParams {
                suite: CipherSuite::Aes,
                rsa_modulus_bits: 512,
                sym_key_octets: 16,
                sig_mode: SigMode::Digest
            }
        );
        let p = calibrate(SecurityLevel::L3, CipherSuite::Rsa);
        assert_eq!(
            p,
            SuiteParams {
                suite: CipherSuite::Rsa,
                rsa_modulus_bits: 2048,
                sym_key_octets: 0,
                sig_mode: SigMode::Digest
            }
        );
        assert_eq!(calibrate(SecurityLevel::L2, CipherSuite::Des).rsa_modulus_bits, 1024);
        assert_eq!(calibrate(SecurityLevel::L2, CipherSuite::Des).sym_key_octets, 8);
    }

    #[test]
    fn calibrate_is_pure() {
        for level in SecurityLevel::all() {
            for suite in CipherSuite::all() {
                assert_eq!(calibrate(level, suite), calibrate(level, suite));
            }
        }
    }
}
