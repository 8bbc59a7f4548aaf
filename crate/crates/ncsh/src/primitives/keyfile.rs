//! Key file format used by the CLI: text lines `level=<L1|L2|L3>`,
//! `n=<hex>`, `e=<hex>`, and for private files `d=<hex>`; lowercase hex
//! without separators.

use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigUint;

use crate::handshake::SecurityLevel;

use super::{PrimitiveError, RsaKeyPair, RsaPublicKey};

fn to_hex(v: &BigUint) -> String {
    hex::encode(v.to_bytes_be())
}

fn parse_fields(content: &str) -> Result<HashMap<&str, &str>, PrimitiveError> {
    let mut fields = HashMap::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| PrimitiveError::MalformedKeyFile(format!("line without '=': {line}")))?;
        fields.insert(key, value);
    }
    Ok(fields)
}

fn parse_hex(fields: &HashMap<&str, &str>, key: &str) -> Result<BigUint, PrimitiveError> {
    let raw = fields
        .get(key)
        .ok_or_else(|| PrimitiveError::MalformedKeyFile(format!("missing field {key}")))?;
    let bytes = hex::decode(raw)
        .map_err(|e| PrimitiveError::MalformedKeyFile(format!("field {key}: {e}")))?;
    Ok(BigUint::from_bytes_be(&bytes))
}

fn parse_level(fields: &HashMap<&str, &str>) -> Result<SecurityLevel, PrimitiveError> {
    fields
        .get("level")
        .ok_or_else(|| PrimitiveError::MalformedKeyFile("missing field level".into()))?
        .parse()
        .map_err(PrimitiveError::MalformedKeyFile)
}

/// Writes `<prefix>.pub` and `<prefix>.key` for the pair.
pub fn write_key_files(prefix: &Path, keypair: &RsaKeyPair) -> Result<(), PrimitiveError> {
    let public = format!(
        "level={}\nn={}\ne={}\n",
        keypair.level,
        to_hex(&keypair.n),
        to_hex(&keypair.e)
    );
    let private = format!(
        "level={}\nn={}\ne={}\nd={}\n",
        keypair.level,
        to_hex(&keypair.n),
        to_hex(&keypair.e),
        to_hex(&keypair.d)
    );
    std::fs::write(prefix.with_extension("pub"), public)?;
    std::fs::write(prefix.with_extension("key"), private)?;
    Ok(())
}

pub fn read_public_key(path: &Path) -> Result<(SecurityLevel, RsaPublicKey), PrimitiveError> {
    let content = std::fs::read_to_string(path)?;
    let fields = parse_fields(&content)?;
    let level = parse_level(&fields)?;
    Ok((level, RsaPublicKey { e: parse_hex(&fields, "e")?, n: parse_hex(&fields, "n")? }))
}

pub fn read_private_key(path: &Path) -> Result<RsaKeyPair, PrimitiveError> {
    let content = std::fs::read_to_string(path)?;
    let fields = parse_fields(&content)?;
    let level = parse_level(&fields)?;
    let n = parse_hex(&fields, "n")?;
    let modulus_bits = n.bits();
    Ok(RsaKeyPair {
        e: parse_hex(&fields, "e")?,
        d: parse_hex(&fields, "d")?,
        n,
        modulus_bits,
        level,
    })
}
