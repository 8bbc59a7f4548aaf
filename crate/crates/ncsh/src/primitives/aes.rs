//! AES-128: the 10-round block transformation with the S-box derived at
//! startup from GF(2^8) inversion plus the affine map, not imported as a
//! literal table.

use std::sync::LazyLock;

use crate::ffmath::Gf256;

use super::PrimitiveError;

pub const AES_BLOCK: usize = 16;
pub const AES_KEY: usize = 16;
const ROUNDS: usize = 10;

/// Forward S-box: affine transform of the GF(2^8) multiplicative inverse
/// (with 0 mapped to 0).
static SBOX: LazyLock<[u8; 256]> = LazyLock::new(|| {
    let mut table = [0u8; 256];
    for (a, entry) in table.iter_mut().enumerate() {
        let inv = if a == 0 { 0 } else { Gf256(a as u8).inv().expect("nonzero").0 };
        *entry = inv
            ^ inv.rotate_left(1)
            ^ inv.rotate_left(2)
            ^ inv.rotate_left(3)
            ^ inv.rotate_left(4)
            ^ 0x63;
    }
    table
});

static INV_SBOX: LazyLock<[u8; 256]> = LazyLock::new(|| {
    let mut table = [0u8; 256];
    for (a, &s) in SBOX.iter().enumerate() {
        table[s as usize] = a as u8;
    }
    table
});

pub fn sbox(a: u8) -> u8 {
    SBOX[a as usize]
}

fn xtime(a: u8) -> u8 {
    (a << 1) ^ if a & 0x80 != 0 { 0x1B } else { 0 }
}

fn expand_key(key: &[u8; AES_KEY]) -> [[u8; 16]; ROUNDS + 1] {
    let mut words = [[0u8; 4]; 4 * (ROUNDS + 1)];
    for (i, chunk) in key.chunks_exact(4).enumerate() {
        words[i].copy_from_slice(chunk);
    }
    let mut rcon = 1u8;
    for i in 4..words.len() {
        let mut t = words[i - 1];
        if i % 4 == 0 {
            t.rotate_left(1);
            for b in &mut t {
                *b = SBOX[*b as usize];
            }
            t[0] ^= rcon;
            rcon = xtime(rcon);
        }
        for j in 0..4 {
            words[i][j] = words[i - 4][j] ^ t[j];
        }
    }
    let mut round_keys = [[0u8; 16]; ROUNDS + 1];
    for (r, rk) in round_keys.iter_mut().enumerate() {
        for c in 0..4 {
            rk[4 * c..4 * c + 4].copy_from_slice(&words[4 * r + c]);
        }
    }
    round_keys
}

fn add_round_key(state: &mut [u8; 16], rk: &[u8; 16]) {
    for (s, k) in state.iter_mut().zip(rk) {
        *s ^= k;
    }
}

// State layout: s[r][c] lives at index r + 4c, matching the input byte order.

fn shift_rows(state: &mut [u8; 16]) {
    let old = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
        }
    }
}

fn inv_shift_rows(state: &mut [u8; 16]) {
    let old = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[r + 4 * ((c + r) % 4)] = old[r + 4 * c];
        }
    }
}

fn mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col: [u8; 4] = state[4 * c..4 * c + 4].try_into().unwrap();
        let all = col[0] ^ col[1] ^ col[2] ^ col[3];
        for r in 0..4 {
            state[4 * c + r] = col[r] ^ all ^ xtime(col[r] ^ col[(r + 1) % 4]);
        }
    }
}

fn inv_mix_columns(state: &mut [u8; 16]) {
    let mul = |a: u8, b: u8| Gf256(a).mul(Gf256(b)).0;
    for c in 0..4 {
        let col: [u8; 4] = state[4 * c..4 * c + 4].try_into().unwrap();
        for r in 0..4 {
            state[4 * c + r] = mul(col[r], 0x0E)
                ^ mul(col[(r + 1) % 4], 0x0B)
                ^ mul(col[(r + 2) % 4], 0x0D)
                ^ mul(col[(r + 3) % 4], 0x09);
        }
    }
}

pub fn aes128_encrypt_block(key: &[u8], block: &[u8]) -> Result<[u8; 16], PrimitiveError> {
    let key: &[u8; AES_KEY] = key.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "AES key",
        expected: AES_KEY,
    })?;
    let mut state: [u8; 16] = block.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "AES block",
        expected: AES_BLOCK,
    })?;
    let round_keys = expand_key(key);
    add_round_key(&mut state, &round_keys[0]);
    for rk in &round_keys[1..ROUNDS] {
        for b in &mut state {
            *b = SBOX[*b as usize];
        }
        shift_rows(&mut state);
        mix_columns(&mut state);
        add_round_key(&mut state, rk);
    }
    for b in &mut state {
        *b = SBOX[*b as usize];
    }
    shift_rows(&mut state);
    add_round_key(&mut state, &round_keys[ROUNDS]);
    Ok(state)
}

pub fn aes128_decrypt_block(key: &[u8], block: &[u8]) -> Result<[u8; 16], PrimitiveError> {
    let key: &[u8; AES_KEY] = key.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "AES key",
        expected: AES_KEY,
    })?;
    let mut state: [u8; 16] = block.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "AES block",
        expected: AES_BLOCK,
    })?;
    let round_keys = expand_key(key);
    add_round_key(&mut state, &round_keys[ROUNDS]);
    inv_shift_rows(&mut state);
    for b in &mut state {
        *b = INV_SBOX[*b as usize];
    }
    for rk in round_keys[1..ROUNDS].iter().rev() {
        add_round_key(&mut state, rk);
        inv_mix_columns(&mut state);
        inv_shift_rows(&mut state);
        for b in &mut state {
            *b = INV_SBOX[*b as usize];
        }
    }
    add_round_key(&mut state, &round_keys[0]);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The published S-box, kept only in test code as the independent oracle
    /// for the ffmath-derived table.
    #[rustfmt::skip]
    const PUBLISHED_SBOX: [u8; 256] = [
        0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
        0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
        0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
        0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
        0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
        0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
        0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
        0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
        0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
        0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
        0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
        0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
        0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
        0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
        0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
        0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
    ];

    #[test]
    fn sbox_zero_entry() {
        assert_eq!(sbox(0x00), 0x63);
    }

    #[test]
    fn derived_sbox_matches_published_table() {
        for a in 0..=255usize {
            assert_eq!(SBOX[a], PUBLISHED_SBOX[a], "entry {a:#x}");
        }
    }

    #[test]
    fn zero_key_zero_block_vector() {
        let out = aes128_encrypt_block(&[0u8; 16], &[0u8; 16]).unwrap();
        assert_eq!(hex::encode(out), "66e94bd4ef8a2c3b884cfa59ca342b2e");
    }

    #[test]
    fn fips_appendix_vector() {
        let key = hex::decode("000102030405060708090a0b0c0d0e0f").unwrap();
        let pt = hex::decode("00112233445566778899aabbccddeeff").unwrap();
        let out = aes128_encrypt_block(&key, &pt).unwrap();
        assert_eq!(hex::encode(out), "69c4e0d86a7b0430d8cdb78070b4c55a");
        let back = aes128_decrypt_block(&key, &out).unwrap();
        assert_eq!(back.as_slice(), pt.as_slice());
    }

    #[test]
    fn wrong_lengths_rejected() {
        assert!(aes128_encrypt_block(&[0u8; 15], &[0u8; 16]).is_err());
        assert!(aes128_encrypt_block(&[0u8; 16], &[0u8; 17]).is_err());
        assert!(aes128_decrypt_block(&[0u8; 8], &[0u8; 16]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn decrypt_inverts_encrypt(key in any::<[u8; 16]>(), block in any::<[u8; 16]>()) {
            let ct = aes128_encrypt_block(&key, &block).unwrap();
            prop_assert_eq!(aes128_decrypt_block(&key, &ct).unwrap(), block);
        }
    }
}
