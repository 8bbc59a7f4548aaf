//! DES: the 16-round Feistel transformation. The round function runs off
//! combined S-box/P-permutation tables built once at startup; the key
//! schedule is prepared per key so CBC chaining does not redo PC-1/PC-2 for
//! every block.

use std::sync::LazyLock;

use super::PrimitiveError;

pub const DES_BLOCK: usize = 8;
pub const DES_KEY: usize = 8;

#[rustfmt::skip]
const IP: [u8; 64] = [
    58, 50, 42, 34, 26, 18, 10, 2, 60, 52, 44, 36, 28, 20, 12, 4,
    62, 54, 46, 38, 30, 22, 14, 6, 64, 56, 48, 40, 32, 24, 16, 8,
    57, 49, 41, 33, 25, 17,  9, 1, 59, 51, 43, 35, 27, 19, 11, 3,
    61, 53, 45, 37, 29, 21, 13, 5, 63, 55, 47, 39, 31, 23, 15, 7,
];

#[rustfmt::skip]
const FP: [u8; 64] = [
    40, 8, 48, 16, 56, 24, 64, 32, 39, 7, 47, 15, 55, 23, 63, 31,
    38, 6, 46, 14, 54, 22, 62, 30, 37, 5, 45, 13, 53, 21, 61, 29,
    36, 4, 44, 12, 52, 20, 60, 28, 35, 3, 43, 11, 51, 19, 59, 27,
    34, 2, 42, 10, 50, 18, 58, 26, 33, 1, 41,  9, 49, 17, 57, 25,
];

#[rustfmt::skip]
const PC1: [u8; 56] = [
    57, 49, 41, 33, 25, 17,  9,  1, 58, 50, 42, 34, 26, 18,
    10,  2, 59, 51, 43, 35, 27, 19, 11,  3, 60, 52, 44, 36,
    63, 55, 47, 39, 31, 23, 15,  7, 62, 54, 46, 38, 30, 22,
    14,  6, 61, 53, 45, 37, 29, 21, 13,  5, 28, 20, 12,  4,
];

#[rustfmt::skip]
const PC2: [u8; 48] = [
    14, 17, 11, 24,  1,  5,  3, 28, 15,  6, 21, 10,
    23, 19, 12,  4, 26,  8, 16,  7, 27, 20, 13,  2,
    41, 52, 31, 37, 47, 55, 30, 40, 51, 45, 33, 48,
    44, 49, 39, 56, 34, 53, 46, 42, 50, 36, 29, 32,
];

#[rustfmt::skip]
const E: [u8; 48] = [
    32,  1,  2,  3,  4,  5,  4,  5,  6,  7,  8,  9,
     8,  9, 10, 11, 12, 13, 12, 13, 14, 15, 16, 17,
    16, 17, 18, 19, 20, 21, 20, 21, 22, 23, 24, 25,
    24, 25, 26, 27, 28, 29, 28, 29, 30, 31, 32,  1,
];

#[rustfmt::skip]
const P: [u8; 32] = [
    16,  7, 20, 21, 29, 12, 28, 17,  1, 15, 23, 26,  5, 18, 31, 10,
     2,  8, 24, 14, 32, 27,  3,  9, 19, 13, 30,  6, 22, 11,  4, 25,
];

#[rustfmt::skip]
const SBOXES: [[u8; 64]; 8] = [
    [
        14,  4, 13,  1,  2, 15, 11,  8,  3, 10,  6, 12,  5,  9,  0,  7,
         0, 15,  7,  4, 14,  2, 13,  1, 10,  6, 12, 11,  9,  5,  3,  8,
         4,  1, 14,  8, 13,  6,  2, 11, 15, 12,  9,  7,  3, 10,  5,  0,
        15, 12,  8,  2,  4,  9,  1,  7,  5, 11,  3, 14, 10,  0,  6, 13,
    ],
    [
        15,  1,  8, 14,  6, 11,  3,  4,  9,  7,  2, 13, 12,  0,  5, 10,
         3, 13,  4,  7, 15,  2,  8, 14, 12,  0,  1, 10,  6,  9, 11,  5,
         0, 14,  7, 11, 10,  4, 13,  1,  5,  8, 12,  6,  9,  3,  2, 15,
        13,  8, 10,  1,  3, 15,  4,  2, 11,  6,  7, 12,  0,  5, 14,  9,
    ],
    [
        10,  0,  9, 14,  6,  3, 15,  5,  1, 13, 12,  7, 11,  4,  2,  8,
        13,  7,  0,  9,  3,  4,  6, 10,  2,  8,  5, 14, 12, 11, 15,  1,
        13,  6,  4,  9,  8, 15,  3,  0, 11,  1,  2, 12,  5, 10, 14,  7,
         1, 10, 13,  0,  6,  9,  8,  7,  4, 15, 14,  3, 11,  5,  2, 12,
    ],
    [
         7, 13, 14,  3,  0,  6,  9, 10,  1,  2,  8,  5, 11, 12,  4, 15,
        13,  8, 11,  5,  6, 15,  0,  3,  4,  7,  2, 12,  1, 10, 14,  9,
        10,  6,  9,  0, 12, 11,  7, 13, 15,  1,  3, 14,  5,  2,  8,  4,
         3, 15,  0,  6, 10,  1, 13,  8,  9,  4,  5, 11, 12,  7,  2, 14,
    ],
    [
         2, 12,  4,  1,  7, 10, 11,  6,  8,  5,  3, 15, 13,  0, 14,  9,
        14, 11,  2, 12,  4,  7, 13,  1,  5,  0, 15, 10,  3,  9,  8,  6,
         4,  2,  1, 11, 10, 13,  7,  8, 15,  9, 12,  5,  6,  3,  0, 14,
        11,  8, 12,  7,  1, 14,  2, 13,  6, 15,  0,  9, 10,  4,  5,  3,
    ],
    [
        12,  1, 10, 15,  9,  2,  6,  8,  0, 13,  3,  4, 14,  7,  5, 11,
        10, 15,  4,  2,  7, 12,  9,  5,  6,  1, 13, 14,  0, 11,  3,  8,
         9, 14, 15,  5,  2,  8, 12,  3,  7,  0,  4, 10,  1, 13, 11,  6,
         4,  3,  2, 12,  9,  5, 15, 10, 11, 14,  1,  7,  6,  0,  8, 13,
    ],
    [
         4, 11,  2, 14, 15,  0,  8, 13,  3, 12,  9,  7,  5, 10,  6,  1,
        13,  0, 11,  7,  4,  9,  1, 10, 14,  3,  5, 12,  2, 15,  8,  6,
         1,  4, 11, 13, 12,  3,  7, 14, 10, 15,  6,  8,  0,  5,  9,  2,
         6, 11, 13,  8,  1,  4, 10,  7,  9,  5,  0, 15, 14,  2,  3, 12,
    ],
    [
        13,  2,  8,  4,  6, 15, 11,  1, 10,  9,  3, 14,  5,  0, 12,  7,
         1, 15, 13,  8, 10,  3,  7,  4, 12,  5,  6, 11,  0, 14,  9,  2,
         7, 11,  4,  1,  9, 12, 14,  2,  0,  6, 10, 13, 15,  3,  5,  8,
         2,  1, 14,  7,  4, 10,  8, 13, 15, 12,  9,  0,  3,  5,  6, 11,
    ],
];

const SHIFTS: [u8; 16] = [1, 1, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 1];

/// Combined S-box + P-permutation tables: SP[i][v] is the P-permuted
/// contribution of S-box i evaluated on the 6-bit group v.
static SP: LazyLock<[[u32; 64]; 8]> = LazyLock::new(|| {
    let mut sp = [[0u32; 64]; 8];
    for (i, table) in SBOXES.iter().enumerate() {
        for v in 0..64u32 {
            let row = ((v >> 4) & 2 | v & 1) as usize;
            let col = ((v >> 1) & 0xF) as usize;
            let s_out = table[row * 16 + col] as u32;
            // Place the 4-bit output at S-box position i, then run P.
            let pre_p = s_out << (28 - 4 * i);
            let mut out = 0u32;
            for (j, &src) in P.iter().enumerate() {
                if pre_p >> (32 - src) & 1 == 1 {
                    out |= 1 << (31 - j);
                }
            }
            sp[i][v as usize] = out;
        }
    }
    sp
});

/// Bit-by-bit permutation; bit 1 of the table selects the MSB of `val`
/// within `in_bits`, matching the standard's numbering.
fn permute(val: u64, table: &[u8], in_bits: u32) -> u64 {
    let mut out = 0u64;
    for &src in table {
        out = out << 1 | (val >> (in_bits - src as u32)) & 1;
    }
    out
}

/// The 16 round keys, each 48 bits.
struct KeySchedule {
    subkeys: [u64; 16],
}

impl KeySchedule {
    fn new(key: &[u8; DES_KEY]) -> Self {
        let key64 = u64::from_be_bytes(*key);
        let cd = permute(key64, &PC1, 64); // parity bits dropped here
        let mut c = (cd >> 28) as u32 & 0x0FFF_FFFF;
        let mut d = cd as u32 & 0x0FFF_FFFF;
        let mut subkeys = [0u64; 16];
        for (round, &shift) in SHIFTS.iter().enumerate() {
            c = (c << shift | c >> (28 - shift)) & 0x0FFF_FFFF;
            d = (d << shift | d >> (28 - shift)) & 0x0FFF_FFFF;
            let cd = (c as u64) << 28 | d as u64;
            subkeys[round] = permute(cd, &PC2, 56);
        }
        Self { subkeys }
    }

    fn feistel(&self, r: u32, subkey: u64) -> u32 {
        // E expands r to 48 bits, six per S-box group.
        let expanded = permute(r as u64, &E, 32) ^ subkey;
        let sp = &*SP;
        let mut out = 0u32;
        for i in 0..8 {
            let group = (expanded >> (42 - 6 * i)) as usize & 0x3F;
            out |= sp[i][group];
        }
        out
    }

    fn apply(&self, block: &[u8; DES_BLOCK], decrypt: bool) -> [u8; DES_BLOCK] {
        let ip = permute(u64::from_be_bytes(*block), &IP, 64);
        let mut l = (ip >> 32) as u32;
        let mut r = ip as u32;
        for round in 0..16 {
            let subkey = if decrypt { self.subkeys[15 - round] } else { self.subkeys[round] };
            let next_r = l ^ self.feistel(r, subkey);
            l = r;
            r = next_r;
        }
        // Final swap, then FP.
        let pre_out = (r as u64) << 32 | l as u64;
        permute(pre_out, &FP, 64).to_be_bytes()
    }
}

fn checked_key_block<'a>(
    key: &'a [u8],
    block: &'a [u8],
) -> Result<(&'a [u8; DES_KEY], [u8; DES_BLOCK]), PrimitiveError> {
    let key: &[u8; DES_KEY] = key.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "DES key",
        expected: DES_KEY,
    })?;
    let block: [u8; DES_BLOCK] = block.try_into().map_err(|_| PrimitiveError::InvalidLength {
        what: "DES block",
        expected: DES_BLOCK,
    })?;
    Ok((key, block))
}

pub fn des_encrypt_block(key: &[u8], block: &[u8]) -> Result<[u8; DES_BLOCK], PrimitiveError> {
    let (key, block) = checked_key_block(key, block)?;
    Ok(KeySchedule::new(key).apply(&block, false))
}

pub fn des_decrypt_block(key: &[u8], block: &[u8]) -> Result<[u8; DES_BLOCK], PrimitiveError> {
    let (key, block) = checked_key_block(key, block)?;
    Ok(KeySchedule::new(key).apply(&block, true))
}

/// A DES key with its schedule prepared once, for use by the CBC layer.
pub struct Des {
    schedule: KeySchedule,
}

impl Des {
    pub fn new(key: &[u8]) -> Result<Self, PrimitiveError> {
        let key: &[u8; DES_KEY] = key.try_into().map_err(|_| PrimitiveError::InvalidLength {
            what: "DES key",
            expected: DES_KEY,
        })?;
        Ok(Self { schedule: KeySchedule::new(key) })
    }

    pub fn encrypt_block(&self, block: &[u8; DES_BLOCK]) -> [u8; DES_BLOCK] {
        self.schedule.apply(block, false)
    }

    pub fn decrypt_block(&self, block: &[u8; DES_BLOCK]) -> [u8; DES_BLOCK] {
        self.schedule.apply(block, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_reference_vector() {
        let key = hex::decode("133457799bbcdff1").unwrap();
        let block = hex::decode("0123456789abcdef").unwrap();
        let ct = des_encrypt_block(&key, &block).unwrap();
        assert_eq!(hex::encode(ct), "85e813540f0ab405");
        let back = des_decrypt_block(&key, &ct).unwrap();
        assert_eq!(back.as_slice(), block.as_slice());
    }

    #[test]
    fn weak_key_all_zero_vector() {
        let ct = des_encrypt_block(&[0u8; 8], &[0u8; 8]).unwrap();
        assert_eq!(hex::encode(ct), "8ca64de9c1b123a7");
    }

    #[test]
    fn parity_bits_are_ignored() {
        let key = hex::decode("133457799bbcdff1").unwrap();
        let mut flipped = key.clone();
        for b in &mut flipped {
            *b ^= 0x01; // bit 8 of each octet is parity
        }
        let block = [0x42u8; 8];
        assert_eq!(
            des_encrypt_block(&key, &block).unwrap(),
            des_encrypt_block(&flipped, &block).unwrap()
        );
    }

    #[test]
    fn wrong_lengths_rejected() {
        assert!(des_encrypt_block(&[0u8; 7], &[0u8; 8]).is_err());
        assert!(des_decrypt_block(&[0u8; 8], &[0u8; 9]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn decrypt_inverts_encrypt(key in any::<[u8; 8]>(), block in any::<[u8; 8]>()) {
            let ct = des_encrypt_block(&key, &block).unwrap();
            prop_assert_eq!(des_decrypt_block(&key, &ct).unwrap(), block);
        }
    }
}
