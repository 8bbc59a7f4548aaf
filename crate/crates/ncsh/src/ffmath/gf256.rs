//! GF(2^8) arithmetic with the reduction polynomial x^8 + x^4 + x^3 + x + 1
//! (0x11B), the polynomial the block cipher's S-box and column mixing need.

use super::{FfError, FfResult};

const REDUCTION_POLY: u16 = 0x11B;

/// An element of GF(2^8): a degree-<8 polynomial over GF(2) packed into a byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Gf256(pub u8);

impl Gf256 {
    /// Addition is XOR (characteristic 2).
    pub fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }

    /// Carry-less polynomial product reduced modulo 0x11B.
    pub fn mul(self, rhs: Gf256) -> Gf256 {
        let mut acc = 0u16;
        let a = self.0 as u16;
        for bit in 0..8 {
            if rhs.0 >> bit & 1 == 1 {
                acc ^= a << bit;
            }
        }
        // Reduce the degree-<15 product.
        for deg in (8..16).rev() {
            if acc >> deg & 1 == 1 {
                acc ^= REDUCTION_POLY << (deg - 8);
            }
        }
        Gf256(acc as u8)
    }

    /// Multiplicative inverse; a * a^-1 = 1. Zero has no inverse.
    pub fn inv(self) -> FfResult<Gf256> {
        if self.0 == 0 {
            return Err(FfError::NoInverse);
        }
        // a^254 = a^-1 in the 255-element multiplicative group.
        let mut acc = Gf256(1);
        let mut sq = self;
        let mut e = 254u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(sq);
            }
            sq = sq.mul(sq);
            e >>= 1;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Shift-and-xor reduction oracle, written independently of Gf256::mul.
    fn mul_oracle(a: u8, b: u8) -> u8 {
        let mut product = 0u32;
        for i in 0..8 {
            for j in 0..8 {
                if (a >> i & 1) & (b >> j & 1) == 1 {
                    product ^= 1 << (i + j);
                }
            }
        }
        for deg in (8..32).rev() {
            if product >> deg & 1 == 1 {
                product ^= (REDUCTION_POLY as u32) << (deg - 8);
            }
        }
        product as u8
    }

    #[test]
    fn multiplicative_identity() {
        for a in 0..=255u8 {
            assert_eq!(Gf256(a).mul(Gf256(0x01)), Gf256(a));
        }
    }

    #[test]
    fn shift_reduction_case() {
        // 0x80 * 0x02 overflows degree 8 once: expect 0x11B's low byte.
        assert_eq!(mul_oracle(0x80, 0x02), 0x1B);
        assert_eq!(Gf256(0x80).mul(Gf256(0x02)), Gf256(0x1B));
    }

    #[test]
    fn known_product_57_83() {
        assert_eq!(mul_oracle(0x57, 0x83), 0xC1);
        assert_eq!(Gf256(0x57).mul(Gf256(0x83)), Gf256(0xC1));
    }

    #[test]
    fn mul_matches_oracle_exhaustively() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(Gf256(a).mul(Gf256(b)).0, mul_oracle(a, b), "{a:#x} * {b:#x}");
            }
        }
    }

    #[test]
    fn all_nonzero_elements_invert() {
        for a in 1..=255u8 {
            let inv = Gf256(a).inv().unwrap();
            assert_eq!(Gf256(a).mul(inv), Gf256(1), "a = {a:#x}");
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Gf256(0).inv(), Err(FfError::NoInverse));
    }
}
