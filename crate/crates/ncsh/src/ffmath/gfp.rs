//! Prime-field GF(p) arithmetic. Elements are plain `BigUint` values in
//! [0, p); the field checks operand range on every call.

use num_bigint::BigUint;
use num_traits::Zero;

use super::{mod_inv, FfError, FfResult};

/// A prime field GF(p). Construction verifies that p is (probably) prime
/// with 40 Miller-Rabin rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: BigUint,
}

impl PrimeField {
    pub fn new(p: BigUint) -> FfResult<Self> {
        if !super::is_probable_prime(&p, 40) {
            return Err(FfError::InvalidArgument("modulus is not prime"));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    fn check(&self, v: &BigUint) -> FfResult<()> {
        if v >= &self.p {
            return Err(FfError::InvalidArgument("operand not reduced below p"));
        }
        Ok(())
    }

    /// a + b mod p
    pub fn add(&self, a: &BigUint, b: &BigUint) -> FfResult<BigUint> {
        self.check(a)?;
        self.check(b)?;
        Ok((a + b) % &self.p)
    }

    /// a - b mod p, wrapping as (a - b + p) mod p
    pub fn sub(&self, a: &BigUint, b: &BigUint) -> FfResult<BigUint> {
        self.check(a)?;
        self.check(b)?;
        Ok((a + &self.p - b) % &self.p)
    }

    /// a * b mod p
    pub fn mul(&self, a: &BigUint, b: &BigUint) -> FfResult<BigUint> {
        self.check(a)?;
        self.check(b)?;
        Ok((a * b) % &self.p)
    }

    /// a^-1 mod p via the extended Euclidean algorithm.
    pub fn inv(&self, a: &BigUint) -> FfResult<BigUint> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FfError::NoInverse);
        }
        mod_inv(a, &self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn gf11() -> PrimeField {
        PrimeField::new(BigUint::from(11u8)).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(BigUint::from(12u8)).is_err());
    }

    #[test]
    fn additive_identity() {
        let f = gf11();
        for x in 0u8..11 {
            let xb = BigUint::from(x);
            assert_eq!(f.add(&BigUint::zero(), &xb).unwrap(), xb);
        }
    }

    #[test]
    fn mul_7_8_in_gf11_against_exhaustive_table() {
        let f = gf11();
        // Oracle: the full multiplication table of GF(11) by u32 arithmetic.
        for a in 0u32..11 {
            for b in 0u32..11 {
                assert_eq!(
                    f.mul(&BigUint::from(a), &BigUint::from(b)).unwrap(),
                    BigUint::from(a * b % 11)
                );
            }
        }
        assert_eq!(
            f.mul(&BigUint::from(7u8), &BigUint::from(8u8)).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn sub_wraps() {
        let f = gf11();
        assert_eq!(
            f.sub(&BigUint::from(3u8), &BigUint::from(5u8)).unwrap(),
            BigUint::from((3 + 11 - 5) % 11u8)
        );
    }

    #[test]
    fn unreduced_operand_rejected() {
        let f = gf11();
        assert!(f.add(&BigUint::from(11u8), &BigUint::zero()).is_err());
        assert!(f.mul(&BigUint::zero(), &BigUint::from(200u8)).is_err());
    }

    proptest! {
        // Field axioms over a fixed large prime, >= 1000 random triples.
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn field_axioms(a in 0u64..=0xFFFF_FFFB, b in 0u64..=0xFFFF_FFFB, c in 0u64..=0xFFFF_FFFB) {
            let f = PrimeField::new(BigUint::from(4294967291u64)).unwrap();
            let (a, b, c) = (BigUint::from(a), BigUint::from(b), BigUint::from(c));
            prop_assert_eq!(f.add(&a, &b).unwrap(), f.add(&b, &a).unwrap());
            prop_assert_eq!(f.mul(&a, &b).unwrap(), f.mul(&b, &a).unwrap());
            prop_assert_eq!(
                f.add(&f.add(&a, &b).unwrap(), &c).unwrap(),
                f.add(&a, &f.add(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                f.mul(&f.mul(&a, &b).unwrap(), &c).unwrap(),
                f.mul(&a, &f.mul(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(
                f.mul(&a, &f.add(&b, &c).unwrap()).unwrap(),
                f.add(&f.mul(&a, &b).unwrap(), &f.mul(&a, &c).unwrap()).unwrap()
            );
        }
    }
}
