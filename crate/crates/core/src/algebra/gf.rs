use rand::Rng;
use thiserror::Error;

/// Element of GF(2^m), stored in the low `m` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("field bits must be in 1..=16, got {0}")]
    UnsupportedBits(u32),
    #[error("polynomial {0:#x} does not define GF(2^{1})")]
    NotAField(u32, u32),
}

/// Low-weight irreducible polynomials, indexed by degree.
const DEFAULT_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// Log/antilog tables for GF(2^m) modulo a fixed irreducible polynomial.
#[derive(Clone, Debug)]
pub struct GaloisField {
    bits: u32,
    poly: u32,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn mul_slow(mut a: u32, mut b: u32, bits: u32, poly: u32) -> u32 {
    let top = 1u32 << bits;
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

impl GaloisField {
    /// GF(2^16) with x^16 + x^12 + x^3 + x + 1.
    pub fn default_field() -> Self {
        Self::new(16).expect("default field")
    }

    pub fn new(bits: u32) -> Result<Self, FieldError> {
        if !(1..=16).contains(&bits) {
            return Err(FieldError::UnsupportedBits(bits));
        }
        Self::with_poly(bits, DEFAULT_POLYS[bits as usize])
    }

    /// Builds the tables from the first element of full multiplicative order.
    /// Fails when no such element exists, i.e. the polynomial is reducible.
    pub fn with_poly(bits: u32, poly: u32) -> Result<Self, FieldError> {
        if !(1..=16).contains(&bits) {
            return Err(FieldError::UnsupportedBits(bits));
        }
        if poly >> bits != 1 {
            return Err(FieldError::NotAField(poly, bits));
        }
        let order = (1u32 << bits) - 1;
        for g in 1..=order {
            let mut exp = Vec::with_capacity(2 * order as usize);
            let mut x = 1u32;
            let mut full = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    full = false;
                    break;
                }
                exp.push(x);
                x = mul_slow(x, g, bits, poly);
            }
            if !full || x != 1 {
                continue;
            }
            let mut log = vec![0u32; (order + 1) as usize];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            let head: Vec<u32> = exp.clone();
            exp.extend(head);
            return Ok(GaloisField { bits, poly, generator: g, exp, log });
        }
        Err(FieldError::NotAField(poly, bits))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement(self.generator)
    }

    pub fn size(&self) -> u32 {
        1 << self.bits
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// `dst[i] ^= c * src[i]`
    pub(crate) fn axpy(&self, dst: &mut [u32], c: u32, src: &[u32]) {
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize] as usize;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[lc + self.log[s as usize] as usize];
            }
        }
    }

    pub(crate) fn scale(&self, row: &mut [u32], c: u32) {
        if c == 1 {
            return;
        }
        for x in row.iter_mut() {
            *x = self.mul_raw(*x, c);
        }
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let order = self.size() - 1;
        let l = self.log[a.0 as usize];
        Some(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.size() - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (e % order)) % order) as usize])
    }

    /// `g^i` for the table generator.
    pub fn exp_of(&self, i: u64) -> FieldElement {
        FieldElement(self.exp[(i % (self.size() as u64 - 1)) as usize])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.size()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.size()))
    }

    pub fn mask(&self) -> u32 {
        self.size() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_polynomial_is_a_field() {
        for m in 1..=16 {
            let f = GaloisField::new(m).unwrap();
            assert_eq!(f.poly(), DEFAULT_POLYS[m as usize]);
        }
    }

    #[test]
    fn reducible_polynomial_rejected() {
        // x^4 + 1 = (x + 1)^4
        assert!(matches!(GaloisField::with_poly(4, 0x11), Err(FieldError::NotAField(_, _))));
        assert!(GaloisField::new(0).is_err());
        assert!(GaloisField::new(17).is_err());
    }

    #[test]
    fn gf16_exhaustive_inverse_and_slow_mul() {
        let f = GaloisField::new(4).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(FieldElement(a), FieldElement(b)).0, mul_slow(a, b, 4, 0x13));
            }
            if a != 0 {
                let ai = f.inv(FieldElement(a)).unwrap();
                assert_eq!(f.mul(FieldElement(a), ai), FieldElement::ONE);
            }
        }
        assert_eq!(f.inv(FieldElement::ZERO), None);
    }

    #[test]
    fn default_field_spot_checks() {
        let f = GaloisField::default_field();
        assert_eq!(f.bits(), 16);
        let a = FieldElement(0x1234);
        let b = FieldElement(0xBEEF);
        assert_eq!(f.mul(a, b).0, mul_slow(0x1234, 0xBEEF, 16, 0x1100B));
        assert_eq!(f.pow(a, 65535), FieldElement::ONE);
        assert_eq!(f.div(f.mul(a, b), b), Some(a));
    }
}
