//! Arithmetic over the binary extension fields GF(2^m) for m = 1..=8.
//!
//! Multiplication and inversion run on exp/log tables built once per
//! [`FieldContext`]; a context is immutable afterwards and can be shared
//! freely across threads. Elements are tagged with the order of the field
//! they belong to, so mixing elements of different fields surfaces as an
//! error instead of silently producing wrong values.

use core::fmt;

use rand::RngCore;

/// Largest supported field order.
pub const MAX_ORDER: u16 = 256;

// Reduction polynomial for degree m at index m-1. Conventional irreducible
// choices; any irreducible of the right degree yields an isomorphic field.
const REDUCTION_POLYS: [u16; 8] = [
    0b11,          // x + 1
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b1_0011,      // x^4 + x + 1
    0b10_0101,     // x^5 + x^2 + 1
    0b100_0011,    // x^6 + x + 1
    0b1000_0011,   // x^7 + x + 1
    0b1_0001_1011, // x^8 + x^4 + x^3 + x + 1
];

/// Errors from field construction and element arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfError {
    /// Requested order is not a power of two in `2..=256`.
    UnsupportedOrder(u16),
    /// Operands (or an element and the context operating on it) belong to
    /// fields of different order.
    ContextMismatch { left: u16, right: u16 },
    /// Value does not fit in the field.
    OutOfRange { value: u16, order: u16 },
    /// Zero has no multiplicative inverse.
    ZeroInverse,
}

impl fmt::Display for GfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GfError::UnsupportedOrder(q) => {
                write!(f, "field order {q} is not a power of two in 2..=256")
            }
            GfError::ContextMismatch { left, right } => {
                write!(f, "mixed elements of GF({left}) and GF({right})")
            }
            GfError::OutOfRange { value, order } => {
                write!(f, "value {value} does not fit in GF({order})")
            }
            GfError::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
        }
    }
}

impl core::error::Error for GfError {}

/// One element of a specific GF(2^m), tagged with the order of its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    order: u16,
}

impl FieldElement {
    /// Bit pattern of the element (a polynomial over GF(2) of degree < m).
    pub fn value(self) -> u8 {
        self.value
    }

    /// Order of the field this element belongs to.
    pub fn order(self) -> u16 {
        self.order
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

/// Carry-less multiply modulo `poly`, reducing after every doubling step.
/// Only used while building tables; runtime products go through them.
fn clmul_mod(mut a: u16, mut b: u16, poly: u16, m: u32) -> u16 {
    let mut acc = 0u16;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << m) != 0 {
            a ^= poly;
        }
    }
    acc
}

/// Table-backed arithmetic for one GF(2^m).
#[derive(Clone)]
pub struct FieldContext {
    order: u16,
    m: u32,
    poly: u16,
    // exp[i] = g^i for a generator g, doubled so that exp[log a + log b]
    // needs no reduction mod q-1; log[v] is its inverse on nonzero v.
    exp: [u8; 2 * (MAX_ORDER as usize - 1)],
    log: [u16; MAX_ORDER as usize],
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("order", &self.order)
            .field("poly", &format_args!("{:#b}", self.poly))
            .finish()
    }
}

impl FieldContext {
    /// Build the field of the given order (a power of two in `2..=256`).
    pub fn new(order: u16) -> Result<Self, GfError> {
        if !(2..=MAX_ORDER).contains(&order) || !order.is_power_of_two() {
            return Err(GfError::UnsupportedOrder(order));
        }
        let m = order.trailing_zeros();
        let poly = REDUCTION_POLYS[m as usize - 1];

        // Smallest generator of the multiplicative group. For q = 2 this is
        // 1 (the group is trivial); x itself is not primitive for every
        // polynomial above (degree 8 notably), hence the search.
        let qm1 = u32::from(order) - 1;
        let mut generator = 0u16;
        for g in 1..order {
            let mut x = g;
            let mut ord = 1u32;
            while x != 1 {
                x = clmul_mod(x, g, poly, m);
                ord += 1;
            }
            if ord == qm1 {
                generator = g;
                break;
            }
        }
        assert!(generator != 0, "no generator: reduction polynomial is reducible");

        let mut ctx = FieldContext {
            order,
            m,
            poly,
            exp: [0; 2 * (MAX_ORDER as usize - 1)],
            log: [0; MAX_ORDER as usize],
        };
        let qm1 = qm1 as usize;
        let mut x = 1u16;
        for i in 0..qm1 {
            ctx.exp[i] = x as u8;
            ctx.log[x as usize] = i as u16;
            x = clmul_mod(x, generator, poly, m);
        }
        debug_assert_eq!(x, 1, "generator order mismatch");
        for i in qm1..2 * qm1 {
            ctx.exp[i] = ctx.exp[i - qm1];
        }
        Ok(ctx)
    }

    /// Field order q = 2^m.
    pub fn order(&self) -> u16 {
        self.order
    }

    /// Extension degree m.
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Reduction polynomial as a bitmask (bit i = coefficient of x^i).
    pub fn reduction_poly(&self) -> u16 {
        self.poly
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, order: self.order }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, order: self.order }
    }

    /// Wrap a raw value, checking it fits the field.
    pub fn element(&self, value: u16) -> Result<FieldElement, GfError> {
        if value < self.order {
            Ok(FieldElement { value: value as u8, order: self.order })
        } else {
            Err(GfError::OutOfRange { value, order: self.order })
        }
    }

    fn check(&self, e: FieldElement) -> Result<(), GfError> {
        if e.order == self.order {
            Ok(())
        } else {
            Err(GfError::ContextMismatch { left: self.order, right: e.order })
        }
    }

    /// Addition; characteristic 2, so this is XOR and every element is its
    /// own additive inverse.
    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { value: a.value ^ b.value, order: self.order })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement { value: self.raw_mul(a.value, b.value), order: self.order })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        if a.value == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(FieldElement { value: self.raw_inv(a.value), order: self.order })
    }

    /// Uniform draw over all q values. Deterministic for a seeded stream;
    /// exact (q is a power of two, so masking low bits introduces no bias).
    pub fn sample_uniform(&self, rng: &mut (impl RngCore + ?Sized)) -> FieldElement {
        FieldElement { value: self.raw_sample(rng), order: self.order }
    }

    #[inline]
    pub(crate) fn raw_mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        let idx = self.log[a as usize] + self.log[b as usize];
        self.exp[idx as usize]
    }

    #[inline]
    pub(crate) fn raw_inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.exp[(self.order - 1 - self.log[a as usize]) as usize]
    }

    #[inline]
    pub(crate) fn raw_sample(&self, rng: &mut (impl RngCore + ?Sized)) -> u8 {
        (rng.next_u32() & u32::from(self.order - 1)) as u8
    }
}
