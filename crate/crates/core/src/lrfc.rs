//! Rateless linear fountain codec.
//!
//! The encoder produces an endless stream of coded symbols, each a random
//! linear combination of the k input symbols with coefficients drawn i.i.d.
//! uniformly from the field. The decoder keeps the received coefficient
//! vectors in row-echelon form and reduces every arriving symbol against the
//! stored pivots (O(k^2) field operations per symbol), so the current rank is
//! always known and decoding can be attempted as soon as it hits k.
//!
//! Payload bytes are field symbols: one byte per symbol, each strictly below
//! the field order. Carrying payloads is optional; a rank-only decoder tracks
//! the same rank process without touching data, which is what the Monte Carlo
//! simulator runs on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::RngCore;

use crate::gf::{FieldContext, GfError};

/// Errors from block construction, encoding and decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecError {
    Field(GfError),
    /// Blocks need at least one input symbol.
    EmptyBlock,
    /// Input symbols must all have the same length.
    UnevenSymbols { expected: usize, found: usize },
    /// Payload bytes are field symbols and must be strictly below the order.
    SymbolOutOfRange { value: u8, order: u16 },
    /// Coefficient vector length differs from the decoder's k.
    LengthMismatch { expected: usize, found: usize },
    /// Payload length differs from what the decoder was built for.
    PayloadMismatch { expected: usize, found: usize },
    /// This decoder carries payloads; bare coefficient vectors are not enough.
    PayloadRequired,
    /// This decoder is rank-only and stores no payloads to solve for.
    RankOnly,
    /// The coefficient matrix has not reached full rank yet.
    RankDeficient { rank: usize, k: usize },
}

impl From<GfError> for CodecError {
    fn from(e: GfError) -> Self {
        CodecError::Field(e)
    }
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodecError::Field(e) => e.fmt(f),
            CodecError::EmptyBlock => write!(f, "blocks need at least one input symbol"),
            CodecError::UnevenSymbols { expected, found } => {
                write!(f, "input symbols differ in length ({found} vs {expected})")
            }
            CodecError::SymbolOutOfRange { value, order } => {
                write!(f, "payload byte {value} is not a GF({order}) symbol")
            }
            CodecError::LengthMismatch { expected, found } => {
                write!(f, "coefficient vector has length {found}, decoder expects {expected}")
            }
            CodecError::PayloadMismatch { expected, found } => {
                write!(f, "payload has length {found}, decoder expects {expected}")
            }
            CodecError::PayloadRequired => {
                write!(f, "decoder carries payloads; absorb full coded symbols")
            }
            CodecError::RankOnly => write!(f, "rank-only decoder stores no payloads"),
            CodecError::RankDeficient { rank, k } => {
                write!(f, "cannot solve at rank {rank} of {k}")
            }
        }
    }
}

impl core::error::Error for CodecError {}

/// A file fragmented into k equal-length input symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBlock {
    k: usize,
    symbol_len: usize,
    order: u16,
    data: Vec<u8>, // k * symbol_len bytes, row-major
}

impl InputBlock {
    /// Build a block from its input symbols, validating shape and range.
    pub fn new(field: &FieldContext, symbols: &[&[u8]]) -> Result<Self, CodecError> {
        if symbols.is_empty() {
            return Err(CodecError::EmptyBlock);
        }
        let symbol_len = symbols[0].len();
        let order = field.order();
        let mut data = Vec::with_capacity(symbols.len() * symbol_len);
        for s in symbols {
            if s.len() != symbol_len {
                return Err(CodecError::UnevenSymbols { expected: symbol_len, found: s.len() });
            }
            check_range(s, order)?;
            data.extend_from_slice(s);
        }
        Ok(InputBlock { k: symbols.len(), symbol_len, order, data })
    }

    /// Block with uniformly random payload symbols, for tests and benchmarks.
    pub fn random(
        field: &FieldContext,
        k: usize,
        symbol_len: usize,
        rng: &mut (impl RngCore + ?Sized),
    ) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyBlock);
        }
        let mut data = vec![0u8; k * symbol_len];
        for b in &mut data {
            *b = field.raw_sample(rng);
        }
        Ok(InputBlock { k, symbol_len, order: field.order(), data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn symbol_len(&self) -> usize {
        self.symbol_len
    }

    /// Order of the field the payload symbols live in.
    pub fn order(&self) -> u16 {
        self.order
    }

    /// Input symbol `a` (panics if `a >= k`, like slice indexing).
    pub fn symbol(&self, a: usize) -> &[u8] {
        &self.data[a * self.symbol_len..(a + 1) * self.symbol_len]
    }
}

fn check_range(bytes: &[u8], order: u16) -> Result<(), CodecError> {
    if order < MAXED_U8_ORDER {
        if let Some(&v) = bytes.iter().find(|&&v| u16::from(v) >= order) {
            return Err(CodecError::SymbolOutOfRange { value: v, order });
        }
    }
    Ok(())
}

// Every u8 fits once the order reaches 256.
const MAXED_U8_ORDER: u16 = 256;

/// One coded symbol: a coefficient vector of length k plus the matching
/// linear combination of the input payloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedSymbol {
    coefficients: Vec<u8>,
    payload: Vec<u8>,
    order: u16,
}

impl CodedSymbol {
    /// Assemble a symbol from raw parts, validating ranges. Meant for tests
    /// and for replaying recorded symbols; fresh ones come from
    /// [`encode_next`].
    pub fn from_parts(
        field: &FieldContext,
        coefficients: &[u8],
        payload: &[u8],
    ) -> Result<Self, CodecError> {
        check_range(coefficients, field.order())?;
        check_range(payload, field.order())?;
        Ok(CodedSymbol {
            coefficients: coefficients.to_vec(),
            payload: payload.to_vec(),
            order: field.order(),
        })
    }

    pub fn coefficients(&self) -> &[u8] {
        &self.coefficients
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn order(&self) -> u16 {
        self.order
    }
}

/// Draw one fresh coded symbol. Coefficients are i.i.d. uniform over the
/// whole field, the all-zero vector included; the stream never ends.
pub fn encode_next(
    field: &FieldContext,
    block: &InputBlock,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<CodedSymbol, CodecError> {
    if field.order() != block.order {
        return Err(GfError::ContextMismatch { left: field.order(), right: block.order }.into());
    }
    let mut coefficients = vec![0u8; block.k];
    let mut payload = vec![0u8; block.symbol_len];
    for (a, c) in coefficients.iter_mut().enumerate() {
        let g = field.raw_sample(rng);
        *c = g;
        if g != 0 {
            for (p, &u) in payload.iter_mut().zip(block.symbol(a)) {
                *p ^= field.raw_mul(g, u);
            }
        }
    }
    Ok(CodedSymbol { coefficients, payload, order: field.order() })
}

/// What absorbing one symbol did to the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbOutcome {
    /// The symbol was linearly independent of everything seen so far.
    RankIncreased,
    /// The symbol was a linear combination of earlier ones.
    Redundant,
}

#[derive(Debug, Clone)]
struct Row {
    pivot: usize,
    coeffs: Vec<u8>, // full length k; zero before pivot, one at pivot
    payload: Vec<u8>,
}

/// Incremental Gaussian elimination over the received coefficient vectors.
///
/// Rows are kept in echelon form sorted by pivot column with normalized
/// pivots. Rank never decreases and grows by at most one per symbol.
#[derive(Debug, Clone)]
pub struct DecoderState {
    k: usize,
    order: u16,
    payload_len: Option<usize>,
    rows: Vec<Row>,
    consumed: u64,
}

impl DecoderState {
    /// Decoder that carries payloads of the given per-symbol length.
    pub fn new(field: &FieldContext, k: usize, payload_len: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyBlock);
        }
        Ok(DecoderState {
            k,
            order: field.order(),
            payload_len: Some(payload_len),
            rows: Vec::new(),
            consumed: 0,
        })
    }

    /// Decoder that only tracks the rank of the coefficient matrix. The
    /// backhaul statistics depend on nothing else, so this is what the
    /// simulator runs; [`solve`](Self::solve) is unavailable.
    pub fn rank_only(field: &FieldContext, k: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyBlock);
        }
        Ok(DecoderState { k, order: field.order(), payload_len: None, rows: Vec::new(), consumed: 0 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Rank of the coefficient matrix received so far.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of symbols absorbed so far (redundant ones included).
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// True once the rank reached k and the system is uniquely solvable.
    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.k
    }

    fn check_field(&self, order: u16) -> Result<(), CodecError> {
        if order == self.order {
            Ok(())
        } else {
            Err(GfError::ContextMismatch { left: self.order, right: order }.into())
        }
    }

    /// Absorb one coded symbol, reducing it against the stored rows.
    pub fn absorb(
        &mut self,
        field: &FieldContext,
        sym: &CodedSymbol,
    ) -> Result<AbsorbOutcome, CodecError> {
        self.check_field(field.order())?;
        self.check_field(sym.order)?;
        if sym.coefficients.len() != self.k {
            return Err(CodecError::LengthMismatch { expected: self.k, found: sym.coefficients.len() });
        }
        if let Some(len) = self.payload_len {
            if sym.payload.len() != len {
                return Err(CodecError::PayloadMismatch { expected: len, found: sym.payload.len() });
            }
        }
        Ok(self.absorb_raw(field, &sym.coefficients, &sym.payload))
    }

    /// Absorb a bare coefficient vector into a rank-only decoder.
    pub fn absorb_coefficients(
        &mut self,
        field: &FieldContext,
        coefficients: &[u8],
    ) -> Result<AbsorbOutcome, CodecError> {
        self.check_field(field.order())?;
        if self.payload_len.is_some() {
            return Err(CodecError::PayloadRequired);
        }
        if coefficients.len() != self.k {
            return Err(CodecError::LengthMismatch { expected: self.k, found: coefficients.len() });
        }
        check_range(coefficients, self.order)?;
        Ok(self.absorb_raw(field, coefficients, &[]))
    }

    fn absorb_raw(&mut self, field: &FieldContext, coefficients: &[u8], payload: &[u8]) -> AbsorbOutcome {
        self.consumed += 1;
        let mut c = coefficients.to_vec();
        let mut p = if self.payload_len.is_some() { payload.to_vec() } else { Vec::new() };

        // One pass in ascending pivot order suffices: a stored row is zero
        // before its pivot, so eliminating with it never revives a column
        // that an earlier row already cleared.
        for row in &self.rows {
            let f = c[row.pivot];
            if f != 0 {
                axpy(field, &mut c[row.pivot..], &row.coeffs[row.pivot..], f);
                if !p.is_empty() {
                    axpy(field, &mut p, &row.payload, f);
                }
            }
        }

        let pivot = match c.iter().position(|&v| v != 0) {
            Some(pv) => pv,
            None => return AbsorbOutcome::Redundant,
        };
        if c[pivot] != 1 {
            let inv = field.raw_inv(c[pivot]);
            scale(field, &mut c[pivot..], inv);
            scale(field, &mut p, inv);
        }
        let at = match self.rows.binary_search_by(|r| r.pivot.cmp(&pivot)) {
            Err(at) => at,
            Ok(_) => unreachable!("pivot column already eliminated"),
        };
        self.rows.insert(at, Row { pivot, coeffs: c, payload: p });
        AbsorbOutcome::RankIncreased
    }

    /// Recover the input block by back-substitution. Requires full rank and
    /// a payload-carrying decoder; the state itself is left untouched.
    pub fn solve(&self, field: &FieldContext) -> Result<InputBlock, CodecError> {
        self.check_field(field.order())?;
        let len = self.payload_len.ok_or(CodecError::RankOnly)?;
        if !self.is_complete() {
            return Err(CodecError::RankDeficient { rank: self.rank(), k: self.k });
        }
        // Full rank with k pivot columns means rows[a].pivot == a.
        let mut data = vec![0u8; self.k * len];
        for a in (0..self.k).rev() {
            let row = &self.rows[a];
            debug_assert_eq!(row.pivot, a);
            let mut acc = row.payload.clone();
            for b in a + 1..self.k {
                let g = row.coeffs[b];
                if g != 0 {
                    for (s, i) in acc.iter_mut().zip(b * len..(b + 1) * len) {
                        *s ^= field.raw_mul(g, data[i]);
                    }
                }
            }
            data[a * len..(a + 1) * len].copy_from_slice(&acc);
        }
        Ok(InputBlock { k: self.k, symbol_len: len, order: self.order, data })
    }
}

/// dst ^= f * src, elementwise.
#[inline]
fn axpy(field: &FieldContext, dst: &mut [u8], src: &[u8], f: u8) {
    if f == 1 {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d ^= s;
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= field.raw_mul(f, s);
            }
        }
    }
}

#[inline]
fn scale(field: &FieldContext, dst: &mut [u8], f: u8) {
    if f != 1 {
        for d in dst.iter_mut() {
            *d = field.raw_mul(f, *d);
        }
    }
}

/// Run one decoding experiment: feed fresh random coefficient vectors into a
/// rank-only decoder until it completes and return how many symbols beyond k
/// that took.
pub fn measure_overhead(
    field: &FieldContext,
    k: usize,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<u64, CodecError> {
    let mut state = DecoderState::rank_only(field, k)?;
    let mut buf = vec![0u8; k];
    while !state.is_complete() {
        for b in &mut buf {
            *b = field.raw_sample(rng);
        }
        state.absorb_raw(field, &buf, &[]);
    }
    Ok(state.consumed() - k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_coefficients_decode_immediately() {
        let f = FieldContext::new(4).unwrap();
        let block = InputBlock::new(&f, &[&[1, 2, 3], &[0, 3, 1]]).unwrap();
        let mut dec = DecoderState::new(&f, 2, 3).unwrap();
        let s0 = CodedSymbol::from_parts(&f, &[1, 0], block.symbol(0)).unwrap();
        let s1 = CodedSymbol::from_parts(&f, &[0, 1], block.symbol(1)).unwrap();
        assert_eq!(dec.absorb(&f, &s0).unwrap(), AbsorbOutcome::RankIncreased);
        assert_eq!(dec.absorb(&f, &s1).unwrap(), AbsorbOutcome::RankIncreased);
        assert!(dec.is_complete());
        assert_eq!(dec.solve(&f).unwrap(), block);
    }

    #[test]
    fn duplicate_symbol_is_redundant() {
        let f = FieldContext::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let block = InputBlock::random(&f, 4, 5, &mut rng).unwrap();
        let sym = loop {
            let s = encode_next(&f, &block, &mut rng).unwrap();
            if s.coefficients().iter().any(|&c| c != 0) {
                break s;
            }
        };
        let mut dec = DecoderState::new(&f, 4, 5).unwrap();
        assert_eq!(dec.absorb(&f, &sym).unwrap(), AbsorbOutcome::RankIncreased);
        assert_eq!(dec.absorb(&f, &sym).unwrap(), AbsorbOutcome::Redundant);
        assert_eq!(dec.rank(), 1);
        assert_eq!(dec.consumed(), 2);
    }

    #[test]
    fn solve_requires_full_rank_and_payloads() {
        let f = FieldContext::new(2).unwrap();
        let mut dec = DecoderState::new(&f, 3, 1).unwrap();
        let s = CodedSymbol::from_parts(&f, &[1, 1, 0], &[1]).unwrap();
        dec.absorb(&f, &s).unwrap();
        assert_eq!(dec.solve(&f), Err(CodecError::RankDeficient { rank: 1, k: 3 }));
        assert_eq!(dec.rank(), 1, "failed solve must not disturb the state");

        let mut ro = DecoderState::rank_only(&f, 2).unwrap();
        ro.absorb_coefficients(&f, &[1, 0]).unwrap();
        ro.absorb_coefficients(&f, &[0, 1]).unwrap();
        assert_eq!(ro.solve(&f), Err(CodecError::RankOnly));
    }

    #[test]
    fn shape_errors_are_reported() {
        let f = FieldContext::new(4).unwrap();
        assert_eq!(InputBlock::new(&f, &[]), Err(CodecError::EmptyBlock));
        assert_eq!(
            InputBlock::new(&f, &[&[1, 2][..], &[1][..]]),
            Err(CodecError::UnevenSymbols { expected: 2, found: 1 })
        );
        assert_eq!(
            InputBlock::new(&f, &[&[1, 4][..]]),
            Err(CodecError::SymbolOutOfRange { value: 4, order: 4 })
        );
        let mut dec = DecoderState::new(&f, 2, 1).unwrap();
        let s = CodedSymbol::from_parts(&f, &[1, 0, 0], &[1]).unwrap();
        assert_eq!(dec.absorb(&f, &s), Err(CodecError::LengthMismatch { expected: 2, found: 3 }));
        let s = CodedSymbol::from_parts(&f, &[1, 0], &[1, 1]).unwrap();
        assert_eq!(dec.absorb(&f, &s), Err(CodecError::PayloadMismatch { expected: 1, found: 2 }));
        assert_eq!(dec.absorb_coefficients(&f, &[1, 0]), Err(CodecError::PayloadRequired));
    }

    #[test]
    fn all_zero_vector_is_legal_and_redundant() {
        let f = FieldContext::new(2).unwrap();
        let mut dec = DecoderState::rank_only(&f, 3).unwrap();
        assert_eq!(dec.absorb_coefficients(&f, &[0, 0, 0]).unwrap(), AbsorbOutcome::Redundant);
        assert_eq!(dec.consumed(), 1);
        assert_eq!(dec.rank(), 0);
    }

    #[test]
    fn k1_single_nonzero_coefficient_recovers_value() {
        let f = FieldContext::new(128).unwrap();
        let block = InputBlock::new(&f, &[&[77]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut dec = DecoderState::new(&f, 1, 1).unwrap();
        while !dec.is_complete() {
            let s = encode_next(&f, &block, &mut rng).unwrap();
            dec.absorb(&f, &s).unwrap();
        }
        assert_eq!(dec.solve(&f).unwrap(), block);
    }
}
