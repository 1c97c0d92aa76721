//! Arithmetic in GF(2^l) for arbitrary l, over MSB-first bit strings.
//!
//! A length-`l` bit string `b_{l-1} .. b_0` is the polynomial
//! `b_{l-1} x^{l-1} + .. + b_0`; the field is GF(2)[x] modulo an irreducible
//! of degree `l` picked by [`select_modulus`].

mod bits;
mod field;
pub mod poly;

pub use bits::BitString;
pub use field::{ff_add, ff_inv, ff_mul, is_irreducible, select_modulus, FieldContext, FieldElement};
pub use poly::MulBackend;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("operands belong to different field contexts")]
    ContextMismatch,
    #[error("zero has no multiplicative inverse")]
    NotInvertible,
    #[error("cannot take the top {k} bits of a {len}-bit string")]
    TruncateTooLong { k: usize, len: usize },
    #[error("value {value:#x} does not fit in {len} bits")]
    ValueTooWide { value: u64, len: usize },
    #[error("modulus {0} is not an irreducible polynomial with leading bit set")]
    ReducibleModulus(String),
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("parse error: {0}")]
    Parse(String),
}

/// `x` truncated to its first `k` bits (MSB-first).
pub fn truncate_msb(x: &BitString, k: usize) -> Result<BitString, FieldError> {
    x.truncate_msb(k)
}

/// `m` followed by `r`.
pub fn concat(m: &BitString, r: &BitString) -> BitString {
    m.concat(r)
}
