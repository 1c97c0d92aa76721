//! GF(2^l) contexts and elements.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::bits::{limbs_for, xor_shifted_into, BitString};
use super::poly::{self, MulBackend, Reducer};
use super::FieldError;

/// Lowest-weight, lowest-value irreducibles for large degrees, as the
/// exponents strictly between 0 and l. Entries are re-derived by the Rabin
/// search in the test suite.
const TRUSTED: &[(usize, &[usize])] = &[
    (64, &[4, 3, 1]),
    (128, &[7, 2, 1]),
    (256, &[10, 5, 2]),
    (512, &[8, 5, 2]),
    (1024, &[19, 6, 1]),
    (2048, &[19, 14, 13]),
    (4096, &[27, 15, 1]),
];

fn from_exponents(l: usize, middle: &[usize]) -> BitString {
    let mut m = BitString::zeros(l + 1);
    m.set_bit(l, true);
    m.set_bit(0, true);
    for &e in middle {
        m.set_bit(e, true);
    }
    m
}

/// Deterministic irreducible polynomial of degree `l` (length `l + 1`):
/// the one of lowest Hamming weight, ties broken by lowest integer value,
/// among polynomials with a nonzero constant term.
pub fn select_modulus(l: usize) -> BitString {
    assert!(l >= 1, "field degree must be positive");
    static CACHE: OnceLock<Mutex<HashMap<usize, BitString>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().expect("modulus cache").get(&l) {
        return m.clone();
    }
    let m = search_modulus(l);
    cache.lock().expect("modulus cache").insert(l, m.clone());
    m
}

fn search_modulus(l: usize) -> BitString {
    if l == 1 {
        return from_exponents(1, &[]);
    }
    if let Some((_, middle)) = TRUSTED.iter().find(|(d, _)| *d == l) {
        return from_exponents(l, middle);
    }
    // Irreducibles of degree >= 2 have odd weight; weight 3 first.
    let test = |m: &BitString| {
        if l <= 32 {
            poly::is_irreducible_trial(m.to_u64().expect("fits"))
        } else {
            poly::is_irreducible_rabin(m.limbs())
        }
    };
    let mut middle_terms = 1;
    loop {
        if middle_terms < l {
            let mut stack = Vec::with_capacity(middle_terms);
            if let Some(found) = search_terms(l, middle_terms, l, &mut stack, &test) {
                return found;
            }
        }
        middle_terms += 2;
        assert!(middle_terms < l + 1, "no irreducible polynomial of degree {l} found");
    }
}

/// Tries every set of `count` distinct exponents in `1..below` in increasing
/// order of the value they contribute.
fn search_terms(
    l: usize,
    count: usize,
    below: usize,
    chosen: &mut Vec<usize>,
    test: &dyn Fn(&BitString) -> bool,
) -> Option<BitString> {
    if count == 0 {
        let m = from_exponents(l, chosen);
        return test(&m).then_some(m);
    }
    for top in count..below {
        chosen.push(top);
        let found = search_terms(l, count - 1, top, chosen, test);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Whether `modulus` (length `l + 1`) is an irreducible of degree `l`.
pub fn is_irreducible(modulus: &BitString) -> bool {
    let l = match modulus.len().checked_sub(1) {
        Some(l) if l >= 1 && modulus.bit(l) => l,
        _ => return false,
    };
    if l <= 32 {
        return poly::is_irreducible_trial(modulus.to_u64().expect("fits"));
    }
    if let Some((_, middle)) = TRUSTED.iter().find(|(d, _)| *d == l) {
        if from_exponents(l, middle) == *modulus {
            return true;
        }
    }
    poly::is_irreducible_rabin(modulus.limbs())
}

/// Degree and reduction polynomial of one GF(2^l).
pub struct FieldContext {
    degree: usize,
    modulus: BitString,
    reducer: Reducer,
    backend: MulBackend,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

impl FieldContext {
    pub fn new(modulus: BitString) -> Result<Arc<Self>, FieldError> {
        Self::with_backend(modulus, MulBackend::best())
    }

    pub fn with_backend(modulus: BitString, backend: MulBackend) -> Result<Arc<Self>, FieldError> {
        if !is_irreducible(&modulus) {
            return Err(FieldError::ReducibleModulus(modulus.to_string()));
        }
        let degree = modulus.len() - 1;
        let reducer = Reducer::new(modulus.limbs());
        Ok(Arc::new(Self { degree, modulus, reducer, backend }))
    }

    /// Context over the modulus chosen by [`select_modulus`].
    pub fn for_degree(l: usize) -> Result<Arc<Self>, FieldError> {
        if l == 0 {
            return Err(FieldError::ZeroDegree);
        }
        Self::new(select_modulus(l))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &BitString {
        &self.modulus
    }

    pub fn backend(&self) -> MulBackend {
        self.backend
    }

    pub fn element(self: &Arc<Self>, bits: BitString) -> Result<FieldElement, FieldError> {
        self.check_len(&bits)?;
        Ok(FieldElement { bits, ctx: Arc::clone(self) })
    }

    pub fn from_u64(self: &Arc<Self>, value: u64) -> Result<FieldElement, FieldError> {
        self.element(BitString::from_u64(value, self.degree)?)
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { bits: BitString::zeros(self.degree), ctx: Arc::clone(self) }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        let mut bits = BitString::zeros(self.degree);
        bits.set_bit(0, true);
        FieldElement { bits, ctx: Arc::clone(self) }
    }

    fn check_len(&self, bits: &BitString) -> Result<(), FieldError> {
        if bits.len() != self.degree {
            return Err(FieldError::LengthMismatch { expected: self.degree, actual: bits.len() });
        }
        Ok(())
    }

    /// Product of two raw length-`l` strings.
    pub fn mul_bits(&self, a: &BitString, b: &BitString) -> Result<BitString, FieldError> {
        self.check_len(a)?;
        self.check_len(b)?;
        let limbs = self.reducer.mul_mod(a.limbs(), b.limbs(), self.backend);
        Ok(BitString::from_limbs(limbs, self.degree))
    }

    /// Inverse of a raw nonzero length-`l` string by the extended Euclidean
    /// algorithm on polynomials.
    pub fn inv_bits(&self, a: &BitString) -> Result<BitString, FieldError> {
        self.check_len(a)?;
        if a.is_zero() {
            return Err(FieldError::NotInvertible);
        }
        let width = limbs_for(self.degree + 1);
        let mut u = a.limbs().to_vec();
        u.resize(width, 0);
        let mut v = self.modulus.limbs().to_vec();
        let mut g1 = vec![0u64; width];
        g1[0] = 1;
        let mut g2 = vec![0u64; width];
        // Invariants: g1 * a = u and g2 * a = v modulo the modulus.
        loop {
            let du = poly::degree(&u).expect("u stays nonzero for irreducible modulus");
            if du == 0 {
                break;
            }
            let dv = poly::degree(&v).expect("v stays nonzero");
            if du < dv {
                std::mem::swap(&mut u, &mut v);
                std::mem::swap(&mut g1, &mut g2);
                continue;
            }
            let shift = du - dv;
            xor_shifted_into(&mut u, &v, shift);
            xor_shifted_into(&mut g1, &g2, shift);
        }
        Ok(BitString::from_limbs(g1, self.degree))
    }
}

/// An element of GF(2^l) tied to its context.
#[derive(Clone)]
pub struct FieldElement {
    bits: BitString,
    ctx: Arc<FieldContext>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in GF(2^{})", self.bits, self.ctx.degree)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && same_context(&self.ctx, &other.ctx)
    }
}

impl Eq for FieldElement {}

fn same_context(a: &Arc<FieldContext>, b: &Arc<FieldContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self { bits: self.bits.xor(&other.bits)?, ctx: Arc::clone(&self.ctx) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(Self { bits: self.ctx.mul_bits(&self.bits, &other.bits)?, ctx: Arc::clone(&self.ctx) })
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        Ok(Self { bits: self.ctx.inv_bits(&self.bits)?, ctx: Arc::clone(&self.ctx) })
    }
}

pub fn ff_add(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.add(b)
}

pub fn ff_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
    a.mul(b)
}

pub fn ff_inv(a: &FieldElement) -> Result<FieldElement, FieldError> {
    a.inv()
}
