//! GF(2)[x] arithmetic on little-endian limb vectors.

use super::bits::{limbs_for, xor_shifted_into};

/// Carry-less multiplication backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulBackend {
    /// Word-level schoolbook with a portable shift-and-xor 64x64 kernel.
    Schoolbook,
    /// Same schoolbook structure with the x86-64 PCLMULQDQ kernel.
    Hardware,
}

impl MulBackend {
    pub fn hardware_available() -> bool {
        #[cfg(target_arch = "x86_64")]
        {
            std::is_x86_feature_detected!("pclmulqdq")
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            false
        }
    }

    pub fn best() -> Self {
        if Self::hardware_available() {
            MulBackend::Hardware
        } else {
            MulBackend::Schoolbook
        }
    }
}

pub fn degree(p: &[u64]) -> Option<usize> {
    p.iter()
        .rposition(|&w| w != 0)
        .map(|i| i * 64 + 63 - p[i].leading_zeros() as usize)
}

#[inline]
pub fn clmul64(a: u64, b: u64) -> (u64, u64) {
    let mut lo = 0u64;
    let mut hi = 0u64;
    for i in 0..64 {
        // Branch-free select of `a << i` when bit i of b is set.
        let mask = 0u64.wrapping_sub((b >> i) & 1);
        lo ^= (a << i) & mask;
        if i != 0 {
            hi ^= (a >> (64 - i)) & mask;
        }
    }
    (lo, hi)
}

/// Full product of two polynomials; result has `a.len() + b.len()` limbs.
pub fn mul(a: &[u64], b: &[u64], backend: MulBackend) -> Vec<u64> {
    match backend {
        MulBackend::Schoolbook => mul_portable(a, b),
        MulBackend::Hardware => {
            #[cfg(target_arch = "x86_64")]
            {
                if MulBackend::hardware_available() {
                    // SAFETY: the pclmulqdq feature was detected at runtime.
                    return unsafe { mul_pclmul(a, b) };
                }
            }
            mul_portable(a, b)
        }
    }
}

fn mul_portable(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let (lo, hi) = clmul64(x, y);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
    out
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn mul_pclmul(a: &[u64], b: &[u64]) -> Vec<u64> {
    use std::arch::x86_64::{__m128i, _mm_clmulepi64_si128, _mm_set_epi64x, _mm_storeu_si128};
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let xv = _mm_set_epi64x(0, x as i64);
        for (j, &y) in b.iter().enumerate() {
            let r = _mm_clmulepi64_si128(xv, _mm_set_epi64x(0, y as i64), 0);
            let mut words = [0u64; 2];
            _mm_storeu_si128(words.as_mut_ptr() as *mut __m128i, r);
            out[i + j] ^= words[0];
            out[i + j + 1] ^= words[1];
        }
    }
    out
}

/// `p^2`, which in characteristic two just spreads the bits.
pub fn square(p: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 2 * p.len()];
    for (i, &w) in p.iter().enumerate() {
        out[2 * i] = spread32(w as u32);
        out[2 * i + 1] = spread32((w >> 32) as u32);
    }
    out
}

fn spread32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

/// Reducer for a fixed monic modulus of degree `l >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reducer {
    degree: usize,
    modulus: Vec<u64>,
    /// Exponents of the modulus below `x^l`, descending.
    tail: Vec<usize>,
}

impl Reducer {
    /// `modulus` must have its top set bit at position `l`.
    pub fn new(modulus: &[u64]) -> Self {
        let degree = degree(modulus).expect("nonzero modulus");
        let tail = (0..degree).rev().filter(|&e| (modulus[e / 64] >> (e % 64)) & 1 == 1).collect();
        Self { degree, modulus: modulus[..limbs_for(degree + 1)].to_vec(), tail }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Remainder modulo the modulus, as `limbs_for(l)` limbs.
    pub fn reduce(&self, mut p: Vec<u64>) -> Vec<u64> {
        let l = self.degree;
        let tail_top = self.tail.first().copied().unwrap_or(0);
        if 2 * tail_top <= l {
            // Sparse tail: fold x^l = tail in rounds; each round drops the
            // degree by at least l - tail_top >= l/2.
            while let Some(d) = degree(&p) {
                if d < l {
                    break;
                }
                let hi = shr(&p, l, d + 1 - l);
                clear_from(&mut p, l);
                for &e in &self.tail {
                    xor_shifted_into(&mut p, &hi, e);
                }
            }
        } else if let Some(d) = degree(&p) {
            for i in (l..=d).rev() {
                if (p[i / 64] >> (i % 64)) & 1 == 1 {
                    xor_shifted_into(&mut p, &self.modulus, i - l);
                }
            }
        }
        p.resize(limbs_for(l), 0);
        p
    }

    pub fn mul_mod(&self, a: &[u64], b: &[u64], backend: MulBackend) -> Vec<u64> {
        self.reduce(mul(a, b, backend))
    }

    pub fn square_mod(&self, a: &[u64]) -> Vec<u64> {
        self.reduce(square(a))
    }
}

/// Bits `[shift, shift + len)` of `p`.
fn shr(p: &[u64], shift: usize, len: usize) -> Vec<u64> {
    let word = shift / 64;
    let bit = shift % 64;
    let mut out = vec![0u64; limbs_for(len)];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = p.get(word + i).copied().unwrap_or(0);
        let hi = p.get(word + i + 1).copied().unwrap_or(0);
        *o = if bit == 0 { lo } else { (lo >> bit) | (hi << (64 - bit)) };
    }
    let rem = len % 64;
    if rem != 0 {
        if let Some(last) = out.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
    out
}

fn clear_from(p: &mut [u64], bit: usize) {
    let word = bit / 64;
    if word >= p.len() {
        return;
    }
    let rem = bit % 64;
    p[word] &= if rem == 0 { 0 } else { (1u64 << rem) - 1 };
    for w in &mut p[word + 1..] {
        *w = 0;
    }
}

/// Greatest common divisor by repeated remainder.
pub fn gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while degree(&b).is_some() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Remainder of `a` divided by nonzero `b`.
pub fn rem(a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = degree(b).expect("division by zero polynomial");
    let mut a = a.to_vec();
    while let Some(da) = degree(&a) {
        if da < db {
            break;
        }
        xor_shifted_into(&mut a, b, da - db);
    }
    a
}

/// Irreducibility of a polynomial of degree `l <= 32` by trial division over
/// every candidate factor of degree `1..=l/2`.
pub fn is_irreducible_trial(f: u64) -> bool {
    let l = match degree(&[f]) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    for d in 1..=l / 2 {
        for g in (1u64 << d)..(1u64 << (d + 1)) {
            if rem_u64(f, g) == 0 {
                return false;
            }
        }
    }
    true
}

fn rem_u64(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= db {
        a ^= b << (63 - a.leading_zeros() - db);
    }
    a
}

/// Rabin's test: `f` of degree `l` is irreducible iff `x^(2^l) = x mod f` and
/// `gcd(x^(2^(l/q)) - x, f) = 1` for every prime `q | l`.
pub fn is_irreducible_rabin(f: &[u64]) -> bool {
    let l = match degree(f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let red = Reducer::new(f);
    // `x mod f`; for l = 1 this is the constant term of f.
    let mut v = vec![0u64; limbs_for(l + 1)];
    v[0] = 2;
    let x = red.reduce(v);
    let frob = |times: usize| -> Vec<u64> {
        let mut acc = x.clone();
        for _ in 0..times {
            acc = red.square_mod(&acc);
        }
        acc
    };
    let full = frob(l);
    if full != x {
        return false;
    }
    for q in prime_factors(l) {
        let mut diff = frob(l / q);
        for (d, s) in diff.iter_mut().zip(&x) {
            *d ^= s;
        }
        let g = gcd(f, &diff);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
