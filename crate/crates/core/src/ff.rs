//! Finite fields `F_{p^e}` with table-driven arithmetic.
//!
//! Elements are indices `0..p^e`; the index encodes the coefficient vector of
//! the element in the basis `1, x, .., x^{e-1}` (little-endian base `p`). The
//! defining modulus is the lexicographically smallest monic irreducible
//! polynomial of degree `e` over `F_p` (ordered by the little-endian integer
//! code of the non-leading coefficients), verified irreducible at
//! construction by exhaustive trial division.

use crate::{Error, Guards, Result};
use std::sync::Arc;

/// A concrete finite field `F_{p^e}` with precomputed operation tables.
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    /// Monic modulus, coefficients low to high, length `e + 1`.
    pub modulus: Vec<u64>,
    size: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldSpec(F_{}^{})", self.p, self.e)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiply two polynomials over F_p (dense, low-to-high), reduce mod `m`.
fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let e = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // Reduce: x^e = -(m_0 + m_1 x + ... + m_{e-1} x^{e-1}) since m is monic.
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for j in 0..e {
            let sub = (c * m[j]) % p;
            prod[k - e + j] = (prod[k - e + j] + p - sub) % p;
        }
    }
    prod.truncate(e.max(1));
    prod
}

/// Test whether a monic polynomial over F_p has a monic divisor of degree in
/// `1..=deg/2` (exhaustive trial division).
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    if deg == 1 {
        return true;
    }
    for ddeg in 1..=deg / 2 {
        // All monic polynomials of degree ddeg: codes over the low coefficients.
        let count = p.pow(ddeg as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(ddeg + 1);
            let mut c = code;
            for _ in 0..ddeg {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            if poly_divides(&div, m, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(div: &[u64], m: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = m.to_vec();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        let k = rem.len() - 1 - dd;
        if lead != 0 {
            for j in 0..=dd {
                let sub = (lead * div[j]) % p;
                rem[k + j] = (rem[k + j] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

impl FieldSpec {
    /// Construct `F_{p^e}` with the default modulus. `p` must be prime; the
    /// total size must respect [`Guards::max_field_size`]. Trial division is
    /// exhaustive, which caps `e` at 6 for practicality.
    pub fn new(p: u64, e: u32, guards: &Guards) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{} is not prime", p)));
        }
        if e == 0 || e > 6 {
            return Err(Error::GuardExceeded(format!(
                "extension degree {} outside supported range 1..=6",
                e
            )));
        }
        let size = p.checked_pow(e).filter(|&s| s <= guards.max_field_size);
        let size = match size {
            Some(s) => s as usize,
            None => {
                return Err(Error::GuardExceeded(format!(
                    "field size {}^{} exceeds guard {}",
                    p, e, guards.max_field_size
                )))
            }
        };

        // Lexicographically smallest monic irreducible of degree e: scan
        // little-endian coefficient codes in increasing order.
        let mut modulus = None;
        for code in 0..p.pow(e) {
            let mut m = Vec::with_capacity(e as usize + 1);
            let mut c = code;
            for _ in 0..e {
                m.push(c % p);
                c /= p;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                modulus = Some(m);
                break;
            }
        }
        let modulus = modulus.expect("an irreducible polynomial of each degree exists");

        let decode = |idx: usize| -> Vec<u64> {
            let mut v = Vec::with_capacity(e as usize);
            let mut c = idx as u64;
            for _ in 0..e {
                v.push(c % p);
                c /= p;
            }
            v
        };
        let encode = |v: &[u64]| -> usize {
            let mut idx = 0u64;
            for &c in v.iter().rev() {
                idx = idx * p + c;
            }
            idx as usize
        };

        let mut add = vec![0u16; size * size];
        let mut mul = vec![0u16; size * size];
        let mut neg = vec![0u16; size];
        for a in 0..size {
            let va = decode(a);
            let vneg: Vec<u64> = va.iter().map(|&c| (p - c) % p).collect();
            neg[a] = encode(&vneg) as u16;
            for b in 0..size {
                let vb = decode(b);
                let vsum: Vec<u64> = va.iter().zip(&vb).map(|(&x, &y)| (x + y) % p).collect();
                add[a * size + b] = encode(&vsum) as u16;
                let vprod = poly_mulmod(&va, &vb, &modulus, p);
                mul[a * size + b] = encode(&vprod) as u16;
            }
        }
        let mut inv = vec![0u16; size];
        for a in 1..size {
            for b in 1..size {
                if mul[a * size + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
            debug_assert!(inv[a] != 0);
        }
        let mut frob = vec![0u16; size];
        for a in 0..size {
            let mut acc = a;
            for _ in 1..p {
                acc = mul[acc * size + a] as usize;
            }
            frob[a] = acc as u16;
        }

        Ok(Arc::new(FieldSpec {
            p,
            e,
            modulus,
            size,
            add,
            mul,
            neg,
            inv,
            frob,
        }))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    /// The p-power Frobenius `x -> x^p`.
    #[inline]
    pub fn frobenius(&self, a: u16) -> u16 {
        self.frob[a as usize]
    }

    /// `x -> x^{p^k}`, iterated Frobenius.
    #[inline]
    pub fn frobenius_pow(&self, a: u16, k: usize) -> u16 {
        let mut x = a;
        for _ in 0..k % self.e as usize {
            x = self.frobenius(x);
        }
        x
    }

    /// Indices of the subfield fixed by `x -> x^{p^m}` (the image of
    /// `F_{p^m}` when `m | e`).
    pub fn subfield_fixed(&self, m: usize) -> Vec<u16> {
        (0..self.size as u16)
            .filter(|&a| self.frobenius_pow(a, m) == a)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_prime_fields() {
        let g = Guards::default();
        let f3 = FieldSpec::new(3, 1, &g).unwrap();
        assert_eq!(f3.size(), 3);
        assert_eq!(f3.add(2, 2), 1);
        assert_eq!(f3.mul(2, 2), 1);
        assert_eq!(f3.inv(2), 2);
        assert!(FieldSpec::new(4, 1, &g).is_err());
        assert!(FieldSpec::new(3, 9, &g).is_err());
    }

    #[test]
    fn field_axioms_f9_f25() {
        let g = Guards::default();
        for (p, e) in [(3u64, 2u32), (5, 2), (3, 4)] {
            let f = FieldSpec::new(p, e, &g).unwrap();
            let s = f.size() as u16;
            for a in 0..s {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                // Frobenius has order e and fixes F_p.
                assert_eq!(f.frobenius_pow(a, f.e as usize), a);
            }
            // Spot-check associativity and distributivity on a few triples.
            for (a, b, c) in [(1u16, 2, 3), (2, s - 1, 4 % s), (s - 2, s - 1, 1)] {
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }

    #[test]
    fn fixed_subfield_has_right_size() {
        let g = Guards::default();
        let f9 = FieldSpec::new(3, 2, &g).unwrap();
        assert_eq!(f9.subfield_fixed(1).len(), 3);
        let f81 = FieldSpec::new(3, 4, &g).unwrap();
        assert_eq!(f81.subfield_fixed(2).len(), 9);
        let f729 = FieldSpec::new(3, 6, &g).unwrap();
        assert_eq!(f729.subfield_fixed(3).len(), 27);
    }

    #[test]
    fn norm_onto_subfield_f9() {
        // Norm map F_9 -> F_3: x * x^3; surjective onto F_3 with fibers of
        // size 4 over nonzero values.
        let g = Guards::default();
        let f = FieldSpec::new(3, 2, &g).unwrap();
        let mut fibers = std::collections::HashMap::new();
        for a in 0..f.size() as u16 {
            let n = f.mul(a, f.frobenius(a));
            assert_eq!(f.frobenius(n), n, "norm lands in F_3");
            *fibers.entry(n).or_insert(0usize) += 1;
        }
        assert_eq!(fibers.len(), 3);
        for (v, count) in fibers {
            if v == 0 {
                assert_eq!(count, 1);
            } else {
                assert_eq!(count, 4);
            }
        }
    }
}
