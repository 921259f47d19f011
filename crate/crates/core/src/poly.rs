//! Dense univariate polynomials over arbitrary-precision integers.
//!
//! These carry every density and trace polynomial in the variable
//! `T = q^{-2s}`. The zero polynomial is the empty coefficient list; all
//! constructors and operations strip trailing zeros so that
//! `degree == coeffs.len() - 1` holds for nonzero polynomials.

use crate::rational::Rational;
use crate::{Error, Guards, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in `T` with `BigInt` coefficients, `coeffs[i]` the coefficient
/// of `T^i`. Trailing zeros are forbidden; zero is the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Build from raw coefficients (low to high), normalizing.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// Build from `i64` coefficients (low to high).
    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial `c * T^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial (degree `-∞`).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `T^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Returns `self(T^k)`; coefficient of `T^{ki}` is the old coefficient
    /// of `T^i`. Requires `k >= 1`.
    pub fn substitute_power(&self, k: usize) -> IntPoly {
        assert!(k >= 1, "substitute_power requires k >= 1");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        IntPoly { coeffs: out }
    }

    /// Exact Horner evaluation at a rational point.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rational::from(c.clone());
        }
        acc
    }

    /// Evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `(eta T)^ell * self(1/T)` for `eta = ±1`: coefficient `i` of the result
    /// is `eta^ell * coeff(ell - i)`. Errors when `degree > ell`.
    pub fn reverse_with_sign(&self, ell: usize, eta: i8) -> Result<IntPoly> {
        assert!(eta == 1 || eta == -1, "eta must be ±1");
        if let Some(d) = self.degree() {
            if d > ell {
                return Err(Error::DegreeExceedsLength {
                    degree: d as i64,
                    length: ell,
                });
            }
        }
        let sign = if eta == -1 && ell % 2 == 1 { -1 } else { 1 };
        let mut out = vec![BigInt::zero(); ell + 1];
        for i in 0..=ell {
            let c = self.coeff(ell - i);
            out[i] = if sign == 1 { c } else { -c };
        }
        Ok(IntPoly::new(out))
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        IntPoly::new(out)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = if first {
                c.clone()
            } else {
                c.abs()
            };
            match i {
                0 => write!(f, "{}", a)?,
                1 if a.is_one() => write!(f, "T")?,
                1 => write!(f, "{}*T", a)?,
                _ if a.is_one() => write!(f, "T^{}", i)?,
                _ => write!(f, "{}*T^{}", a, i)?,
            }
        }
        Ok(())
    }
}

/// Gaussian binomial coefficient: the number of `j`-dimensional subspaces of
/// `F_q^t`, computed as the exact product
/// `∏_{i=0}^{j-1} (q^{t-i} - 1) / (q^{j-i} - 1)`.
pub fn gauss_binomial(t: usize, j: usize, q: u64) -> Result<BigInt> {
    if j > t {
        return Err(Error::IndexOutOfRange(format!(
            "gauss_binomial: j = {} exceeds t = {}",
            j, t
        )));
    }
    assert!(q >= 2, "gauss_binomial requires q >= 2");
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j {
        num *= q.pow((t - i) as u32) - 1;
        den *= q.pow((j - i) as u32) - 1;
    }
    let (quot, rem) = num_integer::Integer::div_rem(&num, &den);
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// The exact `r`-th central derivative rule for exponential sums: given
/// coefficients `c_i` of a polynomial in `T = q^{-2s}` of degree at most `d`,
/// returns `Σ_i c_i (d - 2i)^r`, which is
/// `(1/(log q)^r) (d/ds)^r |_{s=0}` of `q^{ds} Σ c_i q^{-2is}`.
///
/// `d` is taken explicitly so that truncated inputs with `degree > d` are
/// rejected rather than silently re-centered.
pub fn central_derivative(p: &IntPoly, d: usize, r: usize) -> Result<BigInt> {
    if let Some(deg) = p.degree() {
        if deg > d {
            return Err(Error::DegreeExceedsLength {
                degree: deg as i64,
                length: d,
            });
        }
    }
    let mut total = BigInt::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        let base = BigInt::from(d as i64 - 2 * i as i64);
        total += c * base.pow(r as u32);
    }
    Ok(total)
}

/// All partitions of every size `<= max_size`, each exactly once.
/// Guarded by [`Guards::max_partition_size`].
pub fn enumerate_partitions(max_size: usize, guards: &Guards) -> Result<Vec<crate::Partition>> {
    if max_size > guards.max_partition_size {
        return Err(Error::GuardExceeded(format!(
            "partition size {} exceeds guard {}",
            max_size, guards.max_partition_size
        )));
    }
    let mut all = Vec::new();
    for n in 0..=max_size {
        let mut current = Vec::new();
        gen_partitions(n, n, &mut current, &mut all);
    }
    Ok(all)
}

fn gen_partitions(
    remaining: usize,
    max_part: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<crate::Partition>,
) {
    if remaining == 0 {
        out.push(crate::Partition::new(current.clone()).expect("descending by construction"));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part as u32);
        gen_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn ring_identities() {
        // (1 - T)(1 + T) = 1 - T^2
        assert_eq!(&p(&[1, -1]) * &p(&[1, 1]), p(&[1, 0, -1]));
        // p + 0 = p
        let q = p(&[3, 0, 5]);
        assert_eq!(&q + &IntPoly::zero(), q);
        // (1 - T)(1 + 2T) = 1 + T - 2T^2, by hand long multiplication.
        assert_eq!(&p(&[1, -1]) * &p(&[1, 2]), p(&[1, 1, -2]));
    }

    #[test]
    fn normalization_strips_trailing_zeros() {
        let q = &p(&[1, 1]) - &p(&[0, 1]);
        assert_eq!(q, IntPoly::one());
        assert_eq!(q.degree(), Some(0));
        assert_eq!((&p(&[1]) - &p(&[1])).degree(), None);
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(p(&[1, 1]).substitute_power(2), p(&[1, 0, 1]));
        assert_eq!(
            p(&[1, -1, 1]).substitute_power(3),
            p(&[1, 0, 0, -1, 0, 0, 1])
        );
        assert_eq!(IntPoly::zero().substitute_power(5), IntPoly::zero());
    }

    #[test]
    fn eval_rational_examples() {
        assert_eq!(p(&[1, -1]).eval_rational(&rat(1, 1)), rat(0, 1));
        assert_eq!(p(&[1, 1]).eval_rational(&rat(1, 3)), rat(4, 3));
        // 1 + 1/3 + 1/9 = 13/9 at T = -1/3 for 1 - T + T^2.
        assert_eq!(p(&[1, -1, 1]).eval_rational(&rat(-1, 3)), rat(13, 9));
    }

    #[test]
    fn reverse_with_sign_examples() {
        // (-T)^1 (1 - 1/T) = 1 - T.
        assert_eq!(p(&[1, -1]).reverse_with_sign(1, -1).unwrap(), p(&[1, -1]));
        assert_eq!(p(&[1, 1]).reverse_with_sign(1, 1).unwrap(), p(&[1, 1]));
        assert_eq!(p(&[1]).reverse_with_sign(2, -1).unwrap(), p(&[0, 0, 1]));
        assert!(matches!(
            p(&[1, 1, 1]).reverse_with_sign(1, 1),
            Err(Error::DegreeExceedsLength { .. })
        ));
    }

    /// Brute-force count of j-dimensional subspaces of F_q^t: enumerate
    /// reduced row echelon shapes by pivot-column subsets and count the free
    /// entries of each shape. Independent of the product formula used by
    /// `gauss_binomial`.
    fn count_subspaces_rref(t: usize, j: usize, q: u64) -> u64 {
        fn subsets(t: usize, j: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == j {
                out.push(cur.clone());
                return;
            }
            for i in start..t {
                cur.push(i);
                subsets(t, j, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut pivot_sets = Vec::new();
        subsets(t, j, 0, &mut Vec::new(), &mut pivot_sets);
        let mut total = 0u64;
        for pivots in pivot_sets {
            // A non-pivot column is free in every pivot row whose pivot
            // column lies to its left.
            let mut free = 0usize;
            for c in 0..t {
                if !pivots.contains(&c) {
                    free += pivots.iter().filter(|&&p| p < c).count();
                }
            }
            total += q.pow(free as u32);
        }
        total
    }

    #[test]
    fn gauss_binomial_examples() {
        // Lines in F_2^2: {e1, e2, e1+e2} spans -> 3.
        assert_eq!(gauss_binomial(2, 1, 2).unwrap(), BigInt::from(3));
        assert_eq!(gauss_binomial(5, 0, 7).unwrap(), BigInt::from(1));
        // Frozen from the RREF enumeration oracle below.
        assert_eq!(gauss_binomial(4, 2, 3).unwrap(), BigInt::from(130));
        assert_eq!(count_subspaces_rref(4, 2, 3), 130);
        assert_eq!(count_subspaces_rref(2, 1, 2), 3);
        assert!(gauss_binomial(2, 3, 2).is_err());
    }

    #[test]
    fn gauss_binomial_symmetry() {
        for q in [2u64, 3, 4, 5] {
            for t in 0..=8usize {
                for j in 0..=t {
                    assert_eq!(
                        gauss_binomial(t, j, q).unwrap(),
                        gauss_binomial(t, t - j, q).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn central_derivative_examples() {
        assert_eq!(
            central_derivative(&p(&[1, -1]), 1, 1).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            central_derivative(&p(&[1, -1, 1]), 2, 1).unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            central_derivative(&p(&[1, -1, 1]), 2, 2).unwrap(),
            BigInt::from(8)
        );
        assert!(central_derivative(&p(&[1, 1, 1]), 1, 1).is_err());
    }

    #[test]
    fn central_derivative_r0_is_eval_at_one() {
        let q = p(&[4, -7, 2, 9]);
        assert_eq!(
            Rational::from(central_derivative(&q, 5, 0).unwrap()),
            q.eval_rational(&rat(1, 1))
        );
    }

    /// Order-6 central finite-difference stencils for derivatives 1..=4.
    fn finite_difference(f: impl Fn(f64) -> f64 + Copy, r: usize, h: f64) -> f64 {
        // Coefficients of f(kh), k = -4..=4, for the r-th derivative with
        // O(h^6) accuracy (standard central stencils).
        let w: [[f64; 9]; 4] = [
            [
                1.0 / 60.0, -3.0 / 20.0, 3.0 / 4.0, 0.0, -3.0 / 4.0, 3.0 / 20.0, -1.0 / 60.0, 0.0, 0.0,
            ],
            [
                1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0, 0.0, 0.0,
            ],
            [
                -7.0 / 240.0, 3.0 / 10.0, -169.0 / 120.0, 61.0 / 30.0, 0.0, -61.0 / 30.0, 169.0 / 120.0,
                -3.0 / 10.0, 7.0 / 240.0,
            ],
            [
                7.0 / 240.0, -2.0 / 5.0, 169.0 / 60.0, -122.0 / 15.0, 91.0 / 8.0, -122.0 / 15.0, 169.0 / 60.0,
                -2.0 / 5.0, 7.0 / 240.0,
            ],
        ];
        match r {
            1 => {
                let c = &w[0];
                (c[0] * f(3.0 * h) + c[1] * f(2.0 * h) + c[2] * f(h) + c[4] * f(-h)
                    + c[5] * f(-2.0 * h)
                    + c[6] * f(-3.0 * h))
                    / h
            }
            2 => {
                let c = &w[1];
                (c[0] * f(-3.0 * h)
                    + c[1] * f(-2.0 * h)
                    + c[2] * f(-h)
                    + c[3] * f(0.0)
                    + c[4] * f(h)
                    + c[5] * f(2.0 * h)
                    + c[6] * f(3.0 * h))
                    / (h * h)
            }
            3 => {
                let c = &w[2];
                (0..9).map(|k| c[k] * f((k as f64 - 4.0) * h)).sum::<f64>() / (h * h * h)
            }
            4 => {
                let c = &w[3];
                (0..9).map(|k| c[k] * f((k as f64 - 4.0) * h)).sum::<f64>() / (h * h * h * h)
            }
            _ => unreachable!(),
        }
    }

    /// Numeric cross-check of the exponential-sum derivative rule: the exact
    /// integer Σ c_i (d-2i)^r must match the r-th finite difference of
    /// s ↦ Σ c_i B^{(d-2i)s} at s = 0, divided by (ln B)^r, for B = 2.
    #[test]
    fn central_derivative_matches_finite_differences() {
        use num_traits::ToPrimitive;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        let b: f64 = 2.0;
        for _case in 0..40 {
            let d = (next() % 7) as usize; // d <= 6
            let len = (next() % (d as u64 + 2)) as usize; // degree <= d
            let coeffs: Vec<i64> = (0..=len.min(d))
                .map(|_| (next() % 19) as i64 - 9)
                .collect();
            let poly = IntPoly::from_i64(&coeffs);
            for r in 1..=4usize {
                let exact = central_derivative(&poly, d, r).unwrap().to_f64().unwrap();
                let f = |s: f64| -> f64 {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| c as f64 * b.powf((d as f64 - 2.0 * i as f64) * s))
                        .sum()
                };
                // Richardson extrapolation of the order-6 stencils to kill
                // the leading truncation term.
                let h = 0.02;
                let coarse = finite_difference(&f, r, h);
                let fine = finite_difference(&f, r, h / 2.0);
                let numeric = (64.0 * fine - coarse) / 63.0 / b.ln().powi(r as i32);
                // Relative to the natural magnitude of the sum's terms, so
                // exact zeros (cancellation) are still checked meaningfully.
                let scale: f64 = coeffs
                    .iter()
                    .map(|&c| (c as f64).abs() * (d.max(1) as f64).powi(r as i32))
                    .sum();
                let tol = 1e-6 * scale.max(1.0).max(exact.abs());
                assert!(
                    (numeric - exact).abs() <= tol,
                    "r={} d={} coeffs={:?}: numeric {} vs exact {}",
                    r,
                    d,
                    coeffs,
                    numeric,
                    exact
                );
            }
        }
    }

    #[test]
    fn partitions_examples() {
        let g = Guards::default();
        let p0 = enumerate_partitions(0, &g).unwrap();
        assert_eq!(p0.len(), 1);
        assert!(p0[0].parts().is_empty());
        let p2 = enumerate_partitions(2, &g).unwrap();
        assert_eq!(p2.len(), 4); // (), (1), (2), (1,1)
        let p4 = enumerate_partitions(4, &g).unwrap();
        assert_eq!(p4.len(), 12); // p(0..4) = 1,1,2,3,5
        assert!(enumerate_partitions(13, &g).is_err());
    }

    proptest! {
        #[test]
        fn reverse_is_involutive(coeffs in prop::collection::vec(-50i64..50, 0..6), pad in 0usize..3) {
            let q = IntPoly::from_i64(&coeffs);
            let ell = q.degree().map_or(0, |d| d + pad);
            for eta in [1i8, -1] {
                let r = q.reverse_with_sign(ell, eta).unwrap();
                prop_assert_eq!(r.reverse_with_sign(ell, eta).unwrap(), q.clone());
            }
        }

        #[test]
        fn central_derivative_is_linear(
            a in prop::collection::vec(-30i64..30, 0..5),
            b in prop::collection::vec(-30i64..30, 0..5),
            r in 0usize..4,
        ) {
            let pa = IntPoly::from_i64(&a);
            let pb = IntPoly::from_i64(&b);
            let d = 6usize;
            let lhs = central_derivative(&(&pa + &pb), d, r).unwrap();
            let rhs = central_derivative(&pa, d, r).unwrap() + central_derivative(&pb, d, r).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mul_commutes_and_distributes(
            a in prop::collection::vec(-20i64..20, 0..5),
            b in prop::collection::vec(-20i64..20, 0..5),
            c in prop::collection::vec(-20i64..20, 0..5),
        ) {
            let (pa, pb, pc) = (IntPoly::from_i64(&a), IntPoly::from_i64(&b), IntPoly::from_i64(&c));
            prop_assert_eq!(&pa * &pb, &pb * &pa);
            prop_assert_eq!(&pa * &(&pb + &pc), &(&pa * &pb) + &(&pa * &pc));
        }
    }
}
