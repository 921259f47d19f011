//! Frobenius trace polynomials of the Springer-type sheaves.
//!
//! Everything the sheaf theory contributes computationally reduces to a few
//! closed products and the identities between them:
//!
//! * the coherent trace `∏_{i=0}^{t-1} (1 - q_v^i T^{deg v})`, equal to the
//!   alternating Grassmannian sum `Σ_j (-1)^j q^{j(j-1)/2} #Gr(j, t) T^j` by
//!   the q-binomial theorem;
//! * the Hermitian trace `∏_{j=0}^{t'-1} (1 - (η(ϖ_v) q_v)^j T^{deg v})`,
//!   which at an inert place is the coherent product with `q -> -q`;
//! * the Steinberg scalar `ε(Q) ∏_v q_v^{d_v(d_v-1)/2}` on semisimple data,
//!   `ε(Q)` the sign of Frobenius permuting the geometric support.

use crate::density::{GlobalHermDatum, PlaceKind};
use crate::poly::{gauss_binomial, IntPoly};
use crate::{Error, Guards, Result};
use num_bigint::BigInt;
use num_traits::One;

/// `∏_{i=0}^{t-1} (1 - q_v^i T^{deg v})`: the coherent-side trace polynomial
/// of a local torsion sheaf of type `t = dim Q[ϖ]`.
pub fn p_coh_place(t: usize, q_v: u64, deg_v: usize) -> IntPoly {
    let mut acc = IntPoly::one();
    let mut power = BigInt::one();
    for _ in 0..t {
        let factor = IntPoly::new(vec![BigInt::one(), -&power]);
        acc = &acc * &factor;
        power *= q_v;
    }
    acc.substitute_power(deg_v)
}

/// The Grassmannian sum `Σ_{j=0}^t (-1)^j q^{j(j-1)/2} #Gr(j, t)(F_q) T^j`,
/// identically equal to [`p_coh_place`] at degree one.
pub fn p_coh_grassmann_sum(t: usize, q: u64, guards: &Guards) -> Result<IntPoly> {
    if t > guards.max_partition_size {
        return Err(Error::GuardExceeded(format!(
            "Grassmannian sum guard exceeded at t = {}",
            t
        )));
    }
    let mut coeffs = Vec::with_capacity(t + 1);
    let q_big = BigInt::from(q);
    for j in 0..=t {
        let mut c = gauss_binomial(t, j, q)?;
        c *= q_big.pow((j * (j.max(1) - 1) / 2) as u32);
        if j % 2 == 1 {
            c = -c;
        }
        coeffs.push(c);
    }
    Ok(IntPoly::new(coeffs))
}

/// `∏_{j=0}^{t'-1} (1 - (η(ϖ_v) q_v)^j T^{deg v})`: the Hermitian-side trace
/// polynomial.
pub fn p_herm_place(t_prime: usize, kind: PlaceKind, q_v: u64, deg_v: usize) -> IntPoly {
    let base = match kind {
        PlaceKind::Inert => -BigInt::from(q_v),
        PlaceKind::Split => BigInt::from(q_v),
    };
    let mut acc = IntPoly::one();
    let mut power = BigInt::one();
    for _ in 0..t_prime {
        let factor = IntPoly::new(vec![BigInt::one(), -&power]);
        acc = &acc * &factor;
        power *= &base;
    }
    acc.substitute_power(deg_v)
}

/// At an inert place the Hermitian trace is the coherent trace with
/// `q_v -> -q_v`; checked by formal substitution into the product.
pub fn inert_sign_twist_check(t: usize, q_v: u64, deg_v: usize) -> bool {
    let herm = p_herm_place(t, PlaceKind::Inert, q_v, deg_v);
    let mut twisted = IntPoly::one();
    let mut power = BigInt::one();
    for _ in 0..t {
        let factor = IntPoly::new(vec![BigInt::one(), -&power]);
        twisted = &twisted * &factor;
        power *= -BigInt::from(q_v);
    }
    herm == twisted.substitute_power(deg_v)
}

/// Global Hermitian trace polynomial: product over places of
/// `p_herm_place(numParts(λ_v), kind_v, q_v, deg v)`.
pub fn p_global(datum: &GlobalHermDatum) -> IntPoly {
    let mut acc = IntPoly::one();
    for place in &datum.places {
        acc = &acc
            * &p_herm_place(
                place.lambda.num_parts(),
                place.kind,
                datum.q_v(place),
                place.deg_v,
            );
    }
    acc
}

/// Frobenius scalar on the Steinberg stalk of a semisimple datum (every
/// `λ_v = (1, ..., 1)`): `ε(Q) ∏_v q_v^{d_v (d_v - 1)/2}` where
/// `ε(Q) = ∏_v (-1)^{(deg v - 1) d_v}` is the sign of Frobenius permuting
/// the geometric points with multiplicity. Non-semisimple data are rejected
/// (the stalk is zero there, which is an error, not a value).
pub fn steinberg_trace(datum: &GlobalHermDatum) -> Result<BigInt> {
    let mut total = BigInt::one();
    for place in &datum.places {
        if place.lambda.parts().iter().any(|&p| p != 1) {
            return Err(Error::NotSemisimple);
        }
        let d_v = place.lambda.num_parts();
        let q_v = BigInt::from(datum.q_v(place));
        total *= q_v.pow((d_v * (d_v.max(1) - 1) / 2) as u32);
        if (place.deg_v - 1) * d_v % 2 == 1 {
            total = -total;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{m_poly, PlaceDatum};
    use crate::partition::Partition;

    fn poly(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn p_coh_examples() {
        assert_eq!(p_coh_place(0, 5, 1), IntPoly::one());
        assert_eq!(p_coh_place(2, 2, 1), poly(&[1, -3, 2]));
        assert_eq!(p_coh_place(1, 9, 2), poly(&[1, 0, -1]));
    }

    #[test]
    fn grassmann_sum_examples() {
        let g = Guards::default();
        assert_eq!(p_coh_grassmann_sum(2, 2, &g).unwrap(), poly(&[1, -3, 2]));
        assert_eq!(
            p_coh_grassmann_sum(3, 3, &g).unwrap(),
            poly(&[1, -13, 39, -27])
        );
        assert_eq!(p_coh_grassmann_sum(0, 7, &g).unwrap(), IntPoly::one());
    }

    #[test]
    fn q_binomial_theorem_identity() {
        let g = Guards::default();
        for q in [2u64, 3, 4, 5, 7] {
            for t in 0..=8usize {
                assert_eq!(
                    p_coh_grassmann_sum(t, q, &g).unwrap(),
                    p_coh_place(t, q, 1),
                    "t={} q={}",
                    t,
                    q
                );
            }
        }
    }

    #[test]
    fn p_herm_examples() {
        assert_eq!(
            p_herm_place(2, PlaceKind::Inert, 3, 1),
            &poly(&[1, -1]) * &poly(&[1, 3])
        );
        assert_eq!(
            p_herm_place(2, PlaceKind::Split, 3, 1),
            &poly(&[1, -1]) * &poly(&[1, -3])
        );
        assert_eq!(p_herm_place(0, PlaceKind::Inert, 3, 1), IntPoly::one());
        // The split Hermitian trace equals the coherent one.
        for t in 0..=6 {
            assert_eq!(
                p_herm_place(t, PlaceKind::Split, 4, 2),
                p_coh_place(t, 4, 2)
            );
        }
    }

    #[test]
    fn inert_sign_twist_examples() {
        assert!(inert_sign_twist_check(2, 3, 1));
        assert!(inert_sign_twist_check(3, 2, 1));
        assert!(inert_sign_twist_check(0, 5, 1));
        for q_v in [2u64, 3, 4, 5, 9] {
            for t in 0..=6 {
                assert!(inert_sign_twist_check(t, q_v, 1));
                assert!(inert_sign_twist_check(t, q_v, 2));
            }
        }
    }

    #[test]
    fn p_global_examples_and_m_poly_identity() {
        let datum = GlobalHermDatum::new(3, 2, vec![]).unwrap();
        assert_eq!(p_global(&datum), IntPoly::one());

        let split11 = GlobalHermDatum::new(
            3,
            2,
            vec![PlaceDatum::new(1, PlaceKind::Split, part(&[1, 1])).unwrap()],
        )
        .unwrap();
        assert_eq!(p_global(&split11), &poly(&[1, -1]) * &poly(&[1, -3]));

        let inert31 = GlobalHermDatum::new(
            3,
            2,
            vec![PlaceDatum::new(1, PlaceKind::Inert, part(&[3, 1])).unwrap()],
        )
        .unwrap();
        assert_eq!(p_global(&inert31), &poly(&[1, -1]) * &poly(&[1, 3]));

        // Structural identity: p_global = ∏_v 𝔪(numParts λ_v; T)(T^{deg v})
        // on a deterministic sample of data.
        let lambdas = [part(&[1]), part(&[2, 1]), part(&[1, 1]), part(&[3, 2, 1])];
        let mut idx = 0usize;
        for q in [3u64, 5] {
            for kinds in [
                [PlaceKind::Inert, PlaceKind::Split],
                [PlaceKind::Split, PlaceKind::Split],
                [PlaceKind::Inert, PlaceKind::Inert],
            ] {
                for degs in [[1usize, 2], [2, 3], [1, 1]] {
                    let places: Vec<PlaceDatum> = (0..2)
                        .map(|i| {
                            idx += 1;
                            PlaceDatum::new(
                                degs[i],
                                kinds[i],
                                lambdas[(idx + i) % lambdas.len()].clone(),
                            )
                            .unwrap()
                        })
                        .collect();
                    let datum = GlobalHermDatum::new(q, 3, places).unwrap();
                    let expect = datum.places.iter().fold(IntPoly::one(), |acc, p| {
                        &acc * &m_poly(p.lambda.num_parts(), p.kind, datum.q_v(p))
                            .substitute_power(p.deg_v)
                    });
                    assert_eq!(p_global(&datum), expect);
                }
            }
        }
    }

    #[test]
    fn steinberg_examples() {
        let one_place = GlobalHermDatum::new(
            3,
            2,
            vec![PlaceDatum::new(1, PlaceKind::Inert, part(&[1, 1])).unwrap()],
        )
        .unwrap();
        assert_eq!(steinberg_trace(&one_place).unwrap(), BigInt::from(3));

        let deg2 = GlobalHermDatum::new(
            3,
            1,
            vec![PlaceDatum::new(2, PlaceKind::Split, part(&[1])).unwrap()],
        )
        .unwrap();
        assert_eq!(steinberg_trace(&deg2).unwrap(), BigInt::from(-1));

        let empty = GlobalHermDatum::new(3, 1, vec![]).unwrap();
        assert_eq!(steinberg_trace(&empty).unwrap(), BigInt::one());

        let bad = GlobalHermDatum::new(
            3,
            2,
            vec![PlaceDatum::new(1, PlaceKind::Inert, part(&[2])).unwrap()],
        )
        .unwrap();
        assert!(matches!(steinberg_trace(&bad), Err(Error::NotSemisimple)));
    }
}
