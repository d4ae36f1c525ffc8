//! Property suite: the algebraic identities the library is contractually
//! bound to, checked on randomized inputs.  Each block states the identity
//! it enforces; failures shrink to minimal counterexamples.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use isoslope::analysis::companion_check;
use isoslope::exactnum::{charpoly_from_power_sums, power_sums, valuation};
use isoslope::frobdata::{
    dual_charpoly, tensor_charpoly, twist_dataset, wedge_charpoly, DataPoint, FrobeniusDataset,
    GeometryMeta,
};
use isoslope::lfunction::{euler_product, rational_reconstruct, RationalFunction};
use isoslope::newton::NewtonPolygon;
use isoslope::poly::Poly;
use isoslope::{NumberFieldElement, RatPoly, Rational};

fn nfe(n: i64) -> NumberFieldElement {
    NumberFieldElement::integer(n)
}

fn int_poly(coeffs: &[i64]) -> RatPoly {
    Poly::from_coeffs(coeffs.iter().map(|&c| nfe(c)).collect())
}

/// Random reverse characteristic polynomial: constant term one, integer
/// coefficients, exact degree `deg` (nonzero lead).
fn charpoly(deg: usize) -> impl Strategy<Value = RatPoly> {
    (
        prop::collection::vec(-9i64..=9, deg.saturating_sub(1)),
        1i64..=9,
        any::<bool>(),
    )
        .prop_map(move |(mid, lead, neg)| {
            let mut coeffs = vec![1i64];
            coeffs.extend(mid);
            coeffs.push(if neg { -lead } else { lead });
            int_poly(&coeffs)
        })
}

fn charpoly_up_to(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    (1..=max_deg).prop_flat_map(charpoly)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12)
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

/// Small synthetic dataset of rank-2 points with degrees in 1..=3 and
/// distinct ids; claims completeness by fiat (the points listed are, by
/// construction, the whole universe the series identities quantify over).
fn tiny_dataset() -> impl Strategy<Value = FrobeniusDataset> {
    prop::collection::vec((charpoly(2), 1u32..=3), 1..=4).prop_map(|entries| {
        let mut meta = GeometryMeta::new(5, 0, 3, 2);
        meta.complete_through_degree = Some(8);
        let points = entries
            .into_iter()
            .enumerate()
            .map(|(i, (p, deg))| DataPoint::new(format!("pt{i}"), deg, p))
            .collect();
        FrobeniusDataset::new(meta, points).expect("constructed points are valid")
    })
}

proptest! {
    /// v(ab) = v(a) + v(b) at every finite rational place.
    #[test]
    fn valuation_is_additive_on_products(a in rational(), b in rational(), which in 0usize..4) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ell = [2u64, 3, 5, 7][which];
        let product = &a * &b;
        prop_assert_eq!(
            valuation(&product, ell).unwrap(),
            valuation(&a, ell).unwrap() + valuation(&b, ell).unwrap()
        );
    }

    /// Newton's identities round-trip: a polynomial is recovered exactly
    /// from the power sums of its reciprocal roots.
    #[test]
    fn power_sums_determine_the_polynomial(p in charpoly_up_to(4)) {
        let d = p.degree().unwrap();
        let sums = power_sums(&p, d).unwrap();
        let back = charpoly_from_power_sums(&sums, d).unwrap();
        prop_assert_eq!(back, p);
    }

    /// The tensor product of reciprocal-root multisets is commutative.
    #[test]
    fn tensor_commutes(p in charpoly_up_to(3), q in charpoly_up_to(3)) {
        prop_assert_eq!(
            tensor_charpoly(&p, &q).unwrap(),
            tensor_charpoly(&q, &p).unwrap()
        );
    }

    /// 1 - T is the tensor unit: its only reciprocal root is 1.
    #[test]
    fn tensor_unit_is_the_identity(p in charpoly_up_to(4)) {
        prop_assert_eq!(tensor_charpoly(&p, &int_poly(&[1, -1])).unwrap(), p);
    }

    /// Tensoring with 1 - cT scales coefficient i by c^i.
    #[test]
    fn tensor_with_a_line_twists_coefficients(p in charpoly_up_to(4), c in -5i64..=5) {
        prop_assume!(c != 0);
        let twisted = tensor_charpoly(&p, &int_poly(&[1, -c])).unwrap();
        let mut scale = nfe(1);
        for (i, a) in p.coeffs().iter().enumerate() {
            prop_assert_eq!(twisted.coeff(i), a.clone() * scale.clone());
            scale = scale * nfe(c);
        }
    }

    /// Inverting every reciprocal root twice is the identity.
    #[test]
    fn dual_is_an_involution(p in charpoly_up_to(4)) {
        let d = p.degree().unwrap();
        let dual = dual_charpoly(&p, d).unwrap();
        prop_assert_eq!(dual_charpoly(&dual, d).unwrap(), p);
    }

    /// The top exterior power is the determinant line 1 - (-1)^r a_r T.
    #[test]
    fn wedge_top_is_the_determinant(p in charpoly_up_to(4)) {
        let r = p.degree().unwrap();
        let det = if r % 2 == 0 { p.coeff(r) } else { -p.coeff(r) };
        let expected = Poly::from_coeffs(vec![nfe(1), -det]);
        prop_assert_eq!(wedge_charpoly(&p, r).unwrap(), expected);
    }

    /// wedge^s of a rank-r multiset has binomial(r, s) reciprocal roots.
    #[test]
    fn wedge_degrees_are_binomial(p in charpoly_up_to(4), s in 1usize..=4) {
        let r = p.degree().unwrap();
        prop_assume!(s <= r);
        let mut expected = 1usize;
        for i in 0..s.min(r - s) {
            expected = expected * (r - i) / (i + 1);
        }
        if s.min(r - s) == 0 {
            expected = 1;
        }
        prop_assert_eq!(wedge_charpoly(&p, s).unwrap().degree(), Some(expected));
    }

    /// Polygons are convex minorants of their defining points, and their
    /// vertex lists are self-describing.
    #[test]
    fn polygons_are_convex_minorants(
        xs in prop::collection::btree_set(1usize..=8, 1..=5),
        heights in prop::collection::vec(rational(), 5),
    ) {
        let mut points = vec![(0usize, Rational::zero())];
        points.extend(xs.iter().copied().zip(heights.iter().cloned()));
        let polygon = NewtonPolygon::from_points(&points).unwrap();
        prop_assert_eq!(polygon.lies_on_or_above(&polygon).unwrap(), true);
        let rebuilt = NewtonPolygon::from_points(polygon.vertices()).unwrap();
        prop_assert_eq!(&rebuilt, &polygon);
        for (x, v) in &points {
            prop_assert!(polygon.height_at(*x) <= *v);
        }
        let slopes = polygon.slope_multiset();
        prop_assert_eq!(slopes.len(), polygon.width());
        for w in slopes.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    /// Twisting by c then by c' is twisting by cc'.
    #[test]
    fn twists_compose(d in tiny_dataset(), c in -4i64..=4, c2 in -4i64..=4) {
        prop_assume!(c != 0 && c2 != 0);
        let once = twist_dataset(&twist_dataset(&d, &nfe(c)).unwrap(), &nfe(c2)).unwrap();
        let both = twist_dataset(&d, &(nfe(c) * nfe(c2))).unwrap();
        prop_assert_eq!(once, both);
    }

    /// T L'/L recovers the degree-weighted power sums of the points: the
    /// coefficient at T^m is sum over deg(x) | m of deg(x) s_{m/deg(x)}.
    #[test]
    fn log_derivative_counts_points(d in tiny_dataset()) {
        let l = euler_product(&d, 8).unwrap();
        let l_inv = l.inverse().unwrap();
        let ratio = l.derivative().mul(&l_inv);
        for m in 1usize..=7 {
            let mut expected = NumberFieldElement::zero();
            for pt in d.points() {
                let e = pt.degree() as usize;
                if m % e == 0 {
                    let sums = power_sums(pt.poly(), m / e).unwrap();
                    expected = expected + nfe(e as i64) * sums[m / e - 1].clone();
                }
            }
            prop_assert_eq!(ratio.coeff(m - 1), expected);
        }
    }

    /// L-functions multiply over disjoint unions of point sets.
    #[test]
    fn euler_products_multiply_over_disjoint_unions(d in tiny_dataset()) {
        prop_assume!(d.len() >= 2);
        let meta = d.meta().clone();
        let (head, tail) = d.points().split_at(1);
        let a = FrobeniusDataset::new(meta.clone(), head.to_vec()).unwrap();
        let b = FrobeniusDataset::new(meta, tail.to_vec()).unwrap();
        let product = euler_product(&a, 8).unwrap().mul(&euler_product(&b, 8).unwrap());
        prop_assert_eq!(euler_product(&d, 8).unwrap(), product);
    }

    /// Expansion and reconstruction are mutually inverse on rational
    /// functions with constant term one in both parts.
    #[test]
    fn reconstruction_inverts_expansion(num in charpoly_up_to(3), den in charpoly_up_to(3)) {
        let f = RationalFunction::new(num, den).unwrap();
        let series = f.expand(12);
        let back = rational_reconstruct(&series, 3).unwrap();
        prop_assert_eq!(back, Some(f));
    }

    /// Companion comparison is reflexive and symmetric, and a single
    /// coefficient perturbation is pinned to its point.
    #[test]
    fn companions_are_an_equivalence_that_sees_perturbations(
        d in tiny_dataset(),
        which in 0usize..4,
        delta in 1i64..=5,
    ) {
        prop_assert!(companion_check(&d, &d, false).unwrap().pass);

        let target = which % d.len();
        let points: Vec<DataPoint> = d
            .points()
            .iter()
            .enumerate()
            .map(|(i, pt)| {
                if i == target {
                    let mut coeffs: Vec<NumberFieldElement> = pt.poly().coeffs().to_vec();
                    coeffs[1] = coeffs[1].clone() + nfe(delta);
                    DataPoint::new(pt.id().to_string(), pt.degree(), Poly::from_coeffs(coeffs))
                } else {
                    pt.clone()
                }
            })
            .collect();
        let perturbed = FrobeniusDataset::new(d.meta().clone(), points).unwrap();

        let forward = companion_check(&d, &perturbed, false).unwrap();
        let backward = companion_check(&perturbed, &d, false).unwrap();
        prop_assert!(!forward.pass);
        prop_assert_eq!(forward.pass, backward.pass);
        let expected_id = d.points()[target].id().to_string();
        prop_assert_eq!(forward.mismatch.unwrap().id, expected_id.clone());
        prop_assert_eq!(backward.mismatch.unwrap().id, expected_id);
    }
}
