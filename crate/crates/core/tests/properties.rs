//! Property-based checks of the library's structural invariants: exact
//! normalization, Bernstein algebra, determinant structure, continuity-test
//! soundness, subdivision equivariance, and serialization round-trips.

use dscubic_core::{
    ds_step, g1_necessary_test, make_cube, make_tetrahedron, normalize_primitive_slice,
    quad_split_complex, vecpoly_det3, BernsteinPoly, BezierPatch, EdgeData, PatchComplex,
    Rational, Vec3r, VecPoly3, Verdict, WeightVariant,
};
use num::Integer;
use proptest::prelude::*;

fn rat(p: i64, q: i64) -> Rational {
    Rational::from_ints(p, q)
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=40).prop_map(|(p, q)| Rational::from_ints(p, q))
}

fn arb_unit_t() -> impl Strategy<Value = Rational> {
    (0i64..=24, 1i64..=24).prop_map(|(p, q)| {
        let p = p.min(q);
        Rational::from_ints(p, q)
    })
}

fn arb_vec3() -> impl Strategy<Value = Vec3r> {
    (arb_rational(), arb_rational(), arb_rational()).prop_map(|(x, y, z)| Vec3r::new(x, y, z))
}

fn arb_row() -> impl Strategy<Value = [Vec3r; 4]> {
    prop::array::uniform4(arb_vec3())
}

fn arb_poly(max_degree: usize) -> impl Strategy<Value = BernsteinPoly> {
    prop::collection::vec(arb_rational(), 1..=(max_degree + 1)).prop_map(BernsteinPoly::new)
}

fn arb_vecpoly(max_degree: usize) -> impl Strategy<Value = VecPoly3> {
    prop::collection::vec(arb_vec3(), 1..=(max_degree + 1)).prop_map(VecPoly3::new)
}

proptest! {
    #[test]
    fn normalization_reconstructs_and_is_primitive(values in prop::collection::vec(arb_rational(), 1..10)) {
        let (scale, ints) = normalize_primitive_slice(&values);
        prop_assert_eq!(ints.len(), values.len());
        for (v, i) in values.iter().zip(&ints) {
            prop_assert_eq!(v.clone(), &scale * &Rational::from_bigint(i.clone()));
        }
        if values.iter().all(Rational::is_zero) {
            prop_assert!(scale.is_zero());
        } else {
            let zero = num::BigInt::from(0);
            let first = ints.iter().find(|i| **i != zero).unwrap();
            prop_assert!(first > &zero);
            let mut g = zero.clone();
            for i in &ints {
                g = g.gcd(i);
            }
            prop_assert_eq!(g, 1.into());
        }
    }

    #[test]
    fn bernstein_product_evaluates_pointwise(a in arb_poly(4), b in arb_poly(4), t in arb_unit_t()) {
        let prod = a.mul(&b);
        prop_assert_eq!(prod.degree(), a.degree() + b.degree());
        prop_assert_eq!(prod.eval(&t), &a.eval(&t) * &b.eval(&t));
    }

    #[test]
    fn endpoint_interpolation(a in arb_poly(6)) {
        prop_assert_eq!(&a.eval(&Rational::zero()), a.coeffs.first().unwrap());
        prop_assert_eq!(&a.eval(&Rational::one()), a.coeffs.last().unwrap());
    }

    #[test]
    fn derivative_commutes_with_degree_raising(a in arb_poly(5)) {
        let lhs = a.degree_raised(1).derivative();
        let rhs = a.derivative().degree_raised(1);
        // both represent the same polynomial at the same degree, and the
        // Bernstein representation at a fixed degree is unique
        if a.degree() == 0 {
            prop_assert!(lhs.is_zero() && rhs.is_zero());
        } else {
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn determinant_is_antisymmetric_and_multilinear(
        a in arb_vecpoly(2),
        a2 in arb_vecpoly(2),
        b in arb_vecpoly(2),
        c in arb_vecpoly(2),
    ) {
        let swapped = vecpoly_det3(&b, &a, &c);
        let direct = vecpoly_det3(&a, &b, &c);
        prop_assert!(direct.add(&swapped).is_zero());

        let d1 = vecpoly_det3(&a.sub(&a2), &b, &c);
        let d2 = vecpoly_det3(&a, &b, &c).sub(&vecpoly_det3(&a2, &b, &c));
        prop_assert!(d1.sub(&d2).is_zero());
    }

    #[test]
    fn mirror_edges_are_coplanar_and_unbiased(row_p1 in arb_row(), row_b in arb_row()) {
        let two = rat(2, 1);
        let row_q2: [Vec3r; 4] = std::array::from_fn(|i| &row_b[i].scale(&two) - &row_p1[i]);
        let e = EdgeData { row_p1, row_b, row_q2 };
        let r = g1_necessary_test(&e, 0);
        prop_assert!(r.is_coplanar);
        prop_assert!(r.unbiased_ok);
        prop_assert!(r.det_poly.is_zero());
    }

    #[test]
    fn unbiased_implies_coplanar_and_verdicts_are_consistent(
        row_p1 in arb_row(),
        row_b in arb_row(),
        row_q2 in arb_row(),
    ) {
        let e = EdgeData { row_p1, row_b, row_q2 };
        let r = g1_necessary_test(&e, 0);
        if r.unbiased_ok {
            prop_assert!(r.is_coplanar);
        }
        match r.verdict {
            Verdict::NotG1 => prop_assert!(!r.is_coplanar && r.regular),
            Verdict::G1 => prop_assert!(r.is_coplanar && r.regular),
            Verdict::Degenerate => prop_assert!(!r.regular),
        }
        prop_assert_eq!(r.det_poly.degree(), 8);
        // primitive reconstruction
        for (coeff, int) in r.det_poly.coeffs.iter().zip(&r.det_primitive) {
            prop_assert_eq!(coeff.clone(), &r.det_scale * &Rational::from_bigint(int.clone()));
        }
    }

    #[test]
    fn tangent_biased_edges_stay_coplanar(row_p1 in arb_row(), row_b in arb_row(), c in 2i64..=5) {
        // dq2 = c · dp2 keeps the three curves pointwise coplanar
        let three = rat(3, 1);
        let dp2: [Vec3r; 4] = std::array::from_fn(|i| (&row_p1[i] - &row_b[i]).scale(&three));
        let row_q2: [Vec3r; 4] =
            std::array::from_fn(|i| &row_b[i] - &dp2[i].scale(&rat(c, 3)));
        let e = EdgeData { row_p1, row_b, row_q2 };
        let r = g1_necessary_test(&e, 0);
        prop_assert!(r.is_coplanar);
    }

    #[test]
    fn rational_display_round_trips(x in arb_rational()) {
        let s = x.to_string();
        let back: Rational = s.parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn rational_serde_round_trips(x in arb_rational()) {
        let json = serde_json::to_string(&x).unwrap();
        let back: Rational = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn patch_split_matches_reparameterization(
        grid in prop::collection::vec(arb_vec3(), 16),
        t in arb_unit_t(),
        u in arb_unit_t(),
        v in arb_unit_t(),
    ) {
        let patch = BezierPatch::from_fn(|i, j| grid[i * 4 + j].clone());
        let (left, right) = patch.split_u(&t);
        prop_assert_eq!(left.eval(&u, &v), patch.eval(&(&t * &u), &v));
        let t1 = &t + &(&(&Rational::one() - &t) * &u);
        prop_assert_eq!(right.eval(&u, &v), patch.eval(&t1, &v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subdivision_commutes_with_affine_maps(
        entries in prop::array::uniform9(-3i64..=3),
        shift in arb_vec3(),
        pick_cube in any::<bool>(),
    ) {
        let det = entries[0] * (entries[4] * entries[8] - entries[5] * entries[7])
            - entries[1] * (entries[3] * entries[8] - entries[5] * entries[6])
            + entries[2] * (entries[3] * entries[7] - entries[4] * entries[6]);
        prop_assume!(det != 0);
        let mat: [[Rational; 3]; 3] = std::array::from_fn(|r| {
            std::array::from_fn(|c| Rational::from_int(entries[r * 3 + c]))
        });
        let m = if pick_cube {
            make_cube(&Rational::one()).unwrap()
        } else {
            make_tetrahedron(&Rational::one()).unwrap()
        };
        let mapped_then_refined = ds_step(&m.map_affine(&mat, &shift), WeightVariant::Classical).unwrap();
        let refined_then_mapped = ds_step(&m, WeightVariant::Classical).unwrap().map_affine(&mat, &shift);
        prop_assert_eq!(mapped_then_refined, refined_then_mapped);
    }

    #[test]
    fn complex_json_round_trips_bit_exactly(grid in prop::collection::vec(arb_vec3(), 16)) {
        let patch = BezierPatch::from_fn(|i, j| grid[i * 4 + j].clone());
        let complex = quad_split_complex(&patch);
        let text = complex.to_json_string();
        let back = PatchComplex::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &complex);
        prop_assert_eq!(back.to_json_string(), text);
    }
}

/// The twelve rotations fixing the reference tetrahedron: cyclic axis
/// permutations composed with double sign flips.
fn tetrahedron_rotations() -> Vec<[[i64; 3]; 3]> {
    let perms: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let signs: [[i64; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let mut out = Vec::new();
    for p in perms {
        for s in signs {
            let mut m = [[0i64; 3]; 3];
            for r in 0..3 {
                m[r][p[r]] = s[r];
            }
            out.push(m);
        }
    }
    out
}

#[test]
fn refinement_commutes_with_the_tetrahedron_rotation_group() {
    let m = make_tetrahedron(&Rational::one()).unwrap();
    let refined = ds_step(&m, WeightVariant::Classical).unwrap();
    let point_set = |mesh: &dscubic_core::Mesh| {
        let mut pts = mesh.vertices().to_vec();
        pts.sort();
        pts
    };
    let base = point_set(&refined);
    let rotations = tetrahedron_rotations();
    assert_eq!(rotations.len(), 12);
    for rot in rotations {
        let mat: [[Rational; 3]; 3] =
            std::array::from_fn(|r| std::array::from_fn(|c| Rational::from_int(rot[r][c])));
        // the rotation permutes the tetrahedron's vertices, so refining the
        // rotated mesh must produce the same point set as rotating the
        // refined mesh
        let rotated_input = m.map_affine(&mat, &Vec3r::zero());
        assert_eq!(point_set(&rotated_input), point_set(&m));
        let a = point_set(&ds_step(&rotated_input, WeightVariant::Classical).unwrap());
        let b = point_set(&refined.map_affine(&mat, &Vec3r::zero()));
        assert_eq!(a, b);
        assert_eq!(a, base);
    }
}
