//! Exact tangent-plane continuity tests along shared patch boundaries.
//!
//! Along a shared boundary three derivative curves are in play: the boundary
//! tangent and, on each side, the first derivative crossing the boundary.
//! The surfaces meet with matching tangent planes exactly when the three
//! are everywhere coplanar; the scalar witness is the 3×3 determinant
//! polynomial of the three curves, which must vanish identically. All of
//! this is decided in exact rational arithmetic — the only floating point
//! in this module is the numeric normal-jump estimate.

use crate::bernstein::{vecpoly_det3, BernsteinPoly, VecPoly3};
use crate::exact::{normalize_primitive_slice, Rational, Vec3r};
use crate::patch::{extract_edge_data, EdgeData, PatchComplex, PatchError};
use num::BigInt;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    G1,
    NotG1,
    Degenerate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::G1 => "G1",
            Verdict::NotG1 => "NotG1",
            Verdict::Degenerate => "Degenerate",
        })
    }
}

fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    v.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .serialize(s)
}

/// Everything the continuity analysis of one shared edge produces.
///
/// `det_primitive` is `det_poly` rescaled to coprime integers with the
/// first nonzero entry positive; `det_scale × det_primitive` reconstructs
/// the exact coefficients. `is_coplanar` is the necessary condition
/// (determinant identically zero); `unbiased_ok` is the stronger symmetric
/// reparameterization test. `regular` guards against boundaries whose
/// tangent degenerates, where the determinant vanishes for trivial reasons;
/// an irregular edge is reported as `Degenerate` rather than trusted either
/// way.
#[derive(Debug, Clone, Serialize)]
pub struct G1Report {
    pub edge_id: usize,
    pub det_poly: BernsteinPoly,
    pub det_scale: Rational,
    #[serde(serialize_with = "ser_bigints")]
    pub det_primitive: Vec<BigInt>,
    pub is_coplanar: bool,
    pub unbiased_ok: bool,
    pub regular: bool,
    pub verdict: Verdict,
}

#[derive(Debug, thiserror::Error)]
pub enum G1Error {
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error("normal jump needs at least 2 sample intervals")]
    TooFewSamples,
}

/// The three derivative curves of a shared boundary, all in Bernstein form:
///
/// * `dp2` — first derivative crossing the boundary into the left patch,
///   degree 3: coefficients `3·(row_p1[i] − row_b[i])`;
/// * `dp1` — tangent along the boundary, degree 2;
/// * `dq2` — first derivative crossing the boundary out of the right patch,
///   degree 3: coefficients `3·(row_b[i] − row_q2[i])`.
///
/// Both cross derivatives are oriented in the same geometric direction
/// (from the right patch's side toward the left patch's), so two patches
/// forming one C¹ surface yield `dp2 = dq2` exactly.
pub fn edge_derivatives(e: &EdgeData) -> (VecPoly3, VecPoly3, VecPoly3) {
    let three = Rational::from_int(3);
    let dp2 = VecPoly3::new(
        (0..4)
            .map(|i| (&e.row_p1[i] - &e.row_b[i]).scale(&three))
            .collect(),
    );
    let dq2 = VecPoly3::new(
        (0..4)
            .map(|i| (&e.row_b[i] - &e.row_q2[i]).scale(&three))
            .collect(),
    );
    let boundary = VecPoly3::new(e.row_b.to_vec());
    let dp1 = boundary.derivative();
    (dp2, dp1, dq2)
}

const REGULARITY_SAMPLES: [(i64, i64); 7] =
    [(0, 1), (1, 5), (1, 3), (1, 2), (2, 3), (4, 5), (1, 1)];

fn is_regular(dp1: &VecPoly3) -> bool {
    if dp1.coeffs.iter().any(Vec3r::is_zero) {
        return false;
    }
    for (p, q) in REGULARITY_SAMPLES {
        if dp1.eval(&Rational::from_ints(p, q)).is_zero() {
            return false;
        }
    }
    // a straight boundary segment makes the determinant vanish trivially;
    // treat it as irregular so it cannot masquerade as a G1 join
    let all_parallel = dp1
        .coeffs
        .iter()
        .skip(1)
        .all(|c| dp1.coeffs[0].cross(c).is_zero());
    !all_parallel
}

fn analyze(e: &EdgeData, edge_id: usize) -> G1Report {
    let (dp2, dp1, dq2) = edge_derivatives(e);
    let det_poly: BernsteinPoly = vecpoly_det3(&dp2, &dp1, &dq2);
    let (det_scale, det_primitive) = normalize_primitive_slice(&det_poly.coeffs);
    let is_coplanar = det_poly.is_zero();
    // The symmetric constraint asks the two cross derivatives to differ
    // only by a multiple of the boundary tangent. With both oriented the
    // same way (see edge_derivatives) the residual is their difference;
    // the tangent multiple is eliminated by the cross product, so no
    // reparameterization function is ever materialized.
    let unbiased_ok = dp2.sub(&dq2).cross(&dp1).is_zero();
    let regular = is_regular(&dp1);
    let verdict = if !regular {
        Verdict::Degenerate
    } else if is_coplanar {
        Verdict::G1
    } else {
        Verdict::NotG1
    };
    debug_assert!(!unbiased_ok || is_coplanar);
    G1Report {
        edge_id,
        det_poly,
        det_scale,
        det_primitive,
        is_coplanar,
        unbiased_ok,
        regular,
        verdict,
    }
}

/// Decides the necessary coplanarity condition for one edge.
pub fn g1_necessary_test(e: &EdgeData, edge_id: usize) -> G1Report {
    analyze(e, edge_id)
}

/// Decides the stronger symmetric-reparameterization condition; the report
/// carries both booleans, so this differs from [`g1_necessary_test`] only
/// in emphasis.
pub fn unbiased_test(e: &EdgeData, edge_id: usize) -> G1Report {
    analyze(e, edge_id)
}

/// Sampled angle between the two surface normals along a shared boundary.
/// `samples` counts uniform intervals, so `samples + 1` parameter values
/// are evaluated (nested under doubling). Normals are computed exactly and
/// only converted to floating point for the final angle.
#[derive(Debug, Clone, Serialize)]
pub struct NormalJumpReport {
    pub edge_id: usize,
    pub samples: usize,
    pub max_angle: f64,
    pub angle_profile: Vec<(f64, f64)>,
    /// parameter values where a normal vanished exactly; excluded from the
    /// profile and the max
    pub degenerate_samples: Vec<f64>,
}

pub fn normal_jump(e: &EdgeData, edge_id: usize, samples: usize) -> Result<NormalJumpReport, G1Error> {
    if samples < 2 {
        return Err(G1Error::TooFewSamples);
    }
    let (dp2, dp1, dq2) = edge_derivatives(e);
    let mut angle_profile = Vec::with_capacity(samples + 1);
    let mut degenerate_samples = Vec::new();
    let mut max_angle = 0.0f64;
    for i in 0..=samples {
        let t = Rational::from_ints(i as i64, samples as i64);
        let tangent = dp1.eval(&t);
        let np = tangent.cross(&dp2.eval(&t));
        let nq = tangent.cross(&dq2.eval(&t));
        let t_f = i as f64 / samples as f64;
        if np.is_zero() || nq.is_zero() {
            degenerate_samples.push(t_f);
            continue;
        }
        let a = normalized_f64(&np);
        let b = normalized_f64(&nq);
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cx = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let cross_norm = (cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2]).sqrt();
        let angle = cross_norm.atan2(dot);
        if angle > max_angle {
            max_angle = angle;
        }
        angle_profile.push((t_f, angle));
    }
    Ok(NormalJumpReport {
        edge_id,
        samples,
        max_angle,
        angle_profile,
        degenerate_samples,
    })
}

fn normalized_f64(v: &Vec3r) -> [f64; 3] {
    let f = v.to_f64();
    let n = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
    [f[0] / n, f[1] / n, f[2] / n]
}

/// Runs [`normal_jump`] on a complex edge after canonical extraction.
pub fn normal_jump_edge(
    c: &PatchComplex,
    edge: usize,
    samples: usize,
) -> Result<NormalJumpReport, G1Error> {
    let data = extract_edge_data(c, edge)?;
    normal_jump(&data, edge, samples)
}

/// Per-edge reports for a whole complex plus summary counts.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexCheck {
    pub reports: Vec<G1Report>,
    pub g1: usize,
    pub not_g1: usize,
    pub degenerate: usize,
}

pub fn check_complex(c: &PatchComplex) -> Result<ComplexCheck, PatchError> {
    let mut reports = Vec::with_capacity(c.shared_edges.len());
    let (mut g1, mut not_g1, mut degenerate) = (0, 0, 0);
    for edge in 0..c.shared_edges.len() {
        let data = extract_edge_data(c, edge)?;
        let report = analyze(&data, edge);
        match report.verdict {
            Verdict::G1 => g1 += 1,
            Verdict::NotG1 => not_g1 += 1,
            Verdict::Degenerate => degenerate += 1,
        }
        reports.push(report);
    }
    Ok(ComplexCheck {
        reports,
        g1,
        not_g1,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinPoly;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::from_ints(p, q)
    }

    fn v(x: i64, y: i64, z: i64) -> Vec3r {
        Vec3r::from_ints(x, y, z)
    }

    fn row(a: Vec3r, b: Vec3r, c: Vec3r, d: Vec3r) -> [Vec3r; 4] {
        [a, b, c, d]
    }

    fn generic_rows() -> ([Vec3r; 4], [Vec3r; 4]) {
        // a curved boundary and a non-planar interior row
        let row_b = row(v(0, 0, 0), v(1, 2, 0), v(2, 2, 1), v(3, 0, 0));
        let row_p1 = row(v(0, 1, 3), v(1, 3, 2), v(2, 3, 4), v(3, 1, 3));
        (row_b, row_p1)
    }

    fn mirror_fixture() -> EdgeData {
        let (row_b, row_p1) = generic_rows();
        let two = rat(2, 1);
        let row_q2 =
            std::array::from_fn(|i| &row_b[i].scale(&two) - &row_p1[i]);
        EdgeData {
            row_p1,
            row_b,
            row_q2,
        }
    }

    #[test]
    fn derivative_degrees() {
        let e = mirror_fixture();
        let (dp2, dp1, dq2) = edge_derivatives(&e);
        assert_eq!(dp2.degree(), 3);
        assert_eq!(dp1.degree(), 2);
        assert_eq!(dq2.degree(), 3);
    }

    #[test]
    fn mirror_fixture_is_c1() {
        let e = mirror_fixture();
        let (dp2, _, dq2) = edge_derivatives(&e);
        assert_eq!(dp2, dq2);
        let r = g1_necessary_test(&e, 0);
        assert!(r.is_coplanar);
        assert!(r.unbiased_ok);
        assert!(r.regular);
        assert!(matches!(r.verdict, Verdict::G1));
        assert!(r.det_poly.is_zero());
        assert!(r.det_scale.is_zero());
    }

    #[test]
    fn translation_leaves_derivatives_unchanged() {
        let e = mirror_fixture();
        let d = v(5, -7, 11);
        let shift = |r: &[Vec3r; 4]| std::array::from_fn(|i| &r[i] + &d);
        let e2 = EdgeData {
            row_p1: shift(&e.row_p1),
            row_b: shift(&e.row_b),
            row_q2: shift(&e.row_q2),
        };
        let a = edge_derivatives(&e);
        let b = edge_derivatives(&e2);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.2, b.2);
    }

    #[test]
    fn flat_rows_are_coplanar() {
        // everything in the z = 0 plane
        let row_b = row(v(0, 0, 0), v(1, 2, 0), v(2, -1, 0), v(3, 1, 0));
        let row_p1 = row(v(0, 3, 0), v(1, 4, 0), v(2, 3, 0), v(3, 4, 0));
        let row_q2 = row(v(0, -2, 0), v(1, -3, 0), v(2, -4, 0), v(3, -2, 0));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = g1_necessary_test(&e, 0);
        assert!(r.is_coplanar);
        assert!(matches!(r.verdict, Verdict::G1));
    }

    #[test]
    fn biased_tangent_multiple_is_coplanar_but_not_unbiased() {
        // dq2 = 2·dp2: pointwise parallel cross derivatives keep the
        // determinant zero, but the symmetric residual is nonzero
        let (row_b, row_p1) = generic_rows();
        let three = rat(3, 1);
        let dp2: [Vec3r; 4] = std::array::from_fn(|i| (&row_p1[i] - &row_b[i]).scale(&three));
        let row_q2: [Vec3r; 4] = std::array::from_fn(|i| {
            // dq2_i = 2·dp2_i and row_q2_i = row_b_i − dq2_i / 3
            &row_b[i] - &dp2[i].scale(&rat(2, 3))
        });
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = unbiased_test(&e, 0);
        assert!(r.is_coplanar);
        assert!(!r.unbiased_ok);
        assert!(matches!(r.verdict, Verdict::G1));
    }

    #[test]
    fn tangent_shear_fixture_is_unbiased() {
        // dq2 = dp2 − u·dp1, i.e. the cross derivatives differ exactly by
        // a tangent multiple with reparameterization factor u
        let (row_b, row_p1) = generic_rows();
        let e0 = EdgeData {
            row_p1: row_p1.clone(),
            row_b: row_b.clone(),
            row_q2: row_b.clone(), // placeholder
        };
        let (dp2, dp1, _) = edge_derivatives(&e0);
        let u = BernsteinPoly::new(vec![rat(0, 1), rat(1, 1)]);
        let u_dp1 = VecPoly3::from_components(
            &u.mul(&dp1.component(0)),
            &u.mul(&dp1.component(1)),
            &u.mul(&dp1.component(2)),
        );
        let dq2 = dp2.sub(&u_dp1);
        assert_eq!(dq2.degree(), 3);
        let third = rat(1, 3);
        let row_q2: [Vec3r; 4] =
            std::array::from_fn(|i| &row_b[i] - &dq2.coeffs[i].scale(&third));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = unbiased_test(&e, 0);
        assert!(r.unbiased_ok);
        assert!(r.is_coplanar);
        assert!(matches!(r.verdict, Verdict::G1));
    }

    #[test]
    fn straight_boundary_is_degenerate() {
        let row_b = row(v(0, 0, 0), v(1, 0, 0), v(2, 0, 0), v(3, 0, 0));
        let row_p1 = row(v(0, 1, 3), v(1, 5, 2), v(2, 3, 4), v(3, 1, 7));
        let row_q2 = row(v(0, -2, 1), v(1, -3, 5), v(2, -1, 2), v(3, -2, 4));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = g1_necessary_test(&e, 0);
        assert!(!r.regular);
        assert!(matches!(r.verdict, Verdict::Degenerate));
    }

    #[test]
    fn stalled_boundary_is_degenerate() {
        // repeated boundary control point gives a zero tangent coefficient
        let row_b = row(v(0, 0, 0), v(0, 0, 0), v(2, 2, 1), v(3, 0, 0));
        let (_, row_p1) = generic_rows();
        let row_q2 = row(v(0, -2, 1), v(1, -3, 5), v(2, -1, 2), v(3, -2, 4));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = g1_necessary_test(&e, 0);
        assert!(!r.regular);
        assert!(matches!(r.verdict, Verdict::Degenerate));
    }

    #[test]
    fn generic_bent_edge_is_not_g1() {
        let (row_b, row_p1) = generic_rows();
        let row_q2 = row(v(0, -1, 2), v(1, -2, 1), v(2, -2, 3), v(3, -1, 2));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = g1_necessary_test(&e, 0);
        assert!(!r.is_coplanar);
        assert!(r.regular);
        assert!(matches!(r.verdict, Verdict::NotG1));
        assert_eq!(r.det_poly.degree(), 8);
        // primitive reconstruction: scale × ints == coefficients
        for (c, i) in r.det_poly.coeffs.iter().zip(&r.det_primitive) {
            assert_eq!(c, &(&r.det_scale * &Rational::from_bigint(i.clone())));
        }
    }

    #[test]
    fn mirror_fixture_has_zero_normal_jump() {
        let e = mirror_fixture();
        let r = normal_jump(&e, 0, 16).unwrap();
        assert_eq!(r.samples, 16);
        assert_eq!(r.angle_profile.len(), 17);
        assert!(r.degenerate_samples.is_empty());
        assert!(r.max_angle < 1e-12);
    }

    #[test]
    fn doubling_samples_never_decreases_max_angle() {
        let (row_b, row_p1) = generic_rows();
        let row_q2 = row(v(0, -1, 2), v(1, -2, 1), v(2, -2, 3), v(3, -1, 2));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let mut prev = 0.0;
        for s in [4usize, 8, 16, 32, 64] {
            let r = normal_jump(&e, 0, s).unwrap();
            assert!(r.max_angle >= prev, "s={}", s);
            assert!(r.max_angle > 0.0);
            prev = r.max_angle;
        }
    }

    #[test]
    fn vanishing_tangent_sample_is_excluded_with_warning() {
        // boundary tangent vanishes exactly at t = 1/2
        let row_b = row(v(0, 0, 0), v(1, 0, 0), v(0, 0, 0), v(1, 0, 0));
        let (_, row_p1) = generic_rows();
        let row_q2 = row(v(0, -2, 1), v(1, -3, 5), v(2, -1, 2), v(3, -2, 4));
        let e = EdgeData {
            row_p1,
            row_b,
            row_q2,
        };
        let r = normal_jump(&e, 0, 2).unwrap();
        assert_eq!(r.degenerate_samples, vec![0.5]);
        assert_eq!(r.angle_profile.len(), 2);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let e = mirror_fixture();
        assert!(matches!(normal_jump(&e, 0, 1), Err(G1Error::TooFewSamples)));
    }

    #[test]
    fn quad_split_complex_checks_all_g1() {
        // cubic height variation in both directions keeps every internal
        // boundary genuinely curved
        let patch = crate::patch::BezierPatch::from_fn(|i, j| {
            Vec3r::new(
                rat(i as i64, 3),
                rat(j as i64, 3),
                rat((i * i * i + j * j * j + i * j) as i64, 7),
            )
        });
        let c = crate::patch::quad_split_complex(&patch);
        let check = check_complex(&c).unwrap();
        assert_eq!(check.reports.len(), 4);
        assert_eq!(check.g1, 4);
        assert_eq!(check.not_g1, 0);
        assert_eq!(check.degenerate, 0);
        for r in &check.reports {
            assert!(r.unbiased_ok);
        }
    }
}
