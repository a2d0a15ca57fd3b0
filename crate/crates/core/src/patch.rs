//! Bi-cubic Bernstein-Bézier patch complexes built from refined meshes.
//!
//! The layout places one patch per vertex of a chosen refinement level
//! (every such vertex has valence 4, so each patch gets four corners). The
//! four corners are the subdivision limit points of the four incident
//! facets; boundary and interior control points are midpoint combinations
//! of those corners and nearby mesh points — either points of the next
//! refinement level (`RefinedMidpoint`) or of the layout level itself
//! (`DirectMidpoint`). Complexes carry exact shared-edge adjacency so that
//! continuity questions downstream have zero tolerance.

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::{Rational, Vec3r};
use crate::mesh::{Mesh, MeshError};
use crate::subdivide::{
    ds_refine, face_offsets, LimitMethod, RefinementTrace, SubdivideError, WeightVariant,
};
use serde::{Deserialize, Serialize};

/// One side of a patch's parameter square. `U0`/`U1` are the u=0 and u=1
/// boundary curves (parameterized by v); `V0`/`V1` are v=0 and v=1
/// (parameterized by u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    U0,
    U1,
    V0,
    V1,
}

/// Tensor-product bi-cubic patch: `coeffs[i][j]` is the control point with
/// u-index i and v-index j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezierPatch {
    pub coeffs: [[Vec3r; 4]; 4],
}

fn lerp(a: &Vec3r, b: &Vec3r, t: &Rational) -> Vec3r {
    a + &(b - a).scale(t)
}

fn casteljau4(p: &[Vec3r; 4], t: &Rational) -> ([Vec3r; 4], [Vec3r; 4]) {
    let a = lerp(&p[0], &p[1], t);
    let b = lerp(&p[1], &p[2], t);
    let c = lerp(&p[2], &p[3], t);
    let d = lerp(&a, &b, t);
    let e = lerp(&b, &c, t);
    let f = lerp(&d, &e, t);
    (
        [p[0].clone(), a, d, f.clone()],
        [f, e, c, p[3].clone()],
    )
}

impl BezierPatch {
    pub fn new(coeffs: [[Vec3r; 4]; 4]) -> Self {
        BezierPatch { coeffs }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Vec3r) -> Self {
        BezierPatch {
            coeffs: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    /// Exact tensor-product de Casteljau evaluation.
    pub fn eval(&self, u: &Rational, v: &Rational) -> Vec3r {
        // collapse v in each u-row, then collapse u
        let mut column: Vec<Vec3r> = Vec::with_capacity(4);
        for i in 0..4 {
            let mut layer: Vec<Vec3r> = self.coeffs[i].to_vec();
            while layer.len() > 1 {
                layer = layer.windows(2).map(|w| lerp(&w[0], &w[1], v)).collect();
            }
            column.push(layer.pop().unwrap());
        }
        let mut layer = column;
        while layer.len() > 1 {
            layer = layer.windows(2).map(|w| lerp(&w[0], &w[1], u)).collect();
        }
        layer.pop().unwrap()
    }

    /// Boundary control points of a side, ordered by that side's own
    /// parameter (u for V-sides, v for U-sides).
    pub fn boundary_row(&self, side: Side) -> [Vec3r; 4] {
        match side {
            Side::V0 => std::array::from_fn(|i| self.coeffs[i][0].clone()),
            Side::V1 => std::array::from_fn(|i| self.coeffs[i][3].clone()),
            Side::U0 => std::array::from_fn(|j| self.coeffs[0][j].clone()),
            Side::U1 => std::array::from_fn(|j| self.coeffs[3][j].clone()),
        }
    }

    /// The row of control points adjacent to a side, same ordering as
    /// [`boundary_row`](Self::boundary_row).
    pub fn interior_row(&self, side: Side) -> [Vec3r; 4] {
        match side {
            Side::V0 => std::array::from_fn(|i| self.coeffs[i][1].clone()),
            Side::V1 => std::array::from_fn(|i| self.coeffs[i][2].clone()),
            Side::U0 => std::array::from_fn(|j| self.coeffs[1][j].clone()),
            Side::U1 => std::array::from_fn(|j| self.coeffs[2][j].clone()),
        }
    }

    /// Splits at u = t into the sub-patches over [0, t] and [t, 1].
    pub fn split_u(&self, t: &Rational) -> (BezierPatch, BezierPatch) {
        let mut left = BezierPatch::from_fn(|_, _| Vec3r::zero());
        let mut right = left.clone();
        for j in 0..4 {
            let col: [Vec3r; 4] = std::array::from_fn(|i| self.coeffs[i][j].clone());
            let (l, r) = casteljau4(&col, t);
            for i in 0..4 {
                left.coeffs[i][j] = l[i].clone();
                right.coeffs[i][j] = r[i].clone();
            }
        }
        (left, right)
    }

    /// Splits at v = t into the sub-patches over [0, t] and [t, 1].
    pub fn split_v(&self, t: &Rational) -> (BezierPatch, BezierPatch) {
        let mut low = BezierPatch::from_fn(|_, _| Vec3r::zero());
        let mut high = low.clone();
        for i in 0..4 {
            let (l, r) = casteljau4(&self.coeffs[i], t);
            low.coeffs[i] = l;
            high.coeffs[i] = r;
        }
        (low, high)
    }

    pub fn translate(&self, d: &Vec3r) -> BezierPatch {
        BezierPatch::from_fn(|i, j| &self.coeffs[i][j] + d)
    }

    fn flat(&self) -> Vec<Vec3r> {
        let mut out = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                out.push(self.coeffs[i][j].clone());
            }
        }
        out
    }
}

impl Serialize for BezierPatch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.flat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BezierPatch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let flat = Vec::<Vec3r>::deserialize(d)?;
        if flat.len() != 16 {
            return Err(serde::de::Error::custom(format!(
                "patch needs 16 control points, got {}",
                flat.len()
            )));
        }
        Ok(BezierPatch::from_fn(|i, j| flat[i * 4 + j].clone()))
    }
}

/// Adjacency record: two patch sides carrying the same boundary curve.
/// `orientation_flip` is true when the sides' own parameters run along the
/// curve in opposite directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedEdge {
    pub patch_a: usize,
    pub side_a: Side,
    pub patch_b: usize,
    pub side_b: Side,
    pub orientation_flip: bool,
}

/// Provenance of a complex corner: the mesh entity whose limit point it is.
/// `level` is the refinement level the entity lives in (0 = input mesh).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CornerOrigin {
    Face { level: usize, face: usize },
    Vertex { level: usize, vertex: usize },
    EdgeSplit { level: usize, a: usize, b: usize },
}

/// A set of bi-cubic patches with shared-edge adjacency and corner
/// provenance. `patch_corners[p]` lists the corner ids of patch p at
/// (u,v) = (0,0), (1,0), (1,1), (0,1) in that order. `corner_map` records
/// where each corner came from; complexes assembled outside the mesh
/// pipeline may leave it empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchComplex {
    pub version: u32,
    pub patches: Vec<BezierPatch>,
    pub shared_edges: Vec<SharedEdge>,
    pub corner_map: BTreeMap<usize, CornerOrigin>,
    pub patch_corners: Vec<[usize; 4]>,
}

pub const COMPLEX_FORMAT_VERSION: u32 = 1;

/// Which refinement level supplies the patch layout (and so where the
/// corner limit points come from).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerLayout {
    /// one patch per (face, corner) of the input mesh; corners are limit
    /// points of the once-refined facets, i.e. of the input's faces,
    /// vertices, and edges
    InputFacesAndVertices,
    /// one patch per (facet, corner) of the once-refined mesh; corners are
    /// limit points of level-1 faces, vertices, and edges
    Level1Facets,
}

/// Where the non-corner control points are read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteriorRule {
    /// midpoints of next-level subdivision points (needs one extra
    /// refinement level beyond the layout)
    RefinedMidpoint,
    /// midpoints of the layout level's own vertices
    DirectMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub steps: usize,
    pub weights: WeightVariant,
    pub limit_method: LimitMethod,
    pub corner_layout: CornerLayout,
    pub interior_rule: InteriorRule,
}

impl Default for ConstructionConfig {
    /// The configuration that reproduces the bundled counterexample tables
    /// exactly (see the search harness).
    fn default() -> Self {
        ConstructionConfig {
            steps: 2,
            weights: WeightVariant::Classical,
            limit_method: LimitMethod::EigenExtrapolate,
            corner_layout: CornerLayout::InputFacesAndVertices,
            interior_rule: InteriorRule::RefinedMidpoint,
        }
    }
}

impl ConstructionConfig {
    /// Refinement level whose vertices carry the patches.
    pub fn layout_level(&self) -> usize {
        match self.corner_layout {
            CornerLayout::InputFacesAndVertices => 1,
            CornerLayout::Level1Facets => 2,
        }
    }

    /// Deepest refinement level the rules read points from.
    pub fn data_level(&self) -> usize {
        self.layout_level()
            + match self.interior_rule {
                InteriorRule::RefinedMidpoint => 1,
                InteriorRule::DirectMidpoint => 0,
            }
    }

    /// Whether `steps` provides enough refinement levels for the rules.
    pub fn is_feasible(&self) -> bool {
        self.steps >= 1 && self.steps >= self.data_level()
    }

    pub fn summary(&self) -> String {
        format!(
            "steps={} weights={} limit={} layout={} interior={}",
            self.steps,
            match self.weights {
                WeightVariant::Classical => "classical",
                WeightVariant::MidpointAverage => "midpoint-average",
            },
            match self.limit_method {
                LimitMethod::Centroid => "centroid",
                LimitMethod::EigenExtrapolate => "eigen",
            },
            match self.corner_layout {
                CornerLayout::InputFacesAndVertices => "input-faces-and-vertices",
                CornerLayout::Level1Facets => "level1-facets",
            },
            match self.interior_rule {
                InteriorRule::RefinedMidpoint => "refined-midpoint",
                InteriorRule::DirectMidpoint => "direct-midpoint",
            },
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PatchError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Subdivide(#[from] SubdivideError),
    #[error("construction needs {need} refinement steps but only {have} were taken")]
    InsufficientLevels { need: usize, have: usize },
    #[error("layout vertex {vertex} has valence {valence}; the layout requires valence 4")]
    LayoutValence { vertex: usize, valence: usize },
    #[error("shared edge {edge} out of range")]
    UnknownEdge { edge: usize },
    #[error("patch index {patch} out of range")]
    UnknownPatch { patch: usize },
    #[error("patch {patch} side {side:?} appears in more than one shared edge")]
    SideReuse { patch: usize, side: Side },
    #[error("shared edge {edge}: boundary rows of the two patches differ (C0 violation)")]
    C0Violation { edge: usize },
    #[error("shared edge {edge}: endpoint corners of the two sides disagree")]
    CornerMismatch { edge: usize },
    #[error("shared edge {edge}: orientation_flip inconsistent with corner traversal")]
    OrientationFlag { edge: usize },
    #[error("shared edge {edge}: cannot determine a unique left patch; orientation inconsistent")]
    InconsistentOrientation { edge: usize },
    #[error("corner {corner}: incident patches disagree on its position")]
    CornerPositionMismatch { corner: usize },
    #[error("corner {corner} missing from corner map")]
    CornerUnmapped { corner: usize },
    #[error("unsupported complex format version {version}")]
    UnsupportedVersion { version: u32 },
    #[error("complex JSON: {0}")]
    Json(String),
    #[error("tessellation needs at least 1 sample per side")]
    BadSampleCount,
}

const RING_SIDES: [Side; 4] = [Side::V0, Side::U1, Side::V1, Side::U0];

/// Corner ids at the start and end of a side, in the side's own
/// parameter direction.
fn side_endpoints(pc: &[usize; 4], side: Side) -> (usize, usize) {
    match side {
        Side::V0 => (pc[0], pc[1]),
        Side::U1 => (pc[1], pc[2]),
        Side::V1 => (pc[3], pc[2]),
        Side::U0 => (pc[0], pc[3]),
    }
}

/// Corner id where the patch's counter-clockwise boundary traversal enters
/// this side. The patch interior lies to the left of that traversal.
fn ccw_start(pc: &[usize; 4], side: Side) -> usize {
    match side {
        Side::V0 => pc[0],
        Side::U1 => pc[1],
        Side::V1 => pc[2],
        Side::U0 => pc[3],
    }
}

/// Runs `steps` rounds of subdivision and builds the patch complex.
pub fn build_from_mesh(m: &Mesh, config: &ConstructionConfig) -> Result<PatchComplex, PatchError> {
    let trace = ds_refine(m, config.steps, config.weights)?;
    build_complex(&trace, config)
}

/// Builds the patch complex from an existing refinement trace.
pub fn build_complex(
    trace: &RefinementTrace,
    config: &ConstructionConfig,
) -> Result<PatchComplex, PatchError> {
    let need = config.data_level();
    let have = trace.levels() - 1;
    if have < need || !config.is_feasible() {
        return Err(PatchError::InsufficientLevels { need, have });
    }
    let lay = config.layout_level();
    let layout = trace.mesh(lay)?;
    let corner_pts: Vec<Vec3r> = (0..layout.face_count())
        .map(|f| trace.face_limit_point(lay, f, config.limit_method))
        .collect::<Result<_, _>>()?;
    let refined = match config.interior_rule {
        InteriorRule::RefinedMidpoint => Some((trace.mesh(lay + 1)?, face_offsets(layout))),
        InteriorRule::DirectMidpoint => None,
    };
    let corner_pos = |face: usize, vertex: usize| -> usize {
        layout.faces()[face]
            .iter()
            .position(|&v| v == vertex)
            .expect("vertex is a corner of its incident face")
    };
    // the subdivision point generated for (face, corner v), or the layout
    // vertex itself under the direct rule
    let rule_point = |face: usize, vertex: usize| -> &Vec3r {
        match &refined {
            Some((mesh, offsets)) => &mesh.vertices()[offsets[face] + corner_pos(face, vertex)],
            None => &layout.vertices()[vertex],
        }
    };

    let nv = layout.vertex_count();
    let mut patches = Vec::with_capacity(nv);
    let mut patch_corners: Vec<[usize; 4]> = Vec::with_capacity(nv);
    let mut ring_neighbor: Vec<[usize; 4]> = Vec::with_capacity(nv);
    for u in 0..nv {
        let ring = layout.faces_around_vertex(u)?;
        if ring.len() != 4 {
            return Err(PatchError::LayoutValence {
                vertex: u,
                valence: ring.len(),
            });
        }
        let phi: [usize; 4] = std::array::from_fn(|i| ring[i].0);
        // other endpoint of the edge crossed between ring faces i and i+1
        let xs: [usize; 4] = std::array::from_fn(|i| {
            let (f, k) = ring[i];
            let n = layout.faces()[f].len();
            layout.faces()[f][(k + n - 1) % n]
        });

        // boundary point where the curve leaving corner i crosses edge {u, x}
        let near = |i: usize, x: usize| -> Vec3r {
            let crossing = rule_point(phi[i], u).midpoint(rule_point(phi[i], x));
            corner_pts[phi[i]].midpoint(&crossing)
        };
        let inner = |i: usize| -> Vec3r { corner_pts[phi[i]].midpoint(rule_point(phi[i], u)) };

        let mut g = BezierPatch::from_fn(|_, _| Vec3r::zero());
        g.coeffs[0][0] = corner_pts[phi[0]].clone();
        g.coeffs[3][0] = corner_pts[phi[1]].clone();
        g.coeffs[3][3] = corner_pts[phi[2]].clone();
        g.coeffs[0][3] = corner_pts[phi[3]].clone();
        g.coeffs[1][0] = near(0, xs[0]);
        g.coeffs[2][0] = near(1, xs[0]);
        g.coeffs[3][1] = near(1, xs[1]);
        g.coeffs[3][2] = near(2, xs[1]);
        g.coeffs[2][3] = near(2, xs[2]);
        g.coeffs[1][3] = near(3, xs[2]);
        g.coeffs[0][2] = near(3, xs[3]);
        g.coeffs[0][1] = near(0, xs[3]);
        g.coeffs[1][1] = inner(0);
        g.coeffs[2][1] = inner(1);
        g.coeffs[2][2] = inner(2);
        g.coeffs[1][2] = inner(3);
        patches.push(g);
        patch_corners.push(phi);
        ring_neighbor.push(xs);
    }

    let mut shared_edges = Vec::with_capacity(layout.edge_count());
    for &(a, b) in layout.edges() {
        let ia = ring_neighbor[a]
            .iter()
            .position(|&x| x == b)
            .expect("layout edge appears in the ring of both endpoints");
        let ib = ring_neighbor[b]
            .iter()
            .position(|&x| x == a)
            .expect("layout edge appears in the ring of both endpoints");
        let (side_a, side_b) = (RING_SIDES[ia], RING_SIDES[ib]);
        let (fa, _) = side_endpoints(&patch_corners[a], side_a);
        let (fb, _) = side_endpoints(&patch_corners[b], side_b);
        shared_edges.push(SharedEdge {
            patch_a: a,
            side_a,
            patch_b: b,
            side_b,
            orientation_flip: fa != fb,
        });
    }

    // corners are layout faces; classify each by the entity it refines
    let source = trace.mesh(lay - 1)?;
    let (nf, nvv) = (source.face_count(), source.vertex_count());
    let mut corner_map = BTreeMap::new();
    for c in 0..layout.face_count() {
        let origin = if c < nf {
            CornerOrigin::Face {
                level: lay - 1,
                face: c,
            }
        } else if c < nf + nvv {
            CornerOrigin::Vertex {
                level: lay - 1,
                vertex: c - nf,
            }
        } else {
            let (a, b) = source.edges()[c - nf - nvv];
            CornerOrigin::EdgeSplit {
                level: lay - 1,
                a,
                b,
            }
        };
        corner_map.insert(c, origin);
    }

    let complex = PatchComplex {
        version: COMPLEX_FORMAT_VERSION,
        patches,
        shared_edges,
        corner_map,
        patch_corners,
    };
    validate_complex(&complex)?;
    Ok(complex)
}

/// Three rows of control points along a shared boundary in canonical
/// orientation: the boundary runs from the lower corner id to the higher,
/// `row_p1` belongs to the patch on the left of that direction, `row_q2` to
/// the one on the right, and `row_b` is the common boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeData {
    pub row_p1: [Vec3r; 4],
    pub row_b: [Vec3r; 4],
    pub row_q2: [Vec3r; 4],
}

fn reversed(row: &[Vec3r; 4]) -> [Vec3r; 4] {
    std::array::from_fn(|i| row[3 - i].clone())
}

struct OrientedSide {
    boundary: [Vec3r; 4],
    interior: [Vec3r; 4],
    is_left: bool,
}

fn oriented_side(
    c: &PatchComplex,
    patch: usize,
    side: Side,
    lo: usize,
) -> Result<OrientedSide, PatchError> {
    let p = c.patches.get(patch).ok_or(PatchError::UnknownPatch { patch })?;
    let pc = &c.patch_corners[patch];
    let (start, _end) = side_endpoints(pc, side);
    let mut boundary = p.boundary_row(side);
    let mut interior = p.interior_row(side);
    if start != lo {
        boundary = reversed(&boundary);
        interior = reversed(&interior);
    }
    Ok(OrientedSide {
        boundary,
        interior,
        is_left: ccw_start(pc, side) == lo,
    })
}

/// Canonical three-row extraction for one shared edge.
pub fn extract_edge_data(c: &PatchComplex, edge: usize) -> Result<EdgeData, PatchError> {
    let se = c
        .shared_edges
        .get(edge)
        .copied()
        .ok_or(PatchError::UnknownEdge { edge })?;
    for p in [se.patch_a, se.patch_b] {
        if p >= c.patch_corners.len() || p >= c.patches.len() {
            return Err(PatchError::UnknownPatch { patch: p });
        }
    }
    let (a_s, a_e) = side_endpoints(&c.patch_corners[se.patch_a], se.side_a);
    let (b_s, b_e) = side_endpoints(&c.patch_corners[se.patch_b], se.side_b);
    if (a_s.min(a_e), a_s.max(a_e)) != (b_s.min(b_e), b_s.max(b_e)) {
        return Err(PatchError::CornerMismatch { edge });
    }
    let lo = a_s.min(a_e);
    let a = oriented_side(c, se.patch_a, se.side_a, lo)?;
    let b = oriented_side(c, se.patch_b, se.side_b, lo)?;
    if a.boundary != b.boundary {
        return Err(PatchError::C0Violation { edge });
    }
    let (left, right) = match (a.is_left, b.is_left) {
        (true, false) => (a, b),
        (false, true) => (b, a),
        _ => return Err(PatchError::InconsistentOrientation { edge }),
    };
    Ok(EdgeData {
        row_p1: left.interior,
        row_b: left.boundary,
        row_q2: right.interior,
    })
}

/// Corner ids of a shared edge as (low, high).
pub fn edge_corners(c: &PatchComplex, edge: usize) -> Result<(usize, usize), PatchError> {
    let se = c
        .shared_edges
        .get(edge)
        .ok_or(PatchError::UnknownEdge { edge })?;
    let pc = c
        .patch_corners
        .get(se.patch_a)
        .ok_or(PatchError::UnknownPatch { patch: se.patch_a })?;
    let (s, e) = side_endpoints(pc, se.side_a);
    Ok((s.min(e), s.max(e)))
}

/// Structural checks: no side is shared twice, both sides of every edge
/// agree on corners, orientation flags, and boundary rows (C0), and all
/// patches meeting at a corner place it at the same point.
pub fn validate_complex(c: &PatchComplex) -> Result<(), PatchError> {
    if c.version != COMPLEX_FORMAT_VERSION {
        return Err(PatchError::UnsupportedVersion { version: c.version });
    }
    if c.patch_corners.len() != c.patches.len() {
        return Err(PatchError::Json(format!(
            "patch_corners has {} entries for {} patches",
            c.patch_corners.len(),
            c.patches.len()
        )));
    }
    let mut used: BTreeSet<(usize, Side)> = BTreeSet::new();
    for (i, se) in c.shared_edges.iter().enumerate() {
        for &(p, s) in &[(se.patch_a, se.side_a), (se.patch_b, se.side_b)] {
            if p >= c.patches.len() {
                return Err(PatchError::UnknownPatch { patch: p });
            }
            if !used.insert((p, s)) {
                return Err(PatchError::SideReuse { patch: p, side: s });
            }
        }
        let (a_s, a_e) = side_endpoints(&c.patch_corners[se.patch_a], se.side_a);
        let (b_s, b_e) = side_endpoints(&c.patch_corners[se.patch_b], se.side_b);
        if (a_s.min(a_e), a_s.max(a_e)) != (b_s.min(b_e), b_s.max(b_e)) {
            return Err(PatchError::CornerMismatch { edge: i });
        }
        if se.orientation_flip != (a_s != b_s) {
            return Err(PatchError::OrientationFlag { edge: i });
        }
        // C0 + left/right decidability
        extract_edge_data(c, i)?;
    }
    // corner consistency: every patch places a given corner id at one point
    let mut positions: BTreeMap<usize, (Vec3r, usize)> = BTreeMap::new();
    for (p, pc) in c.patch_corners.iter().enumerate() {
        let pts = [
            c.patches[p].coeffs[0][0].clone(),
            c.patches[p].coeffs[3][0].clone(),
            c.patches[p].coeffs[3][3].clone(),
            c.patches[p].coeffs[0][3].clone(),
        ];
        for (k, &corner) in pc.iter().enumerate() {
            match positions.get(&corner) {
                None => {
                    positions.insert(corner, (pts[k].clone(), p));
                }
                Some((q, _)) => {
                    if q != &pts[k] {
                        return Err(PatchError::CornerPositionMismatch { corner });
                    }
                }
            }
        }
    }
    if !c.corner_map.is_empty() {
        for corner in positions.keys() {
            if !c.corner_map.contains_key(corner) {
                return Err(PatchError::CornerUnmapped { corner: *corner });
            }
        }
    }
    Ok(())
}

impl PatchComplex {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("complex serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<PatchComplex, PatchError> {
        let c: PatchComplex =
            serde_json::from_str(text).map_err(|e| PatchError::Json(e.to_string()))?;
        if c.version != COMPLEX_FORMAT_VERSION {
            return Err(PatchError::UnsupportedVersion { version: c.version });
        }
        Ok(c)
    }

    /// Exact position of a corner id, read off any patch that carries it.
    pub fn corner_position(&self, corner: usize) -> Option<&Vec3r> {
        for (p, pc) in self.patch_corners.iter().enumerate() {
            for (k, &id) in pc.iter().enumerate() {
                if id == corner {
                    return Some(match k {
                        0 => &self.patches[p].coeffs[0][0],
                        1 => &self.patches[p].coeffs[3][0],
                        2 => &self.patches[p].coeffs[3][3],
                        _ => &self.patches[p].coeffs[0][3],
                    });
                }
            }
        }
        None
    }
}

/// Uniform quad sampling of every patch; patches are left unwelded, so the
/// result has `patches × (s+1)²` vertices.
pub fn tessellate(c: &PatchComplex, samples_per_side: usize) -> Result<Mesh, PatchError> {
    if samples_per_side == 0 {
        return Err(PatchError::BadSampleCount);
    }
    let s = samples_per_side;
    let mut vertices = Vec::with_capacity(c.patches.len() * (s + 1) * (s + 1));
    let mut faces = Vec::with_capacity(c.patches.len() * s * s);
    for patch in &c.patches {
        let base = vertices.len();
        for i in 0..=s {
            let u = Rational::from_ints(i as i64, s as i64);
            for j in 0..=s {
                let v = Rational::from_ints(j as i64, s as i64);
                vertices.push(patch.eval(&u, &v));
            }
        }
        let idx = |i: usize, j: usize| base + i * (s + 1) + j;
        for i in 0..s {
            for j in 0..s {
                faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    Ok(Mesh::new(vertices, faces)?)
}

/// Splits one patch at u = v = 1/2 into a four-patch complex (corner ids:
/// 0..3 outer counter-clockwise from (0,0), 4..7 edge midpoints south/east/
/// north/west, 8 center).
pub fn quad_split_complex(patch: &BezierPatch) -> PatchComplex {
    let half = Rational::from_ints(1, 2);
    let (west, east) = patch.split_u(&half);
    let (sw, nw) = west.split_v(&half);
    let (se, ne) = east.split_v(&half);
    let patches = vec![sw, se, ne, nw];
    let patch_corners = vec![[0, 4, 8, 7], [4, 1, 5, 8], [8, 5, 2, 6], [7, 8, 6, 3]];
    let shared_edges = vec![
        SharedEdge {
            patch_a: 0,
            side_a: Side::U1,
            patch_b: 1,
            side_b: Side::U0,
            orientation_flip: false,
        },
        SharedEdge {
            patch_a: 3,
            side_a: Side::U1,
            patch_b: 2,
            side_b: Side::U0,
            orientation_flip: false,
        },
        SharedEdge {
            patch_a: 0,
            side_a: Side::V1,
            patch_b: 3,
            side_b: Side::V0,
            orientation_flip: false,
        },
        SharedEdge {
            patch_a: 1,
            side_a: Side::V1,
            patch_b: 2,
            side_b: Side::V0,
            orientation_flip: false,
        },
    ];
    PatchComplex {
        version: COMPLEX_FORMAT_VERSION,
        patches,
        shared_edges,
        corner_map: BTreeMap::new(),
        patch_corners,
    }
}

/// Smoothness diagnostic at one split-point corner.
#[derive(Debug, Clone, Serialize)]
pub struct SplitPointReport {
    pub corner: usize,
    pub incident_patches: usize,
    /// opposite boundary curves through the corner meet with equal tangents
    pub through_tangent_ok: bool,
    /// cross-boundary first derivatives of each incident patch pair agree
    /// at the corner
    pub cross_c1_ok: bool,
}

impl SplitPointReport {
    pub fn c1_ok(&self) -> bool {
        self.through_tangent_ok && self.cross_c1_ok
    }
}

/// Checks, at every corner recorded as an edge split point, whether the
/// four incident patches join C¹ there: the two through-curves must have
/// matching end tangents and each patch pair must agree on the
/// cross-boundary derivative at the corner.
pub fn split_point_reports(c: &PatchComplex) -> Result<Vec<SplitPointReport>, PatchError> {
    let mut reports = Vec::new();
    for (&corner, origin) in &c.corner_map {
        if !matches!(origin, CornerOrigin::EdgeSplit { .. }) {
            continue;
        }
        let m = c
            .corner_position(corner)
            .ok_or(PatchError::CornerPositionMismatch { corner })?
            .clone();
        // incident shared edges and their patch pairs
        let mut incident: Vec<(usize, [usize; 2])> = Vec::new();
        for (i, se) in c.shared_edges.iter().enumerate() {
            let (s, e) = side_endpoints(&c.patch_corners[se.patch_a], se.side_a);
            if s == corner || e == corner {
                incident.push((i, [se.patch_a, se.patch_b]));
            }
        }
        let mut patch_set: BTreeSet<usize> = BTreeSet::new();
        for (_, ps) in &incident {
            patch_set.extend(ps);
        }
        if incident.len() != 4 {
            reports.push(SplitPointReport {
                corner,
                incident_patches: patch_set.len(),
                through_tangent_ok: false,
                cross_c1_ok: false,
            });
            continue;
        }

        // Per incident curve: the boundary control point adjacent to the
        // corner, and the cross-boundary derivative vectors at the corner.
        let mut adjacents: Vec<Vec3r> = Vec::with_capacity(4);
        let mut cross_ok = true;
        for &(edge, _) in &incident {
            let (lo, _hi) = edge_corners(c, edge)?;
            let data = extract_edge_data(c, edge)?;
            let k_adj = if corner == lo { 1 } else { 2 };
            adjacents.push(data.row_b[k_adj].clone());
            // Bernstein endpoint values are the end coefficients, so the
            // derivative comparison at the corner needs no evaluation.
            let k_end = if corner == lo { 0 } else { 3 };
            let dp2_end = (&data.row_p1[k_end] - &data.row_b[k_end]).scale(&Rational::from_int(3));
            let dq2_end = (&data.row_b[k_end] - &data.row_q2[k_end]).scale(&Rational::from_int(3));
            if dp2_end != dq2_end {
                cross_ok = false;
            }
        }
        // Opposite curves are the ones not sharing an incident patch; a
        // C¹ through-curve needs its two halves' adjacent points to be
        // mirror images about the corner.
        let two_m = m.scale(&Rational::from_int(2));
        let mut through_ok = true;
        let mut paired = 0usize;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let pi: BTreeSet<usize> = incident[i].1.iter().copied().collect();
                if incident[j].1.iter().any(|p| pi.contains(p)) {
                    continue;
                }
                paired += 1;
                if &adjacents[i] + &adjacents[j] != two_m {
                    through_ok = false;
                }
            }
        }
        if paired != 2 {
            through_ok = false;
        }
        reports.push(SplitPointReport {
            corner,
            incident_patches: patch_set.len(),
            through_tangent_ok: through_ok,
            cross_c1_ok: cross_ok,
        });
    }
    Ok(reports)
}
