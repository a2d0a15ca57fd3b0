//! Exact construction and verification of bi-cubic patch complexes over
//! subdivision surfaces.
//!
//! The pipeline: load or build a closed polyhedral mesh, refine it with
//! Doo-Sabin subdivision, place one bi-cubic Bernstein-Bézier patch per
//! refined vertex with corners at facet limit points, and then decide —
//! in exact rational arithmetic, with zero tolerance — whether neighboring
//! patches meet with tangent-plane (G¹) continuity. The bundled reference
//! tables pin down a regular-tetrahedron complex whose shared boundaries
//! provably fail that test; the search module recovers which construction
//! parameters reproduce those tables.

pub mod bernstein;
pub mod counterexample;
pub mod exact;
pub mod g1;
pub mod io;
pub mod mesh;
pub mod patch;
pub mod search;
pub mod subdivide;

pub use bernstein::{vecpoly_det3, BernsteinPoly, VecPoly3};
pub use exact::{binomial, normalize_primitive_slice, ParseRationalError, Rational, Vec3r};
pub use g1::{
    check_complex, edge_derivatives, g1_necessary_test, normal_jump, normal_jump_edge,
    unbiased_test, ComplexCheck, G1Error, G1Report, NormalJumpReport, Verdict,
};
pub use io::{load_mesh_path, load_mesh_str, save_mesh_path, save_mesh_string, IoError, MeshFormat};
pub use mesh::{make_cube, make_tetrahedron, Mesh, MeshError, MeshStats};
pub use patch::{
    build_complex, build_from_mesh, edge_corners, extract_edge_data, quad_split_complex,
    split_point_reports, tessellate, validate_complex, BezierPatch, ConstructionConfig,
    CornerLayout, CornerOrigin, EdgeData, InteriorRule, PatchComplex, PatchError, SharedEdge, Side,
    SplitPointReport,
};
pub use search::{
    enumerate_configs, proportional_residual, run_search, MatchQuality, Presentation, SearchResult,
};
pub use subdivide::{
    ds_refine, ds_step, ds_weights, face_offsets, LimitMethod, RefinementTrace, SubdivideError,
    WeightVariant,
};
