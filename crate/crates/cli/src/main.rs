//! `dscubic` — build bi-cubic patch complexes from polyhedral meshes by
//! Doo-Sabin refinement and verify tangent-plane continuity exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dscubic_core::counterexample::{
    det_primitive_reference, find_edge_by_corners, fixture_edge, flatten_derivatives,
    flatten_edge, positive_proportional, reference_derivatives_vector, reference_tables_vector,
    COUNTEREXAMPLE_CORNERS, DET_PRIMITIVE_REF, DP1_REF, DP2_REF, DQ2_REF, ROW_B, ROW_P1, ROW_Q2,
};
use dscubic_core::{
    build_from_mesh, check_complex, ds_step, edge_derivatives, extract_edge_data,
    g1_necessary_test, load_mesh_path, make_tetrahedron, normal_jump_edge, run_search,
    save_mesh_string, tessellate, ConstructionConfig, CornerLayout, G1Report, InteriorRule,
    LimitMethod, Mesh, MeshFormat, PatchComplex, Rational, Side, Verdict, WeightVariant,
};

#[derive(Parser)]
#[command(
    name = "dscubic",
    version,
    about = "Doo-Sabin bi-cubic patch complexes with exact G1 verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum WeightsArg {
    Classical,
    MidpointAverage,
}

#[derive(Copy, Clone, ValueEnum)]
enum LimitArg {
    Centroid,
    #[value(alias = "eigen")]
    EigenExtrapolate,
}

#[derive(Copy, Clone, ValueEnum)]
enum LayoutArg {
    #[value(alias = "input")]
    InputFacesAndVertices,
    #[value(alias = "level1")]
    Level1Facets,
}

#[derive(Copy, Clone, ValueEnum)]
enum InteriorArg {
    RefinedMidpoint,
    DirectMidpoint,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    /// exact coplanarity of the three derivative curves (necessary for G1)
    Necessary,
    /// stricter symmetric matching of the two cross-boundary derivatives
    Unbiased,
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Obj,
    Off,
}

#[derive(Copy, Clone, ValueEnum)]
enum TargetArg {
    /// the published 12-point boundary table for the tetrahedron
    Tables,
}

/// Construction parameters shared by every pipeline-facing subcommand.
#[derive(Args)]
struct ConfigArgs {
    /// Doo-Sabin refinement steps before patch extraction
    #[arg(long, default_value_t = 2)]
    steps: usize,
    #[arg(long, value_enum, default_value = "classical")]
    weights: WeightsArg,
    /// how ring-face limit points are taken
    #[arg(long, value_enum, default_value = "eigen-extrapolate")]
    limit: LimitArg,
    /// which mesh level supplies the patch corners
    #[arg(long, value_enum, default_value = "input-faces-and-vertices")]
    layout: LayoutArg,
    /// how near-corner and interior control points are filled in
    #[arg(long, value_enum, default_value = "refined-midpoint")]
    interior: InteriorArg,
}

impl ConfigArgs {
    fn to_config(&self) -> ConstructionConfig {
        ConstructionConfig {
            steps: self.steps,
            weights: match self.weights {
                WeightsArg::Classical => WeightVariant::Classical,
                WeightsArg::MidpointAverage => WeightVariant::MidpointAverage,
            },
            limit_method: match self.limit {
                LimitArg::Centroid => LimitMethod::Centroid,
                LimitArg::EigenExtrapolate => LimitMethod::EigenExtrapolate,
            },
            corner_layout: match self.layout {
                LayoutArg::InputFacesAndVertices => CornerLayout::InputFacesAndVertices,
                LayoutArg::Level1Facets => CornerLayout::Level1Facets,
            },
            interior_rule: match self.interior {
                InteriorArg::RefinedMidpoint => InteriorRule::RefinedMidpoint,
                InteriorArg::DirectMidpoint => InteriorRule::DirectMidpoint,
            },
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Refine a mesh, printing combinatorial statistics per level
    Subdivide {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_enum, default_value = "classical")]
        variant: WeightsArg,
        /// output format (defaults to the output extension)
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a patch complex from a mesh
    Construct {
        input: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// write the complex here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// also sample each patch on an (N+1)x(N+1) grid
        #[arg(long, value_name = "N", requires = "tessellate_out")]
        tessellate: Option<usize>,
        #[arg(long, requires = "tessellate")]
        tessellate_out: Option<PathBuf>,
    },
    /// Verify tangent-plane continuity across every shared edge
    CheckG1 {
        complex: PathBuf,
        #[arg(long, value_enum, default_value = "necessary")]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Estimate the angular jump in unit normals across shared edges
    NormalJump {
        complex: PathBuf,
        /// number of parameter intervals (evaluates samples+1 points)
        #[arg(long, default_value_t = 33)]
        samples: usize,
        /// restrict to one shared edge
        #[arg(long)]
        edge: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Rebuild the published tetrahedron tables and verify each one
    ReproCounterexample {
        /// input tetrahedron scale (any positive rational)
        #[arg(long, default_value = "1260")]
        scale: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Rank every construction config by how well it reproduces the
    /// reference boundary tables
    Search {
        #[arg(long, value_enum, default_value = "tables")]
        target: TargetArg,
        #[arg(long, default_value = "1260")]
        scale: String,
        #[arg(long)]
        json: bool,
    },
    /// Run construction + verification over a directory of meshes
    Course {
        dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 33)]
        samples: usize,
        /// also write a machine-readable TSV here
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Subdivide {
            input,
            steps,
            variant,
            format,
            output,
        } => cmd_subdivide(&input, steps, variant, format, output.as_deref()),
        Cmd::Construct {
            input,
            config,
            output,
            tessellate,
            tessellate_out,
        } => cmd_construct(
            &input,
            &config.to_config(),
            output.as_deref(),
            tessellate,
            tessellate_out.as_deref(),
        ),
        Cmd::CheckG1 {
            complex,
            mode,
            json,
        } => cmd_check_g1(&complex, mode, json),
        Cmd::NormalJump {
            complex,
            samples,
            edge,
            json,
        } => cmd_normal_jump(&complex, samples, edge, json),
        Cmd::ReproCounterexample { scale, config } => {
            cmd_repro(&parse_scale(&scale)?, &config.to_config())
        }
        Cmd::Search {
            target: TargetArg::Tables,
            scale,
            json,
        } => cmd_search(&parse_scale(&scale)?, json),
        Cmd::Course {
            dir,
            config,
            samples,
            tsv,
        } => cmd_course(&dir, &config.to_config(), samples, tsv.as_deref()),
    }
}

fn parse_scale(text: &str) -> Result<Rational> {
    let scale: Rational = text
        .parse()
        .with_context(|| format!("invalid scale {text:?}"))?;
    if scale <= Rational::zero() {
        bail!("scale must be positive, got {scale}");
    }
    Ok(scale)
}

fn load_complex(path: &Path) -> Result<PatchComplex> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    PatchComplex::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_subdivide(
    input: &Path,
    steps: usize,
    variant: WeightsArg,
    format: Option<FormatArg>,
    output: Option<&Path>,
) -> Result<u8> {
    let variant = match variant {
        WeightsArg::Classical => WeightVariant::Classical,
        WeightsArg::MidpointAverage => WeightVariant::MidpointAverage,
    };
    let mut mesh = load_mesh_path(input).with_context(|| format!("loading {}", input.display()))?;
    println!("level 0: {}", mesh.stats());
    for level in 1..=steps {
        mesh = ds_step(&mesh, variant)?;
        println!("level {level}: {}", mesh.stats());
    }
    if let Some(path) = output {
        write_mesh(&mesh, path, format)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn write_mesh(mesh: &Mesh, path: &Path, format: Option<FormatArg>) -> Result<()> {
    let format = match format {
        Some(FormatArg::Obj) => MeshFormat::Obj,
        Some(FormatArg::Off) => MeshFormat::Off,
        None => MeshFormat::from_path(path)
            .with_context(|| format!("cannot infer mesh format for {}", path.display()))?,
    };
    std::fs::write(path, save_mesh_string(mesh, format))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_construct(
    input: &Path,
    config: &ConstructionConfig,
    output: Option<&Path>,
    tessellate_n: Option<usize>,
    tessellate_out: Option<&Path>,
) -> Result<u8> {
    let mesh = load_mesh_path(input).with_context(|| format!("loading {}", input.display()))?;
    let complex = build_from_mesh(&mesh, config)?;
    if let Some(path) = output {
        std::fs::write(path, complex.to_json_string())
            .with_context(|| format!("writing {}", path.display()))?;
        println!("config: {}", config.summary());
        println!(
            "patches={} shared-edges={} corners={}",
            complex.patches.len(),
            complex.shared_edges.len(),
            complex.corner_map.len()
        );
        println!("wrote {}", path.display());
    } else {
        print!("{}", complex.to_json_string());
    }
    if let (Some(n), Some(path)) = (tessellate_n, tessellate_out) {
        let sampled = tessellate(&complex, n)?;
        write_mesh(&sampled, path, None)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::U0 => "u0",
        Side::U1 => "u1",
        Side::V0 => "v0",
        Side::V1 => "v1",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Verdict used for gating under the selected mode: `necessary` gates on
/// pointwise coplanarity, `unbiased` on the stricter symmetric test.
fn effective_verdict(report: &G1Report, mode: ModeArg) -> Verdict {
    match mode {
        ModeArg::Necessary => report.verdict,
        ModeArg::Unbiased => {
            if !report.regular {
                Verdict::Degenerate
            } else if report.unbiased_ok {
                Verdict::G1
            } else {
                Verdict::NotG1
            }
        }
    }
}

fn gate_exit(not_g1: usize, degenerate: usize) -> u8 {
    if not_g1 > 0 {
        1
    } else if degenerate > 0 {
        3
    } else {
        0
    }
}

fn cmd_check_g1(path: &Path, mode: ModeArg, json: bool) -> Result<u8> {
    let complex = load_complex(path)?;
    let check = check_complex(&complex)?;
    let verdicts: Vec<Verdict> = check
        .reports
        .iter()
        .map(|r| effective_verdict(r, mode))
        .collect();
    let g1 = verdicts.iter().filter(|v| **v == Verdict::G1).count();
    let not_g1 = verdicts.iter().filter(|v| **v == Verdict::NotG1).count();
    let degenerate = verdicts.len() - g1 - not_g1;
    let overall = if not_g1 > 0 {
        Verdict::NotG1
    } else if degenerate > 0 {
        Verdict::Degenerate
    } else {
        Verdict::G1
    };
    if json {
        let doc = serde_json::json!({
            "mode": match mode { ModeArg::Necessary => "necessary", ModeArg::Unbiased => "unbiased" },
            "edges": check.reports.len(),
            "g1": g1,
            "not_g1": not_g1,
            "degenerate": degenerate,
            "verdict": overall,
            "reports": check.reports,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for (report, verdict) in check.reports.iter().zip(&verdicts) {
            let e = &complex.shared_edges[report.edge_id];
            println!(
                "edge {} p{}:{}|p{}:{}: {} coplanar={} unbiased={} regular={}",
                report.edge_id,
                e.patch_a,
                side_name(e.side_a),
                e.patch_b,
                side_name(e.side_b),
                verdict,
                yes_no(report.is_coplanar),
                yes_no(report.unbiased_ok),
                yes_no(report.regular),
            );
        }
        println!("summary: g1={g1} not-g1={not_g1} degenerate={degenerate}");
        println!("verdict: {overall}");
    }
    Ok(gate_exit(not_g1, degenerate))
}

fn cmd_normal_jump(path: &Path, samples: usize, edge: Option<usize>, json: bool) -> Result<u8> {
    let complex = load_complex(path)?;
    let edges: Vec<usize> = match edge {
        Some(e) => {
            if e >= complex.shared_edges.len() {
                bail!(
                    "edge {e} out of range; complex has {} shared edges",
                    complex.shared_edges.len()
                );
            }
            vec![e]
        }
        None => (0..complex.shared_edges.len()).collect(),
    };
    let mut reports = Vec::with_capacity(edges.len());
    for e in edges {
        reports.push(normal_jump_edge(&complex, e, samples)?);
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        let mut worst: Option<(usize, f64)> = None;
        for r in &reports {
            println!(
                "edge {}: samples={} max-angle={:e} degenerate-samples={}",
                r.edge_id,
                r.samples,
                r.max_angle,
                r.degenerate_samples.len()
            );
            if worst.is_none_or(|(_, a)| r.max_angle > a) {
                worst = Some((r.edge_id, r.max_angle));
            }
        }
        if let Some((e, a)) = worst {
            println!("max over edges: {a:e} (edge {e})");
        }
    }
    Ok(0)
}

fn fmt_int_rows(rows: &[[i64; 3]]) -> String {
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "[{} {} {}]", r[0], r[1], r[2]).unwrap();
    }
    out
}

struct ProofLine {
    all_pass: bool,
}

impl ProofLine {
    fn new() -> Self {
        ProofLine { all_pass: true }
    }
    fn check(&mut self, name: &str, pass: bool, detail: &str) {
        if pass {
            if detail.is_empty() {
                println!("  {name}: PASS");
            } else {
                println!("  {name}: PASS {detail}");
            }
        } else {
            self.all_pass = false;
            if detail.is_empty() {
                println!("  {name}: FAIL");
            } else {
                println!("  {name}: FAIL {detail}");
            }
        }
    }
}

fn cmd_repro(scale: &Rational, config: &ConstructionConfig) -> Result<u8> {
    let mut proof = ProofLine::new();

    println!("reference 12-point table (published integer form)");
    println!("  p1 {}", fmt_int_rows(&ROW_P1));
    println!("  b  {}", fmt_int_rows(&ROW_B));
    println!("  q2 {}", fmt_int_rows(&ROW_Q2));
    println!("reference derivative rows");
    println!("  dp2 {}", fmt_int_rows(&DP2_REF));
    println!("  dp1 {}", fmt_int_rows(&DP1_REF));
    println!("  dq2 {}", fmt_int_rows(&DQ2_REF));
    println!("reference determinant primitive {DET_PRIMITIVE_REF:?}");

    println!("fixture path (frozen tables, construction-independent)");
    let fixture = fixture_edge();
    let (dp2, dp1, dq2) = edge_derivatives(&fixture);
    let derivs = flatten_derivatives(&dp2, &dp1, &dq2);
    match positive_proportional(&derivs, &reference_derivatives_vector()) {
        Some(lambda) => proof.check("derivative tables", true, &format!("(scale {lambda})")),
        None => proof.check("derivative tables", false, "(no positive scale fits)"),
    }
    let report = g1_necessary_test(&fixture, 0);
    let det_ref = det_primitive_reference();
    proof.check(
        "determinant table",
        report.det_primitive == det_ref,
        &format!("{:?}", report.det_primitive),
    );
    proof.check(
        "verdict NotG1",
        report.verdict == Verdict::NotG1,
        &format!("(got {})", report.verdict),
    );

    println!("pipeline path ({}, scale {scale})", config.summary());
    let mesh = make_tetrahedron(scale)?;
    match build_from_mesh(&mesh, config) {
        Err(err) => {
            proof.check("construction", false, &format!("({err})"));
        }
        Ok(complex) => {
            match find_edge_by_corners(&complex, COUNTEREXAMPLE_CORNERS.0, COUNTEREXAMPLE_CORNERS.1)
            {
                None => proof.check(
                    "12-point table",
                    false,
                    "(layout has no edge joining the reference corners)",
                ),
                Some(edge) => {
                    let data = extract_edge_data(&complex, edge)?;
                    match positive_proportional(&flatten_edge(&data), &reference_tables_vector()) {
                        Some(lambda) => {
                            proof.check("12-point table", true, &format!("(scale {lambda})"))
                        }
                        None => proof.check("12-point table", false, "(no positive scale fits)"),
                    }
                    let (dp2, dp1, dq2) = edge_derivatives(&data);
                    let derivs = flatten_derivatives(&dp2, &dp1, &dq2);
                    match positive_proportional(&derivs, &reference_derivatives_vector()) {
                        Some(lambda) => {
                            proof.check("derivative tables", true, &format!("(scale {lambda})"))
                        }
                        None => proof.check("derivative tables", false, "(no positive scale fits)"),
                    }
                    let report = g1_necessary_test(&data, edge);
                    proof.check(
                        "determinant table",
                        report.det_primitive == det_ref,
                        &format!("{:?}", report.det_primitive),
                    );
                    proof.check(
                        "verdict NotG1",
                        report.verdict == Verdict::NotG1,
                        &format!("(got {})", report.verdict),
                    );
                }
            }
        }
    }

    if proof.all_pass {
        println!("repro-counterexample: PASS");
        Ok(0)
    } else {
        println!("repro-counterexample: FAIL");
        Ok(1)
    }
}

fn cmd_search(scale: &Rational, json: bool) -> Result<u8> {
    let results = run_search(scale)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&results)?);
        return Ok(0);
    }
    println!(
        "search over {} feasible configs, fitted to the published 12-point table",
        results.len()
    );
    for (rank, r) in results.iter().enumerate() {
        let quality = match r.match_quality {
            dscubic_core::MatchQuality::ExactProportional => "exact-proportional",
            dscubic_core::MatchQuality::Mismatch => "mismatch",
        };
        let edge = r
            .best_edge
            .map_or_else(|| "-".to_string(), |e| e.to_string());
        let presentation = r
            .presentation
            .map_or_else(|| "-".to_string(), |p| p.to_string());
        println!(
            "#{rank} residual={} {quality} edge={edge} presentation={presentation} {}",
            r.residual,
            r.config.summary()
        );
    }
    Ok(0)
}

struct CourseRow {
    file: String,
    status: String,
    patches: String,
    edges: String,
    g1: String,
    not_g1: String,
    degenerate: String,
    badness: String,
    max_jump: String,
}

impl CourseRow {
    fn failed(file: String, status: String) -> Self {
        CourseRow {
            file,
            status,
            patches: "-".into(),
            edges: "-".into(),
            g1: "-".into(),
            not_g1: "-".into(),
            degenerate: "-".into(),
            badness: "-".into(),
            max_jump: "-".into(),
        }
    }

    fn cells(&self) -> [&str; 9] {
        [
            &self.file,
            &self.status,
            &self.patches,
            &self.edges,
            &self.g1,
            &self.not_g1,
            &self.degenerate,
            &self.badness,
            &self.max_jump,
        ]
    }
}

const COURSE_HEADER: [&str; 9] = [
    "file",
    "status",
    "patches",
    "edges",
    "g1",
    "not-g1",
    "degenerate",
    "badness",
    "max-jump",
];

fn cmd_course(
    dir: &Path,
    config: &ConstructionConfig,
    samples: usize,
    tsv: Option<&Path>,
) -> Result<u8> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| MeshFormat::from_path(p).is_some())
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .obj or .off files in {}", dir.display());
    }

    let mut rows = Vec::with_capacity(files.len());
    let mut parse_failures = 0usize;
    for path in &files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mesh = match load_mesh_path(path) {
            Ok(m) => m,
            Err(err) => {
                parse_failures += 1;
                rows.push(CourseRow::failed(name, format!("parse-error: {err}")));
                continue;
            }
        };
        let complex = match build_from_mesh(&mesh, config) {
            Ok(c) => c,
            Err(err) => {
                rows.push(CourseRow::failed(name, format!("build-error: {err}")));
                continue;
            }
        };
        let check = check_complex(&complex)?;
        // scale-free badness proxy: the largest integer appearing in any
        // edge's primitive determinant vector
        let badness = check
            .reports
            .iter()
            .flat_map(|r| r.det_primitive.iter())
            .map(|n| n.magnitude())
            .max()
            .map_or_else(|| "0".to_string(), |m| m.to_string());
        let mut max_jump = 0.0f64;
        for edge in 0..complex.shared_edges.len() {
            let jump = normal_jump_edge(&complex, edge, samples)?;
            max_jump = max_jump.max(jump.max_angle);
        }
        rows.push(CourseRow {
            file: name,
            status: "ok".into(),
            patches: complex.patches.len().to_string(),
            edges: complex.shared_edges.len().to_string(),
            g1: check.g1.to_string(),
            not_g1: check.not_g1.to_string(),
            degenerate: check.degenerate.to_string(),
            badness,
            max_jump: format!("{max_jump:e}"),
        });
    }

    let mut widths: Vec<usize> = COURSE_HEADER.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.cells()) {
            *w = (*w).max(cell.len());
        }
    }
    let print_row = |cells: [&str; 9]| {
        let line = cells
            .iter()
            .zip(widths.iter().copied())
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        println!("{}", line.trim_end());
    };
    print_row(COURSE_HEADER);
    for row in &rows {
        print_row(row.cells());
    }

    if let Some(path) = tsv {
        let mut out = String::new();
        out.push_str(&COURSE_HEADER.join("\t"));
        out.push('\n');
        for row in &rows {
            out.push_str(&row.cells().join("\t"));
            out.push('\n');
        }
        std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }

    Ok(if parse_failures > 0 { 2 } else { 0 })
}
