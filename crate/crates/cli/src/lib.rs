//! The `tmesh` command-line tool.

pub mod render;
pub mod report;
pub mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use tmesh::basis::{
    cardinal_bilinear_basis, cardinal_property_check, hierarchical_basis, linear_independence_check, nonnegativity_check,
    BasisSet,
};
use tmesh::cvr::{conjecture_experiment, cvr_graph, identity_checks, CvrError};
use tmesh::dimension::{
    dim_bilinear, dim_bilinear_hbc, dim_biquadratic_hier_hbc, dim_formula_general, lower_bound_biquadratic_hbc,
};
use tmesh::hierarchy::{generate_random, is_crossing_vertex_connected};
use tmesh::io::{input_to_json, read_mesh, IoError, MeshInput};
use tmesh::oracle::dim_oracle;
use tmesh::rational::{format_rational, parse_rational};
use tmesh::{Orientation, SpaceSpec, VertexClass};

use crate::render::{count_lines, render_svg, RenderOptions};
use crate::report::RunReport;
use crate::suites::{run_suite, Suite};

#[derive(Parser, Debug)]
#[command(name = "tmesh", version, about = "Exact dimension analysis of spline spaces over T-meshes")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for commands that draw random meshes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Counts, l-edges and vertex classes of a mesh.
    Stats { mesh: PathBuf },
    /// Closed-form dimension values next to the oracle.
    Dim { mesh: PathBuf },
    /// Oracle dimension of one spline space.
    Oracle {
        mesh: PathBuf,
        /// Degrees and smoothness as `m,n,alpha,beta`.
        #[arg(long, default_value = "2,2,1,1")]
        space: String,
        /// Impose homogeneous boundary conditions.
        #[arg(long)]
        hbc: bool,
    },
    /// Builds a basis and checks it.
    Basis {
        mesh: PathBuf,
        #[arg(long, value_enum, default_value_t = BasisChoice::Cardinal)]
        kind: BasisChoice,
    },
    /// CVR graph counts, identities and the conjecture experiment.
    Cvr {
        mesh: PathBuf,
        /// Also write a drawing of the mesh with the graph on top.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Run the conjecture experiment for degrees `m,n`.
        #[arg(long)]
        conjecture: Option<String>,
    },
    /// Extends a mesh by `m` lines on the left and right and `n` below and above.
    Extend {
        mesh: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Spacing of the added lines; a quarter of the domain per step when omitted.
        #[arg(long)]
        margin: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random hierarchical mesh.
    Gen {
        #[arg(long, default_value_t = 4)]
        rows: usize,
        #[arg(long, default_value_t = 4)]
        cols: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0.3)]
        prob: f64,
        /// Retry until the mesh is crossing-vertex-connected.
        #[arg(long)]
        cvc: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Runs a property suite on a mesh file or a random mesh.
    Verify {
        mesh: Option<PathBuf>,
        /// Random mesh parameters, e.g. `seed=7,levels=2,cvc`.
        #[arg(long)]
        random: Option<String>,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Draws a mesh as SVG.
    Render {
        mesh: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        cvr: bool,
        #[arg(long)]
        levels: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Cardinal,
    Hierarchical,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| IoError::File { path: path.display().to_string(), source }.into())
}

fn parse_usizes(text: &str, count: usize, what: &str) -> Result<Vec<usize>, CliError> {
    let parts: Result<Vec<usize>, _> = text.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match parts {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(CliError::Usage(format!("{what} must be {count} comma-separated integers, got '{text}'"))),
    }
}

fn parse_space(text: &str, hbc: bool) -> Result<SpaceSpec, CliError> {
    let parts: Result<Vec<i64>, _> = text.split(',').map(|p| p.trim().parse::<i64>()).collect();
    match parts.as_deref() {
        Ok([m, n, a, b]) if *m >= 0 && *n >= 0 => {
            let spec = SpaceSpec::new(*m as usize, *n as usize, *a as i32, *b as i32, hbc);
            spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(spec)
        }
        _ => Err(CliError::Usage(format!("--space must be m,n,alpha,beta, got '{text}'"))),
    }
}

/// Parameters of `verify --random`.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub levels: usize,
    pub prob: f64,
    pub cvc: bool,
}

impl RandomParams {
    pub fn parse(text: &str, default_seed: u64) -> Result<Self, CliError> {
        let mut p = RandomParams { seed: default_seed, rows: 4, cols: 4, levels: 2, prob: 0.3, cvc: false };
        let bad = |item: &str| CliError::Usage(format!("bad --random item '{item}'"));
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                None if item == "cvc" => p.cvc = true,
                Some(("seed", v)) => p.seed = v.parse().map_err(|_| bad(item))?,
                Some(("rows", v)) => p.rows = v.parse().map_err(|_| bad(item))?,
                Some(("cols", v)) => p.cols = v.parse().map_err(|_| bad(item))?,
                Some(("levels", v)) => p.levels = v.parse().map_err(|_| bad(item))?,
                Some(("prob", v)) => p.prob = v.parse().map_err(|_| bad(item))?,
                Some(("cvc", v)) => p.cvc = v.parse().map_err(|_| bad(item))?,
                _ => return Err(bad(item)),
            }
        }
        if p.rows == 0 || p.cols == 0 || !(0.0..=1.0).contains(&p.prob) {
            return Err(CliError::Usage(format!("invalid random mesh parameters {p:?}")));
        }
        Ok(p)
    }
}

fn mesh_summary(r: &mut RunReport, input: &MeshInput) {
    let s = input.mesh().stats();
    r.value("stats", &s);
    if let Some(h) = input.hierarchy() {
        r.value("delta", h.delta());
        r.value("max_level", h.max_level());
    }
}

fn cmd_stats(r: &mut RunReport, input: &MeshInput) -> Result<(), CliError> {
    let mesh = input.mesh();
    mesh_summary(r, input);
    let ledges: Vec<String> = mesh
        .ledges()
        .iter()
        .filter(|l| !l.is_boundary)
        .map(|l| {
            let (line, run) = match l.orientation {
                Orientation::H => ("y", "x"),
                Orientation::V => ("x", "y"),
            };
            format!(
                "{line}={} {run}=[{}, {}]",
                format_rational(&l.line_coord),
                format_rational(&l.lo),
                format_rational(&l.hi)
            )
        })
        .collect();
    r.value("interior_ledges", ledges);
    let classes = mesh.classify_vertices();
    let count = |c: VertexClass| classes.iter().filter(|&&x| x == c).count();
    r.value("crossing_vertices", count(VertexClass::Crossing));
    r.value("horizontal_t_vertices", count(VertexClass::HTee));
    r.value("vertical_t_vertices", count(VertexClass::VTee));
    r.value("boundary_vertices", count(VertexClass::Boundary) + count(VertexClass::Corner));
    let s = mesh.stats();
    r.check_eq("F = V+ + E + 1", s.v_plus + s.e + 1, s.f);
    if let Some(h) = input.hierarchy() {
        let cvc = is_crossing_vertex_connected(h.mesh()).map_err(failed)?;
        r.value("crossing_vertex_connected", cvc);
    }
    Ok(())
}

fn cmd_dim(r: &mut RunReport, input: &MeshInput) -> Result<(), CliError> {
    let mesh = input.mesh();
    let s = mesh.stats();
    mesh_summary(r, input);
    let oracle = |spec: SpaceSpec| dim_oracle(mesh, &spec).map_err(failed);
    let bil = oracle(SpaceSpec::bilinear(false))?;
    r.check_eq("dim S(1,1,0,0) = V+ + Vb", dim_bilinear(&s), bil);
    let bil_hbc = oracle(SpaceSpec::bilinear(true))?;
    r.check_eq("dim S̄(1,1,0,0) = V+", dim_bilinear_hbc(&s), bil_hbc);
    let biq = oracle(SpaceSpec::biquadratic(true))?;
    r.value("oracle S̄(2,2,1,1)", biq);
    if let Ok(bound) = lower_bound_biquadratic_hbc(&s) {
        r.value("lower bound V+ - E + 1", bound);
        r.check("dim S̄(2,2,1,1) >= V+ - E + 1", format!(">= {bound}"), biq, biq as i64 >= bound);
    }
    if let Some(h) = input.hierarchy() {
        match dim_biquadratic_hier_hbc(h) {
            Ok(f) => r.check_eq("dim S̄(2,2,1,1) = V+ - E + delta", f, biq as i64),
            Err(e) => r.value("hierarchical formula", format!("not applicable: {e}")),
        }
    }
    for spec in [
        SpaceSpec::new(2, 2, 0, 0, false),
        SpaceSpec::new(3, 3, 0, 0, false),
        SpaceSpec::new(3, 3, 1, 1, false),
    ] {
        let f = dim_formula_general(&s, &spec).map_err(failed)?;
        r.check_eq(format!("dim {spec} general formula"), f, oracle(spec)? as i64);
    }
    Ok(())
}

fn basis_checks(r: &mut RunReport, b: &BasisSet, v_plus: usize) {
    r.value("functions", b.len());
    r.check_eq("count = V+", v_plus, b.len());
    r.check_eq("linearly independent", true, linear_independence_check(b));
}

fn cmd_basis(r: &mut RunReport, input: &MeshInput, kind: BasisChoice) -> Result<(), CliError> {
    let mesh = input.mesh();
    let v_plus = mesh.stats().v_plus;
    match kind {
        BasisChoice::Cardinal => {
            let b = cardinal_bilinear_basis(mesh).map_err(failed)?;
            basis_checks(r, &b, v_plus);
            r.check_eq("one at its own crossing vertex, zero at the others", true, cardinal_property_check(&b));
            r.check_eq("nonnegative", true, nonnegativity_check(&b));
        }
        BasisChoice::Hierarchical => {
            let h = input
                .hierarchy()
                .ok_or_else(|| CliError::Usage("the hierarchical basis needs a hierarchical mesh file".into()))?;
            let b = hierarchical_basis(h).map_err(failed)?;
            basis_checks(r, &b, v_plus);
        }
    }
    Ok(())
}

fn cmd_cvr(r: &mut RunReport, input: &MeshInput, svg: Option<&Path>, conjecture: Option<&str>) -> Result<(), CliError> {
    let mesh = input.mesh();
    let g = cvr_graph(mesh);
    r.value("nodes", g.v());
    r.value("edges", g.e());
    r.value("faces", g.faces);
    r.value("components", g.components());
    if let Some(h) = input.hierarchy() {
        let rep = match identity_checks(mesh, &g, h.delta()) {
            Ok(rep) => rep,
            Err(CvrError::IdentityViolated(rep)) => *rep,
        };
        for (name, ok) in rep.checks {
            r.check(name, "holds", if ok { "holds" } else { "violated" }, ok);
        }
    }
    if let Some(text) = conjecture {
        let mn = parse_usizes(text, 2, "--conjecture")?;
        if mn[0] < 2 || mn[1] < 2 {
            return Err(CliError::Usage("--conjecture needs m, n >= 2".into()));
        }
        let c = conjecture_experiment(mesh, mn[0], mn[1]).map_err(failed)?;
        r.value("conjecture", &c);
    }
    if let Some(path) = svg {
        write_file(path, &render_svg(input, RenderOptions { levels: false, cvr: true }))?;
        r.value("svg", path.display().to_string());
    }
    Ok(())
}

fn emit_mesh(r: &mut RunReport, doc: &str, output: Option<&Path>) -> Result<Option<String>, CliError> {
    match output {
        Some(path) => {
            write_file(path, doc)?;
            r.value("written", path.display().to_string());
            Ok(None)
        }
        None => Ok(Some(doc.to_string())),
    }
}

/// Runs one parsed command. `Ok(Some(text))` means `text` replaces the report as the output.
pub fn execute(cli: &Cli, r: &mut RunReport) -> Result<Option<String>, CliError> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Stats { mesh } => {
            r.input("mesh", mesh.display());
            cmd_stats(r, &read_mesh(mesh)?)?;
        }
        Command::Dim { mesh } => {
            r.input("mesh", mesh.display());
            cmd_dim(r, &read_mesh(mesh)?)?;
        }
        Command::Oracle { mesh, space, hbc } => {
            r.input("mesh", mesh.display());
            let spec = parse_space(space, *hbc)?;
            r.input("space", spec);
            let input = read_mesh(mesh)?;
            r.value("dimension", dim_oracle(input.mesh(), &spec).map_err(failed)?);
        }
        Command::Basis { mesh, kind } => {
            r.input("mesh", mesh.display());
            r.input("kind", format!("{kind:?}").to_lowercase());
            cmd_basis(r, &read_mesh(mesh)?, *kind)?;
        }
        Command::Cvr { mesh, svg, conjecture } => {
            r.input("mesh", mesh.display());
            cmd_cvr(r, &read_mesh(mesh)?, svg.as_deref(), conjecture.as_deref())?;
        }
        Command::Extend { mesh, m, n, margin, output } => {
            r.input("mesh", mesh.display());
            let input = read_mesh(mesh)?;
            let ext = match margin {
                Some(t) => {
                    let mg = parse_rational(t).map_err(|e| CliError::Usage(e.to_string()))?;
                    input.mesh().extend(*m, *n, &mg)
                }
                None => input.mesh().extend_default(*m, *n),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            r.value("stats", ext.stats());
            let doc = input_to_json(&MeshInput::Flat(Arc::new(ext)));
            return emit_mesh(r, &doc, output.as_deref());
        }
        Command::Gen { rows, cols, levels, prob, cvc, output } => {
            if *rows == 0 || *cols == 0 || !(0.0..=1.0).contains(prob) {
                return Err(CliError::Usage("rows and cols must be positive and prob within [0, 1]".into()));
            }
            r.input("seed", seed);
            let h = generate_random(seed, *rows, *cols, *levels, *prob, *cvc);
            r.value("stats", h.mesh().stats());
            let doc = input_to_json(&MeshInput::Hierarchical(h));
            return emit_mesh(r, &doc, output.as_deref());
        }
        Command::Verify { mesh, random, suite } => {
            let suite = Suite::from_str(suite).map_err(|e| CliError::Usage(e.to_string()))?;
            let input = match (mesh, random) {
                (Some(path), None) => {
                    r.input("mesh", path.display());
                    read_mesh(path)?
                }
                (None, Some(text)) => {
                    let p = RandomParams::parse(text, seed)?;
                    r.input("random", text);
                    r.input("seed", p.seed);
                    MeshInput::Hierarchical(generate_random(p.seed, p.rows, p.cols, p.levels, p.prob, p.cvc))
                }
                _ => return Err(CliError::Usage("verify needs exactly one of a mesh file or --random".into())),
            };
            r.input("suite", format!("{suite:?}").to_lowercase());
            mesh_summary(r, &input);
            run_suite(suite, &input, r);
            r.sort_checks();
        }
        Command::Render { mesh, svg, cvr, levels } => {
            r.input("mesh", mesh.display());
            let input = read_mesh(mesh)?;
            let text = render_svg(&input, RenderOptions { levels: *levels, cvr: *cvr });
            write_file(svg, &text)?;
            r.value("svg", svg.display().to_string());
            r.value("lines", count_lines(&text));
        }
    }
    Ok(None)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Stats { .. } => "stats",
        Command::Dim { .. } => "dim",
        Command::Oracle { .. } => "oracle",
        Command::Basis { .. } => "basis",
        Command::Cvr { .. } => "cvr",
        Command::Extend { .. } => "extend",
        Command::Gen { .. } => "gen",
        Command::Verify { .. } => "verify",
        Command::Render { .. } => "render",
    }
}

/// Runs the tool and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let start = Instant::now();
    let mut report = RunReport::new(command_name(&cli.command));
    match execute(&cli, &mut report) {
        Ok(replacement) => {
            report.timing_ms = start.elapsed().as_millis();
            match replacement {
                Some(text) => print!("{text}"),
                None if cli.json => println!("{}", report.to_json()),
                None => print!("{}", report.to_text()),
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
