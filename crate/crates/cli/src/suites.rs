//! Property suites run by `verify`.

use std::fmt;
use std::str::FromStr;

use tmesh::basis::{
    cardinal_bilinear_basis, cardinal_property_check, hierarchical_basis, linear_independence_check,
    nonnegativity_check, support_bound_check, unity_report,
};
use tmesh::cvr::{conjecture_experiment, cvr_graph, identity_checks, CvrError, Verdict};
use tmesh::dimension::{
    dim_biquadratic_hier_hbc, dim_formula_general, dim_theorem_2_1_check, lower_bound_biquadratic_hbc,
};
use tmesh::embedding::{
    bilinear_constraints, biquadratic_constraints, ordered_constraint_matrix, raw_biquadratic_constraints,
    sparsity_violations,
};
use tmesh::hierarchy::is_crossing_vertex_connected;
use tmesh::io::MeshInput;
use tmesh::oracle::dim_oracle;
use tmesh::rational::ratio;
use tmesh::SpaceSpec;

use crate::report::RunReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Euler,
    Bilinear,
    Biquadratic,
    Embedding,
    Basis,
    Cvr,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["euler", "bilinear", "biquadratic", "embedding", "basis", "cvr", "all"];

    fn members(self) -> Vec<Suite> {
        use Suite::*;
        match self {
            All => vec![Euler, Bilinear, Biquadratic, Embedding, Basis, Cvr],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown suite '{}', expected one of {}", self.0, Suite::NAMES.join(", "))
    }
}

impl std::error::Error for UnknownSuite {}

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "euler" => Suite::Euler,
            "bilinear" => Suite::Bilinear,
            "biquadratic" => Suite::Biquadratic,
            "embedding" => Suite::Embedding,
            "basis" => Suite::Basis,
            "cvr" => Suite::Cvr,
            "all" => Suite::All,
            other => return Err(UnknownSuite(other.to_string())),
        })
    }
}

/// Runs `suite` on `input` and appends its checks to `r`.
pub fn run_suite(suite: Suite, input: &MeshInput, r: &mut RunReport) {
    for s in suite.members() {
        match s {
            Suite::Euler => euler(input, r),
            Suite::Bilinear => bilinear(input, r),
            Suite::Biquadratic => biquadratic(input, r),
            Suite::Embedding => embedding(input, r),
            Suite::Basis => basis(input, r),
            Suite::Cvr => cvr(input, r),
            Suite::All => unreachable!("expanded by members()"),
        }
    }
}

fn fail(r: &mut RunReport, name: &str, expected: &str, err: impl fmt::Display) {
    r.check(name, expected, format!("error: {err}"), false);
}

fn euler(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let s = mesh.stats();
    r.check_eq("euler.faces_eq_vplus_plus_e_plus_1", s.v_plus + s.e + 1, s.f);
    let segments = mesh.hsegments().len() + mesh.vsegments().len();
    let lhs = mesh.vertices().len() as i64 - segments as i64 + s.f as i64;
    r.check_eq("euler.planar_characteristic", 1, lhs);
    r.check_eq("euler.ledge_split", s.e, s.e_h_ledges + s.e_v_ledges);
}

fn bilinear(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let s = mesh.stats();
    match dim_oracle(mesh, &SpaceSpec::bilinear(true)) {
        Ok(d) => r.check_eq("bilinear.hbc_dim_eq_vplus", s.v_plus, d),
        Err(e) => fail(r, "bilinear.hbc_dim_eq_vplus", &s.v_plus.to_string(), e),
    }
    match dim_oracle(mesh, &SpaceSpec::bilinear(false)) {
        Ok(d) => r.check_eq("bilinear.dim_eq_vplus_plus_vb", s.v_plus + s.v_b, d),
        Err(e) => fail(r, "bilinear.dim_eq_vplus_plus_vb", &(s.v_plus + s.v_b).to_string(), e),
    }
    if s.v_plus > 0 {
        let c = bilinear_constraints(mesh);
        r.check_eq("bilinear.embedding_rows", s.e + 2, c.rows());
        r.check_eq("bilinear.embedding_defective_rank", 1, c.defective_rank());
        r.check_eq("bilinear.embedding_dim", s.v_plus, c.dimension());
    }
}

fn biquadratic(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let s = mesh.stats();
    let oracle = dim_oracle(mesh, &SpaceSpec::biquadratic(true));
    if let Ok(bound) = lower_bound_biquadratic_hbc(&s) {
        match &oracle {
            Ok(d) => r.check("biquadratic.lower_bound", format!(">= {bound}"), d, *d as i64 >= bound),
            Err(e) => fail(r, "biquadratic.lower_bound", &format!(">= {bound}"), e),
        }
    }
    if let Some(h) = input.hierarchy() {
        match (dim_biquadratic_hier_hbc(h), &oracle) {
            (Ok(f), Ok(d)) => r.check_eq("biquadratic.hierarchical_formula", f, *d as i64),
            (Err(e), _) => r.check("biquadratic.hierarchical_formula", "formula applies", format!("skipped: {e}"), true),
            (_, Err(e)) => fail(r, "biquadratic.hierarchical_formula", "oracle value", e),
        }
    }
    for spec in [
        SpaceSpec::new(1, 1, 0, 0, false),
        SpaceSpec::new(2, 2, 0, 0, false),
        SpaceSpec::new(3, 3, 0, 0, false),
        SpaceSpec::new(3, 3, 1, 1, false),
    ] {
        let name = format!("biquadratic.general_formula {spec}");
        let f = dim_formula_general(&s, &spec).expect("degrees satisfy the formula's range");
        match dim_oracle(mesh, &spec) {
            Ok(d) => r.check_eq(name, f, d as i64),
            Err(e) => fail(r, &name, &f.to_string(), e),
        }
    }
    let mut ext_dims = Vec::new();
    for (p, q) in [(1, 2), (1, 1)] {
        let name = format!("biquadratic.extension_identity margin={p}/{q}");
        match dim_theorem_2_1_check(mesh, &ratio(p, q)) {
            Ok(c) => {
                r.check_eq(name, c.dim_s, c.dim_sbar_ext);
                ext_dims.push(c.dim_sbar_ext);
            }
            Err(e) => fail(r, &name, "equal dimensions", e),
        }
    }
    if ext_dims.len() == 2 {
        r.check_eq("biquadratic.extension_margin_invariance", ext_dims[0], ext_dims[1]);
    }
}

fn embedding(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let s = mesh.stats();
    if s.v_plus == 0 {
        return;
    }
    let oracle = dim_oracle(mesh, &SpaceSpec::biquadratic(true));
    match (raw_biquadratic_constraints(mesh), &oracle) {
        (Ok(c), Ok(d)) => {
            r.check_eq("embedding.raw_rows", s.e, c.rows());
            r.check_eq("embedding.raw_dim_eq_oracle", *d, c.dimension());
        }
        (Err(e), _) => fail(r, "embedding.raw_dim_eq_oracle", "oracle value", e),
        (_, Err(e)) => fail(r, "embedding.raw_dim_eq_oracle", "oracle value", e),
    }
    let Some(h) = input.hierarchy() else { return };
    match biquadratic_constraints(h) {
        Ok((c, basis)) => {
            let v = sparsity_violations(h, &c, &basis);
            r.check_eq("embedding.row_sparsity_violations", 0, v.len());
            if let Ok(d) = &oracle {
                r.check_eq("embedding.support_form_dim_eq_oracle", *d, c.dimension());
            }
        }
        Err(e) => fail(r, "embedding.support_form_dim_eq_oracle", "constraint system", e),
    }
    if !matches!(is_crossing_vertex_connected(mesh), Ok(true)) {
        return;
    }
    match ordered_constraint_matrix(h) {
        Ok((_, rep)) => {
            r.check("embedding.ordered_triangular", "true", "true", true);
            r.check_eq("embedding.ordered_rank", s.e - 1, rep.rank);
            if let Ok(d) = &oracle {
                r.check_eq("embedding.ordered_dim_eq_oracle", *d, rep.dimension);
            }
        }
        Err(e) => fail(r, "embedding.ordered_triangular", "true", e),
    }
}

fn basis(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let s = mesh.stats();
    match unity_report(mesh, &ratio(1, 2)) {
        Ok(u) => r.check_eq("basis.partition_of_unity", true, u.inside),
        Err(e) => fail(r, "basis.partition_of_unity", "true", e),
    }
    if s.v_plus == 0 {
        return;
    }
    match cardinal_bilinear_basis(mesh) {
        Ok(b) => {
            r.check_eq("basis.cardinal_count", s.v_plus, b.len());
            r.check_eq("basis.cardinal_interpolates", true, cardinal_property_check(&b));
            r.check_eq("basis.cardinal_nonnegative", true, nonnegativity_check(&b));
            r.check_eq("basis.cardinal_support_bound", true, support_bound_check(&b));
            r.check_eq("basis.cardinal_independent", true, linear_independence_check(&b));
        }
        Err(e) => fail(r, "basis.cardinal_count", &s.v_plus.to_string(), e),
    }
    if let Some(h) = input.hierarchy() {
        match hierarchical_basis(h) {
            Ok(b) => {
                r.check_eq("basis.hierarchical_count", s.v_plus, b.len());
                r.check_eq("basis.hierarchical_independent", true, linear_independence_check(&b));
            }
            Err(e) => fail(r, "basis.hierarchical_count", &s.v_plus.to_string(), e),
        }
    }
}

fn cvr(input: &MeshInput, r: &mut RunReport) {
    let mesh = input.mesh();
    let g = cvr_graph(mesh);
    let delta = input.hierarchy().map_or(g.components().max(1), |h| h.delta());
    let report = match identity_checks(mesh, &g, delta) {
        Ok(rep) => rep,
        Err(CvrError::IdentityViolated(rep)) => *rep,
    };
    for (name, ok) in &report.checks {
        if input.hierarchy().is_none() && !name.starts_with("traversal") {
            continue;
        }
        r.check(format!("cvr.{name}"), "holds", if *ok { "holds" } else { "violated" }, *ok);
    }
    if mesh.stats().v_plus > 0 {
        match conjecture_experiment(mesh, 2, 2) {
            Ok(c) => r.check("cvr.conjecture_2_2", c.lhs, format!("{:?}", c.rhs), c.verdict == Verdict::Agree),
            Err(e) => fail(r, "cvr.conjecture_2_2", "agreement", e),
        }
    }
}
