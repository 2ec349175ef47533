//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every criterion is made of named sub-checks. The run fails when a sub-check
//! fails that is not listed in `KNOWN_CONFLICTS`.

use std::time::Instant;

use tmesh::basis::{hierarchical_basis, linear_independence_check, partition_of_unity_check};
use tmesh::cvr::{conjecture_experiment, cvr_graph, identity_checks, Verdict};
use tmesh::dimension::{dim_biquadratic_hier_hbc, dim_formula_general, dim_theorem_2_1_check, lower_bound_biquadratic_hbc};
use tmesh::embedding::{bilinear_constraints, ordered_constraint_matrix};
use tmesh::fixtures;
use tmesh::hierarchy::{generate_random, HMesh};
use tmesh::io::MeshInput;
use tmesh::mesh::random_tmesh;
use tmesh::oracle::dim_oracle;
use tmesh::rational::ratio;
use tmesh::{SpaceSpec, TMesh};

/// Sub-checks that fail because the literal transcription of the Figure 2
/// picture has five crossing vertices where the text counts six.
const KNOWN_CONFLICTS: [&str; 2] = ["fig2 bilinear dimension is 6", "fig2 lower bound equality with both sides 1"];

#[derive(Default)]
struct Criterion {
    checks: Vec<(String, bool, String)>,
    notes: Vec<String>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), pass, detail.into()));
    }

    /// One sub-check summarizing `total` trials, recording the first failure.
    fn tally(&mut self, name: &str, total: usize, failures: Vec<String>) {
        let detail = match failures.first() {
            None => format!("{total}/{total}"),
            Some(f) => format!("{}/{total}, first failure: {f}", total - failures.len()),
        };
        self.check(name, failures.is_empty(), detail);
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// Hierarchical meshes with base up to 5x5 and up to three levels.
fn hier(seed: u64) -> HMesh {
    let rows = 2 + (seed % 4) as usize;
    let cols = 2 + ((seed / 4) % 4) as usize;
    let levels = 1 + (seed % 3) as usize;
    let prob = [0.2, 0.3, 0.45][(seed % 5 % 3) as usize];
    generate_random(seed, rows, cols, levels, prob, seed % 2 == 0)
}

fn general(seed: u64) -> TMesh {
    random_tmesh(seed, 5, 5, 4 + (seed % 8) as usize)
}

fn fixture_inputs() -> Vec<(&'static str, MeshInput)> {
    fixtures::ALL.iter().map(|(n, _)| (*n, fixtures::load(n).unwrap())).collect()
}

fn hbc(m: usize, n: usize) -> SpaceSpec {
    SpaceSpec::new(m, n, m as i32 - 1, n as i32 - 1, true)
}

fn c1_topology() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    for seed in 0..200 {
        let h = generate_random(seed, 1 + (seed % 5) as usize, 1 + ((seed / 5) % 5) as usize, (seed % 4) as usize, 0.35, false);
        let s = h.mesh().stats();
        if s.f != s.v_plus + s.e + 1 {
            fails.push(format!("seed {seed}: F={} V+={} E={}", s.f, s.v_plus, s.e));
        }
    }
    c.tally("F = V+ + E + 1 on 200 hierarchical meshes", 200, fails);
    for (name, m) in fixture_inputs() {
        let s = m.mesh().stats();
        c.check(format!("{name} F = V+ + E + 1"), s.f == s.v_plus + s.e + 1, format!("F={} V+={} E={}", s.f, s.v_plus, s.e));
    }
    c
}

fn c2_bilinear() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    for seed in 0..100 {
        let mesh = if seed % 2 == 0 { hier(seed).mesh().clone() } else { general(seed) };
        let d = dim_oracle(&mesh, &hbc(1, 1)).unwrap();
        if d != mesh.stats().v_plus {
            fails.push(format!("seed {seed}: oracle {d}, V+ {}", mesh.stats().v_plus));
        }
    }
    c.tally("oracle dim S̄(1,1,0,0) = V+ on 100 random meshes", 100, fails);
    for (name, m) in fixture_inputs() {
        let d = dim_oracle(m.mesh(), &hbc(1, 1)).unwrap();
        let v = m.mesh().stats().v_plus;
        c.check(format!("{name} oracle = V+"), d == v, format!("oracle {d}, V+ {v}"));
    }
    let fig2 = fixtures::load("fig2").unwrap();
    let d = dim_oracle(fig2.mesh(), &hbc(1, 1)).unwrap();
    c.check("fig2 bilinear dimension is 6", d == 6, format!("literal transcription gives {d}"));
    let corrected = fixtures::load("fig2_corrected").unwrap();
    let d = dim_oracle(corrected.mesh(), &hbc(1, 1)).unwrap();
    c.check("fig2_corrected bilinear dimension is 6", d == 6, format!("{d}"));
    c
}

fn c3_defective_rank() -> Criterion {
    let mut c = Criterion::default();
    let mut meshes: Vec<(String, TMesh)> = Vec::new();
    for seed in 0..60 {
        meshes.push((format!("hier {seed}"), hier(seed).mesh().clone()));
        meshes.push((format!("general {seed}"), general(seed)));
    }
    for (name, m) in fixture_inputs() {
        meshes.push((name.to_string(), m.mesh().clone()));
    }
    let mut fails = Vec::new();
    let mut tested = 0;
    for (name, mesh) in &meshes {
        let s = mesh.stats();
        if s.v_plus == 0 {
            continue;
        }
        tested += 1;
        let k = bilinear_constraints(mesh);
        if k.rows() != s.e + 2 || k.rank() != s.e + 1 {
            fails.push(format!("{name}: rows {} rank {} E {}", k.rows(), k.rank(), s.e));
        }
    }
    c.tally("E+2 rows with rank E+1", tested, fails);
    c
}

fn c4_lower_bound() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    let mut tested = 0;
    let mut equal = 0;
    for seed in 0..1000 {
        if tested == 100 {
            break;
        }
        let mesh = general(seed);
        let Ok(bound) = lower_bound_biquadratic_hbc(&mesh.stats()) else { continue };
        tested += 1;
        let d = dim_oracle(&mesh, &hbc(2, 2)).unwrap() as i64;
        equal += usize::from(d == bound);
        if d < bound {
            fails.push(format!("seed {seed}: oracle {d} < bound {bound}"));
        }
    }
    c.tally("oracle dim S̄(2,2,1,1) >= V+ - E + 1 on random general meshes", tested, fails);
    c.check("100 meshes with crossing vertices", tested == 100, format!("{tested}"));
    c.note(format!("bound attained on {equal} of {tested}"));
    for (label, name) in [("fig2", "fig2"), ("fig2_corrected", "fig2_corrected")] {
        let m = fixtures::load(name).unwrap();
        let d = dim_oracle(m.mesh(), &hbc(2, 2)).unwrap() as i64;
        let b = lower_bound_biquadratic_hbc(&m.mesh().stats()).unwrap();
        c.check(
            format!("{label} lower bound equality with both sides 1"),
            d == 1 && b == 1,
            format!("oracle {d}, bound {b}"),
        );
    }
    c
}

fn c5_hierarchical_dimension() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    let (mut with_isolated, mut tested) = (0, 0);
    for seed in 0.. {
        if tested == 100 {
            break;
        }
        let h = hier(seed);
        let Ok(f) = dim_biquadratic_hier_hbc(&h) else { continue };
        tested += 1;
        with_isolated += usize::from(h.delta() > 1);
        let d = dim_oracle(h.mesh(), &hbc(2, 2)).unwrap() as i64;
        if d != f {
            fails.push(format!("seed {seed}: oracle {d}, formula {f}"));
        }
    }
    c.tally("oracle = V+ - E + delta on 100 hierarchical meshes", tested, fails);
    c.check(
        "sample has meshes with and without isolated cells",
        with_isolated > 0 && with_isolated < tested,
        format!("{with_isolated} with isolated cells"),
    );
    for name in ["fig5", "fig6", "fig9", "fig11_t1"] {
        let m = fixtures::load(name).unwrap();
        let h = m.hierarchy().unwrap();
        let f = dim_biquadratic_hier_hbc(h).unwrap();
        let d = dim_oracle(h.mesh(), &hbc(2, 2)).unwrap() as i64;
        c.check(format!("{name} oracle = formula"), d == f, format!("oracle {d}, formula {f}"));
    }
    let fig6 = fixtures::load("fig6").unwrap();
    let d = dim_oracle(fig6.mesh(), &hbc(2, 2)).unwrap();
    c.check("fig6 dimension is 1", d == 1, format!("{d}"));
    c
}

fn c6_extension() -> Criterion {
    let mut c = Criterion::default();
    let (mut fails, mut margin_fails) = (Vec::new(), Vec::new());
    for seed in 0..50 {
        let mesh = if seed % 2 == 0 { random_tmesh(seed, 4, 4, 2 + (seed % 5) as usize) } else { hier(seed).mesh().clone() };
        let a = dim_theorem_2_1_check(&mesh, &ratio(1, 2)).unwrap();
        let b = dim_theorem_2_1_check(&mesh, &ratio(3, 1)).unwrap();
        if !(a.equal && b.equal) {
            fails.push(format!("seed {seed}: {a:?} {b:?}"));
        }
        if a.dim_sbar_ext != b.dim_sbar_ext {
            margin_fails.push(format!("seed {seed}: {} vs {}", a.dim_sbar_ext, b.dim_sbar_ext));
        }
    }
    c.tally("dim S(2,2,1,1,T) = dim S̄(2,2,1,1,extension)", 50, fails);
    c.tally("extension dimension independent of margin", 50, margin_fails);
    c
}

fn c7_unity() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    for seed in 0..20 {
        let mesh = random_tmesh(seed, 4, 4, (seed % 7) as usize);
        if !partition_of_unity_check(&mesh, &ratio(1, 2)).unwrap() {
            fails.push(format!("seed {seed}"));
        }
    }
    c.tally("cardinal basis sums to one on the domain", 20, fails);
    c
}

fn c8_hierarchical_basis() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    let mut tested = 0;
    for seed in 0.. {
        if tested == 50 {
            break;
        }
        let h = hier(seed);
        let v_plus = h.mesh().stats().v_plus;
        if v_plus == 0 {
            continue;
        }
        tested += 1;
        let b = hierarchical_basis(&h).unwrap();
        if b.len() != v_plus || !linear_independence_check(&b) {
            fails.push(format!("seed {seed}: {} functions, V+ {v_plus}", b.len()));
        }
    }
    c.tally("count = V+ and independent", tested, fails);
    c
}

fn c9_ordered_matrix() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    let mut tested = 0;
    for seed in 0.. {
        if tested == 50 {
            break;
        }
        let h = generate_random(seed, 2 + (seed % 3) as usize, 2 + ((seed / 3) % 3) as usize, 1 + (seed % 3) as usize, 0.35, true);
        let s = h.mesh().stats();
        if s.v_plus == 0 {
            continue;
        }
        tested += 1;
        match ordered_constraint_matrix(&h) {
            Ok((_, rep)) => {
                let d = dim_oracle(h.mesh(), &hbc(2, 2)).unwrap();
                if rep.rank != s.e - 1 || rep.dimension != d {
                    fails.push(format!("seed {seed}: rank {} (E={}), dim {} vs oracle {d}", rep.rank, s.e, rep.dimension));
                }
            }
            Err(e) => fails.push(format!("seed {seed}: {e}")),
        }
    }
    c.tally("triangular with nonzero diagonal, rank E-1, dimension = oracle", tested, fails);
    c
}

fn c10_cvr() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    for seed in 0..200 {
        let h = hier(seed);
        let g = cvr_graph(h.mesh());
        if let Err(e) = identity_checks(h.mesh(), &g, h.delta()) {
            fails.push(format!("seed {seed}: {e}"));
        }
    }
    c.tally("2V+ = E + E_G and F_G = V+ - E + delta", 200, fails);
    let t1 = fixtures::load("fig11_t1").unwrap();
    let k = cvr_graph(t1.mesh()).components();
    c.check("fig11 T1 CVR graph has two components", k == 2, format!("{k}"));
    c
}

fn c11_conjecture() -> Criterion {
    let mut c = Criterion::default();
    let mut fails = Vec::new();
    for seed in 0..60 {
        let h = hier(seed);
        let r = conjecture_experiment(h.mesh(), 2, 2).unwrap();
        if r.verdict != Verdict::Agree {
            fails.push(format!("seed {seed}: lhs {} rhs {:?}", r.lhs, r.rhs));
        }
    }
    c.tally("m=n=2 agrees", 60, fails);
    let (mut supported, mut agree, mut seen) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for seed in 0..400u64 {
        if supported == 20 {
            break;
        }
        seen += 1;
        let h = generate_random(seed, 4, 4, 2, 0.2, true);
        let r = conjecture_experiment(h.mesh(), 3, 3).unwrap();
        if r.rhs.is_none() || r.lhs == 0 {
            continue;
        }
        supported += 1;
        match r.verdict {
            Verdict::Agree => agree += 1,
            _ => disagreements.push(format!("seed {seed}: lhs {} rhs {:?}", r.lhs, r.rhs)),
        }
    }
    c.check("20 meshes with regular CVR graphs and nonzero dimension", supported == 20, format!("{supported} found in {seen} seeds"));
    c.note(format!("m=n=3: {agree} of {supported} agree"));
    for d in disagreements {
        c.note(format!("m=n=3 disagreement, {d}"));
    }
    c
}

fn c12_general_formula() -> Criterion {
    let mut c = Criterion::default();
    for spec in [
        SpaceSpec::new(1, 1, 0, 0, false),
        SpaceSpec::new(2, 2, 0, 0, false),
        SpaceSpec::new(3, 3, 0, 0, false),
        SpaceSpec::new(3, 3, 1, 1, false),
    ] {
        let mut fails = Vec::new();
        for seed in 0..30 {
            let mesh = if seed % 2 == 0 { general(seed) } else { hier(seed).mesh().clone() };
            let f = dim_formula_general(&mesh.stats(), &spec).unwrap();
            let d = dim_oracle(&mesh, &spec).unwrap() as i64;
            if f != d {
                fails.push(format!("seed {seed}: formula {f}, oracle {d}"));
            }
        }
        c.tally(&format!("{spec} formula = oracle"), 30, fails);
    }
    c
}

type Runner = fn() -> Criterion;

const CRITERIA: [(&str, Runner); 12] = [
    ("topological identity F = V+ + E + 1", c1_topology),
    ("bilinear dimension equals V+", c2_bilinear),
    ("bilinear embedding defective rank 1", c3_defective_rank),
    ("biquadratic lower bound", c4_lower_bound),
    ("hierarchical dimension V+ - E + delta", c5_hierarchical_dimension),
    ("extension keeps the dimension", c6_extension),
    ("partition of unity", c7_unity),
    ("hierarchical basis", c8_hierarchical_basis),
    ("ordered constraint matrix", c9_ordered_matrix),
    ("CVR identities", c10_cvr),
    ("conjecture experiment", c11_conjecture),
    ("general formula", c12_general_formula),
];

fn main() {
    let start = Instant::now();
    let results: Vec<(Criterion, u128)> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|(_, run)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let c = run();
                    (c, t.elapsed().as_millis())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut unexpected = Vec::new();
    println!();
    for (i, ((title, _), (c, ms))) in CRITERIA.iter().zip(&results).enumerate() {
        let failed: Vec<&(String, bool, String)> = c.checks.iter().filter(|x| !x.1).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:>2}: {title} ({} checks, {ms} ms)", i + 1, c.checks.len());
        for (name, pass, detail) in &c.checks {
            if !pass || c.checks.len() <= 3 {
                let mark = if *pass { "ok" } else { "FAILED" };
                println!("      {mark}: {name} [{detail}]");
            }
            if !pass && !KNOWN_CONFLICTS.contains(&name.as_str()) {
                unexpected.push(format!("criterion {}: {name} [{detail}]", i + 1));
            }
        }
        for n in &c.notes {
            println!("      note: {n}");
        }
    }
    println!("acceptance run took {:.1} s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected failures:");
        for u in &unexpected {
            println!("  {u}");
        }
        std::process::exit(1);
    }
}
