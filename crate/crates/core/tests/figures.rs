use tmesh::cvr::{conjecture_experiment, cvr_graph, Verdict};
use tmesh::dimension::{dim_biquadratic_hier_hbc, dim_biquadratic_hier_hbc_extended, lower_bound_biquadratic_hbc};
use tmesh::embedding::{bilinear_constraints, ordered_constraint_matrix, raw_biquadratic_constraints};
use tmesh::fixtures::load;
use tmesh::hierarchy::{crossing_path, is_crossing_vertex_connected};
use tmesh::oracle::dim_oracle;
use tmesh::rational::{ratio, Point};
use tmesh::SpaceSpec;

fn sbar(m: usize, n: usize) -> SpaceSpec {
    SpaceSpec::new(m, n, m as i32 - 1, n as i32 - 1, true)
}

#[test]
fn figure_two_literal_and_corrected() {
    let lit = load("fig2").unwrap();
    let s = lit.mesh().stats();
    assert_eq!((s.v_plus, s.e, s.f), (5, 6, 12));
    assert_eq!((s.e_h_ledges, s.e_v_ledges), (3, 3));
    assert_eq!(dim_oracle(lit.mesh(), &sbar(2, 2)).unwrap(), 0);

    let fixed = load("fig2_corrected").unwrap();
    let s = fixed.mesh().stats();
    assert_eq!((s.v_plus, s.e, s.f), (6, 6, 13));
    assert_eq!(dim_oracle(fixed.mesh(), &sbar(1, 1)).unwrap(), 6);
    assert_eq!(lower_bound_biquadratic_hbc(&s).unwrap(), 1);
    assert_eq!(dim_oracle(fixed.mesh(), &sbar(2, 2)).unwrap(), 1);
    let raw = raw_biquadratic_constraints(fixed.mesh()).unwrap();
    assert_eq!((raw.unknowns(), raw.rows(), raw.rank(), raw.dimension()), (6, 6, 5, 1));
}

#[test]
fn figure_two_bilinear_embedding() {
    for name in ["fig2", "fig2_corrected"] {
        let m = load(name).unwrap();
        let s = m.mesh().stats();
        let c = bilinear_constraints(m.mesh());
        assert_eq!((c.rows(), c.rank(), c.dimension()), (s.e + 2, s.e + 1, s.v_plus), "{name}");
    }
}

#[test]
fn figure_five_levels_and_isolated_cell() {
    let m = load("fig5").unwrap();
    let h = m.hierarchy().unwrap();
    assert_eq!(h.max_level(), 2);
    let (iso, delta) = h.isolated_cells();
    assert_eq!(delta, 2);
    assert_eq!(iso[0].center, Point::new(ratio(1, 4), ratio(1, 4)));
    assert_eq!(dim_biquadratic_hier_hbc(h).unwrap(), 8);
    assert_eq!(dim_oracle(h.mesh(), &sbar(2, 2)).unwrap(), 8);
}

#[test]
fn figure_six() {
    let m = load("fig6").unwrap();
    let h = m.hierarchy().unwrap();
    let s = h.mesh().stats();
    assert_eq!((s.v_plus, s.e, s.f), (5, 6, 12));
    assert_eq!(lower_bound_biquadratic_hbc(&s).unwrap(), 0);
    assert_eq!(h.delta(), 2);
    assert_eq!(dim_biquadratic_hier_hbc(h).unwrap(), 1);
    assert_eq!(dim_oracle(h.mesh(), &sbar(2, 2)).unwrap(), 1);
    assert!(!is_crossing_vertex_connected(h.mesh()).unwrap());
}

#[test]
fn figure_seven_path_between_levels() {
    let m = load("fig7").unwrap();
    let mesh = m.mesh();
    let a = mesh.vertex_at_point(&Point::new(ratio(11, 8), ratio(1, 4))).unwrap();
    let b = mesh.vertex_at_point(&Point::new(ratio(17, 8), ratio(13, 4))).unwrap();
    let path = crossing_path(mesh, a, b).expect("the two crossing vertices are connected");
    assert_eq!((path[0], *path.last().unwrap()), (a, b));
}

#[test]
fn figure_nine_ordered_matrix() {
    let m = load("fig9").unwrap();
    let h = m.hierarchy().unwrap();
    assert!(is_crossing_vertex_connected(h.mesh()).unwrap());
    let (_, rep) = ordered_constraint_matrix(h).unwrap();
    let s = h.mesh().stats();
    assert_eq!(rep.rank, s.e - 1);
    assert_eq!(rep.dimension, dim_oracle(h.mesh(), &sbar(2, 2)).unwrap());
    assert_eq!(rep.dimension, 8);
}

#[test]
fn figure_eleven_components_and_extension() {
    let m = load("fig11_t1").unwrap();
    let h = m.hierarchy().unwrap();
    let g = cvr_graph(h.mesh());
    assert_eq!(g.components(), 2);
    assert_eq!(h.delta(), 2);
    assert_eq!(h.delta_extended(), 1);
    let ext = h.extend(2, 2, &ratio(1, 2)).unwrap();
    assert_eq!(cvr_graph(&ext).components(), 1);
    let formula = dim_biquadratic_hier_hbc_extended(h, &ratio(1, 2)).unwrap();
    assert_eq!(formula, dim_oracle(&ext, &sbar(2, 2)).unwrap() as i64);
    assert_eq!(conjecture_experiment(h.mesh(), 2, 2).unwrap().verdict, Verdict::Agree);
}
