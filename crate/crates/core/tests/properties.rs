use proptest::prelude::*;

use tmesh::dimension::dim_formula_general;
use tmesh::hierarchy::generate_random;
use tmesh::io::{mesh_to_json, parse_mesh};
use tmesh::mesh::random_tmesh;
use tmesh::oracle::{assemble_system_with, dim_oracle, LocalBasis};
use tmesh::SpaceSpec;

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn json_round_trip(seed in 0u64..10_000, cuts in 0usize..10) {
        let m = random_tmesh(seed, 4, 5, cuts);
        let back = parse_mesh(&mesh_to_json(&m)).unwrap();
        prop_assert_eq!(back.mesh(), &m);
    }

    #[test]
    fn faces_vertices_ledges(seed in 0u64..10_000, levels in 0usize..3) {
        let h = generate_random(seed, 3, 3, levels, 0.4, false);
        let s = h.mesh().stats();
        prop_assert_eq!(s.f, s.v_plus + s.e + 1);
    }

    #[test]
    fn bernstein_and_monomial_oracles_agree(seed in 0u64..10_000, cuts in 1usize..6) {
        let m = random_tmesh(seed, 3, 3, cuts);
        for spec in [SpaceSpec::new(2, 2, 1, 1, true), SpaceSpec::new(2, 1, 1, 0, false)] {
            let a = assemble_system_with(&m, &spec, LocalBasis::Monomial).unwrap().dimension();
            let b = assemble_system_with(&m, &spec, LocalBasis::Bernstein).unwrap().dimension();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn general_formula_for_low_smoothness(seed in 0u64..10_000, cuts in 0usize..8) {
        let m = random_tmesh(seed, 4, 4, cuts);
        let spec = SpaceSpec::new(3, 2, 1, 0, false);
        let f = dim_formula_general(&m.stats(), &spec).unwrap();
        prop_assert_eq!(f, dim_oracle(&m, &spec).unwrap() as i64);
    }

    #[test]
    fn associated_tensor_mesh_contains_every_line(seed in 0u64..10_000, cuts in 0usize..8) {
        let m = random_tmesh(seed, 4, 4, cuts);
        let t = m.associated_tensor_mesh();
        prop_assert!(t.is_tensor());
        prop_assert_eq!(t.xs(), m.xs());
        prop_assert_eq!(t.ys(), m.ys());
    }
}
