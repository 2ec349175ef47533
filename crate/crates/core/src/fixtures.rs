//! Meshes from the figures, embedded at build time.

use crate::io::{parse_mesh, MeshInput};

pub const FIG2: &str = include_str!("../fixtures/fig2.json");
pub const FIG2_CORRECTED: &str = include_str!("../fixtures/fig2_corrected.json");
pub const FIG5: &str = include_str!("../fixtures/fig5.json");
pub const FIG6: &str = include_str!("../fixtures/fig6.json");
pub const FIG7: &str = include_str!("../fixtures/fig7.json");
pub const FIG9: &str = include_str!("../fixtures/fig9.json");
pub const FIG11_T1: &str = include_str!("../fixtures/fig11_t1.json");

/// `(name, document)` for every bundled figure.
pub const ALL: [(&str, &str); 7] = [
    ("fig2", FIG2),
    ("fig2_corrected", FIG2_CORRECTED),
    ("fig5", FIG5),
    ("fig6", FIG6),
    ("fig7", FIG7),
    ("fig9", FIG9),
    ("fig11_t1", FIG11_T1),
];

pub fn load(name: &str) -> Option<MeshInput> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| parse_mesh(doc).expect("bundled fixtures are valid"))
}
