//! Exact analysis of spline spaces over T-meshes and hierarchical T-meshes.

pub mod basis;
pub mod cvr;
pub mod dimension;
pub mod embedding;
pub mod fixtures;
pub mod hierarchy;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod oracle;
pub mod piecewise;
pub mod poly;
pub mod rational;

pub use hierarchy::{CellRef, HMesh};
pub use linalg::RationalMatrix;
pub use mesh::{LEdge, MeshError, MeshStats, Orientation, Rect, TMesh, VertexClass};
pub use oracle::SpaceSpec;
pub use piecewise::PiecewisePoly;
pub use rational::{Point, Rational};
