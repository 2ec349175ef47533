//! Closed-form dimension formulas and their oracle cross-checks.

use num_traits::Signed;

use crate::hierarchy::HMesh;
use crate::mesh::{MeshError, MeshStats, TMesh};
use crate::oracle::{dim_oracle, OracleError, SpaceSpec};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimensionError {
    #[error("formula needs m >= 2*alpha+1 and n >= 2*beta+1, got {0}")]
    DegreeTooLow(SpaceSpec),
    #[error("formula covers spaces without boundary conditions only, got {0}")]
    HbcNotSupported(SpaceSpec),
    #[error("mesh has no crossing vertices")]
    NoCrossingVertices,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// `F(m+1)(n+1) - E_h(m+1)(β+1) - E_v(n+1)(α+1) + V(α+1)(β+1)` for spaces without HBC.
pub fn dim_formula_general(stats: &MeshStats, spec: &SpaceSpec) -> Result<i64, DimensionError> {
    if spec.hbc {
        return Err(DimensionError::HbcNotSupported(*spec));
    }
    let (m, n) = (spec.m as i64, spec.n as i64);
    let (a, b) = (spec.alpha as i64, spec.beta as i64);
    if m < 2 * a + 1 || n < 2 * b + 1 {
        return Err(DimensionError::DegreeTooLow(*spec));
    }
    let (f, eh, ev, v) = (stats.f as i64, stats.e_h as i64, stats.e_v as i64, stats.v as i64);
    Ok(f * (m + 1) * (n + 1) - eh * (m + 1) * (b + 1) - ev * (n + 1) * (a + 1) + v * (a + 1) * (b + 1))
}

/// `dim S(1,1,0,0) = V⁺ + V^b`.
pub fn dim_bilinear(stats: &MeshStats) -> usize {
    stats.v_plus + stats.v_b
}

/// `dim S̄(1,1,0,0) = V⁺`.
pub fn dim_bilinear_hbc(stats: &MeshStats) -> usize {
    stats.v_plus
}

/// `V⁺ - E + 1`, a lower bound for `dim S̄(2,2,1,1)`.
pub fn lower_bound_biquadratic_hbc(stats: &MeshStats) -> Result<i64, DimensionError> {
    if stats.v_plus == 0 {
        return Err(DimensionError::NoCrossingVertices);
    }
    Ok(stats.v_plus as i64 - stats.e as i64 + 1)
}

fn check_parts(h: &HMesh) -> Result<(), DimensionError> {
    if h.decompose().iter().any(|p| p.mesh().stats().v_plus == 0) {
        return Err(DimensionError::NoCrossingVertices);
    }
    Ok(())
}

/// `V⁺ - E + δ` for a hierarchical mesh.
pub fn dim_biquadratic_hier_hbc(h: &HMesh) -> Result<i64, DimensionError> {
    check_parts(h)?;
    let s = h.mesh().stats();
    Ok(s.v_plus as i64 - s.e as i64 + h.delta() as i64)
}

/// `V⁺ - E + δ` over the extension of a hierarchical mesh, with the
/// extension's own counts and its isolated-cell count.
pub fn dim_biquadratic_hier_hbc_extended(h: &HMesh, margin: &Rational) -> Result<i64, DimensionError> {
    let ext = h.extend(2, 2, margin)?;
    let s = ext.stats();
    if s.v_plus == 0 {
        return Err(DimensionError::NoCrossingVertices);
    }
    Ok(s.v_plus as i64 - s.e as i64 + h.delta_extended() as i64)
}

/// Oracle values on both sides of the extension identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCheck {
    pub dim_s: usize,
    pub dim_sbar_ext: usize,
    pub equal: bool,
}

/// Compares `dim S(2,2,1,1,T)` with `dim S̄(2,2,1,1,T^ε)`, both from the oracle.
pub fn dim_theorem_2_1_check(mesh: &TMesh, margin: &Rational) -> Result<ExtensionCheck, DimensionError> {
    if !margin.is_positive() {
        return Err(MeshError::InvalidMargin.into());
    }
    let dim_s = dim_oracle(mesh, &SpaceSpec::biquadratic(false))?;
    let ext = mesh.extend(2, 2, margin)?;
    let dim_sbar_ext = dim_oracle(&ext, &SpaceSpec::biquadratic(true))?;
    Ok(ExtensionCheck { dim_s, dim_sbar_ext, equal: dim_s == dim_sbar_ext })
}
