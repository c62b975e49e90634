//! Dense complex linear algebra and a small SDP solver.

mod eigen;
mod matrix;
pub mod sdp;

pub use eigen::{hermitian_eigh, min_eigenvalue, trace_norm, Eigh};
pub use matrix::{CMatrix, HermitianMatrix, HERMITIAN_TOL};
pub use sdp::{
    sdp_solve, DualCertificate, PartialTraceConstraint, SdpProblem, SdpSolution, SdpStatus, Sense,
    TracedFactor,
};

use crate::error::{invalid, Result};

/// `H2(x) = -x log2 x - (1-x) log2(1-x)`, with `H2(0) = H2(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("binary entropy argument {x} outside [0, 1]"));
    }
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let h = binary_entropy(0.02).unwrap();
        let oracle = -(0.02f64.ln() * 0.02 + 0.98f64.ln() * 0.98) / std::f64::consts::LN_2;
        assert!((h - oracle).abs() < 1e-15);
        assert!((h - 0.1414).abs() < 1e-4);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }
}
