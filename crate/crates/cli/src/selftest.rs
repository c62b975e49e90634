//! Quick numerical sanity checks against closed-form values.

use num_complex::Complex64;
use qdbench::coinflip::{helstrom, usd_probability};
use qdbench::fock::{apply_beamsplitter, FockBasis, PureState};
use qdbench::numlin::HermitianMatrix;
use qdbench::tokens::{ideal_qubit_states, noise_tolerance, TokenProblem};
use std::f64::consts::FRAC_1_SQRT_2;

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }
}

pub fn checks() -> qdbench::Result<Vec<Check>> {
    let basis = FockBasis::new(2, 2)?;
    let out = apply_beamsplitter(&PureState::fock(&basis, &[1, 1])?, 0, 1, 0.5)?;
    let c = |re: f64| Complex64::new(re, 0.0);
    let zero = HermitianMatrix::projector(&[c(1.0), c(0.0)]);
    let plus = HermitianMatrix::projector(&[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
    let tokens = noise_tolerance(&TokenProblem::new(ideal_qubit_states(), 0.0)?)?;
    Ok(vec![
        Check {
            name: "hong-ou-mandel coincidence amplitude",
            value: out.amplitude(&[1, 1]).norm(),
            expected: 0.0,
            tol: 1e-12,
        },
        Check {
            name: "usd of |0> and |+>",
            value: usd_probability(&zero, &plus)?,
            expected: 1.0 - FRAC_1_SQRT_2,
            tol: 1e-6,
        },
        Check {
            name: "helstrom of |0> and |+>",
            value: helstrom(&zero, &plus)?,
            expected: 0.5 + 0.25 * 2f64.sqrt(),
            tol: 1e-9,
        },
        Check {
            name: "ideal-qubit token tolerance, lossless",
            value: tokens.min_error,
            expected: (1.0 - FRAC_1_SQRT_2) / 4.0,
            tol: 1e-6,
        },
    ])
}
