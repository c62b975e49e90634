use qdbench::numlin::sdp::FEASIBILITY_TOL;
use qdbench::numlin::{sdp_solve, SdpStatus};
use qdbench::sources::{Pumping, QdPopulations};
use qdbench::tokens::{
    cloning_sdp, ideal_qubit_states, noise_tolerance, source_tolerance, TokenProblem, TokenSource,
};

fn dot(pumping: Pumping, eta: f64) -> TokenSource {
    TokenSource::QuantumDot {
        populations: QdPopulations::preset(pumping),
        eta,
    }
}

#[test]
fn tolerance_never_rises_with_allowed_loss() {
    for src in [
        dot(Pumping::Tpe, 0.8),
        TokenSource::RandomizedPds { mu: 0.7 },
    ] {
        let base = src.problem(1.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..=10 {
            let r = noise_tolerance(&base.with_loss(i as f64 / 10.0).unwrap()).unwrap();
            assert!(r.certificate.is_valid(FEASIBILITY_TOL));
            assert!(r.relative_gap <= 1e-7);
            assert!(
                r.min_error <= last + 1e-7,
                "{} at l = {}",
                r.min_error,
                i as f64 / 10.0
            );
            last = r.min_error;
        }
    }
}

#[test]
fn swapping_copies_gives_the_same_optimum() {
    for problem in [
        TokenProblem::new(ideal_qubit_states(), 0.2).unwrap(),
        dot(Pumping::La, 0.6).problem(1.0).unwrap(),
    ] {
        let direct = noise_tolerance(&problem).unwrap();
        let swapped = sdp_solve(&cloning_sdp(&problem, true).unwrap()).unwrap();
        assert_eq!(swapped.status, SdpStatus::Solved);
        assert!((swapped.primal_value - direct.min_error).abs() < 1e-6);
    }
}

#[test]
fn coherence_lowers_tolerance() {
    let pop = QdPopulations::preset(Pumping::Re);
    for eta in [0.4, 1.0] {
        let tol = |coherent| {
            source_tolerance(
                &TokenSource::QuantumDot {
                    populations: pop.with_coherence(coherent),
                    eta,
                },
                1.0,
            )
            .unwrap()
            .min_error
        };
        assert!(tol(false) >= tol(true) - 1e-7, "eta = {eta}");
    }
}

#[test]
fn tolerance_grows_with_collection_efficiency() {
    let mut last = 0.0;
    for eta in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let t = source_tolerance(&dot(Pumping::La, eta), 1.0)
            .unwrap()
            .min_error;
        assert!(t >= last - 1e-7);
        last = t;
    }
}
