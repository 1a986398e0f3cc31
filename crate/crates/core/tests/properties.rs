use nrep::canonical::{canonical_decompose, reconstruction_residual, DEFAULT_RANK_TOLERANCE};
use nrep::conditions::{default_probes, run_all, ProbeSet, DEFAULT_TOL};
use nrep::io::MatrixFile;
use nrep::operators::{contract, contract_operator, lift, trace_product};
use nrep::sampling::{random_hermitian, random_pure_state, random_unitary, representable_density};
use nrep::spectral3::analytic_spectrum3;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn contraction_keeps_density_properties(n in 3usize..=7, mix in 1usize..=4, seed in any::<u64>()) {
        let d2 = representable_density(n, 3, mix, seed).unwrap();
        prop_assert_eq!(d2.p(), 2);
        let d1 = contract(&d2, 1).unwrap();
        prop_assert!((d2.operator().trace() - 1.0).abs() < 1e-12);
        prop_assert!((d1.operator().trace() - 1.0).abs() < 1e-12);
        let values = d1.operator().eigenvalues().unwrap();
        prop_assert!(*values.last().unwrap() >= -1e-12);
        prop_assert!(values[0] <= 1.0 / 3.0 + 1e-12);
    }

    #[test]
    fn lift_is_adjoint_to_contraction(n in 3usize..=6, q in 1usize..=2, extra in 1usize..=2, seed in any::<u64>()) {
        let p = (q + extra).min(n);
        prop_assume!(p > q);
        let x = random_hermitian(n, q, seed);
        let h = random_hermitian(n, p, seed ^ 0x5555);
        let lhs = trace_product(&lift(&x, p).unwrap(), &h).unwrap();
        let rhs = trace_product(&x, &contract_operator(&h, q).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn canonical_form_reconstructs(n in 2usize..=9, seed in any::<u64>()) {
        let g = random_pure_state(n, 2, seed);
        let form = canonical_decompose(&g, DEFAULT_RANK_TOLERANCE).unwrap();
        prop_assert_eq!(form.pairs(), n / 2);
        prop_assert!(reconstruction_residual(&g, &form).unwrap() < 1e-10);
        prop_assert!(form.xi.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn spectrum_is_orbital_invariant(n in 4usize..=7, seed in any::<u64>()) {
        let g = random_pure_state(n, 2, seed);
        let h = g.rotate(&random_unitary(n, seed.wrapping_add(1))).unwrap();
        let spec = |w: &nrep::WaveFunction| {
            let form = canonical_decompose(w, DEFAULT_RANK_TOLERANCE).unwrap();
            analytic_spectrum3(&form, w).unwrap().eigenvalues()
        };
        for (a, b) in spec(&g).iter().zip(&spec(&h)) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn matrix_files_roundtrip(n in 2usize..=6, seed in any::<u64>()) {
        let h = random_hermitian(n, 2, seed);
        let file = MatrixFile::from_operator(&h, None);
        let back = MatrixFile::from_json(&file.to_json().unwrap()).unwrap();
        let reloaded = back.to_operator().unwrap();
        prop_assert_eq!(reloaded.matrix(), h.matrix());
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn representable_densities_pass_everything(n in 4usize..=6, mix in 1usize..=3, seed in any::<u64>()) {
        let d2 = representable_density(n, 3, mix, seed).unwrap();
        let probes = default_probes(&d2, ProbeSet::All(2), seed).unwrap();
        for r in run_all(&d2, 3, &probes, DEFAULT_TOL).unwrap() {
            prop_assert!(r.margin >= -1e-10, "{:?}", r);
        }
    }
}
