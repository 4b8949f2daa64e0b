//! Invariants over seeded random forms, with nalgebra as the eigenvalue
//! oracle.

use nalgebra::DMatrix;
use proptest::prelude::*;

use specgap::analysis::{analyze_form, verify, AnalysisOptions};
use specgap::bounds::{local_sandwich, one_sided_cheeger, two_sided_cheeger, GapEstimate};
use specgap::cheeger::{enumerate_constants, functional_k, functional_kprime};
use specgap::forms::{default_weights, modified_form, Alpha, BirthDeathChain};
use specgap::random::{random_form, RandomFormConfig};
use specgap::spectral::{birth_death_lambda1, lambda0_exact, lambda1_exact, rayleigh_quotient};
use specgap::{Form, Subset};

fn form(seed: u64, killing: bool) -> Form {
    let config = RandomFormConfig {
        killing_probability: if killing { 0.3 } else { 0.0 },
        ..RandomFormConfig::default()
    };
    random_form(seed, &config).unwrap()
}

/// Sorted eigenvalues of `Π^{-1/2} A Π^{-1/2}` with `A` the form matrix.
fn oracle_spectrum(form: &Form) -> Vec<f64> {
    let n = form.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, j, w) in form.edges() {
        a[(i, j)] -= w;
        a[(j, i)] -= w;
        a[(i, i)] += w;
        a[(j, j)] += w;
    }
    for (i, k) in form.killing().iter().enumerate() {
        a[(i, i)] += k;
    }
    let root: Vec<f64> = form.pi().iter().map(|p| p.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / (root[i] * root[j]));
    let mut values: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

fn centered(form: &Form, f: &[f64]) -> Vec<f64> {
    let mean = form.pi_mean(f);
    f.iter().map(|x| x - mean).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dirichlet_is_nonnegative_and_kills_constants(seed in any::<u64>(), c in -5.0f64..5.0) {
        let form = form(seed, false);
        let constant = vec![c; form.n()];
        prop_assert!(form.dirichlet(&constant).abs() < 1e-12);
        let f: Vec<f64> = (0..form.n()).map(|i| ((i as f64) * 1.7 + c).sin()).collect();
        prop_assert!(form.dirichlet(&f) >= 0.0);
    }

    #[test]
    fn default_weights_normalize(seed in any::<u64>(), killing in any::<bool>()) {
        let form = form(seed, killing);
        let params = default_weights(&form, Alpha::One).unwrap();
        let modified = modified_form(&form, &params);
        prop_assert!(modified.max_density() <= 1.0 + 1e-9);
    }

    #[test]
    fn conductances_are_ordered(seed in any::<u64>()) {
        let form = form(seed, false);
        let k = enumerate_constants(&form, Alpha::Zero).unwrap();
        prop_assert!(k.k / 2.0 <= k.k_prime + 1e-12);
        prop_assert!(k.k_prime <= k.k + 1e-12);
    }

    #[test]
    fn functionals_never_undercut_constants(seed in any::<u64>(), values in prop::collection::vec(0.0f64..1.0, 12)) {
        let form = form(seed, false);
        let f = &values[..form.n()];
        prop_assume!(f.iter().any(|&x| (x - f[0]).abs() > 1e-6));
        let k = enumerate_constants(&form, Alpha::Zero).unwrap();
        prop_assert!(functional_k(&form, f).unwrap() >= k.k - 1e-12);
        prop_assert!(functional_kprime(&form, f).unwrap() >= k.k_prime - 1e-12);
    }

    #[test]
    fn eigenvalues_match_oracle(seed in any::<u64>(), killing in any::<bool>()) {
        let form = form(seed, killing);
        let spectrum = oracle_spectrum(&form);
        let scale = spectrum.last().unwrap().max(1.0);
        let lambda0 = lambda0_exact(&form).unwrap().value;
        prop_assert!((lambda0 - spectrum[0]).abs() <= 1e-9 * scale);
        if !killing {
            let lambda1 = lambda1_exact(&form).unwrap().value;
            prop_assert!((lambda1 - spectrum[1]).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn gap_minimizes_rayleigh_quotient(seed in any::<u64>(), values in prop::collection::vec(-1.0f64..1.0, 12)) {
        let form = form(seed, false);
        let f = centered(&form, &values[..form.n()]);
        prop_assume!(form.pi_norm2(&f) > 1e-6);
        let lambda1 = lambda1_exact(&form).unwrap().value;
        prop_assert!(rayleigh_quotient(&form, &f) >= lambda1 - 1e-9);
    }

    #[test]
    fn tridiagonal_gap_matches_dense(death in prop::collection::vec(0.1f64..5.0, 2..40), birth in prop::collection::vec(0.1f64..5.0, 40)) {
        let levels = death.len();
        let chain = BirthDeathChain::new(death, birth[..levels].to_vec()).unwrap();
        let tridiagonal = birth_death_lambda1(&chain).unwrap().value;
        let dense = lambda1_exact(&chain.to_form().unwrap()).unwrap().value;
        prop_assert!((tridiagonal - dense).abs() <= 1e-8 * dense.max(1.0));
    }

    #[test]
    fn certificates_are_sound(seed in any::<u64>(), killing in any::<bool>()) {
        let form = form(seed, killing);
        let n = form.n();
        let phi: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut options = AnalysisOptions { phi: Some(phi), ..AnalysisOptions::default() };
        if n >= 3 {
            options.a = Some(Subset::new(n, [0]).unwrap());
            options.b = Some(Subset::range(n, 0, n - 2));
        }
        let analysis = analyze_form(&form, &options).unwrap();
        let violations = verify(&analysis, 1e-9);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn chained_gap_is_weaker(seed in any::<u64>()) {
        let form = form(seed, false);
        let params = default_weights(&form, Alpha::Half).unwrap();
        let exact = two_sided_cheeger(&form, &params, GapEstimate::Exact).unwrap().value;
        let chained = two_sided_cheeger(&form, &params, GapEstimate::Chained).unwrap().value;
        let one_sided = one_sided_cheeger(&form, &params).unwrap().value;
        prop_assert!(chained <= exact + 1e-12);
        prop_assert!(one_sided <= lambda1_exact(&form).unwrap().value + 1e-9);
    }

    #[test]
    fn sandwich_brackets_gap(seed in any::<u64>()) {
        let form = form(seed, false);
        let n = form.n();
        prop_assume!(n >= 3);
        let a = Subset::new(n, [0]).unwrap();
        let b = Subset::range(n, 0, n - 2);
        let lambda1 = lambda1_exact(&form).unwrap().value;
        if let Ok(s) = local_sandwich(&form, &a, &b) {
            prop_assert!(s.lower.value <= lambda1 + 1e-9);
            prop_assert!(s.upper.value >= lambda1 - 1e-9);
        }
    }
}
