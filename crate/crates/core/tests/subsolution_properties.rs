mod common;

use fnell_core::level_set::entry_crossing;
use fnell_core::linalg::{CMatrix, Hermitian};
use fnell_core::operator::ExtendedReal;
use fnell_core::subsolution::{
    dichotomy_check, estimate_kappa, is_c_subsolution_point, omit, quotient_cone_condition,
    sample_far_level_set, schur_horn_pairing, DichotomyBranch,
};
use fnell_core::SymmetricOperator;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bounded iff every ray from μ into μ + Γ_n meets ∂Γ^σ inside radius `1e6`.
fn brute_force_bounded(op: &SymmetricOperator, mu: &[f64], sigma: f64, rays: usize, rng: &mut ChaCha8Rng) -> bool {
    let n = mu.len();
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    while dirs.len() < rays {
        dirs.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }
    dirs.iter().all(|d| {
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = d.iter().map(|x| x / norm).collect();
        match entry_crossing(op, mu, &unit, sigma, 2e6).unwrap() {
            Some(t) => {
                let hit: Vec<f64> = mu.iter().zip(&unit).map(|(m, u)| m + t * u).collect();
                hit.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e6
            }
            None => false,
        }
    })
}

#[test]
fn f_infinity_criterion_agrees_with_ray_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ops = [
        SymmetricOperator::monge_ampere(2).unwrap(),
        SymmetricOperator::log_sigma_k(3, 2).unwrap(),
        SymmetricOperator::hessian_quotient(2, 1, 2).unwrap(),
        SymmetricOperator::hessian_quotient(3, 1, 3).unwrap(),
    ];
    let mut checked = 0;
    while checked < 20 {
        let op = &ops[rng.gen_range(0..ops.len())];
        let n = op.dimension();
        let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let sigma = match op.sup_interior() {
            ExtendedReal::Finite(_) => -rng.gen_range(0.05..2.0),
            _ => rng.gen_range(-2.0..4.0),
        };
        // Keep σ away from every finite f_∞ so the crossing radius stays moderate.
        let near = (0..n).any(|i| match op.f_infinity(&omit(&mu, i)).unwrap() {
            ExtendedReal::Finite(l) => (l - sigma).abs() < 0.02,
            _ => false,
        });
        if near {
            continue;
        }
        let claimed = is_c_subsolution_point(op, &mu, sigma).unwrap();
        assert_eq!(claimed, brute_force_bounded(op, &mu, sigma, 50, &mut rng), "{} μ={mu:?} σ={sigma}", op.name());
        checked += 1;
    }
}

#[test]
fn held_out_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let op = SymmetricOperator::log_sigma_k(3, 2).unwrap();
    let mu = [2.0, 1.5, 1.0];
    let sigma = 1.0;
    let radius = 10.0;
    let kappa = estimate_kappa(&op, &mu, sigma, radius, 500, &mut rng).unwrap().kappa;
    for lambda in sample_far_level_set(&op, sigma, radius, 500, &mut rng).unwrap() {
        assert_ne!(dichotomy_check(&op, &mu, sigma, &lambda, kappa).unwrap(), DichotomyBranch::Violation);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn schur_horn_holds(entries in prop::collection::vec(-3.0..3.0f64, 9), weights in prop::collection::vec(0.0..1.0f64, 3)) {
        let n = 3;
        let mut m = CMatrix::zeros(n);
        let mut it = entries.iter().copied();
        for i in 0..n {
            m[(i, i)] = Complex64::new(it.next().unwrap(), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        let b = Hermitian::new(m).unwrap();
        let mut f = weights.clone();
        f.sort_by(|a, b| a.total_cmp(b));
        prop_assert!(schur_horn_pairing(&f, &b).unwrap());
    }

    #[test]
    fn quotient_condition_is_monotone_in_c(eigs in prop::collection::vec(0.05..4.0f64, 3), c in 0.0..2.0f64, bump in 0.0..1.0f64) {
        for (k, l) in [(2, 1), (3, 1), (3, 2)] {
            if quotient_cone_condition(&eigs, k, l, c).unwrap() {
                prop_assert!(quotient_cone_condition(&eigs, k, l, c + bump).unwrap());
            }
        }
    }
}
