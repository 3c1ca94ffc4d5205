mod common;

use fnell_core::calculus::{first_derivative, f_value, pairing, second_form, PointJet};
use fnell_core::linalg::{CMatrix, Hermitian};
use num_complex::Complex64;
use proptest::prelude::*;

fn random_hermitian(n: usize, entries: &[f64]) -> Hermitian {
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
    Hermitian::new(m).unwrap()
}

fn conjugated(diag: &[f64], frame: &CMatrix) -> Hermitian {
    Hermitian::from_trusted(frame.mul(&CMatrix::diagonal(diag)).mul(&frame.adjoint()))
}

fn along(a: &Hermitian, h: &Hermitian, t: f64) -> Hermitian {
    Hermitian::from_trusted(a.matrix().add(&h.matrix().scale(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn eigen_frames_are_unitary(entries in prop::collection::vec(-3.0..3.0f64, 9), n in 1usize..=3) {
        let a = random_hermitian(n, &entries);
        let e = a.eigen();
        let av = a.matrix().mul(&e.vectors);
        let vl = e.vectors.mul(&CMatrix::diagonal(&e.values));
        prop_assert!(av.sub(&vl).max_abs() < 1e-10);
        prop_assert!(e.vectors.adjoint().mul(&e.vectors).sub(&CMatrix::identity(n)).max_abs() < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(a.eigen(), e);
    }

    #[test]
    fn derivatives_match_finite_differences(
        raw in prop::collection::vec(-1.5..4.0f64, 3),
        frame_entries in prop::collection::vec(-2.0..2.0f64, 9),
        dir_entries in prop::collection::vec(-1.0..1.0f64, 9),
        n in 2usize..=3,
    ) {
        let frame = random_hermitian(n, &frame_entries).eigen().vectors;
        let h = random_hermitian(n, &dir_entries);
        for op in common::operators(n) {
            let mut lambda = common::admissible(&op, &raw);
            // Keep the spectrum away from the cone boundary and from collisions.
            lambda.iter_mut().enumerate().for_each(|(i, x)| *x += 0.5 + 0.05 * i as f64);
            let a = conjugated(&lambda, &frame);
            let jet = PointJet::new(&op, &a).unwrap();
            let t = 1e-4;
            let fp = f_value(&op, &along(&a, &h, t)).unwrap();
            let fm = f_value(&op, &along(&a, &h, -t)).unwrap();
            let f0 = jet.value();
            let first_fd = (fp - fm) / (2.0 * t);
            let first = pairing(&jet.first_derivative(), h.matrix());
            prop_assert!((first - first_fd).abs() <= 1e-5 * (1.0 + first.abs()), "{}: {first} vs {first_fd}", op.name());
            let second_fd = (fp - 2.0 * f0 + fm) / (t * t);
            let second = jet.second_form(&h);
            prop_assert!((second - second_fd).abs() <= 1e-3 * (1.0 + second.abs()), "{}: {second} vs {second_fd}", op.name());
            prop_assert!(second <= 1e-9);
        }
    }

    #[test]
    fn basis_invariance(
        raw in prop::collection::vec(-1.5..4.0f64, 3),
        f1 in prop::collection::vec(-2.0..2.0f64, 9),
        f2 in prop::collection::vec(-2.0..2.0f64, 9),
    ) {
        let u1 = random_hermitian(3, &f1).eigen().vectors;
        let u2 = random_hermitian(3, &f2).eigen().vectors;
        for op in common::operators(3) {
            let lambda = common::admissible(&op, &raw);
            let a = conjugated(&lambda, &u1);
            let b = Hermitian::from_trusted(u2.adjoint().mul(a.matrix()).mul(&u2));
            let (fa, fb) = (f_value(&op, &a).unwrap(), f_value(&op, &b).unwrap());
            prop_assert!((fa - fb).abs() <= 1e-10 * (1.0 + fa.abs()));
            let da = Hermitian::from_trusted(first_derivative(&op, &a).unwrap()).eigenvalues();
            let db = Hermitian::from_trusted(first_derivative(&op, &b).unwrap()).eigenvalues();
            for (x, y) in da.iter().zip(&db) {
                prop_assert!(*x > 0.0 && (x - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
        }
    }
}

#[test]
fn isotropic_first_derivative_at_multiples_of_identity() {
    for op in common::operators(3) {
        let a = Hermitian::new(CMatrix::identity(3).scale(2.0)).unwrap();
        let d = first_derivative(&op, &a).unwrap();
        let f1 = op.gradient(&[2.0; 3]).unwrap()[0];
        assert!(d.sub(&CMatrix::identity(3).scale(f1)).max_abs() < 1e-12, "{}", op.name());
    }
}

#[test]
fn zero_perturbation_has_zero_second_form() {
    let zero = Hermitian::new(CMatrix::zeros(2)).unwrap();
    for op in common::operators(2) {
        let a = Hermitian::new(CMatrix::diagonal(&[2.0, 1.0])).unwrap();
        assert_eq!(second_form(&op, &a, &zero).unwrap(), 0.0);
    }
}
