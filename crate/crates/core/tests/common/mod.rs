#![allow(dead_code)]

use fnell_core::SymmetricOperator;

/// Every operator kind with every admissible parameter choice in dimension `n`.
pub fn operators(n: usize) -> Vec<SymmetricOperator> {
    let mut ops = vec![SymmetricOperator::monge_ampere(n).unwrap()];
    for k in 1..=n {
        ops.push(SymmetricOperator::log_sigma_k(n, k).unwrap());
        for l in 1..k {
            ops.push(SymmetricOperator::hessian_quotient(n, l, k).unwrap());
        }
        for l in 0..k {
            for t in [0.0, 0.3, 1.0] {
                ops.push(SymmetricOperator::blended_quotient(n, l, k, t).unwrap());
            }
        }
    }
    for k in 1..n {
        ops.push(SymmetricOperator::inverse_sigma_k(n, k).unwrap());
    }
    if n >= 2 {
        let inner = ops.clone();
        for op in inner.into_iter().filter(|o| !o.name().starts_with("blended")) {
            ops.push(SymmetricOperator::composed_with_t(op).unwrap());
        }
    }
    ops
}

/// A point of the operator's cone drawn from the proptest-supplied raw vector:
/// shifted along `𝟏` until admissible.
pub fn admissible(op: &SymmetricOperator, raw: &[f64]) -> Vec<f64> {
    let mut lambda = raw[..op.dimension()].to_vec();
    let mut shift = 0.0;
    while !op.cone().contains(&lambda) {
        shift += 0.25;
        lambda = raw[..op.dimension()].iter().map(|x| x + shift).collect();
    }
    lambda
}
