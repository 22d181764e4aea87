//! Weight mutants: one weight rescaled by one constant factor.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planner::{Weights, WEIGHT_COUNT};

pub const CANONICAL_FACTORS: [f64; 7] = [0.0, 0.5, 0.9, 1.1, 1.5, 2.0, 10.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MutationError {
    #[error("weight index {0} outside 1..=6")]
    IndexOutOfRange(usize),
    #[error("mutation factor {0} must be finite and >= 0")]
    InvalidFactor(f64),
}

/// A mutation operator: multiply the selected weight by `factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationOperator {
    /// 1-based position in the operator list.
    pub index: usize,
    pub factor: f64,
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MO{} (K={})", self.index, self.factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mutant {
    /// 1-based weight index.
    pub weight: usize,
    pub operator: MutationOperator,
    pub weights: Weights,
}

impl Mutant {
    /// File stem used when writing the mutant, e.g. `w3_K0.5`.
    pub fn file_stem(&self) -> String {
        format!("w{}_K{}", self.weight, self.operator.factor)
    }
}

/// The seven canonical operators, in order.
pub fn canonical_operators() -> Vec<MutationOperator> {
    operators_from_factors(&CANONICAL_FACTORS).expect("canonical factors are valid")
}

/// Operators for a user-supplied factor list, numbered from 1.
pub fn operators_from_factors(factors: &[f64]) -> Result<Vec<MutationOperator>, MutationError> {
    factors
        .iter()
        .enumerate()
        .map(|(i, &factor)| {
            if factor.is_finite() && factor >= 0.0 {
                Ok(MutationOperator { index: i + 1, factor })
            } else {
                Err(MutationError::InvalidFactor(factor))
            }
        })
        .collect()
}

/// `base` with weight `i` (1-based) multiplied by `factor`.
pub fn apply(base: &Weights, i: usize, factor: f64) -> Result<Weights, MutationError> {
    if !(1..=WEIGHT_COUNT).contains(&i) {
        return Err(MutationError::IndexOutOfRange(i));
    }
    if !(factor.is_finite() && factor >= 0.0) {
        return Err(MutationError::InvalidFactor(factor));
    }
    let mut w = base.to_array();
    w[i - 1] *= factor;
    Ok(Weights::from_array(w))
}

/// Every (weight, operator) mutant, weight-major.
pub fn generate_mutants(base: &Weights, operators: &[MutationOperator]) -> Result<Vec<Mutant>, MutationError> {
    let mut out = Vec::with_capacity(WEIGHT_COUNT * operators.len());
    for weight in 1..=WEIGHT_COUNT {
        for op in operators {
            out.push(Mutant { weight, operator: *op, weights: apply(base, weight, op.factor)? });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONES: Weights = Weights { w1: 1.0, w2: 1.0, w3: 1.0, w4: 1.0, w5: 1.0, w6: 1.0 };

    #[test]
    fn canonical_set_is_fixed_and_ordered() {
        let ops = canonical_operators();
        let factors: Vec<f64> = ops.iter().map(|o| o.factor).collect();
        assert_eq!(factors, vec![0.0, 0.5, 0.9, 1.1, 1.5, 2.0, 10.0]);
        assert_eq!(ops[0].factor, 0.0);
        assert_eq!(ops.iter().map(|o| o.index).collect::<Vec<_>>(), (1..=7).collect::<Vec<_>>());
        assert_eq!(canonical_operators(), ops);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&ONES, 3, 0.0).unwrap().to_array(), [1.0, 1.0, 0.0, 1.0, 1.0, 1.0]);
        let base = Weights { w1: 0.5, ..ONES };
        assert_eq!(apply(&base, 1, 10.0).unwrap().w1, 5.0);
        assert_eq!(apply(&ONES, 0, 2.0), Err(MutationError::IndexOutOfRange(0)));
        assert_eq!(apply(&ONES, 7, 2.0), Err(MutationError::IndexOutOfRange(7)));
        assert!(apply(&ONES, 1, -1.0).is_err());
    }

    #[test]
    fn canonical_product_has_42_distinct_mutants() {
        let mutants = generate_mutants(&ONES, &canonical_operators()).unwrap();
        assert_eq!(mutants.len(), 42);
        let mut keys: Vec<(usize, usize)> = mutants.iter().map(|m| (m.weight, m.operator.index)).collect();
        assert_eq!(keys[0], (1, 1));
        assert_eq!(keys[7], (2, 1));
        keys.dedup();
        assert_eq!(keys.len(), 42);
        let stems: Vec<String> = mutants.iter().map(Mutant::file_stem).collect();
        assert_eq!(stems[0], "w1_K0");
        assert_eq!(stems[1], "w1_K0.5");
        assert_eq!(stems[41], "w6_K10");
    }

    #[test]
    fn single_operator_gives_one_mutant_per_weight() {
        let ops = operators_from_factors(&[2.0]).unwrap();
        let mutants = generate_mutants(&ONES, &ops).unwrap();
        assert_eq!(mutants.len(), 6);
        assert!(mutants.iter().enumerate().all(|(i, m)| m.weight == i + 1));
    }

    fn weights() -> impl Strategy<Value = Weights> {
        prop::array::uniform6(0.0f64..1e6).prop_map(Weights::from_array)
    }

    proptest! {
        #[test]
        fn identity_factor_is_bitwise_identity(w in weights(), i in 1usize..=6) {
            prop_assert_eq!(apply(&w, i, 1.0).unwrap(), w);
        }

        #[test]
        fn halving_and_doubling_restore_exactly(w in weights(), i in 1usize..=6) {
            let there = apply(&w, i, 2.0).unwrap();
            prop_assert_eq!(apply(&there, i, 0.5).unwrap(), w);
            let there = apply(&w, i, 0.5).unwrap();
            prop_assert_eq!(apply(&there, i, 2.0).unwrap(), w);
        }

        #[test]
        fn mutants_touch_exactly_one_coordinate(w in weights()) {
            for m in generate_mutants(&w, &canonical_operators()).unwrap() {
                let (a, b) = (w.to_array(), m.weights.to_array());
                let changed: Vec<usize> = (0..6).filter(|&k| a[k] != b[k]).collect();
                let base = a[m.weight - 1];
                if base == 0.0 || m.operator.factor == 1.0 {
                    prop_assert!(changed.is_empty());
                } else {
                    prop_assert_eq!(changed, vec![m.weight - 1]);
                }
                prop_assert_eq!(b[m.weight - 1], m.operator.factor * base);
            }
        }
    }
}
