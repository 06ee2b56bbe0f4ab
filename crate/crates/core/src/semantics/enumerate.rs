use thiserror::Error;

use crate::model::{Component, Value};

/// Default cap on the number of enumerated input sequences.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{needed} input sequences exceed the budget of {budget}")]
pub struct BudgetExceeded {
    /// Saturates at `u64::MAX`.
    pub needed: u64,
    pub budget: u64,
}

/// All input sequences of a fixed horizon, indexable in odometer order:
/// per slot value lists are ε first, then the carrier; the last slot varies fastest.
#[derive(Debug, Clone)]
pub struct InputSpace {
    domains: Vec<Vec<Value>>,
    horizon: usize,
    len: u64,
}

impl InputSpace {
    pub fn new(component: &Component, horizon: usize, budget: u64) -> Result<Self, BudgetExceeded> {
        let domains: Vec<Vec<Value>> = component
            .inputs
            .iter()
            .map(|p| std::iter::once(Value::Absent).chain(p.ty.dtype.carrier()).collect())
            .collect();
        let per_slot = domains
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64));
        let len = per_slot.and_then(|p| {
            (0..horizon).try_fold(1u64, |acc, _| acc.checked_mul(p))
        });
        match len {
            Some(len) if len <= budget => Ok(Self {
                domains,
                horizon,
                len,
            }),
            _ => Err(BudgetExceeded {
                needed: len.unwrap_or(u64::MAX),
                budget,
            }),
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// The `index`-th sequence, `rows[t][port]`.
    pub fn get(&self, mut index: u64) -> Vec<Vec<Value>> {
        assert!(index < self.len, "index {index} out of range");
        let mut rows = vec![vec![Value::Absent; self.domains.len()]; self.horizon];
        for t in (0..self.horizon).rev() {
            for (p, d) in self.domains.iter().enumerate().rev() {
                let n = d.len() as u64;
                rows[t][p] = d[(index % n) as usize].clone();
                index /= n;
            }
        }
        rows
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<Vec<Value>>> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// Enumerate all input sequences of `component` up to `horizon` slots.
pub fn enumerate_inputs(
    component: &Component,
    horizon: usize,
    budget: u64,
) -> Result<InputSpace, BudgetExceeded> {
    InputSpace::new(component, horizon, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_dsl;

    fn bool_in() -> Component {
        let (m, _) = load_dsl(
            "model M { component C { in x: Bool out y: Bool function { y = x } } root C }",
        )
        .unwrap();
        m.root_component().clone()
    }

    #[test]
    fn odometer_order() {
        let c = bool_in();
        let space = enumerate_inputs(&c, 2, 100).unwrap();
        assert_eq!(space.len(), 9);
        let first: Vec<String> = space.iter().take(4).map(|r| format!("{}{}", r[0][0], r[1][0])).collect();
        assert_eq!(first, ["εε", "εfalse", "εtrue", "falseε"]);
    }

    #[test]
    fn budget() {
        let c = bool_in();
        assert_eq!(enumerate_inputs(&c, 3, 26).unwrap_err().needed, 27);
        assert_eq!(enumerate_inputs(&c, 100, 10).unwrap_err().needed, u64::MAX);
        assert_eq!(enumerate_inputs(&c, 0, 10).unwrap().len(), 1);
    }
}
