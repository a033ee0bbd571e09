//! Seeded instance generators shared by the test suites.

#![allow(dead_code)]

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use strassen_core::{CostMatrix, GroundSet, Measure, Potential, Rational, Relation};

pub fn ground(n: usize) -> Arc<GroundSet> {
    GroundSet::new((0..n).map(|i| format!("p{i}")).collect()).unwrap()
}

/// Random edges consistent with a random linear order, then closed: every
/// preorder produced this way is a partial order, and every partial order on
/// the ground can appear.
pub fn random_preorder(rng: &mut impl Rng, g: &Arc<GroundSet>) -> Relation {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(0.3) {
                pairs.push((order[a], order[b]));
            }
        }
    }
    Relation::from_pairs(g.clone(), &pairs)
        .unwrap()
        .transitive_reflexive_closure()
}

/// Random rational weights with occasional zeros, normalized exactly.
pub fn random_measure(rng: &mut impl Rng, g: &Arc<GroundSet>) -> Measure {
    let n = g.len();
    loop {
        let raw: Vec<i64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    0
                } else {
                    rng.gen_range(1..=12)
                }
            })
            .collect();
        let total: i64 = raw.iter().sum();
        if total == 0 {
            continue;
        }
        let weights = raw
            .iter()
            .map(|&w| Rational::new(w.into(), total.into()))
            .collect();
        return Measure::new(g.clone(), weights).unwrap();
    }
}

/// Random nonnegative zero-diagonal cost, then all-pairs shortest paths, so
/// the triangle inequality holds by construction.
pub fn random_metric_cost(rng: &mut impl Rng, g: &Arc<GroundSet>) -> CostMatrix {
    let n = g.len();
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::zero()
                    } else {
                        Rational::new(
                            rng.gen_range(0i64..=12).into(),
                            rng.gen_range(1i64..=6).into(),
                        )
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &m[i][k] + &m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    CostMatrix::from_rows(g.clone(), m).unwrap()
}

pub fn random_potential(rng: &mut impl Rng, g: &Arc<GroundSet>) -> Potential {
    let values = (0..g.len())
        .map(|_| {
            Rational::new(
                rng.gen_range(-12i64..=12).into(),
                rng.gen_range(1i64..=6).into(),
            )
        })
        .collect();
    Potential::new(g.clone(), values).unwrap()
}
