use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{ensure_same_ground, GroundSet, IndexSet};
use crate::measure::Measure;
use crate::relation::{CostMatrix, Relation};
use crate::Rational;

/// A rational-valued function on the ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    ground: Arc<GroundSet>,
    values: Vec<Rational>,
}

impl Potential {
    pub fn new(ground: Arc<GroundSet>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ground.len() {
            return Err(Error::validation(format!(
                "potential needs {} values, got {}",
                ground.len(),
                values.len()
            )));
        }
        Ok(Potential { ground, values })
    }

    pub fn constant(ground: Arc<GroundSet>, value: Rational) -> Self {
        let n = ground.len();
        Potential {
            ground,
            values: vec![value; n],
        }
    }

    pub fn zero(ground: Arc<GroundSet>) -> Self {
        Potential::constant(ground, Rational::zero())
    }

    /// 1 on the set, 0 elsewhere.
    pub fn indicator(set: &IndexSet) -> Self {
        let values = set
            .membership()
            .iter()
            .map(|&m| if m { Rational::one() } else { Rational::zero() })
            .collect();
        Potential {
            ground: set.ground().clone(),
            values,
        }
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn negated(&self) -> Potential {
        Potential {
            ground: self.ground.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Support of the positive part.
    pub fn positive_support(&self) -> IndexSet {
        let membership = self.values.iter().map(|v| v > &Rational::zero()).collect();
        IndexSet::from_membership(self.ground.clone(), membership).expect("length preserved")
    }
}

/// Which coordinate the transformed potential lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    First,
    Second,
}

/// Pointwise minimum of c minus the potential over the opposite coordinate:
/// First gives x ↦ min_y (c(x,y) − psi(y)), Second gives y ↦ min_x (c(x,y) − psi(x)).
pub fn c_transform(psi: &Potential, cost: &CostMatrix, direction: Direction) -> Result<Potential> {
    ensure_same_ground(psi.ground(), cost.ground(), "potential and cost")?;
    let n = psi.len();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut best: Option<Rational> = None;
        for b in 0..n {
            let candidate = match direction {
                Direction::First => cost.get(a, b) - psi.value(b),
                Direction::Second => cost.get(b, a) - psi.value(b),
            };
            if best.as_ref().is_none_or(|m| &candidate < m) {
                best = Some(candidate);
            }
        }
        out.push(best.expect("ground sets are nonempty"));
    }
    Potential::new(psi.ground().clone(), out)
}

/// True iff phi(i) + psi(j) ≤ c(i,j) for all pairs.
pub fn check_two_var_feasible(
    phi: &Potential,
    psi: &Potential,
    cost: &CostMatrix,
) -> Result<bool> {
    ensure_same_ground(phi.ground(), psi.ground(), "potential pair")?;
    ensure_same_ground(phi.ground(), cost.ground(), "potentials and cost")?;
    let n = phi.len();
    for i in 0..n {
        for j in 0..n {
            if &(phi.value(i) + psi.value(j)) > cost.get(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff phi(i) − phi(j) ≤ c(i,j) for all pairs.
pub fn check_one_var_feasible(phi: &Potential, cost: &CostMatrix) -> Result<bool> {
    ensure_same_ground(phi.ground(), cost.ground(), "potential and cost")?;
    let n = phi.len();
    for i in 0..n {
        for j in 0..n {
            if &(phi.value(i) - phi.value(j)) > cost.get(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact value of Σ phi · (mu − nu).
pub fn dual_objective(phi: &Potential, mu: &Measure, nu: &Measure) -> Result<Rational> {
    ensure_same_ground(phi.ground(), mu.ground(), "potential and first measure")?;
    ensure_same_ground(phi.ground(), nu.ground(), "potential and second measure")?;
    let mut total = Rational::zero();
    for (v, (m, n)) in phi
        .values()
        .iter()
        .zip(mu.weights().iter().zip(nu.weights()))
    {
        total += v * &(m - n);
    }
    Ok(total)
}

/// A superlevel set of a potential together with its objective value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerCake {
    pub set: IndexSet,
    pub value: Rational,
}

/// Best superlevel set {phi ≥ t} over thresholds t among the distinct values
/// of phi. The scan always includes the full set (value 0), so the result is
/// never worse than the averaged objective of phi itself. Ties prefer the
/// largest threshold, hence the smallest set.
pub fn layer_cake_extract(
    phi: &Potential,
    mu: &Measure,
    nu: &Measure,
    r: &Relation,
) -> Result<LayerCake> {
    ensure_same_ground(phi.ground(), r.ground(), "potential and relation")?;
    r.ensure_preorder()?;
    let zero = Rational::zero();
    let one = Rational::one();
    if let Some(bad) = phi.values().iter().find(|v| *v < &zero || *v > &one) {
        return Err(Error::RangeViolation {
            detail: format!("potential value {bad} outside [0, 1]"),
        });
    }
    if !check_one_var_feasible(phi, &r.to_cost())? {
        return Err(Error::InfeasiblePotential {
            detail: "potential increases by more than the cost along some pair".into(),
        });
    }

    let mut thresholds: Vec<&Rational> = phi.values().iter().collect();
    thresholds.sort();
    thresholds.dedup();

    let mut best: Option<LayerCake> = None;
    for t in thresholds {
        let membership: Vec<bool> = phi.values().iter().map(|v| v >= t).collect();
        let set = IndexSet::from_membership(phi.ground().clone(), membership)
            .expect("length preserved");
        let value = mu.mass_of(&set)? - nu.mass_of(&set)?;
        // thresholds ascend, so on ties the later (larger) threshold wins
        if best.as_ref().is_none_or(|b| value >= b.value) {
            best = Some(LayerCake { set, value });
        }
    }
    Ok(best.expect("at least one threshold exists"))
}

/// Shift a feasible potential so its minimum is 0, clamping at 1. Any
/// feasible input for a cost bounded by 1 already has spread at most 1, so
/// the clamp only trims values that feasibility could not have produced.
/// Inputs already inside [0, 1] are returned unchanged. The result is
/// re-checked for feasibility and rejected if the check fails.
pub fn rescale_to_unit(phi: &Potential, cost: &CostMatrix) -> Result<Potential> {
    ensure_same_ground(phi.ground(), cost.ground(), "potential and cost")?;
    let zero = Rational::zero();
    let one = Rational::one();
    let in_range = phi.values().iter().all(|v| v >= &zero && v <= &one);
    let result = if in_range {
        phi.clone()
    } else {
        let min = phi.values().iter().min().expect("nonempty ground").clone();
        let values = phi
            .values()
            .iter()
            .map(|v| {
                let shifted = v - &min;
                if shifted > one {
                    one.clone()
                } else {
                    shifted
                }
            })
            .collect();
        Potential::new(phi.ground().clone(), values)?
    };
    if !check_one_var_feasible(&result, cost)? {
        return Err(Error::InfeasiblePotential {
            detail: "potential is not feasible for the given cost".into(),
        });
    }
    Ok(result)
}
