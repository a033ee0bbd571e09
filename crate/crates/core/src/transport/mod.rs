//! Exact solvers for the coupling problem, its monotone-set dual, general
//! nonnegative-cost transportation, and one-potential transshipment, plus a
//! certificate combining them. All values are exact rationals; networks are
//! cleared to integers over a common denominator before any flow runs.

mod flow;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{ensure_same_ground, GroundSet, IndexSet};
use crate::measure::Measure;
use crate::potential::Potential;
use crate::relation::{CostMatrix, Relation};
use crate::Rational;
use flow::{CostFlowNetwork, FlowNetwork};

/// Largest ground size the subset-enumeration oracle accepts.
pub const ORACLE_LIMIT: usize = 20;

/// A joint distribution with prescribed row and column marginals, both
/// holding with exact rational equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    ground: Arc<GroundSet>,
    matrix: Vec<Rational>,
    row_marginal: Measure,
    col_marginal: Measure,
}

impl Coupling {
    pub fn new(matrix: Vec<Rational>, row_marginal: Measure, col_marginal: Measure) -> Result<Self> {
        let ground = row_marginal.ground().clone();
        ensure_same_ground(&ground, col_marginal.ground(), "coupling marginals")?;
        let n = ground.len();
        if matrix.len() != n * n {
            return Err(Error::validation(format!(
                "coupling matrix needs {} entries, got {}",
                n * n,
                matrix.len()
            )));
        }
        if matrix.iter().any(|e| e < &Rational::zero()) {
            return Err(Error::validation("coupling entries must be nonnegative"));
        }
        let mut col_sums = vec![Rational::zero(); n];
        for i in 0..n {
            let mut row_sum = Rational::zero();
            for j in 0..n {
                let entry = &matrix[i * n + j];
                if entry.is_zero() {
                    continue;
                }
                row_sum += entry;
                col_sums[j] += entry;
            }
            if &row_sum != row_marginal.weight(i) {
                return Err(Error::validation(format!(
                    "row sum {} at {} does not match the marginal weight {}",
                    row_sum,
                    ground.id(i),
                    row_marginal.weight(i)
                )));
            }
        }
        for (j, sum) in col_sums.iter().enumerate() {
            if sum != col_marginal.weight(j) {
                return Err(Error::validation(format!(
                    "column sum {} at {} does not match the marginal weight {}",
                    sum,
                    ground.id(j),
                    col_marginal.weight(j)
                )));
            }
        }
        Ok(Coupling {
            ground,
            matrix,
            row_marginal,
            col_marginal,
        })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.matrix[i * self.ground.len() + j]
    }

    pub fn matrix(&self) -> &[Rational] {
        &self.matrix
    }

    pub fn row_marginal(&self) -> &Measure {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &Measure {
        &self.col_marginal
    }

    /// Index pairs carrying positive mass, row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.ground.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.get(i, j).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Total mass sitting on related pairs.
    pub fn mass_on(&self, r: &Relation) -> Result<Rational> {
        ensure_same_ground(&self.ground, r.ground(), "coupling and relation")?;
        let n = self.ground.len();
        let mut total = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                let entry = self.get(i, j);
                if !entry.is_zero() && r.contains(i, j) {
                    total += entry;
                }
            }
        }
        Ok(total)
    }

    /// Expected cost Σ c·π, exact.
    pub fn cost(&self, c: &CostMatrix) -> Result<Rational> {
        ensure_same_ground(&self.ground, c.ground(), "coupling and cost")?;
        let n = self.ground.len();
        let mut total = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                let entry = self.get(i, j);
                if !entry.is_zero() {
                    total += entry * c.get(i, j);
                }
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimalSolution {
    pub coupling: Coupling,
    pub uncovered: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub set: IndexSet,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoVarSolution {
    pub coupling: Coupling,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneVarSolution {
    pub potential: Potential,
    pub value: Rational,
}

/// Joint outcome of the primal and dual solvers with every cross-check applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub primal_value: Rational,
    pub dual_value: Rational,
    pub optimal_coupling: Coupling,
    pub optimal_set: IndexSet,
    pub certificate_ok: bool,
    pub oracle_checked: bool,
}

fn lcm_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
    }
    l
}

fn scale_to_int(v: &Rational, scale: &BigInt) -> BigInt {
    v.numer() * (scale / v.denom())
}

struct PrimalDual {
    coupling: Coupling,
    uncovered: Rational,
    dual_set: IndexSet,
    dual_value: Rational,
}

/// One max-flow pass yielding both the optimal coupling and the canonical
/// dual set. Network: source → supply point (weight), relation arc (never
/// binding), demand point → sink (weight). The dual set is the upper closure
/// of the supply points still reachable in the residual graph.
fn solve_primal_dual(mu: &Measure, nu: &Measure, r: &Relation) -> Result<PrimalDual> {
    ensure_same_ground(mu.ground(), r.ground(), "first marginal and relation")?;
    ensure_same_ground(nu.ground(), r.ground(), "second marginal and relation")?;
    r.ensure_preorder()?;
    let ground = r.ground().clone();
    let n = ground.len();

    let scale = lcm_denominators(mu.weights().iter().chain(nu.weights()));
    let left: Vec<usize> = (0..n).filter(|&i| !mu.weight(i).is_zero()).collect();
    let right: Vec<usize> = (0..n).filter(|&j| !nu.weight(j).is_zero()).collect();

    let source = 0usize;
    let sink = 1 + left.len() + right.len();
    let mut net = FlowNetwork::new(sink + 1);
    let arc_cap: BigInt = &scale + BigInt::one();

    for (a, &i) in left.iter().enumerate() {
        net.add_edge(source, 1 + a, scale_to_int(mu.weight(i), &scale));
    }
    for (b, &j) in right.iter().enumerate() {
        net.add_edge(1 + left.len() + b, sink, scale_to_int(nu.weight(j), &scale));
    }
    let mut relation_arcs = Vec::new();
    for (a, &i) in left.iter().enumerate() {
        for (b, &j) in right.iter().enumerate() {
            if r.contains(i, j) {
                let id = net.add_edge(1 + a, 1 + left.len() + b, arc_cap.clone());
                relation_arcs.push((i, j, id));
            }
        }
    }

    let flow = net.max_flow(source, sink);
    let covered = Rational::new(flow, scale.clone());
    let uncovered = Rational::one() - &covered;

    let mut matrix = vec![Rational::zero(); n * n];
    let mut row_out = vec![BigInt::zero(); n];
    let mut col_in = vec![BigInt::zero(); n];
    for &(i, j, id) in &relation_arcs {
        let f = net.flow_on(id);
        if !f.is_zero() {
            matrix[i * n + j] += Rational::new(f.clone(), scale.clone());
            row_out[i] += f;
            col_in[j] += f;
        }
    }

    // Leftover marginal mass goes to unrelated pairs; at a maximum flow no
    // deficit pair can be related, or the pair would be an augmenting path.
    let mut row_deficits: Vec<(usize, BigInt)> = Vec::new();
    for &i in &left {
        let deficit = scale_to_int(mu.weight(i), &scale) - &row_out[i];
        if !deficit.is_zero() {
            row_deficits.push((i, deficit));
        }
    }
    let mut col_deficits: Vec<(usize, BigInt)> = Vec::new();
    for &j in &right {
        let deficit = scale_to_int(nu.weight(j), &scale) - &col_in[j];
        if !deficit.is_zero() {
            col_deficits.push((j, deficit));
        }
    }
    let (mut a, mut b) = (0, 0);
    while a < row_deficits.len() && b < col_deficits.len() {
        let amount = row_deficits[a].1.clone().min(col_deficits[b].1.clone());
        let (i, j) = (row_deficits[a].0, col_deficits[b].0);
        debug_assert!(!r.contains(i, j), "deficit pair inside the relation");
        matrix[i * n + j] += Rational::new(amount.clone(), scale.clone());
        row_deficits[a].1 -= &amount;
        col_deficits[b].1 -= &amount;
        if row_deficits[a].1.is_zero() {
            a += 1;
        }
        if col_deficits[b].1.is_zero() {
            b += 1;
        }
    }

    let seen = net.reachable(source);
    let mut membership = vec![false; n];
    for (a, &i) in left.iter().enumerate() {
        if seen[1 + a] {
            membership[i] = true;
        }
    }
    let dual_set = r.upper_closure_unchecked(&membership);
    let dual_value = mu.mass_of(&dual_set)? - nu.mass_of(&dual_set)?;

    let coupling = Coupling::new(matrix, mu.clone(), nu.clone())?;
    Ok(PrimalDual {
        coupling,
        uncovered,
        dual_set,
        dual_value,
    })
}

/// Coupling leaving the least mass off the relation, with that least mass.
pub fn solve_primal_mass(mu: &Measure, nu: &Measure, r: &Relation) -> Result<PrimalSolution> {
    let pd = solve_primal_dual(mu, nu, r)?;
    Ok(PrimalSolution {
        coupling: pd.coupling,
        uncovered: pd.uncovered,
    })
}

/// Upper set maximizing mu(A) − nu(A), extracted from the residual cut.
pub fn solve_dual_mincut(mu: &Measure, nu: &Measure, r: &Relation) -> Result<DualSolution> {
    let pd = solve_primal_dual(mu, nu, r)?;
    Ok(DualSolution {
        set: pd.dual_set,
        value: pd.dual_value,
    })
}

/// Exhaustive maximum of mu(A) − nu(A) over upper sets; independent of the
/// flow machinery. Subsets walk in reflected binary order so the objective
/// updates by one term per step.
pub fn brute_force_dual(mu: &Measure, nu: &Measure, r: &Relation) -> Result<DualSolution> {
    ensure_same_ground(mu.ground(), r.ground(), "first marginal and relation")?;
    ensure_same_ground(nu.ground(), r.ground(), "second marginal and relation")?;
    r.ensure_preorder()?;
    let n = r.len();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: ORACLE_LIMIT,
        });
    }
    let succ: Vec<u32> = (0..n)
        .map(|i| {
            let mut m = 0u32;
            for j in 0..n {
                if r.contains(i, j) {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect();
    let diff: Vec<Rational> = (0..n)
        .map(|i| mu.weight(i) - nu.weight(i))
        .collect();

    let is_upper = |mask: u32| {
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            if succ[i] & !mask != 0 {
                return false;
            }
            m &= m - 1;
        }
        true
    };

    let mut best_mask = 0u32;
    let mut best_value = Rational::zero();
    let mut mask = 0u32;
    let mut value = Rational::zero();
    for t in 1u64..1u64 << n {
        let bit = t.trailing_zeros() as usize;
        let flipped = 1u32 << bit;
        mask ^= flipped;
        if mask & flipped != 0 {
            value += &diff[bit];
        } else {
            value -= &diff[bit];
        }
        if value > best_value && is_upper(mask) {
            best_value = value.clone();
            best_mask = mask;
        }
    }

    let membership = (0..n).map(|i| best_mask & (1 << i) != 0).collect();
    let set = IndexSet::from_membership(r.ground().clone(), membership)?;
    Ok(DualSolution {
        set,
        value: best_value,
    })
}

/// Minimum of Σ c·π over couplings of (mu, nu), by exact min-cost
/// transportation on the support bipartite graph.
pub fn solve_ot_two_var(mu: &Measure, nu: &Measure, c: &CostMatrix) -> Result<TwoVarSolution> {
    ensure_same_ground(mu.ground(), c.ground(), "first marginal and cost")?;
    ensure_same_ground(nu.ground(), c.ground(), "second marginal and cost")?;
    let n = c.len();
    let mass_scale = lcm_denominators(mu.weights().iter().chain(nu.weights()));
    let cost_scale = lcm_denominators(c.entries().iter());

    let left: Vec<usize> = (0..n).filter(|&i| !mu.weight(i).is_zero()).collect();
    let right: Vec<usize> = (0..n).filter(|&j| !nu.weight(j).is_zero()).collect();
    let source = 0usize;
    let sink = 1 + left.len() + right.len();
    let mut net = CostFlowNetwork::new(sink + 1);

    for (a, &i) in left.iter().enumerate() {
        net.add_edge(
            source,
            1 + a,
            scale_to_int(mu.weight(i), &mass_scale),
            BigInt::zero(),
        );
    }
    for (b, &j) in right.iter().enumerate() {
        net.add_edge(
            1 + left.len() + b,
            sink,
            scale_to_int(nu.weight(j), &mass_scale),
            BigInt::zero(),
        );
    }
    let mut arcs = Vec::new();
    for (a, &i) in left.iter().enumerate() {
        for (b, &j) in right.iter().enumerate() {
            let id = net.add_edge(
                1 + a,
                1 + left.len() + b,
                mass_scale.clone(),
                scale_to_int(c.get(i, j), &cost_scale),
            );
            arcs.push((i, j, id));
        }
    }

    let (flow, cost) = net.min_cost_max_flow(source, sink);
    debug_assert_eq!(flow, mass_scale, "transportation must route all mass");
    let value = Rational::new(cost, &mass_scale * &cost_scale);

    let mut matrix = vec![Rational::zero(); n * n];
    for &(i, j, id) in &arcs {
        let f = net.flow_on(id);
        if !f.is_zero() {
            matrix[i * n + j] = Rational::new(f.clone(), mass_scale.clone());
        }
    }
    let coupling = Coupling::new(matrix, mu.clone(), nu.clone())?;
    Ok(TwoVarSolution { coupling, value })
}

/// Maximum of Σ phi·(mu − nu) over potentials with phi(x) − phi(y) ≤ c(x,y),
/// solved as a minimum-cost transshipment with divergence mu − nu. The
/// optimal potential is read off the residual graph's shortest distances.
/// Requires a vanishing diagonal and the triangle inequality; rejects other
/// costs instead of returning a value the coupling problem need not match.
pub fn solve_transshipment_one_var(
    mu: &Measure,
    nu: &Measure,
    c: &CostMatrix,
) -> Result<OneVarSolution> {
    ensure_same_ground(mu.ground(), c.ground(), "first marginal and cost")?;
    ensure_same_ground(nu.ground(), c.ground(), "second marginal and cost")?;
    c.ensure_conditions()?;
    let ground = c.ground().clone();
    let n = ground.len();
    let mass_scale = lcm_denominators(mu.weights().iter().chain(nu.weights()));
    let cost_scale = lcm_denominators(c.entries().iter());

    let divergence: Vec<BigInt> = (0..n)
        .map(|i| scale_to_int(mu.weight(i), &mass_scale) - scale_to_int(nu.weight(i), &mass_scale))
        .collect();
    let surplus: BigInt = divergence
        .iter()
        .filter(|d| d > &&BigInt::zero())
        .sum();

    if surplus.is_zero() {
        return Ok(OneVarSolution {
            potential: Potential::zero(ground),
            value: Rational::zero(),
        });
    }

    let source = n;
    let sink = n + 1;
    let mut net = CostFlowNetwork::new(n + 2);
    let arc_cap: BigInt = &surplus + BigInt::one();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                net.add_edge(
                    i,
                    j,
                    arc_cap.clone(),
                    scale_to_int(c.get(i, j), &cost_scale),
                );
            }
        }
    }
    for (i, d) in divergence.iter().enumerate() {
        if d > &BigInt::zero() {
            net.add_edge(source, i, d.clone(), BigInt::zero());
        } else if d < &BigInt::zero() {
            net.add_edge(i, sink, -d.clone(), BigInt::zero());
        }
    }

    let (flow, cost) = net.min_cost_max_flow(source, sink);
    debug_assert_eq!(flow, surplus, "transshipment must route all surplus");
    let value = Rational::new(cost, &mass_scale * &cost_scale);

    let dist = net.residual_distances();
    let values: Vec<Rational> = (0..n)
        .map(|i| Rational::new(-dist[i].clone(), cost_scale.clone()))
        .collect();
    let potential = Potential::new(ground, values)?;
    Ok(OneVarSolution { potential, value })
}

/// Solves both sides, demands exact equality and all structural invariants,
/// and cross-checks against the enumeration oracle when the ground is small
/// enough for it.
pub fn certify_duality(mu: &Measure, nu: &Measure, r: &Relation) -> Result<DualityReport> {
    let pd = solve_primal_dual(mu, nu, r)?;
    let mut ok = pd.uncovered == pd.dual_value;
    ok &= r.is_upper_set(&pd.dual_set)?;
    let mass = pd.coupling.mass_on(r)?;
    ok &= Rational::one() - mass == pd.uncovered;
    let oracle_checked = r.len() <= ORACLE_LIMIT;
    if oracle_checked {
        let oracle = brute_force_dual(mu, nu, r)?;
        ok &= oracle.value == pd.dual_value;
    }
    Ok(DualityReport {
        primal_value: pd.uncovered,
        dual_value: pd.dual_value,
        optimal_coupling: pd.coupling,
        optimal_set: pd.dual_set,
        certificate_ok: ok,
        oracle_checked,
    })
}
