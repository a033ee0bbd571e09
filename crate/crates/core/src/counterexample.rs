//! A family of two-block grid instances whose optimal covered mass tends to
//! one while never reaching it: n points at k/n carry the first marginal, n
//! points at 1 + k/n the second, and a pair is related exactly when the
//! points coincide or the second label exceeds the first by more than one.
//! The gap between the two block means keeps every full coupling off the
//! relation, yet cyclic shift couplings get within 1/n of it.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{ensure_same_ground, GroundSet};
use crate::measure::Measure;
use crate::relation::Relation;
use crate::transport::{certify_duality, Coupling, DualityReport};
use crate::Rational;

/// One discretized instance: uniform supply on {k/n}, uniform demand on
/// {1 + k/n}, related iff equal or separated by strictly more than one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridInstance {
    resolution: u32,
    ground: Arc<GroundSet>,
    mu: Measure,
    nu: Measure,
    relation: Relation,
}

impl GridInstance {
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn mu(&self) -> &Measure {
        &self.mu
    }

    pub fn nu(&self) -> &Measure {
        &self.nu
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn certify(&self) -> Result<DualityReport> {
        certify_duality(&self.mu, &self.nu, &self.relation)
    }

    pub fn mean_gap(&self) -> Result<MeanGapCertificate> {
        mean_gap_certificate(&self.mu, &self.nu, &self.relation)
    }
}

pub fn build_grid_instance(n: u32) -> Result<GridInstance> {
    if n == 0 {
        return Err(Error::InvalidResolution(
            "resolution must be at least 1".into(),
        ));
    }
    let denom: Rational = Rational::from_integer((n as i64).into());
    let mut labels = Vec::with_capacity(2 * n as usize);
    for block in 0..2i64 {
        for k in 0..n as i64 {
            labels.push(Rational::from_integer((block * n as i64 + k).into()) / &denom);
        }
    }
    let ids = labels.iter().map(|l| l.to_string()).collect();
    let ground = GroundSet::with_labels(ids, labels.clone())?;

    let one = Rational::one();
    let shifted: Vec<Rational> = labels.iter().map(|l| l + &one).collect();
    let relation = Relation::from_fn(ground.clone(), |i, j| i == j || labels[j] > shifted[i]);

    let first: Vec<usize> = (0..n as usize).collect();
    let second: Vec<usize> = (n as usize..2 * n as usize).collect();
    let mu = Measure::uniform_on(ground.clone(), &first)?;
    let nu = Measure::uniform_on(ground.clone(), &second)?;

    Ok(GridInstance {
        resolution: n,
        ground,
        mu,
        nu,
        relation,
    })
}

/// The cyclic shift pairing k/n with 1 + ((k + shift) mod n)/n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCoupling {
    pub coupling: Coupling,
    pub mass_on_relation: Rational,
}

pub fn shift_coupling(g: &GridInstance, shift: u32) -> Result<ShiftCoupling> {
    if shift == 0 || shift > g.resolution {
        return Err(Error::InvalidShift {
            shift,
            resolution: g.resolution,
        });
    }
    let n = g.resolution as usize;
    let total = 2 * n;
    let weight = Rational::new(1.into(), (n as i64).into());
    let mut matrix = vec![Rational::zero(); total * total];
    for j in 0..n {
        let target = n + (j + shift as usize) % n;
        matrix[j * total + target] = weight.clone();
    }
    let coupling = Coupling::new(matrix, g.mu.clone(), g.nu.clone())?;
    let mass_on_relation = coupling.mass_on(&g.relation)?;
    Ok(ShiftCoupling {
        coupling,
        mass_on_relation,
    })
}

/// Lower bound on the uncovered mass from the label expectations alone:
/// related off-diagonal support pairs are separated by at least `delta`, so
/// mass `p` on them forces an expectation gap of at least `delta · p`.
/// With no such pair, no mass fits on the relation at all and the bound is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanGapCertificate {
    pub expectation_gap: Rational,
    pub delta: Option<Rational>,
    pub lower_bound: Rational,
}

pub fn mean_gap_certificate(
    mu: &Measure,
    nu: &Measure,
    r: &Relation,
) -> Result<MeanGapCertificate> {
    ensure_same_ground(mu.ground(), r.ground(), "first marginal and relation")?;
    ensure_same_ground(nu.ground(), r.ground(), "second marginal and relation")?;
    let ground = r.ground();
    let labels = ground.labels().ok_or(Error::MissingLabels)?;
    for i in 0..ground.len() {
        if !mu.weight(i).is_zero() && !nu.weight(i).is_zero() {
            return Err(Error::OverlappingSupports {
                point: ground.id(i).to_string(),
            });
        }
    }
    let expectation_gap = nu.expectation()? - mu.expectation()?;

    let mut delta: Option<Rational> = None;
    for i in 0..ground.len() {
        if mu.weight(i).is_zero() {
            continue;
        }
        for j in 0..ground.len() {
            if i == j || nu.weight(j).is_zero() || !r.contains(i, j) {
                continue;
            }
            let gap = &labels[j] - &labels[i];
            if delta.as_ref().is_none_or(|d| &gap < d) {
                delta = Some(gap);
            }
        }
    }
    if let Some(d) = &delta {
        if d <= &Rational::zero() {
            return Err(Error::validation(
                "expectation certificate needs positive label gaps on related support pairs",
            ));
        }
    }
    let lower_bound = match &delta {
        None => Rational::one(),
        Some(d) => Rational::one() - &expectation_gap / d,
    };
    Ok(MeanGapCertificate {
        expectation_gap,
        delta,
        lower_bound,
    })
}

/// The relation demanding a gap of at least 1 + 1/m instead of strictly more
/// than 1. These grow with m and their union over m ≤ n is the grid relation,
/// since on an n-grid a gap exceeding 1 is a gap of at least 1 + 1/n.
pub fn closed_approximant(g: &GridInstance, m: u32) -> Result<Relation> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "approximant index must be at least 1".into(),
        ));
    }
    let labels = g
        .ground
        .labels()
        .expect("grid instances always carry labels");
    let threshold =
        Rational::one() + Rational::new(1.into(), (m as i64).into());
    let shifted: Vec<Rational> = labels.iter().map(|l| l + &threshold).collect();
    Ok(Relation::from_fn(g.ground.clone(), |i, j| {
        i == j || labels[j] >= shifted[i]
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub resolution: u32,
    pub primal_value: Rational,
    pub dual_value: Rational,
    pub dual_set_size: usize,
    pub shift_mass: Rational,
    pub certificate_bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// One certified solve per resolution, with the shift coupling at one grid
/// step and the expectation lower bound alongside.
pub fn resolution_sweep(resolutions: &[u32]) -> Result<SweepReport> {
    resolution_sweep_with_shift(resolutions, 1)
}

pub fn resolution_sweep_with_shift(resolutions: &[u32], shift: u32) -> Result<SweepReport> {
    if resolutions.is_empty() {
        return Err(Error::InvalidParameter(
            "resolution list must not be empty".into(),
        ));
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let g = build_grid_instance(n)?;
        let report = g.certify()?;
        if !report.certificate_ok {
            return Err(Error::Validation {
                invariant: format!("duality certificate failed at resolution {n}"),
            });
        }
        let sc = shift_coupling(&g, shift)?;
        let cert = g.mean_gap()?;
        rows.push(SweepRow {
            resolution: n,
            primal_value: report.primal_value,
            dual_value: report.dual_value,
            dual_set_size: report.optimal_set.len(),
            shift_mass: sc.mass_on_relation,
            certificate_bound: cert.lower_bound,
        });
    }
    Ok(SweepReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationFamily;
    use crate::transport::brute_force_dual;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn zero_resolution_rejected() {
        assert!(matches!(
            build_grid_instance(0).unwrap_err(),
            Error::InvalidResolution(_)
        ));
    }

    #[test]
    fn instances_are_preorders_with_disjoint_uniform_blocks() {
        for n in [1, 2, 3, 4, 7, 16] {
            let g = build_grid_instance(n).unwrap();
            assert!(g.relation().is_preorder(), "n = {n}");
            let overlap: Vec<usize> = (0..g.ground().len())
                .filter(|&i| !g.mu().weight(i).is_zero() && !g.nu().weight(i).is_zero())
                .collect();
            assert!(overlap.is_empty());
            let gap = g.nu().expectation().unwrap() - g.mu().expectation().unwrap();
            assert_eq!(gap, rat(1, 1), "n = {n}");
        }
    }

    #[test]
    fn unit_resolution_is_diagonal_only() {
        let g = build_grid_instance(1).unwrap();
        assert_eq!(g.ground().ids(), &["0".to_string(), "1".to_string()]);
        assert_eq!(g.relation().pairs(), vec![(0, 0), (1, 1)]);
        let report = g.certify().unwrap();
        assert!(report.certificate_ok);
        assert_eq!(report.primal_value, rat(1, 1));
        assert_eq!(report.optimal_set.ids(), vec!["0"]);
    }

    #[test]
    fn resolution_two_has_one_cross_pair() {
        let g = build_grid_instance(2).unwrap();
        let off_diagonal: Vec<(usize, usize)> = g
            .relation()
            .pairs()
            .into_iter()
            .filter(|&(i, j)| i != j)
            .collect();
        assert_eq!(off_diagonal, vec![(0, 3)]);
        assert_eq!(g.certify().unwrap().primal_value, rat(1, 2));
    }

    #[test]
    fn resolution_four_matches_hand_solution() {
        let g = build_grid_instance(4).unwrap();
        let report = g.certify().unwrap();
        assert!(report.certificate_ok && report.oracle_checked);
        assert_eq!(report.primal_value, rat(1, 4));
        assert_eq!(report.optimal_set.ids(), vec!["3/4"]);
        let oracle = brute_force_dual(g.mu(), g.nu(), g.relation()).unwrap();
        assert_eq!(oracle.value, rat(1, 4));
    }

    #[test]
    fn shift_masses_on_resolution_four() {
        let g = build_grid_instance(4).unwrap();
        let one_step = shift_coupling(&g, 1).unwrap();
        assert_eq!(one_step.mass_on_relation, rat(3, 4));
        let full_period = shift_coupling(&g, 4).unwrap();
        assert!(full_period.mass_on_relation.is_zero());
        for bad in [0, 5] {
            assert!(matches!(
                shift_coupling(&g, bad).unwrap_err(),
                Error::InvalidShift { .. }
            ));
        }
    }

    #[test]
    fn shift_by_one_attains_the_optimum() {
        for n in [1, 2, 3, 4, 8] {
            let g = build_grid_instance(n).unwrap();
            let sc = shift_coupling(&g, 1).unwrap();
            let primal = g.certify().unwrap().primal_value;
            assert_eq!(sc.mass_on_relation, Rational::one() - primal, "n = {n}");
        }
    }

    #[test]
    fn mean_gap_on_resolution_four() {
        let g = build_grid_instance(4).unwrap();
        let cert = g.mean_gap().unwrap();
        assert_eq!(cert.expectation_gap, rat(1, 1));
        assert_eq!(cert.delta, Some(rat(5, 4)));
        assert_eq!(cert.lower_bound, rat(1, 5));
        assert!(cert.lower_bound <= g.certify().unwrap().primal_value);
    }

    #[test]
    fn mean_gap_degenerate_when_nothing_relates() {
        let g = build_grid_instance(1).unwrap();
        let cert = g.mean_gap().unwrap();
        assert_eq!(cert.delta, None);
        assert_eq!(cert.lower_bound, rat(1, 1));
    }

    #[test]
    fn block_means_approach_half_and_three_halves() {
        for n in [1i64, 2, 4, 64] {
            let g = build_grid_instance(n as u32).unwrap();
            assert_eq!(g.mu().expectation().unwrap(), rat(n - 1, 2 * n));
            assert_eq!(
                g.nu().expectation().unwrap(),
                rat(1, 1) + rat(n - 1, 2 * n)
            );
        }
    }

    #[test]
    fn coarsest_approximant_is_diagonal() {
        let g = build_grid_instance(4).unwrap();
        let a1 = closed_approximant(&g, 1).unwrap();
        assert_eq!(a1, Relation::identity(g.ground().clone()));
        assert!(matches!(
            closed_approximant(&g, 0).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn approximants_nest_and_union_to_the_grid_relation() {
        let g = build_grid_instance(4).unwrap();
        let members: Vec<Relation> = [1, 2, 4]
            .iter()
            .map(|&m| closed_approximant(&g, m).unwrap())
            .collect();
        for r in &members {
            assert!(r.is_preorder());
        }
        let family = RelationFamily::new(members).unwrap();
        let report = family.check();
        assert!(report.nested);
        assert_eq!(&report.union, g.relation());
    }

    #[test]
    fn sweep_reproduces_halving_values() {
        let report = resolution_sweep(&[1, 2, 4]).unwrap();
        let primal: Vec<Rational> = report.rows.iter().map(|r| r.primal_value.clone()).collect();
        assert_eq!(primal, vec![rat(1, 1), rat(1, 2), rat(1, 4)]);
        for row in &report.rows {
            assert_eq!(row.primal_value, row.dual_value);
            assert!(row.certificate_bound <= row.primal_value);
            assert_eq!(
                row.shift_mass,
                Rational::one() - &row.primal_value
            );
        }
    }

    #[test]
    fn sweep_rejects_empty_input() {
        assert!(matches!(
            resolution_sweep(&[]).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }
}
