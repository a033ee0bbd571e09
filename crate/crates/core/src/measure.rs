use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{ensure_same_ground, GroundSet, IndexSet};
use crate::Rational;

/// A probability distribution on a ground set. Weights are exact rationals
/// summing to one; zero weights are allowed and define the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    ground: Arc<GroundSet>,
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(ground: Arc<GroundSet>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != ground.len() {
            return Err(Error::validation(format!(
                "measure needs {} weights, got {}",
                ground.len(),
                weights.len()
            )));
        }
        if let Some(pos) = weights.iter().position(|w| w < &Rational::zero()) {
            return Err(Error::validation(format!(
                "negative weight {} at point {}",
                weights[pos],
                ground.id(pos)
            )));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::validation(format!(
                "weights must sum to 1, got {total}"
            )));
        }
        Ok(Measure { ground, weights })
    }

    pub fn uniform(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        let w = Rational::new(1.into(), (n as i64).into());
        Measure {
            ground,
            weights: vec![w; n],
        }
    }

    /// Uniform mass on the given points, zero elsewhere.
    pub fn uniform_on(ground: Arc<GroundSet>, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::validation("uniform measure needs a nonempty support"));
        }
        let mut weights = vec![Rational::zero(); ground.len()];
        let w = Rational::new(1.into(), (indices.len() as i64).into());
        for &i in indices {
            if i >= ground.len() {
                return Err(Error::validation(format!(
                    "index {i} out of bounds for ground of size {}",
                    ground.len()
                )));
            }
            if !weights[i].is_zero() {
                return Err(Error::validation(format!(
                    "repeated support index {i}"
                )));
            }
            weights[i] = w.clone();
        }
        Measure { ground, weights }.validated()
    }

    pub fn point_mass(ground: Arc<GroundSet>, idx: usize) -> Result<Self> {
        let mut weights = vec![Rational::zero(); ground.len()];
        if idx >= ground.len() {
            return Err(Error::validation(format!(
                "index {idx} out of bounds for ground of size {}",
                ground.len()
            )));
        }
        weights[idx] = Rational::one();
        Ok(Measure { ground, weights })
    }

    fn validated(self) -> Result<Self> {
        Measure::new(self.ground, self.weights)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn mass_of(&self, set: &IndexSet) -> Result<Rational> {
        ensure_same_ground(&self.ground, set.ground(), "measure and set")?;
        Ok(set.indices().map(|i| &self.weights[i]).sum())
    }

    pub fn support(&self) -> IndexSet {
        let membership = self.weights.iter().map(|w| !w.is_zero()).collect();
        IndexSet::from_membership(self.ground.clone(), membership).expect("length preserved")
    }

    /// Mean of the coordinate labels under this measure.
    pub fn expectation(&self) -> Result<Rational> {
        let labels = self.ground.labels().ok_or(Error::MissingLabels)?;
        Ok(self
            .weights
            .iter()
            .zip(labels)
            .map(|(w, l)| w * l)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_bad_sums_and_signs() {
        let g = GroundSet::new(vec!["a".into(), "b".into()]).unwrap();
        assert!(Measure::new(g.clone(), vec![rat(1, 2), rat(1, 4)]).is_err());
        assert!(Measure::new(g.clone(), vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(Measure::new(g, vec![rat(1, 2), rat(1, 2)]).is_ok());
    }

    #[test]
    fn uniform_and_masses() {
        let g = GroundSet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let m = Measure::uniform(g.clone());
        assert_eq!(m.weight(0), &rat(1, 3));
        let s = IndexSet::from_ids(g.clone(), &["a", "c"]).unwrap();
        assert_eq!(m.mass_of(&s).unwrap(), rat(2, 3));
        let sub = Measure::uniform_on(g, &[2, 0]).unwrap();
        assert_eq!(sub.weight(1), &rat(0, 1));
        assert_eq!(sub.support(), s);
    }

    #[test]
    fn expectation_needs_labels() {
        let plain = GroundSet::new(vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            Measure::uniform(plain).expectation().unwrap_err(),
            Error::MissingLabels
        ));
        let labeled = GroundSet::with_labels(
            vec!["a".into(), "b".into()],
            vec![rat(0, 1), rat(1, 1)],
        )
        .unwrap();
        let m = Measure::new(labeled, vec![rat(1, 4), rat(3, 4)]).unwrap();
        assert_eq!(m.expectation().unwrap(), rat(3, 4));
    }
}
