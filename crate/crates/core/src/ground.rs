use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Rational;

/// Hard bound on ground set size. Relations are stored densely, so this keeps
/// the incidence matrix within desk-scale memory.
pub const MAX_POINTS: usize = 1 << 16;

/// An indexed finite point set. Points are identified by unique string ids and
/// may carry exact rational coordinate labels (all points or none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    ids: Vec<String>,
    labels: Option<Vec<Rational>>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new(ids: Vec<String>) -> Result<Arc<Self>> {
        Self::build(ids, None)
    }

    pub fn with_labels(ids: Vec<String>, labels: Vec<Rational>) -> Result<Arc<Self>> {
        Self::build(ids, Some(labels))
    }

    fn build(ids: Vec<String>, labels: Option<Vec<Rational>>) -> Result<Arc<Self>> {
        if ids.is_empty() {
            return Err(Error::validation("ground set must contain at least one point"));
        }
        if ids.len() > MAX_POINTS {
            return Err(Error::TooLarge {
                size: ids.len(),
                limit: MAX_POINTS,
            });
        }
        if let Some(ref labels) = labels {
            if labels.len() != ids.len() {
                return Err(Error::validation(
                    "every point must have exactly one label when labels are present",
                ));
            }
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (pos, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), pos).is_some() {
                return Err(Error::validation(format!("duplicate point id `{id}`")));
            }
        }
        Ok(Arc::new(GroundSet { ids, labels, index }))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.ids[idx]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn labels(&self) -> Option<&[Rational]> {
        self.labels.as_deref()
    }

    pub fn label(&self, idx: usize) -> Option<&Rational> {
        self.labels.as_ref().map(|l| &l[idx])
    }
}

/// Two values interoperate only when their ground sets agree. Arc identity is
/// the fast path; structural equality covers grounds built independently.
pub(crate) fn same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn ensure_same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>, context: &str) -> Result<()> {
    if same_ground(a, b) {
        Ok(())
    } else {
        Err(Error::ground_mismatch(context.to_string()))
    }
}

/// A subset of a ground set, stored as a membership vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    ground: Arc<GroundSet>,
    membership: Vec<bool>,
}

impl IndexSet {
    pub fn empty(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        IndexSet {
            ground,
            membership: vec![false; n],
        }
    }

    pub fn full(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        IndexSet {
            ground,
            membership: vec![true; n],
        }
    }

    pub fn from_membership(ground: Arc<GroundSet>, membership: Vec<bool>) -> Result<Self> {
        if membership.len() != ground.len() {
            return Err(Error::validation(
                "membership vector length must equal the ground set size",
            ));
        }
        Ok(IndexSet { ground, membership })
    }

    pub fn from_indices(ground: Arc<GroundSet>, indices: &[usize]) -> Result<Self> {
        let mut membership = vec![false; ground.len()];
        for &i in indices {
            if i >= ground.len() {
                return Err(Error::validation(format!(
                    "index {i} out of bounds for ground of size {}",
                    ground.len()
                )));
            }
            membership[i] = true;
        }
        Ok(IndexSet { ground, membership })
    }

    /// Membership by point id; unknown ids are rejected.
    pub fn from_ids(ground: Arc<GroundSet>, ids: &[&str]) -> Result<Self> {
        let mut indices = Vec::with_capacity(ids.len());
        for id in ids {
            match ground.position(id) {
                Some(i) => indices.push(i),
                None => return Err(Error::validation(format!("unknown point id `{id}`"))),
            }
        }
        Self::from_indices(ground, &indices)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.membership[idx]
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn len(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.membership.iter().any(|&m| m)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| if m { Some(i) } else { None })
    }

    pub fn ids(&self) -> Vec<&str> {
        self.indices().map(|i| self.ground.id(i)).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.ground.id(i))?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_ids() {
        let err = GroundSet::new(vec!["a".into(), "a".into()]).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn rejects_mismatched_label_count() {
        let err = GroundSet::with_labels(
            vec!["a".into(), "b".into()],
            vec![Rational::from_integer(1.into())],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn index_set_round_trips_ids() {
        let g = GroundSet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let s = IndexSet::from_ids(g.clone(), &["c", "a"]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(0) && !s.contains(1) && s.contains(2));
        assert_eq!(s.ids(), vec!["a", "c"]);
        assert_eq!(s.to_string(), "{a, c}");
    }

    #[test]
    fn structural_ground_equality() {
        let g1 = GroundSet::new(vec!["a".into(), "b".into()]).unwrap();
        let g2 = GroundSet::new(vec!["a".into(), "b".into()]).unwrap();
        assert!(same_ground(&g1, &g2));
        let g3 = GroundSet::new(vec!["a".into(), "c".into()]).unwrap();
        assert!(!same_ground(&g1, &g3));
    }
}
