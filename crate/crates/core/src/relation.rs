use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ground::{ensure_same_ground, GroundSet, IndexSet};
use crate::Rational;

/// A binary relation on a ground set, stored as packed bit rows.
/// Row i holds the bits {j : (x_i, x_j) ∈ R}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    ground: Arc<GroundSet>,
    stride: usize,
    rows: Vec<u64>,
}

fn stride_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Membership vector packed into words, for row masking.
fn pack_membership(membership: &[bool], stride: usize) -> Vec<u64> {
    let mut words = vec![0u64; stride];
    for (j, &m) in membership.iter().enumerate() {
        if m {
            words[j / 64] |= 1u64 << (j % 64);
        }
    }
    words
}

impl Relation {
    pub fn empty(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        let stride = stride_for(n);
        Relation {
            ground,
            stride,
            rows: vec![0; n * stride],
        }
    }

    pub fn identity(ground: Arc<GroundSet>) -> Self {
        let mut r = Relation::empty(ground);
        for i in 0..r.len() {
            r.insert(i, i);
        }
        r
    }

    pub fn full(ground: Arc<GroundSet>) -> Self {
        let n = ground.len();
        let stride = stride_for(n);
        let mut rows = vec![u64::MAX; n * stride];
        // clear bits past n in each row's last word
        let tail = n % 64;
        if tail != 0 {
            let mask = (1u64 << tail) - 1;
            for i in 0..n {
                rows[i * stride + stride - 1] &= mask;
            }
        }
        Relation {
            ground,
            stride,
            rows,
        }
    }

    pub fn from_pairs(ground: Arc<GroundSet>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut r = Relation::empty(ground);
        let n = r.len();
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::validation(format!(
                    "pair ({i}, {j}) out of bounds for ground of size {n}"
                )));
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    pub fn from_id_pairs(ground: Arc<GroundSet>, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut index_pairs = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let i = ground
                .position(a)
                .ok_or_else(|| Error::validation(format!("unknown point id `{a}`")))?;
            let j = ground
                .position(b)
                .ok_or_else(|| Error::validation(format!("unknown point id `{b}`")))?;
            index_pairs.push((i, j));
        }
        Relation::from_pairs(ground, &index_pairs)
    }

    pub fn from_fn(ground: Arc<GroundSet>, mut related: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Relation::empty(ground);
        let n = r.len();
        for i in 0..n {
            for j in 0..n {
                if related(i, j) {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    pub fn from_matrix(ground: Arc<GroundSet>, matrix: &[Vec<bool>]) -> Result<Self> {
        let n = ground.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::validation(format!(
                "incidence matrix must be {n}x{n}"
            )));
        }
        Ok(Relation::from_fn(ground, |i, j| matrix[i][j]))
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    /// Number of points, not number of related pairs.
    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    fn insert(&mut self, i: usize, j: usize) {
        self.rows[i * self.stride + j / 64] |= 1u64 << (j % 64);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.stride + j / 64] & (1u64 << (j % 64)) != 0
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.stride..(i + 1) * self.stride]
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexivity_witness().is_none()
    }

    /// First point whose diagonal entry is missing.
    pub fn reflexivity_witness(&self) -> Option<usize> {
        (0..self.len()).find(|&i| !self.contains(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        self.transitivity_witness().is_none()
    }

    /// Lexicographically first (i, j, k) with (i,j) and (j,k) present but (i,k) absent.
    pub fn transitivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            let ri = self.row(i);
            for j in 0..n {
                if !self.contains(i, j) {
                    continue;
                }
                let rj = self.row(j);
                for w in 0..self.stride {
                    let missing = rj[w] & !ri[w];
                    if missing != 0 {
                        let k = w * 64 + missing.trailing_zeros() as usize;
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Errors with a named witness unless the relation is reflexive and transitive.
    pub fn ensure_preorder(&self) -> Result<()> {
        if let Some(i) = self.reflexivity_witness() {
            return Err(Error::RelationNotPreorder {
                witness: format!("missing reflexive pair ({0}, {0})", self.ground.id(i)),
            });
        }
        if let Some((i, j, k)) = self.transitivity_witness() {
            let (a, b, c) = (self.ground.id(i), self.ground.id(j), self.ground.id(k));
            return Err(Error::RelationNotPreorder {
                witness: format!("missing ({a}, {c}) implied by ({a}, {b}) and ({b}, {c})"),
            });
        }
        Ok(())
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    /// Smallest reflexive transitive relation containing this one.
    pub fn transitive_reflexive_closure(&self) -> Relation {
        let mut r = self.clone();
        let n = r.len();
        let stride = r.stride;
        for i in 0..n {
            r.insert(i, i);
        }
        for k in 0..n {
            let row_k = r.rows[k * stride..(k + 1) * stride].to_vec();
            for i in 0..n {
                if r.contains(i, k) {
                    let ri = &mut r.rows[i * stride..(i + 1) * stride];
                    for (w, &vk) in row_k.iter().enumerate() {
                        ri[w] |= vk;
                    }
                }
            }
        }
        r
    }

    /// True iff every member of `a` has its whole out-neighborhood inside `a`.
    pub fn is_upper_set(&self, a: &IndexSet) -> Result<bool> {
        ensure_same_ground(&self.ground, a.ground(), "set and relation")?;
        self.ensure_preorder()?;
        Ok(self.is_upper_set_unchecked(a.membership()))
    }

    pub(crate) fn is_upper_set_unchecked(&self, membership: &[bool]) -> bool {
        let words = pack_membership(membership, self.stride);
        for (i, &m) in membership.iter().enumerate() {
            if !m {
                continue;
            }
            let ri = self.row(i);
            for w in 0..self.stride {
                if ri[w] & !words[w] != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest upper set containing `b`; one image pass suffices under transitivity.
    pub fn upper_closure(&self, b: &IndexSet) -> Result<IndexSet> {
        ensure_same_ground(&self.ground, b.ground(), "set and relation")?;
        self.ensure_preorder()?;
        Ok(self.upper_closure_unchecked(b.membership()))
    }

    pub(crate) fn upper_closure_unchecked(&self, membership: &[bool]) -> IndexSet {
        let mut words = pack_membership(membership, self.stride);
        for (i, &m) in membership.iter().enumerate() {
            if !m {
                continue;
            }
            let ri = self.row(i);
            for w in 0..self.stride {
                words[w] |= ri[w];
            }
        }
        let n = self.len();
        let out = (0..n).map(|j| words[j / 64] & (1u64 << (j % 64)) != 0).collect();
        IndexSet::from_membership(self.ground.clone(), out).expect("length preserved")
    }

    /// Zero-one cost: 0 on related pairs, 1 elsewhere.
    pub fn to_cost(&self) -> CostMatrix {
        let n = self.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if self.contains(i, j) {
                    Rational::zero()
                } else {
                    Rational::one()
                });
            }
        }
        CostMatrix {
            ground: self.ground.clone(),
            entries,
        }
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        if !crate::ground::same_ground(&self.ground, &other.ground) {
            return false;
        }
        self.rows
            .iter()
            .zip(other.rows.iter())
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn union_with(&self, other: &Relation) -> Result<Relation> {
        ensure_same_ground(&self.ground, &other.ground, "relation union")?;
        let mut r = self.clone();
        for (w, &v) in r.rows.iter_mut().zip(other.rows.iter()) {
            *w |= v;
        }
        Ok(r)
    }
}

/// A nonnegative cost on ordered point pairs, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    ground: Arc<GroundSet>,
    entries: Vec<Rational>,
}

/// Diagnostics from `CostMatrix::validate`. The witness is the
/// lexicographically first triple breaking the triangle inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub zero_diagonal: bool,
    pub triangle: bool,
    pub witness: Option<(usize, usize, usize)>,
}

impl CostMatrix {
    pub fn new(ground: Arc<GroundSet>, entries: Vec<Rational>) -> Result<Self> {
        let n = ground.len();
        if entries.len() != n * n {
            return Err(Error::validation(format!(
                "cost matrix needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| e < &Rational::zero()) {
            return Err(Error::validation(format!(
                "negative cost at ({}, {})",
                ground.id(pos / n),
                ground.id(pos % n)
            )));
        }
        Ok(CostMatrix { ground, entries })
    }

    pub fn from_rows(ground: Arc<GroundSet>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = ground.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::validation(format!("cost matrix must be {n}x{n}")));
        }
        CostMatrix::new(ground, rows.into_iter().flatten().collect())
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.ground.len() + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn validate(&self) -> CostReport {
        let n = self.len();
        let zero_diagonal = (0..n).all(|i| self.get(i, i).is_zero());
        let mut witness = None;
        'scan: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > &(self.get(i, j) + self.get(j, k)) {
                        witness = Some((i, j, k));
                        break 'scan;
                    }
                }
            }
        }
        CostReport {
            zero_diagonal,
            triangle: witness.is_none(),
            witness,
        }
    }

    /// Errors unless the diagonal vanishes and the triangle inequality holds.
    pub fn ensure_conditions(&self) -> Result<()> {
        let report = self.validate();
        if !report.zero_diagonal {
            let i = (0..self.len())
                .find(|&i| !self.get(i, i).is_zero())
                .expect("nonzero diagonal entry exists");
            return Err(Error::CostConditionsViolated {
                detail: format!(
                    "nonzero diagonal cost {} at ({})",
                    self.get(i, i),
                    self.ground.id(i)
                ),
            });
        }
        if let Some((i, j, k)) = report.witness {
            let (a, b, c) = (self.ground.id(i), self.ground.id(j), self.ground.id(k));
            return Err(Error::CostConditionsViolated {
                detail: format!(
                    "triangle inequality fails: c({a}, {c}) = {} > {} + {} = c({a}, {b}) + c({b}, {c})",
                    self.get(i, k),
                    self.get(i, j),
                    self.get(j, k)
                ),
            });
        }
        Ok(())
    }
}

/// An ordered list of relations over one ground set, intended to be nested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFamily {
    ground: Arc<GroundSet>,
    members: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub nested: bool,
    pub union: Relation,
}

impl RelationFamily {
    pub fn new(members: Vec<Relation>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::validation("relation family must have at least one member"))?;
        let ground = first.ground().clone();
        for m in &members[1..] {
            ensure_same_ground(&ground, m.ground(), "relation family members")?;
        }
        Ok(RelationFamily { ground, members })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn members(&self) -> &[Relation] {
        &self.members
    }

    pub fn check(&self) -> FamilyReport {
        let nested = self
            .members
            .windows(2)
            .all(|w| w[0].is_subset_of(&w[1]));
        let mut union = self.members[0].clone();
        for m in &self.members[1..] {
            union = union.union_with(m).expect("same ground checked at construction");
        }
        FamilyReport { nested, union }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Arc<GroundSet> {
        GroundSet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    fn chain() -> Relation {
        Relation::from_id_pairs(abc(), &[("a", "b"), ("b", "c")])
            .unwrap()
            .transitive_reflexive_closure()
    }

    #[test]
    fn identity_is_reflexive_empty_is_not() {
        let g = abc();
        assert!(Relation::identity(g.clone()).is_reflexive());
        let g2 = GroundSet::new(vec!["x".into(), "y".into()]).unwrap();
        assert!(!Relation::empty(g2).is_reflexive());
    }

    #[test]
    fn chain_is_transitive_missing_composite_is_not() {
        assert!(chain().is_transitive());
        let r = Relation::from_id_pairs(abc(), &[("a", "b"), ("b", "c")]).unwrap();
        assert!(!r.is_transitive());
        assert_eq!(r.transitivity_witness(), Some((0, 1, 2)));
        let reflexive = Relation::from_id_pairs(
            abc(),
            &[("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")],
        )
        .unwrap();
        let err = reflexive.ensure_preorder().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(a, b)") && msg.contains("(b, c)"), "{msg}");
    }

    #[test]
    fn closure_of_two_step_chain() {
        let r = Relation::from_id_pairs(abc(), &[("a", "b"), ("b", "c")]).unwrap();
        let closed = r.transitive_reflexive_closure();
        let mut expected: Vec<(usize, usize)> = vec![(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];
        expected.sort_unstable();
        assert_eq!(closed.pairs(), expected);
        assert_eq!(closed.transitive_reflexive_closure(), closed);
    }

    // Oracle: iterate boolean matrix composition to a fixed point, then add the diagonal.
    fn closure_oracle(r: &Relation) -> Relation {
        let n = r.len();
        let mut m = vec![vec![false; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = i == j || r.contains(i, j);
            }
        }
        loop {
            let mut next = m.clone();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if m[i][k] && m[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
            if next == m {
                break;
            }
            m = next;
        }
        Relation::from_matrix(r.ground().clone(), &m).unwrap()
    }

    #[test]
    fn closure_matches_fixed_point_oracle() {
        let g = GroundSet::new((0..6).map(|i| format!("p{i}")).collect()).unwrap();
        // fixed pseudo random pick, stable across runs
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..40 {
            let r = Relation::from_fn(g.clone(), |_, _| next() % 4 == 0);
            assert_eq!(r.transitive_reflexive_closure(), closure_oracle(&r));
        }
    }

    #[test]
    fn upper_sets_on_chain() {
        let r = chain();
        let g = r.ground().clone();
        let top = IndexSet::from_ids(g.clone(), &["c"]).unwrap();
        assert!(r.is_upper_set(&top).unwrap());
        let bottom = IndexSet::from_ids(g.clone(), &["a"]).unwrap();
        assert!(!r.is_upper_set(&bottom).unwrap());
        assert_eq!(
            r.upper_closure(&bottom).unwrap(),
            IndexSet::full(g.clone())
        );
        let mid = IndexSet::from_ids(g.clone(), &["b"]).unwrap();
        assert_eq!(
            r.upper_closure(&mid).unwrap(),
            IndexSet::from_ids(g.clone(), &["b", "c"]).unwrap()
        );
        let upper = IndexSet::from_ids(g, &["b", "c"]).unwrap();
        assert_eq!(r.upper_closure(&upper).unwrap(), upper);
    }

    #[test]
    fn upper_set_checks_require_preorder() {
        let r = Relation::from_id_pairs(abc(), &[("a", "b"), ("b", "c")]).unwrap();
        let s = IndexSet::from_ids(r.ground().clone(), &["c"]).unwrap();
        assert!(matches!(
            r.is_upper_set(&s).unwrap_err(),
            Error::RelationNotPreorder { .. }
        ));
    }

    #[test]
    fn zero_one_cost_entries() {
        let g2 = GroundSet::new(vec!["x".into(), "y".into()]).unwrap();
        let c = Relation::identity(g2.clone()).to_cost();
        assert!(c.get(0, 0).is_zero() && c.get(1, 1).is_zero());
        assert!(c.get(0, 1).is_one() && c.get(1, 0).is_one());
        let full = Relation::full(g2).to_cost();
        assert!(full.entries().iter().all(|e| e.is_zero()));
        let chain_cost = chain().to_cost();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(chain_cost.get(i, j).is_zero(), i <= j);
            }
        }
    }

    #[test]
    fn preorder_cost_passes_validation() {
        let report = chain().to_cost().validate();
        assert!(report.zero_diagonal && report.triangle);
        assert_eq!(report.witness, None);
    }

    #[test]
    fn singleton_unit_diagonal_fails_validation() {
        let g = GroundSet::new(vec!["x".into()]).unwrap();
        let c = CostMatrix::new(g, vec![Rational::one()]).unwrap();
        let report = c.validate();
        assert!(!report.zero_diagonal);
        assert!(matches!(
            c.ensure_conditions().unwrap_err(),
            Error::CostConditionsViolated { .. }
        ));
    }

    // zero_diagonal ∧ triangle for the 0/1 cost characterizes preorders;
    // exhaustive over all 512 relations on 3 points.
    #[test]
    fn cost_conditions_characterize_preorders() {
        let g = abc();
        for mask in 0u32..512 {
            let r = Relation::from_fn(g.clone(), |i, j| mask & (1 << (3 * i + j)) != 0);
            let report = r.to_cost().validate();
            assert_eq!(
                report.zero_diagonal && report.triangle,
                r.is_preorder(),
                "mask {mask}"
            );
        }
    }

    #[test]
    fn family_nesting() {
        let r = chain();
        let singleton = RelationFamily::new(vec![r.clone()]).unwrap();
        let report = singleton.check();
        assert!(report.nested);
        assert_eq!(report.union, r);

        let id = Relation::identity(abc());
        let grown = RelationFamily::new(vec![id.clone(), r.clone()]).unwrap();
        assert!(grown.check().nested);
        let shrunk = RelationFamily::new(vec![r.clone(), id]).unwrap();
        let shrunk_report = shrunk.check();
        assert!(!shrunk_report.nested);
        assert_eq!(shrunk_report.union, r);
    }

    #[test]
    fn nested_family_costs_decrease_pointwise() {
        let id = Relation::identity(abc());
        let r = chain();
        let family = RelationFamily::new(vec![id.clone(), r.clone()]).unwrap();
        assert!(family.check().nested);
        let (c0, c1) = (id.to_cost(), r.to_cost());
        for i in 0..3 {
            for j in 0..3 {
                assert!(c0.get(i, j) >= c1.get(i, j));
            }
        }
    }
}
