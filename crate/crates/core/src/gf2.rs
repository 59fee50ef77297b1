//! Sparse linear algebra over Z/2.
//!
//! A vector is a strictly increasing `Vec<usize>` of the coordinates set to 1.
//! Addition is symmetric difference.

use std::collections::HashMap;

/// `a + b` over Z/2 for sorted index lists.
pub fn add(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn add_assign(a: &mut Vec<usize>, b: &[usize]) {
    *a = add(a, b);
}

/// Incremental echelon basis keyed by each vector's largest coordinate.
///
/// Every stored vector carries a tag (another sorted Z/2 vector) that records
/// which caller-supplied generators it is a combination of, modulo whatever
/// was inserted untagged.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    pivots: HashMap<usize, usize>,
    rows: Vec<(Vec<usize>, Vec<usize>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` (with tag `tag`) to a vector with no pivot of this basis as
    /// its top coordinate. Returns the remainder and the accumulated tag.
    pub fn reduce_tagged(&self, mut v: Vec<usize>, mut tag: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        while let Some(&top) = v.last() {
            match self.pivots.get(&top) {
                Some(&r) => {
                    let (row, row_tag) = &self.rows[r];
                    add_assign(&mut v, row);
                    if !row_tag.is_empty() {
                        add_assign(&mut tag, row_tag);
                    }
                }
                None => break,
            }
        }
        (v, tag)
    }

    pub fn reduce(&self, v: Vec<usize>) -> Vec<usize> {
        self.reduce_tagged(v, Vec::new()).0
    }

    /// Fully reduced remainder: eliminates pivots below the top as well, so two
    /// vectors are congruent modulo the span iff their remainders are equal.
    pub fn normal_form(&self, v: Vec<usize>) -> Vec<usize> {
        let mut v = v;
        let mut out = Vec::new();
        loop {
            v = self.reduce(v);
            match v.pop() {
                Some(top) => out.push(top),
                None => break,
            }
        }
        out.reverse();
        out
    }

    pub fn contains(&self, v: Vec<usize>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert; returns false if `v` was already in the span.
    pub fn insert(&mut self, v: Vec<usize>) -> bool {
        self.insert_tagged(v, Vec::new()).is_none()
    }

    /// Insert a tagged vector. If it reduces to zero, returns the tag it
    /// reduced to (a dependency among tags), otherwise `None`.
    pub fn insert_tagged(&mut self, v: Vec<usize>, tag: Vec<usize>) -> Option<Vec<usize>> {
        let (v, tag) = self.reduce_tagged(v, tag);
        match v.last() {
            Some(&top) => {
                self.pivots.insert(top, self.rows.len());
                self.rows.push((v, tag));
                None
            }
            None => Some(tag),
        }
    }
}

/// Rank of a set of sparse vectors.
pub fn rank<I: IntoIterator<Item = Vec<usize>>>(vectors: I) -> usize {
    let mut basis = EchelonBasis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_set() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::btree_set(0usize..20, 0..8).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn add_is_involutive(a in sorted_set(), b in sorted_set()) {
            prop_assert!(add(&a, &a).is_empty());
            prop_assert_eq!(add(&add(&a, &b), &b), a.clone());
            prop_assert_eq!(add(&a, &b), add(&b, &a));
        }

        #[test]
        fn span_membership(vs in proptest::collection::vec(sorted_set(), 0..6), mask in 0u32..64) {
            let mut basis = EchelonBasis::new();
            for v in &vs { basis.insert(v.clone()); }
            let mut combo = Vec::new();
            for (i, v) in vs.iter().enumerate() {
                if mask & (1 << i) != 0 { combo = add(&combo, v); }
            }
            prop_assert!(basis.contains(combo.clone()));
            prop_assert!(basis.normal_form(combo).is_empty());
        }
    }

    #[test]
    fn rank_of_triangle_boundaries() {
        // edges 0=ab, 1=ac, 2=bc as vertex pairs a=0,b=1,c=2
        assert_eq!(rank(vec![vec![0, 1], vec![0, 2], vec![1, 2]]), 2);
    }

    #[test]
    fn tags_track_generators() {
        let mut b = EchelonBasis::new();
        b.insert(vec![0, 1]);
        assert!(b.insert_tagged(vec![0, 2], vec![0]).is_none());
        // [1,2] = [0,1] + [0,2] so its tag is {0}
        let (rem, tag) = b.reduce_tagged(vec![1, 2], vec![]);
        assert!(rem.is_empty());
        assert_eq!(tag, vec![0]);
    }
}
