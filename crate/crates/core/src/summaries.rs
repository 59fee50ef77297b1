//! Scalar summaries: the nine moments of a persistence plot and the Euler
//! characteristic of a frame.

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

pub const DEFAULT_EULER_BUDGET: u64 = 100_000_000;

/// Largest variable count for which the direct enumeration fallback runs.
pub const DIRECT_EULER_MAX_VARS: usize = 25;

/// `(i, j)` exponents of the eight non-count moments, in output order.
pub const MOMENT_INDICES: [(u32, u32); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (1, 1),
    (1, 2),
    (2, 0),
    (2, 1),
    (2, 2),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    pub dimension: usize,
    pub count: usize,
    /// `m[i][j]`; `m[0][0]` is always `None`, as is everything when `count == 0`.
    pub m: [[Option<f64>; 3]; 3],
}

impl MomentVector {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.m[i][j]
    }
}

/// Count plus `(mean of birth^i · lifespan^j)^(1/(i+j))` over the dimension-`d` pairs.
pub fn moments(diagram: &PersistenceDiagram, d: usize) -> MomentVector {
    let pairs: Vec<(f64, f64)> = diagram
        .in_dim(d)
        .map(|p| (p.birth as f64, p.lifespan() as f64))
        .collect();
    let mut m = [[None; 3]; 3];
    if !pairs.is_empty() {
        for (i, j) in MOMENT_INDICES {
            let mean = pairs
                .iter()
                .map(|(b, l)| b.powi(i as i32) * l.powi(j as i32))
                .sum::<f64>()
                / pairs.len() as f64;
            m[i as usize][j as usize] = Some(mean.powf(1.0 / (i + j) as f64));
        }
    }
    MomentVector {
        dimension: d,
        count: pairs.len(),
        m,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentJson {
    pub dimension: usize,
    pub count: usize,
    pub moments: std::collections::BTreeMap<String, Option<f64>>,
}

impl From<&MomentVector> for MomentJson {
    fn from(mv: &MomentVector) -> Self {
        Self {
            dimension: mv.dimension,
            count: mv.count,
            moments: MOMENT_INDICES
                .iter()
                .map(|&(i, j)| (format!("m{i}{j}"), mv.m[i as usize][j as usize]))
                .collect(),
        }
    }
}

/// `dimension,moment,value` rows; undefined moments are written as `NA`.
pub fn moments_csv(vectors: &[MomentVector]) -> String {
    let mut out = String::from("dimension,moment,value\n");
    for mv in vectors {
        out.push_str(&format!("{},count,{}\n", mv.dimension, mv.count));
        for (i, j) in MOMENT_INDICES {
            let v = mv.m[i as usize][j as usize]
                .map(|x| format!("{x}"))
                .unwrap_or_else(|| "NA".to_string());
            out.push_str(&format!("{},m{i}{j},{v}\n", mv.dimension));
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct EulerOptions {
    pub budget: u64,
    pub allow_direct_fallback: bool,
}

impl Default for EulerOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_EULER_BUDGET,
            allow_direct_fallback: true,
        }
    }
}

/// Variable sets as bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn from_vertices(vs: &[u32], words: usize) -> Self {
        let mut b = Self::empty(words);
        for &v in vs {
            b.0[v as usize / 64] |= 1 << (v % 64);
        }
        b
    }

    fn has(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

/// Rows, their weights, and per-variable row membership.
struct RowIndex {
    words: usize,
    rows: Vec<Bits>,
    weights: Vec<usize>,
    n_vars: usize,
}

impl RowIndex {
    fn new(fc: &FilteredComplex) -> Self {
        let words = fc.n_vars().div_ceil(64).max(1);
        Self {
            words,
            rows: fc.rows().iter().map(|(r, _)| Bits::from_vertices(r, words)).collect(),
            weights: fc.rows().iter().map(|(_, m)| *m).collect(),
            n_vars: fc.n_vars(),
        }
    }

    fn weight(&self, rows: &[usize]) -> usize {
        rows.iter().map(|&r| self.weights[r]).sum()
    }

    /// Intersection of the given rows' active sets.
    fn closure(&self, rows: &[usize]) -> Bits {
        let mut acc = Bits(vec![u64::MAX; self.words]);
        for &r in rows {
            acc = acc.and(&self.rows[r]);
        }
        acc
    }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::EulerBudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Maximal simplices of the uncapped frame at level `f`.
///
/// Every maximal face is closed (equal to the intersection of the rows that
/// contain it), so closed sets with support `≥ f` are enumerated by
/// prefix-preserving closure extension and the maximal ones kept.
fn maximal_faces(idx: &RowIndex, f: usize, budget: &mut Budget) -> Result<Vec<Bits>> {
    let mut closed: Vec<Bits> = Vec::new();

    fn extend(
        idx: &RowIndex,
        f: usize,
        current: &Bits,
        rows: &[usize],
        core: usize,
        closed: &mut Vec<Bits>,
        budget: &mut Budget,
    ) -> Result<()> {
        for e in core..idx.n_vars {
            if current.has(e) {
                continue;
            }
            budget.tick()?;
            let sub: Vec<usize> = rows.iter().copied().filter(|&r| idx.rows[r].has(e)).collect();
            if idx.weight(&sub) < f {
                continue;
            }
            let next = idx.closure(&sub);
            // prefix preservation: no new vertex below e
            let preserved = (0..e).all(|v| next.has(v) == current.has(v));
            if !preserved {
                continue;
            }
            closed.push(next.clone());
            extend(idx, f, &next, &sub, e + 1, closed, budget)?;
        }
        Ok(())
    }

    let all: Vec<usize> = (0..idx.rows.len()).collect();
    if idx.weight(&all) < f {
        return Ok(Vec::new());
    }
    let base = idx.closure(&all);
    if !base.is_zero() {
        closed.push(base.clone());
    }
    extend(idx, f, &base, &all, 0, &mut closed, budget)?;

    closed.sort_by_key(|b| std::cmp::Reverse(b.count()));
    let mut maximal: Vec<Bits> = Vec::new();
    for c in closed {
        budget.tick()?;
        if !maximal.iter().any(|m| c.is_subset(m)) {
            maximal.push(c);
        }
    }
    Ok(maximal)
}

/// Keep only the inclusion-maximal nonempty sets, deduplicated and sorted.
fn reduce_to_maximal(mut sets: Vec<Bits>) -> Vec<Bits> {
    sets.retain(|s| !s.is_zero());
    sets.sort();
    sets.dedup();
    let keep: Vec<bool> = (0..sets.len())
        .map(|i| !(0..sets.len()).any(|j| j != i && sets[i].is_subset(&sets[j])))
        .collect();
    sets.into_iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s).collect()
}

/// χ of the union of full simplices `sets` (already maximal, sorted):
/// `χ(A ∪ R) = χ(A) + χ(R) − χ(A ∩ R)` with `A ∩ R` again a union of simplices.
fn union_euler(
    sets: &[Bits],
    memo: &mut HashMap<Vec<Bits>, i64>,
    budget: &mut Budget,
) -> Result<i64> {
    match sets.len() {
        0 => return Ok(0),
        1 => return Ok(1),
        _ => {}
    }
    if let Some(&v) = memo.get(sets) {
        return Ok(v);
    }
    budget.tick()?;
    let (first, rest) = sets.split_first().expect("len >= 2");
    let meet = reduce_to_maximal(rest.iter().map(|r| r.and(first)).collect());
    let chi = 1 + union_euler(rest, memo, budget)? - union_euler(&meet, memo, budget)?;
    memo.insert(sets.to_vec(), chi);
    Ok(chi)
}

/// Euler characteristic of the uncapped frame at level `f`, by
/// inclusion–exclusion over its maximal faces.
pub fn euler_inclusion_exclusion(fc: &FilteredComplex, f: usize, budget: u64) -> Result<i64> {
    let idx = RowIndex::new(fc);
    let mut budget = Budget { used: 0, limit: budget };
    let faces = maximal_faces(&idx, f.max(1), &mut budget)?;
    let faces = reduce_to_maximal(faces);
    let mut memo = HashMap::new();
    union_euler(&faces, &mut memo, &mut budget)
}

/// Euler characteristic of the uncapped frame at level `f` by enumerating
/// every face with support `≥ f`.
pub fn euler_direct(fc: &FilteredComplex, f: usize) -> i64 {
    let idx = RowIndex::new(fc);
    let f = f.max(1);
    fn rec(idx: &RowIndex, f: usize, start: usize, size: usize, rows: &[usize]) -> i64 {
        let mut chi = 0;
        for v in start..idx.n_vars {
            let sub: Vec<usize> = rows.iter().copied().filter(|&r| idx.rows[r].has(v)).collect();
            if idx.weight(&sub) >= f {
                // a face with size+1 vertices has dimension `size`
                chi += if size % 2 == 0 { 1 } else { -1 };
                chi += rec(idx, f, v + 1, size + 1, &sub);
            }
        }
        chi
    }
    let all: Vec<usize> = (0..idx.rows.len()).collect();
    rec(&idx, f, 0, 0, &all)
}

/// Euler characteristic of the uncapped frame at level `f`.
///
/// Uses inclusion–exclusion over maximal faces; if that exceeds the budget and
/// there are at most [`DIRECT_EULER_MAX_VARS`] variables, falls back to direct
/// enumeration.
pub fn euler_characteristic(fc: &FilteredComplex, f: usize) -> Result<i64> {
    euler_characteristic_with(fc, f, EulerOptions::default())
}

pub fn euler_characteristic_with(fc: &FilteredComplex, f: usize, opts: EulerOptions) -> Result<i64> {
    match euler_inclusion_exclusion(fc, f, opts.budget) {
        Err(e) if e.is_budget() && opts.allow_direct_fallback && fc.n_vars() <= DIRECT_EULER_MAX_VARS => {
            Ok(euler_direct(fc, f))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_filtered_complex;
    use crate::nullmodel::{toy_fixture, Toy};
    use crate::persistence::{compute_persistence, PersistencePair, PersistenceDiagram, Provenance};

    fn prov() -> Provenance {
        Provenance {
            config_hash: String::new(),
            input_digest: String::new(),
        }
    }

    #[test]
    fn dataset_one_moments() {
        let fc = build_filtered_complex(&toy_fixture(Toy::I), 1).unwrap();
        let d = compute_persistence(&fc, 1).unwrap();
        let m = moments(&d, 1);
        assert_eq!(m.count, 2);
        assert!((m.get(1, 0).unwrap() - 1.5).abs() < 1e-12);
        assert!((m.get(0, 1).unwrap() - 1.5).abs() < 1e-12);
        assert!((m.get(1, 1).unwrap() - 2.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.get(0, 0), None);
    }

    #[test]
    fn single_essential_pair() {
        let p = PersistencePair {
            dimension: 2,
            birth: 7,
            death: 0,
        };
        let d = PersistenceDiagram::from_pairs(vec![p], 2, prov());
        let m = moments(&d, 2);
        for (i, j) in MOMENT_INDICES {
            assert!((m.get(i as usize, j as usize).unwrap() - 7.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_dimension_is_null() {
        let d = PersistenceDiagram::from_pairs(vec![], 1, prov());
        let m = moments(&d, 1);
        assert_eq!(m.count, 0);
        assert!(m.m.iter().flatten().all(Option::is_none));
        let json = serde_json::to_string(&MomentJson::from(&m)).unwrap();
        assert!(json.contains("\"m11\":null"), "{json}");
        assert!(moments_csv(&[m]).contains("1,m22,NA"));
    }

    #[test]
    fn euler_examples() {
        let fc = build_filtered_complex(&toy_fixture(Toy::IV), 2).unwrap();
        assert_eq!(euler_characteristic(&fc, 1).unwrap(), 2);
        assert_eq!(euler_direct(&fc, 1), 2);

        let fc = build_filtered_complex(&toy_fixture(Toy::I), 1).unwrap();
        assert_eq!(euler_characteristic(&fc, 1).unwrap(), -1);
        assert_eq!(euler_characteristic(&fc, fc.max_level() + 1).unwrap(), 0);
        assert_eq!(euler_direct(&fc, fc.max_level() + 1), 0);
    }

    #[test]
    fn euler_ignores_the_cap() {
        // one observation with five active variables: a full 4-simplex, χ = 1
        let bm = crate::matrix::BinaryMatrix::from_rows(["a", "b", "c", "d", "e"], &[[1, 1, 1, 1, 1]]).unwrap();
        let fc = build_filtered_complex(&bm, 0).unwrap();
        assert_eq!(euler_characteristic(&fc, 1).unwrap(), 1);
        assert_eq!(euler_direct(&fc, 1), 1);
    }

    #[test]
    fn euler_budget() {
        let fc = build_filtered_complex(&toy_fixture(Toy::I), 1).unwrap();
        let opts = EulerOptions {
            budget: 1,
            allow_direct_fallback: false,
        };
        assert!(matches!(
            euler_characteristic_with(&fc, 1, opts),
            Err(Error::EulerBudgetExceeded { .. })
        ));
        let opts = EulerOptions {
            budget: 1,
            allow_direct_fallback: true,
        };
        assert_eq!(euler_characteristic_with(&fc, 1, opts).unwrap(), -1);
    }
}
