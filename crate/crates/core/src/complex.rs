//! Concurrences and the descending filtered Curto-Itskov complex.
//!
//! A concurrence is a set of variables all active in one observation. Its count
//! is the number of observations whose active set contains it. The frame at
//! level `f` is every concurrence with count `≥ f`, so the whole filtration is
//! determined by one map from simplex to count.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Default cap on subset visits during construction.
pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;

/// A nonempty, strictly increasing set of variable indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[u32; 8]>);

impl Simplex {
    /// Build from arbitrary indices; sorts and deduplicates. Panics on empty input.
    pub fn new(vertices: impl IntoIterator<Item = u32>) -> Self {
        let mut v: SmallVec<[u32; 8]> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        assert!(!v.is_empty(), "a simplex needs at least one vertex");
        Simplex(v)
    }

    pub fn from_usize(vertices: &[usize]) -> Self {
        Self::new(vertices.iter().map(|&v| v as u32))
    }

    pub(crate) fn from_sorted(v: &[u32]) -> Self {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(v))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// The codimension-one faces, in order of the removed vertex. Empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    pub fn with_vertex(&self, v: u32) -> Simplex {
        let mut out = self.0.clone();
        match out.binary_search(&v) {
            Ok(_) => {}
            Err(pos) => out.insert(pos, v),
        }
        Simplex(out)
    }

    pub fn labels<'a>(&self, labels: &'a [String]) -> Vec<&'a str> {
        self.0.iter().map(|&v| labels[v as usize].as_str()).collect()
    }

    pub fn display<'a>(&'a self, labels: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Simplex, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for v in self.0.vertices() {
                    f.write_str(&self.1[*v as usize])?;
                }
                Ok(())
            }
        }
        D(self, labels)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Number of observations in which every variable of `subset` is active.
pub fn concurrence_count(bm: &BinaryMatrix, subset: &Simplex) -> usize {
    (0..bm.n_obs())
        .filter(|&o| subset.vertices().iter().all(|&v| bm.get(o, v as usize)))
        .count()
}

/// `C(n, k)` exactly; saturates at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_dim: usize,
    pub work_budget: u64,
}

impl BuildOptions {
    pub fn new(max_dim: usize) -> Self {
        Self {
            max_dim,
            work_budget: DEFAULT_WORK_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.work_budget = budget;
        self
    }
}

/// The filtered Curto-Itskov complex, stored as simplex counts up to a dimension cap.
///
/// Simplices of dimension `≤ max_dim_stored` are stored; building with
/// `max_dim = d` stores one dimension above `d` so that `d`-dimensional
/// classes can die. The distinct nonempty observation rows are kept as well,
/// which lets uncapped quantities (Euler characteristic) be computed later.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    labels: Vec<String>,
    n_obs: usize,
    max_dim_stored: usize,
    max_level: usize,
    by_dim: Vec<Vec<(Simplex, usize)>>,
    index: HashMap<Simplex, usize>,
    rows: Vec<(Vec<u32>, usize)>,
}

/// Distinct nonempty active sets with their multiplicities, sorted.
pub(crate) fn distinct_rows(bm: &BinaryMatrix) -> Vec<(Vec<u32>, usize)> {
    let mut groups: HashMap<Vec<u32>, usize> = HashMap::new();
    for o in 0..bm.n_obs() {
        let active = bm.active_set(o);
        if !active.is_empty() {
            *groups.entry(active).or_default() += 1;
        }
    }
    let mut rows: Vec<_> = groups.into_iter().collect();
    rows.sort();
    rows
}

fn projected_visits(rows: &[(Vec<u32>, usize)], max_size: usize) -> u128 {
    rows.iter()
        .map(|(r, _)| {
            (1..=max_size.min(r.len()))
                .map(|k| binomial(r.len() as u64, k as u64))
                .fold(0u128, u128::saturating_add)
        })
        .fold(0u128, u128::saturating_add)
}

fn for_each_subset(set: &[u32], max_size: usize, mut visit: impl FnMut(&[u32])) {
    fn rec(set: &[u32], start: usize, max_size: usize, cur: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        for i in start..set.len() {
            cur.push(set[i]);
            visit(cur);
            if cur.len() < max_size {
                rec(set, i + 1, max_size, cur, visit);
            }
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(max_size);
    rec(set, 0, max_size, &mut cur, &mut visit);
}

/// Build the filtered complex with simplices up to dimension `max_dim + 1`.
pub fn build_filtered_complex(bm: &BinaryMatrix, max_dim: usize) -> Result<FilteredComplex> {
    FilteredComplex::build(bm, BuildOptions::new(max_dim))
}

impl FilteredComplex {
    pub fn build(bm: &BinaryMatrix, opts: BuildOptions) -> Result<Self> {
        let max_dim_stored = opts.max_dim + 1;
        let max_size = max_dim_stored + 1;
        let rows = distinct_rows(bm);
        let projected = projected_visits(&rows, max_size);
        if projected > opts.work_budget as u128 {
            return Err(Error::WorkBudgetExceeded {
                projected,
                budget: opts.work_budget,
            });
        }

        let counts: HashMap<Simplex, usize> = rows
            .par_iter()
            .fold(HashMap::new, |mut acc: HashMap<Simplex, usize>, (row, mult)| {
                for_each_subset(row, max_size, |s| {
                    *acc.entry(Simplex::from_sorted(s)).or_default() += mult;
                });
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                if a.len() < b.len() {
                    return merge(b, a);
                }
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });

        let mut by_dim: Vec<Vec<(Simplex, usize)>> = vec![Vec::new(); max_dim_stored + 1];
        for (s, c) in counts {
            by_dim[s.dim()].push((s, c));
        }
        Ok(Self::from_dims(bm.labels().to_vec(), bm.n_obs(), max_dim_stored, by_dim, rows))
    }

    fn from_dims(
        labels: Vec<String>,
        n_obs: usize,
        max_dim_stored: usize,
        mut by_dim: Vec<Vec<(Simplex, usize)>>,
        rows: Vec<(Vec<u32>, usize)>,
    ) -> Self {
        let mut index = HashMap::new();
        let mut max_level = 0;
        for list in by_dim.iter_mut() {
            list.sort_by(|a, b| a.0.cmp(&b.0));
            for (i, (s, c)) in list.iter().enumerate() {
                index.insert(s.clone(), i);
                max_level = max_level.max(*c);
            }
        }
        Self {
            labels,
            n_obs,
            max_dim_stored,
            max_level,
            by_dim,
            index,
            rows,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn max_dim_stored(&self) -> usize {
        self.max_dim_stored
    }

    /// Largest count present; 0 for an empty complex.
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Count of a stored simplex; `None` if it is beyond the cap or never occurs.
    pub fn count(&self, s: &Simplex) -> Option<usize> {
        let d = s.dim();
        if d > self.max_dim_stored {
            return None;
        }
        self.index.get(s).map(|&i| self.by_dim[d][i].1)
    }

    /// Index of a stored simplex inside its dimension's lexicographic list.
    pub fn position(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Stored simplices of one dimension, lexicographically sorted, with counts.
    pub fn simplices(&self, d: usize) -> &[(Simplex, usize)] {
        self.by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, usize)> {
        self.by_dim.iter().flatten().map(|(s, c)| (s, *c))
    }

    /// Distinct nonempty observation rows and their multiplicities.
    pub fn rows(&self) -> &[(Vec<u32>, usize)] {
        &self.rows
    }

    pub fn in_frame(&self, s: &Simplex, f: usize) -> bool {
        self.count(s).is_some_and(|c| c >= f)
    }

    /// All stored simplices with count `≥ f`, by dimension then lexicographically.
    pub fn frame(&self, f: usize) -> Vec<&Simplex> {
        self.iter().filter(|(_, c)| *c >= f).map(|(s, _)| s).collect()
    }

    /// Indices (into [`Self::simplices`]) of the `d`-simplices in frame `f`.
    pub fn frame_indices(&self, f: usize, d: usize) -> Vec<usize> {
        self.simplices(d)
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| *c >= f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of observations whose active set is exactly `pattern`, by
    /// Möbius inversion of the counts. Requires every subset to be stored.
    pub fn contingency_from_counts(&self, pattern: &[u32]) -> Result<usize> {
        if self.n_vars() > self.max_dim_stored + 1 {
            return Err(Error::FullTableRequiresUncapped);
        }
        let a: Vec<u32> = {
            let mut a = pattern.to_vec();
            a.sort_unstable();
            a.dedup();
            a
        };
        if a.iter().any(|&v| v as usize >= self.n_vars()) {
            return Err(Error::invalid("pattern variable out of range"));
        }
        let mut total: i64 = if a.is_empty() { self.n_obs as i64 } else { 0 };
        for (s, c) in self.iter() {
            if s.len() >= a.len() && a.iter().all(|v| s.contains(*v)) {
                let sign = if (s.len() - a.len()) % 2 == 0 { 1 } else { -1 };
                total += sign * c as i64;
            }
        }
        debug_assert!(total >= 0);
        Ok(total.max(0) as usize)
    }

    /// SHA-256 over a canonical text encoding of the counts.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(format!("n_obs={};max_dim_stored={};", self.n_obs, self.max_dim_stored));
        for l in &self.labels {
            h.update(l.as_bytes());
            h.update(b"\x1f");
        }
        for (s, c) in self.iter() {
            for v in s.vertices() {
                h.update(v.to_le_bytes());
            }
            h.update(b":");
            h.update((c as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            n_obs: self.n_obs,
            max_dim_stored: self.max_dim_stored,
            var_labels: self.labels.clone(),
            simplices: self
                .iter()
                .map(|(s, c)| SimplexJson {
                    vertices: s.labels(&self.labels).into_iter().map(String::from).collect(),
                    count: c,
                })
                .collect(),
        }
    }
}

fn merge(mut big: HashMap<Simplex, usize>, small: HashMap<Simplex, usize>) -> HashMap<Simplex, usize> {
    for (k, v) in small {
        *big.entry(k).or_default() += v;
    }
    big
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexJson {
    pub vertices: Vec<String>,
    pub count: usize,
}

/// Serialized complex; entries ordered by dimension, then lexicographically by vertex index.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexJson {
    pub n_obs: usize,
    pub max_dim_stored: usize,
    pub var_labels: Vec<String>,
    pub simplices: Vec<SimplexJson>,
}

/// Empirical contingency table over all variables, keyed by sorted active set.
pub fn contingency_table(bm: &BinaryMatrix) -> HashMap<Vec<u32>, usize> {
    let mut table = HashMap::new();
    for o in 0..bm.n_obs() {
        *table.entry(bm.active_set(o)).or_default() += 1;
    }
    table
}

/// Highest-order interaction term of the saturated log-linear model over
/// `subset`, computed on the `2^|subset|` marginal table after adding `adjust`
/// to every cell.
pub fn loglinear_interaction(bm: &BinaryMatrix, subset: &[usize], adjust: f64) -> Result<f64> {
    loglinear_interaction_within(bm, subset, subset, adjust)
}

/// Interaction term `λ_subset` (all indices at level 1) of the saturated
/// log-linear model fitted to the marginal table over `model`, which must
/// contain `subset`. With effect coding,
/// `λ = 2^{-|model|} Σ_cells (-1)^{#zeros of the cell within subset} ln(n_cell + adjust)`.
pub fn loglinear_interaction_within(
    bm: &BinaryMatrix,
    subset: &[usize],
    model: &[usize],
    adjust: f64,
) -> Result<f64> {
    let mut model_vars = model.to_vec();
    model_vars.sort_unstable();
    model_vars.dedup();
    if model_vars.len() != model.len() {
        return Err(Error::invalid("duplicate variable in model"));
    }
    if subset.len() < 2 {
        return Err(Error::invalid("interaction needs at least two variables"));
    }
    if model_vars.len() > 16 {
        return Err(Error::invalid("log-linear table limited to 16 variables"));
    }
    if model_vars.iter().any(|&v| v >= bm.n_vars()) {
        return Err(Error::invalid("variable index out of range"));
    }
    let mut mask = 0usize;
    for &s in subset {
        let pos = model_vars
            .iter()
            .position(|&m| m == s)
            .ok_or_else(|| Error::invalid("subset must lie inside the model variables"))?;
        if mask & (1 << pos) != 0 {
            return Err(Error::invalid("duplicate variable in subset"));
        }
        mask |= 1 << pos;
    }
    let k = model_vars.len();
    let mut cells = vec![0usize; 1 << k];
    for o in 0..bm.n_obs() {
        let cell = model_vars
            .iter()
            .enumerate()
            .filter(|(_, &v)| bm.get(o, v))
            .fold(0usize, |acc, (i, _)| acc | (1 << i));
        cells[cell] += 1;
    }
    let sum: f64 = cells
        .iter()
        .enumerate()
        .map(|(cell, &n)| {
            let zeros = (!cell & mask).count_ones();
            let sign = if zeros % 2 == 0 { 1.0 } else { -1.0 };
            sign * (n as f64 + adjust).ln()
        })
        .sum();
    Ok(sum / (1usize << k) as f64)
}
