//! Pareto machinery: dominance, streaming non-dominated archives,
//! batch filtering, fast non-dominated sorting and crowding distance.
//!
//! Everything here treats objective vectors as plain `f64` slices to be
//! minimized; the dimension is arbitrary so the same code serves the
//! five-objective vectors and the low-dimensional test fixtures.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParetoError {
    #[error("objective vectors have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

/// Strict Pareto dominance for minimization: `a` dominates `b` iff `a <= b`
/// componentwise and `a != b`.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(dominates_eq_len(a, b))
}

/// Dominance for slices known to have equal length.
#[inline]
pub(crate) fn dominates_eq_len(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Streaming archive of mutually non-dominated objective vectors with one
/// attached payload per distinct vector (first insertion wins).
///
/// Entries are kept ordered by component sum. Since any dominator of `v` has
/// a sum no larger than `v`'s, rejection scans only the prefix up to `v`'s
/// sum and removal scans only the suffix, which keeps exhaustive-search
/// workloads cheap.
#[derive(Debug, Clone)]
pub struct ParetoArchive<P> {
    sums: Vec<f64>,
    objectives: Vec<Vec<f64>>,
    payloads: Vec<Vec<P>>,
    dim: Option<usize>,
    retain_equal_payloads: bool,
}

impl<P> Default for ParetoArchive<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> ParetoArchive<P> {
    pub fn new() -> Self {
        ParetoArchive {
            sums: Vec::new(),
            objectives: Vec::new(),
            payloads: Vec::new(),
            dim: None,
            retain_equal_payloads: false,
        }
    }

    /// Keep every payload whose vector ties an existing entry instead of
    /// only the first one.
    pub fn with_equal_payload_retention(mut self) -> Self {
        self.retain_equal_payloads = true;
        self
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    /// Inserts a candidate vector. Returns `false` and leaves the archive
    /// unchanged when the candidate is dominated by or equal to an existing
    /// entry; otherwise evicts everything it dominates and returns `true`.
    ///
    /// Panics if the dimension differs from earlier insertions.
    pub fn insert(&mut self, objectives: Vec<f64>, payload: P) -> bool {
        match self.dim {
            None => self.dim = Some(objectives.len()),
            Some(d) => assert_eq!(d, objectives.len(), "archive dimension mismatch"),
        }
        let sum: f64 = objectives.iter().sum();
        // f64 addition is monotone, so componentwise <= implies sum <=.
        let upper = self.sums.partition_point(|&s| s <= sum);
        for i in 0..upper {
            if self.objectives[i] == objectives {
                if self.retain_equal_payloads {
                    self.payloads[i].push(payload);
                }
                return false;
            }
            if dominates_eq_len(&self.objectives[i], &objectives) {
                return false;
            }
        }
        // Evict dominated entries; they all sit at sums >= the candidate's.
        // Compact the suffix in one pass to keep mass evictions linear.
        let lower = self.sums.partition_point(|&s| s < sum);
        let mut write = lower;
        for read in lower..self.objectives.len() {
            if !dominates_eq_len(&objectives, &self.objectives[read]) {
                if write != read {
                    self.sums.swap(write, read);
                    self.objectives.swap(write, read);
                    self.payloads.swap(write, read);
                }
                write += 1;
            }
        }
        self.sums.truncate(write);
        self.objectives.truncate(write);
        self.payloads.truncate(write);
        let at = self.sums.partition_point(|&s| s <= sum);
        self.sums.insert(at, sum);
        self.objectives.insert(at, objectives);
        self.payloads.insert(at, vec![payload]);
        true
    }

    /// Folds another archive into this one.
    pub fn merge(&mut self, other: ParetoArchive<P>) {
        for (objectives, payloads) in other.objectives.into_iter().zip(other.payloads) {
            let mut payloads = payloads.into_iter();
            if let Some(first) = payloads.next() {
                self.insert(objectives.clone(), first);
            }
            for extra in payloads {
                self.insert(objectives.clone(), extra);
            }
        }
    }

    /// Entries in ascending component-sum order.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &P)> {
        self.objectives
            .iter()
            .zip(&self.payloads)
            .map(|(o, p)| (o.as_slice(), &p[0]))
    }

    /// Entry indices sorted lexicographically by objective vector; the
    /// canonical export order.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.objectives[a]
                .partial_cmp(&self.objectives[b])
                .expect("objective values are never NaN")
        });
        idx
    }

    pub fn objectives_at(&self, i: usize) -> &[f64] {
        &self.objectives[i]
    }

    pub fn payload_at(&self, i: usize) -> &P {
        &self.payloads[i][0]
    }

    pub fn payloads_at(&self, i: usize) -> &[P] {
        &self.payloads[i]
    }

    pub fn objective_vectors(&self) -> Vec<Vec<f64>> {
        self.objectives.clone()
    }
}

/// Indices of the maximal mutually non-dominated subset, duplicates
/// collapsed to their first occurrence; equivalent to folding
/// [`ParetoArchive::insert`] over the points in any order.
pub fn non_dominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut keep = Vec::new();
    'candidate: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if dominates_eq_len(q, p) || (q == p && j < i) {
                continue 'candidate;
            }
        }
        keep.push(i);
    }
    keep
}

/// The maximal mutually non-dominated subset as owned vectors.
pub fn non_dominated_filter(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    non_dominated_indices(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// Fast non-dominated sorting: partitions indices into fronts where front 0
/// is the non-dominated set and each later front is non-dominated once the
/// earlier ones are removed.
pub fn fast_nondominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut domination_count = vec![0u32; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_eq_len(&points[i], &points[j]) {
                dominated_by[i].push(j as u32);
                domination_count[j] += 1;
            } else if dominates_eq_len(&points[j], &points[i]) {
                dominated_by[j].push(i as u32);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                let j = j as usize;
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// NSGA-II crowding distance of each member of one front. Boundary points
/// get infinity, fronts of at most two points are all infinite, and
/// objectives with zero range contribute nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let dim = front[0].len();
    let mut distance = vec![0.0f64; n];
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..dim {
        order.sort_by(|&a, &b| front[a][m].partial_cmp(&front[b][m]).expect("no NaN"));
        let lo = front[order[0]][m];
        let hi = front[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = (front[order[w + 1]][m] - front[order[w - 1]][m]) / range;
            distance[order[w]] += gap;
        }
    }
    distance
}
