use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{ComplexError, GradedComplex};
use crate::algebra::{IntMatrix, SparseVec};
use crate::label::Label;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MorseError {
    #[error("pair ({upper}, {lower}) does not have a unit incidence")]
    NonUnitPivot { upper: Label, lower: Label },
    #[error("matching has a directed cycle in its reduction graph")]
    CyclicMatching,
    #[error("label {0} appears in more than one pair")]
    OverlappingPairs(Label),
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("pivot for pair ({upper}, {lower}) degenerated during elimination")]
    PivotDrift { upper: Label, lower: Label },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A homotopy-equivalent reduction of a complex onto part of its basis.
///
/// `project` (original -> reduced) and `include` (reduced -> original)
/// are chain maps with `project . include = id`; they are the recorded
/// basis change carrying classes between the two complexes.
#[derive(Debug, Clone)]
pub struct MorseReduction {
    pub reduced: GradedComplex,
    pub project: IntMatrix,
    pub include: IntMatrix,
}

struct Eliminator<'a> {
    complex: &'a GradedComplex,
    alive: Vec<bool>,
    cols: Vec<SparseVec>,
    row_occ: Vec<BTreeSet<usize>>,
    pi: Vec<SparseVec>,
    pi_occ: Vec<BTreeSet<usize>>,
    iota: Vec<SparseVec>,
    touched: Vec<usize>,
}

impl<'a> Eliminator<'a> {
    fn new(c: &'a GradedComplex) -> Self {
        let n = c.dim();
        let cols: Vec<SparseVec> = (0..n).map(|j| c.differential().column(j).clone()).collect();
        let mut row_occ = vec![BTreeSet::new(); n];
        for (j, col) in cols.iter().enumerate() {
            for (r, _) in col {
                row_occ[*r].insert(j);
            }
        }
        let pi: Vec<SparseVec> = (0..n).map(|i| vec![(i, BigInt::one())]).collect();
        let mut pi_occ = vec![BTreeSet::new(); n];
        for (e, v) in pi.iter().enumerate() {
            for (r, _) in v {
                pi_occ[*r].insert(e);
            }
        }
        let iota = (0..n).map(|i| vec![(i, BigInt::one())]).collect();
        Eliminator {
            complex: c,
            alive: vec![true; n],
            cols,
            row_occ,
            pi,
            pi_occ,
            iota,
            touched: Vec::new(),
        }
    }

    fn set_col(&mut self, j: usize, new: SparseVec) {
        for (r, _) in &self.cols[j] {
            self.row_occ[*r].remove(&j);
        }
        for (r, _) in &new {
            self.row_occ[*r].insert(j);
        }
        self.cols[j] = new;
    }

    fn set_pi(&mut self, e: usize, new: SparseVec) {
        for (r, _) in &self.pi[e] {
            self.pi_occ[*r].remove(&e);
        }
        for (r, _) in &new {
            self.pi_occ[*r].insert(e);
        }
        self.pi[e] = new;
    }

    /// Cancels the pair (upper `a`, lower `b`); the current incidence must
    /// be a unit.
    fn eliminate(&mut self, a: usize, b: usize) -> Result<(), MorseError> {
        let da = self.cols[a].clone();
        let eps = match da.binary_search_by_key(&b, |e| e.0) {
            Ok(pos) if da[pos].1.abs().is_one() => da[pos].1.clone(),
            _ => {
                return Err(MorseError::PivotDrift {
                    upper: self.complex.label(a).clone(),
                    lower: self.complex.label(b).clone(),
                })
            }
        };
        self.touched.clear();

        // clear column entries at row b in all other alive columns, and
        // push the correction into the inclusion map
        let users: Vec<usize> = self.row_occ[b].iter().copied().collect();
        for y in users {
            if y == a || !self.alive[y] {
                continue;
            }
            let c = self.cols[y]
                .binary_search_by_key(&b, |e| e.0)
                .map(|pos| self.cols[y][pos].1.clone())
                .unwrap();
            let q = -(&c * &eps);
            let new_col = crate::algebra::axpy(&self.cols[y], &da, &q);
            self.set_col(y, new_col);
            self.iota[y] = crate::algebra::axpy(&self.iota[y], &self.iota[a], &q);
            self.touched.push(y);
        }

        // drop coordinate a from the columns above it
        let above: Vec<usize> = self.row_occ[a].iter().copied().collect();
        for y in above {
            if !self.alive[y] || y == a || y == b {
                continue;
            }
            let mut col = self.cols[y].clone();
            if let Ok(pos) = col.binary_search_by_key(&a, |e| e.0) {
                col.remove(pos);
                self.set_col(y, col);
                self.touched.push(y);
            }
        }

        // projection coordinate rewrite: a -> 0, b -> -eps * (da minus b)
        let replacement: SparseVec = da
            .iter()
            .filter(|(r, _)| *r != b && *r != a)
            .map(|(r, v)| (*r, -(&eps * v)))
            .collect();
        let holders_a: Vec<usize> = self.pi_occ[a].iter().copied().collect();
        for e in holders_a {
            let mut v = self.pi[e].clone();
            if let Ok(pos) = v.binary_search_by_key(&a, |e2| e2.0) {
                v.remove(pos);
                self.set_pi(e, v);
            }
        }
        let holders_b: Vec<usize> = self.pi_occ[b].iter().copied().collect();
        for e in holders_b {
            let mut v = self.pi[e].clone();
            if let Ok(pos) = v.binary_search_by_key(&b, |e2| e2.0) {
                let vb = v.remove(pos).1;
                v = crate::algebra::axpy(&v, &replacement, &vb);
                self.set_pi(e, v);
            }
        }

        // retire the pair
        self.alive[a] = false;
        self.alive[b] = false;
        self.set_col(a, Vec::new());
        self.set_col(b, Vec::new());
        self.iota[a].clear();
        self.iota[b].clear();
        Ok(())
    }

    fn finish(self) -> Result<MorseReduction, MorseError> {
        let n = self.complex.dim();
        let kept: Vec<usize> = (0..n).filter(|&i| self.alive[i]).collect();
        let mut pos = vec![usize::MAX; n];
        for (new, &old) in kept.iter().enumerate() {
            pos[old] = new;
        }
        let labels: Vec<Label> = kept
            .iter()
            .map(|&i| self.complex.label(i).clone())
            .collect();
        let grading: Vec<i64> = kept.iter().map(|&i| self.complex.lift(i)).collect();
        let mut diff = IntMatrix::zero(kept.len(), kept.len());
        for (new_j, &old_j) in kept.iter().enumerate() {
            let col: SparseVec = self.cols[old_j]
                .iter()
                .map(|(r, v)| (pos[*r], v.clone()))
                .collect();
            debug_assert!(col.iter().all(|(r, _)| *r != usize::MAX));
            let mut col = col;
            col.sort_by_key(|e| e.0);
            diff.set_column(new_j, col);
        }
        let reduced = GradedComplex::new(labels, grading, self.complex.p(), diff)?;

        let mut project = IntMatrix::zero(kept.len(), n);
        for e in 0..n {
            let col: SparseVec = self.pi[e]
                .iter()
                .map(|(r, v)| (pos[*r], v.clone()))
                .collect();
            let mut col = col;
            col.sort_by_key(|x| x.0);
            project.set_column(e, col);
        }
        let mut include = IntMatrix::zero(n, kept.len());
        for (new_j, &old_j) in kept.iter().enumerate() {
            include.set_column(new_j, self.iota[old_j].clone());
        }
        Ok(MorseReduction {
            reduced,
            project,
            include,
        })
    }
}

/// Reduces a complex by cancelling an explicit list of (upper, lower)
/// pairs. Every pair must have unit incidence in the original
/// differential, pairs must be disjoint, and the reduction graph must be
/// acyclic; the pairs are then eliminated in a dependency-respecting
/// order.
pub fn morse_reduce(
    c: &GradedComplex,
    pairs: &[(Label, Label)],
) -> Result<MorseReduction, MorseError> {
    let mut idx_pairs = Vec::with_capacity(pairs.len());
    let mut used = BTreeSet::new();
    for (ul, ll) in pairs {
        let a = c
            .index_of(ul)
            .ok_or_else(|| MorseError::UnknownLabel(ul.clone()))?;
        let b = c
            .index_of(ll)
            .ok_or_else(|| MorseError::UnknownLabel(ll.clone()))?;
        for (lab, i) in [(ul, a), (ll, b)] {
            if !used.insert(i) {
                return Err(MorseError::OverlappingPairs(lab.clone()));
            }
        }
        let coeff = c.differential().get(b, a).unwrap();
        if !coeff.abs().is_one() {
            return Err(MorseError::NonUnitPivot {
                upper: ul.clone(),
                lower: ll.clone(),
            });
        }
        idx_pairs.push((a, b));
    }

    // reduction graph: edge P -> Q when the boundary of P's upper cell
    // meets Q's lower cell; eliminating sinks first keeps pivots intact
    let m = idx_pairs.len();
    let mut lower_of = std::collections::BTreeMap::new();
    for (q, &(_, b)) in idx_pairs.iter().enumerate() {
        lower_of.insert(b, q);
    }
    let mut out_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut in_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for (p, &(a, _)) in idx_pairs.iter().enumerate() {
        for (r, _) in c.differential().column(a) {
            if let Some(&q) = lower_of.get(r) {
                if q != p {
                    out_edges[p].insert(q);
                    in_edges[q].insert(p);
                }
            }
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut ready: BTreeSet<usize> = (0..m).filter(|&p| out_edges[p].is_empty()).collect();
    let mut out_count: Vec<usize> = out_edges.iter().map(|s| s.len()).collect();
    while let Some(&p) = ready.iter().next() {
        ready.remove(&p);
        order.push(p);
        for &q in &in_edges[p] {
            out_count[q] -= 1;
            if out_count[q] == 0 {
                ready.insert(q);
            }
        }
    }
    if order.len() != m {
        return Err(MorseError::CyclicMatching);
    }

    let mut st = Eliminator::new(c);
    for &p in &order {
        let (a, b) = idx_pairs[p];
        st.eliminate(a, b)?;
    }
    st.finish()
}

/// Reduces a complex by repeatedly cancelling unit pivots, scanning in
/// grading order with ties broken by basis label order. The result is
/// deterministic for a given complex.
pub fn morse_reduce_greedy(c: &GradedComplex) -> Result<MorseReduction, MorseError> {
    let n = c.dim();
    // label-rank ordering for deterministic scans
    let mut by_label: Vec<usize> = (0..n).collect();
    by_label.sort_by(|&x, &y| (c.lift(x), c.label(x)).cmp(&(c.lift(y), c.label(y))));
    let mut rank = vec![0usize; n];
    for (k, &i) in by_label.iter().enumerate() {
        rank[i] = k;
    }

    let mut st = Eliminator::new(c);
    let mut queue: BTreeSet<usize> = (0..n).map(|i| rank[i]).collect();
    let mut pending: VecDeque<usize> = VecDeque::new();
    while let Some(&rk) = queue.iter().next() {
        queue.remove(&rk);
        let j = by_label[rk];
        if !st.alive[j] {
            continue;
        }
        // smallest-rank unit entry of the current column
        let unit = st.cols[j]
            .iter()
            .filter(|(_, v)| v.abs().is_one())
            .min_by_key(|(r, _)| rank[*r])
            .map(|(r, _)| *r);
        let Some(b) = unit else {
            continue;
        };
        st.eliminate(j, b)?;
        pending.extend(st.touched.iter().copied());
        while let Some(t) = pending.pop_front() {
            if st.alive[t] {
                queue.insert(rank[t]);
            }
        }
    }
    st.finish()
}
