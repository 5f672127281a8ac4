use std::fmt;

use super::graded::Ses;
use super::homology::{induced_between, ComplexHomology};
use crate::algebra::{exact_at, AlgebraError, FinAbGroup, InducedMap, IntMatrix, SparseVec};

/// Which complex of the short exact sequence a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Sub,
    Total,
    Quotient,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Sub => write!(f, "sub"),
            Slot::Total => write!(f, "total"),
            Slot::Quotient => write!(f, "quot"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LesNode {
    pub grading: i64,
    pub slot: Slot,
    pub group: FinAbGroup,
}

/// A long exact sequence row: nodes in arrow order (descending grading,
/// sub -> total -> quotient -> sub one lower), and the maps between
/// consecutive nodes including the connecting homomorphism. Cyclic when
/// the grading is mod p.
#[derive(Debug, Clone)]
pub struct LesRow {
    pub nodes: Vec<LesNode>,
    pub maps: Vec<InducedMap>,
    pub cyclic: bool,
}

#[derive(Debug, Clone)]
pub struct ExactnessFailure {
    pub node: usize,
    pub grading: i64,
    pub slot: Slot,
}

impl fmt::Display for ExactnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exactness fails at node {} ({} at grading {})",
            self.node, self.slot, self.grading
        )
    }
}

impl LesRow {
    /// Verifies image = kernel at every node that has both neighbours.
    pub fn verify_exactness(&self) -> Result<(), ExactnessFailure> {
        let n = self.nodes.len();
        if n == 0 {
            return Ok(());
        }
        let fail = |k: usize| ExactnessFailure {
            node: k,
            grading: self.nodes[k].grading,
            slot: self.nodes[k].slot,
        };
        let upto = if self.cyclic { n } else { n - 1 };
        for k in 0..upto {
            if !self.cyclic && k == 0 {
                continue;
            }
            let incoming = if k == 0 {
                &self.maps[self.maps.len() - 1]
            } else {
                &self.maps[k - 1]
            };
            let outgoing = &self.maps[k];
            match exact_at(incoming, outgoing) {
                Ok(true) => {}
                Ok(false) => return Err(fail(k)),
                Err(_) => return Err(fail(k)),
            }
        }
        Ok(())
    }

    pub fn node_group(&self, grading: i64, slot: Slot) -> Option<&FinAbGroup> {
        self.nodes
            .iter()
            .find(|n| n.grading == grading && n.slot == slot)
            .map(|n| &n.group)
    }
}

/// Precomputed homology of the three complexes of a short exact
/// sequence, for callers that also need the groups themselves.
pub struct SesHomology {
    pub sub: ComplexHomology,
    pub total: ComplexHomology,
    pub quotient: ComplexHomology,
}

pub fn ses_homology(s: &Ses, keys: Option<&[i64]>) -> Result<SesHomology, AlgebraError> {
    let compute = |c: &super::GradedComplex| match keys {
        Some(k) => ComplexHomology::compute_at(c, k),
        None => ComplexHomology::compute(c),
    };
    Ok(SesHomology {
        sub: compute(&s.sub)?,
        total: compute(&s.total)?,
        quotient: compute(&s.quotient)?,
    })
}

/// The connecting homomorphism H_d(quotient) -> H_{d-1}(sub): lift a
/// quotient cycle along the label identification, apply the total
/// differential, and read the result in the subcomplex.
pub fn connecting_map(s: &Ses, h: &SesHomology, d: i64) -> Result<InducedMap, AlgebraError> {
    let src = h.quotient.slice(d);
    let down = s.sub.grading_key_of_lift(d - 1);
    let tgt = h.sub.slice(down);
    let gens = h.quotient.generators_global(d);
    let mut cols: Vec<SparseVec> = Vec::with_capacity(gens.len());
    for g in &gens {
        let lifted = s.lift_quotient(g);
        let bdry = s.total.differential().apply(&lifted)?;
        let in_sub = s.restrict_to_sub(&bdry).ok_or_else(|| {
            AlgebraError::DimensionMismatch(
                "boundary of a quotient cycle left the subcomplex".into(),
            )
        })?;
        let class = h.sub.class_of(down, &in_sub)?;
        let mut col: SparseVec = Vec::new();
        for (i, v) in class.coords().into_iter().enumerate() {
            if !num_traits::Zero::is_zero(&v) {
                col.push((i, v));
            }
        }
        cols.push(col);
    }
    Ok(InducedMap {
        matrix: IntMatrix::from_columns(tgt.hom.group.coord_dim(), cols),
        source: src.hom.group.clone(),
        target: tgt.hom.group.clone(),
    })
}

/// The grading list a long exact sequence runs over: all residues when
/// the grading is mod p, otherwise the requested window (or the full
/// support extended by one), descending.
pub fn les_gradings(s: &Ses, window: Option<(i64, i64)>) -> Vec<i64> {
    if s.total.p() > 0 {
        (0..s.total.p() as i64).rev().collect()
    } else {
        let (lo, hi) = window.unwrap_or_else(|| {
            let keys = s.total.grading_keys();
            match (keys.first(), keys.last()) {
                (Some(&a), Some(&b)) => (a - 1, b + 1),
                _ => (0, 0),
            }
        });
        (lo..=hi).rev().collect()
    }
}

/// Builds the long exact sequence of a short exact sequence over a
/// grading window (all residues when the grading is mod p; the full
/// support extended by one when the window is omitted).
pub fn long_exact_sequence(s: &Ses, window: Option<(i64, i64)>) -> Result<LesRow, AlgebraError> {
    let gradings = les_gradings(s, window);
    let mut keys = gradings.clone();
    if s.total.p() == 0 {
        if let Some(&lo) = gradings.last() {
            keys.push(lo - 1); // the landing grading of the last connecting map
        }
    }
    let h = ses_homology(s, Some(&keys))?;
    long_exact_sequence_precomputed(s, &h, &gradings)
}

/// Builds the row from precomputed homology (which must cover every
/// grading in the list, plus one below it when the grading is over Z).
pub fn long_exact_sequence_precomputed(
    s: &Ses,
    h: &SesHomology,
    gradings: &[i64],
) -> Result<LesRow, AlgebraError> {
    let cyclic = s.total.p() > 0;
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for &d in gradings {
        nodes.push(LesNode {
            grading: d,
            slot: Slot::Sub,
            group: h.sub.group(d).clone(),
        });
        maps.push(induced_between(&s.inclusion, 0, d, &h.sub, &h.total)?);
        nodes.push(LesNode {
            grading: d,
            slot: Slot::Total,
            group: h.total.group(d).clone(),
        });
        maps.push(induced_between(&s.projection, 0, d, &h.total, &h.quotient)?);
        nodes.push(LesNode {
            grading: d,
            slot: Slot::Quotient,
            group: h.quotient.group(d).clone(),
        });
        maps.push(connecting_map(s, h, d)?);
    }
    if !cyclic {
        // close the row with the landing node of the last connecting map
        let below = gradings.last().copied().unwrap_or(0) - 1;
        nodes.push(LesNode {
            grading: below,
            slot: Slot::Sub,
            group: h.sub.group(below).clone(),
        });
    }
    Ok(LesRow {
        nodes,
        maps,
        cyclic,
    })
}
