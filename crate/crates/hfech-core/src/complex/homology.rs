use std::collections::BTreeMap;

use super::morse::morse_reduce_greedy;
use super::GradedComplex;
use crate::algebra::{
    homology_pair, AlgebraError, FinAbGroup, HomologyData, InducedMap, IntMatrix, SparseVec,
};

/// Above this many cells a complex is first reduced by greedy unit-pivot
/// cancellation; classes are transported through the recorded basis
/// change, which is a fixed isomorphism on homology.
const REDUCTION_THRESHOLD: usize = 400;

/// The homology machinery of one grading slice: the basis indices of the
/// middle term, the incoming differential block, and the computed group
/// with its class solver. Indices refer to the working complex (the
/// reduced one when a reduction was applied).
#[derive(Debug, Clone)]
pub struct Slice {
    pub mid: Vec<usize>,
    pub d_in: IntMatrix,
    pub hom: HomologyData,
}

impl Slice {
    fn empty() -> Self {
        Slice {
            mid: Vec::new(),
            d_in: IntMatrix::zero(0, 0),
            hom: homology_pair(&IntMatrix::zero(0, 0), &IntMatrix::zero(0, 0)).unwrap(),
        }
    }
}

/// Per-grading homology of a graded complex, with class coordinates and
/// generator chains expressed in the complex's original basis.
#[derive(Debug, Clone)]
pub struct ComplexHomology {
    /// The complex the slices index into (reduced or original).
    working: GradedComplex,
    slices: BTreeMap<i64, Slice>,
    empty: Slice,
    /// (project, include) between the original and working complexes.
    transport: Option<(IntMatrix, IntMatrix)>,
}

impl ComplexHomology {
    /// Computes homology at every grading key present in the basis.
    /// Fails with `CompositionNonzero` if the differential does not
    /// square to zero.
    pub fn compute(c: &GradedComplex) -> Result<Self, AlgebraError> {
        let keys = c.grading_keys();
        Self::compute_at(c, &keys)
    }

    /// Computes homology only at the given grading keys.
    pub fn compute_at(c: &GradedComplex, keys: &[i64]) -> Result<Self, AlgebraError> {
        let (working, transport) = if c.dim() > REDUCTION_THRESHOLD {
            // greedy cancellation cannot change homology, but it only
            // applies to a genuine complex; confirm squaring first so the
            // caller still sees CompositionNonzero on bad input
            for j in 0..c.dim() {
                if !c
                    .differential()
                    .apply(c.differential().column(j))?
                    .is_empty()
                {
                    return Err(AlgebraError::CompositionNonzero { witness: j });
                }
            }
            let red = morse_reduce_greedy(c)
                .map_err(|_| AlgebraError::ResourceExhausted("greedy reduction"))?;
            (red.reduced, Some((red.project, red.include)))
        } else {
            (c.clone(), None)
        };
        let mut slices = BTreeMap::new();
        for &d in keys {
            let mid = working.indices_at(d);
            let up = working.indices_at(working.key_shift(d, 1));
            let down = working.indices_at(working.key_shift(d, -1));
            let d_in = working.differential().submatrix(&mid, &up);
            let d_out = working.differential().submatrix(&down, &mid);
            let hom = homology_pair(&d_in, &d_out)?;
            slices.insert(d, Slice { mid, d_in, hom });
        }
        Ok(ComplexHomology {
            working,
            slices,
            empty: Slice::empty(),
            transport,
        })
    }

    pub fn gradings(&self) -> Vec<i64> {
        self.slices.keys().copied().collect()
    }

    pub fn slice(&self, d: i64) -> &Slice {
        self.slices.get(&d).unwrap_or(&self.empty)
    }

    pub fn group(&self, d: i64) -> &FinAbGroup {
        &self.slice(d).hom.group
    }

    fn to_working(&self, v: &SparseVec) -> Result<SparseVec, AlgebraError> {
        match &self.transport {
            Some((project, _)) => project.apply(v),
            None => Ok(v.clone()),
        }
    }

    /// Restricts a working-complex chain of pure grading `d` to slice
    /// coordinates.
    fn to_slice_coords(&self, d: i64, v: &SparseVec) -> Option<SparseVec> {
        let slice = self.slice(d);
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        for (s, &g) in slice.mid.iter().enumerate() {
            pos.insert(g, s);
        }
        let mut out: SparseVec = Vec::new();
        for (g, c) in v {
            out.push((*pos.get(g)?, c.clone()));
        }
        out.sort_by_key(|e| e.0);
        Some(out)
    }

    /// Class of a cycle (in original coordinates) of pure grading `d`.
    pub fn class_of(
        &self,
        d: i64,
        v: &SparseVec,
    ) -> Result<crate::algebra::ClassVector, AlgebraError> {
        let w = self.to_working(v)?;
        let local = self
            .to_slice_coords(d, &w)
            .ok_or_else(|| AlgebraError::DimensionMismatch("chain not of pure grading".into()))?;
        self.slice(d).hom.class_of(&local)
    }

    /// Generator chains (free part first) in original coordinates.
    pub fn generators_global(&self, d: i64) -> Vec<SparseVec> {
        let slice = self.slice(d);
        slice
            .hom
            .generator_chains()
            .into_iter()
            .map(|g| {
                let mut v: SparseVec = g.into_iter().map(|(r, c)| (slice.mid[r], c)).collect();
                v.sort_by_key(|e| e.0);
                match &self.transport {
                    Some((_, include)) => include.apply(&v).unwrap(),
                    None => v,
                }
            })
            .collect()
    }

    /// Conjugates a chain map on the original bases into the working
    /// bases on both sides.
    fn conjugate(
        f: &IntMatrix,
        source: &ComplexHomology,
        target: &ComplexHomology,
    ) -> Result<IntMatrix, AlgebraError> {
        let fed = match &source.transport {
            Some((_, include)) => f.mul(include)?,
            None => f.clone(),
        };
        match &target.transport {
            Some((project, _)) => project.mul(&fed),
            None => Ok(fed),
        }
    }
}

/// The map induced on homology at source grading `d` by a chain-level
/// map `f` (over the complexes' original bases) of degree `deg`.
pub fn induced_between(
    f: &IntMatrix,
    deg: i64,
    d: i64,
    source_h: &ComplexHomology,
    target_h: &ComplexHomology,
) -> Result<InducedMap, AlgebraError> {
    let f_eff = ComplexHomology::conjugate(f, source_h, target_h)?;
    let src_slice = source_h.slice(d);
    let tgt_key = target_h.working.grading_key_of_lift(d + deg);
    let tgt_slice = target_h.slice(tgt_key);
    let block = f_eff.submatrix(&tgt_slice.mid, &src_slice.mid);
    // entries of the map leaving the expected target grading would be
    // silently dropped by the submatrix; reject them instead
    let mut in_tgt = vec![false; f_eff.rows()];
    for &t in &tgt_slice.mid {
        in_tgt[t] = true;
    }
    for (jl, &jg) in src_slice.mid.iter().enumerate() {
        for (r, _) in f_eff.column(jg) {
            if !in_tgt[*r] {
                return Err(AlgebraError::NotChainMap { witness: jl });
            }
        }
    }
    crate::algebra::induced_map(&block, &src_slice.hom, &tgt_slice.hom, &src_slice.d_in)
}
