use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, SparseVec};
use super::snf::{hermite_normal_form, kernel_basis, peel_solve, smith_normal_form};
use super::AlgebraError;

/// A finitely generated abelian group: free rank plus a torsion divisor
/// chain, with generator chains in the ambient basis when tracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAbGroup {
    pub free_rank: usize,
    /// Each entry is >= 2 and divides the next.
    pub torsion: Vec<BigInt>,
    /// Free-part generator chains in the ambient basis (empty if untracked).
    pub generators: Vec<SparseVec>,
}

impl FinAbGroup {
    pub fn zero() -> Self {
        FinAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
            generators: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
            generators: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Abstract isomorphism test: equal rank and torsion chain.
    pub fn same_iso_class(&self, other: &FinAbGroup) -> bool {
        self.free_rank == other.free_rank && self.torsion == other.torsion
    }

    /// Number of recorded presentation coordinates (free then torsion).
    pub fn coord_dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// The relation lattice of the presentation: columns t_i * e_{free+i}.
    pub fn relation_columns(&self) -> IntMatrix {
        let n = self.coord_dim();
        let cols: Vec<SparseVec> = self
            .torsion
            .iter()
            .enumerate()
            .map(|(i, t)| vec![(self.free_rank + i, t.clone())])
            .collect();
        IntMatrix::from_columns(n, cols)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Coordinates of a homology class: exact free coordinates followed by
/// torsion coordinates reduced into [0, t_i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVector {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl ClassVector {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> Vec<BigInt> {
        let mut v = self.free.clone();
        v.extend(self.torsion.iter().cloned());
        v
    }
}

/// Homology of a composable pair `d_out . d_in = 0`, with the machinery
/// to express arbitrary cycles in the computed generator basis.
#[derive(Debug, Clone)]
pub struct HomologyData {
    pub group: FinAbGroup,
    /// Torsion generator chains (ambient basis), aligned with `group.torsion`.
    pub torsion_generators: Vec<SparseVec>,
    kernel: IntMatrix,
    class_transform: IntMatrix, // L of the presentation SNF, k x k
    factors: Vec<BigInt>,       // invariant factors padded to k
    free_idx: Vec<usize>,
    tors_idx: Vec<usize>,
}

impl HomologyData {
    /// Ambient dimension of the middle term.
    pub fn ambient_dim(&self) -> usize {
        self.kernel.rows()
    }

    pub fn cycle_rank(&self) -> usize {
        self.kernel.cols()
    }

    /// Class coordinates of a cycle; errors if `z` is not a cycle.
    pub fn class_of(&self, z: &SparseVec) -> Result<ClassVector, AlgebraError> {
        let x = peel_solve(&self.kernel, z)?;
        let y = self.class_transform.apply(&x)?;
        let get = |i: usize| -> BigInt {
            y.binary_search_by_key(&i, |e| e.0)
                .map(|pos| y[pos].1.clone())
                .unwrap_or_else(|_| BigInt::zero())
        };
        let free = self.free_idx.iter().map(|&i| get(i)).collect();
        let torsion = self
            .tors_idx
            .iter()
            .map(|&i| {
                let t = &self.factors[i];
                ((get(i) % t) + t) % t
            })
            .collect();
        Ok(ClassVector { free, torsion })
    }

    /// All recorded generators, free part first.
    pub fn generator_chains(&self) -> Vec<SparseVec> {
        let mut v = self.group.generators.clone();
        v.extend(self.torsion_generators.iter().cloned());
        v
    }
}

/// Kernel mod image of a composable pair, as a group with tracked
/// generators. `d_in` maps into the middle term, `d_out` out of it.
pub fn homology_pair(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<HomologyData, AlgebraError> {
    if d_in.rows() != d_out.cols() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "d_in is {}x{}, d_out is {}x{}",
            d_in.rows(),
            d_in.cols(),
            d_out.rows(),
            d_out.cols()
        )));
    }
    for j in 0..d_in.cols() {
        if !d_out.apply(d_in.column(j))?.is_empty() {
            return Err(AlgebraError::CompositionNonzero { witness: j });
        }
    }

    let kernel = kernel_basis(d_out);
    let k = kernel.cols();

    // image basis of d_in, expressed in kernel coordinates
    let (reduced, _) = super::snf::column_echelon(d_in);
    let image_cols: Vec<&SparseVec> = reduced.iter().filter(|c| !c.is_empty()).collect();
    let mut x_cols = Vec::with_capacity(image_cols.len());
    for b in image_cols {
        // cannot fail: the image lies in the kernel and the kernel basis
        // spans a saturated lattice
        x_cols.push(peel_solve(&kernel, b)?);
    }
    let x = IntMatrix::from_columns(k, x_cols);

    let snf = smith_normal_form(&x);
    let mut factors = snf.d.clone();
    factors.resize(k, BigInt::zero());

    let mut free_idx = Vec::new();
    let mut tors_idx = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        if f.is_zero() {
            free_idx.push(i);
        } else if !f.is_one() {
            tors_idx.push(i);
        }
    }

    let generator = |i: usize| -> SparseVec { kernel.apply(snf.left_inv.column(i)).unwrap() };
    let generators: Vec<SparseVec> = free_idx.iter().map(|&i| generator(i)).collect();
    let torsion_generators: Vec<SparseVec> = tors_idx.iter().map(|&i| generator(i)).collect();
    let torsion: Vec<BigInt> = tors_idx.iter().map(|&i| factors[i].clone()).collect();

    Ok(HomologyData {
        group: FinAbGroup {
            free_rank: free_idx.len(),
            torsion,
            generators,
        },
        torsion_generators,
        kernel,
        class_transform: snf.left,
        factors,
        free_idx,
        tors_idx,
    })
}

/// Field Betti number of a composable pair: dim ker - rank im over Q
/// (characteristic 0) or over F_p.
pub fn field_homology_pair(
    d_in: &IntMatrix,
    d_out: &IntMatrix,
    characteristic: u64,
) -> Result<usize, AlgebraError> {
    if d_in.rows() != d_out.cols() {
        return Err(AlgebraError::DimensionMismatch(
            "field_homology_pair shapes".into(),
        ));
    }
    for j in 0..d_in.cols() {
        if !d_out.apply(d_in.column(j))?.is_empty() {
            return Err(AlgebraError::CompositionNonzero { witness: j });
        }
    }
    let n = d_in.rows();
    let (r_out, r_in) = if characteristic == 0 {
        (d_out.rank(), d_in.rank())
    } else {
        (
            d_out.rank_mod(characteristic),
            d_in.rank_mod(characteristic),
        )
    };
    Ok(n - r_out - r_in)
}

/// A homomorphism between two computed homology groups, in the recorded
/// generator bases (free coordinates first, then torsion coordinates).
#[derive(Debug, Clone)]
pub struct InducedMap {
    /// (target free + torsion) x (source free + torsion)
    pub matrix: IntMatrix,
    pub source: FinAbGroup,
    pub target: FinAbGroup,
}

impl InducedMap {
    pub fn free_block(&self) -> IntMatrix {
        let rows: Vec<usize> = (0..self.target.free_rank).collect();
        let cols: Vec<usize> = (0..self.source.free_rank).collect();
        self.matrix.submatrix(&rows, &cols)
    }

    fn torsion_block(&self) -> IntMatrix {
        let rows: Vec<usize> = (self.target.free_rank..self.target.coord_dim()).collect();
        let cols: Vec<usize> = (self.source.free_rank..self.source.coord_dim()).collect();
        self.matrix.submatrix(&rows, &cols)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Whether this specific map is an isomorphism: unimodular on the free
    /// parts and bijective on the torsion subgroups.
    pub fn is_isomorphism(&self) -> bool {
        if self.source.free_rank != self.target.free_rank
            || self.source.torsion != self.target.torsion
        {
            return false;
        }
        let fb = self.free_block();
        let s = smith_normal_form(&fb);
        if s.d.iter().any(|v| !v.is_one()) {
            return false;
        }
        if self.source.torsion.is_empty() {
            return true;
        }
        // surjective on the finite part == bijective there
        let tb = self.torsion_block();
        let rel = self.target.relation_columns();
        let rel_t: Vec<SparseVec> = (0..rel.cols())
            .map(|j| {
                rel.column(j)
                    .iter()
                    .map(|(r, v)| (r - self.target.free_rank, v.clone()))
                    .collect()
            })
            .collect();
        let mut cols = tb.columns().to_vec();
        cols.extend(rel_t);
        let aug = IntMatrix::from_columns(self.target.torsion.len(), cols);
        let s = smith_normal_form(&aug);
        s.rank() == self.target.torsion.len() && s.d.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn compose(&self, inner: &InducedMap) -> Result<InducedMap, AlgebraError> {
        Ok(InducedMap {
            matrix: self.matrix.mul(&inner.matrix)?,
            source: inner.source.clone(),
            target: self.target.clone(),
        })
    }

    /// Equality as maps (entries compared modulo the target torsion).
    pub fn same_map(&self, other: &InducedMap) -> bool {
        if self.source.coord_dim() != other.source.coord_dim()
            || !self.target.same_iso_class(&other.target)
        {
            return false;
        }
        let diff = match self.matrix.sub(&other.matrix) {
            Ok(d) => d,
            Err(_) => return false,
        };
        for j in 0..diff.cols() {
            for (r, v) in diff.column(j) {
                if *r < self.target.free_rank {
                    return false;
                }
                let t = &self.target.torsion[*r - self.target.free_rank];
                if !(v % t).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// The map induced on homology by a chain-level map `f` between the
/// middle terms of two composable pairs. Fails with `NotChainMap` if `f`
/// does not send cycles to cycles and boundaries to boundaries at this
/// grading.
pub fn induced_map(
    f: &IntMatrix,
    source: &HomologyData,
    target: &HomologyData,
    source_d_in: &IntMatrix,
) -> Result<InducedMap, AlgebraError> {
    if f.cols() != source.ambient_dim() || f.rows() != target.ambient_dim() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "induced_map: f is {}x{}, source dim {}, target dim {}",
            f.rows(),
            f.cols(),
            source.ambient_dim(),
            target.ambient_dim()
        )));
    }
    // boundaries must map to boundaries
    for j in 0..source_d_in.cols() {
        let img = f.apply(source_d_in.column(j))?;
        let class = target
            .class_of(&img)
            .map_err(|_| AlgebraError::NotChainMap { witness: j })?;
        if !class.is_zero() {
            return Err(AlgebraError::NotChainMap { witness: j });
        }
    }

    let src_gens = source.generator_chains();
    let n_free = source.group.free_rank;
    let mut cols = Vec::with_capacity(src_gens.len());
    for (j, g) in src_gens.iter().enumerate() {
        let img = f.apply(g)?;
        let class = target
            .class_of(&img)
            .map_err(|_| AlgebraError::NotChainMap { witness: j })?;
        if j >= n_free && class.free.iter().any(|v| !v.is_zero()) {
            // a torsion class cannot have a free image
            return Err(AlgebraError::NotChainMap { witness: j });
        }
        let mut col: SparseVec = Vec::new();
        for (i, v) in class.coords().into_iter().enumerate() {
            if !v.is_zero() {
                col.push((i, v));
            }
        }
        cols.push(col);
    }
    Ok(InducedMap {
        matrix: IntMatrix::from_columns(target.group.coord_dim(), cols),
        source: source.group.clone(),
        target: target.group.clone(),
    })
}

/// Structure of the subgroup generated by the given class-coordinate
/// columns inside a group with the given presentation.
pub fn subgroup_structure(gens: &IntMatrix, ambient: &FinAbGroup) -> FinAbGroup {
    let n = ambient.coord_dim();
    assert_eq!(gens.rows(), n, "subgroup generators in wrong coordinates");
    let m = gens.cols();
    if m == 0 {
        return FinAbGroup::zero();
    }
    // relation lattice among the generators: x with gens*x in relations
    let rel = ambient.relation_columns();
    let mut cols = gens.columns().to_vec();
    cols.extend(rel.columns().iter().cloned());
    let aug = IntMatrix::from_columns(n, cols);
    let ker = kernel_basis(&aug);
    let first_block: Vec<SparseVec> = (0..ker.cols())
        .map(|j| {
            ker.column(j)
                .iter()
                .filter(|(r, _)| *r < m)
                .map(|(r, v)| (*r, v.clone()))
                .collect()
        })
        .collect();
    let relmat = IntMatrix::from_columns(m, first_block);
    let snf = smith_normal_form(&relmat);
    let mut factors = snf.d.clone();
    factors.resize(m, BigInt::zero());
    let mut free_rank = 0;
    let mut torsion = Vec::new();
    for f in &factors {
        if f.is_zero() {
            free_rank += 1;
        } else if !f.is_one() {
            torsion.push(f.abs());
        }
    }
    torsion.sort();
    FinAbGroup {
        free_rank,
        torsion,
        generators: Vec::new(),
    }
}

/// Exactness at the middle group of `incoming` then `outgoing`:
/// image(incoming) equals kernel(outgoing) as subgroups.
pub fn exact_at(incoming: &InducedMap, outgoing: &InducedMap) -> Result<bool, AlgebraError> {
    let mid = &incoming.target;
    debug_assert!(mid.same_iso_class(&outgoing.source));
    let n = mid.coord_dim();
    let rel_mid = mid.relation_columns();

    // image lattice (in presentation coordinates, relations included)
    let mut im_cols = incoming.matrix.columns().to_vec();
    im_cols.extend(rel_mid.columns().iter().cloned());
    let im = IntMatrix::from_columns(n, im_cols);

    // kernel lattice: x with outgoing * x in the relation lattice of next
    let next = &outgoing.target;
    let rel_next = next.relation_columns();
    let mut aug_cols = outgoing.matrix.columns().to_vec();
    for j in 0..rel_next.cols() {
        aug_cols.push(rel_next.column(j).iter().map(|(r, v)| (*r, -v)).collect());
    }
    let aug = IntMatrix::from_columns(next.coord_dim(), aug_cols);
    let ker = kernel_basis(&aug);
    let mut ker_cols: Vec<SparseVec> = (0..ker.cols())
        .map(|j| {
            ker.column(j)
                .iter()
                .filter(|(r, _)| *r < n)
                .map(|(r, v)| (*r, v.clone()))
                .collect()
        })
        .collect();
    ker_cols.extend(rel_mid.columns().iter().cloned());
    let ker_lat = IntMatrix::from_columns(n, ker_cols);

    Ok(hermite_normal_form(&im) == hermite_normal_form(&ker_lat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::big;

    #[test]
    fn zero_differentials_give_free_group() {
        let d_in = IntMatrix::zero(2, 0);
        let d_out = IntMatrix::zero(0, 2);
        let h = homology_pair(&d_in, &d_out).unwrap();
        assert_eq!(h.group.free_rank, 2);
        assert!(h.group.torsion.is_empty());
    }

    #[test]
    fn multiplication_by_two_gives_z2() {
        let d_in = IntMatrix::from_dense(&[vec![2]]);
        let d_out = IntMatrix::zero(0, 1);
        let h = homology_pair(&d_in, &d_out).unwrap();
        assert_eq!(h.group.free_rank, 0);
        assert_eq!(h.group.torsion, vec![big(2)]);
        assert_eq!(h.torsion_generators.len(), 1);
        // the generator is a cycle with class e_1 of order 2
        let c = h.class_of(&h.torsion_generators[0]).unwrap();
        assert_eq!(c.torsion, vec![big(1)]);
        let doubled: SparseVec = h.torsion_generators[0]
            .iter()
            .map(|(r, v)| (*r, v * 2))
            .collect();
        assert!(h.class_of(&doubled).unwrap().is_zero());
    }

    #[test]
    fn two_dimensional_cancellation() {
        // e1 -> f1+f2, f1 -> g, f2 -> -g: homology vanishes in the middle
        let d_in = IntMatrix::from_dense(&[vec![1], vec![1]]);
        let d_out = IntMatrix::from_dense(&[vec![1, -1]]);
        let h = homology_pair(&d_in, &d_out).unwrap();
        assert!(h.group.is_zero());
    }

    #[test]
    fn composition_nonzero_is_reported() {
        let d_in = IntMatrix::from_dense(&[vec![1], vec![0]]);
        let d_out = IntMatrix::from_dense(&[vec![1, 0]]);
        match homology_pair(&d_in, &d_out) {
            Err(AlgebraError::CompositionNonzero { witness }) => assert_eq!(witness, 0),
            other => panic!("expected CompositionNonzero, got {other:?}"),
        }
    }

    #[test]
    fn field_ranks() {
        let d_in = IntMatrix::from_dense(&[vec![2]]);
        let d_out = IntMatrix::zero(0, 1);
        assert_eq!(field_homology_pair(&d_in, &d_out, 2).unwrap(), 1);
        assert_eq!(field_homology_pair(&d_in, &d_out, 0).unwrap(), 0);
        assert_eq!(field_homology_pair(&d_in, &d_out, 3).unwrap(), 0);
    }

    #[test]
    fn identity_induces_identity() {
        let d_in = IntMatrix::from_dense(&[vec![2, 0], vec![0, 0], vec![0, 0]]);
        let d_out = IntMatrix::zero(0, 3);
        let h = homology_pair(&d_in, &d_out).unwrap();
        let f = IntMatrix::identity(3);
        let m = induced_map(&f, &h, &h, &d_in).unwrap();
        assert!(m.is_isomorphism());
        let zero = IntMatrix::zero(3, 3);
        let z = induced_map(&zero, &h, &h, &d_in).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn not_chain_map_detected() {
        // source has a boundary 2*e1; a map sending e1 to a fresh free class
        // does not kill it
        let d_in = IntMatrix::from_dense(&[vec![2], vec![0]]);
        let d_out = IntMatrix::zero(0, 2);
        let src = homology_pair(&d_in, &d_out).unwrap();
        let tgt = homology_pair(&IntMatrix::zero(2, 0), &IntMatrix::zero(0, 2)).unwrap();
        let f = IntMatrix::identity(2);
        match induced_map(&f, &src, &tgt, &d_in) {
            Err(AlgebraError::NotChainMap { .. }) => {}
            other => panic!("expected NotChainMap, got {other:?}"),
        }
    }
}
