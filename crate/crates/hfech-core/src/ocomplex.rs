//! The explicit complex on handle labels (m, o) with the four-rule
//! differential, its norm filtration, and direct-limit homology.
//!
//! Gradings: a label (m, o) sits in grading |o|, so the differential has
//! degree -1. The filtration level of (m, o) is |m| + 2|o|.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{subgroup_structure, FinAbGroup, IntMatrix, SparseVec};
use crate::complex::{induced_between, ComplexHomology, GradedComplex};
use crate::label::Label;
pub use crate::label::{OLabel, OSym};

/// Test hook: single-term and single-sign mutations of the four-rule
/// differential. `Canonical` is the shipped rule; everything else exists
/// to prove the verification suite notices tampering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DStarVariant {
    Canonical,
    /// (m,+1) loses its (m+1,0) term.
    DropRisingTerm,
    /// (m,+1) maps to (m,0) - (m+1,0).
    FlipRisingSign,
    /// (m,-1) loses its (m-1,0) term.
    DropFallingTerm,
    /// (m,both) first term flips: +(m,1) instead of -(m,1).
    FlipBothSecond,
    /// (m,both) loses its (m+1,-1) term.
    DropBothThird,
    /// (m,both) last term flips: +(m-1,1) instead of -(m-1,1).
    FlipBothFourth,
}

impl DStarVariant {
    pub const MUTATIONS: [DStarVariant; 6] = [
        DStarVariant::DropRisingTerm,
        DStarVariant::FlipRisingSign,
        DStarVariant::DropFallingTerm,
        DStarVariant::FlipBothSecond,
        DStarVariant::DropBothThird,
        DStarVariant::FlipBothFourth,
    ];

    pub fn from_id(id: u32) -> Option<DStarVariant> {
        match id {
            0 => Some(DStarVariant::Canonical),
            1..=6 => Some(Self::MUTATIONS[(id - 1) as usize]),
            _ => None,
        }
    }
}

/// The differential on a single handle label, as (label, coefficient)
/// terms:
///   (m,0)    -> 0
///   (m,+1)   -> (m,0) + (m+1,0)
///   (m,-1)   -> (m,0) + (m-1,0)
///   (m,both) -> (m,-1) - (m,+1) + (m+1,-1) - (m-1,+1)
pub fn boundary_star(x: OLabel) -> Vec<(OLabel, i64)> {
    boundary_star_variant(x, DStarVariant::Canonical)
}

pub fn boundary_star_variant(x: OLabel, variant: DStarVariant) -> Vec<(OLabel, i64)> {
    use DStarVariant as V;
    let m = x.m;
    match x.o {
        OSym::Zero => vec![],
        OSym::Plus => match variant {
            V::DropRisingTerm => vec![(OLabel::new(m, OSym::Zero), 1)],
            V::FlipRisingSign => vec![
                (OLabel::new(m, OSym::Zero), 1),
                (OLabel::new(m + 1, OSym::Zero), -1),
            ],
            _ => vec![
                (OLabel::new(m, OSym::Zero), 1),
                (OLabel::new(m + 1, OSym::Zero), 1),
            ],
        },
        OSym::Minus => match variant {
            V::DropFallingTerm => vec![(OLabel::new(m, OSym::Zero), 1)],
            _ => vec![
                (OLabel::new(m, OSym::Zero), 1),
                (OLabel::new(m - 1, OSym::Zero), 1),
            ],
        },
        OSym::Both => {
            let mut terms = vec![
                (OLabel::new(m, OSym::Minus), 1),
                (OLabel::new(m, OSym::Plus), -1),
                (OLabel::new(m + 1, OSym::Minus), 1),
                (OLabel::new(m - 1, OSym::Plus), -1),
            ];
            match variant {
                V::FlipBothSecond => terms[1].1 = 1,
                V::DropBothThird => {
                    terms.remove(2);
                }
                V::FlipBothFourth => terms[3].1 = 1,
                _ => {}
            }
            terms
        }
    }
}

/// Number of labels with |m| + 2|o| < l, in closed form.
pub fn window_basis_count(l: u32) -> usize {
    let l = l as i64;
    let zeros = (2 * l - 1).max(0);
    let singles = 2 * (2 * (l - 2) - 1).max(0);
    let both = (2 * (l - 4) - 1).max(0);
    (zeros + singles + both) as usize
}

fn complex_from_labels(labels: Vec<OLabel>, variant: DStarVariant) -> GradedComplex {
    let index: BTreeMap<OLabel, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = labels.len();
    let mut diff = IntMatrix::zero(n, n);
    for (j, &l) in labels.iter().enumerate() {
        let mut col: SparseVec = Vec::new();
        for (target, coeff) in boundary_star_variant(l, variant) {
            let r = *index.get(&target).unwrap_or_else(|| {
                panic!("window is not closed under the differential: {l} -> {target}")
            });
            col.push((r, BigInt::from(coeff)));
        }
        col.sort_by_key(|e| e.0);
        diff.set_column(j, col);
    }
    let grading: Vec<i64> = labels.iter().map(|l| l.o.weight()).collect();
    let label_enum: Vec<Label> = labels.into_iter().map(Label::Handle).collect();
    GradedComplex::new(label_enum, grading, 0, diff).expect("window construction is well formed")
}

/// The filtration window on all labels with |m| + 2|o| < l, as a graded
/// complex. The differential maps the window into itself.
pub fn window(l: u32) -> GradedComplex {
    window_with(l, DStarVariant::Canonical)
}

pub fn window_with(l: u32, variant: DStarVariant) -> GradedComplex {
    let li = l as i64;
    let mut labels = Vec::new();
    for o in OSym::ALL {
        let budget = li - 2 * o.weight();
        for m in -(budget - 1).max(0)..=(budget - 1).max(0) {
            if m.abs() + 2 * o.weight() < li {
                labels.push(OLabel::new(m, o));
            }
        }
    }
    labels.sort();
    complex_from_labels(labels, variant)
}

/// A differential-closed block window: labels with the m coordinate in
/// [lo, hi] for o = 0, trimmed at the appropriate end for the other
/// occupancy states so the differential stays inside. Its homology is
/// exactly Z + Z in gradings 0 and 1, which makes it the window of choice
/// for the two-class collapse.
pub fn block_window(lo: i64, hi: i64) -> GradedComplex {
    block_window_with(lo, hi, DStarVariant::Canonical)
}

pub fn block_window_with(lo: i64, hi: i64, variant: DStarVariant) -> GradedComplex {
    assert!(lo < 0 && hi > 0, "block window must contain m = 0 strictly");
    let mut labels = Vec::new();
    for m in lo..=hi {
        labels.push(OLabel::new(m, OSym::Zero));
    }
    for m in lo..=hi - 1 {
        labels.push(OLabel::new(m, OSym::Plus));
    }
    for m in lo + 1..=hi {
        labels.push(OLabel::new(m, OSym::Minus));
    }
    for m in lo + 1..=hi - 1 {
        labels.push(OLabel::new(m, OSym::Both));
    }
    labels.sort();
    complex_from_labels(labels, variant)
}

/// The fold matching on a block window: every label except (0,0) and
/// (lo,+1) is cancelled. Pairs are (upper, lower).
pub fn block_matching(lo: i64, hi: i64) -> Vec<(Label, Label)> {
    let mut pairs = Vec::new();
    let h = |m: i64, o: OSym| Label::Handle(OLabel::new(m, o));
    for m in 1..=hi {
        pairs.push((h(m - 1, OSym::Plus), h(m, OSym::Zero)));
    }
    for m in lo..=-1 {
        pairs.push((h(m + 1, OSym::Minus), h(m, OSym::Zero)));
    }
    for m in 0..=hi - 1 {
        pairs.push((h(m, OSym::Both), h(m + 1, OSym::Minus)));
    }
    for m in lo + 1..=-1 {
        pairs.push((h(m, OSym::Both), h(m, OSym::Plus)));
    }
    pairs
}

/// The critical labels left by `block_matching`.
pub fn block_critical(lo: i64) -> [Label; 2] {
    [
        Label::Handle(OLabel::new(0, OSym::Zero)),
        Label::Handle(OLabel::new(lo, OSym::Plus)),
    ]
}

/// The two-class graded group Z + Z with summands in gradings 0 and 1,
/// realized as a complex with zero differential on the critical labels
/// of the block matching.
pub fn vhat(lo: i64) -> GradedComplex {
    let labels = block_critical(lo).to_vec();
    GradedComplex::new(labels, vec![0, 1], 0, IntMatrix::zero(2, 2)).unwrap()
}

/// Direct-limit homology of the window tower.
#[derive(Debug, Clone)]
pub struct LimitHomology {
    /// The stabilized group per grading (gradings 0, 1, 2 reported).
    pub groups: BTreeMap<i64, FinAbGroup>,
    /// Cycle representatives in the top window, per grading.
    pub generators: BTreeMap<i64, Vec<SparseVec>>,
    /// The smallest window level from which the image tower is constant.
    pub stabilized_at: u32,
    /// The top window the representatives live in.
    pub top: GradedComplex,
    /// Homology of the top window (for class comparisons).
    pub top_homology: ComplexHomology,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("image tower still moving at window budget {l_max}: {detail}")]
pub struct NotStabilized {
    pub l_max: u32,
    pub detail: String,
}

/// Homology of the direct limit of the window tower: images of each
/// window's homology in later windows stabilize, and the limit is the
/// stable image. Requires the tower to be constant for three consecutive
/// steps before the budget runs out.
pub fn limit_homology(l_max: u32) -> Result<LimitHomology, NotStabilized> {
    limit_homology_with(l_max, DStarVariant::Canonical)
}

pub fn limit_homology_with(
    l_max: u32,
    variant: DStarVariant,
) -> Result<LimitHomology, NotStabilized> {
    assert!(l_max >= 4, "need a window budget of at least 4");
    let windows: Vec<GradedComplex> = (1..=l_max).map(|l| window_with(l, variant)).collect();
    let homologies: Vec<ComplexHomology> = windows
        .iter()
        .map(ComplexHomology::compute)
        .collect::<Result<_, _>>()
        .map_err(|e| NotStabilized {
            l_max,
            detail: format!("homology computation failed: {e}"),
        })?;
    let top = windows.last().unwrap();
    let top_h = homologies.last().unwrap();

    // inclusion of window l into the top window, as a chain-level matrix
    let include_into_top = |c: &GradedComplex| -> IntMatrix {
        let mut m = IntMatrix::zero(top.dim(), c.dim());
        for j in 0..c.dim() {
            let g = top.index_of(c.label(j)).expect("windows are nested");
            m.set(g, j, BigInt::one()).unwrap();
        }
        m
    };

    let gradings = [0i64, 1, 2];
    let mut groups = BTreeMap::new();
    let mut generators = BTreeMap::new();
    let mut stabilized_at = 1u32;

    for &d in &gradings {
        // image of H_d(window l) inside H_d(top), per l
        let mut images: Vec<IntMatrix> = Vec::new();
        for (idx, w) in windows.iter().enumerate() {
            let inc = include_into_top(w);
            let m = induced_between(&inc, 0, d, &homologies[idx], top_h)
                .expect("window inclusions are chain maps");
            images.push(m.matrix);
        }
        let structures: Vec<FinAbGroup> = images
            .iter()
            .map(|im| subgroup_structure(im, top_h.group(d)))
            .collect();
        // stable when the image subgroup is literally the same lattice for
        // three consecutive window levels, holding through the next-to-top
        // window (the top window's self-image is the whole group and is
        // only the receptacle of the comparison)
        let lattice: Vec<IntMatrix> = images
            .iter()
            .take(windows.len() - 1)
            .map(|im| {
                let mut cols = im.columns().to_vec();
                cols.extend(top_h.group(d).relation_columns().columns().iter().cloned());
                crate::algebra::hermite_normal_form(&IntMatrix::from_columns(im.rows(), cols))
            })
            .collect();
        let n = lattice.len();
        let mut stable_from = None;
        for i in 0..n.saturating_sub(2) {
            if lattice[i..].windows(2).all(|w| w[0] == w[1]) {
                stable_from = Some(i);
                break;
            }
        }
        let Some(stable_from) = stable_from else {
            return Err(NotStabilized {
                l_max,
                detail: format!(
                    "grading {d}: image chain ranks {:?}",
                    structures.iter().map(|g| g.free_rank).collect::<Vec<_>>()
                ),
            });
        };
        stabilized_at = stabilized_at.max(stable_from as u32 + 1);
        groups.insert(d, structures[stable_from].clone());

        // one representative chain per generator of the stable image:
        // canonical lattice columns, realized through the top window's
        // recorded generator chains
        let hnf_im = crate::algebra::hermite_normal_form(&images[stable_from]);
        let top_gens = top_h.generators_global(d);
        let mut reps = Vec::new();
        for j in 0..hnf_im.cols() {
            let mut chain: SparseVec = Vec::new();
            for (i, coeff) in hnf_im.column(j) {
                chain = crate::algebra::axpy(&chain, &top_gens[*i], coeff);
            }
            if !chain.is_empty() {
                reps.push(chain);
            }
        }
        // prefer the short canonical chains when they represent the same
        // class (a boundary shift only changes the representative)
        if reps.len() == 1 {
            let candidates: Vec<Vec<(OLabel, i64)>> = match d {
                0 => vec![vec![(OLabel::new(0, OSym::Zero), 1)]],
                1 => vec![vec![
                    (OLabel::new(0, OSym::Plus), 1),
                    (OLabel::new(1, OSym::Minus), -1),
                ]],
                _ => vec![],
            };
            for cand in candidates {
                let chain: Vec<(Label, i64)> = cand
                    .into_iter()
                    .map(|(l, c)| (Label::Handle(l), c))
                    .collect();
                let Ok(cv) = top.chain(&chain) else { continue };
                let (Ok(a), Ok(b)) = (top_h.class_of(d, &cv), top_h.class_of(d, &reps[0])) else {
                    continue;
                };
                let neg: Vec<BigInt> = b.free.iter().map(|v| -v).collect();
                if a.free == b.free || a.free == neg {
                    reps[0] = cv;
                    break;
                }
            }
        }
        generators.insert(d, reps);
    }

    Ok(LimitHomology {
        groups,
        generators,
        stabilized_at,
        top: top.clone(),
        top_homology: top_h.clone(),
    })
}
