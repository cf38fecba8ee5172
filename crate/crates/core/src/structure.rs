//! Structural analysis of OPB instances.
//!
//! An instance is *reducible at party j* when its states split into two or
//! more groups whose party-j vectors lie in mutually orthogonal subspaces.
//! Operationally this is a graph problem: connect two states when their
//! party-j vectors are *not* orthogonal; the instance is j-reducible exactly
//! when that graph is disconnected, and the connected components are the
//! groups. Splitting recursively along reducible parties decomposes any
//! instance into irreducible blocks, each an OPB of the product subspace it
//! spans.
//!
//! A split certificate whose branches all terminate in singletons doubles as
//! a local discrimination protocol (project onto the orthogonal party-j
//! subspaces, recurse on the outcome), so recursive reducibility certifies
//! local distinguishability. The converse tool is the non-disturbing
//! measurement solver in [`crate::locc`]: when every party's non-disturbing
//! operators are scalar, no party can start an informative measurement round
//! and the instance is flagged locally indistinguishable. Everything else is
//! reported as unknown rather than guessed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{OpbInstance, ProductState, Provenance, Tolerances};
use crate::linalg;
use crate::locc::{self, TrivialityVerdict};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("permutation {0:?} is not a bijection on parties")]
    BadPermutation(Vec<usize>),
    #[error("unitary for party {party} has wrong shape (expected {expected}x{expected})")]
    DimensionMismatch { party: usize, expected: usize },
    #[error("matrix for party {0} is not unitary within tolerance")]
    NotUnitary(usize),
}

/// Reducibility of one party: the connected components of the
/// non-orthogonality graph on that party's vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducibilityReport {
    pub party: usize,
    pub reducible: bool,
    /// State-index groups, ordered by smallest member; a single group when
    /// irreducible.
    pub blocks: Vec<Vec<usize>>,
    /// Size of the first group when reducible.
    pub split_index: Option<usize>,
}

/// One irreducible block of a decomposition, restricted to the per-party
/// subspaces it spans.
#[derive(Clone, Debug)]
pub struct IrreducibleBlock {
    /// Indices into the source instance.
    pub indices: Vec<usize>,
    /// Block states with each party's vector rewritten in an orthonormal
    /// basis of the spanned subspace.
    pub states: Vec<ProductState>,
    /// Effective per-party dimensions f_1..f_n of the spanned subspaces.
    pub subdims: Vec<usize>,
}

impl IrreducibleBlock {
    /// View the restricted block as a standalone instance (an OPB of its
    /// spanned product subspace).
    pub fn to_instance(&self, source: &str) -> OpbInstance {
        OpbInstance {
            states: self.states.clone(),
            dims: self.subdims.clone(),
            provenance: Provenance {
                source: format!("{source}[block {:?}]", self.indices),
                seed: None,
                params: Default::default(),
            },
        }
    }
}

/// Party permutation plus per-party unitaries; preserves every verdict this
/// crate computes.
#[derive(Clone, Debug)]
pub struct EquivalenceTransform {
    /// Output party p takes input party `perm[p]`.
    pub perm: Vec<usize>,
    /// `unitaries[p]` acts on output party p (sized to its dimension).
    pub unitaries: Vec<DMatrix<C64>>,
}

impl EquivalenceTransform {
    pub fn identity(dims: &[usize]) -> Self {
        EquivalenceTransform {
            perm: (0..dims.len()).collect(),
            unitaries: dims.iter().map(|&d| linalg::identity(d)).collect(),
        }
    }

    /// Random party permutation and Haar unitaries for `dims`.
    pub fn random<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Self {
        let n = dims.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let unitaries = perm
            .iter()
            .map(|&src| linalg::random_unitary(dims[src], rng))
            .collect();
        EquivalenceTransform { perm, unitaries }
    }
}

/// Apply a permutation + product-unitary transform to an instance. State
/// order is preserved, so index-based verdicts compare directly.
pub fn apply_equivalence(
    inst: &OpbInstance,
    t: &EquivalenceTransform,
    tol: &Tolerances,
) -> Result<OpbInstance, StructureError> {
    let n = inst.parties();
    let mut seen = vec![false; n];
    if t.perm.len() != n || t.unitaries.len() != n {
        return Err(StructureError::BadPermutation(t.perm.clone()));
    }
    for &p in &t.perm {
        if p >= n || seen[p] {
            return Err(StructureError::BadPermutation(t.perm.clone()));
        }
        seen[p] = true;
    }
    let new_dims: Vec<usize> = t.perm.iter().map(|&src| inst.dims[src]).collect();
    for (p, u) in t.unitaries.iter().enumerate() {
        if u.nrows() != new_dims[p] || u.ncols() != new_dims[p] {
            return Err(StructureError::DimensionMismatch {
                party: p,
                expected: new_dims[p],
            });
        }
        if !linalg::is_unitary(u, tol.scalar) {
            return Err(StructureError::NotUnitary(p));
        }
    }
    let states = inst
        .states
        .iter()
        .map(|s| ProductState {
            parts: (0..n).map(|p| &t.unitaries[p] * &s.parts[t.perm[p]]).collect(),
        })
        .collect();
    Ok(OpbInstance {
        states,
        dims: new_dims,
        provenance: inst.provenance.clone(),
    })
}

/// Connected components of the party-`party` non-orthogonality graph over the
/// given subset of states. Components are listed by smallest member, each
/// sorted ascending.
fn party_components(
    states: &[ProductState],
    indices: &[usize],
    party: usize,
    tol: &Tolerances,
) -> Vec<Vec<usize>> {
    let n = indices.len();
    let mut assigned = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if assigned[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        assigned[start] = id;
        while let Some(i) = stack.pop() {
            members.push(indices[i]);
            for j in 0..n {
                if assigned[j] == usize::MAX {
                    let overlap = linalg::inner(
                        &states[indices[i]].parts[party],
                        &states[indices[j]].parts[party],
                    )
                    .norm();
                    if overlap >= tol.ortho {
                        assigned[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by_key(|c| c[0]);
    components
}

/// Reducibility of the full instance at one party.
pub fn reducibility(inst: &OpbInstance, party: usize, tol: &Tolerances) -> ReducibilityReport {
    let indices: Vec<usize> = (0..inst.states.len()).collect();
    let blocks = party_components(&inst.states, &indices, party, tol);
    let reducible = blocks.len() > 1;
    ReducibilityReport {
        party,
        reducible,
        split_index: reducible.then(|| blocks[0].len()),
        blocks,
    }
}

/// A recursive-reducibility certificate: a tree of party splits whose leaves
/// are single states. Doubles as the blueprint for a projective LOCC
/// discrimination protocol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SplitTree {
    Leaf {
        state: usize,
    },
    Split {
        party: usize,
        groups: Vec<SplitGroup>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitGroup {
    pub states: Vec<usize>,
    pub child: SplitTree,
}

impl SplitTree {
    pub fn depth(&self) -> usize {
        match self {
            SplitTree::Leaf { .. } => 0,
            SplitTree::Split { groups, .. } => {
                1 + groups.iter().map(|g| g.child.depth()).max().unwrap_or(0)
            }
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            SplitTree::Leaf { state } => vec![*state],
            SplitTree::Split { groups, .. } => {
                groups.iter().flat_map(|g| g.child.leaves()).collect()
            }
        }
    }
}

/// Build a full split tree over `indices`, recursing along the lowest
/// reducible party at every level. Returns `None` when some multi-state
/// block is irreducible at every party.
pub fn recursive_split(
    states: &[ProductState],
    indices: &[usize],
    tol: &Tolerances,
) -> Option<SplitTree> {
    if indices.len() == 1 {
        return Some(SplitTree::Leaf { state: indices[0] });
    }
    let parties = states[indices[0]].parts.len();
    for party in 0..parties {
        let components = party_components(states, indices, party, tol);
        if components.len() > 1 {
            let mut groups = Vec::with_capacity(components.len());
            for members in components {
                let child = recursive_split(states, &members, tol)?;
                groups.push(SplitGroup {
                    states: members,
                    child,
                });
            }
            return Some(SplitTree::Split { party, groups });
        }
    }
    None
}

fn restrict_block(states: &[ProductState], indices: &[usize], tol: &Tolerances) -> IrreducibleBlock {
    let parties = states[indices[0]].parts.len();
    let mut bases: Vec<Vec<DVector<C64>>> = Vec::with_capacity(parties);
    for party in 0..parties {
        let vecs: Vec<DVector<C64>> = indices
            .iter()
            .map(|&i| states[i].parts[party].clone())
            .collect();
        bases.push(linalg::orthonormal_span(&vecs, tol.ortho));
    }
    let restricted = indices
        .iter()
        .map(|&i| ProductState {
            parts: (0..parties)
                .map(|p| {
                    DVector::from_fn(bases[p].len(), |k, _| {
                        linalg::inner(&bases[p][k], &states[i].parts[p])
                    })
                })
                .collect(),
        })
        .collect();
    IrreducibleBlock {
        indices: indices.to_vec(),
        states: restricted,
        subdims: bases.iter().map(Vec::len).collect(),
    }
}

/// Decompose an instance into irreducible blocks by repeated splitting, each
/// block restricted to the product subspace it spans.
pub fn decompose(inst: &OpbInstance, tol: &Tolerances) -> Vec<IrreducibleBlock> {
    fn recurse(
        states: &[ProductState],
        indices: &[usize],
        tol: &Tolerances,
        out: &mut Vec<IrreducibleBlock>,
    ) {
        let parties = states[indices[0]].parts.len();
        if indices.len() > 1 {
            for party in 0..parties {
                let components = party_components(states, indices, party, tol);
                if components.len() > 1 {
                    for members in components {
                        recurse(states, &members, tol, out);
                    }
                    return;
                }
            }
        }
        out.push(restrict_block(states, indices, tol));
    }
    let indices: Vec<usize> = (0..inst.states.len()).collect();
    let mut out = Vec::new();
    recurse(&inst.states, &indices, tol, &mut out);
    out
}

/// Outcome of the multiplicity checks on one party of an irreducible block.
///
/// For an irreducible OPB of `C^{f_1}⊗...⊗C^{f_n}` with `f_j ≥ 2`:
/// every ray among the party-j vectors repeats at most `Π_{i≠j} f_i − 1`
/// times, and any nonzero test vector is orthogonal to at most
/// `Π f_i − Π_{i≠j} f_i − 1` of them (counting multiplicity). Parties with
/// `f_j < 2` carry no content and are reported vacuous.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicityVerdict {
    pub party: usize,
    pub vacuous: bool,
    pub max_multiplicity: usize,
    pub multiplicity_bound: usize,
    pub max_orthogonal: usize,
    pub orthogonal_bound: usize,
    pub samples: usize,
    pub pass: bool,
}

/// Check both multiplicity bounds on `party` of `block`, testing all rays
/// occurring in the block plus `samples` random unit vectors.
pub fn multiplicity_check<R: Rng + ?Sized>(
    block: &IrreducibleBlock,
    party: usize,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> MultiplicityVerdict {
    let f = &block.subdims;
    let others: usize = f
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != party)
        .map(|(_, &d)| d)
        .product();
    let total: usize = f.iter().product();
    if f[party] < 2 {
        return MultiplicityVerdict {
            party,
            vacuous: true,
            max_multiplicity: block.states.len(),
            multiplicity_bound: 0,
            max_orthogonal: 0,
            orthogonal_bound: 0,
            samples: 0,
            pass: true,
        };
    }
    let vectors: Vec<&DVector<C64>> = block.states.iter().map(|s| &s.parts[party]).collect();
    // group into rays
    let mut reps: Vec<(DVector<C64>, usize)> = Vec::new();
    for v in &vectors {
        match reps
            .iter_mut()
            .find(|(rep, _)| linalg::inner(rep, v).norm() > 1.0 - tol.ray)
        {
            Some((_, count)) => *count += 1,
            None => reps.push(((*v).clone(), 1)),
        }
    }
    let max_multiplicity = reps.iter().map(|(_, c)| *c).max().unwrap_or(0);
    let multiplicity_bound = others - 1;

    let orthogonal_count = |alpha: &DVector<C64>| {
        vectors
            .iter()
            .filter(|v| linalg::inner(alpha, v).norm() < tol.ortho)
            .count()
    };
    let mut max_orthogonal = reps
        .iter()
        .map(|(rep, _)| orthogonal_count(rep))
        .max()
        .unwrap_or(0);
    for _ in 0..samples {
        let alpha = linalg::random_unit_vector(f[party], rng);
        max_orthogonal = max_orthogonal.max(orthogonal_count(&alpha));
    }
    let orthogonal_bound = total - others - 1;
    MultiplicityVerdict {
        party,
        vacuous: false,
        max_multiplicity,
        multiplicity_bound,
        max_orthogonal,
        orthogonal_bound,
        samples,
        pass: max_multiplicity <= multiplicity_bound && max_orthogonal <= orthogonal_bound,
    }
}

/// Three-valued distinguishability verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distinguishability {
    Distinguishable,
    Indistinguishable,
    Unknown,
}

/// Result of the local distinguishability decision.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Distinguishability,
    /// Present when distinguishable: the split tree certifying it.
    pub certificate: Option<SplitTree>,
    /// Present when the non-disturbing solver ran (not needed for certified
    /// instances).
    pub triviality: Option<TrivialityVerdict>,
    pub justification: String,
}

/// Decide local distinguishability.
///
/// Distinguishable when a full recursive split exists (the certificate turns
/// into a perfect projective protocol); indistinguishable when every party's
/// non-disturbing first-round measurement is provably scalar-only; unknown
/// otherwise — irreducible instances without the triviality obstruction are
/// not guessed at.
pub fn decide_local_distinguishability(inst: &OpbInstance, tol: &Tolerances) -> Decision {
    let indices: Vec<usize> = (0..inst.states.len()).collect();
    if let Some(cert) = recursive_split(&inst.states, &indices, tol) {
        return Decision {
            verdict: Distinguishability::Distinguishable,
            certificate: Some(cert),
            triviality: None,
            justification: "recursive reducibility: every split chain ends in singletons".into(),
        };
    }
    let triviality = locc::first_round_triviality(inst, tol);
    if triviality.all_trivial {
        Decision {
            verdict: Distinguishability::Indistinguishable,
            certificate: None,
            triviality: Some(triviality),
            justification:
                "first-round triviality: every party's non-disturbing measurement is scalar-only"
                    .into(),
        }
    } else {
        Decision {
            verdict: Distinguishability::Unknown,
            certificate: None,
            triviality: Some(triviality),
            justification: "no recursive split and first round not provably trivial".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{realize, realize_seeded, sample_params, verify_opb, FamilyParam};
    use crate::opm::{catalog_entry, expand_stars, parse_opm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn instance(name: &str, seed: u64) -> OpbInstance {
        realize_seeded(&expand_stars(catalog_entry(name).unwrap()).unwrap(), seed).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn m41_splits_at_first_party() {
        let inst = instance("M41", 1);
        let report = reducibility(&inst, 0, &tol());
        assert!(report.reducible);
        assert_eq!(report.blocks.len(), 2);
        assert_eq!(report.blocks[0].len(), 8);
        assert_eq!(report.blocks[1].len(), 8);
        assert_eq!(report.split_index, Some(8));
    }

    #[test]
    fn m31_generic_is_irreducible_everywhere() {
        let inst = instance("M31", 2);
        for party in 0..3 {
            assert!(!reducibility(&inst, party, &tol()).reducible, "party {party}");
        }
    }

    #[test]
    fn trivial_basis_is_reducible_everywhere() {
        let opm = expand_stars(&parse_opm("0 0 0\n0 0 1\n0 1 0\n0 1 1\n1 0 0\n1 0 1\n1 1 0\n1 1 1").unwrap()).unwrap();
        let inst = realize(&opm, &Default::default()).unwrap();
        for party in 0..3 {
            let report = reducibility(&inst, party, &tol());
            assert!(report.reducible);
            assert_eq!(report.blocks.len(), 2);
        }
    }

    #[test]
    fn trivial_two_qubit_decomposes_into_singletons() {
        let opm = expand_stars(&parse_opm("0 0\n0 1\n1 0\n1 1").unwrap()).unwrap();
        let inst = realize(&opm, &Default::default()).unwrap();
        let blocks = decompose(&inst, &tol());
        assert_eq!(blocks.len(), 4);
        assert!(blocks.iter().all(|b| b.indices.len() == 1));
        assert!(blocks.iter().all(|b| b.subdims == vec![1, 1]));
    }

    #[test]
    fn m32_decomposes_into_singletons() {
        let inst = instance("M32", 3);
        let blocks = decompose(&inst, &tol());
        assert_eq!(blocks.len(), 8);
        assert!(blocks.iter().all(|b| b.indices.len() == 1));
    }

    #[test]
    fn m31_generic_is_one_irreducible_block() {
        let inst = instance("M31", 4);
        let blocks = decompose(&inst, &tol());
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].indices.len(), 8);
        assert_eq!(blocks[0].subdims, vec![2, 2, 2]);
    }

    #[test]
    fn decomposition_blocks_verify_and_cover() {
        for name in ["M31", "M41", "M47", "M429"] {
            let inst = instance(name, 5);
            let blocks = decompose(&inst, &tol());
            let mut count = 0;
            for block in &blocks {
                count += block.indices.len();
                assert_eq!(
                    block.indices.len(),
                    block.subdims.iter().product::<usize>(),
                    "{name}"
                );
                let sub = block.to_instance(name);
                assert!(verify_opb(&sub, &tol()).passed(), "{name} {:?}", block.indices);
            }
            assert_eq!(count, inst.states.len(), "{name}");
            // blocks are pairwise orthogonal in the original instance
            let g = crate::instance::gram(&inst);
            for a in 0..blocks.len() {
                for b in a + 1..blocks.len() {
                    for &s in &blocks[a].indices {
                        for &t in &blocks[b].indices {
                            assert!(g[(s, t)].norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn m31_multiplicity_bounds_hold_and_are_tight() {
        let inst = instance("M31", 6);
        let blocks = decompose(&inst, &tol());
        assert_eq!(blocks.len(), 1);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for party in 0..3 {
            let v = multiplicity_check(&blocks[0], party, 200, &mut rng, &tol());
            assert!(v.pass, "party {party}: {v:?}");
            assert!(!v.vacuous);
            assert_eq!(v.multiplicity_bound, 3);
            assert_eq!(v.orthogonal_bound, 3);
            // the computational rays realize both bounds
            assert_eq!(v.max_multiplicity, 3);
            assert_eq!(v.max_orthogonal, 3);
        }
    }

    #[test]
    fn singleton_blocks_are_vacuous() {
        let inst = instance("M2", 7);
        let blocks = decompose(&inst, &tol());
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for block in &blocks {
            for party in 0..2 {
                let v = multiplicity_check(block, party, 10, &mut rng, &tol());
                assert!(v.vacuous);
                assert!(v.pass);
            }
        }
    }

    #[test]
    fn identity_transform_is_a_no_op() {
        let inst = instance("M31", 8);
        let t = EquivalenceTransform::identity(&inst.dims);
        let out = apply_equivalence(&inst, &t, &tol()).unwrap();
        for (a, b) in out.states.iter().zip(inst.states.iter()) {
            for (pa, pb) in a.parts.iter().zip(b.parts.iter()) {
                assert!((pa - pb).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bit_flip_on_first_party_preserves_the_opb() {
        let inst = instance("M2", 9);
        let sx = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let t = EquivalenceTransform {
            perm: vec![0, 1],
            unitaries: vec![sx, linalg::identity(2)],
        };
        let out = apply_equivalence(&inst, &t, &tol()).unwrap();
        assert!(verify_opb(&out, &tol()).passed());
    }

    #[test]
    fn random_transform_preserves_structure() {
        let inst = instance("M49", 10);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let t = EquivalenceTransform::random(&inst.dims, &mut rng);
        let out = apply_equivalence(&inst, &t, &tol()).unwrap();
        assert!(verify_opb(&out, &tol()).passed());
        // gram magnitudes unchanged
        let g0 = crate::instance::gram(&inst);
        let g1 = crate::instance::gram(&out);
        for s in 0..16 {
            for t in 0..16 {
                assert!((g0[(s, t)].norm() - g1[(s, t)].norm()).abs() < 1e-10);
            }
        }
        // block-size multiset of the decomposition unchanged
        let mut sizes0: Vec<usize> = decompose(&inst, &tol()).iter().map(|b| b.indices.len()).collect();
        let mut sizes1: Vec<usize> = decompose(&out, &tol()).iter().map(|b| b.indices.len()).collect();
        sizes0.sort_unstable();
        sizes1.sort_unstable();
        assert_eq!(sizes0, sizes1);
        // per-party reducibility blocks relabel through the permutation
        for p in 0..4 {
            let r_in = reducibility(&inst, t.perm[p], &tol());
            let r_out = reducibility(&out, p, &tol());
            assert_eq!(r_in.blocks, r_out.blocks);
        }
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let inst = instance("M2", 11);
        let mut bad = EquivalenceTransform::identity(&inst.dims);
        bad.unitaries[0][(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(
            apply_equivalence(&inst, &bad, &tol()),
            Err(StructureError::NotUnitary(0))
        ));
    }

    #[test]
    fn m2_is_distinguishable_with_depth_two_certificate() {
        let inst = instance("M2", 12);
        let decision = decide_local_distinguishability(&inst, &tol());
        assert_eq!(decision.verdict, Distinguishability::Distinguishable);
        let cert = decision.certificate.unwrap();
        assert_eq!(cert.depth(), 2);
        let mut leaves = cert.leaves();
        leaves.sort_unstable();
        assert_eq!(leaves, vec![0, 1, 2, 3]);
    }

    #[test]
    fn m31_generic_is_indistinguishable() {
        let inst = instance("M31", 13);
        let decision = decide_local_distinguishability(&inst, &tol());
        assert_eq!(decision.verdict, Distinguishability::Indistinguishable);
        assert!(decision.triviality.unwrap().all_trivial);
    }

    #[test]
    fn m31_with_degenerate_family_becomes_distinguishable() {
        let opm = expand_stars(catalog_entry("M31").unwrap()).unwrap();
        // s2 is the middle-column variable pair
        let mut params = sample_params(&opm, 14);
        params.set("s2", FamilyParam::degenerate(false));
        let inst = realize(&opm, &params).unwrap();
        let decision = decide_local_distinguishability(&inst, &tol());
        assert_eq!(decision.verdict, Distinguishability::Distinguishable);
        assert!(decision.certificate.is_some());
    }
}
