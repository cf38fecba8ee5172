//! LOCC discrimination protocols: representation, simulation, builders, and
//! the non-disturbing measurement solver.
//!
//! A protocol is a tree of single-party measurements. Each internal node
//! names a party, a POVM on that party's space, one Kraus operator per
//! element, and one child per outcome; leaves claim a state index. Running a
//! product state through the tree keeps it a product state, because every
//! Kraus operator acts on a single tensor factor — so simulation just tracks
//! per-party vectors and branch probabilities.
//!
//! The non-disturbing solver mechanizes the standard first-round obstruction
//! argument: a POVM element `E` on party j can open a discrimination
//! protocol only if it preserves the pairwise orthogonality of the states,
//! which pins `⟨a_s|E|a_t⟩ = 0` for every pair (s,t) whose *other* parties
//! fail to be orthogonal. Those constraints are linear in the Hermitian `E`;
//! when their solution space is just the scalars, party j cannot move first.
//! When that holds for every party, the instance is locally
//! indistinguishable by the first-round argument.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::instance::{OpbInstance, Tolerances};
use crate::linalg;
use crate::structure::SplitTree;

/// Probability below which a branch is treated as not taken.
const BRANCH_PRUNE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LoccError {
    #[error("POVM element {element} at party {party} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd {
        party: usize,
        element: usize,
        min_eig: f64,
    },
    #[error("POVM at party {party} does not sum to identity (deviation {deviation:.3e})")]
    IncompleteSum { party: usize, deviation: f64 },
    #[error("Kraus operator {element} at party {party} does not match its POVM element")]
    KrausMismatch { party: usize, element: usize },
    #[error("node at party {party} has {children} children for {elements} POVM elements")]
    ChildCountMismatch {
        party: usize,
        children: usize,
        elements: usize,
    },
    #[error("party index {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("operator at party {party} has shape {rows}x{cols}, expected {dim}x{dim}")]
    DimensionMismatch {
        party: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("input state {state} reaches an unlabeled leaf with probability {probability:.3e}")]
    UnlabeledLeaf { state: usize, probability: f64 },
    #[error("leaf claims state {claimed} but the instance has {states} states")]
    ClaimOutOfRange { claimed: usize, states: usize },
    #[error("instance is not from the expected family: {0}")]
    WrongFamily(String),
    #[error("malformed protocol JSON: {0}")]
    Json(String),
}

/// A positive-operator-valued measure on a single party.
#[derive(Clone, Debug)]
pub struct Povm {
    pub elements: Vec<DMatrix<C64>>,
}

impl Povm {
    /// A POVM whose elements are the given orthogonal projectors (verified by
    /// the protocol validator, not here).
    pub fn projective(projectors: Vec<DMatrix<C64>>) -> Self {
        Povm {
            elements: projectors,
        }
    }

    fn validate(&self, party: usize, dim: usize, tol: &Tolerances) -> Result<(), LoccError> {
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (k, e) in self.elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(LoccError::DimensionMismatch {
                    party,
                    rows: e.nrows(),
                    cols: e.ncols(),
                    dim,
                });
            }
            let min_eig = linalg::min_eigenvalue(&((e + e.adjoint()) * C64::new(0.5, 0.0)));
            if !linalg::is_hermitian(e, tol.scalar) || min_eig < -1e-9 {
                return Err(LoccError::NotPsd {
                    party,
                    element: k,
                    min_eig,
                });
            }
            sum += e;
        }
        let deviation = linalg::max_abs(&(sum - linalg::identity(dim)));
        if deviation > tol.scalar {
            return Err(LoccError::IncompleteSum { party, deviation });
        }
        Ok(())
    }
}

/// One node of a protocol tree.
#[derive(Clone, Debug)]
pub enum ProtocolNode {
    /// Terminal: claim the input was state `claim`; `None` marks a branch
    /// that must never be reached.
    Leaf { claim: Option<usize> },
    Measure {
        party: usize,
        povm: Povm,
        /// One Kraus operator per POVM element, `K†K = E`.
        kraus: Vec<DMatrix<C64>>,
        children: Vec<ProtocolNode>,
    },
}

impl ProtocolNode {
    pub fn leaf(claim: usize) -> Self {
        ProtocolNode::Leaf { claim: Some(claim) }
    }

    /// Projective measurement node: Kraus operators are the projectors
    /// themselves.
    pub fn projective(party: usize, projectors: Vec<DMatrix<C64>>, children: Vec<ProtocolNode>) -> Self {
        ProtocolNode::Measure {
            party,
            kraus: projectors.clone(),
            povm: Povm::projective(projectors),
            children,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolNode::Leaf { .. } => 0,
            ProtocolNode::Measure { children, .. } => {
                1 + children.iter().map(ProtocolNode::depth).max().unwrap_or(0)
            }
        }
    }

    fn validate(&self, dims: &[usize], states: usize, tol: &Tolerances) -> Result<(), LoccError> {
        match self {
            ProtocolNode::Leaf { claim } => {
                if let Some(c) = claim {
                    if *c >= states {
                        return Err(LoccError::ClaimOutOfRange {
                            claimed: *c,
                            states,
                        });
                    }
                }
                Ok(())
            }
            ProtocolNode::Measure {
                party,
                povm,
                kraus,
                children,
            } => {
                if *party >= dims.len() {
                    return Err(LoccError::PartyOutOfRange {
                        party: *party,
                        parties: dims.len(),
                    });
                }
                let dim = dims[*party];
                povm.validate(*party, dim, tol)?;
                if kraus.len() != povm.elements.len() || children.len() != povm.elements.len() {
                    return Err(LoccError::ChildCountMismatch {
                        party: *party,
                        children: children.len(),
                        elements: povm.elements.len(),
                    });
                }
                for (k, (op, e)) in kraus.iter().zip(povm.elements.iter()).enumerate() {
                    if op.nrows() != dim || op.ncols() != dim {
                        return Err(LoccError::DimensionMismatch {
                            party: *party,
                            rows: op.nrows(),
                            cols: op.ncols(),
                            dim,
                        });
                    }
                    if linalg::max_abs(&(op.adjoint() * op - e)) > tol.scalar {
                        return Err(LoccError::KrausMismatch {
                            party: *party,
                            element: k,
                        });
                    }
                }
                for child in children {
                    child.validate(dims, states, tol)?;
                }
                Ok(())
            }
        }
    }

    /// Protocol wire format: leaves are `{"leaf": index|null}`, measurement
    /// nodes carry the party, POVM and Kraus matrices as nested `[re, im]`
    /// arrays, and one child per element.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ProtocolNode::Leaf { claim } => json!({ "leaf": claim }),
            ProtocolNode::Measure {
                party,
                povm,
                kraus,
                children,
            } => json!({
                "party": party,
                "povm": povm.elements.iter().map(linalg::cmat_to_rows).collect::<Vec<_>>(),
                "kraus": kraus.iter().map(linalg::cmat_to_rows).collect::<Vec<_>>(),
                "children": children.iter().map(ProtocolNode::to_json).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LoccError> {
        let obj = v
            .as_object()
            .ok_or_else(|| LoccError::Json("node is not an object".into()))?;
        if let Some(leaf) = obj.get("leaf") {
            let claim = if leaf.is_null() {
                None
            } else {
                Some(leaf.as_u64().ok_or_else(|| LoccError::Json("bad leaf".into()))? as usize)
            };
            return Ok(ProtocolNode::Leaf { claim });
        }
        let party = obj
            .get("party")
            .and_then(|p| p.as_u64())
            .ok_or_else(|| LoccError::Json("missing party".into()))? as usize;
        let parse_mats = |key: &str| -> Result<Vec<DMatrix<C64>>, LoccError> {
            let arr: Vec<Vec<Vec<[f64; 2]>>> = serde_json::from_value(
                obj.get(key)
                    .cloned()
                    .ok_or_else(|| LoccError::Json(format!("missing {key}")))?,
            )
            .map_err(|e| LoccError::Json(e.to_string()))?;
            arr.iter()
                .map(|rows| {
                    linalg::cmat_from_rows(rows).ok_or_else(|| LoccError::Json("ragged matrix".into()))
                })
                .collect()
        };
        let povm = Povm {
            elements: parse_mats("povm")?,
        };
        let kraus = parse_mats("kraus")?;
        let children = obj
            .get("children")
            .and_then(|c| c.as_array())
            .ok_or_else(|| LoccError::Json("missing children".into()))?
            .iter()
            .map(ProtocolNode::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProtocolNode::Measure {
            party,
            povm,
            kraus,
            children,
        })
    }
}

/// One measurement step along a branch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchStep {
    pub party: usize,
    pub outcome: usize,
    pub probability: f64,
}

/// One root-to-leaf path taken by an input state, with its total probability.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchRecord {
    pub steps: Vec<BranchStep>,
    pub probability: f64,
    pub claim: Option<usize>,
}

/// All branches taken by one input state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateTranscript {
    pub state: usize,
    pub branches: Vec<BranchRecord>,
    /// Total probability of ending at a leaf claiming this state.
    pub success_probability: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub per_state: Vec<StateTranscript>,
}

/// Aggregate verdict of a protocol run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimVerdict {
    /// Every input state is identified correctly with probability 1 within
    /// tolerance.
    pub perfect: bool,
    pub worst_success: f64,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub transcript: Transcript,
    pub verdict: SimVerdict,
}

/// Run every instance state through the protocol tree.
///
/// The protocol is validated first (PSD elements, completeness, Kraus
/// consistency, shapes). Branches with probability below 1e-12 are pruned.
pub fn simulate(
    inst: &OpbInstance,
    root: &ProtocolNode,
    tol: &Tolerances,
) -> Result<Simulation, LoccError> {
    root.validate(&inst.dims, inst.states.len(), tol)?;
    let mut per_state = Vec::with_capacity(inst.states.len());
    let mut worst = f64::INFINITY;
    for (idx, state) in inst.states.iter().enumerate() {
        let mut branches = Vec::new();
        walk(
            root,
            &mut state.parts.clone(),
            1.0,
            &mut Vec::new(),
            idx,
            tol,
            &mut branches,
        )?;
        let success: f64 = branches
            .iter()
            .filter(|b| b.claim == Some(idx))
            .map(|b| b.probability)
            .sum();
        worst = worst.min(success);
        per_state.push(StateTranscript {
            state: idx,
            branches,
            success_probability: success,
        });
    }
    let verdict = SimVerdict {
        perfect: worst >= 1.0 - tol.ortho,
        worst_success: worst,
    };
    Ok(Simulation {
        transcript: Transcript { per_state },
        verdict,
    })
}

fn walk(
    node: &ProtocolNode,
    parts: &mut Vec<DVector<C64>>,
    prob: f64,
    steps: &mut Vec<BranchStep>,
    state: usize,
    tol: &Tolerances,
    out: &mut Vec<BranchRecord>,
) -> Result<(), LoccError> {
    match node {
        ProtocolNode::Leaf { claim } => {
            if claim.is_none() && prob >= tol.ortho {
                return Err(LoccError::UnlabeledLeaf {
                    state,
                    probability: prob,
                });
            }
            out.push(BranchRecord {
                steps: steps.clone(),
                probability: prob,
                claim: *claim,
            });
            Ok(())
        }
        ProtocolNode::Measure {
            party,
            povm,
            kraus,
            children,
        } => {
            let part = parts[*party].clone();
            for (k, (e, op)) in povm.elements.iter().zip(kraus.iter()).enumerate() {
                let p = linalg::inner(&part, &(e * &part)).re.max(0.0);
                if p <= BRANCH_PRUNE {
                    continue;
                }
                let post = (op * &part) / C64::new(p.sqrt(), 0.0);
                parts[*party] = post;
                steps.push(BranchStep {
                    party: *party,
                    outcome: k,
                    probability: p,
                });
                walk(&children[k], parts, prob * p, steps, state, tol, out)?;
                steps.pop();
            }
            parts[*party] = part;
            Ok(())
        }
    }
}

/// Build the two-branch protocol for a two-qubit instance whose first party
/// splits into two pairs: the first party projects onto the two orthogonal
/// rays, then the second party measures the basis pair of the surviving
/// group. Works for any instance equivalent to the M2 family.
pub fn two_qubit_protocol(inst: &OpbInstance, tol: &Tolerances) -> Result<ProtocolNode, LoccError> {
    if inst.dims != vec![2, 2] || inst.states.len() != 4 {
        return Err(LoccError::WrongFamily(
            "need a 2x2 instance with 4 states".into(),
        ));
    }
    let report = crate::structure::reducibility(inst, 0, tol);
    if report.blocks.len() != 2 || report.blocks.iter().any(|b| b.len() != 2) {
        return Err(LoccError::WrongFamily(
            "first party does not split into two pairs".into(),
        ));
    }
    let mut projectors = Vec::new();
    let mut children = Vec::new();
    for group in &report.blocks {
        let a = &inst.states[group[0]].parts[0];
        projectors.push(linalg::outer(a, a));
        let sub_projs: Vec<DMatrix<C64>> = group
            .iter()
            .map(|&s| {
                let b = &inst.states[s].parts[1];
                linalg::outer(b, b)
            })
            .collect();
        let leaves = group.iter().map(|&s| ProtocolNode::leaf(s)).collect();
        children.push(ProtocolNode::projective(1, sub_projs, leaves));
    }
    Ok(ProtocolNode::projective(0, projectors, children))
}

/// Turn a recursive-reducibility certificate into a projective protocol.
///
/// Every split becomes a measurement of the projectors onto the orthogonal
/// party-j subspaces spanned by its groups; the last element absorbs any
/// residual of the identity (unreachable for instance states). Leaves claim
/// their singleton's index.
pub fn certificate_protocol(
    inst: &OpbInstance,
    cert: &SplitTree,
    tol: &Tolerances,
) -> Result<ProtocolNode, LoccError> {
    match cert {
        SplitTree::Leaf { state } => Ok(ProtocolNode::leaf(*state)),
        SplitTree::Split { party, groups } => {
            if *party >= inst.dims.len() {
                return Err(LoccError::PartyOutOfRange {
                    party: *party,
                    parties: inst.dims.len(),
                });
            }
            let dim = inst.dims[*party];
            let mut projectors: Vec<DMatrix<C64>> = groups
                .iter()
                .map(|g| {
                    let vecs: Vec<DVector<C64>> = g
                        .states
                        .iter()
                        .map(|&s| inst.states[s].parts[*party].clone())
                        .collect();
                    linalg::projector_onto_span(&vecs, tol.ortho)
                })
                .collect();
            let covered: DMatrix<C64> = projectors.iter().sum();
            let residual = linalg::identity(dim) - covered;
            if let Some(last) = projectors.last_mut() {
                *last += residual;
            }
            let children = groups
                .iter()
                .map(|g| certificate_protocol(inst, &g.child, tol))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProtocolNode::projective(*party, projectors, children))
        }
    }
}

/// Basis of the real space of Hermitian operators on party `party` that
/// preserve all pairwise orthogonality constraints.
#[derive(Clone, Debug)]
pub struct NondisturbingSolution {
    pub party: usize,
    pub basis: Vec<DMatrix<C64>>,
    pub dimension: usize,
    /// The solution space is exactly the real scalar multiples of identity.
    pub trivial_only: bool,
    /// Number of constraint pairs that entered the linear system.
    pub constraints: usize,
}

fn hermitian_basis(dim: usize) -> Vec<DMatrix<C64>> {
    let mut basis = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        basis.push(m);
    }
    for k in 0..dim {
        for l in k + 1..dim {
            let mut re = DMatrix::zeros(dim, dim);
            re[(k, l)] = C64::new(1.0, 0.0);
            re[(l, k)] = C64::new(1.0, 0.0);
            basis.push(re);
            let mut im = DMatrix::zeros(dim, dim);
            im[(k, l)] = C64::new(0.0, 1.0);
            im[(l, k)] = C64::new(0.0, -1.0);
            basis.push(im);
        }
    }
    basis
}

/// Solve for all Hermitian `E` on `party` with `⟨a_s|E|a_t⟩ = 0` for every
/// state pair (s,t) that is *not* orthogonal on the remaining parties.
///
/// The constraints are assembled over a real Hermitian basis (d² parameters)
/// and solved by SVD nullspace with the looser `nullspace_rel` threshold.
pub fn nondisturbing_space(
    inst: &OpbInstance,
    party: usize,
    tol: &Tolerances,
) -> NondisturbingSolution {
    let dim = inst.dims[party];
    let basis = hermitian_basis(dim);
    let n = inst.states.len();
    let mut rows: Vec<f64> = Vec::new();
    let mut constraints = 0usize;
    for s in 0..n {
        for t in s + 1..n {
            let other: C64 = (0..inst.dims.len())
                .filter(|&p| p != party)
                .map(|p| linalg::inner(&inst.states[s].parts[p], &inst.states[t].parts[p]))
                .product();
            if other.norm() < tol.ortho {
                continue;
            }
            constraints += 1;
            let u = &inst.states[s].parts[party];
            let v = &inst.states[t].parts[party];
            let coeffs: Vec<C64> = basis.iter().map(|b| linalg::inner(u, &(b * v))).collect();
            rows.extend(coeffs.iter().map(|c| c.re));
            rows.extend(coeffs.iter().map(|c| c.im));
        }
    }
    let m = DMatrix::from_row_slice(rows.len() / (dim * dim), dim * dim, &rows);
    let nullspace = linalg::nullspace_real(&m, tol.nullspace_rel);
    let dimension = nullspace.len();
    let operators: Vec<DMatrix<C64>> = nullspace
        .iter()
        .map(|x| {
            let mut e = DMatrix::zeros(dim, dim);
            for (c, b) in x.iter().zip(basis.iter()) {
                e += b * C64::new(*c, 0.0);
            }
            e
        })
        .collect();
    let trivial_only = dimension == 1 && is_scalar(&operators[0], tol.scalar);
    NondisturbingSolution {
        party,
        basis: operators,
        dimension,
        trivial_only,
        constraints,
    }
}

fn is_scalar(e: &DMatrix<C64>, tol: f64) -> bool {
    let d = e.nrows();
    let s = e.trace() / C64::new(d as f64, 0.0);
    if s.norm() < 1e-12 {
        return false;
    }
    linalg::max_abs(&(e / s - linalg::identity(d))) < tol
}

/// Per-party non-disturbing triviality.
#[derive(Clone, Debug)]
pub struct TrivialityVerdict {
    /// Every party's non-disturbing space is scalar-only, so no party can
    /// open a discrimination protocol — the first-round obstruction.
    pub all_trivial: bool,
    pub per_party: Vec<NondisturbingSolution>,
}

pub fn first_round_triviality(inst: &OpbInstance, tol: &Tolerances) -> TrivialityVerdict {
    let per_party: Vec<NondisturbingSolution> = (0..inst.parties())
        .map(|p| nondisturbing_space(inst, p, tol))
        .collect();
    TrivialityVerdict {
        all_trivial: per_party.iter().all(|s| s.trivial_only),
        per_party,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{realize, realize_seeded, sample_params, FamilyParam};
    use crate::opm::{catalog_entry, expand_stars, parse_opm};
    use crate::structure::{decide_local_distinguishability, Distinguishability};

    fn instance(name: &str, seed: u64) -> OpbInstance {
        realize_seeded(&expand_stars(catalog_entry(name).unwrap()).unwrap(), seed).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn trivial_opb_computational_protocol_is_perfect() {
        let opm = expand_stars(&parse_opm("0 0\n0 1\n1 0\n1 1").unwrap()).unwrap();
        let inst = realize(&opm, &Default::default()).unwrap();
        let decision = decide_local_distinguishability(&inst, &tol());
        let cert = decision.certificate.unwrap();
        let proto = certificate_protocol(&inst, &cert, &tol()).unwrap();
        assert_eq!(proto.depth(), 2);
        let sim = simulate(&inst, &proto, &tol()).unwrap();
        assert!(sim.verdict.perfect);
        assert!((sim.verdict.worst_success - 1.0).abs() < 1e-12);
    }

    #[test]
    fn m2_two_qubit_protocol_is_perfect() {
        for seed in 0..20 {
            let inst = instance("M2", seed);
            let proto = two_qubit_protocol(&inst, &tol()).unwrap();
            assert_eq!(proto.depth(), 2);
            let sim = simulate(&inst, &proto, &tol()).unwrap();
            assert!(sim.verdict.perfect, "seed {seed}");
        }
    }

    #[test]
    fn m2_protocol_handles_degenerate_family() {
        let opm = expand_stars(catalog_entry("M2").unwrap()).unwrap();
        let mut params = sample_params(&opm, 0);
        params.set("s1", FamilyParam::degenerate(false));
        let inst = realize(&opm, &params).unwrap();
        let proto = two_qubit_protocol(&inst, &tol()).unwrap();
        assert!(simulate(&inst, &proto, &tol()).unwrap().verdict.perfect);
    }

    #[test]
    fn m32_certificate_protocol_is_perfect() {
        let inst = instance("M32", 1);
        let decision = decide_local_distinguishability(&inst, &tol());
        assert_eq!(decision.verdict, Distinguishability::Distinguishable);
        let proto = certificate_protocol(&inst, &decision.certificate.unwrap(), &tol()).unwrap();
        let sim = simulate(&inst, &proto, &tol()).unwrap();
        assert!(sim.verdict.perfect);
    }

    #[test]
    fn branch_probabilities_conserve_to_one() {
        let inst = instance("M41", 2);
        let decision = decide_local_distinguishability(&inst, &tol());
        let proto = certificate_protocol(&inst, &decision.certificate.unwrap(), &tol()).unwrap();
        let sim = simulate(&inst, &proto, &tol()).unwrap();
        for st in &sim.transcript.per_state {
            let total: f64 = st.branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-9, "state {}", st.state);
        }
    }

    #[test]
    fn m31_generic_is_first_round_trivial_on_all_parties() {
        let inst = instance("M31", 3);
        for party in 0..3 {
            let sol = nondisturbing_space(&inst, party, &tol());
            assert!(sol.trivial_only, "party {party}: dim {}", sol.dimension);
            assert_eq!(sol.dimension, 1);
        }
        assert!(first_round_triviality(&inst, &tol()).all_trivial);
    }

    #[test]
    fn trivial_two_qubit_admits_diagonal_measurements() {
        let opm = expand_stars(&parse_opm("0 0\n0 1\n1 0\n1 1").unwrap()).unwrap();
        let inst = realize(&opm, &Default::default()).unwrap();
        let sol = nondisturbing_space(&inst, 0, &tol());
        assert_eq!(sol.dimension, 2);
        assert!(!sol.trivial_only);
    }

    #[test]
    fn m31_with_degenerate_family_is_not_trivial() {
        let opm = expand_stars(catalog_entry("M31").unwrap()).unwrap();
        let mut params = sample_params(&opm, 4);
        params.set("s2", FamilyParam::degenerate(false));
        let inst = realize(&opm, &params).unwrap();
        let verdict = first_round_triviality(&inst, &tol());
        assert!(!verdict.all_trivial);
    }

    #[test]
    fn m41_first_party_admits_a_nontrivial_measurement() {
        let inst = instance("M41", 5);
        let sol = nondisturbing_space(&inst, 0, &tol());
        assert!(!sol.trivial_only);
        assert!(sol.dimension >= 2);
    }

    #[test]
    fn kraus_mismatch_is_rejected() {
        let inst = instance("M2", 6);
        let p0 = linalg::outer(&linalg::basis_ket(2, 0), &linalg::basis_ket(2, 0));
        let p1 = linalg::outer(&linalg::basis_ket(2, 1), &linalg::basis_ket(2, 1));
        let node = ProtocolNode::Measure {
            party: 0,
            povm: Povm::projective(vec![p0, p1.clone()]),
            kraus: vec![p1.clone(), p1],
            children: vec![ProtocolNode::leaf(0), ProtocolNode::leaf(1)],
        };
        assert!(matches!(
            simulate(&inst, &node, &tol()),
            Err(LoccError::KrausMismatch { .. })
        ));
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let inst = instance("M2", 7);
        let p0 = linalg::outer(&linalg::basis_ket(2, 0), &linalg::basis_ket(2, 0));
        let node = ProtocolNode::projective(0, vec![p0], vec![ProtocolNode::leaf(0)]);
        assert!(matches!(
            simulate(&inst, &node, &tol()),
            Err(LoccError::IncompleteSum { .. })
        ));
    }

    #[test]
    fn unlabeled_leaf_with_weight_is_an_error() {
        let inst = instance("M2", 8);
        let p0 = linalg::outer(&linalg::basis_ket(2, 0), &linalg::basis_ket(2, 0));
        let p1 = linalg::outer(&linalg::basis_ket(2, 1), &linalg::basis_ket(2, 1));
        let node = ProtocolNode::projective(
            0,
            vec![p0, p1],
            vec![ProtocolNode::Leaf { claim: None }, ProtocolNode::Leaf { claim: None }],
        );
        assert!(matches!(
            simulate(&inst, &node, &tol()),
            Err(LoccError::UnlabeledLeaf { .. })
        ));
    }

    #[test]
    fn protocol_json_round_trip() {
        let inst = instance("M2", 9);
        let proto = two_qubit_protocol(&inst, &tol()).unwrap();
        let back = ProtocolNode::from_json(&proto.to_json()).unwrap();
        let sim = simulate(&inst, &back, &tol()).unwrap();
        assert!(sim.verdict.perfect);
    }
}
