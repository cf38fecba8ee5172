//! Numerical instantiation of symbolic OPMs.
//!
//! A [`ParamAssignment`] fixes every variable family to a concrete qubit
//! basis pair. The unprimed vector is
//! `|v⟩ = (cos θ, e^{iφ} sin θ)` and its orthogonal partner is
//! `|v'⟩ = (−e^{−iφ} sin θ, cos θ)`; any other completion differs only by
//! phases, which no verdict in this crate depends on. A family can also be
//! pinned to the computational basis (`Degenerate0`/`Degenerate1`), the
//! boundary cases excluded by generic sampling.
//!
//! [`realize`] turns an expanded OPM plus an assignment into an
//! [`OpbInstance`] of concrete product states and checks pairwise
//! orthogonality; [`verify_opb`] additionally checks completeness by the
//! numerical rank of the assembled state matrix.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::opm::{ExpandedOpm, OpmEntry};

/// Default magnitude below which an inner product counts as zero, and the
/// relative threshold below which a singular value counts as zero.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Sampled θ keeps at least this distance (radians) from 0 and π/2, so
/// generic vectors stay numerically far from the computational basis.
pub const GENERICITY_MARGIN: f64 = 0.1;

/// Numerical thresholds used across verification and solvers.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Inner-product magnitudes below this count as orthogonal.
    pub ortho: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel: f64,
    /// Relative singular-value cutoff for constraint nullspaces; looser than
    /// `ortho` because constraint rows are products of inner products.
    pub nullspace_rel: f64,
    /// Two unit vectors are the same ray when |⟨u|v⟩| exceeds 1 minus this.
    pub ray: f64,
    /// Max deviation allowed when testing a matrix against a scalar multiple
    /// of the identity.
    pub scalar: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::from_base(DEFAULT_TOL)
    }
}

impl Tolerances {
    /// Derive the full set from a single base tolerance.
    pub fn from_base(tol: f64) -> Self {
        Tolerances {
            ortho: tol,
            rank_rel: tol,
            nullspace_rel: tol * 100.0,
            ray: tol,
            scalar: tol * 100.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("family {0:?} missing from the parameter assignment")]
    MissingFamily(String),
    #[error("unexpanded star at row {0}; expand the OPM first")]
    ResidualStar(usize),
    #[error(
        "constructed states violate OPB invariants (max off-diagonal Gram magnitude {max_offdiag:.3e})"
    )]
    InvariantViolation { verdict: OpbVerdict, max_offdiag: f64 },
}

/// How a family's basis pair is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyMode {
    /// Use the stored (θ, φ).
    Generic,
    /// Pin |v⟩ = |0⟩.
    #[serde(rename = "deg0")]
    Degenerate0,
    /// Pin |v⟩ = |1⟩.
    #[serde(rename = "deg1")]
    Degenerate1,
}

/// Basis parameters for one variable family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FamilyParam {
    pub theta: f64,
    pub phi: f64,
    pub mode: FamilyMode,
}

impl FamilyParam {
    pub fn generic(theta: f64, phi: f64) -> Self {
        FamilyParam {
            theta,
            phi,
            mode: FamilyMode::Generic,
        }
    }

    pub fn degenerate(one: bool) -> Self {
        FamilyParam {
            theta: if one { std::f64::consts::FRAC_PI_2 } else { 0.0 },
            phi: 0.0,
            mode: if one {
                FamilyMode::Degenerate1
            } else {
                FamilyMode::Degenerate0
            },
        }
    }

    fn effective_angles(&self) -> (f64, f64) {
        match self.mode {
            FamilyMode::Generic => (self.theta, self.phi),
            FamilyMode::Degenerate0 => (0.0, 0.0),
            FamilyMode::Degenerate1 => (std::f64::consts::FRAC_PI_2, 0.0),
        }
    }

    /// The qubit pair (|v⟩, |v'⟩) this parameter set denotes.
    pub fn basis_pair(&self) -> (DVector<C64>, DVector<C64>) {
        let (theta, phi) = self.effective_angles();
        let (s, c) = theta.sin_cos();
        let phase = C64::from_polar(1.0, phi);
        let v = DVector::from_vec(vec![C64::new(c, 0.0), phase * s]);
        let vp = DVector::from_vec(vec![-phase.conj() * s, C64::new(c, 0.0)]);
        (v, vp)
    }
}

/// Map from family name to basis parameters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ParamAssignment {
    pub families: BTreeMap<String, FamilyParam>,
}

impl ParamAssignment {
    pub fn get(&self, family: &str) -> Option<&FamilyParam> {
        self.families.get(family)
    }

    pub fn set(&mut self, family: &str, param: FamilyParam) {
        self.families.insert(family.to_owned(), param);
    }
}

/// Draw a generic assignment for every family of `opm`, deterministically in
/// `seed`. θ is uniform in [margin, π/2 − margin], φ uniform in [0, 2π).
pub fn sample_params(opm: &ExpandedOpm, seed: u64) -> ParamAssignment {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut params = ParamAssignment::default();
    for family in opm.families() {
        let theta = rng.random_range(GENERICITY_MARGIN..=std::f64::consts::FRAC_PI_2 - GENERICITY_MARGIN);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        params.set(&family, FamilyParam::generic(theta, phi));
    }
    params
}

/// A concrete product state: one unit vector per party.
#[derive(Clone, Debug)]
pub struct ProductState {
    pub parts: Vec<DVector<C64>>,
}

impl ProductState {
    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }

    /// Full tensor-product vector, parties kron'd left to right.
    pub fn full_vector(&self) -> DVector<C64> {
        let mut out = DVector::from_vec(vec![C64::new(1.0, 0.0)]);
        for part in &self.parts {
            out = linalg::kron_vec(&out, part);
        }
        out
    }
}

/// ⟨s|t⟩ for two product states: the product of per-party inner products.
pub fn product_inner(s: &ProductState, t: &ProductState) -> C64 {
    s.parts
        .iter()
        .zip(t.parts.iter())
        .map(|(a, b)| linalg::inner(a, b))
        .product()
}

/// Where an instance came from: the source OPM, the sampling seed (when the
/// assignment was drawn rather than given), and the full assignment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub seed: Option<u64>,
    pub params: ParamAssignment,
}

/// A concrete orthogonal product basis: `Π dims` pairwise orthogonal product
/// states spanning the full space.
#[derive(Clone, Debug)]
pub struct OpbInstance {
    pub states: Vec<ProductState>,
    pub dims: Vec<usize>,
    pub provenance: Provenance,
}

impl OpbInstance {
    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Outcome of an OPB verification.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OpbVerdict {
    pub orthogonal: bool,
    pub complete: bool,
    pub max_offdiag: f64,
    pub rank: usize,
}

impl OpbVerdict {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.complete
    }
}

/// Realize an expanded OPM as concrete states under `params`.
///
/// Entries map as: `0` → (1,0), `1` → (0,1), unprimed variables to |v⟩ and
/// primed ones to |v'⟩ of the family's basis pair. The result is checked
/// against the OPB invariants with default tolerances; a violation signals a
/// malformed OPM (or a deliberately corrupted input) and is returned as an
/// error carrying the failing verdict.
pub fn realize(opm: &ExpandedOpm, params: &ParamAssignment) -> Result<OpbInstance, InstanceError> {
    let zero = linalg::basis_ket(2, 0);
    let one = linalg::basis_ket(2, 1);
    let mut pairs: BTreeMap<String, (DVector<C64>, DVector<C64>)> = BTreeMap::new();
    for family in opm.families() {
        let param = params
            .get(&family)
            .ok_or_else(|| InstanceError::MissingFamily(family.clone()))?;
        pairs.insert(family, param.basis_pair());
    }
    let mut states = Vec::with_capacity(opm.rows.len());
    for (i, row) in opm.rows.iter().enumerate() {
        let mut parts = Vec::with_capacity(opm.parties);
        for entry in &row.entries {
            let part = match entry {
                OpmEntry::Zero => zero.clone(),
                OpmEntry::One => one.clone(),
                OpmEntry::Star => return Err(InstanceError::ResidualStar(i)),
                OpmEntry::Var { family, primed } => {
                    let (v, vp) = &pairs[family.as_str()];
                    if *primed {
                        vp.clone()
                    } else {
                        v.clone()
                    }
                }
            };
            parts.push(part);
        }
        states.push(ProductState { parts });
    }
    let inst = OpbInstance {
        states,
        dims: vec![2; opm.parties],
        provenance: Provenance {
            source: opm.name.clone(),
            seed: None,
            params: params.clone(),
        },
    };
    let verdict = verify_opb(&inst, &Tolerances::default());
    if !verdict.passed() {
        return Err(InstanceError::InvariantViolation {
            verdict,
            max_offdiag: verdict.max_offdiag,
        });
    }
    Ok(inst)
}

/// Sample parameters for `seed` and realize in one step, recording the seed.
pub fn realize_seeded(opm: &ExpandedOpm, seed: u64) -> Result<OpbInstance, InstanceError> {
    let params = sample_params(opm, seed);
    let mut inst = realize(opm, &params)?;
    inst.provenance.seed = Some(seed);
    Ok(inst)
}

/// Gram matrix of the instance: entry (s,t) is the product of per-party
/// inner products ⟨part_{s,j}|part_{t,j}⟩. Hermitian with unit diagonal.
pub fn gram(inst: &OpbInstance) -> DMatrix<C64> {
    let n = inst.states.len();
    let mut g = DMatrix::zeros(n, n);
    for s in 0..n {
        for t in s..n {
            let v = product_inner(&inst.states[s], &inst.states[t]);
            g[(s, t)] = v;
            g[(t, s)] = v.conj();
        }
    }
    g
}

/// Largest off-diagonal Gram magnitude.
pub fn max_offdiag(g: &DMatrix<C64>) -> f64 {
    let n = g.nrows();
    let mut max = 0.0;
    for s in 0..n {
        for t in 0..n {
            if s != t {
                max = f64::max(max, g[(s, t)].norm());
            }
        }
    }
    max
}

/// Check orthogonality (Gram off-diagonals below `tol.ortho`) and
/// completeness (numerical rank of the state matrix equals the full product
/// dimension, via singular values with relative cutoff `tol.rank_rel`).
pub fn verify_opb(inst: &OpbInstance, tol: &Tolerances) -> OpbVerdict {
    let g = gram(inst);
    let off = max_offdiag(&g);
    let total = inst.total_dim();
    let full = DMatrix::from_columns(
        &inst
            .states
            .iter()
            .map(ProductState::full_vector)
            .collect::<Vec<_>>(),
    );
    let rank = linalg::rank(&full, tol.rank_rel);
    OpbVerdict {
        orthogonal: off < tol.ortho,
        complete: rank == total && inst.states.len() == total,
        max_offdiag: off,
        rank,
    }
}

/// Serialized form of an instance: dims, provenance, and per-state per-party
/// amplitudes as `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct InstanceJson {
    dims: Vec<usize>,
    provenance: Provenance,
    states: Vec<Vec<Vec<[f64; 2]>>>,
}

impl OpbInstance {
    pub fn to_json(&self) -> String {
        let j = InstanceJson {
            dims: self.dims.clone(),
            provenance: self.provenance.clone(),
            states: self
                .states
                .iter()
                .map(|s| s.parts.iter().map(linalg::cvec_to_pairs).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("instance JSON serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let j: InstanceJson = serde_json::from_str(text)?;
        Ok(OpbInstance {
            dims: j.dims,
            provenance: j.provenance,
            states: j
                .states
                .iter()
                .map(|s| ProductState {
                    parts: s.iter().map(|p| linalg::cvec_from_pairs(p)).collect(),
                })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opm::{catalog, catalog_entry, expand_stars, parse_opm};

    fn expanded(name: &str) -> ExpandedOpm {
        expand_stars(catalog_entry(name).unwrap()).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let opm = expanded("M31");
        let a = sample_params(&opm, 42);
        let b = sample_params(&opm, 42);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = sample_params(&opm, 43);
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn sampling_respects_margin() {
        let opm = expanded("M41");
        for seed in 0..1000 {
            for p in sample_params(&opm, seed).families.values() {
                assert!(p.theta >= GENERICITY_MARGIN);
                assert!(p.theta <= std::f64::consts::FRAC_PI_2 - GENERICITY_MARGIN);
                assert!((0.0..std::f64::consts::TAU).contains(&p.phi));
            }
        }
    }

    #[test]
    fn m31_families_all_assigned() {
        let opm = expanded("M31");
        let params = sample_params(&opm, 1);
        for fam in opm.families() {
            assert!(params.get(&fam).is_some(), "{fam}");
        }
        assert_eq!(params.families.len(), 3);
    }

    #[test]
    fn basis_pair_is_orthonormal() {
        for (theta, phi) in [(0.3, 1.2), (0.0, 0.0), (1.4, 5.9)] {
            let (v, vp) = FamilyParam::generic(theta, phi).basis_pair();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!((vp.norm() - 1.0).abs() < 1e-12);
            assert!(linalg::inner(&v, &vp).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_modes_hit_computational_basis() {
        let (v, vp) = FamilyParam::degenerate(false).basis_pair();
        assert_eq!(v[0], C64::new(1.0, 0.0));
        assert_eq!(vp[1], C64::new(1.0, 0.0));
        let (v, _) = FamilyParam::degenerate(true).basis_pair();
        assert_eq!(v[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn trivial_opm_realizes_computational_basis() {
        let opm = expand_stars(&parse_opm("0 0\n0 1\n1 0\n1 1").unwrap()).unwrap();
        let inst = realize(&opm, &ParamAssignment::default()).unwrap();
        for (i, state) in inst.states.iter().enumerate() {
            let full = state.full_vector();
            assert_eq!(full[i], C64::new(1.0, 0.0));
        }
        let verdict = verify_opb(&inst, &Tolerances::default());
        assert!(verdict.passed());
        assert_eq!(verdict.rank, 4);
    }

    #[test]
    fn m2_realizes_orthogonal_quadruple() {
        let inst = realize_seeded(&expanded("M2"), 5).unwrap();
        let verdict = verify_opb(&inst, &Tolerances::default());
        assert!(verdict.orthogonal);
        assert!(verdict.complete);
        assert_eq!(verdict.rank, 4);
    }

    #[test]
    fn gram_diagonal_is_unit() {
        let inst = realize_seeded(&expanded("M31"), 9).unwrap();
        let g = gram(&inst);
        for i in 0..8 {
            assert!((g[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn corrupted_state_is_detected() {
        let mut inst = realize_seeded(&expanded("M31"), 3).unwrap();
        inst.states[0].parts[0] = inst.states[7].parts[0].clone();
        inst.states[0].parts[1] = inst.states[7].parts[1].clone();
        inst.states[0].parts[2] = inst.states[7].parts[2].clone();
        let verdict = verify_opb(&inst, &Tolerances::default());
        assert!(!verdict.orthogonal);
        assert!(verdict.max_offdiag > 0.5);
        assert!(!verdict.complete);
    }

    #[test]
    fn missing_family_is_an_error() {
        let err = realize(&expanded("M2"), &ParamAssignment::default());
        assert!(matches!(err, Err(InstanceError::MissingFamily(_))));
    }

    #[test]
    fn duplicate_rows_violate_invariants() {
        let opm = expand_stars(&parse_opm("0 0\n0 0\n1 0\n1 1").unwrap()).unwrap();
        let err = realize(&opm, &ParamAssignment::default());
        assert!(matches!(
            err,
            Err(InstanceError::InvariantViolation { .. })
        ));
    }

    #[test]
    fn fifteen_states_are_incomplete() {
        let mut inst = realize_seeded(&expanded("M41"), 11).unwrap();
        inst.states.pop();
        let verdict = verify_opb(&inst, &Tolerances::default());
        assert!(verdict.orthogonal);
        assert!(!verdict.complete);
        assert_eq!(verdict.rank, 15);
    }

    #[test]
    fn catalog_instances_verify_across_seeds() {
        for opm in catalog() {
            let expanded = expand_stars(opm).unwrap();
            for seed in 0..3 {
                let inst = realize_seeded(&expanded, seed).expect(&opm.name);
                let verdict = verify_opb(&inst, &Tolerances::default());
                assert!(verdict.passed(), "{} seed {seed}: {verdict:?}", opm.name);
                assert_eq!(verdict.rank, 1 << opm.parties);
            }
        }
    }

    #[test]
    fn degenerate_assignment_still_verifies() {
        let opm = expanded("M31");
        let mut params = sample_params(&opm, 2);
        params.set("s2", FamilyParam::degenerate(false));
        let inst = realize(&opm, &params).unwrap();
        assert!(verify_opb(&inst, &Tolerances::default()).passed());
    }

    #[test]
    fn global_phase_leaves_gram_magnitudes_unchanged() {
        let opm = expanded("M2");
        let params = sample_params(&opm, 8);
        let inst = realize(&opm, &params).unwrap();
        let g0 = gram(&inst);
        // multiply one family's pair by unit phases
        let mut phased = inst.clone();
        let phase = C64::from_polar(1.0, 0.77);
        for state in &mut phased.states {
            state.parts[1] *= phase;
        }
        let g1 = gram(&phased);
        for s in 0..4 {
            for t in 0..4 {
                assert!((g0[(s, t)].norm() - g1[(s, t)].norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = realize_seeded(&expanded("M32"), 4).unwrap();
        let back = OpbInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back.dims, inst.dims);
        assert_eq!(back.states.len(), inst.states.len());
        for (a, b) in back.states.iter().zip(inst.states.iter()) {
            for (pa, pb) in a.parts.iter().zip(b.parts.iter()) {
                assert!((pa - pb).norm() < 1e-15);
            }
        }
    }
}
