//! Full-diversity rank criteria for PIC and PIC-SIC group decoding.
//!
//! For every group `k`, every nonzero difference `a_k` of the group's signal
//! set and every real interference vector `u`, the matrix
//! `X_{I_k}(a_k) + X_{J_k}(u)` must have rank `N`, where `J_k` is the
//! complement of `I_k` (PIC) or the union of the groups after `k` (PIC-SIC).
//!
//! The quantifier over `u` is continuous, so two tools are provided:
//!
//! - [`falsify_pic`] / [`falsify_picsic`] search for a counterexample. A
//!   returned [`RankWitness`] is a proof of failure; `None` proves nothing.
//! - [`certify_section3`] / [`certify_section4`] check the conditions under
//!   which the layered constructions are full-diversity by structure: the
//!   rotation makes every coordinate of a nonzero group difference nonzero,
//!   and the code places those coordinates where they force a full-rank
//!   triangular (or Alamouti block-triangular) `N x N` submatrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{build, CodeSpec, Family, GroupingVariant};
use crate::lindesign::{Design, GroupingScheme};
use crate::rotations::{certify_rotation, RotationMatrix};
use crate::{CMatrix, Result, StbcError, C64, RANK_EPS};

/// Difference sets larger than this are sampled instead of enumerated.
pub const ENUMERATION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionMode {
    Pic,
    Picsic,
}

impl std::str::FromStr for CriterionMode {
    type Err = StbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pic" => Ok(CriterionMode::Pic),
            "picsic" => Ok(CriterionMode::Picsic),
            other => Err(StbcError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Search effort for the falsifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalsifyBudget {
    /// `sqrt(M)`; differences are `2·{-(L-1)..L-1}` per coordinate.
    pub pam_levels: usize,
    /// Random interference vectors per difference vector, on top of the
    /// deterministic probes `u = 0` and `u = ±e_j`.
    pub trials_per_group: usize,
    pub seed: u64,
    pub enumeration_cap: usize,
}

impl FalsifyBudget {
    pub fn new(pam_levels: usize, trials_per_group: usize, seed: u64) -> Self {
        Self { pam_levels, trials_per_group, seed, enumeration_cap: ENUMERATION_CAP }
    }
}

/// A counterexample to the rank criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankWitness {
    /// 1-based group index.
    pub group: usize,
    /// Group difference vector (integer PAM units).
    pub a: Vec<f64>,
    /// Interference coefficients, aligned with `interference`.
    pub u: Vec<f64>,
    /// 1-based symbol indices the interference acts on.
    pub interference: Vec<usize>,
    pub rank: usize,
    pub sigma_min: f64,
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Count of singular values above `eps_rel` times the largest.
pub fn numerical_rank(m: &CMatrix, eps_rel: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&max) if max > 0.0 => sv.iter().filter(|&&s| s > eps_rel * max).count(),
        _ => 0,
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic seed for a tuple of indices.
pub(crate) fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x243f_6a88_85a3_08d3, |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Per-coordinate difference values in search order: 0, 2, -2, 4, -4, ...
fn coordinate_values(pam_levels: usize) -> Vec<f64> {
    let mut v = vec![0.0];
    for d in 1..pam_levels {
        let s = 2.0 * d as f64;
        v.push(s);
        v.push(-s);
    }
    v
}

/// Nonzero group differences: exhaustive (first coordinate fastest) when the
/// set fits under the cap, otherwise `cap` uniform samples.
fn difference_vectors(len: usize, budget: &FalsifyBudget, group: usize) -> Vec<Vec<f64>> {
    let values = coordinate_values(budget.pam_levels);
    let base = values.len();
    let total = (base as u128).checked_pow(len as u32).map(|t| t - 1);
    match total {
        Some(t) if t <= budget.enumeration_cap as u128 => {
            let mut out = Vec::with_capacity(t as usize);
            let mut idx = vec![0usize; len];
            loop {
                let mut pos = 0;
                while pos < len {
                    idx[pos] += 1;
                    if idx[pos] < base {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    return out;
                }
                out.push(idx.iter().map(|&i| values[i]).collect());
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[budget.seed, group as u64, u64::MAX]));
            let mut out = Vec::with_capacity(budget.enumeration_cap);
            while out.len() < budget.enumeration_cap {
                let v: Vec<f64> = (0..len).map(|_| values[rng.random_range(0..base)]).collect();
                if v.iter().any(|&x| x != 0.0) {
                    out.push(v);
                }
            }
            out
        }
    }
}

fn interference_set(scheme: &GroupingScheme, k: usize, mode: CriterionMode) -> Vec<usize> {
    match mode {
        CriterionMode::Pic => scheme.complement(k),
        CriterionMode::Picsic => scheme.later(k),
    }
}

fn search_group(
    design: &Design,
    scheme: &GroupingScheme,
    k: usize,
    mode: CriterionMode,
    budget: &FalsifyBudget,
) -> Option<RankWitness> {
    let n = design.antennas();
    let group = scheme.group(k);
    let others = interference_set(scheme, k, mode);
    let weights = design.weights();
    for (ai, a) in difference_vectors(group.len(), budget, k).into_iter().enumerate() {
        let base = design.combine_subset(group, &a).expect("group indices are valid");
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[budget.seed, k as u64, ai as u64]));
        let probes = if others.is_empty() { 1 } else { 1 + 2 * others.len() + budget.trials_per_group };
        let mut u = vec![0.0; others.len()];
        for t in 0..probes {
            u.iter_mut().for_each(|v| *v = 0.0);
            if t >= 1 && t <= 2 * others.len() {
                u[(t - 1) / 2] = if t % 2 == 1 { 1.0 } else { -1.0 };
            } else if t > 2 * others.len() {
                u.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            }
            let mut m = base.clone();
            for (&j, &c) in others.iter().zip(&u) {
                if c != 0.0 {
                    m.zip_apply(&weights[j], |o, w| *o += w * c);
                }
            }
            let sv = singular_values(&m);
            let max = sv.first().copied().unwrap_or(0.0);
            let rank = if max > 0.0 { sv.iter().filter(|&&s| s > RANK_EPS * max).count() } else { 0 };
            if rank < n {
                return Some(RankWitness {
                    group: k + 1,
                    a,
                    u: u.clone(),
                    interference: others.iter().map(|j| j + 1).collect(),
                    rank,
                    sigma_min: sv.get(n - 1).copied().unwrap_or(0.0),
                });
            }
        }
    }
    None
}

/// Searches for a violation of the rank criterion. The lowest group index
/// with a witness wins, so the result does not depend on scheduling.
pub fn falsify(design: &Design, scheme: &GroupingScheme, mode: CriterionMode, budget: &FalsifyBudget) -> Option<RankWitness> {
    (0..scheme.num_groups())
        .into_par_iter()
        .map(|k| search_group(design, scheme, k, mode, budget))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}

/// Randomized falsifier for the PIC criterion (interference from every
/// other group). `None` means no witness was found within the budget.
pub fn falsify_pic(design: &Design, scheme: &GroupingScheme, budget: &FalsifyBudget) -> Option<RankWitness> {
    falsify(design, scheme, CriterionMode::Pic, budget)
}

/// Randomized falsifier for the PIC-SIC criterion (interference from later
/// groups only).
pub fn falsify_picsic(design: &Design, scheme: &GroupingScheme, budget: &FalsifyBudget) -> Option<RankWitness> {
    falsify(design, scheme, CriterionMode::Picsic, budget)
}

/// Recomputes a witness matrix from scratch and returns its singular values.
pub fn witness_singular_values(design: &Design, scheme: &GroupingScheme, w: &RankWitness) -> Result<Vec<f64>> {
    if w.group == 0 || w.group > scheme.num_groups() {
        return Err(StbcError::InvalidGrouping(format!("witness group {} out of range", w.group)));
    }
    let group = scheme.group(w.group - 1);
    let others: Vec<usize> = w.interference.iter().map(|j| j - 1).collect();
    let m = design.combine_subset(group, &w.a)? + design.combine_subset(&others, &w.u)?;
    Ok(singular_values(&m))
}

/// Whether the structural argument covers PIC (not only PIC-SIC) decoding:
/// one or two layers, or the single-symbol-group diagonal codes.
pub fn pic_structurally_covered(spec: &CodeSpec) -> bool {
    spec.layers <= 2 || (spec.family == Family::LayeredDiagonal && spec.lambda == 1)
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-12
}

/// Each weight matrix must equal the expected placement exactly.
fn placement_matches<F>(design: &Design, expected: F) -> bool
where
    F: Fn(usize, &mut CMatrix),
{
    let (t, n) = (design.delay(), design.antennas());
    design.weights().iter().enumerate().all(|(i, a)| {
        let mut want = CMatrix::zeros(t, n);
        expected(i, &mut want);
        a.iter().zip(want.iter()).all(|(&x, &y)| close(x, y))
    })
}

fn rotation_passes(q: &RotationMatrix, spec: &CodeSpec, pam_levels: usize) -> Result<bool> {
    if q.dimension() != spec.lambda {
        return Err(StbcError::Dimension(format!("rotation has dimension {}, code needs λ = {}", q.dimension(), spec.lambda)));
    }
    Ok(certify_rotation(q.entries(), pam_levels.saturating_sub(1).max(1) as i64).pass)
}

/// Structural PIC-SIC full-diversity check for a layered diagonal code.
///
/// True iff `Q` passes the nonzero-coordinate certificate over the PAM
/// difference range and every weight matrix sits exactly on its layer
/// diagonal `(m + j, j)` with coefficient `Q[j mod λ, p]` (times `i` for the
/// imaginary group of the layer). Together these make the `N` rows starting
/// at the first nonzero layer lower triangular with a nonzero diagonal.
pub fn certify_section3(spec: &CodeSpec, q: &RotationMatrix, pam_levels: usize) -> Result<bool> {
    if spec.family != Family::LayeredDiagonal {
        return Err(StbcError::Config("certify_section3 needs a sec3 code".into()));
    }
    if !rotation_passes(q, spec, pam_levels)? {
        return Ok(false);
    }
    let code = build(*spec, q)?;
    let lambda = spec.lambda;
    let e = q.entries();
    Ok(placement_matches(&code.design, |i, want| {
        let k = i / lambda;
        let p = i % lambda;
        let (m, unit) = (k / 2, if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) });
        for j in 0..spec.antennas {
            want[(m + j, j)] = unit * e[(j % lambda, p)];
        }
    }))
}

/// Structural PIC-SIC full-diversity check for a layered Alamouti code with
/// the fine grouping: the rotation certificate plus exact Alamouti block
/// placement, which makes the leading `N x N` block of the first nonzero
/// layer block-triangular with determinant `Π (sum of four squares) > 0`.
///
/// The coarse grouping is rejected: its groups are unions of fine groups, so
/// the fine certificate already implies it.
pub fn certify_section4(spec: &CodeSpec, q: &RotationMatrix, pam_levels: usize) -> Result<bool> {
    if spec.family != Family::LayeredAlamouti {
        return Err(StbcError::Config("certify_section4 needs a sec4 code".into()));
    }
    if spec.variant == GroupingVariant::Coarse {
        return Err(StbcError::Config("certify_section4 covers the fine grouping only".into()));
    }
    if !rotation_passes(q, spec, pam_levels)? {
        return Ok(false);
    }
    let code = build(*spec, q)?;
    let lambda = spec.lambda;
    let e = q.entries();
    let (one, i1) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    Ok(placement_matches(&code.design, |i, want| {
        let k = i / lambda;
        let p = i % lambda;
        let (m, role) = (k / 4, k % 4);
        for l in 0..lambda {
            let v = e[(l, p)];
            let (r, c) = (2 * (m + l), 2 * l);
            let block = match role {
                0 => [[one, 0.0 * one], [0.0 * one, one]],
                1 => [[i1, 0.0 * one], [0.0 * one, -i1]],
                2 => [[0.0 * one, one], [-one, 0.0 * one]],
                _ => [[0.0 * one, i1], [i1, 0.0 * one]],
            };
            for dr in 0..2 {
                for dc in 0..2 {
                    want[(r + dr, c + dc)] = block[dr][dc] * v;
                }
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_section3, build_section4};
    use crate::lindesign::cmatrix;
    use crate::rotations::build_rotation;

    #[test]
    fn rank_basics() {
        assert_eq!(numerical_rank(&CMatrix::identity(3, 3), RANK_EPS), 3);
        assert_eq!(numerical_rank(&CMatrix::zeros(4, 2), RANK_EPS), 0);
        let z = (0.0, 0.0);
        let d = cmatrix(2, 2, &[(1.0, 0.0), z, z, (1e-15, 0.0)]);
        assert_eq!(numerical_rank(&d, 1e-9), 1);
    }

    #[test]
    fn difference_enumeration() {
        let b = FalsifyBudget::new(4, 0, 1);
        let v = difference_vectors(2, &b, 0);
        assert_eq!(v.len(), 48);
        assert_eq!(v[0], vec![2.0, 0.0]);
        let v4 = difference_vectors(4, &b, 0);
        assert_eq!(v4.len(), 2400);
        let small = FalsifyBudget { enumeration_cap: 10, ..b };
        let s = difference_vectors(2, &small, 0);
        assert_eq!(s.len(), 10);
        assert!(s.iter().all(|a| a.iter().any(|&x| x != 0.0)));
    }

    #[test]
    fn broken_diagonal_code_has_witness() {
        let code = build_section3(2, 2, 1, &RotationMatrix::identity(2)).unwrap();
        let b = FalsifyBudget::new(4, 10, 7);
        for mode in [CriterionMode::Pic, CriterionMode::Picsic] {
            let w = falsify(&code.design, &code.grouping, mode, &b).expect("witness");
            assert_eq!(w.group, 1);
            assert_eq!(w.a, vec![2.0, 0.0]);
            assert!(w.u.iter().all(|&x| x == 0.0));
            assert_eq!(w.rank, 1);
            let sv = witness_singular_values(&code.design, &code.grouping, &w).unwrap();
            assert!(sv[1] <= RANK_EPS * sv[0]);
        }
    }

    #[test]
    fn single_group_reduces_to_ml_criterion() {
        let code = build_section4(2, 1, &build_rotation(1).unwrap(), GroupingVariant::Fine).unwrap();
        let single = GroupingScheme::single(4).unwrap();
        let b = FalsifyBudget::new(4, 100, 3);
        assert!(falsify_pic(&code.design, &single, &b).is_none());
        assert!(falsify_picsic(&code.design, &single, &b).is_none());
    }

    #[test]
    fn certified_codes_survive_small_budget() {
        let code = build_section3(3, 2, 2, &build_rotation(2).unwrap()).unwrap();
        let b = FalsifyBudget::new(4, 50, 11);
        assert!(falsify_picsic(&code.design, &code.grouping, &b).is_none());
        assert!(falsify_pic(&code.design, &code.grouping, &b).is_none());
    }

    #[test]
    fn structural_certificates() {
        let q2 = build_rotation(2).unwrap();
        assert!(certify_section3(&CodeSpec::section3(3, 2, 4).unwrap(), &q2, 4).unwrap());
        assert!(!certify_section3(&CodeSpec::section3(3, 2, 4).unwrap(), &RotationMatrix::identity(2), 4).unwrap());
        let q1 = build_rotation(1).unwrap();
        for n in 1..=5 {
            assert!(certify_section3(&CodeSpec::section3(n, 1, 3).unwrap(), &q1, 4).unwrap());
        }
        let fine = CodeSpec::section4(4, 2, GroupingVariant::Fine).unwrap();
        assert!(certify_section4(&fine, &q2, 4).unwrap());
        assert!(!certify_section4(&fine, &RotationMatrix::identity(2), 4).unwrap());
        assert!(certify_section4(&CodeSpec::section4(2, 1, GroupingVariant::Fine).unwrap(), &q1, 4).unwrap());
        let coarse = CodeSpec::section4(4, 2, GroupingVariant::Coarse).unwrap();
        assert!(certify_section4(&coarse, &q2, 4).is_err());
        assert!(certify_section3(&fine, &q2, 4).is_err());
        assert!(certify_section3(&CodeSpec::section3(3, 2, 4).unwrap(), &q1, 4).is_err());
    }

    #[test]
    fn seeds_are_deterministic_and_spread() {
        assert_eq!(derive_seed(&[1, 2, 3]), derive_seed(&[1, 2, 3]));
        assert_ne!(derive_seed(&[1, 2, 3]), derive_seed(&[1, 3, 2]));
        assert_ne!(derive_seed(&[0, 0]), derive_seed(&[0, 1]));
    }
}
