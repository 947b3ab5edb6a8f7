//! Group decoders over the real equivalent channel `y = √snr·G·x + w`.
//!
//! - [`ml_decode`]: joint search over every symbol.
//! - [`zf_decode`]: pseudo-inverse followed by per-symbol slicing.
//! - [`pic_decode`]: each group is decoded after projecting `y` onto the
//!   orthogonal complement of every other group's columns.
//! - [`picsic_decode`]: groups are decoded in order; only later groups are
//!   projected out and each decision is subtracted before the next group.
//!
//! The per-group search runs either exhaustively or *conditioned*: the
//! first symbol of the group is solved in closed form (scale, round, clamp)
//! for every combination of the others.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::channel::PamAlphabet;
use crate::lindesign::GroupingScheme;
use crate::{RMatrix, RVector, Result, StbcError, RANK_EPS};

/// Default cap on the ML search space.
pub const ML_CANDIDATE_CAP: u128 = 1 << 22;

/// Pivot columns with smaller norm make the conditioned search fall back to
/// exhaustive.
const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    #[default]
    Conditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Ml,
    Zf,
    Pic,
    Picsic,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Ml => "ml",
            DecoderKind::Zf => "zf",
            DecoderKind::Pic => "pic",
            DecoderKind::Picsic => "picsic",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = StbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(DecoderKind::Ml),
            "zf" => Ok(DecoderKind::Zf),
            "pic" => Ok(DecoderKind::Pic),
            "picsic" => Ok(DecoderKind::Picsic),
            other => Err(StbcError::Config(format!("unknown decoder `{other}`"))),
        }
    }
}

impl FromStr for SearchMode {
    type Err = StbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "conditioned" => Ok(SearchMode::Conditioned),
            other => Err(StbcError::Config(format!("unknown search mode `{other}`"))),
        }
    }
}

/// Everything a decoder needs for one received block.
#[derive(Debug, Clone)]
pub struct DecodeProblem<'a> {
    pub y: RVector,
    pub g: RMatrix,
    pub scheme: &'a GroupingScheme,
    /// One alphabet per real symbol.
    pub alphabets: &'a [PamAlphabet],
    pub snr: f64,
}

impl<'a> DecodeProblem<'a> {
    pub fn new(
        y: RVector,
        g: RMatrix,
        scheme: &'a GroupingScheme,
        alphabets: &'a [PamAlphabet],
        snr: f64,
    ) -> Result<Self> {
        if y.len() != g.nrows() {
            return Err(StbcError::Dimension(format!("y has {} entries, G has {} rows", y.len(), g.nrows())));
        }
        let k = g.ncols();
        if scheme.num_symbols() != k || alphabets.len() != k {
            return Err(StbcError::Dimension(format!(
                "G has {k} columns, grouping covers {}, {} alphabets",
                scheme.num_symbols(),
                alphabets.len()
            )));
        }
        if !(snr >= 0.0) {
            return Err(StbcError::Config(format!("snr must be non-negative, got {snr}")));
        }
        Ok(Self { y, g, scheme, alphabets, snr })
    }

    fn group_alphabets(&self, k: usize) -> Vec<&PamAlphabet> {
        self.scheme.group(k).iter().map(|&i| &self.alphabets[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Decided symbol values in the design's index order.
    pub symbols: Vec<f64>,
    /// Alphabet level index of each decision.
    pub levels: Vec<usize>,
    pub candidate_evaluations: u64,
    pub per_group_counts: Vec<u64>,
}

/// Decision for a single group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDecision {
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    pub evaluations: u64,
}

/// Orthonormal basis grown one column at a time by twice-iterated
/// Gram-Schmidt. A column is dropped when its residual falls below
/// [`RANK_EPS`] times the largest column norm offered so far.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<RVector>,
    max_norm: f64,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        Self { dim, vectors: Vec::new(), max_norm: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[RVector] {
        &self.vectors
    }

    /// Adds `v` if it is numerically independent of the current basis.
    pub fn push<S>(&mut self, v: &nalgebra::Matrix<f64, nalgebra::Dyn, nalgebra::U1, S>) -> bool
    where
        S: nalgebra::storage::Storage<f64, nalgebra::Dyn, nalgebra::U1>,
    {
        debug_assert_eq!(v.len(), self.dim);
        let norm = v.norm();
        self.max_norm = self.max_norm.max(norm);
        if norm == 0.0 {
            return false;
        }
        let mut r = v.clone_owned();
        for _ in 0..2 {
            for u in &self.vectors {
                let c = u.dot(&r);
                r.axpy(-c, u, 1.0);
            }
        }
        let rn = r.norm();
        if rn <= RANK_EPS * self.max_norm {
            return false;
        }
        r /= rn;
        self.vectors.push(r);
        true
    }

    /// `v` with its components along the first `count` basis vectors removed.
    pub fn project_out_prefix(&self, v: &RVector, count: usize) -> RVector {
        let mut r = v.clone();
        for u in &self.vectors[..count] {
            let c = u.dot(&r);
            r.axpy(-c, u, 1.0);
        }
        r
    }

    pub fn project_out(&self, v: &RVector) -> RVector {
        self.project_out_prefix(v, self.vectors.len())
    }
}

/// `P = I - U Uᵀ`, the projector onto the orthogonal complement of the
/// column space of `b`. An empty `b` gives the identity.
pub fn complement_projector(b: &RMatrix) -> RMatrix {
    let dim = b.nrows();
    let mut basis = OrthoBasis::new(dim);
    for c in 0..b.ncols() {
        basis.push(&b.column(c));
    }
    let mut p = RMatrix::identity(dim, dim);
    for u in basis.vectors() {
        p -= u * u.transpose();
    }
    p
}

/// Scaled group columns laid out for fast metric evaluation.
struct GroupSearch<'a> {
    py: &'a [f64],
    rows: usize,
    /// Column-major `√snr · PG_k`.
    cols: Vec<f64>,
    alphabets: &'a [&'a PamAlphabet],
}

impl GroupSearch<'_> {
    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.rows..(j + 1) * self.rows]
    }

    /// `‖Py - √snr·PG_k·x‖²`, summed in a fixed order so that both search
    /// modes score a candidate identically.
    fn metric(&self, levels: &[usize]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            let mut e = self.py[r];
            for (j, &l) in levels.iter().enumerate() {
                e -= self.cols[j * self.rows + r] * self.alphabets[j].level(l);
            }
            acc += e * e;
        }
        acc
    }

    fn exhaustive(&self) -> (Vec<usize>, u64) {
        let n = self.alphabets.len();
        let mut idx = vec![0usize; n];
        let mut best = idx.clone();
        let mut best_metric = f64::INFINITY;
        let mut count = 0u64;
        loop {
            let m = self.metric(&idx);
            count += 1;
            // lexicographic enumeration: strict `<` keeps the earliest tie
            if m < best_metric {
                best_metric = m;
                best.copy_from_slice(&idx);
            }
            if !advance(&mut idx, self.alphabets, 0) {
                return (best, count);
            }
        }
    }

    fn conditioned(&self) -> (Vec<usize>, u64) {
        let n = self.alphabets.len();
        let pivot = self.col(0);
        let pivot_energy: f64 = pivot.iter().map(|v| v * v).sum();
        if pivot_energy.sqrt() < PIVOT_EPS {
            return self.exhaustive();
        }
        let mut idx = vec![0usize; n];
        let mut best = idx.clone();
        let mut best_metric = f64::INFINITY;
        let mut count = 0u64;
        let mut resid = vec![0.0; self.rows];
        loop {
            resid.copy_from_slice(self.py);
            for j in 1..n {
                let x = self.alphabets[j].level(idx[j]);
                for (r, v) in resid.iter_mut().enumerate() {
                    *v -= self.cols[j * self.rows + r] * x;
                }
            }
            let proj: f64 = pivot.iter().zip(&resid).map(|(a, b)| a * b).sum();
            idx[0] = self.alphabets[0].nearest_index(proj / pivot_energy);
            let m = self.metric(&idx);
            count += 1;
            if m < best_metric || (m == best_metric && idx < best) {
                best_metric = m;
                best.copy_from_slice(&idx);
            }
            if !advance(&mut idx, self.alphabets, 1) {
                return (best, count);
            }
        }
    }
}

/// Odometer over `idx[from..]`, last position fastest. Returns false after
/// the final combination.
fn advance(idx: &mut [usize], alphabets: &[&PamAlphabet], from: usize) -> bool {
    for pos in (from..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < alphabets[pos].len() {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

/// Jointly decodes one group from projected observations.
///
/// `pg` holds the projected (unscaled) group columns; the hypothesis is
/// scaled by `√snr` inside the metric. Both modes return the same argmin;
/// ties go to the lexicographically smallest level-index tuple.
pub fn group_joint_decode(
    py: &RVector,
    pg: &RMatrix,
    alphabets: &[&PamAlphabet],
    snr: f64,
    mode: SearchMode,
) -> Result<GroupDecision> {
    if pg.ncols() != alphabets.len() || pg.nrows() != py.len() || alphabets.is_empty() {
        return Err(StbcError::Dimension(format!(
            "group columns {:?}, {} alphabets, {} observations",
            pg.shape(),
            alphabets.len(),
            py.len()
        )));
    }
    let s = snr.sqrt();
    let search = GroupSearch {
        py: py.as_slice(),
        rows: pg.nrows(),
        cols: pg.iter().map(|v| v * s).collect(),
        alphabets,
    };
    let (levels, evaluations) = match mode {
        SearchMode::Exhaustive => search.exhaustive(),
        SearchMode::Conditioned => search.conditioned(),
    };
    let values = levels.iter().zip(alphabets).map(|(&l, a)| a.level(l)).collect();
    Ok(GroupDecision { levels, values, evaluations })
}

fn group_columns(g: &RMatrix, idx: &[usize]) -> RMatrix {
    RMatrix::from_fn(g.nrows(), idx.len(), |r, c| g[(r, idx[c])])
}

fn project_columns(basis: &OrthoBasis, count: usize, cols: &RMatrix) -> RMatrix {
    if count == 0 {
        return cols.clone();
    }
    let mut out = cols.clone();
    for c in 0..cols.ncols() {
        let v = basis.project_out_prefix(&cols.column(c).into_owned(), count);
        out.set_column(c, &v);
    }
    out
}

struct Assembler {
    symbols: Vec<f64>,
    levels: Vec<usize>,
    per_group: Vec<u64>,
}

impl Assembler {
    fn new(k: usize) -> Self {
        Self { symbols: vec![0.0; k], levels: vec![0; k], per_group: Vec::new() }
    }

    fn record(&mut self, idx: &[usize], d: &GroupDecision) {
        for (pos, &i) in idx.iter().enumerate() {
            self.symbols[i] = d.values[pos];
            self.levels[i] = d.levels[pos];
        }
        self.per_group.push(d.evaluations);
    }

    fn finish(self) -> DecodeResult {
        DecodeResult {
            candidate_evaluations: self.per_group.iter().sum(),
            symbols: self.symbols,
            levels: self.levels,
            per_group_counts: self.per_group,
        }
    }
}

/// PIC: every group is decoded independently after projecting out the
/// columns of all other groups.
pub fn pic_decode(p: &DecodeProblem<'_>, mode: SearchMode) -> Result<DecodeResult> {
    let k_total = p.g.ncols();
    let mut out = Assembler::new(k_total);
    let mut in_group = vec![false; k_total];
    for k in 0..p.scheme.num_groups() {
        let idx = p.scheme.group(k);
        in_group.iter_mut().for_each(|b| *b = false);
        idx.iter().for_each(|&i| in_group[i] = true);
        let mut basis = OrthoBasis::new(p.g.nrows());
        for j in (0..k_total).filter(|&j| !in_group[j]) {
            basis.push(&p.g.column(j));
        }
        let count = basis.len();
        let py = if count == 0 { p.y.clone() } else { basis.project_out(&p.y) };
        let pg = project_columns(&basis, count, &group_columns(&p.g, idx));
        let d = group_joint_decode(&py, &pg, &p.group_alphabets(k), p.snr, mode)?;
        out.record(idx, &d);
    }
    Ok(out.finish())
}

/// PIC-SIC; also returns the residual `y_{g+1}` left after the last
/// cancellation step.
pub fn picsic_decode_with_residual(p: &DecodeProblem<'_>, mode: SearchMode) -> Result<(DecodeResult, RVector)> {
    let g = p.scheme.num_groups();
    // One basis grown from the last group backwards: its first prefix[k]
    // vectors span the columns of every group after k.
    let mut basis = OrthoBasis::new(p.g.nrows());
    let mut prefix = vec![0; g];
    for k in (0..g).rev() {
        prefix[k] = basis.len();
        for &j in p.scheme.group(k) {
            basis.push(&p.g.column(j));
        }
    }
    let mut out = Assembler::new(p.g.ncols());
    let mut y = p.y.clone();
    let s = p.snr.sqrt();
    for k in 0..g {
        let idx = p.scheme.group(k);
        let cols = group_columns(&p.g, idx);
        let py = if prefix[k] == 0 { y.clone() } else { basis.project_out_prefix(&y, prefix[k]) };
        let pg = project_columns(&basis, prefix[k], &cols);
        let d = group_joint_decode(&py, &pg, &p.group_alphabets(k), p.snr, mode)?;
        for (c, &v) in d.values.iter().enumerate() {
            y.axpy(-s * v, &cols.column(c), 1.0);
        }
        out.record(idx, &d);
    }
    Ok((out.finish(), y))
}

/// PIC-SIC: groups decoded in order with successive cancellation.
pub fn picsic_decode(p: &DecodeProblem<'_>, mode: SearchMode) -> Result<DecodeResult> {
    picsic_decode_with_residual(p, mode).map(|(r, _)| r)
}

/// Exhaustive joint ML search; refuses search spaces above `cap`.
pub fn ml_decode_with_cap(p: &DecodeProblem<'_>, cap: u128) -> Result<DecodeResult> {
    let size: u128 = p.alphabets.iter().map(|a| a.len() as u128).try_fold(1u128, |acc, l| acc.checked_mul(l)).unwrap_or(u128::MAX);
    if size > cap {
        return Err(StbcError::SearchSpaceTooLarge { size, cap });
    }
    let all: Vec<usize> = (0..p.g.ncols()).collect();
    let alph: Vec<&PamAlphabet> = p.alphabets.iter().collect();
    let d = group_joint_decode(&p.y, &p.g, &alph, p.snr, SearchMode::Exhaustive)?;
    let mut out = Assembler::new(all.len());
    out.record(&all, &d);
    Ok(out.finish())
}

pub fn ml_decode(p: &DecodeProblem<'_>) -> Result<DecodeResult> {
    ml_decode_with_cap(p, ML_CANDIDATE_CAP)
}

/// Zero-forcing: `pinv(√snr·G)·y`, then nearest level per symbol. Rank
/// deficient channels use the truncated pseudo-inverse. Each symbol counts
/// as one evaluation.
pub fn zf_decode(p: &DecodeProblem<'_>) -> Result<DecodeResult> {
    let k = p.g.ncols();
    let a = &p.g * p.snr.sqrt();
    let svd = a.svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let x = if max == 0.0 {
        RVector::zeros(k)
    } else {
        let pinv = svd
            .pseudo_inverse(RANK_EPS * max)
            .map_err(|e| StbcError::Dimension(e.to_string()))?;
        pinv * &p.y
    };
    let mut out = DecodeResult {
        symbols: vec![0.0; k],
        levels: vec![0; k],
        candidate_evaluations: k as u64,
        per_group_counts: vec![1; k],
    };
    for i in 0..k {
        let l = p.alphabets[i].nearest_index(x[i]);
        out.levels[i] = l;
        out.symbols[i] = p.alphabets[i].level(l);
    }
    Ok(out)
}

/// Dispatches on the decoder name. `mode` is ignored by ML and ZF.
pub fn decode(kind: DecoderKind, mode: SearchMode, p: &DecodeProblem<'_>) -> Result<DecodeResult> {
    match kind {
        DecoderKind::Ml => ml_decode(p),
        DecoderKind::Zf => zf_decode(p),
        DecoderKind::Pic => pic_decode(p, mode),
        DecoderKind::Picsic => picsic_decode(p, mode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_link, transmit};
    use crate::constructions::{build_section3, build_section4, GroupingVariant};
    use crate::lindesign::vec_tilde;
    use crate::rotations::build_rotation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> RMatrix {
        RMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn projector_small_cases() {
        assert_eq!(complement_projector(&RMatrix::zeros(3, 0)), RMatrix::identity(3, 3));
        let e1 = RMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let p = complement_projector(&e1);
        assert!((p - RMatrix::from_diagonal(&RVector::from_vec(vec![0.0, 1.0, 1.0]))).amax() < 1e-15);
    }

    #[test]
    fn projector_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for cols in [1, 3, 5, 8] {
            let mut b = random_matrix(&mut rng, 8, cols);
            if cols == 5 {
                // a dependent column must not add rank
                let dep = b.column(0) * 2.0 - b.column(1);
                b.set_column(4, &dep);
            }
            let p = complement_projector(&b);
            assert!((&p * &p - &p).amax() <= 1e-9);
            assert!((&p - p.transpose()).amax() <= 1e-12);
            assert!((&p * &b).norm() <= 1e-9 * b.norm());
        }
        let mut b = random_matrix(&mut rng, 6, 3);
        let dep = b.column(0) + b.column(1);
        b.set_column(2, &dep);
        let p = complement_projector(&b);
        assert!((p.trace() - 4.0).abs() < 1e-9);
    }

    fn alph(m: usize, n: usize) -> Vec<PamAlphabet> {
        vec![PamAlphabet::new(m).unwrap(); n]
    }

    #[test]
    fn single_symbol_conditioned_is_one_evaluation() {
        let a = alph(16, 1);
        let refs: Vec<&PamAlphabet> = a.iter().collect();
        let pg = RMatrix::from_column_slice(3, 1, &[1.0, 2.0, -1.0]);
        let py = RVector::from_vec(vec![0.4, 0.8, -0.4]);
        let d = group_joint_decode(&py, &pg, &refs, 1.0, SearchMode::Conditioned).unwrap();
        assert_eq!(d.evaluations, 1);
        let e = group_joint_decode(&py, &pg, &refs, 1.0, SearchMode::Exhaustive).unwrap();
        assert_eq!(e.evaluations, 4);
        assert_eq!(d.levels, e.levels);
    }

    #[test]
    fn noiseless_group_recovery_and_mode_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in [4, 16] {
            let a = alph(m, 3);
            let refs: Vec<&PamAlphabet> = a.iter().collect();
            for trial in 0..1000 {
                let pg = random_matrix(&mut rng, 6, 3);
                let lv: Vec<usize> = (0..3).map(|_| rng.random_range(0..a[0].len())).collect();
                let x = RVector::from_iterator(3, lv.iter().map(|&l| a[0].level(l)));
                let snr: f64 = 4.0;
                let mut py = &pg * &x * snr.sqrt();
                if trial % 2 == 1 {
                    for v in py.iter_mut() {
                        *v += rng.random_range(-1.0..1.0);
                    }
                }
                let ex = group_joint_decode(&py, &pg, &refs, snr, SearchMode::Exhaustive).unwrap();
                let co = group_joint_decode(&py, &pg, &refs, snr, SearchMode::Conditioned).unwrap();
                assert_eq!(ex.levels, co.levels, "M = {m}, trial {trial}");
                if trial % 2 == 0 {
                    assert_eq!(ex.levels, lv);
                }
                let l = a[0].len() as u64;
                assert_eq!(ex.evaluations, l * l * l);
                assert_eq!(co.evaluations, l * l);
            }
        }
    }

    #[test]
    fn degenerate_pivot_falls_back() {
        let a = alph(4, 2);
        let refs: Vec<&PamAlphabet> = a.iter().collect();
        let pg = RMatrix::from_column_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]);
        let py = RVector::from_vec(vec![0.7, 0.7]);
        let d = group_joint_decode(&py, &pg, &refs, 1.0, SearchMode::Conditioned).unwrap();
        assert_eq!(d.evaluations, 4);
        assert_eq!(d.levels, vec![0, 1]);
    }

    struct Instance {
        y: RVector,
        g: RMatrix,
        x_levels: Vec<usize>,
        snr: f64,
    }

    fn instance(code: &crate::constructions::Code, a: &PamAlphabet, snr_db: f64, noiseless: bool, rng: &mut ChaCha8Rng) -> Instance {
        let k = code.design.num_symbols();
        let lv: Vec<usize> = (0..k).map(|_| rng.random_range(0..a.len())).collect();
        let x: Vec<f64> = lv.iter().map(|&l| a.level(l)).collect();
        let mut link = sample_link(code.design.antennas(), 2, code.design.delay(), snr_db, rng);
        if noiseless {
            link.w.fill(crate::C64::new(0.0, 0.0));
        }
        let y = vec_tilde(&transmit(&code.design.assemble(&x).unwrap(), &link).unwrap());
        let g = code.design.equivalent_channel(&link.h).unwrap();
        Instance { y, g, x_levels: lv, snr: link.snr }
    }

    #[test]
    fn noiseless_recovery_every_decoder() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let code = build_section3(2, 2, 2, &build_rotation(2).unwrap()).unwrap();
        let a = PamAlphabet::new(4).unwrap();
        let alphabets = vec![a.clone(); code.design.num_symbols()];
        for _ in 0..50 {
            let inst = instance(&code, &a, 10.0, true, &mut rng);
            let p = DecodeProblem::new(inst.y.clone(), inst.g.clone(), &code.grouping, &alphabets, inst.snr).unwrap();
            for kind in [DecoderKind::Ml, DecoderKind::Zf, DecoderKind::Pic, DecoderKind::Picsic] {
                for mode in [SearchMode::Exhaustive, SearchMode::Conditioned] {
                    assert_eq!(decode(kind, mode, &p).unwrap().levels, inst.x_levels, "{kind}");
                }
            }
            let (_, resid) = picsic_decode_with_residual(&p, SearchMode::Conditioned).unwrap();
            assert!(resid.norm() <= 1e-9 * (1.0 + inst.y.norm()));
        }
    }

    #[test]
    fn single_group_pic_equals_ml() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let code = build_section4(2, 1, &build_rotation(1).unwrap(), GroupingVariant::Fine).unwrap();
        let single = GroupingScheme::single(4).unwrap();
        let a = PamAlphabet::new(4).unwrap();
        let alphabets = vec![a.clone(); 4];
        for _ in 0..200 {
            let inst = instance(&code, &a, 3.0, false, &mut rng);
            let p = DecodeProblem::new(inst.y, inst.g, &single, &alphabets, inst.snr).unwrap();
            let ml = ml_decode(&p).unwrap();
            assert_eq!(ml.candidate_evaluations, 16);
            assert_eq!(pic_decode(&p, SearchMode::Exhaustive).unwrap().levels, ml.levels);
            assert_eq!(picsic_decode(&p, SearchMode::Exhaustive).unwrap().levels, ml.levels);
            // orthogonal equivalent channel: ML decouples, so ZF agrees
            assert_eq!(zf_decode(&p).unwrap().levels, ml.levels);
        }
    }

    #[test]
    fn ml_cap() {
        let code = build_section3(2, 2, 2, &build_rotation(2).unwrap()).unwrap();
        let a = vec![PamAlphabet::new(16).unwrap(); 8];
        let g = RMatrix::zeros(2 * code.design.delay(), 8);
        let p = DecodeProblem::new(RVector::zeros(g.nrows()), g, &code.grouping, &a, 1.0).unwrap();
        assert!(matches!(ml_decode_with_cap(&p, 1000), Err(StbcError::SearchSpaceTooLarge { size: 65536, .. })));
    }

    #[test]
    fn problem_validation() {
        let s = GroupingScheme::single(2).unwrap();
        let a = alph(4, 2);
        assert!(DecodeProblem::new(RVector::zeros(3), RMatrix::zeros(4, 2), &s, &a, 1.0).is_err());
        assert!(DecodeProblem::new(RVector::zeros(4), RMatrix::zeros(4, 3), &s, &a, 1.0).is_err());
        assert!(DecodeProblem::new(RVector::zeros(4), RMatrix::zeros(4, 2), &s, &a, -1.0).is_err());
    }

    #[test]
    fn zero_channel_does_not_abort() {
        let s = GroupingScheme::contiguous(4, 2).unwrap();
        let a = alph(4, 4);
        let p = DecodeProblem::new(RVector::zeros(4), RMatrix::zeros(4, 4), &s, &a, 1.0).unwrap();
        for kind in [DecoderKind::Ml, DecoderKind::Zf, DecoderKind::Pic, DecoderKind::Picsic] {
            let r = decode(kind, SearchMode::Conditioned, &p).unwrap();
            assert!(r.levels.iter().all(|&l| l < 2));
        }
    }

    #[test]
    fn decoder_names() {
        assert_eq!("picsic".parse::<DecoderKind>().unwrap(), DecoderKind::Picsic);
        assert!("mmse".parse::<DecoderKind>().is_err());
        assert_eq!("exhaustive".parse::<SearchMode>().unwrap(), SearchMode::Exhaustive);
    }
}
