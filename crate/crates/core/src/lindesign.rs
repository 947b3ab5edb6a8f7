//! Linear-dispersion designs `X = s · Σ x_i A_i` and the objects built on
//! them: the real equivalent channel, subset combinations used by the rank
//! criteria, and ordered grouping schemes.
//!
//! Real vectorization convention: `vec_tilde(A) = [vec(Re A); vec(Im A)]`
//! with column-major stacking inside each half.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, RMatrix, RVector, Result, StbcError, C64, RANK_EPS};

/// Stacks the real and imaginary parts of `a`, each column-major.
pub fn vec_tilde(a: &CMatrix) -> RVector {
    let len = a.len();
    let mut out = RVector::zeros(2 * len);
    for (i, z) in a.iter().enumerate() {
        out[i] = z.re;
        out[len + i] = z.im;
    }
    out
}

/// Inverse of [`vec_tilde`].
pub fn unvec_tilde(v: &RVector, rows: usize, cols: usize) -> Result<CMatrix> {
    let len = rows * cols;
    if v.len() != 2 * len {
        return Err(StbcError::Dimension(format!(
            "vector of length {} cannot hold a {rows}x{cols} complex matrix",
            v.len()
        )));
    }
    Ok(CMatrix::from_iterator(
        rows,
        cols,
        (0..len).map(|i| C64::new(v[i], v[len + i])),
    ))
}

/// Number of singular values above `eps_rel` times the largest one.
pub fn real_rank(m: &RMatrix, eps_rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > eps_rel * max).count()
}

/// A design in `K` real symbols with `T x N` complex weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    delay: usize,
    antennas: usize,
    weights: Vec<CMatrix>,
    power_scale: f64,
}

impl Design {
    /// Validates shapes, `power_scale > 0` and real linear independence of
    /// the weight matrices.
    pub fn new(delay: usize, antennas: usize, weights: Vec<CMatrix>, power_scale: f64) -> Result<Self> {
        if delay == 0 || antennas == 0 {
            return Err(StbcError::Dimension("delay and antennas must be positive".into()));
        }
        if weights.is_empty() {
            return Err(StbcError::RankDeficient { rank: 0, expected: 0 });
        }
        if let Some(bad) = weights.iter().position(|a| a.shape() != (delay, antennas)) {
            return Err(StbcError::Dimension(format!(
                "weight matrix {} is {:?}, expected {delay}x{antennas}",
                bad + 1,
                weights[bad].shape()
            )));
        }
        if !(power_scale > 0.0 && power_scale.is_finite()) {
            return Err(StbcError::Config(format!("power_scale must be positive, got {power_scale}")));
        }
        let k = weights.len();
        let rows = 2 * delay * antennas;
        if k > rows {
            return Err(StbcError::RankDeficient { rank: rows, expected: k });
        }
        let mut stacked = RMatrix::zeros(rows, k);
        for (i, a) in weights.iter().enumerate() {
            stacked.set_column(i, &vec_tilde(a));
        }
        let rank = real_rank(&stacked, RANK_EPS);
        if rank < k {
            return Err(StbcError::RankDeficient { rank, expected: k });
        }
        Ok(Self { delay, antennas, weights, power_scale })
    }

    pub fn num_symbols(&self) -> usize {
        self.weights.len()
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn weights(&self) -> &[CMatrix] {
        &self.weights
    }

    pub fn power_scale(&self) -> f64 {
        self.power_scale
    }

    /// Same weights, different scale.
    pub fn with_power_scale(&self, power_scale: f64) -> Result<Self> {
        if !(power_scale > 0.0 && power_scale.is_finite()) {
            return Err(StbcError::Config(format!("power_scale must be positive, got {power_scale}")));
        }
        Ok(Self { power_scale, ..self.clone() })
    }

    /// Rate in complex symbols per channel use, `K / 2T`.
    pub fn rate(&self) -> f64 {
        self.num_symbols() as f64 / (2.0 * self.delay as f64)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_symbols() {
            return Err(StbcError::Dimension(format!(
                "symbol vector has length {len}, design has K = {}",
                self.num_symbols()
            )));
        }
        Ok(())
    }

    /// The transmitted codeword `power_scale · Σ x_i A_i`.
    pub fn assemble(&self, x: &[f64]) -> Result<CMatrix> {
        self.check_len(x.len())?;
        let mut out = CMatrix::zeros(self.delay, self.antennas);
        for (a, &xi) in self.weights.iter().zip(x) {
            if xi != 0.0 {
                out.zip_apply(a, |o, w| *o += w * xi);
            }
        }
        Ok(out * C64::new(self.power_scale, 0.0))
    }

    /// Unscaled `X_Γ(u) = Σ u_i A_{j_i}` for the 0-based index set `indices`.
    /// The empty set gives the zero matrix.
    pub fn combine_subset(&self, indices: &[usize], u: &[f64]) -> Result<CMatrix> {
        if indices.len() != u.len() {
            return Err(StbcError::Dimension(format!(
                "{} indices but {} coefficients",
                indices.len(),
                u.len()
            )));
        }
        let mut out = CMatrix::zeros(self.delay, self.antennas);
        for (&j, &c) in indices.iter().zip(u) {
            let a = self
                .weights
                .get(j)
                .ok_or(StbcError::IndexOutOfRange { index: j + 1, k: self.num_symbols() })?;
            out.zip_apply(a, |o, w| *o += w * c);
        }
        Ok(out)
    }

    /// Real equivalent channel `G` with column `i` equal to
    /// `vec_tilde(power_scale · A_i · H)`, so that `vec_tilde(X H) = G x`.
    pub fn equivalent_channel(&self, h: &CMatrix) -> Result<RMatrix> {
        if h.nrows() != self.antennas {
            return Err(StbcError::Dimension(format!(
                "channel has {} rows, design has N = {}",
                h.nrows(),
                self.antennas
            )));
        }
        let rx = h.ncols();
        let half = self.delay * rx;
        let mut g = RMatrix::zeros(2 * half, self.num_symbols());
        let scale = self.power_scale;
        for (i, a) in self.weights.iter().enumerate() {
            let ah = a * h;
            let mut col = g.column_mut(i);
            for (r, z) in ah.iter().enumerate() {
                col[r] = scale * z.re;
                col[half + r] = scale * z.im;
            }
        }
        Ok(g)
    }

    pub fn to_doc(&self) -> DesignDoc {
        DesignDoc {
            k: self.num_symbols(),
            t: self.delay,
            n: self.antennas,
            power_scale: self.power_scale,
            matrices: self
                .weights
                .iter()
                .map(|a| {
                    (0..a.nrows())
                        .map(|r| (0..a.ncols()).map(|c| [a[(r, c)].re, a[(r, c)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &DesignDoc) -> Result<Self> {
        if doc.matrices.len() != doc.k {
            return Err(StbcError::Dimension(format!(
                "K = {} but {} matrices supplied",
                doc.k,
                doc.matrices.len()
            )));
        }
        let mut weights = Vec::with_capacity(doc.k);
        for (i, rows) in doc.matrices.iter().enumerate() {
            if rows.len() != doc.t || rows.iter().any(|r| r.len() != doc.n) {
                return Err(StbcError::Dimension(format!(
                    "matrix {} is not {}x{}",
                    i + 1,
                    doc.t,
                    doc.n
                )));
            }
            weights.push(CMatrix::from_fn(doc.t, doc.n, |r, c| {
                let [re, im] = rows[r][c];
                C64::new(re, im)
            }));
        }
        Design::new(doc.t, doc.n, weights, doc.power_scale)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

/// Serialized form of a [`Design`]: each matrix is a list of rows of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDoc {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub power_scale: f64,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Probes a real-linear encoder with the standard basis to recover its
/// weight matrices. Linearity is spot-checked by superposition first.
pub fn extract_design<F>(num_symbols: usize, delay: usize, antennas: usize, encoder: F) -> Result<Design>
where
    F: Fn(&[f64]) -> CMatrix,
{
    const PAIRS: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d15e);
    let draw = |rng: &mut ChaCha8Rng| (0..num_symbols).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    for _ in 0..PAIRS {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let a: f64 = rng.random_range(-2.0..2.0);
        let b: f64 = rng.random_range(-2.0..2.0);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = encoder(&mix);
        let ex = encoder(&x);
        let ey = encoder(&y);
        if lhs.shape() != (delay, antennas) || ex.shape() != (delay, antennas) {
            return Err(StbcError::Dimension(format!(
                "encoder produced {:?}, expected {delay}x{antennas}",
                lhs.shape()
            )));
        }
        let rhs = ex * C64::new(a, 0.0) + ey * C64::new(b, 0.0);
        let resid = (&lhs - &rhs).norm();
        if resid > 1e-10 * (1.0 + rhs.norm()) {
            return Err(StbcError::NonLinear(resid));
        }
    }
    let weights = (0..num_symbols)
        .map(|i| {
            let mut e = vec![0.0; num_symbols];
            e[i] = 1.0;
            encoder(&e)
        })
        .collect();
    Design::new(delay, antennas, weights, 1.0)
}

/// An ordered partition of the symbol indices into non-empty groups.
///
/// Indices are 0-based in memory and 1-based in the JSON form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingScheme {
    groups: Vec<Vec<usize>>,
    num_symbols: usize,
}

impl GroupingScheme {
    pub fn new(groups: Vec<Vec<usize>>, num_symbols: usize) -> Result<Self> {
        if groups.is_empty() {
            return Err(StbcError::InvalidGrouping("no groups".into()));
        }
        let mut seen = vec![false; num_symbols];
        for (k, grp) in groups.iter().enumerate() {
            if grp.is_empty() {
                return Err(StbcError::InvalidGrouping(format!("group {} is empty", k + 1)));
            }
            for &i in grp {
                if i >= num_symbols {
                    return Err(StbcError::IndexOutOfRange { index: i + 1, k: num_symbols });
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(StbcError::InvalidGrouping(format!("index {} appears twice", i + 1)));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(StbcError::InvalidGrouping(format!("index {} is in no group", missing + 1)));
        }
        Ok(Self { groups, num_symbols })
    }

    /// Consecutive groups of `size` symbols each.
    pub fn contiguous(num_symbols: usize, size: usize) -> Result<Self> {
        if size == 0 || num_symbols % size != 0 {
            return Err(StbcError::InvalidGrouping(format!("{num_symbols} symbols do not split into groups of {size}")));
        }
        Self::new((0..num_symbols / size).map(|k| (k * size..(k + 1) * size).collect()).collect(), num_symbols)
    }

    /// A single group holding every symbol (ML decoding).
    pub fn single(num_symbols: usize) -> Result<Self> {
        Self::new(vec![(0..num_symbols).collect()], num_symbols)
    }

    /// Merges groups `2j-1` and `2j` for every `j`.
    pub fn merge_pairs(&self) -> Result<Self> {
        if self.groups.len() % 2 != 0 {
            return Err(StbcError::InvalidGrouping("odd number of groups cannot be paired".into()));
        }
        let merged = self.groups.chunks(2).map(|p| p.concat()).collect();
        Self::new(merged, self.num_symbols)
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, k: usize) -> &[usize] {
        &self.groups[k]
    }

    pub fn n_max(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `I_k^c`, sorted ascending.
    pub fn complement(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .groups
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != k)
            .flat_map(|(_, g)| g.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Indices of every group after `k`, sorted ascending.
    pub fn later(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.groups[k + 1..].iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    /// `perm[i]` is the position symbol `i` takes when the groups are listed
    /// one after the other, each in its own order.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm = vec![0; self.num_symbols];
        for (pos, &i) in self.groups.iter().flatten().enumerate() {
            perm[i] = pos;
        }
        perm
    }

    /// Reorders `x` into group-major order.
    pub fn permute<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.groups.iter().flatten().map(|&i| x[i]).collect()
    }

    /// Inverse of [`GroupingScheme::permute`].
    pub fn unpermute<T: Copy + Default>(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.num_symbols];
        for (pos, &i) in self.groups.iter().flatten().enumerate() {
            out[i] = y[pos];
        }
        out
    }

    pub fn to_doc(&self) -> GroupingDoc {
        GroupingDoc { groups: self.groups.iter().map(|g| g.iter().map(|i| i + 1).collect()).collect() }
    }

    pub fn from_doc(doc: &GroupingDoc, num_symbols: usize) -> Result<Self> {
        let groups = doc
            .groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&i| {
                        if i == 0 {
                            Err(StbcError::InvalidGrouping("indices are 1-based".into()))
                        } else {
                            Ok(i - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups, num_symbols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingDoc {
    pub groups: Vec<Vec<usize>>,
}

/// Real information symbols with the alphabet level index each one came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSymbolVector {
    pub values: Vec<f64>,
    pub levels: Vec<usize>,
}

impl RealSymbolVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds a complex matrix from a row-major table; handy in tests.
pub fn cmatrix(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
    DMatrix::from_row_iterator(rows, cols, entries.iter().map(|&(re, im)| C64::new(re, im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alamouti() -> Design {
        let z = (0.0, 0.0);
        Design::new(
            2,
            2,
            vec![
                cmatrix(2, 2, &[(1.0, 0.0), z, z, (1.0, 0.0)]),
                cmatrix(2, 2, &[(0.0, 1.0), z, z, (0.0, -1.0)]),
                cmatrix(2, 2, &[z, (1.0, 0.0), (-1.0, 0.0), z]),
                cmatrix(2, 2, &[z, (0.0, 1.0), (0.0, 1.0), z]),
            ],
            1.0,
        )
        .unwrap()
    }

    fn random_cmatrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn vec_tilde_small_cases() {
        let a = cmatrix(1, 1, &[(1.0, 2.0)]);
        assert_eq!(vec_tilde(&a).as_slice(), &[1.0, 2.0]);
        let eye = CMatrix::identity(2, 2);
        assert_eq!(vec_tilde(&eye).as_slice(), &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn vec_tilde_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_cmatrix(&mut rng, 3, 2);
        assert_eq!(unvec_tilde(&vec_tilde(&a), 3, 2).unwrap(), a);
        assert!(unvec_tilde(&vec_tilde(&a), 2, 2).is_err());
    }

    #[test]
    fn alamouti_codeword() {
        let d = alamouti();
        let (a, b, c, e) = (0.3, -1.2, 0.7, 2.0);
        let x = d.assemble(&[a, b, c, e]).unwrap();
        let want = cmatrix(2, 2, &[(a, b), (c, e), (-c, e), (a, -b)]);
        assert!((x - want).norm() < 1e-15);
        assert_eq!(d.assemble(&[0.0; 4]).unwrap(), CMatrix::zeros(2, 2));
        assert!(d.assemble(&[1.0; 3]).is_err());
    }

    #[test]
    fn assemble_basis_vectors_give_scaled_weights() {
        let d = alamouti().with_power_scale(0.5).unwrap();
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            let x = d.assemble(&e).unwrap();
            assert!((x - d.weights()[i].clone() * C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn combine_subset_cases() {
        let d = alamouti();
        let x = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(d.combine_subset(&[0, 1, 2, 3], &x).unwrap(), d.assemble(&x).unwrap());
        assert_eq!(d.combine_subset(&[0], &[1.0]).unwrap(), d.weights()[0]);
        assert_eq!(d.combine_subset(&[], &[]).unwrap(), CMatrix::zeros(2, 2));
        assert!(matches!(d.combine_subset(&[7], &[1.0]), Err(StbcError::IndexOutOfRange { .. })));
        let split = d.combine_subset(&[0, 2], &[0.1, 0.3]).unwrap() + d.combine_subset(&[1, 3], &[0.2, 0.4]).unwrap();
        assert!((split - d.assemble(&x).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn rejects_dependent_weights() {
        let a = CMatrix::identity(2, 2);
        let b = a.clone() * C64::new(2.0, 0.0);
        assert!(matches!(Design::new(2, 2, vec![a, b], 1.0), Err(StbcError::RankDeficient { rank: 1, expected: 2 })));
        assert!(Design::new(2, 2, vec![CMatrix::identity(2, 2)], 0.0).is_err());
    }

    #[test]
    fn equivalent_channel_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let weights: Vec<CMatrix> = (0..6).map(|_| random_cmatrix(&mut rng, 3, 2)).collect();
            let d = Design::new(3, 2, weights, 0.8).unwrap();
            let h = random_cmatrix(&mut rng, 2, 2);
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = d.equivalent_channel(&h).unwrap();
            let gx = &g * RVector::from_vec(x.clone());
            let direct = vec_tilde(&(d.assemble(&x).unwrap() * &h));
            assert!((direct - &gx).norm() <= 1e-10 * gx.norm());
        }
        let d = alamouti();
        assert_eq!(d.equivalent_channel(&CMatrix::zeros(2, 1)).unwrap(), RMatrix::zeros(4, 4));
        assert!(d.equivalent_channel(&CMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn alamouti_equivalent_channel_is_orthogonal() {
        let d = alamouti();
        let h = cmatrix(2, 1, &[(1.0, 0.0), (0.0, 0.0)]);
        let g = d.equivalent_channel(&h).unwrap();
        let gram = g.transpose() * &g;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(gram[(i, j)].abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn permutation_cases() {
        let s = GroupingScheme::contiguous(6, 2).unwrap();
        assert_eq!(s.permutation(), vec![0, 1, 2, 3, 4, 5]);
        let s = GroupingScheme::new(vec![vec![1], vec![0]], 2).unwrap();
        assert_eq!(s.permutation(), vec![1, 0]);
        assert_eq!(s.permute(&[10, 20]), vec![20, 10]);
        let s = GroupingScheme::new(vec![vec![3, 0], vec![2], vec![4, 1]], 5).unwrap();
        let x = [1, 2, 3, 4, 5];
        assert_eq!(s.unpermute(&s.permute(&x)), x.to_vec());
        assert_eq!(s.complement(0), vec![1, 2, 4]);
        assert_eq!(s.later(0), vec![1, 2, 4]);
        assert_eq!(s.later(1), vec![1, 4]);
        assert!(s.later(2).is_empty());
        assert_eq!(s.n_max(), 2);
    }

    #[test]
    fn grouping_validation() {
        assert!(GroupingScheme::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(GroupingScheme::new(vec![vec![0]], 2).is_err());
        assert!(GroupingScheme::new(vec![vec![0, 1], vec![]], 2).is_err());
        assert!(GroupingScheme::new(vec![vec![0, 2]], 2).is_err());
        let s = GroupingScheme::contiguous(4, 2).unwrap();
        assert_eq!(s.merge_pairs().unwrap().groups(), &[vec![0, 1, 2, 3]]);
        let doc = s.to_doc();
        assert_eq!(doc.groups, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(GroupingScheme::from_doc(&doc, 4).unwrap(), s);
        assert!(GroupingScheme::from_doc(&GroupingDoc { groups: vec![vec![0, 1]] }, 2).is_err());
    }

    #[test]
    fn extract_design_probes_basis() {
        // diagonal repetition code x1 + i x2 on two antennas
        let d = extract_design(2, 2, 2, |x| CMatrix::identity(2, 2) * C64::new(x[0], x[1])).unwrap();
        assert_eq!(d.weights()[0], CMatrix::identity(2, 2));
        assert_eq!(d.weights()[1], CMatrix::identity(2, 2) * C64::new(0.0, 1.0));
        assert!(matches!(
            extract_design(2, 2, 2, |_| CMatrix::zeros(2, 2)),
            Err(StbcError::RankDeficient { rank: 0, .. })
        ));
        assert!(matches!(
            extract_design(1, 1, 1, |x| cmatrix(1, 1, &[(x[0] * x[0], 0.0)])),
            Err(StbcError::NonLinear(_))
        ));
    }

    #[test]
    fn design_json_round_trip() {
        let d = alamouti().with_power_scale(0.5).unwrap();
        let back = Design::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
        let v: serde_json::Value = serde_json::from_str(&d.to_json().unwrap()).unwrap();
        assert_eq!(v["K"], 4);
        assert_eq!(v["matrices"][2][1][0], serde_json::json!([-1.0, 0.0]));
    }
}
