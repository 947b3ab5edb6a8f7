//! Quasi-static Rayleigh flat-fading MIMO link `Y = √snr·X·H + W` and
//! Gray-mapped PAM alphabets for the real symbols.

use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::lindesign::RealSymbolVector;
use crate::{CMatrix, Result, StbcError, C64};

/// `sqrt(M)`-ary PAM with levels `c·{-(L-1), .., -1, 1, .., L-1}` scaled to
/// energy 1/2, so that two of them form a unit-energy square QAM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PamAlphabet {
    qam_size: usize,
    levels: Vec<f64>,
    spacing_half: f64,
    bits_per_symbol: usize,
    /// `gray_of[level]` is the bit label of that level.
    gray_of: Vec<usize>,
    /// `level_of[label]` inverts `gray_of`.
    level_of: Vec<usize>,
}

impl PamAlphabet {
    /// Square QAM only: `M ∈ {4, 16, 64}`.
    pub fn new(qam_size: usize) -> Result<Self> {
        let side = match qam_size {
            4 => 2,
            16 => 4,
            64 => 8,
            _ => return Err(StbcError::UnsupportedConstellation(qam_size)),
        };
        let c = (3.0 / (2.0 * (qam_size as f64 - 1.0))).sqrt();
        let levels = (0..side).map(|i| c * (2 * i + 1) as f64 - c * side as f64).collect();
        let gray_of: Vec<usize> = (0..side).map(|i| i ^ (i >> 1)).collect();
        let mut level_of = vec![0; side];
        for (lvl, &g) in gray_of.iter().enumerate() {
            level_of[g] = lvl;
        }
        Ok(Self {
            qam_size,
            levels,
            spacing_half: c,
            bits_per_symbol: side.trailing_zeros() as usize,
            gray_of,
            level_of,
        })
    }

    /// `M`, the complex constellation size.
    pub fn qam_size(&self) -> usize {
        self.qam_size
    }

    /// `sqrt(M)`, number of PAM levels.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn min_level(&self) -> f64 {
        self.levels[0]
    }

    pub fn max_level(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }

    /// Index of the closest level; exact midpoints go to the lower level and
    /// values outside the range are clamped.
    pub fn nearest_index(&self, v: f64) -> usize {
        let last = self.levels.len() - 1;
        let t = (v / self.spacing_half + last as f64) / 2.0;
        let idx = (t - 0.5).ceil();
        if idx.is_nan() || idx <= 0.0 {
            0
        } else if idx >= last as f64 {
            last
        } else {
            idx as usize
        }
    }

    /// Gray label of a level, most significant bit first.
    pub fn bits_of(&self, level: usize) -> impl Iterator<Item = u8> + '_ {
        let label = self.gray_of[level];
        (0..self.bits_per_symbol).rev().map(move |b| ((label >> b) & 1) as u8)
    }

    /// Maps bits (MSB first within each symbol) to PAM symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<RealSymbolVector> {
        let w = self.bits_per_symbol;
        if bits.len() % w != 0 {
            return Err(StbcError::Bits(format!("{} bits is not a multiple of {w}", bits.len())));
        }
        let mut levels = Vec::with_capacity(bits.len() / w);
        for chunk in bits.chunks(w) {
            let mut label = 0;
            for &b in chunk {
                if b > 1 {
                    return Err(StbcError::Bits(format!("bit value {b}")));
                }
                label = (label << 1) | b as usize;
            }
            levels.push(self.level_of[label]);
        }
        let values = levels.iter().map(|&l| self.levels[l]).collect();
        Ok(RealSymbolVector { values, levels })
    }

    /// Quantizes each value to its nearest level and returns the bit labels.
    pub fn demap(&self, values: &[f64]) -> Vec<u8> {
        values.iter().flat_map(|&v| self.bits_of(self.nearest_index(v))).collect()
    }
}

/// One channel use of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkInstance {
    /// `N x N_r` channel.
    pub h: CMatrix,
    /// `T x N_r` noise.
    pub w: CMatrix,
    /// Linear SNR.
    pub snr: f64,
}

impl LinkInstance {
    pub fn receive_antennas(&self) -> usize {
        self.h.ncols()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One `CN(0, 1)` draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draws `H` (row by row, then) `W` with i.i.d. `CN(0, 1)` entries.
pub fn sample_link<R: Rng + ?Sized>(
    antennas: usize,
    receive_antennas: usize,
    delay: usize,
    snr_db: f64,
    rng: &mut R,
) -> LinkInstance {
    let mut h = CMatrix::zeros(antennas, receive_antennas);
    for r in 0..antennas {
        for c in 0..receive_antennas {
            h[(r, c)] = complex_gaussian(rng);
        }
    }
    let mut w = CMatrix::zeros(delay, receive_antennas);
    for r in 0..delay {
        for c in 0..receive_antennas {
            w[(r, c)] = complex_gaussian(rng);
        }
    }
    LinkInstance { h, w, snr: db_to_linear(snr_db) }
}

/// `Y = √snr·X·H + W`.
pub fn transmit(x: &CMatrix, link: &LinkInstance) -> Result<CMatrix> {
    if x.ncols() != link.h.nrows() || x.nrows() != link.w.nrows() {
        return Err(StbcError::Dimension(format!(
            "codeword {:?} does not fit channel {:?} / noise {:?}",
            x.shape(),
            link.h.shape(),
            link.w.shape()
        )));
    }
    Ok(x * &link.h * C64::new(link.snr.sqrt(), 0.0) + &link.w)
}
