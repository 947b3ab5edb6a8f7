//! The two code families and their rate / delay / complexity accounting.
//!
//! *Layered diagonal codes* ([`Family::LayeredDiagonal`]): `2n` groups of `λ`
//! real symbols, each group rotated by `Q`; groups `2m-1` and `2m` form the
//! real and imaginary parts of layer `m`, which is repeated cyclically across
//! the `N` antennas along the `m`-th diagonal of a `(N+n-1) x N` matrix.
//!
//! *Layered Alamouti codes* ([`Family::LayeredAlamouti`]): `N` even, `λ = N/2`,
//! `4n` groups; layer `m` holds `λ` Alamouti blocks, block `l` built from the
//! `l`-th rotated coordinate of four consecutive groups and placed at block
//! position `(m+l-1, l)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::lindesign::{extract_design, Design, GroupingScheme};
use crate::rotations::RotationMatrix;
use crate::{CMatrix, Result, StbcError, C64};

/// Energy carried by each real PAM symbol; makes M-QAM pairs unit energy.
pub const REAL_SYMBOL_ENERGY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "sec3")]
    LayeredDiagonal,
    #[serde(rename = "sec4")]
    LayeredAlamouti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingVariant {
    #[default]
    Fine,
    /// Pairs of fine groups decoded jointly (layered Alamouti codes only).
    Coarse,
}

/// Parameters of a code from either family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub family: Family,
    pub antennas: usize,
    pub lambda: usize,
    pub layers: usize,
    #[serde(default)]
    pub variant: GroupingVariant,
}

impl CodeSpec {
    pub fn section3(antennas: usize, lambda: usize, layers: usize) -> Result<Self> {
        if lambda == 0 || layers == 0 || antennas == 0 {
            return Err(StbcError::Infeasible("N, λ and n must be positive".into()));
        }
        if lambda > antennas {
            return Err(StbcError::Infeasible(format!("λ = {lambda} exceeds N = {antennas}")));
        }
        Ok(Self { family: Family::LayeredDiagonal, antennas, lambda, layers, variant: GroupingVariant::Fine })
    }

    pub fn section4(antennas: usize, layers: usize, variant: GroupingVariant) -> Result<Self> {
        if antennas < 2 || antennas % 2 != 0 {
            return Err(StbcError::Infeasible(format!("N = {antennas} must be even and at least 2")));
        }
        if layers == 0 {
            return Err(StbcError::Infeasible("n must be positive".into()));
        }
        Ok(Self { family: Family::LayeredAlamouti, antennas, lambda: antennas / 2, layers, variant })
    }

    /// Layered diagonal code for a target delay `T` (`n = T - N + 1`).
    pub fn section3_for_delay(antennas: usize, lambda: usize, delay: usize) -> Result<Self> {
        if delay < antennas {
            return Err(StbcError::Infeasible(format!("T = {delay} < N = {antennas}")));
        }
        Self::section3(antennas, lambda, delay - antennas + 1)
    }

    /// Layered Alamouti code for a target delay `T` (`n = (T - N + 2) / 2`).
    pub fn section4_for_delay(antennas: usize, delay: usize, variant: GroupingVariant) -> Result<Self> {
        if delay < antennas || delay % 2 != 0 {
            return Err(StbcError::Infeasible(format!("T = {delay} must be even and at least N = {antennas}")));
        }
        Self::section4(antennas, (delay - antennas + 2) / 2, variant)
    }

    /// Re-checks a spec whose fields were set directly.
    pub fn validate(&self) -> Result<()> {
        let again = match self.family {
            Family::LayeredDiagonal => {
                if self.variant == GroupingVariant::Coarse {
                    return Err(StbcError::Infeasible("coarse grouping is only defined for sec4".into()));
                }
                Self::section3(self.antennas, self.lambda, self.layers)?
            }
            Family::LayeredAlamouti => Self::section4(self.antennas, self.layers, self.variant)?,
        };
        if again != *self {
            return Err(StbcError::Infeasible(format!("sec4 needs λ = N/2, got λ = {}", self.lambda)));
        }
        Ok(())
    }

    /// `K`.
    pub fn num_symbols(&self) -> usize {
        match self.family {
            Family::LayeredDiagonal => 2 * self.layers * self.lambda,
            Family::LayeredAlamouti => 2 * self.layers * self.antennas,
        }
    }

    /// `T`.
    pub fn delay(&self) -> usize {
        match self.family {
            Family::LayeredDiagonal => self.antennas + self.layers - 1,
            Family::LayeredAlamouti => self.antennas + 2 * (self.layers - 1),
        }
    }

    /// `g`.
    pub fn num_groups(&self) -> usize {
        self.num_symbols() / self.group_size()
    }

    /// Real symbols decoded jointly per group.
    pub fn group_size(&self) -> usize {
        match self.variant {
            GroupingVariant::Fine => self.lambda,
            GroupingVariant::Coarse => 2 * self.lambda,
        }
    }

    /// Complex symbols per channel use, `K / 2T`.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.num_symbols() as u64, 2 * self.delay() as u64)
    }

    /// Worst-case decoding complexity is `M^exponent`. Fine groupings use the
    /// conditioned search (`(λ-1)/2`); the coarse grouping is quoted with a
    /// plain joint search (`N/2`).
    pub fn worst_case_exponent(&self) -> Ratio<u64> {
        let n = self.group_size() as u64;
        match self.variant {
            GroupingVariant::Fine => Ratio::new(n - 1, 2),
            GroupingVariant::Coarse => Ratio::new(n, 2),
        }
    }
}

/// A constructed code: normalized design, decoding groups and the rotation
/// it was built with.
#[derive(Debug, Clone)]
pub struct Code {
    pub spec: CodeSpec,
    pub design: Design,
    pub grouping: GroupingScheme,
    pub rotation: RotationMatrix,
}

fn rotated_groups(q: &RotationMatrix, x: &[f64]) -> Vec<f64> {
    x.chunks(q.dimension()).flat_map(|g| q.apply(g)).collect()
}

/// Unscaled layered diagonal codeword. Entry `(m+j, j)` (0-based) carries
/// `z[2mλ + j mod λ] + i·z[(2m+1)λ + j mod λ]`.
pub fn section3_codeword(spec: &CodeSpec, q: &RotationMatrix, x: &[f64]) -> CMatrix {
    let (n_ant, lambda) = (spec.antennas, spec.lambda);
    let z = rotated_groups(q, x);
    let mut out = CMatrix::zeros(spec.delay(), n_ant);
    for m in 0..spec.layers {
        for j in 0..n_ant {
            let c = j % lambda;
            out[(m + j, j)] = C64::new(z[2 * m * lambda + c], z[(2 * m + 1) * lambda + c]);
        }
    }
    out
}

/// The 2x2 Alamouti block `[[a+ib, c+id], [-c+id, a-ib]]`.
pub fn alamouti_block(a: f64, b: f64, c: f64, d: f64) -> [[C64; 2]; 2] {
    [[C64::new(a, b), C64::new(c, d)], [C64::new(-c, d), C64::new(a, -b)]]
}

/// Unscaled layered Alamouti codeword.
pub fn section4_codeword(spec: &CodeSpec, q: &RotationMatrix, x: &[f64]) -> CMatrix {
    let lambda = spec.lambda;
    let z = rotated_groups(q, x);
    let mut out = CMatrix::zeros(spec.delay(), spec.antennas);
    for m in 0..spec.layers {
        for l in 0..lambda {
            let sym = |s: usize| z[(4 * m + s) * lambda + l];
            let block = alamouti_block(sym(0), sym(1), sym(2), sym(3));
            let (r0, c0) = (2 * (m + l), 2 * l);
            for (dr, row) in block.iter().enumerate() {
                for (dc, v) in row.iter().enumerate() {
                    out[(r0 + dr, c0 + dc)] = *v;
                }
            }
        }
    }
    out
}

fn check_rotation(spec: &CodeSpec, q: &RotationMatrix) -> Result<()> {
    if q.dimension() != spec.lambda {
        return Err(StbcError::Dimension(format!(
            "rotation has dimension {}, code needs λ = {}",
            q.dimension(),
            spec.lambda
        )));
    }
    Ok(())
}

pub fn build_section3(antennas: usize, lambda: usize, layers: usize, q: &RotationMatrix) -> Result<Code> {
    let spec = CodeSpec::section3(antennas, lambda, layers)?;
    build(spec, q)
}

pub fn build_section4(antennas: usize, layers: usize, q: &RotationMatrix, variant: GroupingVariant) -> Result<Code> {
    let spec = CodeSpec::section4(antennas, layers, variant)?;
    build(spec, q)
}

/// Builds either family from a spec.
pub fn build(spec: CodeSpec, q: &RotationMatrix) -> Result<Code> {
    spec.validate()?;
    check_rotation(&spec, q)?;
    let k = spec.num_symbols();
    let raw = match spec.family {
        Family::LayeredDiagonal => extract_design(k, spec.delay(), spec.antennas, |x| section3_codeword(&spec, q, x))?,
        Family::LayeredAlamouti => extract_design(k, spec.delay(), spec.antennas, |x| section4_codeword(&spec, q, x))?,
    };
    let design = normalize_power(&raw, REAL_SYMBOL_ENERGY)?;
    let fine = GroupingScheme::contiguous(k, spec.lambda)?;
    let grouping = match spec.variant {
        GroupingVariant::Fine => fine,
        GroupingVariant::Coarse => fine.merge_pairs()?,
    };
    Ok(Code { spec, design, grouping, rotation: q.clone() })
}

/// Sets `power_scale` so that `E‖X‖²_F / T = 1` for independent zero-mean
/// symbols of energy `per_symbol_energy`.
pub fn normalize_power(design: &Design, per_symbol_energy: f64) -> Result<Design> {
    if !(per_symbol_energy > 0.0) {
        return Err(StbcError::Config(format!("per-symbol energy must be positive, got {per_symbol_energy}")));
    }
    let total: f64 = design.weights().iter().map(|a| a.norm_squared()).sum();
    if total == 0.0 {
        return Err(StbcError::RankDeficient { rank: 0, expected: design.num_symbols() });
    }
    design.with_power_scale((design.delay() as f64 / (per_symbol_energy * total)).sqrt())
}

/// Rows of the rate / complexity comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFamily {
    /// Layered diagonal code with λ = 1.
    Toeplitz,
    /// The two-antenna, delay-3, rate 4/3 layered diagonal code.
    C1,
    /// Layered diagonal code with λ = N, both groups of a layer decoded jointly.
    Sec3Paired,
    /// Layered diagonal codes, one row per λ = 1..N.
    Sec3,
    /// The four-antenna, delay-6, rate 4/3 layered Alamouti code.
    C2,
    /// Layered Alamouti code with the coarse grouping.
    Sec4Coarse,
    /// Layered Alamouti code with the fine grouping.
    Sec4,
}

impl TableFamily {
    pub const ALL: [TableFamily; 7] = [
        TableFamily::Toeplitz,
        TableFamily::C1,
        TableFamily::Sec3Paired,
        TableFamily::Sec3,
        TableFamily::C2,
        TableFamily::Sec4Coarse,
        TableFamily::Sec4,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TableFamily::Toeplitz => "toeplitz",
            TableFamily::C1 => "c1",
            TableFamily::Sec3Paired => "sec3-paired",
            TableFamily::Sec3 => "sec3",
            TableFamily::C2 => "c2",
            TableFamily::Sec4Coarse => "sec4-coarse",
            TableFamily::Sec4 => "sec4",
        }
    }

    pub fn is_feasible(&self, antennas: usize, delay: usize) -> bool {
        let n = antennas;
        let t = delay;
        match self {
            TableFamily::Toeplitz | TableFamily::Sec3Paired | TableFamily::Sec3 => n >= 1 && t >= n,
            TableFamily::C1 => n == 2 && t == 3,
            TableFamily::C2 => n == 4 && t == 6,
            TableFamily::Sec4Coarse | TableFamily::Sec4 => n >= 2 && n % 2 == 0 && t % 2 == 0 && t >= n,
        }
    }
}

impl fmt::Display for TableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub family: TableFamily,
    /// Real symbols per group.
    pub lambda: usize,
    pub groups: usize,
    pub rate: Ratio<u64>,
    pub exponent: Ratio<u64>,
}

/// Closed-form rate and worst-case exponent for each requested family at
/// `(N, T)`. Infeasible requests are rejected rather than skipped.
pub fn tabulate_tradeoff(antennas: usize, delay: usize, families: &[TableFamily]) -> Result<Vec<TradeoffRow>> {
    let (n, t) = (antennas as u64, delay as u64);
    let mut rows = Vec::new();
    for &family in families {
        if !family.is_feasible(antennas, delay) {
            return Err(StbcError::Infeasible(format!("{family} is not defined for N = {antennas}, T = {delay}")));
        }
        // layers for the diagonal family, blocks-layers for the Alamouti family
        let sec3_layers = t - n + 1;
        let sec4_span = t - n + 2;
        let sec3_row = |lambda: u64| TradeoffRow {
            family,
            lambda: lambda as usize,
            groups: (2 * sec3_layers) as usize,
            rate: Ratio::new(lambda * sec3_layers, t),
            exponent: Ratio::new(lambda - 1, 2),
        };
        match family {
            TableFamily::Toeplitz => rows.push(sec3_row(1)),
            TableFamily::C1 | TableFamily::C2 => rows.push(TradeoffRow {
                family,
                lambda: 2,
                groups: if family == TableFamily::C1 { 4 } else { 8 },
                rate: Ratio::new(4, 3),
                exponent: Ratio::new(1, 2),
            }),
            TableFamily::Sec3Paired => rows.push(TradeoffRow {
                family,
                lambda: (2 * n) as usize,
                groups: sec3_layers as usize,
                rate: Ratio::new(n * sec3_layers, t),
                exponent: Ratio::from_integer(n),
            }),
            TableFamily::Sec3 => rows.extend((1..=n).map(sec3_row)),
            TableFamily::Sec4Coarse => rows.push(TradeoffRow {
                family,
                lambda: n as usize,
                groups: sec4_span as usize,
                rate: Ratio::new(n * sec4_span, 2 * t),
                exponent: Ratio::new(n, 2),
            }),
            TableFamily::Sec4 => rows.push(TradeoffRow {
                family,
                lambda: (n / 2) as usize,
                groups: (2 * sec4_span) as usize,
                rate: Ratio::new(n * sec4_span, 2 * t),
                exponent: Ratio::new(n - 2, 4),
            }),
        }
    }
    Ok(rows)
}

/// Every family defined at `(N, T)`, in table order.
pub fn feasible_families(antennas: usize, delay: usize) -> Vec<TableFamily> {
    TableFamily::ALL.iter().copied().filter(|f| f.is_feasible(antennas, delay)).collect()
}
