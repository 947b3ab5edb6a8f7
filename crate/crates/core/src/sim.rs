//! Monte Carlo link simulation, diversity-order fitting, result files and the
//! rate/complexity tradeoff export.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, sample_link, transmit, PamAlphabet};
use crate::constructions::{build, tabulate_tradeoff, Code, CodeSpec, TableFamily, TradeoffRow};
use crate::decoders::{decode, ml_decode_with_cap, DecodeProblem, DecodeResult, DecoderKind, SearchMode, ML_CANDIDATE_CAP};
use crate::diversity::derive_seed;
use crate::lindesign::vec_tilde;
use crate::plot::{Axis, Marker, Plot, Series};
use crate::rotations::{build_rotation, RotationMatrix};
use crate::{Result, StbcError};

pub const CSV_HEADER: &str = "snr_db,frames,bit_errors,ber,ser,fer,mean_evals,max_evals";
pub const TRADEOFF_CSV_HEADER: &str = "family,lambda,rate,complexity_exponent";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationChoice {
    #[default]
    Certified,
    /// `Q = I`; deliberately breaks full diversity when λ ≥ 2.
    Identity,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub code: CodeSpec,
    #[serde(default)]
    pub rotation: RotationChoice,
    #[serde(default = "defaults::receive_antennas")]
    pub receive_antennas: usize,
    /// QAM size `M`; each real symbol uses `sqrt(M)`-PAM.
    #[serde(default = "defaults::qam")]
    pub qam: usize,
    #[serde(default = "defaults::decoder")]
    pub decoder: DecoderKind,
    #[serde(default)]
    pub search_mode: SearchMode,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "defaults::min_frame_errors")]
    pub min_frame_errors: u64,
    #[serde(default = "defaults::max_frames")]
    pub max_frames: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "defaults::workers")]
    pub workers: usize,
    /// Frames handed to the worker pool at a time.
    #[serde(default = "defaults::batch_size")]
    pub batch_size: usize,
    #[serde(default = "defaults::ml_cap")]
    pub ml_cap: u128,
    /// Number of top SNR points used for the diversity fit.
    #[serde(default = "defaults::fit_points")]
    pub fit_points: usize,
    /// Points with fewer bit errors are left out of the fit.
    #[serde(default = "defaults::fit_min_bit_errors")]
    pub fit_min_bit_errors: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

mod defaults {
    pub fn receive_antennas() -> usize {
        1
    }
    pub fn qam() -> usize {
        4
    }
    pub fn decoder() -> crate::decoders::DecoderKind {
        crate::decoders::DecoderKind::Picsic
    }
    pub fn min_frame_errors() -> u64 {
        200
    }
    pub fn max_frames() -> u64 {
        1_000_000
    }
    pub fn workers() -> usize {
        1
    }
    pub fn batch_size() -> usize {
        512
    }
    pub fn ml_cap() -> u128 {
        crate::decoders::ML_CANDIDATE_CAP
    }
    pub fn fit_points() -> usize {
        3
    }
    pub fn fit_min_bit_errors() -> u64 {
        50
    }
}

impl SimConfig {
    pub fn new(code: CodeSpec, snr_grid_db: Vec<f64>) -> Self {
        Self {
            code,
            rotation: RotationChoice::Certified,
            receive_antennas: defaults::receive_antennas(),
            qam: defaults::qam(),
            decoder: defaults::decoder(),
            search_mode: SearchMode::Conditioned,
            snr_grid_db,
            min_frame_errors: defaults::min_frame_errors(),
            max_frames: defaults::max_frames(),
            master_seed: 0,
            workers: defaults::workers(),
            batch_size: defaults::batch_size(),
            ml_cap: ML_CANDIDATE_CAP,
            fit_points: defaults::fit_points(),
            fit_min_bit_errors: defaults::fit_min_bit_errors(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.code.validate()?;
        PamAlphabet::new(self.qam)?;
        if self.snr_grid_db.is_empty() {
            return Err(StbcError::Config("snr_grid_db is empty".into()));
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) || self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StbcError::Config("snr_grid_db must be finite and strictly ascending".into()));
        }
        for (name, v) in [
            ("min_frame_errors", self.min_frame_errors),
            ("max_frames", self.max_frames),
            ("workers", self.workers as u64),
            ("batch_size", self.batch_size as u64),
            ("receive_antennas", self.receive_antennas as u64),
        ] {
            if v == 0 {
                return Err(StbcError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn rotation_matrix(&self) -> Result<RotationMatrix> {
        match self.rotation {
            RotationChoice::Certified => build_rotation(self.code.lambda),
            RotationChoice::Identity => Ok(RotationMatrix::identity(self.code.lambda)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    /// Real PAM symbols decided in error.
    pub symbol_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub ser: f64,
    pub fer: f64,
    pub mean_evals: f64,
    pub max_evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityFit {
    pub order: f64,
    pub window_snr_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<SnrPoint>,
    pub diversity: Option<DiversityFit>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    bit_errors: u64,
    symbol_errors: u64,
    evals: u64,
}

struct Link<'a> {
    cfg: &'a SimConfig,
    code: Code,
    alphabet: PamAlphabet,
    alphabets: Vec<PamAlphabet>,
}

impl Link<'_> {
    fn frame(&self, snr_idx: usize, frame_idx: u64) -> Result<FrameOutcome> {
        let cfg = self.cfg;
        let design = &self.code.design;
        let k = design.num_symbols();
        let bps = self.alphabet.bits_per_symbol();
        let snr_db = cfg.snr_grid_db[snr_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[cfg.master_seed, snr_idx as u64, frame_idx]));

        let bits: Vec<u8> = (0..k * bps).map(|_| rng.random::<bool>() as u8).collect();
        let sent = self.alphabet.modulate(&bits)?;
        let x = design.assemble(&sent.values)?;
        let link = sample_link(design.antennas(), cfg.receive_antennas, design.delay(), snr_db, &mut rng);
        let y = vec_tilde(&transmit(&x, &link)?);
        let g = design.equivalent_channel(&link.h)?;
        let problem = DecodeProblem::new(y, g, &self.code.grouping, &self.alphabets, link.snr)?;
        let decided: DecodeResult = match cfg.decoder {
            DecoderKind::Ml => ml_decode_with_cap(&problem, cfg.ml_cap)?,
            kind => decode(kind, cfg.search_mode, &problem)?,
        };

        let rx_bits = self.alphabet.demap(&decided.symbols);
        let bit_errors = bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count() as u64;
        let symbol_errors = sent.levels.iter().zip(&decided.levels).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameOutcome { bit_errors, symbol_errors, evals: decided.candidate_evaluations })
    }
}

/// Runs the configured link over the SNR grid. The result depends only on the
/// configuration: frames are seeded individually and tallied in frame order,
/// so the worker count changes wall time and nothing else.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let started = Instant::now();
    let q = cfg.rotation_matrix()?;
    let code = build(cfg.code, &q)?;
    let alphabet = PamAlphabet::new(cfg.qam)?;
    let k = code.design.num_symbols();
    if cfg.decoder == DecoderKind::Ml {
        let space = (alphabet.len() as u128).checked_pow(k as u32);
        if space.is_none_or(|s| s > cfg.ml_cap) {
            return Err(StbcError::SearchSpaceTooLarge { size: space.unwrap_or(u128::MAX), cap: cfg.ml_cap });
        }
    }
    let link = Link { cfg, code, alphabets: vec![alphabet.clone(); k], alphabet };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| StbcError::Config(format!("worker pool: {e}")))?;

    let bits_per_frame = (k * link.alphabet.bits_per_symbol()) as u64;
    let mut points = Vec::with_capacity(cfg.snr_grid_db.len());
    for (snr_idx, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let (mut frames, mut bit_errors, mut symbol_errors, mut frame_errors) = (0u64, 0u64, 0u64, 0u64);
        let (mut total_evals, mut max_evals) = (0u64, 0u64);
        'outer: while frames < cfg.max_frames && frame_errors < cfg.min_frame_errors {
            let start = frames;
            let end = (start + cfg.batch_size as u64).min(cfg.max_frames);
            let batch: Vec<FrameOutcome> =
                pool.install(|| (start..end).into_par_iter().map(|f| link.frame(snr_idx, f)).collect::<Result<_>>())?;
            for o in batch {
                frames += 1;
                bit_errors += o.bit_errors;
                symbol_errors += o.symbol_errors;
                frame_errors += u64::from(o.bit_errors > 0);
                total_evals += o.evals;
                max_evals = max_evals.max(o.evals);
                if frame_errors >= cfg.min_frame_errors {
                    break 'outer;
                }
            }
        }
        points.push(SnrPoint {
            snr_db,
            frames,
            bit_errors,
            symbol_errors,
            frame_errors,
            ber: bit_errors as f64 / (frames * bits_per_frame) as f64,
            ser: symbol_errors as f64 / (frames * k as u64) as f64,
            fer: frame_errors as f64 / frames as f64,
            mean_evals: total_evals as f64 / frames as f64,
            max_evals,
        });
    }

    let diversity = fit_window(&points, cfg.fit_points, cfg.fit_min_bit_errors).and_then(|window| {
        let pts: Vec<(f64, f64)> = window.iter().map(|p| (db_to_linear(p.snr_db), p.ber)).collect();
        let order = estimate_diversity_order(&pts, pts.len()).ok()?;
        Some(DiversityFit { order, window_snr_db: window.iter().map(|p| p.snr_db).collect() })
    });
    Ok(SimResult { points, diversity, wall_time_s: started.elapsed().as_secs_f64() })
}

/// The `count` highest-SNR points that have at least `min_bit_errors` bit
/// errors, in ascending SNR order. `None` when fewer than two qualify.
pub fn fit_window(points: &[SnrPoint], count: usize, min_bit_errors: u64) -> Option<Vec<SnrPoint>> {
    let mut chosen: Vec<SnrPoint> =
        points.iter().rev().filter(|p| p.bit_errors >= min_bit_errors && p.ber > 0.0).take(count).cloned().collect();
    chosen.reverse();
    (chosen.len() >= 2).then_some(chosen)
}

/// Negated least-squares slope of `log10 BER` against `log10 SNR` over the
/// last `window` points with nonzero BER.
pub fn estimate_diversity_order(points: &[(f64, f64)], window: usize) -> Result<f64> {
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|(s, b)| *s > 0.0 && *b > 0.0).map(|(s, b)| (s.log10(), b.log10())).collect();
    let tail = &usable[usable.len().saturating_sub(window)..];
    if tail.len() < 2 {
        return Err(StbcError::InsufficientPoints(tail.len()));
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = tail.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StbcError::InsufficientPoints(1));
    }
    Ok(-sxy / sxx)
}

pub fn results_csv(r: &SimResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &r.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.snr_db, p.frames, p.bit_errors, p.ber, p.ser, p.fer, p.mean_evals, p.max_evals
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

pub fn write_results(r: &SimResult, format: ResultFormat, path: &Path) -> Result<()> {
    let body = match format {
        ResultFormat::Csv => results_csv(r),
        ResultFormat::Json => serde_json::to_string_pretty(r)? + "\n",
    };
    std::fs::write(path, body)?;
    Ok(())
}

pub fn read_results_json(path: &Path) -> Result<SimResult> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// BER against SNR on a log axis.
pub fn render_ber(r: &SimResult, label: &str) -> String {
    Plot {
        title: "Bit error rate".into(),
        x: Axis { label: "SNR (dB)".into(), log: false },
        y: Axis { label: "BER".into(), log: true },
        series: vec![Series {
            label: label.into(),
            points: r.points.iter().map(|p| (p.snr_db, p.ber)).collect(),
            marker: Marker::Circle,
            connect: true,
        }],
    }
    .to_svg()
}

#[derive(Debug, Clone)]
pub struct TradeoffExport {
    pub rows: Vec<TradeoffRow>,
    pub csv: String,
    pub svg: String,
}

fn ratio_f64(r: num_rational::Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Rate against worst-case complexity exponent for every family feasible at
/// `(N, T)`.
pub fn render_tradeoff(antennas: usize, delay: usize) -> Result<TradeoffExport> {
    let families: Vec<TableFamily> = TableFamily::ALL.iter().copied().filter(|f| f.is_feasible(antennas, delay)).collect();
    if families.is_empty() {
        return Err(StbcError::Infeasible(format!("no code family fits N = {antennas}, T = {delay}")));
    }
    let rows = tabulate_tradeoff(antennas, delay, &families)?;
    let mut csv = String::from(TRADEOFF_CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.family, r.lambda, r.rate, r.exponent));
    }
    let markers = [Marker::Circle, Marker::Square, Marker::Triangle, Marker::Cross];
    let series = families
        .iter()
        .enumerate()
        .map(|(i, f)| Series {
            label: f.label().into(),
            points: rows.iter().filter(|r| r.family == *f).map(|r| (ratio_f64(r.exponent), ratio_f64(r.rate))).collect(),
            marker: markers[i % markers.len()],
            connect: *f == TableFamily::Sec3,
        })
        .collect();
    let svg = Plot {
        title: format!("Rate vs worst-case complexity, N = {antennas}, T = {delay}"),
        x: Axis { label: "complexity exponent (M^x)".into(), log: false },
        y: Axis { label: "rate (complex symbols per channel use)".into(), log: false },
        series,
    }
    .to_svg();
    Ok(TradeoffExport { rows, csv, svg })
}
