use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stbc_lab::constructions::{build, CodeSpec, Family, GroupingVariant};
use stbc_lab::decoders::{DecoderKind, SearchMode};
use stbc_lab::diversity::{
    certify_section3, certify_section4, falsify, pic_structurally_covered, CriterionMode, FalsifyBudget,
};
use stbc_lab::lindesign::{Design, GroupingDoc, GroupingScheme};
use stbc_lab::rotations::{build_rotation_with_bound, RotationMatrix, DEFAULT_BOUND};
use stbc_lab::sim::{render_ber, render_tradeoff, results_csv, run_simulation, write_results, ResultFormat, RotationChoice, SimConfig};
use stbc_lab::{Result, StbcError};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_WITNESS: u8 = 2;

#[derive(Parser)]
#[command(name = "stbc", version, about = "Low-complexity full-diversity STBC toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER/SER/FER simulation from a JSON config.
    Simulate(SimulateArgs),
    /// Check the PIC or PIC-SIC rank criterion for a design or a named code.
    Verify(VerifyArgs),
    /// Rate and worst-case complexity of every code family at (N, T).
    Tradeoff(TradeoffArgs),
    /// Construct a code and write its weight matrices as JSON.
    Build(BuildArgs),
    /// Print a certified rotation and its certificate.
    Rotation(RotationArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sec3,
    Sec4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pic,
    Picsic,
}

#[derive(Clone, Copy, ValueEnum)]
enum RotationArg {
    Certified,
    Identity,
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    antennas: Option<usize>,
    /// Symbols per rotation block (fixed to N/2 for sec4).
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    /// Decode pairs of groups jointly (sec4 only).
    #[arg(long)]
    coarse: bool,
    #[arg(long, value_enum)]
    rotation: Option<RotationArg>,
}

impl CodeArgs {
    fn spec(&self) -> Result<Option<CodeSpec>> {
        let Some(family) = self.family else { return Ok(None) };
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| StbcError::Config(format!("--{name} is required")));
        let antennas = need(self.antennas, "antennas")?;
        let layers = need(self.layers, "layers")?;
        let variant = if self.coarse { GroupingVariant::Coarse } else { GroupingVariant::Fine };
        let spec = match family {
            FamilyArg::Sec3 => {
                if self.coarse {
                    return Err(StbcError::Infeasible("--coarse applies to sec4 only".into()));
                }
                CodeSpec::section3(antennas, need(self.lambda, "lambda")?, layers)?
            }
            FamilyArg::Sec4 => {
                let spec = CodeSpec::section4(antennas, layers, variant)?;
                if let Some(l) = self.lambda {
                    if l != spec.lambda {
                        return Err(StbcError::Infeasible(format!("sec4 needs λ = N/2 = {}, got {l}", spec.lambda)));
                    }
                }
                spec
            }
        };
        Ok(Some(spec))
    }

    fn rotation_choice(&self) -> RotationChoice {
        match self.rotation {
            Some(RotationArg::Identity) => RotationChoice::Identity,
            _ => RotationChoice::Certified,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    receive_antennas: Option<usize>,
    #[arg(long)]
    qam: Option<usize>,
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    search_mode: Option<String>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',')]
    snr_grid_db: Option<Vec<f64>>,
    #[arg(long)]
    min_frame_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, requires = "grouping", conflicts_with = "family")]
    design: Option<PathBuf>,
    #[arg(long, requires = "design")]
    grouping: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 4)]
    qam: usize,
    /// Random interference vectors per difference vector.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TradeoffArgs {
    #[arg(long)]
    antennas: usize,
    #[arg(long)]
    delay: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also write the grouping scheme (1-based indices).
    #[arg(long)]
    grouping_out: Option<PathBuf>,
}

#[derive(Args)]
struct RotationArgs {
    #[arg(long)]
    lambda: usize,
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_or_print(path: &Option<PathBuf>, body: &str) -> Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, body)?),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<u8> {
    let mut cfg = SimConfig::load(&args.config)?;
    if let Some(spec) = args.code.spec()? {
        cfg.code = spec;
    }
    if args.code.rotation.is_some() {
        cfg.rotation = args.code.rotation_choice();
    }
    if let Some(v) = args.receive_antennas {
        cfg.receive_antennas = v;
    }
    if let Some(v) = args.qam {
        cfg.qam = v;
    }
    if let Some(v) = &args.decoder {
        cfg.decoder = v.parse::<DecoderKind>()?;
    }
    if let Some(v) = &args.search_mode {
        cfg.search_mode = v.parse::<SearchMode>()?;
    }
    if let Some(v) = args.snr_grid_db {
        cfg.snr_grid_db = v;
    }
    if let Some(v) = args.min_frame_errors {
        cfg.min_frame_errors = v;
    }
    if let Some(v) = args.max_frames {
        cfg.max_frames = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if let Some(v) = args.batch_size {
        cfg.batch_size = v;
    }
    for (slot, flag) in [(&mut cfg.output.csv, args.csv), (&mut cfg.output.json, args.json), (&mut cfg.output.svg, args.svg)] {
        if flag.is_some() {
            *slot = flag;
        }
    }

    let result = run_simulation(&cfg)?;
    print!("{}", results_csv(&result));
    if let Some(fit) = &result.diversity {
        eprintln!("diversity order {:.3} over SNR {:?} dB", fit.order, fit.window_snr_db);
    }
    eprintln!("wall time {:.2} s", result.wall_time_s);
    if let Some(p) = &cfg.output.csv {
        write_results(&result, ResultFormat::Csv, p)?;
    }
    if let Some(p) = &cfg.output.json {
        write_results(&result, ResultFormat::Json, p)?;
    }
    if let Some(p) = &cfg.output.svg {
        let label = format!("{:?} N={} n={} {}", cfg.code.family, cfg.code.antennas, cfg.code.layers, cfg.decoder);
        std::fs::write(p, render_ber(&result, &label))?;
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let alphabet = stbc_lab::channel::PamAlphabet::new(args.qam)?;
    let mode = match args.mode {
        ModeArg::Pic => CriterionMode::Pic,
        ModeArg::Picsic => CriterionMode::Picsic,
    };
    let budget = FalsifyBudget::new(alphabet.len(), args.trials, args.seed);
    let (design, scheme, certified) = if let (Some(d), Some(g)) = (&args.design, &args.grouping) {
        let design = Design::from_json(&std::fs::read_to_string(d)?)?;
        let doc: GroupingDoc = serde_json::from_str(&std::fs::read_to_string(g)?)?;
        let scheme = GroupingScheme::from_doc(&doc, design.num_symbols())?;
        (design, scheme, json!("n/a"))
    } else {
        let spec = args
            .code
            .spec()?
            .ok_or_else(|| StbcError::Config("give --design/--grouping or a named code via --family".into()))?;
        let q = match args.code.rotation_choice() {
            RotationChoice::Certified => build_rotation_with_bound(spec.lambda, (alphabet.len() - 1).max(1) as i64)?,
            RotationChoice::Identity => RotationMatrix::identity(spec.lambda),
        };
        let code = build(spec, &q)?;
        let fine = CodeSpec { variant: GroupingVariant::Fine, ..spec };
        let certified = if mode == CriterionMode::Pic && !pic_structurally_covered(&spec) {
            json!("n/a")
        } else {
            match spec.family {
                Family::LayeredDiagonal => json!(certify_section3(&spec, &q, alphabet.len())?),
                Family::LayeredAlamouti => json!(certify_section4(&fine, &q, alphabet.len())?),
            }
        };
        (code.design, code.grouping, certified)
    };
    let witness = falsify(&design, &scheme, mode, &budget);
    let report = json!({
        "mode": mode,
        "certified": certified,
        "witness": witness,
        "budget": budget,
    });
    write_or_print(&args.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(if witness.is_some() { EXIT_WITNESS } else { 0 })
}

fn tradeoff(args: TradeoffArgs) -> Result<u8> {
    let t = render_tradeoff(args.antennas, args.delay)?;
    println!("{:<12} {:>6} {:>7} {:>8} {:>9}", "family", "lambda", "groups", "rate", "exponent");
    for r in &t.rows {
        println!("{:<12} {:>6} {:>7} {:>8} {:>9}", r.family.label(), r.lambda, r.groups, r.rate.to_string(), r.exponent.to_string());
    }
    if let Some(p) = &args.csv {
        std::fs::write(p, &t.csv)?;
    }
    if let Some(p) = &args.svg {
        std::fs::write(p, &t.svg)?;
    }
    Ok(0)
}

fn build_cmd(args: BuildArgs) -> Result<u8> {
    let spec = args.code.spec()?.ok_or_else(|| StbcError::Config("--family is required".into()))?;
    let q = match args.code.rotation_choice() {
        RotationChoice::Certified => build_rotation_with_bound(spec.lambda, DEFAULT_BOUND)?,
        RotationChoice::Identity => RotationMatrix::identity(spec.lambda),
    };
    let code = build(spec, &q)?;
    std::fs::write(&args.out, code.design.to_json()? + "\n")?;
    if let Some(p) = &args.grouping_out {
        std::fs::write(p, serde_json::to_string_pretty(&code.grouping.to_doc())? + "\n")?;
    }
    println!("K={} T={} N={} g={} rate={} exponent={}", spec.num_symbols(), spec.delay(), spec.antennas, spec.num_groups(), spec.rate(), spec.worst_case_exponent());
    Ok(0)
}

fn rotation(args: RotationArgs) -> Result<u8> {
    let q = build_rotation_with_bound(args.lambda, args.bound)?;
    write_or_print(&args.out, &serde_json::to_string_pretty(&q.to_doc())?)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Tradeoff(a) => tradeoff(a),
        Command::Build(a) => build_cmd(a),
        Command::Rotation(a) => rotation(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}
