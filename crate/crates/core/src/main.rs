use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qconv::agreement::{oracle_check, OracleCheckConfig};
use qconv::montecarlo::{run_sweep, to_csv, with_workers, write_svg, PointConfig};
use qconv::oracle::DEFAULT_CAP;
use qconv::{invariants, CodeFile, CodeParams, Decoder, DecoderMode, Error, IidPauliNoise, Syndrome};

#[derive(Parser, Debug)]
#[command(name = "qconv", version, about = "Viterbi decoding of quantum convolutional codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random code and write it to a code file.
    Gencode(GencodeArgs),
    /// Decode one syndrome.
    Decode(DecodeArgs),
    /// Monte Carlo block error rates of both decoders.
    Bench(BenchArgs),
    /// Compare both decoders with exhaustive enumeration on random instances.
    OracleCheck(OracleArgs),
    /// Run the algebraic invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct GencodeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Default block length stored in the file.
    #[arg(long, default_value_t = 600)]
    tau: usize,
    /// Gate count of the random seed circuit [default: 10·(n+m)²].
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Depolarizing rate: X, Y, Z each with probability p.
    #[arg(long, conflicts_with_all = ["px", "py", "pz"])]
    p: Option<f64>,
    #[arg(long, requires_all = ["py", "pz"])]
    px: Option<f64>,
    #[arg(long, requires_all = ["px", "pz"])]
    py: Option<f64>,
    #[arg(long, requires_all = ["px", "py"])]
    pz: Option<f64>,
}

impl NoiseArgs {
    fn resolve(&self) -> qconv::Result<IidPauliNoise> {
        match (self.p, self.px, self.py, self.pz) {
            (Some(p), ..) => IidPauliNoise::depolarizing(p),
            (None, Some(x), Some(y), Some(z)) => IidPauliNoise::new(x, y, z),
            _ => Err(invalid("p", "give --p or all of --px --py --pz")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Degenerate,
    Nondegenerate,
    Both,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Block length [default: the code file's].
    #[arg(long)]
    tau: Option<usize>,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Syndrome file, or `zeros`.
    #[arg(long)]
    syndrome: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Write the (super-)edge listing to a file, or `-` for stdout.
    #[arg(long)]
    dump_trellis: Option<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Code file; may be repeated.
    #[arg(long, required = true)]
    code: Vec<PathBuf>,
    #[arg(long)]
    tau: Option<usize>,
    /// Comma-separated depolarizing rates.
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    min_failures: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially. Results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    tau: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    /// Largest coset the enumeration may visit.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

fn load_code(path: &Path, tau: Option<usize>) -> qconv::Result<(CodeFile, qconv::ConvolutionalCode)> {
    let file = CodeFile::read(path)?;
    let code = file.code(tau)?;
    Ok((file, code))
}

fn gencode(a: &GencodeArgs) -> qconv::Result<()> {
    let params = CodeParams::new(a.n, a.k, a.m)?;
    if a.tau < 1 {
        return Err(invalid("tau", "must be at least 1"));
    }
    println!(
        "# gencode n={} k={} m={} tau={} seed={} depth={} out={}",
        a.n,
        a.k,
        a.m,
        a.tau,
        a.seed,
        a.depth.map_or_else(|| format!("default({})", qconv::symplectic::default_depth(a.n + a.m)), |d| d.to_string()),
        a.out.display()
    );
    CodeFile::generate(params, a.tau, a.seed, a.depth)?.write(&a.out)
}

fn decode(a: &DecodeArgs) -> qconv::Result<()> {
    let noise = a.noise.resolve()?;
    let (_, code) = load_code(&a.code, a.tau)?;
    let syndrome = if a.syndrome == "zeros" {
        Syndrome::zeros(code.params(), code.tau())
    } else {
        let path = PathBuf::from(&a.syndrome);
        let text = fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
        Syndrome::parse(code.params(), &text)?
    };
    if syndrome.tau() != code.tau() {
        return Err(invalid(
            "syndrome",
            format!("{} frames but tau = {}", syndrome.tau(), code.tau()),
        ));
    }
    println!(
        "# decode code={} {} tau={} px={} py={} pz={} syndrome={} mode={:?}",
        a.code.display(),
        code.params(),
        code.tau(),
        noise.p_x(),
        noise.p_y(),
        noise.p_z(),
        a.syndrome,
        a.mode
    );
    let modes: &[DecoderMode] = match a.mode {
        ModeArg::Degenerate => &[DecoderMode::Degenerate],
        ModeArg::Nondegenerate => &[DecoderMode::NonDegenerate],
        ModeArg::Both => &[DecoderMode::Degenerate, DecoderMode::NonDegenerate],
    };
    let mut dump = String::new();
    for &mode in modes {
        let decoder = Decoder::new(code.clone(), noise, mode);
        let out = decoder.decode(&syndrome)?;
        println!("{} labels {}", mode.name(), out.labels_text(code.k()));
        println!("{} weight {}", mode.name(), out.path_weight);
        if let Some(e) = &out.physical_error {
            println!("{} error {e}", mode.name());
        }
        if a.dump_trellis.is_some() {
            dump.push_str(&format!("# {}\n", mode.name()));
            dump.push_str(&decoder.trellis(&syndrome)?.dump(code.n(), code.k()));
        }
    }
    match a.dump_trellis.as_deref() {
        Some("-") => print!("{dump}"),
        Some(path) => {
            let path = PathBuf::from(path);
            fs::write(&path, dump).map_err(|source| Error::Io { path, source })?;
        }
        None => {}
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> qconv::Result<()> {
    if a.workers < 1 {
        return Err(invalid("workers", "must be at least 1"));
    }
    if a.min_failures < 1 {
        return Err(invalid("min-failures", "must be at least 1"));
    }
    let mut codes = Vec::new();
    for path in &a.code {
        let (_, code) = load_code(path, a.tau)?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        codes.push((id, code));
    }
    let cfg = PointConfig {
        min_failures: a.min_failures,
        max_trials: a.max_trials,
        seed: a.seed,
    };
    println!(
        "# bench codes={:?} tau={} p_list={:?} min_failures={} max_trials={} seed={} workers={} out={} plot={}",
        a.code,
        a.tau.map_or_else(|| "file default".to_string(), |t| t.to_string()),
        a.p_list,
        a.min_failures,
        a.max_trials,
        a.seed,
        a.workers,
        a.out.display(),
        a.plot.as_ref().map_or_else(|| "none".to_string(), |p| p.display().to_string())
    );
    let start = Instant::now();
    let points = with_workers(a.workers, |exec| run_sweep(&codes, &a.p_list, cfg, exec))?;
    let csv = to_csv(&points);
    fs::write(&a.out, &csv).map_err(|source| Error::Io {
        path: a.out.clone(),
        source,
    })?;
    for p in &points {
        let (diff, se) = p.paired_difference();
        println!(
            "{} p={} trials={} ber_deg={:.4e} ber_nondeg={:.4e} ratio={} paired_diff={:.3e}±{:.1e}{}",
            p.code_id,
            p.p,
            p.trials,
            p.ber_deg(),
            p.ber_nondeg(),
            p.ratio().map_or_else(|| "-".to_string(), |r| format!("{r:.3}")),
            diff,
            se,
            if p.resolved { "" } else { " (unresolved)" }
        );
    }
    if let Some(plot) = &a.plot {
        write_svg(plot, &points)?;
    }
    println!("# elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}

/// Returns whether every instance agreed.
fn oracle(a: &OracleArgs) -> qconv::Result<bool> {
    let cfg = OracleCheckConfig {
        params: CodeParams::new(a.n, a.k, a.m)?,
        tau: a.tau,
        trials: a.trials,
        seed: a.seed,
        p: a.p,
        cap: a.cap,
    };
    if a.tau < 1 {
        return Err(invalid("tau", "must be at least 1"));
    }
    println!(
        "# oracle-check n={} k={} m={} tau={} trials={} seed={} p={} cap={} workers={}",
        a.n, a.k, a.m, a.tau, a.trials, a.seed, a.p, a.cap, a.workers
    );
    let stats = with_workers(a.workers, |exec| oracle_check(&cfg, exec))?;
    println!("instances {}", stats.instances);
    println!("merged weight matches {}/{}", stats.merged_weight_matches, stats.instances);
    println!("merged bitwise matches {}/{}", stats.merged_bitwise_matches, stats.instances);
    println!("merged path matches {}/{}", stats.merged_label_matches, stats.instances);
    println!("single weight matches {}/{}", stats.single_weight_matches, stats.instances);
    println!("single error matches {}/{}", stats.single_error_matches, stats.instances);
    println!("class argmax agreements {}/{}", stats.class_map_agreements, stats.instances);
    println!("max merged gap {:e}", stats.max_merged_gap);
    println!("max single gap {:e}", stats.max_single_gap);
    Ok(stats.all_merged_match() && stats.all_single_match())
}

fn selftest(a: &SelftestArgs) -> qconv::Result<bool> {
    println!("# selftest seed={}", a.seed);
    let mut ok = true;
    for r in invariants::run_all(a.seed)? {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        ok &= r.passed;
    }
    Ok(ok)
}

fn report(e: Error) -> ExitCode {
    match e {
        Error::InvalidParameter { name, reason } => eprintln!("error: invalid value for --{name}: {reason}"),
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gencode(a) => gencode(a).map(|_| true),
        Command::Decode(a) => decode(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::OracleCheck(a) => oracle(a),
        Command::Selftest(a) => selftest(a),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: check failed");
            ExitCode::from(1)
        }
        Err(e) => report(e),
    }
}
