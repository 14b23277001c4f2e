use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use aedcst::codec::{compress_block, decompress_block, hybrid_decode, hybrid_encode, CompressedBlockStream};
use aedcst::metrics::MetricsReport;
use aedcst::model::{Domain, Model, ModelParams};
use aedcst::pipeline::{
    evaluate_model, generate_synthetic, ingest, run_variant, standard_dcst, Dataset, DatasetSpec, Delimiter, RunConfig,
    SyntheticSpec, Variant,
};
use aedcst::training::train;

#[derive(Parser)]
#[command(name = "aedcst", version, about = "Learned DCST compression of vibration signals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train an autoencoder on the leading split of a dataset.
    Train(TrainArgs),
    /// Compress the test split of a dataset with trained weights.
    Compress(CompressArgs),
    /// Decode a container back to samples.
    Decompress(DecompressArgs),
    /// Score a reconstruction, or run a variant in-process.
    Evaluate(EvaluateArgs),
    /// Write a synthetic gear-like signal.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Zero-based column index.
    #[arg(long, default_value_t = 0)]
    column: usize,
    #[arg(long, value_enum, default_value = "auto")]
    delimiter: DelimArg,
    #[arg(long, default_value_t = 0.2)]
    train_fraction: f64,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    theta: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bits_per_sample: Option<u32>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DelimArg {
    Auto,
    Comma,
    Tab,
    Whitespace,
    Semicolon,
}

impl From<DelimArg> for Delimiter {
    fn from(d: DelimArg) -> Self {
        match d {
            DelimArg::Auto => Delimiter::Auto,
            DelimArg::Comma => Delimiter::Comma,
            DelimArg::Tab => Delimiter::Tab,
            DelimArg::Whitespace => Delimiter::Whitespace,
            DelimArg::Semicolon => Delimiter::Semicolon,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    over: Overrides,
    /// ae-dcst or ae-dct.
    #[arg(long, default_value = "ae-dcst")]
    variant: Variant,
    /// Output weights file.
    #[arg(long)]
    weights: PathBuf,
    /// Per-epoch training log (defaults to <weights>.log).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    over: Overrides,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(long)]
    weights: PathBuf,
    /// Container file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Undo normalization using the sidecar written by compress.
    #[arg(long)]
    source_units: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    over: Overrides,
    /// Normalized reconstruction written by decompress.
    #[arg(long, requires = "container")]
    reconstructed: Option<PathBuf>,
    #[arg(long)]
    container: Option<PathBuf>,
    /// In-process run of this variant when no reconstruction is given.
    #[arg(long)]
    variant: Option<Variant>,
    /// Use these weights instead of training.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// TOML synthetic spec.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

/// Sidecar metadata next to weights and containers.
#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    divisor: f64,
    int_scale: f64,
    column: usize,
    train_blocks: usize,
    test_blocks: usize,
    dropped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epochs_run: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stopped_early: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    train_prd: Option<f64>,
}

impl Meta {
    fn of(ds: &Dataset, column: usize) -> Self {
        Meta {
            divisor: ds.norm.divisor,
            int_scale: ds.norm.int_scale,
            column,
            train_blocks: ds.train.len(),
            test_blocks: ds.test.len(),
            dropped: ds.dropped,
            variant: None,
            epochs_run: None,
            stopped_early: None,
            train_prd: None,
        }
    }

    fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?).with_context(|| format!("writing {}", path.display()))
    }

    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn run_config(o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = o.xi {
        cfg.train.xi = v;
    }
    if let Some(v) = o.phi {
        cfg.codec.phi = v;
    }
    if let Some(v) = o.theta {
        cfg.codec.theta = v;
    }
    if let Some(v) = o.seed {
        cfg.train.seed = v;
    }
    if let Some(v) = o.bits_per_sample {
        cfg.codec.bits_per_sample = v;
    }
    cfg.train.validate()?;
    cfg.codec.validate()?;
    Ok(cfg)
}

fn load_data(d: &DataArgs, h: usize) -> Result<Dataset> {
    let spec = DatasetSpec {
        path: d.dataset.clone(),
        column: d.column,
        train_fraction: d.train_fraction,
        block_len: h,
        delimiter: d.delimiter.into(),
    };
    let ds = ingest(&spec).with_context(|| format!("ingesting {}", d.dataset.display()))?;
    log::info!(
        "{}: {} training blocks, {} test blocks, {} samples dropped, divisor {}",
        d.dataset.display(),
        ds.train.len(),
        ds.test.len(),
        ds.dropped,
        ds.norm.divisor
    );
    Ok(ds)
}

fn write_samples(path: &Path, xs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for x in xs {
        writeln!(f, "{x}")?;
    }
    f.flush()?;
    Ok(())
}

fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| l.trim().parse::<f64>().with_context(|| format!("{}:{}: not a number", path.display(), i + 1)))
        .collect()
}

fn report(r: &MetricsReport, out: Option<&Path>) -> Result<()> {
    println!("{r}");
    println!("{}", r.to_json());
    if let Some(p) = out {
        fs::write(p, r.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let cfg = run_config(&a.over)?;
    let domain = match a.variant {
        Variant::AeDcst => Domain::Dcst,
        Variant::AeDct => Domain::Dct,
        Variant::StandardDcst => bail!("standard-dcst has no learned weights"),
    };
    let ds = load_data(&a.data, cfg.model.h)?;
    let outcome = train(&ds.train, &aedcst::model::ModelConfig { domain, ..cfg.model }, &cfg.train)?;
    outcome.params.save(&a.weights)?;
    let log_path = a.log.unwrap_or_else(|| {
        let mut s = a.weights.as_os_str().to_owned();
        s.push(".log");
        PathBuf::from(s)
    });
    let mut lines = vec![outcome.initial.to_string()];
    lines.extend(outcome.history.iter().map(|l| l.to_string()));
    fs::write(&log_path, lines.join("\n") + "\n")?;
    let best = outcome.history.iter().map(|l| l.prd).fold(outcome.initial.prd, f64::min);
    let mut meta = Meta::of(&ds, a.data.column);
    meta.variant = Some(a.variant);
    meta.epochs_run = Some(outcome.history.len());
    meta.stopped_early = Some(outcome.stopped_early);
    meta.train_prd = Some(best);
    meta.save(&sidecar(&a.weights))?;
    println!(
        "trained {} epochs{}; best training PRD {best:.4}; weights {}",
        outcome.history.len(),
        if outcome.stopped_early { " (zero-fraction stop)" } else { "" },
        a.weights.display()
    );
    Ok(())
}

fn cmd_compress(a: CompressArgs) -> Result<()> {
    let cfg = run_config(&a.over)?;
    let model = Model::new(ModelParams::load(&a.weights).with_context(|| format!("loading {}", a.weights.display()))?)?;
    let ds = load_data(&a.data, model.params().h)?;
    if ds.test.is_empty() {
        bail!("test split is empty");
    }
    let q = ds
        .test
        .iter()
        .map(|x| compress_block(x, &model, cfg.codec.phi, cfg.codec.theta))
        .collect::<aedcst::Result<Vec<_>>>()?;
    let stream = hybrid_encode(&q, model.params().h, cfg.codec.theta, cfg.codec.phi)?;
    stream.save(&a.out)?;
    Meta::of(&ds, a.data.column).save(&sidecar(&a.out))?;
    println!("{} blocks -> {} bytes ({})", q.len(), stream.size_bytes(), a.out.display());
    Ok(())
}

fn cmd_decompress(a: DecompressArgs) -> Result<()> {
    let model = Model::new(ModelParams::load(&a.weights).with_context(|| format!("loading {}", a.weights.display()))?)?;
    let stream = CompressedBlockStream::load(&a.input).with_context(|| format!("loading {}", a.input.display()))?;
    if stream.h as usize != model.params().h || stream.n as usize != model.params().n {
        bail!("container is {}x{}, weights are {}x{}", stream.h, stream.n, model.params().h, model.params().n);
    }
    let mut rec = Vec::new();
    for q in hybrid_decode(&stream)? {
        rec.extend(decompress_block(&q, &model, stream.phi, stream.theta)?);
    }
    if a.source_units {
        let meta = Meta::load(&sidecar(&a.input))?;
        let norm = aedcst::pipeline::Normalization { divisor: meta.divisor, int_scale: meta.int_scale };
        write_samples(&a.out, rec.iter().map(|&v| norm.to_source(v)))?;
    } else {
        write_samples(&a.out, rec.iter().copied())?;
    }
    println!("{} samples -> {}", rec.len(), a.out.display());
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let cfg = run_config(&a.over)?;
    if let (Some(rec_path), Some(c_path)) = (&a.reconstructed, &a.container) {
        let stream = CompressedBlockStream::load(c_path).with_context(|| format!("loading {}", c_path.display()))?;
        let ds = load_data(&a.data, stream.h as usize)?;
        let orig = ds.test_samples();
        let rec = read_samples(rec_path)?;
        if rec.len() != orig.len() {
            bail!("reconstruction has {} samples, test split has {}", rec.len(), orig.len());
        }
        let decoded = hybrid_decode(&stream)?;
        let n_coe = decoded.iter().map(|q| q.nonzero_count()).sum::<usize>() as f64 / decoded.len().max(1) as f64;
        let original_bits = cfg.codec.bits_per_sample as u64 * orig.len() as u64;
        let r = MetricsReport::compute(&orig, &rec, original_bits, stream.compressed_bits(cfg.codec.include_tables), n_coe)?;
        return report(&r, a.out.as_deref());
    }
    let variant = a.variant.unwrap_or(Variant::AeDcst);
    let ds = load_data(&a.data, cfg.model.h)?;
    let eval = match (variant, &a.weights) {
        (Variant::StandardDcst, _) => standard_dcst(&ds.test_samples(), &cfg.codec)?,
        (_, Some(w)) => {
            let model = Model::new(ModelParams::load(w).with_context(|| format!("loading {}", w.display()))?)?;
            evaluate_model(&model, &ds.test, &cfg.codec)?
        }
        (_, None) => run_variant(variant, &ds, &cfg)?.evaluation,
    };
    println!("variant {variant}");
    report(&eval.report, a.out.as_deref())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str::<SyntheticSpec>(&text)?
        }
        None => SyntheticSpec::default(),
    };
    if let Some(v) = a.samples {
        spec.samples = v;
    }
    if let Some(v) = a.noise {
        spec.noise_std = v;
    }
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    let x = generate_synthetic(&spec)?;
    write_samples(&a.out, x.iter().copied())?;
    println!("{} samples -> {}", x.len(), a.out.display());
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AEDCST_LOG", "warn")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Train(a) => cmd_train(a),
        Cmd::Compress(a) => cmd_compress(a),
        Cmd::Decompress(a) => cmd_decompress(a),
        Cmd::Evaluate(a) => cmd_evaluate(a),
        Cmd::Synth(a) => cmd_synth(a),
    };
    if let Err(e) = res {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
