use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use smitask::curation::{arrange, curriculum_sort, prune, PruneBand};
use smitask::dataset::{self, build, write_output, BuildConfig, Split};
use smitask::eval::{load_predictions, score_dataset};
use smitask::graph::{
    default_library, load_group_library, longest_carbon_chain, match_pattern, perceive_rings,
};
use smitask::synth::{synthesize, to_smi, SynthConfig};
use smitask::{canonicalize, parse, TaskKind};

#[derive(Parser)]
#[command(
    name = "smitask",
    version,
    about = "SMILES parsing task datasets: build, curate, score"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a task dataset from a .smi corpus.
    Generate(GenerateArgs),
    /// Keep records inside a per-task difficulty percentile band.
    Prune {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0.2:0.8")]
        band: PruneBand,
    },
    /// Sort records easy-to-hard within each task.
    Curriculum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Round-robin across tasks instead of one block per task.
        #[arg(long)]
        interleave: bool,
    },
    /// Score predictions against a gold dataset.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print canonical SMILES for an argument or for each stdin line.
    Canon { smiles: Option<String> },
    /// Show how a SMILES string is understood.
    ParseDebug {
        smiles: String,
        #[arg(long, env = "SMITASK_GROUPS")]
        groups: Option<PathBuf>,
    },
    /// Write a deterministic synthetic .smi corpus.
    Synth {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// `all` or a comma-separated list of task names.
    #[arg(long, default_value = "all")]
    task: String,
    #[arg(long, default_value_t = 50_000)]
    per_task: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "0.2:0.8")]
    band: PruneBand,
    #[arg(long, default_value = "train")]
    split: Split,
    /// Molecules sampled for a test build.
    #[arg(long, default_value_t = 10_000)]
    test_size: usize,
    /// Partition the corpus by canonical-SMILES hash, sending this fraction
    /// to the test split.
    #[arg(long, value_name = "FRACTION")]
    split_hash: Option<f64>,
    /// Candidates generated per task as a multiple of --per-task.
    #[arg(long, default_value_t = 3)]
    overgeneration: usize,
    #[arg(long)]
    interleave: bool,
    #[arg(long, env = "SMITASK_TEMPLATES")]
    templates: Option<PathBuf>,
    #[arg(long, env = "SMITASK_GROUPS")]
    groups: Option<PathBuf>,
}

fn parse_tasks(list: &str) -> Result<Vec<TaskKind>> {
    if list == "all" {
        return Ok(TaskKind::ALL.to_vec());
    }
    list.split(',')
        .map(|t| Ok(t.trim().parse::<TaskKind>()?))
        .collect()
}

fn generate(args: GenerateArgs) -> Result<()> {
    let config = BuildConfig {
        tasks: parse_tasks(&args.task)?,
        per_task: args.per_task,
        seed: args.seed,
        band: args.band,
        split: args.split,
        test_size: args.test_size,
        holdout: args.split_hash,
        overgeneration: args.overgeneration,
        interleave: args.interleave,
        templates: args.templates,
        groups: args.groups,
        ..BuildConfig::new(args.input)
    };
    let output = build(&config)?;
    write_output(&output, &args.out)?;
    let m = &output.manifest;
    println!("wrote {} records to {}", m.total, args.out.display());
    for (task, n) in &m.counts {
        let d = &m.difficulty[task];
        println!(
            "  {:<18} {:>7}  difficulty min {} median {} max {}",
            task.name(),
            n,
            d.min,
            d.median,
            d.max
        );
    }
    println!("content sha256 {}", m.content_sha256);
    Ok(())
}

fn load(path: &Path) -> Result<Vec<smitask::TaskRecord>> {
    dataset::load_jsonl(path).with_context(|| format!("reading {}", path.display()))
}

fn canon(smiles: Option<String>) -> Result<()> {
    let lines: Vec<String> = match smiles {
        Some(s) => vec![s],
        None => io::stdin().lock().lines().collect::<io::Result<_>>()?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let (mut ok, mut failed) = (0, 0);
    for (i, line) in lines.iter().enumerate() {
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        match parse(s) {
            Ok(mol) => {
                writeln!(out, "{}", canonicalize(&mol))?;
                ok += 1;
            }
            Err(e) => {
                eprintln!("line {}: {s}: {e}", i + 1);
                failed += 1;
            }
        }
    }
    if ok == 0 && failed > 0 {
        bail!("no input could be parsed");
    }
    Ok(())
}

fn parse_debug(smiles: &str, groups: Option<PathBuf>) -> Result<()> {
    let mol = parse(smiles).map_err(|e| {
        let pointer = format!("{}^", " ".repeat(e.offset()));
        anyhow::anyhow!("{e}\n  {smiles}\n  {pointer}")
    })?;
    let library = match groups {
        Some(p) => load_group_library(&p)
            .map_err(|e| anyhow::anyhow!("{}: line {}: {}", p.display(), e.line, e.message))?,
        None => default_library(),
    };
    let mut s = String::new();
    s.push_str(&format!("atoms {}\n", mol.atom_count()));
    s.push_str("  idx element aromatic charge h ring\n");
    for (i, a) in mol.atoms().iter().enumerate() {
        s.push_str(&format!(
            "  {:>3} {:<7} {:<8} {:>6} {} {}\n",
            i,
            a.element.symbol(),
            if a.aromatic { "yes" } else { "no" },
            a.formal_charge,
            a.total_h(),
            if mol.atom_in_ring(i) { "yes" } else { "no" }
        ));
    }
    s.push_str(&format!("bonds {}\n", mol.bond_count()));
    for b in mol.bonds() {
        s.push_str(&format!(
            "  {}-{} {:?}{}\n",
            b.a,
            b.b,
            b.order,
            if b.in_ring { " ring" } else { "" }
        ));
    }
    let rings = perceive_rings(&mol);
    s.push_str(&format!("rings {}\n", rings.len()));
    for r in &rings.rings {
        let atoms: Vec<String> = r.iter().map(usize::to_string).collect();
        s.push_str(&format!("  size {}: {}\n", r.len(), atoms.join(" ")));
    }
    let chain = longest_carbon_chain(&mol);
    let path: Vec<String> = chain.path.iter().map(usize::to_string).collect();
    s.push_str(&format!("chain {}: {}\n", chain.length, path.join(" ")));
    let matched: Vec<&str> = library
        .iter()
        .filter(|g| match_pattern(&mol, g))
        .map(|g| g.name.as_str())
        .collect();
    s.push_str(&format!("groups {}\n", matched.join(" ")));
    s.push_str(&format!("canonical {}\n", canonicalize(&mol)));
    print!("{s}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Prune { input, out, band } => {
            let records = load(&input)?;
            let before = records.len();
            let kept = prune(records, band)?;
            dataset::emit_jsonl(&kept, &out)?;
            println!("kept {} of {before} records", kept.len());
            Ok(())
        }
        Command::Curriculum {
            input,
            out,
            interleave,
        } => {
            let records = arrange(curriculum_sort(load(&input)?), interleave);
            dataset::emit_jsonl(&records, &out)?;
            println!("sorted {} records", records.len());
            Ok(())
        }
        Command::Eval { gold, pred, report } => {
            let golds = load(&gold)?;
            let preds =
                load_predictions(&pred).with_context(|| format!("reading {}", pred.display()))?;
            let r = score_dataset(&preds, &golds)?;
            if let Some(path) = report {
                let mut text = serde_json::to_string_pretty(&r)?;
                text.push('\n');
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", r.to_text());
            Ok(())
        }
        Command::Canon { smiles } => canon(smiles),
        Command::ParseDebug { smiles, groups } => parse_debug(&smiles, groups),
        Command::Synth { count, seed, out } => {
            let text = to_smi(&synthesize(count, seed, SynthConfig::default()));
            fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            info!("wrote {count} molecules");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
