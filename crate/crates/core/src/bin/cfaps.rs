use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cfaps::harness::{
    ablate, evaluate, format_boxes, grid_plan, load_otb_sequence, read_boxes, render_table, synth_sequence, table_plan,
    SynthSpec,
};
use cfaps::selection::InstanceMode;
use cfaps::tracker::{run_sequence, TrackerConfig};
use cfaps::{Error, Result, TargetState};

#[derive(Parser)]
#[command(name = "cfaps", version, about = "Correlation-filter tracking with adaptive proposal selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a sequence from its first ground-truth box.
    Track {
        seq_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Results file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a results file against the sequence ground truth.
    Eval {
        seq_dir: PathBuf,
        results: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep keep fractions and instance modes.
    Ablate {
        seq_dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7,1.0")]
        fractions: Vec<f64>,
        /// Comma-separated modes; omitted means every fraction with both
        /// instances plus each single instance at 50%.
        #[arg(long, value_delimiter = ',')]
        instance: Vec<InstanceMode>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Render a synthetic sequence in OTB layout.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Per-stage timing table for one tracking run.
    Bench {
        seq_dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<TrackerConfig> {
    path.map_or_else(|| Ok(TrackerConfig::default()), TrackerConfig::load)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Track { seq_dir, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let seq = load_otb_sequence(&seq_dir)?;
            let run = run_sequence(seq.iter_frames(), &seq.groundtruth[0], &cfg)?;
            let text = format_boxes(&run.states);
            match out {
                Some(p) => fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Command::Eval { seq_dir, results, json } => {
            let seq = load_otb_sequence(&seq_dir)?;
            let preds: Vec<TargetState> = read_boxes(&results)?.iter().map(TargetState::from_bbox).collect();
            let report = evaluate(&preds, &seq.groundtruth, None)?.with_attributes(&seq.attributes);
            println!("{}: {} frames, DP@20 {:.1}%, AUC {:.1}%", seq.name, preds.len(), report.dp20 * 100.0, report.auc * 100.0);
            if let Some(p) = json {
                write_json(&p, &report)?;
            }
        }
        Command::Ablate { seq_dir, fractions, instance, config, json } => {
            let cfg = load_config(config.as_deref())?;
            let seq = load_otb_sequence(&seq_dir)?.preload()?;
            let plan = if instance.is_empty() {
                table_plan(&fractions)
            } else {
                grid_plan(&fractions, &instance)
            };
            let rows = ablate(&seq, &cfg, &plan)?;
            print!("{}", render_table(&rows));
            if let Some(p) = json {
                write_json(&p, &rows)?;
            }
        }
        Command::Synth { spec, out, seed } => {
            let spec = SynthSpec::load(&spec)?;
            let seq = synth_sequence(&spec, seed)?;
            seq.write_otb(&out)?;
            println!("wrote {} frames to {}", seq.len(), out.display());
        }
        Command::Bench { seq_dir, config } => {
            let cfg = load_config(config.as_deref())?;
            let seq = load_otb_sequence(&seq_dir)?.preload()?;
            let run = run_sequence(seq.iter_frames(), &seq.groundtruth[0], &cfg)?;
            let totals = run.stage_totals();
            let all = totals.sum().as_secs_f64().max(f64::MIN_POSITIVE);
            println!("{:<12} {:>10} {:>7}", "stage", "ms/frame", "share");
            for (name, d) in totals.named() {
                let s = d.as_secs_f64();
                println!("{name:<12} {:>10.3} {:>6.1}%", s * 1e3 / run.states.len() as f64, 100.0 * s / all);
            }
            println!("{} frames, {:.1} fps", run.states.len(), run.fps());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
