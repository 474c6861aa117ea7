use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use classroom_speech::cli::{self, AlignArgs, CmdOutcome};
use classroom_speech::config::RunConfig;
use classroom_speech::error::Result;
use classroom_speech::model::Role;
use classroom_speech::pipeline;

/// Batch analytics for classroom audio annotations: align transcriber,
/// diarizer, and expert streams, then score reliability, word error rate,
/// speech features, and cross-method agreement.
#[derive(Parser)]
#[command(name = "classroom-speech", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Configuration file plus per-key override flags (same names as the keys).
#[derive(Args, Default)]
struct ConfigArgs {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "epoch_len_s")]
    epoch_len_s: Option<String>,
    #[arg(long = "response_window_s")]
    response_window_s: Option<String>,
    #[arg(long = "stopword_mode")]
    stopword_mode: Option<String>,
    #[arg(long = "zero_alignment_scope")]
    zero_alignment_scope: Option<String>,
    #[arg(long = "missing_as_error")]
    missing_as_error: Option<String>,
    #[arg(long = "include_hyp_only")]
    include_hyp_only: Option<String>,
    #[arg(long = "role_map.kchi")]
    role_map_kchi: Option<String>,
    #[arg(long = "role_map.chi")]
    role_map_chi: Option<String>,
    #[arg(long = "role_map.fem")]
    role_map_fem: Option<String>,
    #[arg(long = "role_map.mal")]
    role_map_mal: Option<String>,
    #[arg(long = "role_map.unknown")]
    role_map_unknown: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let overrides: [(&str, &Option<String>); 11] = [
            ("epoch_len_s", &self.epoch_len_s),
            ("response_window_s", &self.response_window_s),
            ("stopword_mode", &self.stopword_mode),
            ("zero_alignment_scope", &self.zero_alignment_scope),
            ("missing_as_error", &self.missing_as_error),
            ("include_hyp_only", &self.include_hyp_only),
            ("role_map.kchi", &self.role_map_kchi),
            ("role_map.chi", &self.role_map_chi),
            ("role_map.fem", &self.role_map_fem),
            ("role_map.mal", &self.role_map_mal),
            ("role_map.unknown", &self.role_map_unknown),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.set_key(key, value, 0)?;
            }
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Split a wav file into fixed-length epochs plus a manifest.
    Chunk {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Convert a wav file to mono 16 kHz.
    Resample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Collapse runs of three or more identical transcriptions to two.
    Dedup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Align expert and/or diarizer streams onto the transcriber stream.
    Align {
        #[arg(long)]
        transcriber: PathBuf,
        #[arg(long)]
        expert: Option<PathBuf>,
        #[arg(long)]
        diarizer: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// pair or three; inferred from the inputs when omitted.
        #[arg(long)]
        mode: Option<String>,
        /// Role of whoever wore the recorder (teacher/child/other).
        #[arg(long)]
        wearer: Option<String>,
        /// Also write each parsed input as canonical stream JSON.
        #[arg(long)]
        emit_canonical: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Speaker-classification reliability report from timeline files.
    Reliability {
        #[arg(long, required = true, num_args = 1..)]
        timeline: Vec<PathBuf>,
        #[arg(long)]
        out_prefix: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Word error rate report from timeline files.
    Wer {
        #[arg(long, required = true, num_args = 1..)]
        timeline: Vec<PathBuf>,
        #[arg(long)]
        out_prefix: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Speech feature table from timeline files.
    Features {
        #[arg(long, required = true, num_args = 1..)]
        timeline: Vec<PathBuf>,
        #[arg(long)]
        out_prefix: PathBuf,
        /// Which side classifies transcriber utterances: expert or diarizer.
        #[arg(long, default_value = "expert")]
        classifier: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Intraclass correlation table from timeline files.
    Icc {
        #[arg(long, required = true, num_args = 1..)]
        timeline: Vec<PathBuf>,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long, default_value = "expert")]
        classifier: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// dedup + three-way align + every report for a directory of recordings.
    Pipeline {
        #[arg(long)]
        input_dir: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads for per-recording processing.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn run(command: Command) -> Result<CmdOutcome> {
    match command {
        Command::Chunk {
            input,
            out_dir,
            config,
        } => cli::chunk(&input, &out_dir, &config.resolve()?),
        Command::Resample { input, output } => cli::resample(&input, &output),
        Command::Dedup {
            input,
            output,
            config,
        } => cli::dedup(&input, &output, &config.resolve()?),
        Command::Align {
            transcriber,
            expert,
            diarizer,
            output,
            mode,
            wearer,
            emit_canonical,
            config,
        } => {
            let wearer = wearer.as_deref().map(Role::parse_name).transpose()?;
            cli::align_cmd(
                &AlignArgs {
                    transcriber: &transcriber,
                    expert: expert.as_deref(),
                    diarizer: diarizer.as_deref(),
                    output: &output,
                    mode: mode.as_deref(),
                    wearer,
                    emit_canonical,
                },
                &config.resolve()?,
            )
        }
        Command::Reliability {
            timeline,
            out_prefix,
            config,
        } => cli::reliability_cmd(&timeline, &out_prefix, &config.resolve()?),
        Command::Wer {
            timeline,
            out_prefix,
            config,
        } => cli::wer_cmd(&timeline, &out_prefix, &config.resolve()?),
        Command::Features {
            timeline,
            out_prefix,
            classifier,
            config,
        } => cli::features_cmd(
            &timeline,
            &out_prefix,
            cli::parse_classifier(&classifier)?,
            &config.resolve()?,
        ),
        Command::Icc {
            timeline,
            out_prefix,
            classifier,
            config,
        } => cli::icc_cmd(
            &timeline,
            &out_prefix,
            cli::parse_classifier(&classifier)?,
            &config.resolve()?,
        ),
        Command::Pipeline {
            input_dir,
            out_dir,
            jobs,
            config,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            let outcome = pipeline::run(&input_dir, &out_dir, jobs, &config.resolve()?)?;
            for path in &outcome.outputs {
                println!("wrote {}", path.display());
            }
            Ok(CmdOutcome {
                warnings: outcome.warnings,
                notes: outcome.notes,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("note: {note}");
            }
            if outcome.warnings.is_empty() {
                ExitCode::SUCCESS
            } else {
                for warning in &outcome.warnings {
                    eprintln!("warning: {warning}");
                }
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
