//! Configuration-driven front end for the `wgm-qed` simulator: presets,
//! flat config files, and CSV/JSON output.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use config::{parse_pairs, ConfigError, Format, Layers};
use run::RunError;

#[derive(Debug, Parser)]
#[command(name = "wgm-qed", version, about = "QD / whispering-gallery-mode cavity QED simulator")]
struct Cli {
    /// spectrum, classical, obse, g2, anticrossing, nonclassical, transient,
    /// or list-presets. May instead be given as `mode` in the config.
    mode: Option<String>,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter set (see `list-presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    if cli.mode.as_deref() == Some("list-presets") {
        let _ = stdout.write_all(presets::table().as_bytes());
        return 0;
    }
    match run_cli(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli, stdout: &mut dyn Write) -> Result<(), RunError> {
    let mut layers = Layers::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        layers.file = parse_pairs(&text)?;
    }
    for (key, value) in [
        ("mode", cli.mode.clone()),
        ("preset", cli.preset.clone()),
        ("format", cli.format.clone()),
        ("output", cli.out.as_ref().map(|p| p.display().to_string())),
    ] {
        if let Some(v) = value {
            layers.cli.push((key.to_string(), v));
        }
    }
    let cfg = layers.resolve()?;

    let table = match cli.threads {
        Some(0) => {
            return Err(ConfigError::Invalid {
                key: "threads".into(),
                reason: "must be at least 1".into(),
            }
            .into())
        }
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::Invalid {
                key: "threads".into(),
                reason: e.to_string(),
            })?
            .install(|| run::execute(&cfg))?,
        None => run::execute(&cfg)?,
    };

    let text = match cfg.format {
        Format::Csv => output::to_csv(&cfg, &table),
        Format::Json => output::to_json(&cfg, &table),
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        }),
        None => match stdout.write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(RunError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}
