use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nfst_core::oracle::{
    check_functional_up_to, check_local_prefix_preservation_up_to, generate_informant,
};
use nfst_core::transform::{disambiguate, totalize};
use nfst_core::{ambiguity_witness, infer, LearnerConfig};

use crate::dot::to_dot;
use crate::error::CliError;
use crate::format::{parse_machine, parse_samples, write_machine, write_samples, MachineFile};

#[derive(Debug, Parser)]
#[command(
    name = "nfst",
    version,
    about = "Learn and inspect functional transducers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a machine from a sample file.
    Learn {
        samples: PathBuf,
        /// Machine file to write; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Log every merge attempt on standard error.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        max_passes: usize,
    },
    /// Run a machine on one input.
    Eval {
        machine: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Check properties; all of them when none is selected.
    Check {
        machine: PathBuf,
        #[arg(long)]
        functional: bool,
        #[arg(long)]
        ambiguity: bool,
        #[arg(long)]
        lpp: bool,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    Transform {
        machine: PathBuf,
        #[command(flatten)]
        op: TransformOp,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write every accepted input up to a length with its output.
    GenInformant {
        machine: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    ExportDot {
        machine: PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TransformOp {
    /// Complete the machine, sending rejected inputs to this output symbol.
    #[arg(long, value_name = "SYM")]
    totalize: Option<char>,
    #[arg(long)]
    disambiguate: bool,
    #[arg(long)]
    trim: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load(path: &Path) -> Result<MachineFile, CliError> {
    parse_machine(&read(path)?)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_owned(),
            source,
        }),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

/// Runs one command and returns its exit status: 0 on success, 1 on a
/// domain failure, 2 on malformed or non-functional input.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Learn {
            samples,
            output,
            trace,
            max_passes,
        } => {
            let pairs = parse_samples(&read(&samples)?)?;
            let cfg = LearnerConfig {
                max_merge_passes: max_passes,
                emit_trace: trace,
                ..Default::default()
            };
            let model = infer(pairs, &cfg)?;
            for ev in &model.trace {
                let _ = writeln!(err, "{ev}");
            }
            let file = MachineFile {
                machine: model.machine,
                epsilon_output: model.epsilon_output,
            };
            emit(output.as_deref(), &write_machine(&file)?, out)?;
            Ok(0)
        }

        Command::Eval { machine, input } => {
            let m = load(&machine)?;
            let outputs = match m.transduce(&input) {
                Ok(o) => o,
                Err(nfst_core::Error::UnknownSymbol(c)) => {
                    let _ = writeln!(err, "symbol {c:?} is not in the input alphabet");
                    Default::default()
                }
                Err(e) => return Err(e.into()),
            };
            match outputs.len() {
                0 => {
                    let _ = writeln!(out, "REJECT");
                    Ok(1)
                }
                1 => {
                    let _ = writeln!(out, "{}", outputs.first().unwrap());
                    Ok(0)
                }
                _ => {
                    let _ = writeln!(err, "not functional on {input:?}");
                    for o in outputs {
                        let _ = writeln!(out, "{o}");
                    }
                    Ok(2)
                }
            }
        }

        Command::Check {
            machine,
            functional,
            ambiguity,
            lpp,
            max_len,
        } => {
            let t = load(&machine)?.machine;
            let all = !(functional || ambiguity || lpp);
            let mut ok = true;
            if all || functional {
                let r = check_functional_up_to(&t, max_len);
                ok &= r.verdict;
                let _ = writeln!(out, "{r}");
            }
            if all || ambiguity {
                match ambiguity_witness(&t) {
                    None => {
                        let _ = writeln!(out, "unambiguous: holds");
                    }
                    Some(w) => {
                        ok = false;
                        let _ = writeln!(out, "unambiguous: fails at input {:?}", w.input);
                        let (p, q) = w.paths(&t);
                        for path in [p, q] {
                            let steps: Vec<String> =
                                path.edges.iter().map(ToString::to_string).collect();
                            let _ = writeln!(out, "  path {}", steps.join(", "));
                        }
                    }
                }
            }
            if all || lpp {
                let r = check_local_prefix_preservation_up_to(&t, max_len);
                ok &= r.verdict;
                let _ = writeln!(out, "{r}");
            }
            Ok(if ok { 0 } else { 1 })
        }

        Command::Transform {
            machine,
            op,
            output,
        } => {
            let mut m = load(&machine)?;
            m.machine = match (op.totalize, op.disambiguate) {
                (Some(sym), _) => totalize(&m.machine, sym)?,
                (None, true) => disambiguate(&m.machine),
                (None, false) => m.machine.trim(),
            };
            emit(output.as_deref(), &write_machine(&m)?, out)?;
            Ok(0)
        }

        Command::GenInformant {
            machine,
            max_len,
            output,
        } => {
            let m = load(&machine)?;
            let mut pairs = generate_informant(&m.machine, max_len)?;
            if let Some(z) = &m.epsilon_output {
                match pairs.first_mut() {
                    Some((i, o)) if i.is_empty() => *o = z.clone(),
                    _ => pairs.insert(0, (String::new(), z.clone())),
                }
            }
            let text = write_samples(pairs.iter().map(|(i, o)| (i.as_str(), o.as_str())));
            emit(output.as_deref(), &text, out)?;
            Ok(0)
        }

        Command::ExportDot { machine } => {
            let _ = out.write_all(to_dot(&load(&machine)?.machine).as_bytes());
            Ok(0)
        }
    }
}
