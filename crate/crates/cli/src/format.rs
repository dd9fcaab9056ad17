//! Text formats for machines and sample files.
//!
//! A machine file looks like
//!
//! ```text
//! fst ab xy 0
//! state 0 accept
//! state 1
//! trans 0 a 1 xy
//! trans 1 b 0 -
//! epsilon-output -
//! ```
//!
//! `-` stands for an empty alphabet in the header and for the empty output
//! in `trans` and `epsilon-output` lines. A sample file holds one
//! `input<TAB>output` pair per line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nfst_core::{StateId, Transducer, Transition};

use crate::error::CliError;

/// A machine plus the optional output for the empty input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineFile {
    pub machine: Transducer,
    pub epsilon_output: Option<String>,
}

impl MachineFile {
    pub fn new(machine: Transducer) -> Self {
        MachineFile {
            machine,
            epsilon_output: None,
        }
    }

    /// Outputs for `input`; the empty input uses the sidecar when present.
    pub fn transduce(&self, input: &str) -> nfst_core::Result<std::collections::BTreeSet<String>> {
        match (&self.epsilon_output, input.is_empty()) {
            (Some(z), true) => Ok([z.clone()].into()),
            _ => self.machine.transduce(input),
        }
    }
}

fn reserved(c: char) -> bool {
    c == '-' || c.is_whitespace()
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: msg.into(),
    }
}

fn alphabet_token(line: usize, tok: &str) -> Result<Vec<char>, CliError> {
    if tok == "-" {
        return Ok(Vec::new());
    }
    let chars: Vec<char> = tok.chars().collect();
    if let Some(&c) = chars.iter().find(|&&c| reserved(c)) {
        return Err(parse_err(
            line,
            format!("reserved symbol {c:?} in alphabet"),
        ));
    }
    Ok(chars)
}

fn state_token(line: usize, tok: &str) -> Result<StateId, CliError> {
    tok.parse::<u32>()
        .map(StateId)
        .map_err(|_| parse_err(line, format!("bad state id {tok:?}")))
}

fn word_token(tok: &str) -> String {
    if tok == "-" {
        String::new()
    } else {
        tok.to_string()
    }
}

fn word_out(w: &str) -> &str {
    if w.is_empty() {
        "-"
    } else {
        w
    }
}

pub fn parse_machine(text: &str) -> Result<MachineFile, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header line"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [kw, sigma, gamma, init] = toks[..] else {
        return Err(parse_err(
            n,
            "header must be `fst <sigma> <gamma> <initial>`",
        ));
    };
    if kw != "fst" {
        return Err(parse_err(n, "header must start with `fst`"));
    }
    let mut t = Transducer::new(state_token(n, init)?)
        .with_input_alphabet(alphabet_token(n, sigma)?)
        .with_output_alphabet(alphabet_token(n, gamma)?);
    let mut epsilon_output = None;

    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[..] {
            ["state", q] => t.insert_state_raw(state_token(n, q)?),
            ["state", q, "accept"] => t.set_accepting(state_token(n, q)?, true),
            ["trans", src, sym, dst, out] => {
                let mut cs = sym.chars();
                let (Some(symbol), None) = (cs.next(), cs.next()) else {
                    return Err(parse_err(n, format!("symbol {sym:?} is not one character")));
                };
                t.push_transition_raw(Transition::new(
                    state_token(n, src)?,
                    symbol,
                    state_token(n, dst)?,
                    word_token(out),
                ));
            }
            ["epsilon-output", z] if epsilon_output.is_none() => {
                epsilon_output = Some(word_token(z));
            }
            _ => return Err(parse_err(n, format!("unrecognized line {line:?}"))),
        }
    }

    let report = t.validate();
    if let Some(v) = report.violations.first() {
        return Err(CliError::Invalid(v.to_string()));
    }
    Ok(MachineFile {
        machine: t,
        epsilon_output,
    })
}

fn alphabet_out(a: &std::collections::BTreeSet<char>) -> String {
    if a.is_empty() {
        "-".into()
    } else {
        a.iter().collect()
    }
}

/// Canonical text: states ascending, transitions sorted.
pub fn write_machine(m: &MachineFile) -> Result<String, CliError> {
    let t = &m.machine;
    let symbols = t.input_alphabet().iter().chain(t.output_alphabet());
    if let Some(c) = symbols.copied().find(|&c| reserved(c)) {
        return Err(CliError::Invalid(format!(
            "symbol {c:?} cannot be written to a machine file"
        )));
    }
    let mut s = format!(
        "fst {} {} {}\n",
        alphabet_out(t.input_alphabet()),
        alphabet_out(t.output_alphabet()),
        t.initial()
    );
    for &q in t.states() {
        let tag = if t.is_accepting(q) { " accept" } else { "" };
        let _ = writeln!(s, "state {q}{tag}");
    }
    let mut edges: Vec<&Transition> = t.transitions().iter().collect();
    edges.sort_by(|a, b| {
        (a.src, a.symbol, a.dst, &a.output).cmp(&(b.src, b.symbol, b.dst, &b.output))
    });
    for e in edges {
        let _ = writeln!(
            s,
            "trans {} {} {} {}",
            e.src,
            e.symbol,
            e.dst,
            word_out(&e.output)
        );
    }
    if let Some(z) = &m.epsilon_output {
        let _ = writeln!(s, "epsilon-output {}", word_out(z));
    }
    Ok(s)
}

/// Reads `input<TAB>output` lines. Blank lines are skipped. A repeated input
/// must repeat its output.
pub fn parse_samples(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((input, output)) = line.split_once('\t') else {
            return Err(parse_err(i + 1, "expected `input<TAB>output`"));
        };
        if output.contains('\t') {
            return Err(parse_err(i + 1, "more than one tab"));
        }
        match seen.get(input) {
            Some(prev) if prev != output => {
                return Err(CliError::Core(nfst_core::Error::FunctionalConflict {
                    input: input.into(),
                    first: prev.clone(),
                    second: output.into(),
                }))
            }
            Some(_) => continue,
            None => {
                seen.insert(input.into(), output.into());
                pairs.push((input.to_string(), output.to_string()));
            }
        }
    }
    Ok(pairs)
}

pub fn write_samples<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut s = String::new();
    for (i, o) in pairs {
        let _ = writeln!(s, "{i}\t{o}");
    }
    s
}
