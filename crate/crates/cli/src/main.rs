//! `rfod`: check proof scripts, replay the fixed constructions and query the
//! quantum backend.

mod derive;

use std::fmt::Display;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rfod_core::calculus::{DomainJson, ProofScript};
use rfod_core::quantum::{density_of, emit_assertion, measure_as, purity, AssertionInput, Basis, QState, QuantumError};
use rfod_core::tolerance::ENTANGLEMENT_TOL;
use rfod_core::{CheckReport, TheoryConfig};

#[derive(Parser)]
#[command(name = "rfod", version, about = "Proof kernel for sequents over random first-order domains")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script (text, or JSON when it starts with `{`); `-` reads stdin.
    Check {
        file: PathBuf,
        #[command(flatten)]
        theory: TheoryFlags,
    },
    /// Emit one of the fixed constructions as a proof script, with its check report.
    Derive(derive::DeriveArgs),
    /// Measure a state in a basis and print the resulting domain.
    Measure {
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "Z")]
        basis: String,
        /// Name of the emitted domain.
        #[arg(long, default_value = "D")]
        name: String,
        /// Also print the purity of the domain's density operator.
        #[arg(long)]
        purity: bool,
    },
    /// Translate a state into the sequent it supports.
    Translate {
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "Z")]
        basis: String,
        /// Treat the state as a pair of qubits measured locally in `--basis`.
        #[arg(long)]
        bipartite: bool,
        #[arg(long, default_value = "G")]
        gamma: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl From<Toggle> for bool {
    fn from(t: Toggle) -> bool {
        t == Toggle::On
    }
}

/// Mirrors [`TheoryConfig`]; flags left out keep the script's own settings.
#[derive(Args, Clone, Debug, Default)]
pub struct TheoryFlags {
    /// Declare a domain focused (repeatable).
    #[arg(long = "focused", value_name = "DOMAIN")]
    focused: Vec<String>,
    /// The sharp-state axioms [default: on].
    #[arg(long, value_enum, value_name = "on|off")]
    singleton_axioms: Option<Toggle>,
    /// Same as `--singleton-axioms off`.
    #[arg(long, conflicts_with = "singleton_axioms")]
    no_singleton_axioms: bool,
    /// Classical mode: quantifier and `&` equations admit right contexts [default: off].
    #[arg(long, value_enum, value_name = "on|off")]
    classical_right_contexts: Option<Toggle>,
}

impl TheoryFlags {
    pub fn apply(&self, mut cfg: TheoryConfig) -> TheoryConfig {
        for d in &self.focused {
            cfg = cfg.focus(d.clone());
        }
        if self.no_singleton_axioms {
            cfg = cfg.singleton_axioms(false);
        } else if let Some(t) = self.singleton_axioms {
            cfg = cfg.singleton_axioms(t.into());
        }
        if let Some(t) = self.classical_right_contexts {
            cfg = cfg.classical(t.into());
        }
        cfg
    }
}

/// A failure with its exit code: 1 for logical failures, 2 for usage,
/// parse and file errors.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    pub fn logical(e: impl Display) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }

    pub fn usage(e: impl Display) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

fn quantum_failure(e: QuantumError) -> Failure {
    match e {
        QuantumError::Parse { .. } | QuantumError::UnknownLabel(_) => Failure::usage(e),
        other => Failure::logical(other),
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn load_script(text: &str) -> Result<ProofScript, Failure> {
    let parsed =
        if text.trim_start().starts_with('{') { ProofScript::from_json(text) } else { ProofScript::parse(text) };
    parsed.map_err(Failure::usage)
}

fn report_code(r: &CheckReport) -> u8 {
    u8::from(!r.accepted())
}

fn check_cmd(file: &PathBuf, theory: &TheoryFlags, json: bool) -> Result<u8, Failure> {
    let mut script = load_script(&read_input(file)?)?;
    script.config = theory.apply(script.config);
    let report = script.check();
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    Ok(report_code(&report))
}

fn measure_cmd(state: &str, basis: &str, name: &str, show_purity: bool, json: bool) -> Result<u8, Failure> {
    let psi = QState::parse(state).map_err(quantum_failure)?;
    let b = Basis::parse(basis).map_err(quantum_failure)?;
    let d = measure_as(&psi, &b, name).map_err(quantum_failure)?;
    let p = if show_purity { Some(purity(&density_of(&d, &b).map_err(quantum_failure)?)) } else { None };
    if json {
        let mut v = serde_json::to_value(DomainJson::from_domain(&d)).map_err(Failure::logical)?;
        if let Some(p) = p {
            v["purity"] = p.into();
        }
        println!("{v}");
    } else {
        println!("{d}");
        if let Some(p) = p {
            println!("purity = {p}");
        }
    }
    Ok(0)
}

fn translate_cmd(state: &str, basis: &str, bipartite: bool, gamma: &str, json: bool) -> Result<u8, Failure> {
    let psi = QState::parse(state).map_err(quantum_failure)?;
    let b = Basis::parse(basis).map_err(quantum_failure)?;
    let input = if bipartite {
        AssertionInput::Bipartite { state: psi, local: b }
    } else {
        AssertionInput::Single { state: psi, basis: b }
    };
    let a = emit_assertion(&input, gamma).map_err(quantum_failure)?;
    if json {
        let domains: Vec<DomainJson> = a.domains.iter().map(DomainJson::from_domain).collect();
        let schmidt = a.schmidt.as_ref().map(|s| {
            serde_json::json!({
                "coefficients": s.coefficients,
                "entangled": s.is_entangled(),
                "tolerance": ENTANGLEMENT_TOL,
            })
        });
        println!("{}", serde_json::json!({ "sequent": a.sequent.to_string(), "domains": domains, "schmidt": schmidt }));
    } else {
        println!("{}", a.sequent);
        for d in &a.domains {
            println!("{d}");
        }
        if let Some(s) = &a.schmidt {
            let [a1, a2] = s.coefficients;
            let verdict = if s.is_entangled() { "entangled" } else { "product" };
            println!("schmidt: a1 = {a1:.9}, a2 = {a2:.9} ({verdict}; a2 > {ENTANGLEMENT_TOL:e} counts as entangled)");
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Check { file, theory } => check_cmd(file, theory, cli.json),
        Command::Derive(args) => derive::run(args, cli.json),
        Command::Measure { state, basis, name, purity } => measure_cmd(state, basis, name, *purity, cli.json),
        Command::Translate { state, basis, bipartite, gamma } => {
            translate_cmd(state, basis, *bipartite, gamma, cli.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
