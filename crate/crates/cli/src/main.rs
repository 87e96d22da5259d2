//! `hoca`: command-line front end for the level-2 counter automaton toolkit.
//!
//! Exit codes: 0 positive verdict or success, 1 negative verdict, 2 usage or
//! parse error, 3 search inconclusive within caps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use hoca_core::hoca2::{parse_hocs2, parse_l2_state_config, Hocs2, L2Config, L2Trace};
use hoca_core::regnotions::{parse_two_store, two_store_membership_named};
use hoca_core::regreach::{bounded_post_star, bounded_pre_star, RegCaps, RegVerdict};
use hoca_core::storage::{
    alt_reach_oracle, parse_automaton, parse_storage_expr, parse_val_sequence, print_automaton, reach_oracle,
    val_check, Alphabet, Caps, OracleResult, StorageAutomaton, StorageExpr, Trace,
};
use hoca_core::summaries::{build_summary_dfa, compute_return_table, reach_state};
use hoca_core::transforms::{eliminate_level2_symbols, invpush_to_pop, pop_to_invpush};
use hoca_core::trees::{decode, encode, parse_ta, parse_tree};

#[derive(Parser, Debug)]
#[command(name = "hoca", version, about = "Reachability tools for level-2 counter automata")]
struct CliConfig {
    /// One `key<TAB>value` result per line.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CapArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_height: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    max_counter: u32,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps::new(vec![self.max_height as usize], self.max_counter, self.max_steps as usize)
    }

    fn reg_caps(&self) -> RegCaps {
        RegCaps::new(self.max_height as usize, self.max_counter)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Pass {
    ElimSymbols,
    PopToInvpush,
    InvpushToPop,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide control-state reachability of a P{..}(C) automaton.
    Reach {
        file: PathBuf,
        #[arg(long)]
        target: String,
    },
    /// Bounded explicit search (alternating if the automaton has universal states).
    Oracle {
        file: PathBuf,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Print the converged return table.
    Table { file: PathBuf },
    /// Print the summary automaton read along the first counter.
    SummaryDfa { file: PathBuf },
    /// Encode `(q,(σ,n)…)` as a tree term.
    Encode {
        config: String,
        /// Comma-separated alphabet; inferred from the input when absent.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Decode a tree term into `(q,(σ,n)…)`.
    Decode {
        term: String,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Bounded pre* of a tree-automaton set.
    Prestar {
        file: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, required = true)]
        query: Vec<String>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Bounded post* of a tree-automaton set.
    Poststar {
        file: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, required = true)]
        query: Vec<String>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Apply a storage-simulation pass and print the result.
    Transform {
        file: PathBuf,
        #[arg(long, value_enum)]
        pass: Pass,
    },
    /// Check whether a storage sequence is applicable to the initial configuration.
    Val {
        #[arg(long)]
        storage: String,
        sequence: String,
    },
    /// Membership of a configuration in a 2-store automaton.
    TwoStore {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
}

/// What a command prints. `verdict` comes first, then the fields, then the
/// body.
#[derive(Default)]
struct Report {
    verdict: Option<&'static str>,
    fields: Vec<(String, String)>,
    body: Option<String>,
    code: u8,
    note: Option<String>,
}

impl Report {
    fn verdict(v: &'static str, code: u8) -> Self {
        Report {
            verdict: Some(v),
            code,
            ..Report::default()
        }
    }

    fn body(text: String) -> Self {
        Report {
            body: Some(text),
            ..Report::default()
        }
    }

    fn field(mut self, k: &str, v: impl ToString) -> Self {
        self.fields.push((k.to_string(), v.to_string()));
        self
    }

    fn print(&self, machine: bool) {
        if machine {
            if let Some(v) = self.verdict {
                println!("verdict\t{v}");
            }
            for (k, v) in &self.fields {
                println!("{k}\t{v}");
            }
            if let Some(b) = &self.body {
                for line in b.lines() {
                    println!("line\t{line}");
                }
            }
        } else {
            if let Some(v) = self.verdict {
                println!("{v}");
            }
            for (k, v) in &self.fields {
                println!("{k}: {v}");
            }
            if let Some(b) = &self.body {
                print!("{b}");
                if !b.ends_with('\n') {
                    println!();
                }
            }
        }
        if let Some(n) = &self.note {
            eprintln!("{n}");
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_automaton(path: &Path) -> Result<StorageAutomaton> {
    parse_automaton(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_hocs2(path: &Path) -> Result<Hocs2> {
    parse_hocs2(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn state_of(a: &StorageAutomaton, name: &str) -> Result<usize> {
    a.state(name).ok_or_else(|| anyhow!("unknown state `{name}`"))
}

/// Splits `(q,REST)` into `q` and `REST`.
fn split_state_config(text: &str) -> Result<(&str, &str)> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| anyhow!("expected `(state,config)`, found `{t}`"))?;
    let (q, rest) = inner
        .split_once(',')
        .ok_or_else(|| anyhow!("expected `(state,config)`, found `{t}`"))?;
    Ok((q.trim(), rest.trim()))
}

fn alphabet_from(names: impl IntoIterator<Item = String>) -> Result<Alphabet> {
    let mut all = vec!["_".to_string()];
    for n in names {
        if !all.contains(&n) {
            all.push(n);
        }
    }
    Ok(Alphabet::new(all)?)
}

fn explicit_alphabet(spec: &str) -> Result<Alphabet> {
    let names: Vec<&str> = spec
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    Ok(Alphabet::new(names)?)
}

/// Symbols named in a configuration: every name right after `(`.
fn config_symbols(text: &str) -> Vec<String> {
    text.split('(')
        .skip(1)
        .filter_map(|part| part.split(',').next())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Labels of a tree term in order of appearance, `-` excluded.
fn term_labels(text: &str) -> Vec<String> {
    text.split(|c: char| c == '(' || c == ')' || c == ',')
        .map(str::trim)
        .filter(|s| !s.is_empty() && *s != "-")
        .map(str::to_string)
        .collect()
}

fn show_trace(st: &StorageExpr, a: &StorageAutomaton, t: &Trace) -> String {
    let mut out = format!("{} {}\n", a.state_name(t.start.0), t.start.1.display(st));
    for (_, q, c) in &t.steps {
        out.push_str(&format!("{} {}\n", a.state_name(*q), c.display(st)));
    }
    out
}

fn show_l2_trace(a: &Hocs2, t: &L2Trace) -> String {
    t.configs()
        .map(|(q, c)| format!("{} {}\n", a.state_name(q), c.display(a.alphabet())))
        .collect()
}

fn reach(file: &Path, target: &str) -> Result<Report> {
    let a = load_automaton(file)?;
    let q = state_of(&a, target)?;
    let yes = reach_state(&a, q)?;
    info!("reach: {} states, target {target}", a.num_states());
    Ok(if yes {
        Report::verdict("REACHABLE", 0)
    } else {
        Report::verdict("UNREACHABLE", 1)
    }
    .field("target", target))
}

fn oracle(file: &Path, target: &str, caps: &CapArgs) -> Result<Report> {
    let a = load_automaton(file)?;
    let q = state_of(&a, target)?;
    let caps = caps.caps();
    let r = if a.is_existential() {
        reach_oracle(&a, q, &caps)
    } else {
        alt_reach_oracle(&a, q, &caps)
    };
    Ok(match r {
        OracleResult::Reachable(t) => {
            let mut rep = Report::verdict("REACHABLE", 0).field("steps", t.steps.len());
            if a.is_existential() {
                rep.body = Some(show_trace(a.storage(), &a, &t));
            }
            rep
        }
        OracleResult::NotFoundWithinCaps { exhausted: true } => {
            Report::verdict("UNREACHABLE", 1).field("exhausted", true)
        }
        OracleResult::NotFoundWithinCaps { exhausted: false } => {
            let mut rep = Report::verdict("NOT_FOUND_WITHIN_CAPS", 3).field("exhausted", false);
            rep.note = Some("note: search was cut off by caps; the verdict is inconclusive".into());
            rep
        }
    })
}

fn encode_cmd(config: &str, alphabet: Option<&str>) -> Result<Report> {
    let (q, rest) = split_state_config(config)?;
    let al = match alphabet {
        Some(s) => explicit_alphabet(s)?,
        None => alphabet_from(config_symbols(rest))?,
    };
    let c = L2Config::parse(&al, rest)?;
    let t = encode(0, &c);
    Ok(Report::body(t.display(&al, &[q.to_string()]).to_string()))
}

fn decode_cmd(term: &str, alphabet: Option<&str>) -> Result<Report> {
    let labels = term_labels(term);
    let (root, syms) = labels.split_first().ok_or_else(|| anyhow!("empty term"))?;
    let al = match alphabet {
        Some(s) => explicit_alphabet(s)?,
        None => alphabet_from(syms.iter().cloned())?,
    };
    let states = vec![root.clone()];
    let t = parse_tree(&al, &states, term)?;
    Ok(match decode(&t) {
        Ok((_, c)) => Report::verdict("VALID", 0).field("config", format!("({root},{})", c.display(&al))),
        Err(e) => Report::verdict("INVALID", 1)
            .field("position", if e.position.is_empty() { "root".into() } else { e.position })
            .field("reason", e.reason),
    })
}

fn reg_reach(file: &Path, set: &Path, queries: &[String], caps: &CapArgs, forward: bool) -> Result<Report> {
    let a = load_hocs2(file)?;
    let ta = parse_ta(a.alphabet(), a.state_names(), &read(set)?).with_context(|| format!("in {}", set.display()))?;
    let qs = queries
        .iter()
        .map(|q| parse_l2_state_config(&a, q).with_context(|| format!("query `{q}`")))
        .collect::<Result<Vec<_>>>()?;
    let caps = caps.reg_caps();
    let r = if forward {
        bounded_post_star(&a, &ta, &caps, &qs)
    } else {
        bounded_pre_star(&a, &ta, &caps, &qs)
    };
    let all_in = r.verdicts.iter().all(RegVerdict::is_in);
    let mut rep = if all_in {
        Report::verdict("IN", 0)
    } else {
        let mut rep = Report::verdict("NOT_WITHIN_CAPS", 3);
        rep.note = Some("note: membership outside the explored window is not decided".into());
        rep
    };
    let mut body = String::new();
    for (q, v) in queries.iter().zip(&r.verdicts) {
        match v {
            RegVerdict::In(t) => {
                rep = rep.field("query", format!("{} IN", q.trim()));
                body.push_str(&format!("witness for {}\n", q.trim()));
                body.push_str(&show_l2_trace(&a, t));
            }
            RegVerdict::NotWithinCaps => rep = rep.field("query", format!("{} NOT_WITHIN_CAPS", q.trim())),
        }
    }
    rep = rep.field("explored_members", r.members.len()).field("truncated", r.truncated);
    if !body.is_empty() {
        rep.body = Some(body);
    }
    Ok(rep)
}

fn transform(file: &Path, pass: Pass) -> Result<Report> {
    let a = load_automaton(file)?;
    let out = match pass {
        Pass::ElimSymbols => eliminate_level2_symbols(&a),
        Pass::PopToInvpush => pop_to_invpush(&a),
        Pass::InvpushToPop => invpush_to_pop(&a),
    }?;
    Ok(Report::body(print_automaton(&out)))
}

fn val(storage: &str, sequence: &str) -> Result<Report> {
    let st = parse_storage_expr(storage)?;
    let seq = parse_val_sequence(&st, sequence)?;
    Ok(if val_check(&st, &seq) {
        Report::verdict("VALID", 0)
    } else {
        Report::verdict("INVALID", 1)
    }
    .field("letters", seq.len()))
}

fn two_store(file: &Path, query: &str) -> Result<Report> {
    let tsa = parse_two_store(&read(file)?).with_context(|| format!("in {}", file.display()))?;
    let (q, rest) = split_state_config(query)?;
    let c = if rest.is_empty() {
        L2Config(Vec::new())
    } else {
        L2Config::parse(tsa.alphabet(), rest)?
    };
    Ok(if two_store_membership_named(&tsa, q, &c)? {
        Report::verdict("ACCEPT", 0)
    } else {
        Report::verdict("REJECT", 1)
    })
}

fn run(cli: &CliConfig) -> Result<Report> {
    match &cli.command {
        Command::Reach { file, target } => reach(file, target),
        Command::Oracle { file, target, caps } => oracle(file, target, caps),
        Command::Table { file } => {
            let a = load_hocs2(file)?;
            let t = compute_return_table(&a);
            Ok(Report::body(t.render(&a)).field("h0", t.h0()))
        }
        Command::SummaryDfa { file } => {
            let a = load_hocs2(file)?;
            let dfa = build_summary_dfa(&a).collapsed();
            Ok(Report::body(dfa.render(&a)).field("states", dfa.len()))
        }
        Command::Encode { config, alphabet } => encode_cmd(config, alphabet.as_deref()),
        Command::Decode { term, alphabet } => decode_cmd(term, alphabet.as_deref()),
        Command::Prestar { file, set, query, caps } => reg_reach(file, set, query, caps, false),
        Command::Poststar { file, set, query, caps } => reg_reach(file, set, query, caps, true),
        Command::Transform { file, pass } => transform(file, *pass),
        Command::Val { storage, sequence } => val(storage, sequence),
        Command::TwoStore { file, query } => two_store(file, query),
    }
}

fn init_logging() {
    let level = std::env::var("HOCA_LOG").unwrap_or_else(|_| "off".into());
    let filter = match level.as_str() {
        "off" | "info" | "debug" => level,
        _ => "off".into(),
    };
    env_logger::Builder::new().parse_filters(&filter).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = CliConfig::parse();
    match run(&cli) {
        Ok(rep) => {
            rep.print(cli.machine);
            ExitCode::from(rep.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
