//! `r2wb`: terms, tracking chains and R2 queries from the command line.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use r2wb::chain::{ec, me, parse_rows, tc_assign, validate, Chain, TrackingChain};
use r2wb::closed::close;
use r2wb::notation::{upsilon_seg, TermUniverse};
use r2wb::query::{lh, lh2, pred1, pred2, substructure, succ2_enum, ReachValue};
use r2wb::r1::r1_lh;
use r2wb::ts::lambda_ts;
use r2wb::verify::{self, SuiteReport};
use r2wb::{ChainError, OpError, Ordinal, SyntaxError, TermError};

#[derive(Parser)]
#[command(name = "r2wb", version, about = "Ordinal notation workbench for the structure R2")]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical form of each term, one per line.
    Norm {
        #[arg(required = true)]
        terms: Vec<String>,
    },
    /// Compare two terms: <, = or >.
    Cmp { a: String, b: String },
    /// Tracking chain of a term.
    Tc { term: String },
    /// Value of a tracking chain.
    O { chain: String },
    /// Tracking sequence of an additively principal term.
    Ts { term: String },
    /// Greatest <1-predecessor.
    Pred1 { term: String },
    /// Greatest <2-predecessor.
    Pred2 { term: String },
    /// Maximal ≤1-successor.
    Lh { term: String },
    /// Maximal ≤2-successor.
    Lh2 { term: String },
    /// First elements of the ≤2-successor set.
    Succ2 {
        term: String,
        #[arg(short = 'n', default_value_t = 5)]
        n: usize,
    },
    /// Maximal extension of a chain.
    Me { chain: String },
    /// Extension candidate of a chain.
    Ec { chain: String },
    /// Closure of a set of chains.
    Close {
        #[arg(required = true)]
        chains: Vec<String>,
    },
    /// υ-segment (λ, m) of a term.
    Seg { term: String },
    /// Reach below ε₀ by the CNF recursion.
    R1lh { term: String },
    /// Run a verification suite.
    Verify {
        suite: Suite,
        /// Exclusive bound of the enumerated family.
        #[arg(long)]
        bound: Option<String>,
        /// Sample count (pairs, seeds, or probes depending on the suite).
        #[arg(long)]
        samples: Option<usize>,
        /// Maximal term length of the family.
        #[arg(long)]
        length: Option<u64>,
    },
    /// ≤1 / ≤2 relations on a finite set of points.
    Substructure {
        #[arg(required = true)]
        terms: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Order,
    Ts,
    R1,
    Golden,
    UpsilonChain,
    Me,
    Closure,
    Theta,
    Probes,
    All,
}

enum Failure {
    Parse(String),
    Domain(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Domain(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Self {
        match e {
            ChainError::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<OpError> for Failure {
    fn from(e: OpError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<TermError> for Failure {
    fn from(e: TermError) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn term(s: &str) -> Result<Ordinal, Failure> {
    s.parse::<Ordinal>().map_err(|e| match e {
        SyntaxError::Parse(_) => Failure::Parse(e.to_string()),
        SyntaxError::Term(_) => Failure::Parse(format!("invalid term {s}: {e}")),
    })
}

fn chain(s: &str) -> Result<TrackingChain, Failure> {
    let rows = parse_rows(s).map_err(|e| Failure::Parse(e.to_string()))?;
    Ok(validate(rows)?)
}

/// A query result: text for humans and the JSON payload fields.
struct Output {
    kind: &'static str,
    text: String,
    payload: Value,
}

impl Output {
    fn term(kind: &'static str, t: &Ordinal) -> Self {
        Output {
            kind,
            text: t.to_string(),
            payload: json!({ "value": t.to_string() }),
        }
    }

    fn chain(c: &TrackingChain) -> Self {
        Output {
            kind: "chain",
            text: c.to_string(),
            payload: json!({ "value": c.to_string(), "chain": c }),
        }
    }

    fn reach(r: &ReachValue) -> Self {
        match r {
            ReachValue::Finite(a) => Output::term("term", a),
            ReachValue::Infinity => Output {
                kind: "infinity",
                text: "inf".into(),
                payload: json!({ "infinity": true }),
            },
        }
    }

    fn values(kind: &'static str, vs: Vec<String>) -> Self {
        Output {
            kind,
            text: vs.join("\n"),
            payload: json!({ "values": vs }),
        }
    }
}

fn input_chain(a: &Ordinal) -> Value {
    tc_assign(a).map(|c| json!(c)).unwrap_or(Value::Null)
}

/// The tracking chain of a single term or chain argument, for the JSON `chain` field.
fn chain_of_input(input: &Value) -> Value {
    let Value::String(s) = input else {
        return Value::Null;
    };
    if let Ok(a) = s.parse::<Ordinal>() {
        return input_chain(&a);
    }
    parse_rows(s)
        .ok()
        .and_then(|r| validate(r).ok())
        .map(|c| json!(c))
        .unwrap_or(Value::Null)
}

fn family(bound: &Option<String>, length: Option<u64>) -> Result<TermUniverse, Failure> {
    let mut u = verify::default_family();
    if let Some(b) = bound {
        u.bound = Some(term(b)?);
    }
    if let Some(l) = length {
        u.max_length = l;
    }
    Ok(u)
}

fn run_suite(
    suite: Suite,
    bound: &Option<String>,
    samples: Option<usize>,
    length: Option<u64>,
    seed: u64,
) -> Result<Vec<SuiteReport>, Failure> {
    let mut rng = StdRng::seed_from_u64(seed);
    let terms = || -> Result<Vec<Ordinal>, Failure> {
        Ok(verify::family_terms(&family(bound, length)?))
    };
    Ok(match suite {
        Suite::Order => vec![verify::order_suite(&terms()?, samples.unwrap_or(100_000), &mut rng)],
        Suite::Ts => vec![verify::ts_suite(&terms()?)],
        Suite::R1 => vec![verify::r1_suite(samples.unwrap_or(10_000), 6, &mut rng)],
        Suite::Golden => vec![verify::golden_suite(&verify::golden_dir())],
        Suite::UpsilonChain => {
            vec![verify::upsilon_chain_suite(&verify::chain_indices(), &terms()?)]
        }
        Suite::Me => vec![verify::me_suite(&terms()?)],
        Suite::Closure => vec![verify::closure_suite(&terms()?, samples.unwrap_or(1000), &mut rng)],
        Suite::Theta => vec![verify::theta_suite(&terms()?)],
        Suite::Probes => {
            let pts: Vec<Ordinal> = terms()?.into_iter().filter(|t| tc_assign(t).is_ok()).collect();
            vec![verify::probe_suite(&pts, samples.unwrap_or(200), 12, &mut rng)]
        }
        Suite::All => {
            let all = [
                Suite::Order,
                Suite::Ts,
                Suite::R1,
                Suite::Golden,
                Suite::UpsilonChain,
                Suite::Me,
                Suite::Closure,
                Suite::Theta,
                Suite::Probes,
            ];
            let mut out = Vec::new();
            for s in all {
                out.extend(run_suite(s, bound, samples, length, seed)?);
            }
            out
        }
    })
}

fn run(cli: &Cli) -> Result<(String, Value, Output), Failure> {
    let one = |s: &String| Value::String(s.clone());
    let (query, input, out) = match &cli.cmd {
        Cmd::Norm { terms } if terms.len() == 1 => {
            ("norm", one(&terms[0]), Output::term("term", &term(&terms[0])?))
        }
        Cmd::Norm { terms } => {
            let vs = terms.iter().map(|t| term(t).map(|a| a.to_string())).collect::<Result<_, _>>()?;
            ("norm", json!(terms), Output::values("terms", vs))
        }
        Cmd::Cmp { a, b } => {
            let sym = match term(a)?.cmp(&term(b)?) {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            let out = Output {
                kind: "order",
                text: sym.into(),
                payload: json!({ "value": sym }),
            };
            ("cmp", json!([a, b]), out)
        }
        Cmd::Tc { term: t } => ("tc", one(t), Output::chain(&tc_assign(&term(t)?)?)),
        Cmd::O { chain: c } => ("o", one(c), Output::term("term", &chain(c)?.value()?)),
        Cmd::Ts { term: t } => {
            let s = lambda_ts(&term(t)?)?;
            let out = Output {
                kind: "sequence",
                text: s.to_string(),
                payload: json!({ "values": s.parts().iter().map(|a| a.to_string()).collect::<Vec<_>>() }),
            };
            ("ts", one(t), out)
        }
        Cmd::Pred1 { term: t } | Cmd::Pred2 { term: t } => {
            let a = term(t)?;
            let (q, r) = if matches!(cli.cmd, Cmd::Pred1 { .. }) {
                ("pred1", pred1(&a)?)
            } else {
                ("pred2", pred2(&a)?)
            };
            let mut payload = serde_json::to_value(&r).expect("serializable");
            payload["chain"] = input_chain(&a);
            let kind = match payload["kind"].as_str() {
                Some("greatest") => "term",
                Some("none") => "none",
                _ => "limit",
            };
            let out = Output {
                kind,
                text: r.to_string(),
                payload,
            };
            (q, one(t), out)
        }
        Cmd::Lh { term: t } => ("lh", one(t), Output::reach(&lh(&term(t)?)?)),
        Cmd::Lh2 { term: t } => ("lh2", one(t), Output::reach(&lh2(&term(t)?)?)),
        Cmd::Succ2 { term: t, n } => {
            let v = succ2_enum(&term(t)?, *n)?;
            let out = Output::values("sequence", v.iter().map(|a| a.to_string()).collect());
            ("succ2", one(t), out)
        }
        Cmd::Me { chain: c } => ("me", one(c), Output::chain(&me(&chain(c)?)?)),
        Cmd::Ec { chain: c } => {
            let out = match ec(&chain(c)?)? {
                Some(rows) => Output {
                    kind: "chain",
                    text: Chain(&rows).to_string(),
                    payload: json!({ "value": Chain(&rows).to_string() }),
                },
                None => Output {
                    kind: "none",
                    text: "none".into(),
                    payload: json!({ "value": Value::Null }),
                },
            };
            ("ec", one(c), out)
        }
        Cmd::Close { chains } => {
            let cs = chains.iter().map(|c| chain(c)).collect::<Result<Vec<_>, _>>()?;
            let cl = close(cs.iter())?;
            let out = Output::values("chains", cl.chains.iter().map(|c| c.to_string()).collect());
            ("close", json!(chains), out)
        }
        Cmd::Seg { term: t } => {
            let g = upsilon_seg(&term(t)?)?;
            let out = Output {
                kind: "segment",
                text: format!("({},{})", g.lambda, g.offset),
                payload: json!({ "value": { "lambda": g.lambda.to_string(), "offset": g.offset } }),
            };
            ("seg", one(t), out)
        }
        Cmd::R1lh { term: t } => {
            let v = r1_lh(&term(t)?).map_err(|e| Failure::Domain(e.to_string()))?;
            ("r1lh", one(t), Output::term("term", &v))
        }
        Cmd::Verify {
            suite,
            bound,
            samples,
            length,
        } => {
            let reports = run_suite(*suite, bound, *samples, *length, cli.seed)?;
            let text = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            let out = Output {
                kind: "report",
                text,
                payload: json!({ "values": reports }),
            };
            let failed = reports.iter().any(|r| r.failures > 0);
            let unsupported = reports.iter().any(|r| !r.passed());
            let input = json!({ "bound": bound, "samples": samples, "length": length });
            if failed || unsupported {
                return Err(report_failure(failed, cli, &out, &input));
            }
            ("verify", input, out)
        }
        Cmd::Substructure { terms } => {
            let pts = terms.iter().map(|t| term(t)).collect::<Result<Vec<_>, _>>()?;
            let s = substructure(&pts)?;
            let mut lines = vec![s.points.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")];
            for (name, rel) in [("<=1", &s.r1), ("<=2", &s.r2)] {
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        if rel[i][j] {
                            lines.push(format!("{} {name} {}", s.points[i], s.points[j]));
                        }
                    }
                }
            }
            let out = Output {
                kind: "substructure",
                text: lines.join("\n"),
                payload: json!({ "value": s }),
            };
            ("substructure", json!(terms), out)
        }
    };
    let mut out = out;
    if out.payload.get("chain").is_none() {
        out.payload["chain"] = chain_of_input(&input);
    }
    Ok((query.to_string(), input, out))
}

/// A failed verification run still prints its report; the exit code tells
/// wrong answers (4) from unsupported inputs (3).
fn report_failure(wrong: bool, cli: &Cli, out: &Output, input: &Value) -> Failure {
    let body = render(cli.json, "verify", input, out);
    if wrong {
        Failure::Invariant(body)
    } else {
        Failure::Domain(body)
    }
}

fn render(as_json: bool, query: &str, input: &Value, out: &Output) -> String {
    if !as_json {
        return out.text.clone();
    }
    let mut v = json!({ "query": query, "input": input, "kind": out.kind });
    if let Value::Object(m) = &out.payload {
        for (k, x) in m {
            v[k] = x.clone();
        }
    }
    if v.get("chain").is_none() {
        v["chain"] = Value::Null;
    }
    serde_json::to_string(&v).expect("json")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((q, input, out)) => {
            println!("{}", render(cli.json, &q, &input, &out));
            ExitCode::SUCCESS
        }
        Err(f) => {
            let is_report = matches!(cli.cmd, Cmd::Verify { .. });
            if is_report {
                println!("{}", f.message());
            } else if cli.json {
                eprintln!("{}", json!({ "error": f.message(), "exit": f.code() }));
            } else {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}
