//! The `iel` command line: type checking, normalization, degrees, CPS
//! translations, decision and the self-test suites.
//!
//! [`run`] is the whole program minus process plumbing, so it can be driven
//! from tests. Exit codes: 0 success, 1 a logical failure (ill-typed term,
//! unmet `--expect`, failing suite), 2 a usage error.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use iel_kernel::cps::{check_lemmas, cps, cps_mod};
use iel_kernel::decide::decide_with_stats;
use iel_kernel::degree::degree;
use iel_kernel::meta::{check_metatheory_in, Property, Scope};
use iel_kernel::rewrite::{normalize, Strategy};
use iel_kernel::selftest::{self, Scale, SuiteReport};
use iel_kernel::syntax::parse_hypothesis;
use iel_kernel::typing::{check, infer, render_path};
use iel_kernel::{parse_formula, parse_term_in, Context, Formula, Term};

const DEFAULT_FUEL: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(name = "iel", version, about = "Proof kernel for intuitionistic belief logic")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Outermost,
    Innermost,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Provable,
    Unprovable,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Lemmas,
    Metatheory,
    Degree,
    SubjectReduction,
    Normalization,
    Cps,
    Postponement,
    Subformula,
    Canonicity,
    Decide,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infer the type of a term, or check it against `--type`.
    Check {
        term: String,
        #[arg(long = "type")]
        ty: Option<String>,
        /// Typed variable `x : A`; repeatable.
        #[arg(long = "hyp")]
        hyps: Vec<String>,
    },
    /// Reduce a term to normal form.
    Normalize {
        term: String,
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Outermost)]
        strategy: StrategyArg,
        #[arg(long, env = "KERNEL_FUEL")]
        fuel: Option<u64>,
        #[arg(long)]
        trace: bool,
    },
    /// Print the permutation degree of a term.
    Degree { term: String },
    /// Print the CPS translation of a term.
    Cps {
        term: String,
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[arg(long)]
        modified: bool,
        #[arg(long)]
        check_lemmas: bool,
    },
    /// Decide whether a formula follows from hypotheses.
    Decide {
        formula: String,
        /// Hypothesis formula; repeatable.
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Search for counterexamples to an admissible rule.
    Meta {
        #[arg(long)]
        property: Property,
        #[arg(long, value_delimiter = ',', default_value = "p,r")]
        atoms: Vec<String>,
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long, default_value = "instances")]
        scope: Scope,
    },
    /// Run the built-in test suites.
    Selftest {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Exit code and rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    fn ok(output: String) -> Outcome {
        Outcome { code: 0, output }
    }

    fn failed(output: String) -> Outcome {
        Outcome { code: 1, output }
    }

    fn usage(output: String) -> Outcome {
        Outcome { code: 2, output }
    }
}

/// Runs the command line `argv` (program name first); an argument `-`
/// is replaced by the text of `stdin`.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut args: Vec<String> = argv.into_iter().map(Into::into).collect();
    if let Some(slot) = args.iter().skip(1).position(|a| a == "-") {
        let mut text = String::new();
        if let Err(e) = stdin.read_to_string(&mut text) {
            return Outcome::usage(format!("error: reading stdin: {e}\n"));
        }
        args[slot + 1] = text.trim().to_string();
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                output: e.render().to_string(),
            };
        }
    };
    match execute(cli.command, cli.format) {
        Ok(o) => o,
        Err(msg) => Outcome::usage(format!("error: {msg}\n")),
    }
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Format::Text => text(),
    }
}

fn context(hyps: &[String]) -> Result<Context, String> {
    let mut ctx = Context::new();
    for h in hyps {
        let (x, f) = parse_hypothesis(h).map_err(|e| format!("--hyp {h:?}: {e}"))?;
        ctx.insert(x, f);
    }
    Ok(ctx)
}

fn term(ctx: &Context, text: &str) -> Result<Term, String> {
    parse_term_in(ctx, text).map_err(|e| format!("term {text:?}: {e}"))
}

fn formula(what: &str, text: &str) -> Result<Formula, String> {
    parse_formula(text).map_err(|e| format!("{what} {text:?}: {e}"))
}

fn execute(command: Command, format: Format) -> Result<Outcome, String> {
    match command {
        Command::Check { term: t, ty, hyps } => {
            let ctx = context(&hyps)?;
            let t = term(&ctx, &t)?;
            let want = ty.map(|s| formula("--type", &s)).transpose()?;
            Ok(check_command(&ctx, &t, want.as_ref(), format))
        }
        Command::Normalize {
            term: t,
            hyps,
            strategy,
            fuel,
            trace,
        } => {
            let ctx = context(&hyps)?;
            let t = term(&ctx, &t)?;
            let strategy = match strategy {
                StrategyArg::Outermost => Strategy::LeftmostOutermost,
                StrategyArg::Innermost => Strategy::LeftmostInnermost,
            };
            Ok(normalize_command(
                &ctx,
                &t,
                strategy,
                fuel.unwrap_or(DEFAULT_FUEL),
                trace,
                format,
            ))
        }
        Command::Degree { term: t } => {
            let t = term(&Context::new(), &t)?;
            Ok(match degree(&t) {
                Ok(d) => Outcome::ok(render(format, &d.json(), || format!("bar={} hash={}\n", d.bar, d.hash))),
                Err(e) => Outcome::failed(render(format, &json!({ "error": e.to_string() }), || format!("{e}\n"))),
            })
        }
        Command::Cps {
            term: t,
            hyps,
            modified,
            check_lemmas,
        } => {
            let ctx = context(&hyps)?;
            let t = term(&ctx, &t)?;
            Ok(cps_command(&ctx, &t, modified, check_lemmas, format))
        }
        Command::Decide {
            formula: f,
            hyps,
            expect,
        } => {
            let goal = formula("formula", &f)?;
            let hyps = hyps
                .iter()
                .map(|h| formula("--hyp", h))
                .collect::<Result<Vec<_>, _>>()?;
            let d = decide_with_stats(&hyps, &goal);
            let verdict = if d.provable { "provable" } else { "unprovable" };
            let output = render(format, &d, || {
                format!("{verdict}\nuniverse={} sequents={}\n", d.universe_size, d.sequents)
            });
            let met = match expect {
                None => true,
                Some(Expect::Provable) => d.provable,
                Some(Expect::Unprovable) => !d.provable,
            };
            Ok(if met {
                Outcome::ok(output)
            } else {
                Outcome::failed(output)
            })
        }
        Command::Meta {
            property,
            atoms,
            size,
            scope,
        } => {
            let atoms: Vec<&str> = atoms.iter().map(String::as_str).filter(|a| !a.is_empty()).collect();
            for a in &atoms {
                match parse_formula(a) {
                    Ok(Formula::Atom(_)) => {}
                    _ => return Err(format!("--atoms: {a:?} is not an atom")),
                }
            }
            let r = check_metatheory_in(property, &atoms, size, scope);
            let output = render(format, &r, || {
                let mut s = format!(
                    "{} {} atoms={} size={} checked={} counterexamples={}\n",
                    if r.holds() { "holds" } else { "fails" },
                    r.property,
                    r.atoms.join(","),
                    r.max_size,
                    r.checked,
                    r.counterexamples.len()
                );
                for c in &r.counterexamples {
                    s.push_str(&format!("  {c}\n"));
                }
                s
            });
            Ok(if r.holds() {
                Outcome::ok(output)
            } else {
                Outcome::failed(output)
            })
        }
        Command::Selftest { suite, scale, seed } => {
            let scale = match scale {
                ScaleArg::Quick => Scale::quick(seed),
                ScaleArg::Full => Scale::full(seed),
            };
            let reports = run_suites(suite, scale);
            let passed = reports.iter().all(SuiteReport::passed);
            let output = render(format, &reports, || {
                let mut s: String = reports.iter().map(|r| format!("{r}\n")).collect();
                let n = reports.iter().filter(|r| r.passed()).count();
                s.push_str(&format!("{n}/{} suites passed\n", reports.len()));
                s
            });
            Ok(if passed {
                Outcome::ok(output)
            } else {
                Outcome::failed(output)
            })
        }
    }
}

fn check_command(ctx: &Context, t: &Term, want: Option<&Formula>, format: Format) -> Outcome {
    match infer(ctx, t) {
        Ok(ty) => {
            let ok = want.is_none_or(|w| check(ctx, t, w));
            let value = json!({
                "ok": ok,
                "type": ty.to_string(),
                "expected": want.map(|w| w.to_string()),
            });
            let output = render(format, &value, || match want {
                Some(w) if !ok => format!("type mismatch: expected {w}, found {ty}\n"),
                _ => format!("{t} : {ty}\n"),
            });
            if ok {
                Outcome::ok(output)
            } else {
                Outcome::failed(output)
            }
        }
        Err(e) => {
            let value = json!({ "ok": false, "error": e.report() });
            Outcome::failed(render(format, &value, || {
                format!("ill-typed at {}: {}\n", render_path(&e.path), e.kind)
            }))
        }
    }
}

fn normalize_command(ctx: &Context, t: &Term, strategy: Strategy, fuel: u64, trace: bool, format: Format) -> Outcome {
    let text = |tr: &iel_kernel::rewrite::Trace| {
        let mut s = String::new();
        if trace {
            s.push_str(&format!("  {}\n", tr.start));
            for st in &tr.steps {
                s.push_str(&format!("{:>4} {} > {}\n", st.kind, render_path(&st.path), st.after));
            }
        } else {
            s.push_str(&format!("{}\n", tr.result));
        }
        s
    };
    match normalize(ctx, t, strategy, fuel) {
        Ok(tr) => {
            let report = tr.report();
            let value = json!({
                "normal_form": report.result,
                "steps": tr.steps.len(),
                "trace": trace.then_some(&report.steps),
            });
            Outcome::ok(render(format, &value, || text(&tr)))
        }
        Err(iel_kernel::rewrite::RewriteError::FuelExhausted { fuel, trace: tr }) => {
            let value = json!({ "error": "fuel exhausted", "fuel": fuel, "reached": tr.result.to_string() });
            Outcome::failed(render(format, &value, || {
                format!("{}fuel of {fuel} steps exhausted\n", text(&tr))
            }))
        }
        Err(e) => Outcome::failed(format!("error: {e}\n")),
    }
}

fn cps_command(ctx: &Context, t: &Term, modified: bool, lemmas: bool, format: Format) -> Outcome {
    if lemmas {
        return match check_lemmas(ctx, t) {
            Ok(checks) => {
                let all = checks.iter().all(|c| c.holds);
                let output = render(format, &checks, || {
                    let mut s = String::new();
                    for c in &checks {
                        let verdict = if c.holds { "PASS" } else { "FAIL" };
                        let row = format!("{verdict} {:<24} {}", c.lemma, c.at);
                        s.push_str(row.trim_end());
                        s.push('\n');
                    }
                    s
                });
                if all {
                    Outcome::ok(output)
                } else {
                    Outcome::failed(output)
                }
            }
            Err(e) => Outcome::failed(render(format, &json!({ "error": e.to_string() }), || format!("{e}\n"))),
        };
    }
    let translated = if modified { cps_mod(ctx, t) } else { cps(ctx, t) };
    match translated {
        Ok(m) => Outcome::ok(render(
            format,
            &json!({ "term": m.to_string(), "size": m.size() }),
            || format!("{m}\n"),
        )),
        Err(e) => Outcome::failed(render(format, &json!({ "error": e.to_string() }), || format!("{e}\n"))),
    }
}

fn run_suites(suite: Suite, scale: Scale) -> Vec<SuiteReport> {
    use iel_kernel::corpus::{typed_corpus, GenConfig};
    let typed = || selftest::typed_samples(scale.seed, scale.typed_terms);
    let cps_samples = || typed_corpus(scale.seed ^ 0xc95, scale.cps_terms, GenConfig::open(false));
    let closed = || selftest::closed_samples(scale.seed, scale.typed_terms / 5);
    match suite {
        Suite::All => selftest::run_all(scale),
        Suite::Lemmas => {
            let typed = typed();
            vec![
                selftest::degree_suite(scale.seed, scale.degree_terms),
                selftest::subject_reduction_suite(&typed),
                selftest::normalization_suite(&typed),
                selftest::cps_suite(&cps_samples()),
                selftest::postponement_suite(scale.seed, scale.postponement_triples),
                selftest::subformula_suite(&typed),
                selftest::canonicity_suite(&typed, &closed()),
            ]
        }
        Suite::Metatheory => vec![selftest::metatheory_suite(scale.meta_connectives)],
        Suite::Degree => vec![selftest::degree_suite(scale.seed, scale.degree_terms)],
        Suite::SubjectReduction => vec![selftest::subject_reduction_suite(&typed())],
        Suite::Normalization => vec![selftest::normalization_suite(&typed())],
        Suite::Cps => vec![selftest::cps_suite(&cps_samples())],
        Suite::Postponement => vec![selftest::postponement_suite(scale.seed, scale.postponement_triples)],
        Suite::Subformula => vec![selftest::subformula_suite(&typed())],
        Suite::Canonicity => vec![selftest::canonicity_suite(&typed(), &closed())],
        Suite::Decide => vec![selftest::decide_suite(scale.decide_connectives, selftest::ORACLE_BOUND)],
    }
}
