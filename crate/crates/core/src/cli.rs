//! The `pdiff` command line.
//!
//! Exit codes: `0` for equal or accepted, `1` for not-equal or rejected, `2`
//! for usage, parse and input errors.

use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::canon::{canonicalize, decide, to_expr};
use crate::proof::{certify_canonicalize, check_with, parse_proof, print_proof, Mode};
use crate::semantics::{eval, oracle_equal, parse_env, FnEnv, VarEnv};
use crate::separate::{counterexample, counterexample_preferring_small};
use crate::term::{check_arities, parse, print_rat, Expr, VarName};

#[derive(Parser, Debug)]
#[command(
    name = "pdiff",
    version,
    about = "Equational reasoning about partial derivatives"
)]
pub struct Cli {
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the canonical form of an expression.
    Canon {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Decide whether two expressions are provably equal.
    Decide {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Evaluate an expression; unbound functions and variables are 0.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// File of `f/n := poly` and `x := r` lines.
        #[arg(long)]
        env: Option<std::path::PathBuf>,
    },
    /// Canonical form of `D[x](expr)`.
    Derive {
        var: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Natural-number environments separating two sides, if any.
    Counterexample {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
        /// Try a brute-force search over this many small configurations first.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a proof certificate file.
    CheckProof {
        file: std::path::PathBuf,
        /// Allow no differentiation axiom other than commutativity.
        #[arg(long)]
        rtc: bool,
    },
    /// Compare both sides under polynomials with symbolic coefficients. Can
    /// refute an equation but never confirm it.
    OracleDecide {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Print a certificate that an expression equals its canonical form.
    Certify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

struct Failure(String);

type Outcome = Result<(i32, Value, String), Failure>;

fn expr(s: &str) -> Result<Expr, Failure> {
    parse(s).map_err(|e| Failure(format!("cannot parse `{s}`: {e}")))
}

fn pair(a: &str, b: &str) -> Result<(Expr, Expr), Failure> {
    let (a, b) = (expr(a)?, expr(b)?);
    check_arities([&a, &b]).map_err(|e| Failure(e.to_string()))?;
    Ok((a, b))
}

fn text(lines: &[String]) -> String {
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

fn verdict(equal: bool) -> &'static str {
    if equal {
        "equal"
    } else {
        "not-equal"
    }
}

fn env_json(phi: &FnEnv, rho: &VarEnv) -> (Value, Value) {
    let fns: Map<String, Value> = phi
        .iter()
        .map(|(f, p)| (f.to_string(), json!(p.to_string())))
        .collect();
    let vars: Map<String, Value> = rho
        .iter()
        .map(|(x, r)| (x.as_str().to_string(), json!(print_rat(r))))
        .collect();
    (Value::Object(fns), Value::Object(vars))
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Canon { expr: s } => {
            let e = expr(s)?;
            let c = canonicalize(&e);
            let out = to_expr(&c).to_string();
            Ok((
                0,
                json!({"canonical": out, "atoms": c.to_string()}),
                text(&[out]),
            ))
        }
        Command::Decide { lhs, rhs } => {
            let (a, b) = pair(lhs, rhs)?;
            let eq = decide(&a, &b);
            Ok((
                i32::from(!eq),
                json!({"result": verdict(eq)}),
                text(&[verdict(eq).into()]),
            ))
        }
        Command::Eval { expr: s, env } => {
            let e = expr(s)?;
            let (phi, rho) = match env {
                Some(path) => {
                    let src = std::fs::read_to_string(path)
                        .map_err(|err| Failure(format!("cannot read {}: {err}", path.display())))?;
                    parse_env(&src).map_err(|err| Failure(format!("{}: {err}", path.display())))?
                }
                None => (FnEnv::new(), VarEnv::new()),
            };
            for (f, _) in phi.iter() {
                if let Some(g) = e
                    .fn_vars()
                    .into_iter()
                    .find(|g| g.name() == f.name() && g != f)
                {
                    return Err(Failure(format!("{g} is bound with arity {}", f.arity())));
                }
            }
            let v = print_rat(&eval(&e, &phi, &rho));
            Ok((0, json!({"value": v}), text(&[v])))
        }
        Command::Derive { var, expr: s } => {
            if !VarName::is_identifier(var) {
                return Err(Failure(format!("`{var}` is not a variable name")));
            }
            let e = expr(s)?;
            let d = Expr::diff(&VarName::new(var), e);
            let out = to_expr(&canonicalize(&d)).to_string();
            Ok((0, json!({"canonical": out}), text(&[out])))
        }
        Command::Counterexample { lhs, rhs, budget } => {
            let (a, b) = pair(lhs, rhs)?;
            let found = match budget {
                Some(n) => counterexample_preferring_small(&a, &b, *n),
                None => counterexample(&a, &b),
            };
            let Some(cx) = found else {
                return Ok((0, json!({"result": "equal"}), text(&["equal".into()])));
            };
            let rho = cx.var_env();
            let (fns, vars) = env_json(&cx.fn_assign, &rho);
            let (l, r) = (print_rat(&cx.lhs), print_rat(&cx.rhs));
            let body = json!({
                "result": "not-equal",
                "functions": fns,
                "variables": vars,
                "lhs": l,
                "rhs": r,
            });
            // the text form is itself a valid environment file
            let out = format!(
                "# not-equal\n{}{}# lhs = {l}\n# rhs = {r}\n",
                cx.fn_assign, rho
            );
            Ok((1, body, out))
        }
        Command::CheckProof { file, rtc } => {
            let src = std::fs::read_to_string(file)
                .map_err(|err| Failure(format!("cannot read {}: {err}", file.display())))?;
            let proof = parse_proof(&src).map_err(|err| Failure(err.to_string()))?;
            let mode = if *rtc { Mode::Rtc } else { Mode::Full };
            match check_with(&proof, mode) {
                Ok((l, r)) => {
                    let (l, r) = (l.to_string(), r.to_string());
                    let out = text(&["accepted".into(), format!("{l} = {r}")]);
                    Ok((0, json!({"result": "accepted", "lhs": l, "rhs": r}), out))
                }
                Err(err) => {
                    let msg = err.to_string();
                    let out = text(&["rejected".into(), msg.clone()]);
                    Ok((1, json!({"result": "rejected", "error": msg}), out))
                }
            }
        }
        Command::OracleDecide { lhs, rhs, degree } => {
            let (a, b) = pair(lhs, rhs)?;
            let same = oracle_equal(&a, &b, *degree);
            let word = if same {
                "indistinguishable"
            } else {
                "not-equal"
            };
            Ok((
                i32::from(!same),
                json!({"result": word, "degree": degree}),
                text(&[word.into()]),
            ))
        }
        Command::Certify { expr: s } => {
            let e = expr(s)?;
            let cert = print_proof(&certify_canonicalize(&e));
            Ok((0, json!({"certificate": cert}), cert))
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((code, value, plain)) => {
            let _ = if cli.json {
                writeln!(out, "{value}")
            } else {
                out.write_all(plain.as_bytes())
            };
            code
        }
        Err(Failure(msg)) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({"error": msg}));
            }
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
