//! Certificate files.
//!
//! ```text
//! file    := def* proof
//! def     := (def @NAME proof)
//! proof   := @NAME
//!          | (axiom AXIOM) | (axiom const-add R R R) | (axiom const-mul R R R)
//!          | (refl "e") | (sym P) | (trans P P)
//!          | (cong-sum P P) | (cong-prod P P) | (cong-app f P*)
//!          | (cong-pdiff x P P)
//!          | (subst-var P (x "e")*)
//!          | (subst-fn P (f (x*) "e")*)
//! ```
//!
//! Expressions are quoted in the usual term syntax, `R` is an integer or
//! `n/d`, and `;` starts a comment running to the end of the line. A `def`
//! names a subproof used more than once; the printer emits one for every
//! shared node so that certificates stay linear in the number of distinct
//! steps. The arity of `cong-app` and `subst-fn` function variables is the
//! number of premises and parameters.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use super::check::rule_name;
use super::{AxiomId, Proof, Rule};
use crate::term::{parse, print, print_rat, Abstract, Expr, FnVar, Rat, VarName};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate parse error at byte {pos}: {msg}")]
pub struct ProofParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ProofParseError> {
    Err(ProofParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug)]
enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn skip_blank(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_blank();
        self.pos >= self.src.len()
    }

    fn read(&mut self) -> Result<Sexp, ProofParseError> {
        self.skip_blank();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        match rest.chars().next() {
            None => err(start, "unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.src[self.pos..].chars().next() {
                        None => return err(start, "unclosed parenthesis"),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => err(start, "unexpected `)`"),
            Some('"') => {
                let mut out = String::new();
                let mut chars = rest.char_indices().skip(1);
                while let Some((i, c)) = chars.next() {
                    match c {
                        '"' => {
                            self.pos += i + 1;
                            return Ok(Sexp::Str(out, start));
                        }
                        '\\' => match chars.next() {
                            Some((_, c @ ('"' | '\\'))) => out.push(c),
                            _ => return err(start + i, "bad escape in string"),
                        },
                        c => out.push(c),
                    }
                }
                err(start, "unterminated string")
            }
            Some(_) => {
                let len = rest
                    .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';'))
                    .unwrap_or(rest.len());
                self.pos += len;
                Ok(Sexp::Atom(rest[..len].to_string(), start))
            }
        }
    }
}

struct Builder {
    defs: HashMap<String, Proof>,
}

impl Builder {
    fn proof(&self, s: &Sexp) -> Result<Proof, ProofParseError> {
        let (items, pos) = match s {
            Sexp::Atom(a, pos) if a.starts_with('@') => {
                return match self.defs.get(a) {
                    Some(p) => Ok(p.clone()),
                    None => err(*pos, format!("undefined proof `{a}`")),
                }
            }
            Sexp::List(items, pos) if !items.is_empty() => (items, *pos),
            other => return err(other.pos(), "expected a proof"),
        };
        let head = atom(&items[0])?;
        let args = &items[1..];
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                err(pos, format!("`{head}` takes {n} arguments"))
            }
        };
        let rule = match head {
            "axiom" => {
                let name = args.first().map(atom).transpose()?.unwrap_or("");
                match name {
                    "const-add" | "const-mul" => {
                        want(4)?;
                        let a = rat(&args[1])?;
                        let b = rat(&args[2])?;
                        let c = rat(&args[3])?;
                        Rule::Axiom(if name == "const-add" {
                            AxiomId::ConstAdd(a, b, c)
                        } else {
                            AxiomId::ConstMul(a, b, c)
                        })
                    }
                    _ => {
                        want(1)?;
                        match AxiomId::from_name(name) {
                            Some(id) => Rule::Axiom(id),
                            None => return err(args[0].pos(), format!("unknown axiom `{name}`")),
                        }
                    }
                }
            }
            "refl" => {
                want(1)?;
                Rule::Refl(expr(&args[0])?)
            }
            "sym" => {
                want(1)?;
                Rule::Sym(self.proof(&args[0])?)
            }
            "trans" | "cong-sum" | "cong-prod" => {
                want(2)?;
                let (p, q) = (self.proof(&args[0])?, self.proof(&args[1])?);
                match head {
                    "trans" => Rule::Trans(p, q),
                    "cong-sum" => Rule::CongSum(p, q),
                    _ => Rule::CongProd(p, q),
                }
            }
            "cong-app" => {
                let Some(f) = args.first() else {
                    return err(pos, "`cong-app` needs a function name");
                };
                let f = name(f)?;
                let ps = args[1..]
                    .iter()
                    .map(|a| self.proof(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Rule::CongApp(FnVar::new(f, ps.len()), ps)
            }
            "cong-pdiff" => {
                want(3)?;
                Rule::CongPDiff(
                    VarName::new(name(&args[0])?),
                    self.proof(&args[1])?,
                    self.proof(&args[2])?,
                )
            }
            "subst-var" => {
                let Some(p) = args.first() else {
                    return err(pos, "`subst-var` needs a premise");
                };
                let mut b = BTreeMap::new();
                for binding in &args[1..] {
                    match binding {
                        Sexp::List(kv, bpos) if kv.len() == 2 => {
                            let x = VarName::new(name(&kv[0])?);
                            if b.insert(x, expr(&kv[1])?).is_some() {
                                return err(*bpos, "variable bound twice");
                            }
                        }
                        other => return err(other.pos(), "expected (x \"e\")"),
                    }
                }
                Rule::SubstVar(self.proof(p)?, b)
            }
            "subst-fn" => {
                let Some(p) = args.first() else {
                    return err(pos, "`subst-fn` needs a premise");
                };
                let mut b = BTreeMap::new();
                for binding in &args[1..] {
                    match binding {
                        Sexp::List(kv, bpos) if kv.len() == 3 => {
                            let params = match &kv[1] {
                                Sexp::List(ps, _) => ps
                                    .iter()
                                    .map(|p| name(p).map(VarName::new))
                                    .collect::<Result<Vec<_>, _>>()?,
                                other => return err(other.pos(), "expected a parameter list"),
                            };
                            let f = FnVar::new(name(&kv[0])?, params.len());
                            let abs = Abstract::new(params, expr(&kv[2])?)
                                .or_else(|e| err(*bpos, e.to_string()))?;
                            if b.insert(f, abs).is_some() {
                                return err(*bpos, "function variable bound twice");
                            }
                        }
                        other => return err(other.pos(), "expected (f (x ...) \"e\")"),
                    }
                }
                Rule::SubstFn(self.proof(p)?, b)
            }
            other => return err(items[0].pos(), format!("unknown rule `{other}`")),
        };
        Ok(Proof::new(rule))
    }
}

fn atom(s: &Sexp) -> Result<&str, ProofParseError> {
    match s {
        Sexp::Atom(a, _) => Ok(a),
        other => err(other.pos(), "expected a symbol"),
    }
}

fn name(s: &Sexp) -> Result<&str, ProofParseError> {
    let a = atom(s)?;
    if VarName::is_identifier(a) {
        Ok(a)
    } else {
        err(s.pos(), format!("`{a}` is not an identifier"))
    }
}

fn rat(s: &Sexp) -> Result<Rat, ProofParseError> {
    let a = atom(s)?;
    let bad = || ProofParseError {
        pos: s.pos(),
        msg: format!("`{a}` is not a rational"),
    };
    let (n, d) = a.split_once('/').unwrap_or((a, "1"));
    let n: num::BigInt = n.parse().map_err(|_| bad())?;
    let d: num::BigInt = d.parse().map_err(|_| bad())?;
    if d == num::BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

fn expr(s: &Sexp) -> Result<Expr, ProofParseError> {
    match s {
        Sexp::Str(text, pos) => parse(text).map_err(|e| ProofParseError {
            pos: *pos,
            msg: format!("in expression: {e}"),
        }),
        other => err(other.pos(), "expected a quoted expression"),
    }
}

pub fn parse_proof(text: &str) -> Result<Proof, ProofParseError> {
    let mut reader = Reader { src: text, pos: 0 };
    let mut builder = Builder {
        defs: HashMap::new(),
    };
    loop {
        if reader.at_end() {
            return err(reader.pos, "no proof in input");
        }
        let item = reader.read()?;
        if let Sexp::List(items, pos) = &item {
            if matches!(items.first(), Some(Sexp::Atom(a, _)) if a == "def") {
                if items.len() != 3 {
                    return err(*pos, "`def` takes a name and a proof");
                }
                let label = atom(&items[1])?;
                if !label.starts_with('@') {
                    return err(items[1].pos(), "proof names start with `@`");
                }
                let p = builder.proof(&items[2])?;
                builder.defs.insert(label.to_string(), p);
                continue;
            }
        }
        let p = builder.proof(&item)?;
        if !reader.at_end() {
            return err(reader.pos, "trailing input after the proof");
        }
        return Ok(p);
    }
}

fn quote(e: &Expr) -> String {
    format!(
        "\"{}\"",
        print(e).replace('\\', "\\\\").replace('"', "\\\"")
    )
}

pub fn print_proof(p: &Proof) -> String {
    let mut uses: HashMap<*const Rule, usize> = HashMap::new();
    count_uses(p, &mut uses);
    let mut printer = Printer {
        uses,
        labels: HashMap::new(),
        out: String::new(),
    };
    let body = printer.node(p, true);
    printer.out.push_str(&body);
    printer.out.push('\n');
    printer.out
}

fn count_uses(p: &Proof, uses: &mut HashMap<*const Rule, usize>) {
    let n = uses.entry(Arc::as_ptr(&p.0)).or_insert(0);
    *n += 1;
    if *n == 1 {
        for q in p.premises() {
            count_uses(q, uses);
        }
    }
}

struct Printer {
    uses: HashMap<*const Rule, usize>,
    labels: HashMap<*const Rule, String>,
    out: String,
}

impl Printer {
    /// Text for `p`, first emitting definitions for shared subproofs.
    fn node(&mut self, p: &Proof, root: bool) -> String {
        let key = Arc::as_ptr(&p.0);
        if let Some(l) = self.labels.get(&key) {
            return l.clone();
        }
        let parts: Vec<String> = p
            .premises()
            .into_iter()
            .map(|q| self.node(q, false))
            .collect();
        let text = render(p.rule(), &parts);
        let shared = self.uses[&key] > 1 && !matches!(p.rule(), Rule::Axiom(_));
        if shared && !root {
            let label = format!("@{}", self.labels.len());
            let _ = writeln!(self.out, "(def {label} {text})");
            self.labels.insert(key, label.clone());
            label
        } else {
            text
        }
    }
}

fn render(rule: &Rule, parts: &[String]) -> String {
    let head = rule_name(rule);
    match rule {
        Rule::Axiom(id) => match id {
            AxiomId::ConstAdd(a, b, c) | AxiomId::ConstMul(a, b, c) => format!(
                "(axiom {} {} {} {})",
                id.name(),
                print_rat(a),
                print_rat(b),
                print_rat(c)
            ),
            _ => format!("(axiom {})", id.name()),
        },
        Rule::Refl(e) => format!("(refl {})", quote(e)),
        Rule::CongApp(f, _) => {
            let mut s = format!("(cong-app {}", f.name());
            for p in parts {
                s.push(' ');
                s.push_str(p);
            }
            s.push(')');
            s
        }
        Rule::CongPDiff(x, ..) => format!("(cong-pdiff {} {} {})", x.as_str(), parts[0], parts[1]),
        Rule::SubstVar(_, b) => {
            let mut s = format!("(subst-var {}", parts[0]);
            for (x, e) in b {
                let _ = write!(s, " ({} {})", x.as_str(), quote(e));
            }
            s.push(')');
            s
        }
        Rule::SubstFn(_, b) => {
            let mut s = format!("(subst-fn {}", parts[0]);
            for (f, abs) in b {
                let ps: Vec<&str> = abs.params().iter().map(VarName::as_str).collect();
                let _ = write!(
                    s,
                    " ({} ({}) {})",
                    f.name(),
                    ps.join(" "),
                    quote(abs.body())
                );
            }
            s.push(')');
            s
        }
        _ => format!("({head} {})", parts.join(" ")),
    }
}
