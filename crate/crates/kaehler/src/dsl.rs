//! Line-oriented script language for building algebras and running queries,
//! with deterministic human-readable and JSON output.
//!
//! A script opens with a field declaration, binds names to constructors, and
//! then issues queries; each query appends one result record. Element
//! expressions are written in expanded form: integer coefficients, `*`
//! products, `^` powers.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{
    make_hom_on_generators, product, quotient_by_ideal, quotient_presentation, subalgebra_generated,
    truncated_poly, AlgRef, Hom, Ideal,
};
use crate::field::{Field, Scalar};
use crate::hochschild;
use crate::omega::{hc1, induced_map, kaehler, mayer_vietoris_check, hc1_integration_check};
use crate::structure::{is_pia, is_tame_pia};
use crate::subspace::Subspace;
use crate::tau;

#[derive(Clone, Debug, PartialEq)]
pub enum DslError {
    Parse { line: usize, msg: String },
    Eval { line: usize, msg: String },
}

impl std::fmt::Display for DslError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DslError::Parse { line, msg } => write!(f, "line {line}: syntax error: {msg}"),
            DslError::Eval { line, msg } => write!(f, "line {line}: {msg}"),
        }
    }
}

impl std::error::Error for DslError {}

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Int(i64),
    Sym(char),
}

impl Tok {
    fn render(&self) -> String {
        match self {
            Tok::Id(s) => s.clone(),
            Tok::Int(n) => n.to_string(),
            Tok::Sym(c) => c.to_string(),
        }
    }
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Tok>, DslError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| DslError::Parse {
                line: lineno,
                msg: format!("integer out of range: {text}"),
            })?;
            toks.push(Tok::Int(n));
        } else if "=(),;^*+-".contains(c) {
            toks.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(DslError::Parse {
                line: lineno,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(toks)
}

fn render_toks(toks: &[Tok]) -> String {
    let mut out = String::new();
    for (i, t) in toks.iter().enumerate() {
        if i > 0 {
            let tight = matches!(t, Tok::Sym('^') | Tok::Sym('*') | Tok::Sym(')') | Tok::Sym(','))
                || matches!(toks[i - 1], Tok::Sym('^') | Tok::Sym('*') | Tok::Sym('('));
            if !tight {
                out.push(' ');
            }
        }
        out.push_str(&t.render());
    }
    out
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

type ElemExpr = Vec<Tok>;

#[derive(Clone, Debug)]
enum Ctor {
    Trunc(String, usize),
    Product(String, String),
    Present { vars: Vec<String>, n: u32, polys: Vec<ElemExpr> },
    Subalg { parent: String, gens: Vec<(Option<String>, ElemExpr)> },
    Quot { parent: String, gens: Vec<ElemExpr> },
    IdealOf { parent: String, gens: Vec<ElemExpr> },
    HomOf { source: String, target: String, images: Vec<(String, ElemExpr)> },
    Include { sub: String, parent: String },
}

#[derive(Clone, Debug)]
enum Query {
    Omega(String),
    Kernel(String),
    KernelIntersect(String, String),
    TauBracket { alg: String, maps: Vec<String>, pairs: Vec<(ElemExpr, ElemExpr)> },
    Hh { alg: String, deg: usize },
    HhRel { alg: String, ideal: String, deg: usize },
    Hh0Double { map: String, ideal: String },
    CheckMv { map: String, ideal: String },
    CheckHc1Seq { map: String },
    Check31 { alg: String, max_ideal: Option<String>, ideal: String },
    CheckPia(String),
    CheckSurj { map: String, ideal: String },
    Eta { n: usize, m: usize },
    Guettes { map: String },
    Print { alg: String, expr: ElemExpr },
    Seminormal { exps: Vec<usize> },
    Hc1(String),
    Valuation { map: String, expr: ElemExpr },
    M3(String),
    SocleV(String),
    Euler { alg: String, grading: Vec<u32>, x: ElemExpr, y: ElemExpr },
}

#[derive(Clone, Debug)]
enum Stmt {
    FieldDecl,
    Bind { name: String, ctor: Ctor },
    Query(Query),
}

#[derive(Clone, Debug)]
pub struct Script {
    statements: Vec<(usize, Stmt, String)>,
    pub field: Field,
}

impl Script {
    /// Canonical text of the script; parsing the rendering yields the same
    /// statements.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (_, _, text) in &self.statements {
            out.push_str(text);
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(self.err(format!("expected identifier, found {other:?}"))),
        }
    }

    fn int(&mut self) -> Result<i64, DslError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            other => Err(self.err(format!("expected integer, found {other:?}"))),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), DslError> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(self.err(format!("expected `{c}`, found {other:?}"))),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), DslError> {
        match self.next() {
            Some(Tok::Id(s)) if s == k => Ok(()),
            other => Err(self.err(format!("expected `{k}`, found {other:?}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("trailing tokens"))
        }
    }

    /// Collects tokens up to a top-level `,` or one of `stops`; used for
    /// element expressions.
    fn expr_until(&mut self, stops: &[char]) -> Result<ElemExpr, DslError> {
        let start = self.pos;
        while let Some(t) = self.peek() {
            if let Tok::Sym(c) = t {
                if *c == ',' || stops.contains(c) {
                    break;
                }
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("empty expression"));
        }
        Ok(self.toks[start..self.pos].to_vec())
    }
}

/// Splits the token list of a parenthesized argument pack into groups by
/// `;`, each group a list of comma-separated token runs.
fn arg_groups(cur: &mut Cursor) -> Result<Vec<Vec<ElemExpr>>, DslError> {
    cur.sym('(')?;
    let mut groups: Vec<Vec<ElemExpr>> = vec![Vec::new()];
    let mut current: ElemExpr = Vec::new();
    let mut depth = 0usize;
    loop {
        match cur.next() {
            None => return Err(cur.err("unterminated argument list")),
            Some(Tok::Sym(')')) if depth == 0 => {
                if !current.is_empty() {
                    groups.last_mut().unwrap().push(current);
                }
                break;
            }
            Some(Tok::Sym(';')) if depth == 0 => {
                if !current.is_empty() {
                    groups.last_mut().unwrap().push(std::mem::take(&mut current));
                }
                groups.push(Vec::new());
            }
            Some(Tok::Sym(',')) if depth == 0 => {
                if current.is_empty() {
                    return Err(cur.err("empty argument"));
                }
                groups.last_mut().unwrap().push(std::mem::take(&mut current));
            }
            Some(t) => {
                if t == Tok::Sym('(') {
                    depth += 1;
                } else if t == Tok::Sym(')') {
                    depth -= 1;
                }
                current.push(t);
            }
        }
    }
    Ok(groups)
}

fn single_ident(e: &ElemExpr, cur: &Cursor) -> Result<String, DslError> {
    match e.as_slice() {
        [Tok::Id(s)] => Ok(s.clone()),
        _ => Err(cur.err(format!("expected a name, found `{}`", render_toks(e)))),
    }
}

fn single_int(e: &ElemExpr, cur: &Cursor) -> Result<i64, DslError> {
    match e.as_slice() {
        [Tok::Int(n)] => Ok(*n),
        _ => Err(cur.err(format!("expected an integer, found `{}`", render_toks(e)))),
    }
}

fn parse_ctor(name: &str, cur: &mut Cursor) -> Result<Ctor, DslError> {
    let groups = arg_groups(cur)?;
    cur.expect_end()?;
    let flat = |groups: &[Vec<ElemExpr>]| -> Vec<ElemExpr> {
        groups.iter().flatten().cloned().collect()
    };
    match name {
        "trunc" => {
            let args = flat(&groups);
            if args.len() != 2 {
                return Err(cur.err("trunc takes (variable, n)"));
            }
            let var = single_ident(&args[0], cur)?;
            let n = single_int(&args[1], cur)?;
            if n < 1 {
                return Err(cur.err("truncation order must be positive"));
            }
            Ok(Ctor::Trunc(var, n as usize))
        }
        "product" => {
            let args = flat(&groups);
            if args.len() != 2 {
                return Err(cur.err("product takes (a, b)"));
            }
            Ok(Ctor::Product(single_ident(&args[0], cur)?, single_ident(&args[1], cur)?))
        }
        "present" => {
            if groups.len() != 3 {
                return Err(cur.err("present takes (vars; N; polys)"));
            }
            let vars = groups[0]
                .iter()
                .map(|e| single_ident(e, cur))
                .collect::<Result<Vec<_>, _>>()?;
            if groups[1].len() != 1 {
                return Err(cur.err("present needs one truncation order"));
            }
            let n = single_int(&groups[1][0], cur)?;
            if n < 1 {
                return Err(cur.err("truncation order must be positive"));
            }
            Ok(Ctor::Present {
                vars,
                n: n as u32,
                polys: groups[2].clone(),
            })
        }
        "subalg" | "quot" | "ideal" => {
            if groups.len() != 2 {
                return Err(cur.err(format!("{name} takes (parent; elements)")));
            }
            let parent = single_ident(&groups[0][0], cur)?;
            let gens = groups[1].clone();
            Ok(match name {
                "subalg" => {
                    // Generators may carry a name for use in later element
                    // expressions: subalg(B; u=s^3, v=s^5).
                    let named = gens
                        .iter()
                        .map(|g| match (g.first(), g.get(1)) {
                            (Some(Tok::Id(n)), Some(Tok::Sym('='))) => {
                                (Some(n.clone()), g[2..].to_vec())
                            }
                            _ => (None, g.clone()),
                        })
                        .collect();
                    Ctor::Subalg {
                        parent,
                        gens: named,
                    }
                }
                "quot" => Ctor::Quot { parent, gens },
                _ => Ctor::IdealOf { parent, gens },
            })
        }
        "hom" => {
            if groups.len() != 2 || groups[0].len() != 2 {
                return Err(cur.err("hom takes (source, target; gen=expr, ...)"));
            }
            let source = single_ident(&groups[0][0], cur)?;
            let target = single_ident(&groups[0][1], cur)?;
            let mut images = Vec::new();
            for assign in &groups[1] {
                let eq = assign
                    .iter()
                    .position(|t| *t == Tok::Sym('='))
                    .ok_or_else(|| cur.err("hom images are written gen=expr"))?;
                let gen = single_ident(&assign[..eq].to_vec(), cur)?;
                if assign.len() == eq + 1 {
                    return Err(cur.err("missing image expression"));
                }
                images.push((gen, assign[eq + 1..].to_vec()));
            }
            Ok(Ctor::HomOf {
                source,
                target,
                images,
            })
        }
        "include" => {
            let args = flat(&groups);
            if args.len() != 2 {
                return Err(cur.err("include takes (subalgebra, parent)"));
            }
            Ok(Ctor::Include {
                sub: single_ident(&args[0], cur)?,
                parent: single_ident(&args[1], cur)?,
            })
        }
        _ => Err(cur.err(format!("unknown constructor `{name}`"))),
    }
}

fn parse_query(head: &str, cur: &mut Cursor) -> Result<Query, DslError> {
    let q = match head {
        "omega" => Query::Omega(cur.ident()?),
        "kernel" => Query::Kernel(cur.ident()?),
        "kernel_intersect" => Query::KernelIntersect(cur.ident()?, cur.ident()?),
        "tau_bracket" => {
            let alg = cur.ident()?;
            let mut maps = Vec::new();
            let mut pairs = Vec::new();
            if let Some(Tok::Id(k)) = cur.peek() {
                if k == "using" {
                    cur.keyword("using")?;
                    loop {
                        maps.push(cur.ident()?);
                        if cur.peek() == Some(&Tok::Sym(',')) {
                            cur.sym(',')?;
                        } else {
                            break;
                        }
                    }
                }
            }
            if let Some(Tok::Id(k)) = cur.peek() {
                if k == "pairs" {
                    cur.keyword("pairs")?;
                    while cur.peek() == Some(&Tok::Sym('(')) {
                        cur.sym('(')?;
                        let x = cur.expr_until(&[')'])?;
                        cur.sym(',')?;
                        let y = cur.expr_until(&[')'])?;
                        cur.sym(')')?;
                        pairs.push((x, y));
                    }
                }
            }
            Query::TauBracket { alg, maps, pairs }
        }
        "hh" => {
            let alg = cur.ident()?;
            cur.keyword("deg")?;
            Query::Hh {
                alg,
                deg: cur.int()? as usize,
            }
        }
        "hh_rel" => {
            let alg = cur.ident()?;
            let ideal = cur.ident()?;
            cur.keyword("deg")?;
            Query::HhRel {
                alg,
                ideal,
                deg: cur.int()? as usize,
            }
        }
        "hh0_double" => Query::Hh0Double {
            map: cur.ident()?,
            ideal: cur.ident()?,
        },
        "check" => {
            let kind = cur.ident()?;
            match kind.as_str() {
                "mv" => Query::CheckMv {
                    map: cur.ident()?,
                    ideal: cur.ident()?,
                },
                "hc1seq" => Query::CheckHc1Seq { map: cur.ident()? },
                "presentation" => {
                    let alg = cur.ident()?;
                    let a = cur.ident()?;
                    if cur.at_end() {
                        Query::Check31 {
                            alg,
                            max_ideal: None,
                            ideal: a,
                        }
                    } else {
                        Query::Check31 {
                            alg,
                            max_ideal: Some(a),
                            ideal: cur.ident()?,
                        }
                    }
                }
                "pia" => Query::CheckPia(cur.ident()?),
                "surj" => Query::CheckSurj {
                    map: cur.ident()?,
                    ideal: cur.ident()?,
                },
                other => return Err(cur.err(format!("unknown check `{other}`"))),
            }
        }
        "eta" => Query::Eta {
            n: cur.int()? as usize,
            m: cur.int()? as usize,
        },
        "guettes" => Query::Guettes { map: cur.ident()? },
        "print" => {
            let alg = cur.ident()?;
            let expr = cur.expr_until(&[])?;
            Query::Print { alg, expr }
        }
        "seminormal" => {
            let mut exps = Vec::new();
            while !cur.at_end() {
                exps.push(cur.int()? as usize);
            }
            if exps.len() < 2 {
                return Err(cur.err("seminormal needs at least two exponents"));
            }
            Query::Seminormal { exps }
        }
        "hc1" => Query::Hc1(cur.ident()?),
        "valuation" => {
            let map = cur.ident()?;
            let expr = cur.expr_until(&[])?;
            Query::Valuation { map, expr }
        }
        "m3" => Query::M3(cur.ident()?),
        "socle_v" => Query::SocleV(cur.ident()?),
        "euler" => {
            let alg = cur.ident()?;
            cur.keyword("grading")?;
            let mut grading = Vec::new();
            loop {
                grading.push(cur.int()? as u32);
                if cur.peek() == Some(&Tok::Sym(',')) {
                    cur.sym(',')?;
                } else {
                    break;
                }
            }
            cur.keyword("pair")?;
            let x = cur.expr_until(&[])?;
            cur.sym(',')?;
            let y = cur.expr_until(&[])?;
            Query::Euler { alg, grading, x, y }
        }
        other => return Err(DslError::Parse {
            line: cur.line,
            msg: format!("unknown statement `{other}`"),
        }),
    };
    cur.expect_end()?;
    Ok(q)
}

pub fn parse(text: &str) -> Result<Script, DslError> {
    let mut statements = Vec::new();
    let mut field: Option<Field> = None;
    let mut names: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: lineno,
        };
        let stmt = match &toks[0] {
            Tok::Id(head) if head == "field" => {
                cur.pos = 1;
                let f = match cur.next() {
                    Some(Tok::Id(s)) if s == "Q" => Field::Rationals,
                    Some(Tok::Id(s)) if s == "Fp" => {
                        let p = cur.int()?;
                        Field::prime(p as u64).map_err(|_| cur.err("not a prime"))?
                    }
                    Some(Tok::Id(s)) if s.starts_with('F') && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                        let p: u64 = s[1..].parse().map_err(|_| cur.err("bad prime"))?;
                        Field::prime(p).map_err(|_| cur.err("not a prime"))?
                    }
                    other => return Err(cur.err(format!("unknown field {other:?}"))),
                };
                cur.expect_end()?;
                if field.is_some() {
                    return Err(cur.err("duplicate field declaration"));
                }
                if !statements.is_empty() {
                    return Err(cur.err("field declaration must come first"));
                }
                field = Some(f);
                Stmt::FieldDecl
            }
            Tok::Id(head) if toks.get(1) == Some(&Tok::Sym('=')) => {
                cur.pos = 2;
                let ctor_name = cur.ident()?;
                let ctor = parse_ctor(&ctor_name, &mut cur)?;
                if names.contains(head) {
                    return Err(cur.err(format!("`{head}` is bound twice")));
                }
                names.push(head.clone());
                Stmt::Bind {
                    name: head.clone(),
                    ctor,
                }
            }
            Tok::Id(head) => {
                cur.pos = 1;
                Stmt::Query(parse_query(head, &mut cur)?)
            }
            other => {
                return Err(cur.err(format!("statement cannot start with {other:?}")));
            }
        };
        if field.is_none() {
            return Err(DslError::Parse {
                line: lineno,
                msg: "the field declaration must come first".to_string(),
            });
        }
        statements.push((lineno, stmt, render_toks(&toks)));
    }
    let field = field.ok_or(DslError::Parse {
        line: 1,
        msg: "missing field declaration".to_string(),
    })?;
    Ok(Script { statements, field })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ResultRecord {
    pub name: String,
    pub kind: String,
    pub payload: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub version: u32,
    pub field: String,
    pub results: Vec<ResultRecord>,
    pub diagnostics: Vec<String>,
}

impl RunOutput {
    pub fn ok(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Clone)]
enum Value {
    Alg(AlgRef),
    Map(Hom),
    Idl(Ideal),
}

struct Env {
    field: Field,
    values: HashMap<String, Value>,
    inclusions: HashMap<String, Hom>,
}

impl Env {
    fn alg(&self, name: &str) -> Result<AlgRef, String> {
        match self.values.get(name) {
            Some(Value::Alg(a)) => Ok(a.clone()),
            Some(_) => Err(format!("`{name}` is not an algebra")),
            None => Err(format!("unknown name `{name}`")),
        }
    }

    fn map(&self, name: &str) -> Result<Hom, String> {
        match self.values.get(name) {
            Some(Value::Map(h)) => Ok(h.clone()),
            Some(_) => Err(format!("`{name}` is not a homomorphism")),
            None => Err(format!("unknown name `{name}`")),
        }
    }

    fn ideal(&self, name: &str) -> Result<Ideal, String> {
        match self.values.get(name) {
            Some(Value::Idl(i)) => Ok(i.clone()),
            Some(_) => Err(format!("`{name}` is not an ideal")),
            None => Err(format!("unknown name `{name}`")),
        }
    }
}

/// Evaluates an element expression inside an algebra: sums of terms, each an
/// optional integer coefficient times `*`-separated named factors with `^`
/// powers.
fn eval_expr(a: &AlgRef, toks: &[Tok]) -> Result<Vec<Scalar>, String> {
    let f = a.field;
    let resolve = |name: &str| -> Result<Vec<Scalar>, String> {
        if let Ok(v) = a.named_elem(name) {
            return Ok(v);
        }
        if let Some(i) = a.basis_labels.iter().position(|l| l == name) {
            return Ok(a.basis_elem(i));
        }
        Err(format!("unknown element `{name}`"))
    };
    let mut total = a.zero_elem();
    let mut pos = 0;
    let mut negate = false;
    let mut first = true;
    while pos < toks.len() {
        if !first {
            match &toks[pos] {
                Tok::Sym('+') => negate = false,
                Tok::Sym('-') => negate = true,
                t => return Err(format!("expected + or -, found `{}`", t.render())),
            }
            pos += 1;
        } else if toks[pos] == Tok::Sym('-') {
            negate = true;
            pos += 1;
        }
        first = false;
        // One term: factors separated by `*`.
        let mut term = a.one_elem();
        let mut coeff = f.one();
        loop {
            match toks.get(pos) {
                Some(Tok::Int(n)) => {
                    coeff = f.mul(&coeff, &f.from_int(*n));
                    pos += 1;
                }
                Some(Tok::Id(name)) => {
                    let base = resolve(name)?;
                    let power = if toks.get(pos + 1) == Some(&Tok::Sym('^')) {
                        match toks.get(pos + 2) {
                            Some(Tok::Int(e)) if *e >= 0 => {
                                pos += 2;
                                *e as u32
                            }
                            _ => return Err("bad exponent".to_string()),
                        }
                    } else {
                        1
                    };
                    term = a.mul_elems(&term, &a.pow_elem(&base, power));
                    pos += 1;
                }
                t => return Err(format!("expected a factor, found {t:?}")),
            }
            if toks.get(pos) == Some(&Tok::Sym('*')) {
                pos += 1;
            } else {
                break;
            }
        }
        if negate {
            coeff = f.neg(&coeff);
        }
        for (i, t) in term.iter().enumerate() {
            total[i] = f.add(&total[i], &f.mul(&coeff, t));
        }
    }
    Ok(total)
}

fn render_elem(a: &AlgRef, v: &[Scalar]) -> String {
    let f = a.field;
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in v.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        let coeff = f.render(c);
        let label = &a.basis_labels[i];
        let body = if i == 0 {
            coeff.clone()
        } else if c.is_one() {
            label.clone()
        } else if f == Field::Rationals && coeff == "-1" {
            format!("-{label}")
        } else {
            format!("{coeff}*{label}")
        };
        parts.push(body);
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

fn eval_ctor(env: &mut Env, name: &str, ctor: &Ctor) -> Result<Value, String> {
    let f = env.field;
    match ctor {
        Ctor::Trunc(var, n) => {
            let a = truncated_poly(f, var, *n).map_err(|e| e.to_string())?;
            Ok(Value::Alg(Arc::new(a)))
        }
        Ctor::Product(a, b) => {
            let (p, _, _) = product(&env.alg(a)?, &env.alg(b)?).map_err(|e| e.to_string())?;
            Ok(Value::Alg(Arc::new(p)))
        }
        Ctor::Present { vars, n, polys } => {
            let t = Arc::new(
                crate::algebra::truncation_algebra(f, vars, *n).map_err(|e| e.to_string())?,
            );
            let extras = polys
                .iter()
                .map(|p| eval_expr(&t, p))
                .collect::<Result<Vec<_>, _>>()?;
            let a = quotient_presentation(f, vars, *n, &extras).map_err(|e| e.to_string())?;
            Ok(Value::Alg(Arc::new(a)))
        }
        Ctor::Subalg { parent, gens } => {
            let b = env.alg(parent)?;
            let elems = gens
                .iter()
                .map(|(_, g)| eval_expr(&b, g))
                .collect::<Result<Vec<_>, _>>()?;
            let names: Vec<Option<String>> = gens
                .iter()
                .map(|(n, g)| Some(n.clone().unwrap_or_else(|| render_toks(g))))
                .collect();
            let (sub, incl) = subalgebra_generated(&b, &elems, &names).map_err(|e| e.to_string())?;
            let _ = sub;
            env.inclusions.insert(name.to_string(), incl.clone());
            Ok(Value::Alg(incl.source.clone()))
        }
        Ctor::Quot { parent, gens } => {
            let a = env.alg(parent)?;
            let elems = gens
                .iter()
                .map(|g| eval_expr(&a, g))
                .collect::<Result<Vec<_>, _>>()?;
            let (_, surj, _) = quotient_by_ideal(&a, &elems).map_err(|e| e.to_string())?;
            env.inclusions.insert(name.to_string(), surj.clone());
            Ok(Value::Alg(surj.target.clone()))
        }
        Ctor::IdealOf { parent, gens } => {
            let a = env.alg(parent)?;
            let elems = gens
                .iter()
                .map(|g| eval_expr(&a, g))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Idl(Ideal::from_gens(&a, &elems)))
        }
        Ctor::HomOf {
            source,
            target,
            images,
        } => {
            let s = env.alg(source)?;
            let t = env.alg(target)?;
            let pairs = images
                .iter()
                .map(|(g, e)| Ok((g.clone(), eval_expr(&t, e)?)))
                .collect::<Result<Vec<_>, String>>()?;
            let h = make_hom_on_generators(&s, &t, &pairs).map_err(|e| e.to_string())?;
            Ok(Value::Map(h))
        }
        Ctor::Include { sub, parent } => {
            let b = env.alg(parent)?;
            let h = env
                .inclusions
                .get(sub)
                .cloned()
                .ok_or_else(|| format!("`{sub}` has no recorded inclusion"))?;
            if h.target.dim != b.dim {
                return Err(format!("`{sub}` was not built inside `{parent}`"));
            }
            Ok(Value::Map(h))
        }
    }
}

fn subspace_payload(omega: &crate::omega::OmegaModule, s: &Subspace) -> String {
    if s.is_zero() {
        return "dim 0".to_string();
    }
    let rendered: Vec<String> = s.basis_vectors().iter().map(|v| omega.render(v)).collect();
    format!("dim {}; basis {}", s.dim(), rendered.join(", "))
}

fn eval_query(env: &Env, q: &Query) -> Result<ResultRecord, String> {
    let record = |kind: &str, payload: String| ResultRecord {
        name: String::new(),
        kind: kind.to_string(),
        payload,
    };
    match q {
        Query::Omega(a) => {
            let alg = env.alg(a)?;
            let omega = kaehler(&alg);
            Ok(record("dimension", format!("dim {}", omega.kdim)))
        }
        Query::Kernel(fname) => {
            let h = env.map(fname)?;
            let src = Arc::new(kaehler(&h.source));
            let tgt = Arc::new(kaehler(&h.target));
            let ker = induced_map(&h, &src, &tgt).kernel();
            Ok(record("subspace", subspace_payload(&src, &ker)))
        }
        Query::KernelIntersect(fa, fb) => {
            let ha = env.map(fa)?;
            let hb = env.map(fb)?;
            if ha.source.dim != hb.source.dim {
                return Err("maps have different sources".to_string());
            }
            let src = Arc::new(kaehler(&ha.source));
            let ka = induced_map(&ha, &src, &Arc::new(kaehler(&ha.target))).kernel();
            let kb = induced_map(&hb, &src, &Arc::new(kaehler(&hb.target))).kernel();
            let both = ka.intersect(&kb).map_err(|_| "field mismatch".to_string())?;
            Ok(record("subspace", subspace_payload(&src, &both)))
        }
        Query::TauBracket { alg, maps, pairs } => {
            let a = env.alg(alg)?;
            let omega = Arc::new(kaehler(&a));
            let homs = maps
                .iter()
                .map(|m| env.map(m))
                .collect::<Result<Vec<_>, _>>()?;
            let extra = pairs
                .iter()
                .map(|(x, y)| Ok((eval_expr(&a, x)?, eval_expr(&a, y)?)))
                .collect::<Result<Vec<_>, String>>()?;
            let b = tau::tau_bracket(&omega, &homs, &extra).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!(
                    "lower dim {}; upper dim {}; certified {}",
                    b.lower.dim(),
                    b.upper.dim(),
                    b.certified_equal
                ),
            ))
        }
        Query::Hh { alg, deg } => {
            let a = env.alg(alg)?;
            let h = hochschild::hh(&a, *deg).map_err(|e| e.to_string())?;
            Ok(record("dimension", format!("dim {}", h.dim)))
        }
        Query::HhRel { alg, ideal, deg } => {
            let a = env.alg(alg)?;
            let i = env.ideal(ideal)?;
            if i.algebra.dim != a.dim {
                return Err("ideal does not belong to the algebra".to_string());
            }
            let h = hochschild::hh_relative(&a, &i, *deg).map_err(|e| e.to_string())?;
            Ok(record("dimension", format!("dim {}", h.dim)))
        }
        Query::Hh0Double { map, ideal } => {
            let h = env.map(map)?;
            let i = env.ideal(ideal)?;
            let rep = hochschild::double_relative_hh0(&h, &i).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!(
                    "cone dim {}; tensor dim {}; iso {}",
                    rep.cokernel_dim, rep.tensor_dim, rep.iso_confirmed
                ),
            ))
        }
        Query::CheckMv { map, ideal } => {
            let h = env.map(map)?;
            let i = env.ideal(ideal)?;
            let rep = mayer_vietoris_check(&h, &i).map_err(|e| e.to_string())?;
            Ok(record("verdict", format!("exact {}", rep.exact())))
        }
        Query::CheckHc1Seq { map } => {
            let h = env.map(map)?;
            let rep = hc1_integration_check(&h).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!(
                    "dims ({}, {}, {}, {}); exact {}",
                    rep.dim_kernel, rep.dim_hc1, rep.dim_b_mod_a, rep.dim_omega_b_mod_a, rep.exact
                ),
            ))
        }
        Query::Check31 {
            alg,
            max_ideal,
            ideal,
        } => {
            let a = env.alg(alg)?;
            if let Some(m) = max_ideal {
                let mi = env.ideal(m)?;
                let tracked = a.maximal_ideal().map_err(|e| e.to_string())?;
                if &mi.space != tracked {
                    return Err(format!("`{m}` is not the maximal ideal of `{alg}`"));
                }
            }
            let i = env.ideal(ideal)?;
            let rep = hochschild::hh1_rel_presentation_check(&a, &i).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!("hh1 dim {}; exact {}", rep.dim_hh1, rep.all_exact()),
            ))
        }
        Query::CheckPia(alg) => {
            let a = env.alg(alg)?;
            let (pia, _) = is_pia(&a).map_err(|e| e.to_string())?;
            let tame = is_tame_pia(&a).map_err(|e| e.to_string())?;
            Ok(record("verdict", format!("pia {pia}; tame {tame}")))
        }
        Query::CheckSurj { map, ideal } => {
            let h = env.map(map)?;
            let i = env.ideal(ideal)?;
            let rep = hochschild::surjectivity_check_1_2(&h, &i).map_err(|e| e.to_string())?;
            let payload = match rep.predicted_line {
                None => format!("onto {}", rep.onto_relative),
                Some(p) => format!("cokernel {}; predicted {}", rep.cokernel_line, p),
            };
            Ok(record("report", payload))
        }
        Query::Eta { n, m } => {
            let rep = hochschild::eta_element(env.field, *n, *m).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!("boundary matches {}; cycle {}", rep.boundary_matches, rep.is_cycle),
            ))
        }
        Query::Guettes { map } => {
            let h = env.map(map)?;
            let rep = tau::guettes_check(&h).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!(
                    "e {}; threshold {}; predicts nonzero {}; kernel dim {}",
                    rep.e, rep.threshold, rep.predicts_nonzero, rep.kernel_dim
                ),
            ))
        }
        Query::Print { alg, expr } => {
            let a = env.alg(alg)?;
            let v = eval_expr(&a, expr)?;
            Ok(record("basis", render_elem(&a, &v)))
        }
        Query::Seminormal { exps } => {
            let rep = tau::seminormal_kernel(env.field, exps).map_err(|e| e.to_string())?;
            Ok(record(
                "report",
                format!(
                    "kernel dim {}; expected {}; basis confirmed {}",
                    rep.kernel_dim, rep.expected_dim, rep.basis_confirmed
                ),
            ))
        }
        Query::Hc1(alg) => {
            let a = env.alg(alg)?;
            let omega = Arc::new(kaehler(&a));
            Ok(record("dimension", format!("dim {}", hc1(&omega).dim)))
        }
        Query::Valuation { map, expr } => {
            let h = env.map(map)?;
            let v = eval_expr(&h.source, expr)?;
            let val = tau::valuation(&h, &v).map_err(|e| e.to_string())?;
            let payload = match val {
                Some(k) => k.to_string(),
                None => "infinity".to_string(),
            };
            Ok(record("dimension", payload))
        }
        Query::M3(alg) => {
            let a = env.alg(alg)?;
            let omega = Arc::new(kaehler(&a));
            let w = tau::m3_witness(&omega).map_err(|e| e.to_string())?;
            let status = match w.status {
                tau::WitnessStatus::Certified => "certified",
                tau::WitnessStatus::Conditional => "conditional",
            };
            Ok(record("report", format!("status {status}; witness {}", w.rendered)))
        }
        Query::SocleV(alg) => {
            let a = env.alg(alg)?;
            let omega = Arc::new(kaehler(&a));
            let v = tau::tau_lower_socle(&omega).map_err(|e| e.to_string())?;
            Ok(record("dimension", format!("dim {}", v.dim())))
        }
        Query::Euler { alg, grading, x, y } => {
            let a = env.alg(alg)?;
            let omega = Arc::new(kaehler(&a));
            let xv = eval_expr(&a, x)?;
            let yv = eval_expr(&a, y)?;
            let w = tau::euler_differential(&omega, grading, &xv, &yv).map_err(|e| e.to_string())?;
            Ok(record("basis", omega.render(&w)))
        }
    }
}

pub fn evaluate(script: &Script) -> RunOutput {
    let mut env = Env {
        field: script.field,
        values: HashMap::new(),
        inclusions: HashMap::new(),
    };
    let mut results = Vec::new();
    let mut diagnostics = Vec::new();
    for (lineno, stmt, text) in &script.statements {
        match stmt {
            Stmt::FieldDecl => {}
            Stmt::Bind { name, ctor } => match eval_ctor(&mut env, name, ctor) {
                Ok(v) => {
                    env.values.insert(name.clone(), v);
                }
                Err(msg) => {
                    diagnostics.push(format!("line {lineno}: {msg}"));
                    break;
                }
            },
            Stmt::Query(q) => match eval_query(&env, q) {
                Ok(mut r) => {
                    r.name = text.clone();
                    results.push(r);
                }
                Err(msg) => {
                    diagnostics.push(format!("line {lineno}: {msg}"));
                    break;
                }
            },
        }
    }
    let field = match script.field {
        Field::Rationals => "Q".to_string(),
        Field::Prime(p) => format!("F{p}"),
    };
    RunOutput {
        version: 1,
        field,
        results,
        diagnostics,
    }
}

/// Evaluates only the bindings of a script and returns the algebras bound,
/// in order. Query lines are ignored; a failing binding is an error.
pub fn bound_algebras(script: &Script) -> Result<Vec<(String, AlgRef)>, DslError> {
    let mut env = Env {
        field: script.field,
        values: HashMap::new(),
        inclusions: HashMap::new(),
    };
    let mut out = Vec::new();
    for (lineno, stmt, _) in &script.statements {
        if let Stmt::Bind { name, ctor } = stmt {
            let v = eval_ctor(&mut env, name, ctor).map_err(|msg| DslError::Parse {
                line: *lineno,
                msg,
            })?;
            if let Value::Alg(a) = &v {
                out.push((name.clone(), a.clone()));
            }
            env.values.insert(name.clone(), v);
        }
    }
    Ok(out)
}

/// Canonical spacing for a single statement line, used to match query text
/// against result record names.
pub fn normalize_statement(text: &str) -> Result<String, DslError> {
    Ok(render_toks(&lex(text, 1)?))
}

pub fn run_text(text: &str) -> Result<RunOutput, DslError> {
    let script = parse(text)?;
    Ok(evaluate(&script))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_semigroup_script() {
        let text = "field Q\nB = trunc(s, 6)\nA = subalg(B; s^2, s^3)\nf = include(A, B)\nkernel f\n";
        let script = parse(text).unwrap();
        assert_eq!(script.statements.len(), 5);
        assert_eq!(script.field, Field::Rationals);
    }

    #[test]
    fn rejects_duplicate_field_declarations() {
        let err = parse("field Q\nfield F2\n").unwrap_err();
        assert!(matches!(err, DslError::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_missing_field_declaration() {
        assert!(parse("B = trunc(s, 3)\n").is_err());
    }

    #[test]
    fn round_trip_is_stable() {
        let text = "field F5\nB = trunc(s, 5)\nA = subalg(B; s^2, s^3)\nf = include(A, B)\nomega A\nkernel f\n";
        let script = parse(text).unwrap();
        let rendered = script.render();
        let again = parse(&rendered).unwrap();
        assert_eq!(rendered, again.render());
    }

    #[test]
    fn empty_script_after_field_declaration() {
        let out = run_text("field Q\n").unwrap();
        assert!(out.ok());
        assert!(out.results.is_empty());
    }

    #[test]
    fn wild_example_kernel_dims() {
        // x -> s^2, y -> s^3 into k[s]/(s^5): injective on differentials
        // over F5, one-dimensional kernel over Q.
        let template = "B = trunc(s, 5)\nA = present(x, y; 3; x*y, y^2)\nf = hom(A, B; x=s^2, y=s^3)\nomega A\nkernel f\n";
        let wild = run_text(&format!("field F5\n{template}")).unwrap();
        assert!(wild.ok(), "{:?}", wild.diagnostics);
        assert_eq!(wild.results[0].payload, "dim 4");
        assert_eq!(wild.results[1].payload, "dim 0");
        let tame = run_text(&format!("field Q\n{template}")).unwrap();
        assert!(tame.ok(), "{:?}", tame.diagnostics);
        assert!(tame.results[1].payload.starts_with("dim 1"));
    }

    #[test]
    fn json_output_is_deterministic() {
        let text = "field Q\nB = trunc(s, 4)\nomega B\nhh B deg 1\n";
        let a = run_text(text).unwrap().to_json();
        let b = run_text(text).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"version\": 1"));
        assert!(a.contains("\"field\": \"Q\""));
    }

    #[test]
    fn diagnostics_carry_the_line_number() {
        let out = run_text("field Q\nomega missing\n").unwrap();
        assert!(!out.ok());
        assert!(out.diagnostics[0].starts_with("line 2:"));
    }

    #[test]
    fn expression_arithmetic() {
        let out = run_text("field Q\nB = trunc(s, 4)\nprint B 2*s^2 - s^3 + 1\n").unwrap();
        assert!(out.ok());
        assert_eq!(out.results[0].payload, "1 + 2*s^2 - s^3");
    }

    #[test]
    fn ideal_and_relative_homology() {
        let out = run_text(
            "field Q\nR = trunc(t, 2)\nI = ideal(R; t)\nhh_rel R I deg 1\n",
        )
        .unwrap();
        assert!(out.ok(), "{:?}", out.diagnostics);
        assert_eq!(out.results[0].payload, "dim 1");
    }

    #[test]
    fn quot_builds_the_quotient() {
        let out = run_text("field Q\nB = trunc(s, 6)\nC = quot(B; s^3)\nomega C\n").unwrap();
        assert!(out.ok(), "{:?}", out.diagnostics);
        assert_eq!(out.results[0].payload, "dim 2");
    }

    #[test]
    fn tau_bracket_for_a_wild_line() {
        let text = "field F2\nA = trunc(x, 2)\nB = trunc(s, 5)\nf = hom(A, B; x=s^3)\ntau_bracket A using f\n";
        let out = run_text(text).unwrap();
        assert!(out.ok(), "{:?}", out.diagnostics);
        assert_eq!(out.results[0].payload, "lower dim 1; upper dim 1; certified true");
    }
}
