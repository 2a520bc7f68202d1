//! Tokenizer and recursive-descent parser for the script language. One
//! statement per line, `#` starts a comment, names must be defined before
//! use and defined at most once.

use super::*;
use crate::error::{Error, Result};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
}

struct Line {
    toks: Vec<(Tok, usize)>, // token with starting column (1-based)
    line: usize,
    pos: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn tokenize(line: usize, text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let n: i64 = chars[i..j]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| err(line, col, "integer literal out of range"))?;
            out.push((Tok::Int(n), col));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push((Tok::Ident(chars[i..j].iter().collect()), col));
            i = j;
            continue;
        }
        if "=(){}[];,*/+-^".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
            continue;
        }
        return Err(err(line, col, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

impl Line {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(_, c)| c + 1).unwrap_or(1))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        let found = match self.peek() {
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Int(n)) => format!("'{n}'"),
            Some(Tok::Sym(c)) => format!("'{c}'"),
            None => "end of line".into(),
        };
        Err(err(self.line, self.col(), format!("expected {expected}, found {found}")))
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(&format!("'{c}'")),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(&format!("'{kw}'")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("a name"),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(n)) if *n >= 0 => {
                let n = *n as u64;
                self.pos += 1;
                Ok(n)
            }
            _ => self.fail("a nonnegative integer"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("end of line")
        }
    }
}

/// Names defined so far, by namespace, for use-before-definition checks.
#[derive(Default)]
struct Defined {
    rings: HashSet<String>,
    modules: HashSet<String>,
    morphisms: HashSet<String>,
    seses: HashSet<String>,
    families: HashSet<String>,
}

pub fn parse_script(text: &str) -> Result<Script> {
    let mut statements = Vec::new();
    let mut defined = Defined::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(line_no, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut line = Line { toks, line: line_no, pos: 0 };
        let kind = parse_statement(&mut line, &mut defined)?;
        line.finish()?;
        statements.push(Statement { line: line_no, kind });
    }
    Ok(Script { statements })
}

fn check_fresh(line: &Line, defined: &Defined, name: &str) -> Result<()> {
    if defined.rings.contains(name)
        || defined.modules.contains(name)
        || defined.morphisms.contains(name)
        || defined.seses.contains(name)
        || defined.families.contains(name)
    {
        return Err(err(line.line, line.col(), format!("duplicate name '{name}'")));
    }
    Ok(())
}

fn parse_statement(line: &mut Line, defined: &mut Defined) -> Result<StatementKind> {
    let head = line.ident()?;
    match head.as_str() {
        "ring" => {
            let name = line.ident()?;
            check_fresh(line, defined, &name)?;
            line.expect_sym('=')?;
            let expr = parse_ring_expr(line, defined)?;
            defined.rings.insert(name.clone());
            Ok(StatementKind::RingDef { name, expr })
        }
        "module" => {
            let name = line.ident()?;
            check_fresh(line, defined, &name)?;
            line.expect_sym('=')?;
            let expr = parse_module_expr(line, defined)?;
            defined.modules.insert(name.clone());
            Ok(StatementKind::ModuleDef { name, expr })
        }
        "morphism" => {
            let name = line.ident()?;
            check_fresh(line, defined, &name)?;
            line.expect_sym('=')?;
            line.expect_keyword("map")?;
            line.expect_sym('(')?;
            let source = module_name(line, defined)?;
            line.expect_sym(',')?;
            let target = module_name(line, defined)?;
            line.expect_sym(';')?;
            let entries = parse_matrix(line)?;
            line.expect_sym(')')?;
            defined.morphisms.insert(name.clone());
            Ok(StatementKind::MorphismDef { name, source, target, entries })
        }
        "ses" => {
            let name = line.ident()?;
            check_fresh(line, defined, &name)?;
            line.expect_sym('=')?;
            line.expect_keyword("ses")?;
            line.expect_sym('(')?;
            let inj = known_name(line, defined, "morphism")?;
            line.expect_sym(',')?;
            let surj = known_name(line, defined, "morphism")?;
            line.expect_sym(')')?;
            defined.seses.insert(name.clone());
            Ok(StatementKind::SesDef { name, inj, surj })
        }
        "family" => {
            let name = line.ident()?;
            check_fresh(line, defined, &name)?;
            line.expect_sym('=')?;
            let kw = line.ident()?;
            let (ring, members) = match kw.as_str() {
                "default" => {
                    line.expect_sym('(')?;
                    let r = parse_ring_ref(line, defined)?;
                    line.expect_sym(')')?;
                    (r, None)
                }
                "family" => {
                    line.expect_sym('(')?;
                    let r = parse_ring_ref(line, defined)?;
                    line.expect_sym(';')?;
                    let mut members = vec![parse_module_expr(line, defined)?];
                    while line.peek() == Some(&Tok::Sym(',')) {
                        line.next();
                        members.push(parse_module_expr(line, defined)?);
                    }
                    line.expect_sym(')')?;
                    (r, Some(members))
                }
                _ => return line.fail("'family' or 'default'"),
            };
            defined.families.insert(name.clone());
            Ok(StatementKind::FamilyDef { name, ring, members })
        }
        "pd" | "resolve" => {
            let module = parse_module_atom(line, defined)?;
            let over = parse_over(line, defined)?;
            Ok(StatementKind::Query(if head == "pd" {
                Query::Pd { module, over }
            } else {
                Query::Resolve { module, over }
            }))
        }
        "tor" | "ext" => {
            let degree = line.uint()? as usize;
            let left = parse_module_atom(line, defined)?;
            let right = parse_module_atom(line, defined)?;
            let over = parse_over(line, defined)?;
            Ok(StatementKind::Query(if head == "tor" {
                Query::Tor { degree, left, right, over }
            } else {
                Query::Ext { degree, left, right, over }
            }))
        }
        "ftfd" => {
            let module = parse_module_atom(line, defined)?;
            let family = known_name(line, defined, "family")?;
            let over = parse_over(line, defined)?;
            Ok(StatementKind::Query(Query::Ftfd { module, family, over }))
        }
        "fpd" => {
            let r = parse_ring_ref(line, defined)?;
            Ok(StatementKind::Query(Query::Fpd(r)))
        }
        "nonsplit" => {
            let s = known_name(line, defined, "ses")?;
            Ok(StatementKind::Query(Query::NonSplit(s)))
        }
        "check" => parse_check(line, defined).map(StatementKind::Query),
        other => Err(err(line.line, 1, format!("unknown statement '{other}'"))),
    }
}

fn parse_check(line: &mut Line, defined: &mut Defined) -> Result<Query> {
    let what = line.ident()?;
    match what.as_str() {
        "quotient" => {
            line.expect_keyword("R")?;
            line.expect_sym('=')?;
            let ring = parse_ring_ref(line, defined)?;
            line.expect_keyword("a")?;
            line.expect_sym('=')?;
            let a = parse_scalar(line)?;
            Ok(Query::CheckQuotient { ring, a })
        }
        "polynomial" => {
            line.expect_keyword("field")?;
            line.expect_sym('=')?;
            let field = parse_field_lit(line)?;
            line.expect_keyword("m")?;
            line.expect_sym('=')?;
            let m = line.uint()? as usize;
            Ok(Query::CheckPolynomial { field, m })
        }
        "triangular" => {
            let r = parse_ring_ref(line, defined)?;
            Ok(Query::CheckTriangular(r))
        }
        "localization" => {
            let ring = parse_ring_ref(line, defined)?;
            line.expect_keyword("primes")?;
            line.expect_sym('=')?;
            let mut primes = vec![line.uint()?];
            while line.peek() == Some(&Tok::Sym(',')) {
                line.next();
                primes.push(line.uint()?);
            }
            Ok(Query::CheckLocalization { ring, primes })
        }
        _ => line.fail("'quotient', 'polynomial', 'triangular' or 'localization'"),
    }
}

fn known_name(line: &mut Line, defined: &Defined, namespace: &str) -> Result<String> {
    let col = line.col();
    let name = line.ident()?;
    let known = match namespace {
        "ring" => defined.rings.contains(&name),
        "module" => defined.modules.contains(&name),
        "morphism" => defined.morphisms.contains(&name),
        "ses" => defined.seses.contains(&name),
        "family" => defined.families.contains(&name),
        _ => false,
    };
    if !known {
        return Err(err(line.line, col, format!("{namespace} '{name}' used before definition")));
    }
    Ok(name)
}

fn module_name(line: &mut Line, defined: &Defined) -> Result<String> {
    known_name(line, defined, "module")
}

fn parse_field_lit(line: &mut Line) -> Result<FieldLit> {
    let col = line.col();
    let name = line.ident()?;
    if name == "Q" {
        return Ok(FieldLit::Q);
    }
    if let Some(rest) = name.strip_prefix('F') {
        if let Ok(p) = rest.parse::<u64>() {
            return Ok(FieldLit::Fp(p));
        }
    }
    Err(err(line.line, col, format!("expected a field (Q or Fp), found '{name}'")))
}

fn parse_over(line: &mut Line, defined: &Defined) -> Result<Option<RingRef>> {
    if line.peek() == Some(&Tok::Ident("over".into())) {
        line.next();
        Ok(Some(parse_ring_ref(line, defined)?))
    } else {
        Ok(None)
    }
}

fn parse_ring_ref(line: &mut Line, defined: &Defined) -> Result<RingRef> {
    match line.peek() {
        Some(Tok::Ident(name)) if defined.rings.contains(name) => {
            let n = name.clone();
            line.next();
            Ok(RingRef::Name(n))
        }
        _ => Ok(RingRef::Inline(Box::new(parse_ring_expr_inner(line, defined)?))),
    }
}

fn parse_ring_expr(line: &mut Line, defined: &Defined) -> Result<RingExpr> {
    parse_ring_expr_inner(line, defined)
}

fn parse_ring_expr_inner(line: &mut Line, defined: &Defined) -> Result<RingExpr> {
    let col = line.col();
    let head = line.ident()?;
    match head.as_str() {
        "integers" => Ok(RingExpr::Integers),
        "field" => {
            line.expect_sym('(')?;
            let k = parse_field_lit(line)?;
            line.expect_sym(')')?;
            Ok(RingExpr::Field(k))
        }
        "local" => {
            line.expect_sym('(')?;
            let p = line.uint()?;
            line.expect_sym(')')?;
            Ok(RingExpr::Local(p))
        }
        "polypid" => {
            line.expect_sym('(')?;
            let k = parse_field_lit(line)?;
            line.expect_sym(')')?;
            Ok(RingExpr::PolyPid(k))
        }
        "koszul" => {
            line.expect_sym('(')?;
            let k = parse_field_lit(line)?;
            line.expect_sym(',')?;
            let m = line.uint()? as usize;
            line.expect_sym(')')?;
            Ok(RingExpr::Koszul(k, m))
        }
        "zmod" => {
            line.expect_sym('(')?;
            let n = line.uint()?;
            line.expect_sym(')')?;
            Ok(RingExpr::ZMod(n))
        }
        "utn" => {
            line.expect_sym('(')?;
            let k = parse_field_lit(line)?;
            line.expect_sym(',')?;
            let n = line.uint()? as usize;
            line.expect_sym(')')?;
            Ok(RingExpr::Utn(k, n))
        }
        "fdalgebra" => {
            line.expect_sym('(')?;
            let field = parse_field_lit(line)?;
            line.expect_sym(')')?;
            line.expect_sym('{')?;
            line.expect_keyword("basis")?;
            let mut basis = vec![basis_label(line)?];
            while line.peek() == Some(&Tok::Sym(',')) {
                line.next();
                basis.push(basis_label(line)?);
            }
            let mut products = Vec::new();
            while line.peek() == Some(&Tok::Sym(';')) {
                line.next();
                let a = basis_label(line)?;
                line.expect_sym('*')?;
                let b = basis_label(line)?;
                line.expect_sym('=')?;
                let e = parse_elem(line)?;
                products.push((a, b, e));
            }
            line.expect_sym('}')?;
            Ok(RingExpr::FdAlgebra { field, basis, products })
        }
        "triangular" => {
            line.expect_sym('(')?;
            let left = parse_ring_ref(line, defined)?;
            line.expect_sym(',')?;
            let right = parse_ring_ref(line, defined)?;
            line.expect_sym(',')?;
            line.expect_keyword("regular")?;
            line.expect_sym('(')?;
            let bim = parse_ring_ref(line, defined)?;
            line.expect_sym(')')?;
            line.expect_sym(')')?;
            Ok(RingExpr::Triangular { left, right, bimodule: BimodExpr::Regular(bim) })
        }
        other => Err(err(line.line, col, format!("unknown ring constructor '{other}'"))),
    }
}

fn basis_label(line: &mut Line) -> Result<String> {
    match line.peek() {
        Some(Tok::Ident(s)) => {
            let s = s.clone();
            line.next();
            Ok(s)
        }
        Some(Tok::Int(n)) => {
            let s = n.to_string();
            line.next();
            Ok(s)
        }
        _ => line.fail("a basis label"),
    }
}

fn parse_coeff(line: &mut Line) -> Result<CoeffLit> {
    let negative = if line.peek() == Some(&Tok::Sym('-')) {
        line.next();
        true
    } else {
        false
    };
    let n = match line.peek() {
        Some(Tok::Int(n)) => {
            let n = *n;
            line.next();
            n
        }
        _ => return line.fail("a number"),
    };
    let n = if negative { -n } else { n };
    if line.peek() == Some(&Tok::Sym('/')) {
        line.next();
        let d = match line.peek() {
            Some(Tok::Int(d)) if *d > 0 => {
                let d = *d;
                line.next();
                d
            }
            _ => return line.fail("a positive denominator"),
        };
        Ok(CoeffLit::Frac(n, d))
    } else {
        Ok(CoeffLit::Int(n))
    }
}

/// An algebra element literal: terms `c`, `c*label`, or a bare `label`,
/// joined by `+`.
fn parse_elem(line: &mut Line) -> Result<ElemLit> {
    let mut terms = Vec::new();
    loop {
        match line.peek() {
            Some(Tok::Ident(_)) => {
                let label = basis_label(line)?;
                terms.push((CoeffLit::Int(1), Some(label)));
            }
            _ => {
                let c = parse_coeff(line)?;
                if line.peek() == Some(&Tok::Sym('*')) {
                    line.next();
                    let label = basis_label(line)?;
                    terms.push((c, Some(label)));
                } else {
                    terms.push((c, None));
                }
            }
        }
        if line.peek() == Some(&Tok::Sym('+')) {
            line.next();
        } else {
            break;
        }
    }
    // a single explicit zero means the zero element
    if terms == vec![(CoeffLit::Int(0), None)] {
        terms.clear();
    }
    Ok(ElemLit { terms })
}

/// A scalar entry: a sum of `c`, `x`, `c*x`, `x^k`, `c*x^k` terms.
fn parse_scalar(line: &mut Line) -> Result<ScalarLit> {
    let mut terms: Vec<(CoeffLit, u32)> = Vec::new();
    loop {
        let (coeff, has_explicit_coeff) = match line.peek() {
            Some(Tok::Ident(s)) if s == "x" => (CoeffLit::Int(1), false),
            _ => (parse_coeff(line)?, true),
        };
        let pow = if has_explicit_coeff {
            if line.peek() == Some(&Tok::Sym('*')) {
                line.next();
                line.expect_keyword("x")?;
                parse_power(line)?
            } else {
                0
            }
        } else {
            line.expect_keyword("x")?;
            parse_power(line)?
        };
        terms.push((coeff, pow));
        if line.peek() == Some(&Tok::Sym('+')) {
            line.next();
        } else {
            break;
        }
    }
    terms.sort_by_key(|(_, p)| *p);
    if terms == vec![(CoeffLit::Int(0), 0)] {
        terms.clear();
    }
    Ok(ScalarLit { terms })
}

fn parse_power(line: &mut Line) -> Result<u32> {
    if line.peek() == Some(&Tok::Sym('^')) {
        line.next();
        Ok(line.uint()? as u32)
    } else {
        Ok(1)
    }
}

fn parse_matrix(line: &mut Line) -> Result<MatrixLit> {
    line.expect_sym('[')?;
    let mut rows = Vec::new();
    if line.peek() == Some(&Tok::Sym(']')) {
        line.next();
        return Ok(MatrixLit { rows });
    }
    loop {
        line.expect_sym('[')?;
        let mut row = Vec::new();
        if line.peek() != Some(&Tok::Sym(']')) {
            loop {
                row.push(parse_scalar(line)?);
                if line.peek() == Some(&Tok::Sym(',')) {
                    line.next();
                } else {
                    break;
                }
            }
        }
        line.expect_sym(']')?;
        rows.push(row);
        if line.peek() == Some(&Tok::Sym(',')) {
            line.next();
        } else {
            break;
        }
    }
    line.expect_sym(']')?;
    Ok(MatrixLit { rows })
}

fn parse_module_atom(line: &mut Line, defined: &Defined) -> Result<ModuleExpr> {
    match line.peek() {
        Some(Tok::Sym('(')) => {
            line.next();
            let m = parse_module_expr(line, defined)?;
            line.expect_sym(')')?;
            Ok(m)
        }
        Some(Tok::Ident(name)) if defined.modules.contains(name) => {
            let n = name.clone();
            line.next();
            Ok(ModuleExpr::Named(n))
        }
        _ => parse_module_expr(line, defined),
    }
}

fn parse_module_expr(line: &mut Line, defined: &Defined) -> Result<ModuleExpr> {
    let col = line.col();
    // named module or cyclic sugar RING/n
    if let Some(Tok::Ident(name)) = line.peek() {
        let name = name.clone();
        if defined.modules.contains(&name) {
            line.next();
            return Ok(ModuleExpr::Named(name));
        }
        if defined.rings.contains(&name) {
            line.next();
            line.expect_sym('/')?;
            let n = line.uint()?;
            return Ok(ModuleExpr::Cyclic(RingRef::Name(name), n));
        }
    }
    let head = line.ident().map_err(|_| err(line.line, col, "expected a module expression"))?;
    match head.as_str() {
        "free" => {
            line.expect_sym('(')?;
            let r = parse_ring_ref(line, defined)?;
            line.expect_sym(',')?;
            let n = line.uint()? as usize;
            line.expect_sym(')')?;
            Ok(ModuleExpr::Free(r, n))
        }
        "presentation" => {
            line.expect_sym('(')?;
            let r = parse_ring_ref(line, defined)?;
            line.expect_sym(';')?;
            let m = parse_matrix(line)?;
            line.expect_sym(')')?;
            Ok(ModuleExpr::Presentation(r, m))
        }
        "triple" => {
            line.expect_sym('(')?;
            let ring = parse_ring_ref(line, defined)?;
            line.expect_sym(';')?;
            let a = parse_slot(line)?;
            line.expect_sym(',')?;
            let b = parse_slot(line)?;
            line.expect_sym(',')?;
            line.expect_keyword("zero")?;
            line.expect_sym(')')?;
            Ok(ModuleExpr::Triple { ring, a, b })
        }
        "koszulmod" => {
            line.expect_sym('(')?;
            let ring = parse_ring_ref(line, defined)?;
            line.expect_sym(';')?;
            line.expect_keyword("subset")?;
            line.expect_sym('=')?;
            let mut subset = Vec::new();
            if let Some(Tok::Int(_)) = line.peek() {
                subset.push(line.uint()? as usize);
                while line.peek() == Some(&Tok::Sym(',')) {
                    line.next();
                    subset.push(line.uint()? as usize);
                }
            }
            for v in &mut subset {
                if *v == 0 {
                    return Err(err(line.line, col, "variables are numbered from 1"));
                }
                *v -= 1;
            }
            let shift = if line.peek() == Some(&Tok::Sym(';')) {
                line.next();
                line.expect_keyword("shift")?;
                line.expect_sym('=')?;
                line.uint()? as usize
            } else {
                0
            };
            line.expect_sym(')')?;
            Ok(ModuleExpr::KoszulMod { ring, subset, shift })
        }
        "simple" => {
            line.expect_sym('(')?;
            let r = parse_ring_ref(line, defined)?;
            line.expect_sym(',')?;
            let i = line.uint()? as usize;
            line.expect_sym(')')?;
            Ok(ModuleExpr::Simple(r, i))
        }
        "syzygy" => {
            line.expect_sym('(')?;
            let m = parse_module_expr(line, defined)?;
            line.expect_sym(',')?;
            let k = line.uint()? as usize;
            line.expect_sym(')')?;
            Ok(ModuleExpr::Syzygy(Box::new(m), k))
        }
        other => Err(err(line.line, col, format!("unknown module expression '{other}'"))),
    }
}

fn parse_slot(line: &mut Line) -> Result<TripleSlot> {
    let col = line.col();
    let s = line.ident()?;
    match s.as_str() {
        "zero" => Ok(TripleSlot::Zero),
        "simple" => Ok(TripleSlot::Simple),
        "regular" => Ok(TripleSlot::Regular),
        _ => Err(err(line.line, col, "expected 'zero', 'simple' or 'regular'")),
    }
}
