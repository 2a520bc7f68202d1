//! A line-oriented definition-and-query language: scripts define rings,
//! modules, morphisms, short exact sequences, and witness families, then ask
//! queries (pd, tor, ext, ftfd, fpd, resolve, nonsplit, check <theorem>).
//! Parsing attaches line/column spans; printing a parsed script re-parses to
//! the same AST.

mod parse;
mod run;

pub use parse::parse_script;
pub use run::{run_script, QueryRecord, Report, RunOptions, Summary};

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct Script {
    pub statements: Vec<Statement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    RingDef { name: String, expr: RingExpr },
    ModuleDef { name: String, expr: ModuleExpr },
    MorphismDef { name: String, source: String, target: String, entries: MatrixLit },
    SesDef { name: String, inj: String, surj: String },
    FamilyDef { name: String, ring: RingRef, members: Option<Vec<ModuleExpr>> },
    Query(Query),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldLit {
    Q,
    Fp(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RingRef {
    Name(String),
    Inline(Box<RingExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RingExpr {
    Integers,
    Field(FieldLit),
    Local(u64),
    PolyPid(FieldLit),
    Koszul(FieldLit, usize),
    ZMod(u64),
    Utn(FieldLit, usize),
    FdAlgebra {
        field: FieldLit,
        basis: Vec<String>,
        /// specified products of non-unit basis labels
        products: Vec<(String, String, ElemLit)>,
    },
    Triangular { left: RingRef, right: RingRef, bimodule: BimodExpr },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BimodExpr {
    /// the left corner acting on itself, with the right corner (a field)
    /// acting by scalars
    Regular(RingRef),
}

/// A linear combination of basis labels; a missing label means the unit.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemLit {
    pub terms: Vec<(CoeffLit, Option<String>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoeffLit {
    Int(i64),
    Frac(i64, i64),
}

/// A scalar entry: a polynomial in the implicit generator x with rational
/// coefficients (constant for the non-polynomial domains).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarLit {
    /// (coefficient, power of x), sorted by power
    pub terms: Vec<(CoeffLit, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLit {
    pub rows: Vec<Vec<ScalarLit>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TripleSlot {
    Zero,
    Simple,
    Regular,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleExpr {
    Named(String),
    Free(RingRef, usize),
    Presentation(RingRef, MatrixLit),
    /// `R/n`: the cyclic module with the single relation n
    Cyclic(RingRef, u64),
    Triple { ring: RingRef, a: TripleSlot, b: TripleSlot },
    KoszulMod { ring: RingRef, subset: Vec<usize>, shift: usize },
    Simple(RingRef, usize),
    Syzygy(Box<ModuleExpr>, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Pd { module: ModuleExpr, over: Option<RingRef> },
    Resolve { module: ModuleExpr, over: Option<RingRef> },
    Tor { degree: usize, left: ModuleExpr, right: ModuleExpr, over: Option<RingRef> },
    Ext { degree: usize, left: ModuleExpr, right: ModuleExpr, over: Option<RingRef> },
    Ftfd { module: ModuleExpr, family: String, over: Option<RingRef> },
    Fpd(RingRef),
    NonSplit(String),
    CheckQuotient { ring: RingRef, a: ScalarLit },
    CheckPolynomial { field: FieldLit, m: usize },
    CheckTriangular(RingRef),
    CheckLocalization { ring: RingRef, primes: Vec<u64> },
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.kind)?;
        }
        Ok(())
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::RingDef { name, expr } => write!(f, "ring {name} = {expr}"),
            StatementKind::ModuleDef { name, expr } => write!(f, "module {name} = {expr}"),
            StatementKind::MorphismDef { name, source, target, entries } => {
                write!(f, "morphism {name} = map({source}, {target}; {entries})")
            }
            StatementKind::SesDef { name, inj, surj } => {
                write!(f, "ses {name} = ses({inj}, {surj})")
            }
            StatementKind::FamilyDef { name, ring, members } => match members {
                Some(ms) => {
                    write!(f, "family {name} = family({ring}; ")?;
                    for (i, m) in ms.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{m}")?;
                    }
                    write!(f, ")")
                }
                None => write!(f, "family {name} = default({ring})"),
            },
            StatementKind::Query(q) => write!(f, "{q}"),
        }
    }
}

impl fmt::Display for FieldLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldLit::Q => write!(f, "Q"),
            FieldLit::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl fmt::Display for RingRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingRef::Name(n) => write!(f, "{n}"),
            RingRef::Inline(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for RingExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingExpr::Integers => write!(f, "integers"),
            RingExpr::Field(k) => write!(f, "field({k})"),
            RingExpr::Local(p) => write!(f, "local({p})"),
            RingExpr::PolyPid(k) => write!(f, "polypid({k})"),
            RingExpr::Koszul(k, m) => write!(f, "koszul({k}, {m})"),
            RingExpr::ZMod(n) => write!(f, "zmod({n})"),
            RingExpr::Utn(k, n) => write!(f, "utn({k}, {n})"),
            RingExpr::FdAlgebra { field, basis, products } => {
                write!(f, "fdalgebra({field}){{basis {}", basis.join(","))?;
                for (a, b, e) in products {
                    write!(f, "; {a}*{b}={e}")?;
                }
                write!(f, "}}")
            }
            RingExpr::Triangular { left, right, bimodule } => {
                write!(f, "triangular({left}, {right}, {bimodule})")
            }
        }
    }
}

impl fmt::Display for BimodExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BimodExpr::Regular(r) => write!(f, "regular({r})"),
        }
    }
}

impl fmt::Display for CoeffLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffLit::Int(n) => write!(f, "{n}"),
            CoeffLit::Frac(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl fmt::Display for ElemLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, label)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match label {
                Some(l) => write!(f, "{c}*{l}")?,
                None => write!(f, "{c}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for ScalarLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, pow)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match pow {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                p => write!(f, "{c}*x^{p}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for MatrixLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, s) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for TripleSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleSlot::Zero => write!(f, "zero"),
            TripleSlot::Simple => write!(f, "simple"),
            TripleSlot::Regular => write!(f, "regular"),
        }
    }
}

impl fmt::Display for ModuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleExpr::Named(n) => write!(f, "{n}"),
            ModuleExpr::Free(r, n) => write!(f, "free({r}, {n})"),
            ModuleExpr::Presentation(r, m) => write!(f, "presentation({r}; {m})"),
            ModuleExpr::Cyclic(r, n) => write!(f, "{r}/{n}"),
            ModuleExpr::Triple { ring, a, b } => {
                write!(f, "triple({ring}; {a}, {b}, zero)")
            }
            ModuleExpr::KoszulMod { ring, subset, shift } => {
                let vars: Vec<String> = subset.iter().map(|v| format!("{}", v + 1)).collect();
                write!(f, "koszulmod({ring}; subset={}; shift={shift})", vars.join(","))
            }
            ModuleExpr::Simple(r, i) => write!(f, "simple({r}, {i})"),
            ModuleExpr::Syzygy(m, k) => write!(f, "syzygy({m}, {k})"),
        }
    }
}

fn write_over(f: &mut fmt::Formatter<'_>, over: &Option<RingRef>) -> fmt::Result {
    if let Some(r) = over {
        write!(f, " over {r}")?;
    }
    Ok(())
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Pd { module, over } => {
                write!(f, "pd {}", Atom(module))?;
                write_over(f, over)
            }
            Query::Resolve { module, over } => {
                write!(f, "resolve {}", Atom(module))?;
                write_over(f, over)
            }
            Query::Tor { degree, left, right, over } => {
                write!(f, "tor {degree} {} {}", Atom(left), Atom(right))?;
                write_over(f, over)
            }
            Query::Ext { degree, left, right, over } => {
                write!(f, "ext {degree} {} {}", Atom(left), Atom(right))?;
                write_over(f, over)
            }
            Query::Ftfd { module, family, over } => {
                write!(f, "ftfd {} {family}", Atom(module))?;
                write_over(f, over)
            }
            Query::Fpd(r) => write!(f, "fpd {r}"),
            Query::NonSplit(s) => write!(f, "nonsplit {s}"),
            Query::CheckQuotient { ring, a } => write!(f, "check quotient R={ring} a={a}"),
            Query::CheckPolynomial { field, m } => {
                write!(f, "check polynomial field={field} m={m}")
            }
            Query::CheckTriangular(r) => write!(f, "check triangular {r}"),
            Query::CheckLocalization { ring, primes } => {
                let ps: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
                write!(f, "check localization {ring} primes={}", ps.join(","))
            }
        }
    }
}

/// Wrap non-name module expressions in parentheses where the grammar
/// expects an atom.
struct Atom<'a>(&'a ModuleExpr);

impl fmt::Display for Atom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ModuleExpr::Named(n) => write!(f, "{n}"),
            other => write!(f, "({other})"),
        }
    }
}
