//! Script execution: definitions build an environment in order, queries run
//! against it (optionally in parallel) and produce a deterministic report
//! with certificate digests.

use super::*;
use crate::derived::{self, TorExtValue, WitnessFamily};
use crate::error::{Error, Result};
use crate::finitistic::{
    self, FpdCertificate, SplitOutcome, TheoremReport,
};
use crate::matrix::Mat;
use crate::module::{
    self, presentation, presentation_domain, KoszulModule, ModuleHandle, Morphism, Ses,
};
use crate::resolution::{projective_dimension, Certificate, DimResult};
use crate::ring::{field_as_algebra, make_fd_algebra, make_triangular, make_utn, RingHandle};
use crate::scalar::{Domain, Field, Scalar};
use num::{BigInt, BigRational};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub cap: usize,
    pub jobs: usize,
    pub seed: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { cap: crate::resolution::DEFAULT_CAP, jobs: 1, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct QueryRecord {
    pub line: usize,
    pub query: String,
    /// "ok" (value computed), "pass"/"fail" (theorem check), or "error"
    pub status: String,
    pub verdict: String,
    /// sha256 over the canonical certificate data, empty when none exists
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub ok: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub records: Vec<QueryRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("[{}] {} => {}", r.status, r.query, r.verdict));
            if !r.certificate.is_empty() {
                out.push_str(&format!("  (cert {})", &r.certificate[..12]));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "summary: {} statements, {} ok, {} passed, {} failed, {} errors\n",
            self.summary.total,
            self.summary.ok,
            self.summary.passed,
            self.summary.failed,
            self.summary.errors
        ));
        out
    }
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

struct Env {
    rings: BTreeMap<String, RingHandle>,
    modules: BTreeMap<String, ModuleHandle>,
    morphisms: BTreeMap<String, Morphism>,
    seses: BTreeMap<String, Ses>,
    families: BTreeMap<String, WitnessFamily>,
}

impl Env {
    fn new() -> Env {
        Env {
            rings: BTreeMap::new(),
            modules: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            seses: BTreeMap::new(),
            families: BTreeMap::new(),
        }
    }
}

fn field_of(lit: &FieldLit) -> Result<Field> {
    match lit {
        FieldLit::Q => Ok(Field::Rational),
        FieldLit::Fp(p) => {
            if !crate::scalar::is_prime(*p) {
                return Err(Error::NotPrime(*p));
            }
            Ok(Field::Prime(*p))
        }
    }
}

fn coeff_scalar(dom: Domain, c: &CoeffLit) -> Result<Scalar> {
    match (dom, c) {
        (_, CoeffLit::Int(n)) => Ok(dom.from_i64(*n)),
        (Domain::Field(Field::Rational), CoeffLit::Frac(n, d)) => {
            Ok(Scalar::Rat(BigRational::new(BigInt::from(*n), BigInt::from(*d))))
        }
        (Domain::Field(k), CoeffLit::Frac(n, d)) => {
            let dd = Domain::Field(k);
            Ok(dd.from_i64(*n).mul(&dd.from_i64(*d).inv()))
        }
        (_, CoeffLit::Frac(..)) => {
            Err(Error::Unsupported("fractions are only valid over a field".into()))
        }
    }
}

fn scalar_from_lit(dom: Domain, lit: &ScalarLit) -> Result<Scalar> {
    match dom {
        Domain::Poly(field) => {
            let cdom = Domain::Field(field);
            let deg = lit.terms.iter().map(|(_, p)| *p).max().unwrap_or(0) as usize;
            let mut coeffs = vec![field.zero(); deg + 1];
            for (c, p) in &lit.terms {
                let v = coeff_scalar(cdom, c)?;
                coeffs[*p as usize] = coeffs[*p as usize].add(&v);
            }
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
            Ok(Scalar::Poly { field, coeffs })
        }
        _ => {
            let mut acc = dom.zero();
            for (c, p) in &lit.terms {
                if *p > 0 {
                    return Err(Error::Unsupported(
                        "the generator x only exists over polynomial backends".into(),
                    ));
                }
                acc = acc.add(&coeff_scalar(dom, c)?);
            }
            Ok(acc)
        }
    }
}

fn mat_from_lit(dom: Domain, lit: &MatrixLit) -> Result<Mat> {
    let rows = lit.rows.len();
    let cols = lit.rows.first().map(|r| r.len()).unwrap_or(0);
    for r in &lit.rows {
        if r.len() != cols {
            return Err(Error::ShapeMismatch("ragged matrix literal".into()));
        }
    }
    let mut m = Mat::zero(dom, rows, cols);
    for (i, row) in lit.rows.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            m.set(i, j, scalar_from_lit(dom, s)?);
        }
    }
    Ok(m)
}

fn resolve_ring(env: &Env, r: &RingRef) -> Result<RingHandle> {
    match r {
        RingRef::Name(n) => env
            .rings
            .get(n)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("undefined ring '{n}'"))),
        RingRef::Inline(e) => build_ring(env, "inline", e),
    }
}

fn ring_as_algebra(ring: &RingHandle) -> Result<Arc<crate::ring::FdAlgebra>> {
    match ring {
        RingHandle::Field(k) => Ok(field_as_algebra(*k)),
        other => other
            .as_algebra()
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("{other} is not an algebra backend"))),
    }
}

fn build_ring(env: &Env, name: &str, expr: &RingExpr) -> Result<RingHandle> {
    match expr {
        RingExpr::Integers => Ok(RingHandle::Integers),
        RingExpr::Field(k) => Ok(RingHandle::Field(field_of(k)?)),
        RingExpr::Local(p) => RingHandle::local_integers(*p),
        RingExpr::PolyPid(k) => Ok(RingHandle::PolyPid(field_of(k)?)),
        RingExpr::Koszul(k, m) => RingHandle::koszul(field_of(k)?, *m),
        RingExpr::ZMod(n) => {
            if *n < 2 {
                return Err(Error::Precondition("modulus must be at least 2".into()));
            }
            Ok(RingHandle::QuotientZ(*n))
        }
        RingExpr::Utn(k, n) => Ok(RingHandle::Triangular(make_utn(field_of(k)?, *n)?)),
        RingExpr::FdAlgebra { field, basis, products } => {
            let field = field_of(field)?;
            let dom = Domain::Field(field);
            let d = basis.len();
            let unit_idx = basis
                .iter()
                .position(|l| l == "1")
                .ok_or_else(|| Error::Precondition("basis must contain the unit label 1".into()))?;
            let index =
                |l: &str| basis.iter().position(|b| b == l);
            let elem_coords = |e: &ElemLit| -> Result<Vec<Scalar>> {
                let mut v = vec![field.zero(); d];
                for (c, label) in &e.terms {
                    let i = match label {
                        Some(l) => index(l).ok_or_else(|| {
                            Error::Precondition(format!("unknown basis label '{l}'"))
                        })?,
                        None => unit_idx,
                    };
                    v[i] = v[i].add(&coeff_scalar(dom, c)?);
                }
                Ok(v)
            };
            let mut table: Vec<Vec<Option<Vec<Scalar>>>> = vec![vec![None; d]; d];
            for (a, b, e) in products {
                let i = index(a)
                    .ok_or_else(|| Error::Precondition(format!("unknown basis label '{a}'")))?;
                let j = index(b)
                    .ok_or_else(|| Error::Precondition(format!("unknown basis label '{b}'")))?;
                table[i][j] = Some(elem_coords(e)?);
            }
            let mut constants = vec![vec![vec![field.zero(); d]; d]; d];
            for i in 0..d {
                for j in 0..d {
                    let prod: Vec<Scalar> = if i == unit_idx {
                        (0..d).map(|k| if k == j { field.one() } else { field.zero() }).collect()
                    } else if j == unit_idx {
                        (0..d).map(|k| if k == i { field.one() } else { field.zero() }).collect()
                    } else {
                        table[i][j].clone().ok_or_else(|| {
                            Error::Precondition(format!(
                                "product {}*{} not specified",
                                basis[i], basis[j]
                            ))
                        })?
                    };
                    constants[i][j] = prod;
                }
            }
            let mut unit = vec![field.zero(); d];
            unit[unit_idx] = field.one();
            let alg = make_fd_algebra(name, field, basis.clone(), &constants, unit)?;
            Ok(RingHandle::FdAlgebra(alg))
        }
        RingExpr::Triangular { left, right, bimodule } => {
            let left_ring = resolve_ring(env, left)?;
            let right_ring = resolve_ring(env, right)?;
            let left_alg = ring_as_algebra(&left_ring)?;
            let right_alg = ring_as_algebra(&right_ring)?;
            if right_alg.dim != 1 {
                return Err(Error::Unsupported(
                    "the scripted triangular constructor needs a one-dimensional right corner"
                        .into(),
                ));
            }
            let BimodExpr::Regular(b) = bimodule;
            let bim_ring = resolve_ring(env, b)?;
            if ring_as_algebra(&bim_ring)?.label != left_alg.label {
                return Err(Error::Unsupported(
                    "the regular bimodule must be over the left corner".into(),
                ));
            }
            let bim = crate::ring::BimoduleData::regular_over_field(&left_alg);
            Ok(RingHandle::Triangular(make_triangular(name, left_alg, right_alg, bim)?))
        }
    }
}

fn build_module(env: &Env, expr: &ModuleExpr) -> Result<ModuleHandle> {
    match expr {
        ModuleExpr::Named(n) => env
            .modules
            .get(n)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("undefined module '{n}'"))),
        ModuleExpr::Free(r, n) => ModuleHandle::free(&resolve_ring(env, r)?, *n),
        ModuleExpr::Presentation(r, m) => {
            let ring = resolve_ring(env, r)?;
            let dom = presentation_domain(&ring)?;
            let rels = mat_from_lit(dom, m)?;
            presentation(&ring, rels.rows(), rels)
        }
        ModuleExpr::Cyclic(r, n) => {
            let ring = resolve_ring(env, r)?;
            let dom = presentation_domain(&ring)?;
            let rels = Mat::from_i64(dom, &[&[*n as i64]]);
            presentation(&ring, 1, rels)
        }
        ModuleExpr::Triple { ring, a, b } => {
            let ring = resolve_ring(env, ring)?;
            let RingHandle::Triangular(t) = &ring else {
                return Err(Error::Precondition("triple needs a triangular ring".into()));
            };
            match (a, b) {
                (TripleSlot::Zero, TripleSlot::Simple) | (TripleSlot::Zero, TripleSlot::Regular) => {
                    if matches!(b, TripleSlot::Simple) && t.right.dim != 1 {
                        return Err(Error::Unsupported(
                            "the simple slot needs a one-dimensional right corner".into(),
                        ));
                    }
                    finitistic::right_corner_simple(t)
                }
                (TripleSlot::Regular, TripleSlot::Zero) => {
                    let left_ring = RingHandle::FdAlgebra(t.left.clone());
                    let reg = module::regular_rep(&left_ring)?;
                    module::induce_left(t, &reg)
                }
                _ => Err(Error::Unsupported(
                    "supported triples: (zero, simple, zero), (zero, regular, zero), (regular, zero, zero)"
                        .into(),
                )),
            }
        }
        ModuleExpr::KoszulMod { ring, subset, shift } => {
            let ring = resolve_ring(env, ring)?;
            let RingHandle::KoszulPoly { field, vars } = ring else {
                return Err(Error::Precondition("koszulmod needs a Koszul backend".into()));
            };
            if subset.iter().any(|v| *v >= vars) {
                return Err(Error::Precondition("subset variable out of range".into()));
            }
            let mut subset = subset.clone();
            subset.sort_unstable();
            subset.dedup();
            Ok(ModuleHandle::Koszul(KoszulModule { field, vars, subset, shift: *shift }))
        }
        ModuleExpr::Simple(r, i) => {
            let ring = resolve_ring(env, r)?;
            let simples = derived::simple_modules(&ring)?;
            simples.into_iter().nth(*i).ok_or_else(|| {
                Error::Precondition(format!("simple index {i} out of range"))
            })
        }
        ModuleExpr::Syzygy(m, k) => {
            let inner = build_module(env, m)?;
            crate::resolution::syzygy(&inner, *k)
        }
    }
}

fn check_over(env: &Env, m: &ModuleHandle, over: &Option<RingRef>) -> Result<()> {
    if let Some(r) = over {
        let ring = resolve_ring(env, r)?;
        if m.ring() != ring {
            return Err(Error::RingMismatch(format!(
                "module lives over {}, not {}",
                m.ring(),
                ring
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical certificate serialization and digests
// ---------------------------------------------------------------------------

fn mat_canon(m: &Mat) -> String {
    let mut s = format!("{}x{}:", m.rows(), m.cols());
    for i in 0..m.rows() {
        if i > 0 {
            s.push('|');
        }
        for j in 0..m.cols() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&m.get(i, j).to_string());
        }
    }
    s
}

fn module_canon(m: &ModuleHandle) -> String {
    match m {
        ModuleHandle::Presentation { ring, gens, rels } => {
            format!("pres({ring};{gens};{})", mat_canon(rels))
        }
        ModuleHandle::FdRep(r) => {
            let mut s = format!("rep({};{};", r.ring, r.dim);
            for a in &r.action {
                s.push_str(&mat_canon(a));
                s.push(';');
            }
            s.push(')');
            s
        }
        ModuleHandle::Koszul(k) => {
            format!("koszul({};{};{:?};{})", k.field, k.vars, k.subset, k.shift)
        }
    }
}

fn dim_result_canon(d: &DimResult) -> String {
    match d {
        DimResult::Finite { n, certificate } => {
            format!("finite;{n};{}", certificate_canon(certificate))
        }
        other => other.describe(),
    }
}

fn certificate_canon(c: &Certificate) -> String {
    match c {
        Certificate::Chain(res) => {
            let mut s = format!("chain;target={};", module_canon(&res.target));
            for t in &res.terms {
                s.push_str(&format!("term={};", module_canon(t)));
            }
            s.push_str(&format!("aug={};", mat_canon(&res.augmentation.map)));
            for d in &res.differentials {
                s.push_str(&format!("d={};", mat_canon(&d.map)));
            }
            s
        }
        Certificate::Koszul(k) => {
            format!("koszul;ranks={:?};diffs={:?}", k.ranks, k.diffs)
        }
    }
}

fn digest(data: &str) -> String {
    let mut h = Sha256::new();
    h.update(data.as_bytes());
    format!("{:x}", h.finalize())
}

fn format_value(ring: &RingHandle, v: &TorExtValue) -> String {
    match v {
        TorExtValue::Dimension(d) => {
            if *d == 0 {
                "0".into()
            } else {
                format!("k^{d}")
            }
        }
        TorExtValue::Invariants { free_rank, torsion } => {
            let mut parts = Vec::new();
            if *free_rank > 0 {
                parts.push(format!("{ring}^{free_rank}"));
            }
            for t in torsion {
                parts.push(format!("{ring}/({t})"));
            }
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" (+) ")
            }
        }
    }
}

fn fpd_canon(c: &FpdCertificate) -> String {
    let mut s = format!("fpd;{};{};", c.ring, c.describe());
    if let Some(rule) = &c.rule {
        s.push_str(&rule.describe());
        s.push(';');
    }
    if let Some((w, pd)) = &c.lower_witness {
        s.push_str(&format!("witness={};{}", module_canon(w), dim_result_canon(pd)));
    }
    s
}

fn theorem_canon(r: &TheoremReport) -> String {
    format!("{};{};{};{}", r.theorem, r.instance, r.pass, r.details.join(";"))
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct Outcome {
    status: &'static str,
    verdict: String,
    certificate: String,
}

fn run_query(env: &Env, q: &Query, opts: &RunOptions) -> Result<Outcome> {
    match q {
        Query::Pd { module, over } => {
            let m = build_module(env, module)?;
            check_over(env, &m, over)?;
            let pd = projective_dimension(&m, opts.cap)?;
            Ok(Outcome {
                status: "ok",
                verdict: pd.describe(),
                certificate: digest(&dim_result_canon(&pd)),
            })
        }
        Query::Resolve { module, over } => {
            let m = build_module(env, module)?;
            check_over(env, &m, over)?;
            let pd = projective_dimension(&m, opts.cap)?;
            let verdict = match &pd {
                DimResult::Finite { certificate, .. } => match certificate {
                    Certificate::Chain(res) => {
                        let dims: Vec<String> = res
                            .terms
                            .iter()
                            .map(|t| match t {
                                ModuleHandle::FdRep(r) => r.dim.to_string(),
                                ModuleHandle::Presentation { gens, .. } => gens.to_string(),
                                ModuleHandle::Koszul(_) => "?".into(),
                            })
                            .collect();
                        format!("projective terms of sizes [{}]", dims.join(", "))
                    }
                    Certificate::Koszul(k) => format!("Koszul ranks {:?}", k.ranks),
                },
                other => other.describe(),
            };
            Ok(Outcome { status: "ok", verdict, certificate: digest(&dim_result_canon(&pd)) })
        }
        Query::Tor { degree, left, right, over } => {
            let a = build_module(env, left)?;
            let b = build_module(env, right)?;
            check_over(env, &a, over)?;
            check_over(env, &b, over)?;
            let v = derived::tor(*degree, &a, &b)?;
            Ok(Outcome {
                status: "ok",
                verdict: format_value(&a.ring(), &v),
                certificate: digest(&v.describe()),
            })
        }
        Query::Ext { degree, left, right, over } => {
            let a = build_module(env, left)?;
            let b = build_module(env, right)?;
            check_over(env, &a, over)?;
            check_over(env, &b, over)?;
            let v = derived::ext(*degree, &a, &b)?;
            Ok(Outcome {
                status: "ok",
                verdict: format_value(&a.ring(), &v),
                certificate: digest(&v.describe()),
            })
        }
        Query::Ftfd { module, family, over } => {
            let m = build_module(env, module)?;
            check_over(env, &m, over)?;
            let fam = env
                .families
                .get(family)
                .ok_or_else(|| Error::Precondition(format!("undefined family '{family}'")))?;
            let d = derived::ft_flat_dim(&m, fam)?;
            Ok(Outcome {
                status: "ok",
                verdict: format!("{d} (family-relative)"),
                certificate: digest(&format!("ftfd;{d};{}", module_canon(&m))),
            })
        }
        Query::Fpd(r) => {
            let ring = resolve_ring(env, r)?;
            let c = finitistic::fpd_bounds(&ring, opts.cap)?;
            let rule = c.rule.as_ref().map(|r| r.describe()).unwrap_or_else(|| "none".into());
            Ok(Outcome {
                status: "ok",
                verdict: format!("fPD in {} (upper rule: {rule})", c.describe()),
                certificate: digest(&fpd_canon(&c)),
            })
        }
        Query::NonSplit(name) => {
            let ses = env
                .seses
                .get(name)
                .ok_or_else(|| Error::Precondition(format!("undefined ses '{name}'")))?;
            match finitistic::non_split_certificate(ses)? {
                SplitOutcome::Split { section } => Ok(Outcome {
                    status: "ok",
                    verdict: "split (section found)".into(),
                    certificate: digest(&format!("split;{}", mat_canon(&section))),
                }),
                SplitOutcome::NonSplit { system_rank, augmented_rank } => Ok(Outcome {
                    status: "ok",
                    verdict: format!(
                        "nonsplit (section system rank {system_rank} < augmented {augmented_rank})"
                    ),
                    certificate: digest(&format!("nonsplit;{system_rank};{augmented_rank}")),
                }),
            }
        }
        Query::CheckQuotient { ring, a } => {
            let ring = resolve_ring(env, ring)?;
            let dom = presentation_domain(&ring)?;
            let a = scalar_from_lit(dom, a)?;
            theorem_outcome(finitistic::quotient_theorem_check(&ring, &a)?)
        }
        Query::CheckPolynomial { field, m } => {
            theorem_outcome(finitistic::polynomial_theorem_check(field_of(field)?, *m)?)
        }
        Query::CheckTriangular(r) => {
            let ring = resolve_ring(env, r)?;
            let RingHandle::Triangular(t) = &ring else {
                return Err(Error::Precondition("check triangular needs a triangular ring".into()));
            };
            theorem_outcome(finitistic::triangular_bounds_check(t)?)
        }
        Query::CheckLocalization { ring, primes } => {
            let ring = resolve_ring(env, ring)?;
            theorem_outcome(finitistic::localization_inequality_check(&ring, primes)?)
        }
    }
}

fn theorem_outcome(report: TheoremReport) -> Result<Outcome> {
    Ok(Outcome {
        status: if report.pass { "pass" } else { "fail" },
        verdict: report.statement.clone(),
        certificate: digest(&theorem_canon(&report)),
    })
}

fn apply_definition(env: &mut Env, kind: &StatementKind) -> Result<()> {
    match kind {
        StatementKind::RingDef { name, expr } => {
            let r = build_ring(env, name, expr)?;
            env.rings.insert(name.clone(), r);
        }
        StatementKind::ModuleDef { name, expr } => {
            let m = build_module(env, expr)?;
            env.modules.insert(name.clone(), m);
        }
        StatementKind::MorphismDef { name, source, target, entries } => {
            let src = env
                .modules
                .get(source)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("undefined module '{source}'")))?;
            let dst = env
                .modules
                .get(target)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("undefined module '{target}'")))?;
            let dom = match &src {
                ModuleHandle::Presentation { ring, .. } => presentation_domain(ring)?,
                ModuleHandle::FdRep(r) => Domain::Field(r.algebra().field),
                ModuleHandle::Koszul(_) => {
                    return Err(Error::Unsupported("morphisms of Koszul modules".into()))
                }
            };
            let map = mat_from_lit(dom, entries)?;
            let f = module::morphism(&src, &dst, map)?;
            env.morphisms.insert(name.clone(), f);
        }
        StatementKind::SesDef { name, inj, surj } => {
            let i = env
                .morphisms
                .get(inj)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("undefined morphism '{inj}'")))?;
            let s = env
                .morphisms
                .get(surj)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("undefined morphism '{surj}'")))?;
            let ses = module::make_ses(i, s)?;
            env.seses.insert(name.clone(), ses);
        }
        StatementKind::FamilyDef { name, ring, members } => {
            let r = resolve_ring(env, ring)?;
            let fam = match members {
                None => derived::default_witness_family(&r)?,
                Some(ms) => {
                    let built: Vec<ModuleHandle> =
                        ms.iter().map(|m| build_module(env, m)).collect::<Result<_>>()?;
                    derived::witness_family(&r, built)?
                }
            };
            env.families.insert(name.clone(), fam);
        }
        StatementKind::Query(_) => unreachable!("queries are not definitions"),
    }
    Ok(())
}

/// Execute a parsed script. Definitions run in order; queries run after all
/// definitions are in place (in parallel when `jobs > 1`) and are reported
/// in script order.
pub fn run_script(script: &Script, opts: &RunOptions) -> Report {
    let mut env = Env::new();
    let mut records: Vec<QueryRecord> = Vec::new();
    let mut queries: Vec<(usize, usize, Query)> = Vec::new(); // (record slot, line, query)
    let mut definition_failed: Option<String> = None;
    for st in &script.statements {
        match &st.kind {
            StatementKind::Query(q) => {
                let slot = records.len();
                records.push(QueryRecord {
                    line: st.line,
                    query: st.kind.to_string(),
                    status: "error".into(),
                    verdict: String::new(),
                    certificate: String::new(),
                });
                queries.push((slot, st.line, q.clone()));
            }
            def => {
                if definition_failed.is_none() {
                    if let Err(e) = apply_definition(&mut env, def) {
                        definition_failed = Some(format!("line {}: {e}", st.line));
                        records.push(QueryRecord {
                            line: st.line,
                            query: st.kind.to_string(),
                            status: "error".into(),
                            verdict: e.to_string(),
                            certificate: String::new(),
                        });
                    }
                }
            }
        }
    }
    if let Some(reason) = &definition_failed {
        for (slot, _, _) in &queries {
            records[*slot].verdict = format!("skipped: definition failed ({reason})");
        }
    } else {
        let outcomes: Vec<(usize, Result<Outcome>)> = if opts.jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .expect("thread pool");
            pool.install(|| {
                use rayon::prelude::*;
                queries
                    .par_iter()
                    .map(|(slot, _, q)| (*slot, run_query(&env, q, opts)))
                    .collect()
            })
        } else {
            queries.iter().map(|(slot, _, q)| (*slot, run_query(&env, q, opts))).collect()
        };
        for (slot, out) in outcomes {
            match out {
                Ok(o) => {
                    records[slot].status = o.status.into();
                    records[slot].verdict = o.verdict;
                    records[slot].certificate = o.certificate;
                }
                Err(e) => {
                    records[slot].status = "error".into();
                    records[slot].verdict = e.to_string();
                }
            }
        }
    }
    let summary = Summary {
        total: records.len(),
        ok: records.iter().filter(|r| r.status == "ok").count(),
        passed: records.iter().filter(|r| r.status == "pass").count(),
        failed: records.iter().filter(|r| r.status == "fail").count(),
        errors: records.iter().filter(|r| r.status == "error").count(),
    };
    Report { records, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_script;

    fn run_text(text: &str) -> Report {
        let script = parse_script(text).unwrap();
        run_script(&script, &RunOptions::default())
    }

    #[test]
    fn worked_example_script() {
        let text = "\
ring R0 = fdalgebra(Q){basis 1,e; e*e=0}
ring T = triangular(R0, field(Q), regular(R0))
module L = triple(T; zero, simple, zero)
pd L
";
        let report = run_text(text);
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].status, "ok");
        assert_eq!(report.records[0].verdict, "finite(1)");
    }

    #[test]
    fn tor_query_with_cyclic_sugar() {
        let text = "\
ring Z = integers
tor 1 (Z/4) (Z/6) over Z
";
        let report = run_text(text);
        assert_eq!(report.records[0].verdict, "Z/(2)");
    }

    #[test]
    fn check_queries_pass() {
        let text = "\
ring Z = integers
check quotient R=Z a=4
check polynomial field=Q m=2
check localization Z primes=2,3,5
";
        let report = run_text(text);
        for r in &report.records {
            assert_eq!(r.status, "pass", "{}: {}", r.query, r.verdict);
        }
        assert!(report.all_pass());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_script("pd L").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_script("ring Z = integers\nring Z = integers").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "\
ring Z = integers
ring K = polypid(Q)
module M = presentation(Z; [[4],[0]])
module N = free(K, 2)
pd M
tor 0 M M over Z
fpd K
check triangular utn(F2, 2)
";
        let s1 = parse_script(text).unwrap();
        let printed = s1.to_string();
        let s2 = parse_script(&printed).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn reports_are_deterministic_across_jobs() {
        let text = "\
ring Z = integers
ring R0 = fdalgebra(Q){basis 1,e; e*e=0}
pd (Z/4)
pd (free(R0, 2))
tor 1 (Z/4) (Z/6) over Z
ext 1 (Z/2) (free(Z, 1))
fpd Z
fpd R0
";
        let script = parse_script(text).unwrap();
        let r1 = run_script(&script, &RunOptions { jobs: 1, ..Default::default() });
        let r4 = run_script(&script, &RunOptions { jobs: 4, ..Default::default() });
        assert_eq!(r1.to_json(), r4.to_json());
        assert_eq!(r1.to_text(), r4.to_text());
    }

    #[test]
    fn nonsplit_query_over_script_ses() {
        // 0 -> Z/2 -> Z/4 -> Z/2 -> 0 via the F2-form algebra backend:
        // use the dual numbers over F2 and its unique simple
        let text = "\
ring R = fdalgebra(F2){basis 1,e; e*e=0}
module P = free(R, 1)
module S = simple(R, 0)
module S2 = simple(R, 0)
morphism i = map(S, P; [[0],[1]])
morphism p = map(P, S2; [[1,0]])
ses E = ses(i, p)
nonsplit E
";
        let report = run_text(text);
        let r = &report.records[0];
        assert_eq!(r.status, "ok", "{}", r.verdict);
        assert!(r.verdict.starts_with("nonsplit"), "{}", r.verdict);
    }
}
