//! The built-in acceptance suite: ten self-contained checks covering the
//! worked examples, the change-of-rings theorems, the randomized property
//! corpora, and the script-language golden fixtures. `findim check-all` and
//! the acceptance integration test both run these.

use crate::derived::{
    check_tor_localization, default_witness_family, ft_flat_dim, simple_modules, tor,
    witness_shift,
};
use crate::dsl::{self, RunOptions};
use crate::error::Result;
use crate::finitistic::{
    dual_triangular_example, fpd_bounds, localization_inequality_check, non_split_certificate,
    polynomial_theorem_check, quotient_theorem_check, right_corner_simple,
    triangular_bounds_check, SplitOutcome,
};
use crate::matrix::Mat;
use crate::module::{
    direct_sum, presentation, random_presentation, random_rep_ses, random_ses, ModuleHandle, Ses,
};
use crate::resolution::{
    cover_sequence, fpr_membership, horseshoe, projective_dimension, verify_resolution,
    Certificate, DimResult, FprVerdict, Resolution, DEFAULT_CAP,
};
use crate::ring::{
    dual_numbers, field_as_algebra, make_fd_algebra, make_triangular, make_utn, BimoduleData,
    FdAlgebra, RingHandle,
};
use crate::scalar::{Domain, Field, Scalar};
use crate::snf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
}

pub fn run_all() -> Vec<CriterionResult> {
    let criteria: [(&'static str, fn() -> Result<(bool, String)>); 10] = [
        ("worked example end to end", c01_worked_example),
        ("self-injective local base ring", c02_dual_numbers),
        ("polynomial ring dimension shifts", c03_polynomial),
        ("quotient ring dimension shift", c04_quotient),
        ("triangular sandwich bounds", c05_triangular),
        ("finite-resolution closure under extensions", c06_fpr_closure),
        ("family-relative flat dimension laws", c07_family_dims),
        ("witness shifting", c08_witness_shift),
        ("Tor commutes with localization", c09_localization),
        ("script corpus determinism", c10_golden_corpus),
    ];
    criteria
        .iter()
        .enumerate()
        .map(|(i, (name, f))| match f() {
            Ok((pass, details)) => CriterionResult { index: i + 1, name, pass, details },
            Err(e) => CriterionResult {
                index: i + 1,
                name,
                pass: false,
                details: format!("engine error: {e}"),
            },
        })
        .collect()
}

fn fail(msg: impl Into<String>) -> Result<(bool, String)> {
    Ok((false, msg.into()))
}

// ---------------------------------------------------------------------------
// 1. the triangular ring over the dual numbers, end to end
// ---------------------------------------------------------------------------

fn c01_worked_example() -> Result<(bool, String)> {
    let t = dual_triangular_example(Field::Rational)?;
    let l = right_corner_simple(&t)?;
    let pd = projective_dimension(&l, DEFAULT_CAP)?;
    let DimResult::Finite { n: 1, certificate: Certificate::Chain(res) } = &pd else {
        return fail(format!("pd of the corner simple is {}, expected finite(1)", pd.describe()));
    };
    if res.length() != 1 {
        return fail(format!("resolution length {} instead of 1", res.length()));
    }
    verify_resolution(res)?;
    let ses = cover_sequence(&l)?;
    let SplitOutcome::NonSplit { .. } = non_split_certificate(&ses)? else {
        return fail("the cover sequence of the corner simple split");
    };
    let cert = fpd_bounds(&RingHandle::Triangular(t), DEFAULT_CAP)?;
    if !cert.exact() || cert.lower != 1 {
        return fail(format!("finitistic bounds {} instead of [1, 1]", cert.describe()));
    }
    Ok((true, "pd(L) = 1, cover sequence nonsplit, fPD(T) = [1, 1]".into()))
}

// ---------------------------------------------------------------------------
// 2. dual numbers: fPD = 0 and an infinite-pd certificate for the simple
// ---------------------------------------------------------------------------

fn c02_dual_numbers() -> Result<(bool, String)> {
    let ring = RingHandle::FdAlgebra(dual_numbers(Field::Rational));
    let cert = fpd_bounds(&ring, DEFAULT_CAP)?;
    if !cert.exact() || cert.lower != 0 {
        return fail(format!("finitistic bounds {} instead of [0, 0]", cert.describe()));
    }
    let simple = simple_modules(&ring)?.remove(0);
    let pd = projective_dimension(&simple, DEFAULT_CAP)?;
    let DimResult::InfiniteCertified { period_length: 1, .. } = pd else {
        return fail(format!(
            "pd of the residue field is {}, expected an infinite certificate of period 1",
            pd.describe()
        ));
    };
    Ok((true, "fPD = [0, 0] by the simple-socle rule; residue field has periodic syzygies".into()))
}

// ---------------------------------------------------------------------------
// 3. polynomial rings in m variables: fPD = m with Koszul certificates
// ---------------------------------------------------------------------------

fn c03_polynomial() -> Result<(bool, String)> {
    for m in 1..=3usize {
        let report = polynomial_theorem_check(Field::Rational, m)?;
        if !report.pass {
            return fail(format!("m = {m}: {}", report.details.join("; ")));
        }
        let ring = RingHandle::koszul(Field::Rational, m)?;
        let full: Vec<usize> = (0..m).collect();
        let k = ModuleHandle::Koszul(crate::module::KoszulModule {
            field: Field::Rational,
            vars: m,
            subset: full,
            shift: 0,
        });
        let pd = projective_dimension(&k, DEFAULT_CAP)?;
        let DimResult::Finite { n, certificate: Certificate::Koszul(res) } = &pd else {
            return fail(format!("m = {m}: no Koszul certificate for the residue field"));
        };
        let expected: Vec<usize> = (0..=m).map(|i| binomial(m, i)).collect();
        if *n != m || res.ranks != expected {
            return fail(format!(
                "m = {m}: resolution ranks {:?} instead of the binomials {:?}",
                res.ranks, expected
            ));
        }
        drop(ring);
    }
    Ok((true, "fPD(k[x1..xm]) = m for m = 1, 2, 3 with binomial Koszul ranks".into()))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

// ---------------------------------------------------------------------------
// 4. quotient rings: fPD(R/(a)) + pd(R/(a)) transfers to fPD(R)
// ---------------------------------------------------------------------------

fn c04_quotient() -> Result<(bool, String)> {
    let z = RingHandle::Integers;
    let r1 = quotient_theorem_check(&z, &Scalar::Int(4.into()))?;
    if !r1.pass {
        return fail(format!("(Z, 4): {}", r1.details.join("; ")));
    }
    let kx = RingHandle::PolyPid(Field::Rational);
    let x = crate::scalar::poly_x(Field::Rational);
    let r2 = quotient_theorem_check(&kx, &x)?;
    if !r2.pass {
        return fail(format!("(k[x], x): {}", r2.details.join("; ")));
    }
    for ring in [&z, &kx] {
        let cert = fpd_bounds(ring, DEFAULT_CAP)?;
        if !cert.exact() || cert.lower != 1 {
            return fail(format!("fPD({ring}) = {} instead of [1, 1]", cert.describe()));
        }
    }
    Ok((true, "quotient shift verified for (Z, 4) and (k[x], x); both base rings exact at 1".into()))
}

// ---------------------------------------------------------------------------
// 5. triangular rings: sandwich bounds and corner transport
// ---------------------------------------------------------------------------

/// k[e]/(e^len) as a finite-dimensional algebra.
fn truncated_poly(field: Field, len: usize) -> Result<Arc<FdAlgebra>> {
    let labels: Vec<String> =
        (0..len).map(|i| if i == 0 { "1".into() } else { format!("e{i}") }).collect();
    let mut constants = vec![vec![vec![field.zero(); len]; len]; len];
    for i in 0..len {
        for j in 0..len {
            if i + j < len {
                constants[i][j][i + j] = field.one();
            }
        }
    }
    let mut unit = vec![field.zero(); len];
    unit[0] = field.one();
    make_fd_algebra(&format!("k[e]/(e^{len})"), field, labels, &constants, unit)
}

fn c05_triangular() -> Result<(bool, String)> {
    let mut named = Vec::new();
    named.push(dual_triangular_example(Field::Rational)?);
    named.push(make_utn(Field::Rational, 2)?);
    named.push(make_utn(Field::Rational, 3)?);
    for t in &named {
        let report = triangular_bounds_check(t)?;
        if !report.pass {
            return fail(format!("{}: {}", report.instance, report.details.join("; ")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A5);
    for i in 0..10 {
        let field = if rng.gen_bool(0.5) { Field::Rational } else { Field::Prime(2) };
        let left = match rng.gen_range(0..4) {
            0 => field_as_algebra(field),
            1 => dual_numbers(field),
            2 => truncated_poly(field, 3)?,
            _ => truncated_poly(field, 4)?,
        };
        let right = field_as_algebra(field);
        let bim = BimoduleData::regular_over_field(&left);
        let t = make_triangular(&format!("T{i}"), left, right, bim)?;
        let report = triangular_bounds_check(&t)?;
        if !report.pass {
            return fail(format!("random triple {i}: {}", report.details.join("; ")));
        }
    }
    Ok((true, "sandwich and corner transport pass on 3 named rings and 10 random triples".into()))
}

// ---------------------------------------------------------------------------
// 6. closure of finitely-resolved modules under short exact sequences
// ---------------------------------------------------------------------------

fn verdict_of(m: &ModuleHandle) -> Result<FprVerdict> {
    fpr_membership(m, DEFAULT_CAP)
}

fn chain_of(m: &ModuleHandle) -> Result<Option<Resolution>> {
    Ok(match projective_dimension(m, DEFAULT_CAP)? {
        DimResult::Finite { certificate: Certificate::Chain(res), .. } => Some(*res),
        _ => None,
    })
}

fn term_size(m: &ModuleHandle) -> usize {
    match m {
        ModuleHandle::Presentation { gens, .. } => *gens,
        ModuleHandle::FdRep(r) => r.dim,
        ModuleHandle::Koszul(k) => binomial(k.subset.len(), 0),
    }
}

/// A naive exactness oracle, independent of the certification done inside
/// the resolution builder: composites vanish and every kernel lies in the
/// image of the next differential.
fn exactness_oracle(res: &Resolution) -> Result<bool> {
    for i in 0..res.differentials.len() {
        let d = &res.differentials[i].map;
        if i + 1 < res.differentials.len() {
            let next = &res.differentials[i + 1].map;
            if !d.mul(next).is_zero() {
                return Ok(false);
            }
            let ker = snf::kernel_lattice(d)?;
            if !snf::in_span(next, &ker) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn closure_on_ses(ses: &Ses) -> Result<std::result::Result<(), String>> {
    let va = verdict_of(ses.a())?;
    let vb = verdict_of(ses.b())?;
    let vc = verdict_of(ses.c())?;
    let b_projective = projective_dimension(ses.b(), DEFAULT_CAP)?.finite_value() == Some(0);
    if b_projective && va.is_yes() != vc.is_yes() && (va.is_yes() || va.is_no()) {
        return Ok(Err("projective middle, but A and C verdicts differ".into()));
    }
    if va.is_yes() && vc.is_yes() && !vb.is_yes() {
        return Ok(Err("A, C finitely resolved but B not".into()));
    }
    if va.is_yes() && vb.is_yes() && !vc.is_yes() {
        return Ok(Err("A, B finitely resolved but C not".into()));
    }
    if vb.is_yes() && vc.is_yes() && !va.is_yes() {
        return Ok(Err("B, C finitely resolved but A not".into()));
    }
    // Horseshoe on small instances with chain certificates on both ends
    if let (Some(ra), Some(rc)) = (chain_of(ses.a())?, chain_of(ses.c())?) {
        let total: usize = ra.terms.iter().chain(rc.terms.iter()).map(term_size).sum();
        if total <= 50 {
            let rb = horseshoe(ses, &ra, &rc)?;
            for (i, t) in rb.terms.iter().enumerate() {
                let want = ra.terms.get(i).map(term_size).unwrap_or(0)
                    + rc.terms.get(i).map(term_size).unwrap_or(0);
                if term_size(t) != want {
                    return Ok(Err(format!("horseshoe term {i} has the wrong rank")));
                }
            }
            verify_resolution(&rb)?;
            if !exactness_oracle(&rb)? {
                return Ok(Err("horseshoe output failed the naive exactness oracle".into()));
            }
        }
    }
    Ok(Ok(()))
}

fn c06_fpr_closure() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6C0);
    let mut horseshoes = 0usize;
    for ring in [RingHandle::Integers, RingHandle::PolyPid(Field::Rational)] {
        for i in 0..100 {
            let ses = random_ses(&ring, &mut rng, 3, 4)?;
            if let Err(msg) = closure_on_ses(&ses)? {
                return fail(format!("{ring}, sequence {i}: {msg}"));
            }
            horseshoes += 1;
        }
    }
    let ut2 = RingHandle::Triangular(make_utn(Field::Rational, 2)?);
    for i in 0..100 {
        let ses = random_rep_ses(&ut2, &mut rng, 3, 2)?;
        if let Err(msg) = closure_on_ses(&ses)? {
            return fail(format!("{ut2}, sequence {i}: {msg}"));
        }
    }
    Ok((true, format!("closure implications and {horseshoes}+100 horseshoe checks clean")))
}

// ---------------------------------------------------------------------------
// 7. family-relative flat dimension: sequence laws and sum additivity
// ---------------------------------------------------------------------------

fn c07_family_dims() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7D1);
    for ring in
        [RingHandle::Integers, RingHandle::PolyPid(Field::Rational), RingHandle::QuotientZ(4)]
    {
        let fam = default_witness_family(&ring)?;
        for i in 0..100 {
            let ses = random_ses(&ring, &mut rng, 3, 4)?;
            let da = ft_flat_dim(ses.a(), &fam)?;
            let db = ft_flat_dim(ses.b(), &fam)?;
            let dc = ft_flat_dim(ses.c(), &fam)?;
            if dc > 1 + da.max(db) {
                return fail(format!(
                    "{ring}, sequence {i}: d(C) = {dc} exceeds 1 + max({da}, {db})"
                ));
            }
            if db < dc && da != dc - 1 {
                return fail(format!(
                    "{ring}, sequence {i}: d(B) = {db} < d(C) = {dc} but d(A) = {da}"
                ));
            }
        }
        for i in 0..50 {
            let m = random_presentation(&ring, &mut rng, 3, 5)?;
            let n = random_presentation(&ring, &mut rng, 3, 5)?;
            let s = direct_sum(&m, &n)?;
            let dm = ft_flat_dim(&m, &fam)?;
            let dn = ft_flat_dim(&n, &fam)?;
            let ds = ft_flat_dim(&s, &fam)?;
            if ds != dm.max(dn) {
                return fail(format!(
                    "{ring}, pair {i}: d(M (+) N) = {ds}, but max({dm}, {dn})"
                ));
            }
        }
    }
    Ok((true, "sequence inequality, shift equality, and sum additivity over 3 backends".into()))
}

// ---------------------------------------------------------------------------
// 8. witness shifting: syzygies move the top nonvanishing Tor degree down
// ---------------------------------------------------------------------------

fn c08_witness_shift() -> Result<(bool, String)> {
    let z = RingHandle::Integers;
    let mut rng = ChaCha8Rng::seed_from_u64(0x851);
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < 20 {
        attempts += 1;
        if attempts > 500 {
            return fail(format!("only {done} shiftable pairs found in 500 draws"));
        }
        let m = random_presentation(&z, &mut rng, 3, 6)?;
        let k = rng.gen_range(2..=9i64);
        let x = presentation(&z, 1, Mat::from_i64(Domain::Int, &[&[k]]))?;
        if tor(1, &m, &x)?.is_zero() {
            continue;
        }
        // witness_shift re-verifies both postconditions before returning
        witness_shift(&m, &x, 1)?;
        done += 1;
    }
    let kk = ModuleHandle::Koszul(crate::module::KoszulModule {
        field: Field::Rational,
        vars: 2,
        subset: vec![0, 1],
        shift: 0,
    });
    witness_shift(&kk, &kk, 2)?;
    Ok((true, format!("20 integer instances ({attempts} draws) and the two-variable instance")))
}

// ---------------------------------------------------------------------------
// 9. Tor commutes with localization at a prime
// ---------------------------------------------------------------------------

fn c09_localization() -> Result<(bool, String)> {
    let z = RingHandle::Integers;
    let mut rng = ChaCha8Rng::seed_from_u64(0x914);
    let primes = [2u64, 3, 5];
    for i in 0..20 {
        let m = random_presentation(&z, &mut rng, 3, 8)?;
        let n = random_presentation(&z, &mut rng, 3, 8)?;
        let p = primes[i % 3];
        let deg = i % 2;
        if !check_tor_localization(&m, &n, deg, p)? {
            return fail(format!("pair {i}: degree {deg} profiles differ at p = {p}"));
        }
    }
    let report = localization_inequality_check(&z, &primes)?;
    if !report.pass {
        return fail(report.details.join("; "));
    }
    Ok((true, "20 random pairs at p in {2, 3, 5} and the dimension inequality over Z".into()))
}

// ---------------------------------------------------------------------------
// 10. the golden script corpus
// ---------------------------------------------------------------------------

macro_rules! golden {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../../../fixtures/scripts/", $name, ".fd")),
            include_str!(concat!("../../../fixtures/golden/", $name, ".json")),
        )
    };
}

pub const GOLDEN_CORPUS: &[(&str, &str, &str)] = &[
    golden!("01_worked_example"),
    golden!("02_integer_tor"),
    golden!("03_poly_pid"),
    golden!("04_koszul"),
    golden!("05_quotient_rings"),
    golden!("06_fpd_survey"),
    golden!("07_polynomial_checks"),
    golden!("08_localization"),
    golden!("09_utn"),
    golden!("10_fdalgebra"),
    golden!("11_families"),
    golden!("12_nonsplit"),
    golden!("13_split"),
    golden!("14_ext"),
    golden!("15_local"),
    golden!("16_mixed"),
    golden!("17_engine_errors"),
];

macro_rules! parse_error_fixture {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../../../fixtures/errors/", $name, ".fd")),
            include_str!(concat!("../../../fixtures/errors/", $name, ".err")),
        )
    };
}

pub const PARSE_ERROR_CORPUS: &[(&str, &str, &str)] = &[
    parse_error_fixture!("e01"),
    parse_error_fixture!("e02"),
    parse_error_fixture!("e03"),
];

fn c10_golden_corpus() -> Result<(bool, String)> {
    for (name, text, golden) in GOLDEN_CORPUS {
        let script = dsl::parse_script(text)?;
        // canonical printing must re-parse to the identical tree
        let reparsed = dsl::parse_script(&script.to_string())?;
        // compare modulo line spans: printing drops comments and blank lines
        let kinds = |s: &dsl::Script| s.statements.iter().map(|st| st.kind.clone()).collect::<Vec<_>>();
        if kinds(&reparsed) != kinds(&script) {
            return fail(format!("{name}: printing does not round-trip"));
        }
        let opts1 = RunOptions { jobs: 1, ..Default::default() };
        let opts4 = RunOptions { jobs: 4, ..Default::default() };
        let r1 = format!("{}\n", dsl::run_script(&script, &opts1).to_json());
        let r1b = format!("{}\n", dsl::run_script(&script, &opts1).to_json());
        let r4 = format!("{}\n", dsl::run_script(&script, &opts4).to_json());
        if r1 != r1b || r1 != r4 {
            return fail(format!("{name}: report differs across runs or job counts"));
        }
        if r1 != *golden {
            return fail(format!("{name}: report differs from the stored fixture"));
        }
    }
    for (name, text, expected) in PARSE_ERROR_CORPUS {
        let Err(e) = dsl::parse_script(text) else {
            return fail(format!("{name}: expected a parse error"));
        };
        if format!("{e}\n") != *expected {
            return fail(format!("{name}: '{e}' does not match the stored position fixture"));
        }
    }
    Ok((
        true,
        format!(
            "{} scripts byte-identical across runs and jobs, {} error positions match",
            GOLDEN_CORPUS.len(),
            PARSE_ERROR_CORPUS.len()
        ),
    ))
}
