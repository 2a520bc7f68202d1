//! Small-finitistic-dimension certificates and executable change-of-rings
//! checkers.
//!
//! The small finitistic dimension fPD of a ring is the sup of projective
//! dimensions over the modules with a finite finitely-generated projective
//! resolution. It is not computable for arbitrary finite-dimensional
//! algebras, so certificates carry an interval: a lower bound from an
//! explicit witness module with a certified resolution, and an upper bound
//! from a closed list of citable rules. Anything outside the rule list
//! yields an unknown upper bound rather than a guess.

use crate::derived::{self, ft_flat_dim, tor};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Mat;
use crate::module::{
    self, invariant_closure, presentation, quotient_rep, regular_rep, KoszulModule,
    ModuleHandle, Ses,
};
use crate::resolution::{prime_power, projective_dimension, DimResult, DEFAULT_CAP};
use crate::ring::{
    assemble_triangular, dual_numbers, field_as_algebra, BimoduleData, FdAlgebra, RingHandle,
    TriangularData,
};
use crate::scalar::{poly_from_coeffs, Domain, Field, Scalar};
use num::{BigInt, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// The closed list of upper-bound rules. Each tag names the argument that
/// justifies the bound; nothing else produces an upper bound.
#[derive(Clone, Debug, PartialEq)]
pub enum UpperRule {
    /// every module over a field is free
    Field,
    /// over a PID, submodules of free modules are free, so pd <= 1
    PidSubmodule,
    /// the syzygy theorem over a polynomial ring in m variables: pd <= m
    KoszulSyzygy(usize),
    /// a commutative local algebra with one-dimensional socle is
    /// self-injective; finite projective dimension forces projectivity
    SelfInjectiveLocal,
    /// the triangular sandwich: fPD(T) <= max(fPD(R), fPD(S)) + 1
    Sandwich,
}

impl UpperRule {
    pub fn describe(&self) -> String {
        match self {
            UpperRule::Field => "field rule (all modules free)".into(),
            UpperRule::PidSubmodule => "PID rule (submodules of frees are free)".into(),
            UpperRule::KoszulSyzygy(m) => format!("syzygy rule over {m} variables"),
            UpperRule::SelfInjectiveLocal => {
                "self-injective local rule (simple socle)".into()
            }
            UpperRule::Sandwich => "triangular sandwich rule".into(),
        }
    }
}

/// An interval certificate for the small finitistic dimension.
#[derive(Clone, Debug)]
pub struct FpdCertificate {
    pub ring: RingHandle,
    pub lower: usize,
    /// the best witness found: a module with a certified finite pd equal to
    /// the lower bound
    pub lower_witness: Option<(ModuleHandle, DimResult)>,
    pub upper: Option<usize>,
    pub rule: Option<UpperRule>,
}

impl FpdCertificate {
    pub fn exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    pub fn describe(&self) -> String {
        match self.upper {
            Some(u) => format!("[{}, {}]", self.lower, u),
            None => format!("[{}, ?]", self.lower),
        }
    }
}

/// A recomputable record of one change-of-rings check.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub theorem: String,
    pub instance: String,
    pub statement: String,
    pub pass: bool,
    pub details: Vec<String>,
}

// ---------------------------------------------------------------------------
// Upper bound rules
// ---------------------------------------------------------------------------

/// Self-injectivity test for a commutative algebra: local with radical of
/// codimension one and one-dimensional socle.
pub fn is_self_injective_local(a: &FdAlgebra) -> Result<bool> {
    if !a.commutative {
        return Ok(false);
    }
    let rad = a.radical()?;
    if rad.cols() + 1 != a.dim {
        // the residue field is larger than the base field, or the algebra
        // is not local; stay out of rule territory
        return Ok(rad.cols() == 0 && a.dim == 1);
    }
    // socle = annihilator of the radical: common kernel of multiplication
    // by the radical basis
    let dom = a.domain();
    let mut stacked = Mat::zero(dom, 0, a.dim);
    for j in 0..rad.cols() {
        let r: Vec<Scalar> = (0..a.dim).map(|i| rad.get(i, j).clone()).collect();
        stacked = stacked.vstack(&a.left_mul_by(&r));
    }
    let (rank, _) = linalg::rank_and_kernel(&stacked)?;
    Ok(a.dim - rank == 1)
}

fn upper_rule(ring: &RingHandle) -> Result<(Option<usize>, Option<UpperRule>)> {
    Ok(match ring {
        RingHandle::Field(_) => (Some(0), Some(UpperRule::Field)),
        RingHandle::Integers | RingHandle::LocalIntegersAt(_) | RingHandle::PolyPid(_) => {
            (Some(1), Some(UpperRule::PidSubmodule))
        }
        RingHandle::KoszulPoly { vars, .. } => {
            (Some(*vars), Some(UpperRule::KoszulSyzygy(*vars)))
        }
        RingHandle::QuotientZ(n) => {
            if prime_power(*n).is_some() {
                (Some(0), Some(UpperRule::SelfInjectiveLocal))
            } else {
                (None, None)
            }
        }
        RingHandle::FdAlgebra(a) => {
            if is_self_injective_local(a)? {
                (Some(0), Some(UpperRule::SelfInjectiveLocal))
            } else {
                (None, None)
            }
        }
        RingHandle::Triangular(t) => {
            let (ur, _) = upper_rule(&left_corner_ring(t))?;
            let (us, _) = upper_rule(&RingHandle::FdAlgebra(t.right.clone()))?;
            match (ur, us) {
                (Some(ur), Some(us)) => (Some(ur.max(us) + 1), Some(UpperRule::Sandwich)),
                _ => (None, None),
            }
        }
    })
}

/// The left corner of a triangular ring as a ring handle, recursing into a
/// nested triangular structure when one was recorded.
pub fn left_corner_ring(t: &Arc<TriangularData>) -> RingHandle {
    match &t.left_nested {
        Some(nested) => RingHandle::Triangular(nested.clone()),
        None => RingHandle::FdAlgebra(t.left.clone()),
    }
}

// ---------------------------------------------------------------------------
// Lower bound witness search
// ---------------------------------------------------------------------------

const WITNESS_CANDIDATE_CAP: usize = 200;

fn algebra_candidates(ring: &RingHandle) -> Result<Vec<ModuleHandle>> {
    let alg = ring.as_algebra().ok_or_else(|| {
        Error::Unsupported("witness catalogue needs an algebra backend".into())
    })?;
    let mut out: Vec<ModuleHandle> = vec![ModuleHandle::free(ring, 1)?];
    out.extend(derived::simple_modules(ring)?);
    if let RingHandle::Triangular(t) = ring {
        let left_ring = RingHandle::FdAlgebra(t.left.clone());
        for s in derived::simple_modules(&left_ring)? {
            out.push(module::induce_left(t, &s)?);
        }
        let right_ring = RingHandle::FdAlgebra(t.right.clone());
        for s in derived::simple_modules(&right_ring)? {
            out.push(module::induce_right(t, &s)?);
        }
    }
    // cyclic quotients of the regular module by one or two random elements
    let reg = match regular_rep(ring)? {
        ModuleHandle::FdRep(r) => r,
        _ => unreachable!(),
    };
    let dom = alg.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(0xFD);
    for round in 0..12usize {
        if out.len() >= WITNESS_CANDIDATE_CAP {
            break;
        }
        let cols = 1 + round % 2;
        let seed = Mat::from_fn(dom, alg.dim, cols, |_, _| {
            dom.from_i64(rng.gen_range(-2..=2))
        });
        let sub = invariant_closure(&reg, &seed);
        if sub.cols() == 0 || sub.cols() == alg.dim {
            continue;
        }
        let (q, _) = quotient_rep(&reg, &sub)?;
        out.push(ModuleHandle::FdRep(q));
    }
    out.truncate(WITNESS_CANDIDATE_CAP);
    Ok(out)
}

fn lower_witness(
    ring: &RingHandle,
    cap: usize,
) -> Result<(usize, Option<(ModuleHandle, DimResult)>)> {
    let candidates: Vec<ModuleHandle> = match ring {
        RingHandle::Field(_) | RingHandle::QuotientZ(_) => vec![ModuleHandle::free(ring, 1)?],
        RingHandle::Integers => {
            vec![presentation(ring, 1, Mat::from_i64(Domain::Int, &[&[2]]))?]
        }
        RingHandle::LocalIntegersAt(p) => {
            let dom = Domain::Local(*p);
            vec![presentation(ring, 1, Mat::from_i64(dom, &[&[*p as i64]]))?]
        }
        RingHandle::PolyPid(field) => {
            let x = poly_from_coeffs(*field, &[0, 1]);
            let rels = Mat::from_fn(Domain::Poly(*field), 1, 1, |_, _| x.clone());
            vec![presentation(ring, 1, rels)?]
        }
        RingHandle::KoszulPoly { field, vars } => vec![ModuleHandle::Koszul(KoszulModule {
            field: *field,
            vars: *vars,
            subset: (0..*vars).collect(),
            shift: 0,
        })],
        RingHandle::FdAlgebra(_) | RingHandle::Triangular(_) => algebra_candidates(ring)?,
    };
    let mut best = 0usize;
    let mut witness = None;
    for c in candidates {
        let pd = projective_dimension(&c, cap)?;
        if let Some(n) = pd.finite_value() {
            if n > best || witness.is_none() {
                best = n;
                witness = Some((c, pd));
            }
        }
    }
    Ok((best, witness))
}

/// Compute an interval certificate for the small finitistic dimension.
pub fn fpd_bounds(ring: &RingHandle, cap: usize) -> Result<FpdCertificate> {
    let (upper, rule) = upper_rule(ring)?;
    let (lower, lower_witness) = lower_witness(ring, cap)?;
    if let Some(u) = upper {
        if lower > u {
            return Err(Error::NotExact(format!(
                "witness search found pd {lower} above the certified upper bound {u}"
            )));
        }
    }
    Ok(FpdCertificate { ring: ring.clone(), lower, lower_witness, upper, rule })
}

// ---------------------------------------------------------------------------
// Residue field criterion
// ---------------------------------------------------------------------------

/// The designated residue field module of a local-type backend.
pub fn residue_field_module(ring: &RingHandle) -> Result<ModuleHandle> {
    match ring {
        RingHandle::LocalIntegersAt(p) => {
            let dom = Domain::Local(*p);
            presentation(ring, 1, Mat::from_i64(dom, &[&[*p as i64]]))
        }
        RingHandle::PolyPid(field) => {
            let x = poly_from_coeffs(*field, &[0, 1]);
            let rels = Mat::from_fn(Domain::Poly(*field), 1, 1, |_, _| x.clone());
            presentation(ring, 1, rels)
        }
        RingHandle::FdAlgebra(a) => {
            let simples = derived::simple_modules(ring)?;
            if simples.len() != 1 {
                return Err(Error::Precondition(format!(
                    "{} is not local ({} simples)",
                    a.label,
                    simples.len()
                )));
            }
            Ok(simples.into_iter().next().unwrap())
        }
        _ => Err(Error::Unsupported(format!("{ring} has no designated residue field"))),
    }
}

/// Pass iff the family-relative FT-flat dimension of the residue field is
/// at most n; recorded as upper-bound evidence for fPD <= n.
pub fn residue_field_criterion(ring: &RingHandle, n: usize) -> Result<bool> {
    let rf = residue_field_module(ring)?;
    let fam = derived::default_witness_family(ring)?;
    Ok(ft_flat_dim(&rf, &fam)? <= n)
}

// ---------------------------------------------------------------------------
// Quotient theorem: fPD(R) >= fPD(R/(a)) + 1
// ---------------------------------------------------------------------------

pub fn quotient_theorem_check(ring: &RingHandle, a: &Scalar) -> Result<TheoremReport> {
    let (quotient_ring, witness, instance) = match (ring, a) {
        (RingHandle::Integers, Scalar::Int(n)) => {
            let n = n.abs();
            if n <= BigInt::from(1) {
                return Err(Error::Precondition(format!(
                    "{n} is a unit or zero in the integers"
                )));
            }
            let digits = n.to_u64_digits().1;
            if digits.len() != 1 {
                return Err(Error::Precondition("modulus too large".into()));
            }
            let m = digits[0];
            let rels = Mat::from_fn(Domain::Int, 1, 1, |_, _| Scalar::Int(n.clone()));
            (RingHandle::QuotientZ(m), presentation(ring, 1, rels)?, format!("Z mod {m}"))
        }
        (RingHandle::PolyPid(field), Scalar::Poly { coeffs, .. }) => {
            if coeffs.len() < 2 {
                return Err(Error::Precondition(
                    "constant polynomials are units or zero".into(),
                ));
            }
            if coeffs.len() > 2 {
                return Err(Error::Unsupported(
                    "quotient backend exists only for degree-one polynomials".into(),
                ));
            }
            let rels = Mat::from_fn(Domain::Poly(*field), 1, 1, |_, _| a.clone());
            (
                RingHandle::Field(*field),
                presentation(ring, 1, rels)?,
                format!("{field}[x] mod a linear polynomial"),
            )
        }
        _ => {
            return Err(Error::Unsupported(
                "quotient theorem check supports the integers and a polynomial PID".into(),
            ))
        }
    };
    let bar = fpd_bounds(&quotient_ring, DEFAULT_CAP)?;
    if !bar.exact() {
        return Err(Error::Unsupported(format!(
            "fPD of the quotient is not certified exactly: {}",
            bar.describe()
        )));
    }
    let n0 = bar.lower;
    let witness_pd = projective_dimension(&witness, DEFAULT_CAP)?;
    let base = fpd_bounds(ring, DEFAULT_CAP)?;
    let mut details = vec![
        format!("fPD of the quotient ring = {n0} ({})", bar.describe()),
        format!(
            "the quotient, restricted to the base ring, has pd {}",
            witness_pd.describe()
        ),
        format!("fPD bounds of the base ring: {}", base.describe()),
    ];
    let witness_ok = witness_pd.finite_value() == Some(n0 + 1);
    let inequality_ok = base.lower >= n0 + 1;
    let pass = witness_ok && inequality_ok;
    details.push(format!(
        "inequality fPD(base) >= fPD(quotient) + 1: {} >= {}",
        base.lower,
        n0 + 1
    ));
    Ok(TheoremReport {
        theorem: "quotient".into(),
        instance,
        statement: "fPD(R) >= fPD(R/(a)) + 1 for a regular non-unit a".into(),
        pass,
        details,
    })
}

// ---------------------------------------------------------------------------
// Polynomial theorem: fPD(k[x_1..x_m]) = m
// ---------------------------------------------------------------------------

pub fn polynomial_theorem_check(field: Field, m: usize) -> Result<TheoremReport> {
    if !(1..=4).contains(&m) {
        return Err(Error::Precondition("variable count must be between 1 and 4".into()));
    }
    let ring = RingHandle::koszul(field, m)?;
    let cert = fpd_bounds(&ring, DEFAULT_CAP)?;
    let k = ModuleHandle::Koszul(KoszulModule {
        field,
        vars: m,
        subset: (0..m).collect(),
        shift: 0,
    });
    let tor_top = tor(m, &k, &k)?;
    let tor_above = tor(m + 1, &k, &k)?;
    let pass = cert.exact() && cert.lower == m && !tor_top.is_zero() && tor_above.is_zero();
    Ok(TheoremReport {
        theorem: "polynomial".into(),
        instance: format!("{field}[x1..x{m}]"),
        statement: format!("fPD of a polynomial ring in {m} variables over a field is {m}"),
        pass,
        details: vec![
            format!("fPD bounds: {}", cert.describe()),
            format!("tor_{m}(k, k) = {}", tor_top.describe()),
            format!("tor_{}(k, k) = {}", m + 1, tor_above.describe()),
        ],
    })
}

// ---------------------------------------------------------------------------
// Triangular sandwich theorem
// ---------------------------------------------------------------------------

pub fn triangular_bounds_check(t: &Arc<TriangularData>) -> Result<TheoremReport> {
    let ring = RingHandle::Triangular(t.clone());
    let left_ring = left_corner_ring(t);
    let right_ring = RingHandle::FdAlgebra(t.right.clone());
    let cr = fpd_bounds(&left_ring, DEFAULT_CAP)?;
    let cs = fpd_bounds(&right_ring, DEFAULT_CAP)?;
    let ct = fpd_bounds(&ring, DEFAULT_CAP)?;
    let mut details = vec![
        format!("left corner bounds: {}", cr.describe()),
        format!("right corner bounds: {}", cs.describe()),
        format!("triangular ring bounds: {}", ct.describe()),
    ];
    let mut pass = true;
    match (cr.upper, cs.upper, ct.upper) {
        (Some(ur), Some(us), Some(ut)) => {
            let sandwich_upper = (ur + 1).max(us + 1);
            let sandwich_lower = cr.lower.max(cs.lower);
            if ut > sandwich_upper || ct.lower > sandwich_upper || sandwich_lower > ut {
                pass = false;
            }
            details.push(format!(
                "sandwich: max({}, {}) <= fPD(T) <= max({}, {})",
                cr.lower,
                cs.lower,
                ur + 1,
                us + 1
            ));
        }
        _ => {
            pass = false;
            details.push("corner upper bounds not certified".into());
        }
    }
    // corner transport on the FPR-certified corner simples: the dimension is
    // preserved by induction from either corner
    let plain_left = RingHandle::FdAlgebra(t.left.clone());
    for x in derived::simple_modules(&plain_left)? {
        let pd_x = projective_dimension(&x, DEFAULT_CAP)?;
        if let Some(n) = pd_x.finite_value() {
            let ind = module::induce_left(t, &x)?;
            let pd_t = projective_dimension(&ind, DEFAULT_CAP)?;
            let ok = pd_t.finite_value() == Some(n);
            if !ok {
                pass = false;
            }
            details.push(format!(
                "left transport: pd {n} -> pd {} ({})",
                pd_t.describe(),
                if ok { "ok" } else { "mismatch" }
            ));
        }
    }
    for y in derived::simple_modules(&right_ring)? {
        let pd_y = projective_dimension(&y, DEFAULT_CAP)?;
        if let Some(n) = pd_y.finite_value() {
            let ind = module::induce_right(t, &y)?;
            let pd_t = projective_dimension(&ind, DEFAULT_CAP)?;
            let ok = pd_t.finite_value() == Some(n);
            if !ok {
                pass = false;
            }
            details.push(format!(
                "right transport: pd {n} -> pd {} ({})",
                pd_t.describe(),
                if ok { "ok" } else { "mismatch" }
            ));
        }
    }
    // the UT_n corollary when the ring is an iterated one-dimensional
    // extension: fPD <= depth
    if let Some(depth) = utn_depth(t) {
        if let Some(ut) = ct.upper {
            let ok = ut <= depth;
            if !ok {
                pass = false;
            }
            details.push(format!("upper-triangular corollary: {ut} <= {depth}"));
        }
    }
    Ok(TheoremReport {
        theorem: "triangular".into(),
        instance: t.label.clone(),
        statement: "max(fPD(R), fPD(S)) <= fPD(T) <= max(fPD(R)+1, fPD(S)+1)".into(),
        pass,
        details,
    })
}

/// n - 1 for UT_n built by the recursive constructor, None otherwise.
fn utn_depth(t: &Arc<TriangularData>) -> Option<usize> {
    if t.right.dim != 1 {
        return None;
    }
    match &t.left_nested {
        Some(nested) => utn_depth(nested).map(|d| d + 1),
        None => {
            if t.left.dim == 1 {
                Some(1)
            } else {
                None
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Split / nonsplit certificates
// ---------------------------------------------------------------------------

/// The outcome of a section search for the surjection of a short exact
/// sequence of representations.
#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Split { section: Mat },
    NonSplit { system_rank: usize, augmented_rank: usize },
}

/// Decide splitness by solving the linear system "s is equivariant and
/// pi compose s = id" for a section s of the surjection.
pub fn non_split_certificate(ses: &Ses) -> Result<SplitOutcome> {
    let (b, c) = match (ses.b(), ses.c()) {
        (ModuleHandle::FdRep(b), ModuleHandle::FdRep(c)) => (b.clone(), c.clone()),
        _ => {
            return Err(Error::Unsupported(
                "section search needs a sequence of representations".into(),
            ))
        }
    };
    let dom = Domain::Field(b.algebra().field);
    let pi = &ses.surj.map;
    let (db, dc) = (b.dim, c.dim);
    let unknowns = db * dc;
    // vec(s) is column-major; vec(A s) = (I (x) A) vec(s),
    // vec(s B) = (B^T (x) I) vec(s)
    let id_c = Mat::identity(dom, dc);
    let id_b = Mat::identity(dom, db);
    let mut system = id_c.kron(pi);
    let mut rhs = Mat::from_fn(dom, dc * dc, 1, |k, _| {
        if k / dc == k % dc {
            dom.one()
        } else {
            dom.zero()
        }
    });
    for i in 0..b.action.len() {
        let eq = id_c.kron(&b.action[i]).sub(&c.action[i].transpose().kron(&id_b));
        system = system.vstack(&eq);
        rhs = rhs.vstack(&Mat::zero(dom, unknowns, 1));
    }
    match linalg::solve_field(&system, &rhs) {
        Some(sol) => {
            let section = Mat::from_fn(dom, db, dc, |i, j| sol.get(j * db + i, 0).clone());
            Ok(SplitOutcome::Split { section })
        }
        None => {
            let system_rank = linalg::rank(&system);
            let augmented_rank = linalg::rank(&system.hstack(&rhs));
            Ok(SplitOutcome::NonSplit { system_rank, augmented_rank })
        }
    }
}

// ---------------------------------------------------------------------------
// Localization inequality
// ---------------------------------------------------------------------------

/// Finite-sample check of fPD(R) <= sup over maximal ideals of the
/// localized fPD, on an explicit list of primes.
pub fn localization_inequality_check(
    ring: &RingHandle,
    primes: &[u64],
) -> Result<TheoremReport> {
    if primes.is_empty() {
        return Err(Error::Precondition("prime list must be nonempty".into()));
    }
    let base = fpd_bounds(ring, DEFAULT_CAP)?;
    let mut details = vec![format!("base ring bounds: {}", base.describe())];
    let mut sup: Option<usize> = None;
    for &p in primes {
        let localized_ring = match ring {
            RingHandle::Integers => RingHandle::local_integers(p)?,
            // localizing a polynomial PID at a maximal ideal gives a local
            // PID with the same upper rule; the bounds transfer verbatim
            RingHandle::PolyPid(_) => ring.clone(),
            _ => {
                return Err(Error::Unsupported(
                    "localization check supports the integers and polynomial PIDs".into(),
                ))
            }
        };
        let cert = fpd_bounds(&localized_ring, DEFAULT_CAP)?;
        details.push(format!("localized at {p}: {}", cert.describe()));
        match cert.upper {
            Some(u) => sup = Some(sup.map_or(u, |s| s.max(u))),
            None => {
                return Err(Error::Unsupported("localized upper bound not certified".into()))
            }
        }
    }
    let sup = sup.unwrap();
    let pass = base.lower <= sup;
    details.push(format!("inequality: {} <= {sup}", base.lower));
    Ok(TheoremReport {
        theorem: "localization".into(),
        instance: format!("{ring} at primes {primes:?}"),
        statement: "fPD(R) <= sup of fPD over the listed localizations".into(),
        pass,
        details,
    })
}

// ---------------------------------------------------------------------------
// The worked triangular example
// ---------------------------------------------------------------------------

/// The triangular ring T = (R R; 0 k) with R = k[e]/(e^2), the running
/// example for the sandwich bounds: fPD(R) = fPD(k) = 0 but fPD(T) = 1.
pub fn dual_triangular_example(field: Field) -> Result<Arc<TriangularData>> {
    let r = dual_numbers(field);
    let s = field_as_algebra(field);
    let bim = BimoduleData::regular_over_field(&r);
    Ok(Arc::new(assemble_triangular("T", r, s, bim)?))
}

/// The module concentrated at the right corner of a triangular ring: the
/// triple (0, S, 0) carrying the regular right-corner action.
pub fn right_corner_simple(t: &Arc<TriangularData>) -> Result<ModuleHandle> {
    let right_ring = RingHandle::FdAlgebra(t.right.clone());
    let s_reg = match regular_rep(&right_ring)? {
        ModuleHandle::FdRep(rep) => rep,
        _ => unreachable!(),
    };
    let dom = Domain::Field(t.algebra.field);
    let zero_a = module::make_fd_rep(
        &RingHandle::FdAlgebra(t.left.clone()),
        vec![Mat::zero(dom, 0, 0); t.left.dim],
    )?;
    let phi = vec![Mat::zero(dom, 0, s_reg.dim); t.bimodule.dim];
    let rep = module::triple_module(t, &module::Triple { a: zero_a, b: s_reg, phi })?;
    Ok(ModuleHandle::FdRep(rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{as_triple, corner_left, corner_right, make_fd_rep, restrict_to_integers};
    use crate::resolution::{fpr_membership, minimal_resolution};
    use crate::ring::make_utn;

    #[test]
    fn fpd_of_field_is_zero() {
        let c = fpd_bounds(&RingHandle::Field(Field::Rational), DEFAULT_CAP).unwrap();
        assert_eq!((c.lower, c.upper), (0, Some(0)));
        assert!(c.exact());
        assert_eq!(c.rule, Some(UpperRule::Field));
    }

    #[test]
    fn fpd_of_dual_numbers_is_zero() {
        let ring = RingHandle::FdAlgebra(dual_numbers(Field::Rational));
        let c = fpd_bounds(&ring, DEFAULT_CAP).unwrap();
        assert_eq!((c.lower, c.upper), (0, Some(0)));
        assert_eq!(c.rule, Some(UpperRule::SelfInjectiveLocal));
    }

    #[test]
    fn fpd_of_pids_is_one() {
        for ring in [
            RingHandle::Integers,
            RingHandle::local_integers(2).unwrap(),
            RingHandle::PolyPid(Field::Rational),
        ] {
            let c = fpd_bounds(&ring, DEFAULT_CAP).unwrap();
            assert_eq!((c.lower, c.upper), (1, Some(1)), "{ring}");
            assert!(c.exact());
        }
    }

    #[test]
    fn fpd_of_koszul_ring_matches_variable_count() {
        for m in 1..=3 {
            let ring = RingHandle::koszul(Field::Rational, m).unwrap();
            let c = fpd_bounds(&ring, DEFAULT_CAP).unwrap();
            assert_eq!((c.lower, c.upper), (m, Some(m)));
        }
    }

    #[test]
    fn fpd_of_worked_example_is_one() {
        let t = dual_triangular_example(Field::Rational).unwrap();
        let c = fpd_bounds(&RingHandle::Triangular(t), DEFAULT_CAP).unwrap();
        assert_eq!((c.lower, c.upper), (1, Some(1)));
        assert!(c.exact());
        assert_eq!(c.rule, Some(UpperRule::Sandwich));
        let (_, pd) = c.lower_witness.unwrap();
        assert_eq!(pd.finite_value(), Some(1));
    }

    #[test]
    fn fpd_of_upper_triangular_algebras() {
        let ut2 = make_utn(Field::Rational, 2).unwrap();
        let c2 = fpd_bounds(&RingHandle::Triangular(ut2), DEFAULT_CAP).unwrap();
        assert_eq!((c2.lower, c2.upper), (1, Some(1)));
        let ut3 = make_utn(Field::Rational, 3).unwrap();
        let c3 = fpd_bounds(&RingHandle::Triangular(ut3), DEFAULT_CAP).unwrap();
        assert_eq!(c3.lower, 1);
        assert_eq!(c3.upper, Some(2));
        assert!(!c3.exact());
    }

    #[test]
    fn residue_field_criterion_examples() {
        let z2 = RingHandle::local_integers(2).unwrap();
        assert!(residue_field_criterion(&z2, 1).unwrap());
        assert!(!residue_field_criterion(&z2, 0).unwrap());
        let dual = RingHandle::FdAlgebra(dual_numbers(Field::Rational));
        assert!(residue_field_criterion(&dual, 0).unwrap());
        let kx = RingHandle::PolyPid(Field::Rational);
        assert!(residue_field_criterion(&kx, 1).unwrap());
    }

    #[test]
    fn quotient_theorem_instances() {
        let z4 = quotient_theorem_check(&RingHandle::Integers, &Domain::Int.from_i64(4)).unwrap();
        assert!(z4.pass, "{:?}", z4.details);
        let x = poly_from_coeffs(Field::Rational, &[0, 1]);
        let kx = quotient_theorem_check(&RingHandle::PolyPid(Field::Rational), &x).unwrap();
        assert!(kx.pass, "{:?}", kx.details);
        // units are rejected
        assert!(quotient_theorem_check(&RingHandle::Integers, &Domain::Int.from_i64(1)).is_err());
        assert!(quotient_theorem_check(&RingHandle::Integers, &Domain::Int.from_i64(0)).is_err());
    }

    #[test]
    fn polynomial_theorem_instances() {
        for m in 1..=3 {
            let report = polynomial_theorem_check(Field::Rational, m).unwrap();
            assert!(report.pass, "m = {m}: {:?}", report.details);
        }
        assert!(polynomial_theorem_check(Field::Rational, 0).is_err());
        assert!(polynomial_theorem_check(Field::Rational, 5).is_err());
    }

    #[test]
    fn triangular_bounds_on_named_instances() {
        for t in [
            dual_triangular_example(Field::Rational).unwrap(),
            make_utn(Field::Rational, 2).unwrap(),
            make_utn(Field::Rational, 3).unwrap(),
            make_utn(Field::Prime(2), 3).unwrap(),
        ] {
            let report = triangular_bounds_check(&t).unwrap();
            assert!(report.pass, "{}: {:?}", report.instance, report.details);
        }
    }

    #[test]
    fn nonsplit_certificate_on_the_worked_example() {
        // the projective cover sequence 0 -> P1 -> P2 -> L -> 0 does not split
        let t = dual_triangular_example(Field::Rational).unwrap();
        let l = right_corner_simple(&t).unwrap();
        let ses = crate::resolution::cover_sequence(&l).unwrap();
        match non_split_certificate(&ses).unwrap() {
            SplitOutcome::NonSplit { system_rank, augmented_rank } => {
                assert!(augmented_rank > system_rank);
            }
            SplitOutcome::Split { .. } => panic!("the cover sequence must not split"),
        }
    }

    #[test]
    fn split_sequence_yields_a_section() {
        // B = A + C over the dual numbers splits by construction
        let ring = RingHandle::FdAlgebra(dual_numbers(Field::Rational));
        let reg = regular_rep(&ring).unwrap();
        let sum = module::direct_sum(&reg, &reg).unwrap();
        let (a_rep, b_rep) = match (&reg, &sum) {
            (ModuleHandle::FdRep(a), ModuleHandle::FdRep(b)) => (a.clone(), b.clone()),
            _ => unreachable!(),
        };
        let dom = Domain::Field(Field::Rational);
        let inj = Mat::from_fn(dom, b_rep.dim, a_rep.dim, |i, j| {
            if i == j { dom.one() } else { dom.zero() }
        });
        let surj = Mat::from_fn(dom, a_rep.dim, b_rep.dim, |i, j| {
            if j == i + a_rep.dim { dom.one() } else { dom.zero() }
        });
        let ses = module::make_ses(
            module::morphism(&reg, &sum, inj).unwrap(),
            module::morphism(&sum, &reg, surj).unwrap(),
        )
        .unwrap();
        match non_split_certificate(&ses).unwrap() {
            SplitOutcome::Split { section } => {
                assert_eq!(ses.surj.map.mul(&section), Mat::identity(dom, a_rep.dim));
            }
            SplitOutcome::NonSplit { .. } => panic!("a direct sum sequence splits"),
        }
    }

    #[test]
    fn localization_inequality_instances() {
        let z = localization_inequality_check(&RingHandle::Integers, &[2, 3, 5]).unwrap();
        assert!(z.pass, "{:?}", z.details);
        let kx =
            localization_inequality_check(&RingHandle::PolyPid(Field::Rational), &[0]).unwrap();
        assert!(kx.pass, "{:?}", kx.details);
        assert!(localization_inequality_check(&RingHandle::Integers, &[]).is_err());
        assert!(localization_inequality_check(&RingHandle::Integers, &[4]).is_err());
    }

    #[test]
    fn corner_extraction_preserves_fpr() {
        // for N in FPR(T), both corners are in FPR of their corner rings
        let t = dual_triangular_example(Field::Rational).unwrap();
        let ring = RingHandle::Triangular(t.clone());
        let candidates =
            vec![right_corner_simple(&t).unwrap(), ModuleHandle::free(&ring, 1).unwrap()];
        for n in candidates {
            if !fpr_membership(&n, DEFAULT_CAP).unwrap().is_yes() {
                continue;
            }
            let cl = corner_left(&t, &n).unwrap();
            let cr = corner_right(&t, &n).unwrap();
            assert!(fpr_membership(&cl, DEFAULT_CAP).unwrap().is_yes());
            assert!(fpr_membership(&cr, DEFAULT_CAP).unwrap().is_yes());
        }
    }

    #[test]
    fn quotient_shift_on_integer_instances() {
        // C free over Z/4 of rank r has pd 0; restricted to Z it has pd 1
        let ring = RingHandle::QuotientZ(4);
        for r in 1..=3usize {
            let c = ModuleHandle::free(&ring, r).unwrap();
            assert_eq!(
                projective_dimension(&c, DEFAULT_CAP).unwrap().finite_value(),
                Some(0)
            );
            let restricted = restrict_to_integers(&c).unwrap();
            assert_eq!(
                projective_dimension(&restricted, DEFAULT_CAP).unwrap().finite_value(),
                Some(1)
            );
        }
    }

    #[test]
    fn ext_vanishes_above_certified_fpd() {
        // over Z with fPD = 1, ext^2 vanishes on FPR pairs
        let z = RingHandle::Integers;
        let m = presentation(&z, 1, Mat::from_i64(Domain::Int, &[&[6]])).unwrap();
        let n = presentation(&z, 2, Mat::from_i64(Domain::Int, &[&[2, 0], &[0, 9]])).unwrap();
        assert!(crate::derived::ext(2, &m, &n).unwrap().is_zero());
        assert!(crate::derived::ext(2, &n, &m).unwrap().is_zero());
    }

    #[test]
    fn worked_example_corner_structure() {
        let t = dual_triangular_example(Field::Rational).unwrap();
        let l = right_corner_simple(&t).unwrap();
        let pd = match &l {
            ModuleHandle::FdRep(rep) => minimal_resolution(rep, DEFAULT_CAP).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(pd.finite_value(), Some(1));
        // L as a triple is (0, S, 0)
        let rep = match &l {
            ModuleHandle::FdRep(rep) => rep.clone(),
            _ => unreachable!(),
        };
        let triple = as_triple(&t, &rep).unwrap();
        assert_eq!(triple.a.dim, 0);
        assert_eq!(triple.b.dim, 1);
        // the left corner action matrices exist even on the zero space
        let _ = make_fd_rep(
            &RingHandle::FdAlgebra(t.left.clone()),
            triple.a.action.clone(),
        );
    }
}
