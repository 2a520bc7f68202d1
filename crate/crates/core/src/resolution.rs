//! Projective resolutions and projective-dimension verdicts.
//!
//! Minimal resolutions over finite-dimensional algebras (projective covers,
//! syzygy periodicity as the infinite-dimension certificate), SNF-based
//! length <= 1 resolutions over the Euclidean backends, minimal resolutions
//! over Z/p^k, the symbolic Koszul complex over polynomial backends, the
//! Horseshoe construction, and FPR membership.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Mat;
use crate::module::{
    self, direct_sum, full_relations, left_ideal_rep, morphism, presentation,
    presentation_domain, sub_rep, FdRep, KoszulModule, ModuleHandle, Morphism, Ses,
};
use crate::ring::{AlgElem, RingHandle};
use crate::scalar::{Domain, Field, Scalar};
use crate::snf;
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A certified projective resolution: an exact complex
/// `... -> terms[1] -> terms[0] -> target -> 0` whose terms are finitely
/// generated projectives. Exactness is re-verified on construction.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub target: ModuleHandle,
    pub terms: Vec<ModuleHandle>,
    /// differentials[i] maps terms[i+1] into terms[i]
    pub differentials: Vec<Morphism>,
    /// augmentation maps terms[0] onto the target
    pub augmentation: Morphism,
    pub minimal: bool,
}

impl Resolution {
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }
}

/// The symbolic Koszul complex on a subset of the variables. Differential
/// entries are signed variables, encoded as `0` (zero), `v+1` (x_v) or
/// `-(v+1)` (-x_v). Exactness is certified by rank checks after specializing
/// the variables to distinct nonzero rationals.
#[derive(Clone, Debug)]
pub struct KoszulResolution {
    pub field: Field,
    pub vars: usize,
    pub subset: Vec<usize>,
    /// ranks of P_0 .. P_s (binomial coefficients)
    pub ranks: Vec<usize>,
    /// encoded differentials d_1 .. d_s; diffs[j][row][col]
    pub diffs: Vec<Vec<Vec<i64>>>,
}

/// The certificate attached to a finite projective-dimension verdict.
#[derive(Clone, Debug)]
pub enum Certificate {
    Chain(Box<Resolution>),
    Koszul(KoszulResolution),
}

/// The outcome of a projective-dimension computation.
#[derive(Clone, Debug)]
pub enum DimResult {
    Finite { n: usize, certificate: Certificate },
    /// The minimal-resolution syzygy at `period_start` is isomorphic to the
    /// one `period_length` steps later; the dimension is infinite.
    InfiniteCertified { period_start: usize, period_length: usize },
    UnknownAbove { cap: usize },
}

impl DimResult {
    pub fn finite_value(&self) -> Option<usize> {
        match self {
            DimResult::Finite { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, DimResult::InfiniteCertified { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            DimResult::Finite { n, .. } => format!("finite({n})"),
            DimResult::InfiniteCertified { period_start, period_length } => {
                format!("infinite(period {period_length} from {period_start})")
            }
            DimResult::UnknownAbove { cap } => format!("unknown(>{cap})"),
        }
    }
}

/// Default bound on resolution length; every shipped instance certifies or
/// detects periodicity well below it.
pub const DEFAULT_CAP: usize = 32;

// ---------------------------------------------------------------------------
// Exactness certification
// ---------------------------------------------------------------------------

/// Re-verify a resolution end to end: surjective augmentation, composites
/// vanish, kernels match images, and the top differential is injective.
pub fn verify_resolution(res: &Resolution) -> Result<()> {
    match &res.target {
        ModuleHandle::FdRep(_) => verify_resolution_rep(res),
        ModuleHandle::Presentation { .. } => verify_resolution_presentation(res),
        ModuleHandle::Koszul(_) => Err(Error::Unsupported(
            "Koszul resolutions use their own certification".into(),
        )),
    }
}

fn verify_resolution_rep(res: &Resolution) -> Result<()> {
    let dims: Vec<usize> = res
        .terms
        .iter()
        .map(|t| match t {
            ModuleHandle::FdRep(r) => r.dim,
            _ => 0,
        })
        .collect();
    let target_dim = match &res.target {
        ModuleHandle::FdRep(r) => r.dim,
        _ => unreachable!(),
    };
    if linalg::rank(&res.augmentation.map) != target_dim {
        return Err(Error::NotExact("augmentation is not surjective".into()));
    }
    // maps: aug, d1, d2, ...; exactness at P_i: rank d_i + rank d_{i+1} = dim P_i
    let mut maps = vec![&res.augmentation.map];
    for d in &res.differentials {
        maps.push(&d.map);
    }
    for i in 0..res.terms.len() {
        let out_rank = linalg::rank(maps[i]);
        let in_rank = if i + 1 < maps.len() {
            if !maps[i].mul(maps[i + 1]).is_zero() {
                return Err(Error::NotExact(format!("composite at position {i} is nonzero")));
            }
            linalg::rank(maps[i + 1])
        } else {
            0
        };
        if out_rank + in_rank != dims[i] {
            return Err(Error::NotExact(format!(
                "homology at position {i}: {out_rank} + {in_rank} != {}",
                dims[i]
            )));
        }
    }
    Ok(())
}

fn verify_resolution_presentation(res: &Resolution) -> Result<()> {
    let ring = res.target.ring();
    let (gt, full_rt) = match &res.target {
        ModuleHandle::Presentation { gens, rels, .. } => {
            (*gens, full_relations(&ring, *gens, rels))
        }
        _ => unreachable!(),
    };
    let dom = presentation_domain(&ring)?;
    // every term must be free
    for t in &res.terms {
        match t {
            ModuleHandle::Presentation { rels, .. } if rels.cols() == 0 => {}
            _ => return Err(Error::NotExact("terms must be free presentations".into())),
        }
    }
    let aug = &res.augmentation.map;
    // surjectivity
    if gt > 0 && !snf::in_span(&aug.hstack(&full_rt), &Mat::identity(dom, gt)) {
        return Err(Error::NotExact("augmentation is not surjective".into()));
    }
    // module-kernel of each map must equal the image of the next map
    let ranks: Vec<usize> = res
        .terms
        .iter()
        .map(|t| match t {
            ModuleHandle::Presentation { gens, .. } => *gens,
            _ => 0,
        })
        .collect();
    let zero_rels = |i: usize| -> Mat {
        // free modules over QuotientZ still carry the implicit nI relations
        full_relations(&ring, ranks[i], &Mat::zero(dom, ranks[i], 0))
    };
    let mut maps: Vec<&Mat> = vec![aug];
    for d in &res.differentials {
        maps.push(&d.map);
    }
    for i in 0..res.terms.len() {
        let target_rels = if i == 0 { full_rt.clone() } else { zero_rels(i - 1) };
        let kernel = snf::preimage_lattice(maps[i], &target_rels)?;
        let own_rels = zero_rels(i);
        let image = if i + 1 < maps.len() {
            maps[i + 1].hstack(&own_rels)
        } else {
            own_rels.clone()
        };
        if kernel.cols() > 0 && image.cols() > 0 && !snf::in_span(&image, &kernel) {
            return Err(Error::NotExact(format!("kernel exceeds image at position {i}")));
        }
        if kernel.cols() > 0 && image.cols() == 0 && !kernel.is_zero() {
            return Err(Error::NotExact(format!("top map is not injective at {i}")));
        }
        if i + 1 < maps.len() {
            let comp = maps[i].mul(maps[i + 1]);
            let vanishes = if target_rels.cols() == 0 {
                comp.is_zero()
            } else {
                comp.cols() == 0 || snf::in_span(&target_rels, &comp)
            };
            if !vanishes {
                return Err(Error::NotExact(format!("composite at {i} is nonzero")));
            }
        }
    }
    Ok(())
}

/// Homology dimensions of a field-coefficient chain complex, computed the
/// slow direct way. Used as an independent oracle in tests.
pub fn homology_dims(dims: &[usize], maps: &[Mat]) -> Vec<usize> {
    // maps[i]: C_{i+1} -> C_i; homology at C_i = dim ker(maps[i-1]) - rank(maps[i])
    let mut out = Vec::new();
    for i in 0..dims.len() {
        let ker_dim = if i == 0 {
            dims[0]
        } else {
            dims[i] - linalg::rank(&maps[i - 1])
        };
        let im_dim = if i < maps.len() { linalg::rank(&maps[i]) } else { 0 };
        out.push(ker_dim - im_dim);
    }
    out
}

// ---------------------------------------------------------------------------
// Minimal resolutions over finite-dimensional algebras
// ---------------------------------------------------------------------------

/// Radical of a representation: the subspace rad(A) * M, as columns.
pub fn radical_submodule(rep: &FdRep) -> Result<Mat> {
    let alg = rep.algebra();
    let rad = alg.radical()?;
    let dom = Domain::Field(alg.field);
    let mut cols = Mat::zero(dom, rep.dim, 0);
    for j in 0..rad.cols() {
        let r: Vec<Scalar> = (0..alg.dim).map(|i| rad.get(i, j).clone()).collect();
        cols = cols.hstack(&rep.act(&r));
    }
    Ok(linalg::image_basis_field(&cols))
}

/// A projective cover of a representation: a surjection from a direct sum of
/// principal indecomposable projectives whose kernel lies inside the radical
/// of the cover.
pub struct Cover {
    pub projective: Arc<FdRep>,
    /// surjection matrix, dim(M) x dim(P)
    pub map: Mat,
    /// kernel basis, columns in P coordinates
    pub kernel: Mat,
}

pub fn projective_cover(rep: &FdRep) -> Result<Cover> {
    let alg = rep.algebra();
    let dom = Domain::Field(alg.field);
    if rep.dim == 0 {
        let projective = match ModuleHandle::zero_module(&rep.ring)? {
            ModuleHandle::FdRep(p) => p,
            _ => unreachable!(),
        };
        return Ok(Cover {
            projective,
            map: Mat::zero(dom, 0, 0),
            kernel: Mat::zero(dom, 0, 0),
        });
    }
    let idems = alg.primitive_idempotents()?;
    let rad_m = radical_submodule(rep)?;
    let (top, proj_to_top) = module::quotient_rep(rep, &rad_m)?;
    // choose generators: for each idempotent, a lift of a basis of e_i * top
    let mut summands: Vec<(AlgElem, Mat)> = Vec::new(); // (idempotent, generator vector)
    for e in &idems {
        let e_top = linalg::image_basis_field(&top.act(e));
        for j in 0..e_top.cols() {
            let u = e_top.column(j);
            let x = linalg::solve_field(&proj_to_top, &u)
                .ok_or_else(|| Error::Radical("projection is not surjective".into()))?;
            // force the lift into e * M so the cover map is equivariant
            let v = rep.act(e).mul(&x);
            summands.push((e.clone(), v));
        }
    }
    // assemble P = direct sum of the A*e_i and the cover map
    let mut projective: Option<ModuleHandle> = None;
    let mut map_cols: Vec<Mat> = Vec::new();
    for (e, v) in &summands {
        let ideal = left_ideal_rep(&rep.ring, e)?;
        let basis = principal_basis(&rep.ring, e)?;
        for b in 0..basis.cols() {
            let elem: Vec<Scalar> = (0..alg.dim).map(|i| basis.get(i, b).clone()).collect();
            map_cols.push(rep.act(&elem).mul(v));
        }
        projective = Some(match projective {
            None => ideal,
            Some(p) => direct_sum(&p, &ideal)?,
        });
    }
    let projective = match projective.unwrap_or(ModuleHandle::zero_module(&rep.ring)?) {
        ModuleHandle::FdRep(p) => p,
        _ => unreachable!(),
    };
    let mut map = Mat::zero(dom, rep.dim, 0);
    for c in &map_cols {
        map = map.hstack(c);
    }
    if map.cols() != projective.dim {
        return Err(Error::Radical("cover assembly shape mismatch".into()));
    }
    // surjectivity
    if linalg::rank(&map) != rep.dim {
        return Err(Error::Radical("cover map is not surjective".into()));
    }
    // equivariance
    let _ = morphism(
        &ModuleHandle::FdRep(projective.clone()),
        &ModuleHandle::FdRep(Arc::new(rep.clone())),
        map.clone(),
    )?;
    // minimality: kernel inside rad(P)
    let (_, kernel) = linalg::rank_and_kernel(&map)?;
    let rad_p = radical_submodule(&projective)?;
    if kernel.cols() > 0 && !linalg::spans_subset(&kernel, &rad_p) {
        return Err(Error::Radical("cover kernel is not inside the radical".into()));
    }
    Ok(Cover { projective, map, kernel })
}

/// The chosen vector-space basis of the left ideal A*e, matching the order
/// used by `left_ideal_rep`.
fn principal_basis(ring: &RingHandle, e: &AlgElem) -> Result<Mat> {
    let alg = ring.as_algebra().unwrap();
    let reg = match module::regular_rep(ring)? {
        ModuleHandle::FdRep(r) => r,
        _ => unreachable!(),
    };
    let re = alg.right_mul_by(e);
    let seed = linalg::image_basis_field(&re);
    Ok(module::invariant_closure(&reg, &seed))
}

/// A representation is projective exactly when its projective cover has a
/// zero kernel.
pub fn is_projective_rep(rep: &FdRep) -> Result<bool> {
    Ok(projective_cover(rep)?.kernel.cols() == 0)
}

/// The short exact sequence 0 -> K -> P -> M -> 0 of a projective cover.
pub fn cover_sequence(m: &ModuleHandle) -> Result<module::Ses> {
    let ModuleHandle::FdRep(rep) = m else {
        return Err(Error::Unsupported("cover sequences need a representation".into()));
    };
    let cover = projective_cover(rep)?;
    let kernel_rep = sub_rep(&cover.projective, &cover.kernel)?;
    let p_handle = ModuleHandle::FdRep(cover.projective.clone());
    let k_handle = ModuleHandle::FdRep(kernel_rep);
    let inj = module::morphism(&k_handle, &p_handle, cover.kernel.clone())?;
    let surj = module::morphism(&p_handle, m, cover.map.clone())?;
    module::make_ses(inj, surj)
}

/// Fingerprint used as a cheap pre-filter for syzygy isomorphism: total
/// dimension plus the dimensions of the radical layer filtration.
fn rep_fingerprint(rep: &FdRep) -> Result<Vec<usize>> {
    let mut out = vec![rep.dim];
    let mut current = Arc::new(rep.clone());
    loop {
        let rad = radical_submodule(&current)?;
        if rad.cols() == 0 {
            break;
        }
        out.push(rad.cols());
        current = sub_rep(&current, &rad)?;
    }
    Ok(out)
}

/// The space of equivariant maps X -> Y, as a basis of flattened matrices.
pub fn hom_space(x: &FdRep, y: &FdRep) -> Result<Mat> {
    let dom = Domain::Field(x.algebra().field);
    let (dx, dy) = (x.dim, y.dim);
    let unknowns = dx * dy; // F[r][k], flat index r * dx + k
    let n_eq = x.action.len() * dy * dx;
    let big = Mat::from_fn(dom, n_eq, unknowns, |eq, u| {
        let i = eq / (dy * dx);
        let rc = eq % (dy * dx);
        let (r, c) = (rc / dx, rc % dx);
        let (fr, fk) = (u / dx, u % dx);
        // equation: sum_k F[r][k] X_i[k][c] - sum_k Y_i[r][k] F[k][c] = 0
        let mut v = dom.zero();
        if fr == r {
            v = v.add(x.action[i].get(fk, c));
        }
        if fk == c {
            v = v.sub(y.action[i].get(r, fr));
        }
        v
    });
    let (_, ker) = linalg::rank_and_kernel(&big)?;
    Ok(ker)
}

fn unflatten(dom: Domain, col: &Mat, dy: usize, dx: usize) -> Mat {
    Mat::from_fn(dom, dy, dx, |r, c| col.get(r * dx + c, 0).clone())
}

/// Search for an explicit isomorphism X -> Y: an invertible element of the
/// Hom space. Deterministic seeded search; `None` means no isomorphism was
/// found (not a proof of non-isomorphism).
pub fn find_iso(x: &FdRep, y: &FdRep) -> Result<Option<Mat>> {
    if x.dim != y.dim {
        return Ok(None);
    }
    if x.dim == 0 {
        return Ok(Some(Mat::zero(Domain::Field(x.algebra().field), 0, 0)));
    }
    let dom = Domain::Field(x.algebra().field);
    let homs = hom_space(x, y)?;
    if homs.cols() == 0 {
        return Ok(None);
    }
    let check = |f: &Mat| linalg::rank(f) == x.dim;
    for j in 0..homs.cols() {
        let f = unflatten(dom, &homs.column(j), y.dim, x.dim);
        if check(&f) {
            return Ok(Some(f));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1D);
    for _ in 0..200 {
        let mut col = Mat::zero(dom, homs.rows(), 1);
        for j in 0..homs.cols() {
            let c = dom.from_i64(rng.gen_range(-3i64..=3));
            col = col.add(&homs.column(j).scale(&c));
        }
        let f = unflatten(dom, &col, y.dim, x.dim);
        if check(&f) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Build the minimal projective resolution of a representation, stopping at
/// a zero syzygy (finite dimension), a repeated syzygy isomorphism class
/// (certified infinite dimension), or the cap.
pub fn minimal_resolution(rep: &Arc<FdRep>, cap: usize) -> Result<DimResult> {
    let mut terms: Vec<ModuleHandle> = Vec::new();
    let mut diffs: Vec<Morphism> = Vec::new();
    let mut augmentation: Option<Morphism> = None;
    let mut syzygies: Vec<(Arc<FdRep>, Vec<usize>)> = Vec::new();
    let mut current = rep.clone();
    // inclusion of the current syzygy into the previous cover, in the
    // previous cover's coordinates
    let mut prev_kernel_basis: Option<Mat> = None;
    let mut prev_term: Option<ModuleHandle> = None;
    for step in 0..=cap {
        let cover = projective_cover(&current)?;
        let p = ModuleHandle::FdRep(cover.projective.clone());
        // differential into the previous cover: kernel inclusion composed
        // with this cover's surjection
        match (&prev_kernel_basis, &prev_term) {
            (Some(kb), Some(pt)) => {
                let d = kb.mul(&cover.map);
                diffs.push(morphism(&p, pt, d)?);
            }
            _ => {
                augmentation = Some(morphism(
                    &p,
                    &ModuleHandle::FdRep(rep.clone()),
                    cover.map.clone(),
                )?);
            }
        }
        terms.push(p.clone());
        if cover.kernel.cols() == 0 {
            let res = Resolution {
                target: ModuleHandle::FdRep(rep.clone()),
                terms,
                differentials: diffs,
                augmentation: augmentation.unwrap(),
                minimal: true,
            };
            verify_resolution(&res)?;
            return Ok(DimResult::Finite { n: step, certificate: Certificate::Chain(Box::new(res)) });
        }
        let syz = sub_rep(&cover.projective, &cover.kernel)?;
        let fp = rep_fingerprint(&syz)?;
        for (idx, (prev, pfp)) in syzygies.iter().enumerate() {
            if *pfp == fp && find_iso(prev, &syz)?.is_some() {
                return Ok(DimResult::InfiniteCertified {
                    period_start: idx + 1,
                    period_length: step + 1 - (idx + 1),
                });
            }
        }
        syzygies.push((syz.clone(), fp));
        prev_kernel_basis = Some(cover.kernel.clone());
        prev_term = Some(p);
        current = syz;
    }
    Ok(DimResult::UnknownAbove { cap })
}

/// A minimal resolution truncated after a fixed number of steps, used by the
/// derived functors (which need the complex through a given degree whether
/// or not the full resolution terminates).
pub struct PartialResolution {
    pub terms: Vec<Arc<FdRep>>,
    /// diffs[i] is the matrix of terms[i+1] -> terms[i]
    pub diffs: Vec<Mat>,
    pub augmentation: Mat,
    /// true when the final kernel is zero, so the complex is the whole
    /// minimal resolution
    pub complete: bool,
}

/// The first `steps + 1` terms of the minimal resolution (or fewer if it
/// terminates early).
pub fn minimal_steps(rep: &Arc<FdRep>, steps: usize) -> Result<PartialResolution> {
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    let mut augmentation = None;
    let mut current = rep.clone();
    let mut prev_kernel: Option<Mat> = None;
    let mut complete = false;
    for _ in 0..=steps {
        let cover = projective_cover(&current)?;
        match &prev_kernel {
            Some(kb) => diffs.push(kb.mul(&cover.map)),
            None => augmentation = Some(cover.map.clone()),
        }
        terms.push(cover.projective.clone());
        if cover.kernel.cols() == 0 {
            complete = true;
            break;
        }
        let syz = sub_rep(&cover.projective, &cover.kernel)?;
        prev_kernel = Some(cover.kernel.clone());
        current = syz;
    }
    Ok(PartialResolution {
        terms,
        diffs,
        augmentation: augmentation.unwrap(),
        complete,
    })
}

// ---------------------------------------------------------------------------
// Resolutions over the Euclidean backends
// ---------------------------------------------------------------------------

/// Length <= 1 resolution of a finitely presented module over a PID-type
/// backend, via Smith normal form. Length 0 exactly when the module is free.
pub fn pid_resolution(m: &ModuleHandle) -> Result<Resolution> {
    let ModuleHandle::Presentation { ring, gens, rels } = m else {
        return Err(Error::Unsupported("pid resolution needs a presentation".into()));
    };
    if matches!(ring, RingHandle::QuotientZ(_)) {
        return Err(Error::UnsupportedDomain(Domain::Int));
    }
    let dom = presentation_domain(ring)?;
    let s = snf::smith_normal_form(rels)?;
    let diag = s.diagonal();
    let nonunit: Vec<usize> = (0..s.rank).filter(|&i| !diag[i].is_unit()).collect();
    if nonunit.is_empty() {
        // free module: augment from a free module of the right rank via the
        // columns of U^{-1} past the rank
        let fr = gens - s.rank;
        let p0 = ModuleHandle::free(ring, fr)?;
        let aug_map = Mat::from_fn(dom, *gens, fr, |i, j| s.u_inv.get(i, s.rank + j).clone());
        let aug = morphism(&p0, m, aug_map)?;
        let res = Resolution {
            target: m.clone(),
            terms: vec![p0],
            differentials: vec![],
            augmentation: aug,
            minimal: true,
        };
        verify_resolution(&res)?;
        return Ok(res);
    }
    // torsion present: 0 -> R^rank -> R^gens -> M -> 0, with the injection
    // given by the independent relation columns U^{-1} D
    let p0 = ModuleHandle::free(ring, *gens)?;
    let p1 = ModuleHandle::free(ring, s.rank)?;
    let d1_map = Mat::from_fn(dom, *gens, s.rank, |i, j| s.u_inv.get(i, j).mul(&diag[j]));
    let aug = morphism(&p0, m, Mat::identity(dom, *gens))?;
    let d1 = morphism(&p1, &p0, d1_map)?;
    let res = Resolution {
        target: m.clone(),
        terms: vec![p0, p1],
        differentials: vec![d1],
        augmentation: aug,
        minimal: false,
    };
    verify_resolution(&res)?;
    Ok(res)
}

/// Invariant factors of a Z/n module, split into the free part (factors
/// equal to n) and the genuinely torsion part.
pub(crate) fn quotient_z_invariants(n: u64, gens: usize, rels: &Mat) -> Result<(usize, Vec<BigInt>)> {
    let ring = RingHandle::QuotientZ(n);
    let full = full_relations(&ring, gens, rels);
    let s = snf::smith_normal_form(&full)?;
    let nn = BigInt::from(n);
    let mut free = 0usize;
    let mut torsion = Vec::new();
    for d in s.diagonal() {
        let Scalar::Int(v) = d else { unreachable!() };
        if v == BigInt::from(1) {
            continue;
        }
        if v == nn {
            free += 1;
        } else {
            torsion.push(v);
        }
    }
    Ok((free, torsion))
}

/// Projective dimension over Z/p^k: zero when the module is free, otherwise
/// certified infinite (minimal syzygies over the local ring Z/p^k cycle with
/// period 1 or 2). Non-prime-power moduli with non-free modules are not
/// supported.
fn quotient_z_dimension(n: u64, m: &ModuleHandle, _cap: usize) -> Result<DimResult> {
    let ModuleHandle::Presentation { gens, rels, .. } = m else {
        return Err(Error::Unsupported("Z/n modules are presentations".into()));
    };
    let (free, torsion) = quotient_z_invariants(n, *gens, rels)?;
    let ring = RingHandle::QuotientZ(n);
    if torsion.is_empty() {
        // free, length 0: map the free generators onto the module
        let full = full_relations(&ring, *gens, rels);
        let s = snf::smith_normal_form(&full)?;
        let nn = Domain::Int.from_i64(n as i64);
        let free_cols: Vec<usize> = (0..*gens)
            .filter(|&i| i >= s.rank || s.d.get(i, i) == &nn)
            .collect();
        let p0 = ModuleHandle::free(&ring, free)?;
        let aug_map = Mat::from_fn(Domain::Int, *gens, free, |i, j| {
            s.u_inv.get(i, free_cols[j]).clone()
        });
        let aug = morphism(&p0, m, aug_map)?;
        let res = Resolution {
            target: m.clone(),
            terms: vec![p0],
            differentials: vec![],
            augmentation: aug,
            minimal: true,
        };
        verify_resolution(&res)?;
        return Ok(DimResult::Finite { n: 0, certificate: Certificate::Chain(Box::new(res)) });
    }
    let Some((_p, _k)) = prime_power(n) else {
        return Err(Error::Unsupported(format!(
            "infinite-dimension certification over Z/{n} needs a prime power modulus"
        )));
    };
    // minimal syzygy of (+) Z/d is (+) Z/(n/d); the multiset of torsion
    // factors repeats with period 1 or 2
    let nn = BigInt::from(n);
    let mut shifted: Vec<BigInt> = torsion.iter().map(|d| &nn / d).collect();
    shifted.sort();
    let mut sorted = torsion.clone();
    sorted.sort();
    let period_length = if shifted == sorted { 1 } else { 2 };
    Ok(DimResult::InfiniteCertified { period_start: 1, period_length })
}

pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            return if m == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

// ---------------------------------------------------------------------------
// Koszul resolutions
// ---------------------------------------------------------------------------

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut out = 1usize;
    for i in 0..k.min(n - k) {
        out = out * (n - i) / (i + 1);
    }
    out
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets_of_size(&items[i + 1..], k - 1) {
            let mut s = vec![x];
            s.append(&mut rest);
            out.push(s);
        }
    }
    out
}

/// The Koszul complex on a subset of the variables: the exterior-algebra
/// complex resolving the cyclic quotient by those variables. Certified by
/// rank checks after specializing the variables to distinct nonzero
/// rationals.
pub fn koszul_resolution(field: Field, vars: usize, subset: &[usize]) -> Result<KoszulResolution> {
    let mut subset: Vec<usize> = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    if subset.iter().any(|&v| v >= vars) {
        return Err(Error::Precondition("variable index out of range".into()));
    }
    let s = subset.len();
    let ranks: Vec<usize> = (0..=s).map(|j| binomial(s, j)).collect();
    let mut diffs = Vec::new();
    for j in 1..=s {
        let rows = subsets_of_size(&subset, j - 1);
        let cols = subsets_of_size(&subset, j);
        let mut d = vec![vec![0i64; cols.len()]; rows.len()];
        for (ci, col) in cols.iter().enumerate() {
            for (t, &v) in col.iter().enumerate() {
                let mut reduced = col.clone();
                reduced.remove(t);
                let ri = rows.iter().position(|r| *r == reduced).unwrap();
                let sign = if t % 2 == 0 { 1 } else { -1 };
                d[ri][ci] = sign * (v as i64 + 1);
            }
        }
        diffs.push(d);
    }
    let res = KoszulResolution { field, vars, subset, ranks, diffs };
    verify_koszul(&res)?;
    Ok(res)
}

/// Specialize the encoded differentials at x_v = v + 2 over the rationals
/// and check the exactness rank conditions.
pub fn verify_koszul(res: &KoszulResolution) -> Result<()> {
    let dom = Domain::Field(Field::Rational);
    let value = |code: i64| -> Scalar {
        if code == 0 {
            dom.zero()
        } else {
            let v = code.unsigned_abs() as i64 - 1;
            let x = dom.from_i64(v + 2);
            if code > 0 { x } else { x.neg() }
        }
    };
    let mats: Vec<Mat> = res
        .diffs
        .iter()
        .map(|d| {
            let rows = d.len();
            let cols = if rows > 0 { d[0].len() } else { 0 };
            Mat::from_fn(dom, rows, cols, |i, j| value(d[i][j]))
        })
        .collect();
    let s = res.subset.len();
    if s == 0 {
        // the empty-subset quotient is the ring itself; nothing to check
        return Ok(());
    }
    // the specialized ideal is the unit ideal, so the quotient vanishes and
    // the specialized complex is exact everywhere:
    // rank(d_j) + rank(d_{j+1}) = rank(P_j), with no outgoing rank at P_0
    for j in 0..=s {
        let out_rank = if j == 0 { 0 } else { linalg::rank(&mats[j - 1]) };
        let in_rank = if j < s { linalg::rank(&mats[j]) } else { 0 };
        if out_rank + in_rank != res.ranks[j] {
            return Err(Error::NotExact(format!(
                "specialized Koszul complex fails at position {j}"
            )));
        }
        if j >= 1 && j < s && !mats[j - 1].mul(&mats[j]).is_zero() {
            return Err(Error::NotExact(format!("Koszul composite at {j} is nonzero")));
        }
    }
    Ok(())
}

/// Projective dimension of a Koszul module: s - shift for the shift-th
/// syzygy of the quotient by s variables (zero once the shift reaches s).
pub fn koszul_dimension(k: &KoszulModule) -> Result<DimResult> {
    let res = koszul_resolution(k.field, k.vars, &k.subset)?;
    let s = res.subset.len();
    let n = s.saturating_sub(k.shift);
    Ok(DimResult::Finite { n, certificate: Certificate::Koszul(res) })
}

// ---------------------------------------------------------------------------
// Dispatch: projective dimension, FPR membership, syzygies
// ---------------------------------------------------------------------------

/// Projective dimension of a module, dispatching on the backend.
pub fn projective_dimension(m: &ModuleHandle, cap: usize) -> Result<DimResult> {
    match m {
        ModuleHandle::FdRep(rep) => minimal_resolution(rep, cap),
        ModuleHandle::Koszul(k) => koszul_dimension(k),
        ModuleHandle::Presentation { ring, .. } => match ring {
            RingHandle::QuotientZ(n) => quotient_z_dimension(*n, m, cap),
            _ => {
                let res = pid_resolution(m)?;
                let n = res.length();
                Ok(DimResult::Finite { n, certificate: Certificate::Chain(Box::new(res)) })
            }
        },
    }
}

/// FPR membership: does the module admit a finite resolution by finitely
/// generated projectives?
#[derive(Clone, Debug)]
pub enum FprVerdict {
    Yes(Certificate),
    No { period_start: usize, period_length: usize },
    Unknown { cap: usize },
}

impl FprVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, FprVerdict::Yes(_))
    }
    pub fn is_no(&self) -> bool {
        matches!(self, FprVerdict::No { .. })
    }
}

pub fn fpr_membership(m: &ModuleHandle, cap: usize) -> Result<FprVerdict> {
    Ok(match projective_dimension(m, cap)? {
        DimResult::Finite { certificate, .. } => FprVerdict::Yes(certificate),
        DimResult::InfiniteCertified { period_start, period_length } => {
            FprVerdict::No { period_start, period_length }
        }
        DimResult::UnknownAbove { cap } => FprVerdict::Unknown { cap },
    })
}

/// The k-th syzygy of a module in its backend's canonical resolution.
pub fn syzygy(m: &ModuleHandle, k: usize) -> Result<ModuleHandle> {
    if k == 0 {
        return Ok(m.clone());
    }
    match m {
        ModuleHandle::FdRep(rep) => {
            let mut current = rep.clone();
            for _ in 0..k {
                let cover = projective_cover(&current)?;
                current = sub_rep(&cover.projective, &cover.kernel)?;
            }
            Ok(ModuleHandle::FdRep(current))
        }
        ModuleHandle::Koszul(km) => Ok(ModuleHandle::Koszul(KoszulModule {
            shift: km.shift + k,
            ..km.clone()
        })),
        ModuleHandle::Presentation { ring, gens, rels } => match ring {
            RingHandle::QuotientZ(n) => {
                let (_, mut torsion) = quotient_z_invariants(*n, *gens, rels)?;
                let nn = BigInt::from(*n);
                for _ in 0..k {
                    torsion = torsion.iter().map(|d| &nn / d).collect();
                    torsion.retain(|d| *d != nn && *d != BigInt::from(1));
                }
                let g = torsion.len();
                let diag = Mat::from_fn(Domain::Int, g, g, |i, j| {
                    if i == j { Scalar::Int(torsion[i].clone()) } else { Domain::Int.zero() }
                });
                presentation(ring, g, diag)
            }
            _ => {
                if k >= 2 {
                    return ModuleHandle::zero_module(ring);
                }
                let full = full_relations(ring, *gens, rels);
                let s = snf::smith_normal_form(&full)?;
                ModuleHandle::free(ring, s.rank)
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Horseshoe
// ---------------------------------------------------------------------------

/// The Horseshoe construction: given resolutions of the outer terms of a
/// short exact sequence, build a resolution of the middle term whose terms
/// are the direct sums, by lifting comparison maps through surjections.
pub fn horseshoe(ses: &Ses, res_a: &Resolution, res_c: &Resolution) -> Result<Resolution> {
    if res_a.target != *ses.a() || res_c.target != *ses.c() {
        return Err(Error::Precondition("resolutions do not match the sequence ends".into()));
    }
    match ses.b() {
        ModuleHandle::FdRep(_) => horseshoe_rep(ses, res_a, res_c),
        ModuleHandle::Presentation { .. } => horseshoe_presentation(ses, res_a, res_c),
        _ => Err(Error::Unsupported("horseshoe over this backend".into())),
    }
}

fn rep_of(m: &ModuleHandle) -> &Arc<FdRep> {
    match m {
        ModuleHandle::FdRep(r) => r,
        _ => unreachable!(),
    }
}

/// Solve `through * theta = rhs` for a module homomorphism theta: src -> dst
/// (projectivity of `src` guarantees a solution whenever the image condition
/// holds). The equivariance constraints are folded into the linear system.
fn lift_through(through: &Mat, rhs: &Mat, src: &FdRep, dst: &FdRep) -> Result<Mat> {
    let dom = Domain::Field(src.algebra().field);
    let (dc, da) = (src.dim, dst.dim);
    let unknowns = da * dc; // theta[r][c], flat index r * dc + c
    let lift_eqs = through.rows() * dc;
    let equiv_eqs = src.action.len() * da * dc;
    let big = Mat::from_fn(dom, lift_eqs + equiv_eqs, unknowns, |eq, u| {
        let (fr, fc) = (u / dc, u % dc);
        if eq < lift_eqs {
            let (i, j) = (eq / dc, eq % dc);
            // sum_r through[i][r] theta[r][j]
            if fc == j { through.get(i, fr).clone() } else { dom.zero() }
        } else {
            let e = eq - lift_eqs;
            let b = e / (da * dc);
            let rc = e % (da * dc);
            let (r, c) = (rc / dc, rc % dc);
            // sum_k theta[r][k] srcAct[k][c] - sum_k dstAct[r][k] theta[k][c]
            let mut v = dom.zero();
            if fr == r {
                v = v.add(src.action[b].get(fc, c));
            }
            if fc == c {
                v = v.sub(dst.action[b].get(r, fr));
            }
            v
        }
    });
    let target = Mat::from_fn(dom, lift_eqs + equiv_eqs, 1, |eq, _| {
        if eq < lift_eqs {
            rhs.get(eq / dc, eq % dc).clone()
        } else {
            dom.zero()
        }
    });
    let sol = linalg::solve_field(&big, &target)
        .ok_or_else(|| Error::NotExact("equivariant lift does not exist".into()))?;
    Ok(Mat::from_fn(dom, da, dc, |r, c| sol.get(r * dc + c, 0).clone()))
}

fn horseshoe_rep(ses: &Ses, res_a: &Resolution, res_c: &Resolution) -> Result<Resolution> {
    let ring = ses.b().ring();
    let dom = Domain::Field(ring.base_field().unwrap());
    let len = res_a.terms.len().max(res_c.terms.len());
    let zero = ModuleHandle::zero_module(&ring)?;
    let term_at = |res: &Resolution, i: usize| -> ModuleHandle {
        res.terms.get(i).cloned().unwrap_or_else(|| zero.clone())
    };
    let map_at = |res: &Resolution, i: usize| -> Mat {
        // map out of terms[i]: augmentation for i = 0, differential above
        if i == 0 {
            res.augmentation.map.clone()
        } else {
            res.differentials
                .get(i - 1)
                .map(|d| d.map.clone())
                .unwrap_or_else(|| {
                    let rows = rep_of(&term_at(res, i - 1)).dim;
                    Mat::zero(dom, rows, 0)
                })
        }
    };
    let mut terms = Vec::new();
    let mut thetas: Vec<Mat> = Vec::new(); // theta_i : C_i -> (A_{i-1} or B)
    let mut diffs: Vec<Morphism> = Vec::new();
    let mut augmentation = None;
    for i in 0..len {
        let pa = term_at(res_a, i);
        let pc = term_at(res_c, i);
        let term = direct_sum(&pa, &pc)?;
        let (da, dc) = (map_at(res_a, i), map_at(res_c, i));
        let dim_pa = rep_of(&pa).dim;
        if i == 0 {
            // theta_0 : C_0 -> B lifting the augmentation of C through the
            // surjection B -> C, as a module map
            let theta = lift_through(&ses.surj.map, &dc, rep_of(&pc), rep_of(ses.b()))?;
            let left = ses.inj.map.mul(&da);
            let aug_map = left.hstack(&theta);
            augmentation = Some(morphism(&term, ses.b(), aug_map)?);
            thetas.push(theta);
        } else {
            // solve prev_out * theta_i = -(theta_{i-1} * d_i^C); prev_out is
            // iota . augA for i = 1 and d_{i-1}^A above
            let rhs = thetas[i - 1].mul(&dc).neg();
            let prev_out = if i == 1 {
                ses.inj.map.mul(&map_at(res_a, 0))
            } else {
                map_at(res_a, i - 1)
            };
            let dst = term_at(res_a, i - 1);
            let theta = lift_through(&prev_out, &rhs, rep_of(&pc), rep_of(&dst))?;
            let prev_dim_pa = rep_of(&term_at(res_a, i - 1)).dim;
            let prev_dim_pc = rep_of(&term_at(res_c, i - 1)).dim;
            let top = da.hstack(&theta);
            let bottom = Mat::zero(dom, prev_dim_pc, dim_pa).hstack(&dc);
            debug_assert_eq!(top.rows(), prev_dim_pa);
            let d = top.vstack(&bottom);
            diffs.push(morphism(&term, &terms[i - 1], d)?);
            thetas.push(theta);
        }
        terms.push(term);
    }
    let res = Resolution {
        target: ses.b().clone(),
        terms,
        differentials: diffs,
        augmentation: augmentation.unwrap(),
        minimal: false,
    };
    verify_resolution(&res)?;
    Ok(res)
}

fn horseshoe_presentation(ses: &Ses, res_a: &Resolution, res_c: &Resolution) -> Result<Resolution> {
    let ring = ses.b().ring();
    let dom = presentation_domain(&ring)?;
    let gens_of = |m: &ModuleHandle| -> usize {
        match m {
            ModuleHandle::Presentation { gens, .. } => *gens,
            _ => 0,
        }
    };
    let (gb, full_rb) = match ses.b() {
        ModuleHandle::Presentation { gens, rels, .. } => {
            (*gens, full_relations(&ring, *gens, rels))
        }
        _ => unreachable!(),
    };
    let (_gc, full_rc) = match ses.c() {
        ModuleHandle::Presentation { gens, rels, .. } => {
            (*gens, full_relations(&ring, *gens, rels))
        }
        _ => unreachable!(),
    };
    // theta_0 : generators of P_0^C lifted through B -> C
    let aug_c = &res_c.augmentation.map; // gc x rank(P0C)
    let mut theta0 = Mat::zero(dom, gb, 0);
    for j in 0..aug_c.cols() {
        let target = aug_c.column(j);
        let sys = ses.surj.map.hstack(&full_rc);
        let sol = match snf::solve(&sys, &target)? {
            Ok(x) => x,
            Err(_) => return Err(Error::NotExact("horseshoe lift failed at step 0".into())),
        };
        let x = Mat::from_fn(dom, gb, 1, |i, _| sol.get(i, 0).clone());
        theta0 = theta0.hstack(&x);
    }
    let p0 = direct_sum(&res_a.terms[0], &res_c.terms[0])?;
    let aug_map = ses.inj.map.mul(&res_a.augmentation.map).hstack(&theta0);
    let aug = morphism(&p0, ses.b(), aug_map)?;
    let len = res_a.terms.len().max(res_c.terms.len());
    if len == 1 {
        let res = Resolution {
            target: ses.b().clone(),
            terms: vec![p0],
            differentials: vec![],
            augmentation: aug,
            minimal: false,
        };
        verify_resolution(&res)?;
        return Ok(res);
    }
    let zero_free = ModuleHandle::free(&ring, 0)?;
    let p1a = res_a.terms.get(1).cloned().unwrap_or_else(|| zero_free.clone());
    let p1c = res_c.terms.get(1).cloned().unwrap_or_else(|| zero_free.clone());
    let p1 = direct_sum(&p1a, &p1c)?;
    let d1a = res_a
        .differentials
        .first()
        .map(|d| d.map.clone())
        .unwrap_or_else(|| Mat::zero(dom, gens_of(&res_a.terms[0]), 0));
    let d1c = res_c
        .differentials
        .first()
        .map(|d| d.map.clone())
        .unwrap_or_else(|| Mat::zero(dom, gens_of(&res_c.terms[0]), 0));
    // theta_1 : solve inj * theta_1 = -(theta_0 * d1C) modulo rels(B)
    let rhs = theta0.mul(&d1c).neg();
    let mut theta1 = Mat::zero(dom, gens_of(&res_a.terms[0]), 0);
    let ga0 = gens_of(&res_a.terms[0]);
    for j in 0..rhs.cols() {
        let sys = ses.inj.map.mul(&res_a.augmentation.map).hstack(&full_rb);
        let sol = match snf::solve(&sys, &rhs.column(j))? {
            Ok(x) => x,
            Err(_) => return Err(Error::NotExact("horseshoe lift failed at step 1".into())),
        };
        let x = Mat::from_fn(dom, ga0, 1, |i, _| sol.get(i, 0).clone());
        theta1 = theta1.hstack(&x);
    }
    let top = d1a.hstack(&theta1);
    let bottom = Mat::zero(dom, gens_of(&res_c.terms[0]), d1a.cols()).hstack(&d1c);
    let d1 = top.vstack(&bottom);
    let d1m = morphism(&p1, &p0, d1)?;
    let res = Resolution {
        target: ses.b().clone(),
        terms: vec![p0, p1],
        differentials: vec![d1m],
        augmentation: aug,
        minimal: false,
    };
    verify_resolution(&res)?;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{make_fd_rep, make_ses, random_rep_ses, random_ses};
    use crate::ring::{assemble_triangular, dual_numbers, field_as_algebra, BimoduleData};

    fn z() -> RingHandle {
        RingHandle::Integers
    }

    #[test]
    fn pid_resolution_of_z_mod_4() {
        let m = presentation(&z(), 1, Mat::from_i64(Domain::Int, &[&[4]])).unwrap();
        let res = pid_resolution(&m).unwrap();
        assert_eq!(res.length(), 1);
        let pd = projective_dimension(&m, DEFAULT_CAP).unwrap();
        assert_eq!(pd.finite_value(), Some(1));
    }

    #[test]
    fn pid_resolution_of_free_is_length_zero() {
        let m = ModuleHandle::free(&z(), 3).unwrap();
        assert_eq!(pid_resolution(&m).unwrap().length(), 0);
        // a presentation of a free module with redundant generators
        let m2 = presentation(&z(), 2, Mat::from_i64(Domain::Int, &[&[1], &[0]])).unwrap();
        assert_eq!(pid_resolution(&m2).unwrap().length(), 0);
    }

    #[test]
    fn pid_resolution_over_poly_ring() {
        let ring = RingHandle::PolyPid(Field::Rational);
        let x = crate::scalar::poly_from_coeffs(Field::Rational, &[0, 1]);
        let rels = Mat::from_fn(Domain::Poly(Field::Rational), 1, 1, |_, _| x.clone());
        let m = presentation(&ring, 1, rels).unwrap();
        let res = pid_resolution(&m).unwrap();
        assert_eq!(res.length(), 1);
    }

    #[test]
    fn dual_numbers_simple_has_certified_infinite_dimension() {
        for field in [Field::Rational, Field::Prime(2), Field::Prime(3)] {
            let a = dual_numbers(field);
            let ring = RingHandle::FdAlgebra(a.clone());
            // the simple module k: epsilon acts as zero
            let dom = Domain::Field(field);
            let action = vec![Mat::identity(dom, 1), Mat::zero(dom, 1, 1)];
            let k = make_fd_rep(&ring, action).unwrap();
            match minimal_resolution(&k, DEFAULT_CAP).unwrap() {
                DimResult::InfiniteCertified { period_start, period_length } => {
                    assert_eq!(period_start, 1);
                    assert_eq!(period_length, 1);
                }
                other => panic!("expected certified infinite dimension, got {}", other.describe()),
            }
        }
    }

    #[test]
    fn projective_rep_has_dimension_zero() {
        let a = dual_numbers(Field::Rational);
        let ring = RingHandle::FdAlgebra(a);
        let free = match ModuleHandle::free(&ring, 2).unwrap() {
            ModuleHandle::FdRep(r) => r,
            _ => unreachable!(),
        };
        assert!(is_projective_rep(&free).unwrap());
        let pd = minimal_resolution(&free, DEFAULT_CAP).unwrap();
        assert_eq!(pd.finite_value(), Some(0));
    }

    fn example_t() -> Arc<crate::ring::TriangularData> {
        let r = dual_numbers(Field::Rational);
        let s = field_as_algebra(Field::Rational);
        let bim = BimoduleData::regular_over_field(&r);
        Arc::new(assemble_triangular("T", r, s, bim).unwrap())
    }

    fn module_l(t: &Arc<crate::ring::TriangularData>) -> Arc<FdRep> {
        // L = (0, S, 0): the simple at the right corner
        let s_reg = match module::regular_rep(&RingHandle::FdAlgebra(t.right.clone())).unwrap() {
            ModuleHandle::FdRep(rep) => rep,
            _ => unreachable!(),
        };
        module::triple_module(
            t,
            &module::Triple {
                a: make_fd_rep(
                    &RingHandle::FdAlgebra(t.left.clone()),
                    vec![Mat::zero(Domain::Field(Field::Rational), 0, 0); 2],
                )
                .unwrap(),
                b: s_reg,
                phi: vec![Mat::zero(Domain::Field(Field::Rational), 0, 1); 2],
            },
        )
        .unwrap()
    }

    #[test]
    fn example_triangular_l_has_dimension_one() {
        // L = (0, S, 0) over T = (R R; 0 k), R = k[e]/(e^2): pd_T(L) = 1
        let t = example_t();
        let l = module_l(&t);
        let pd = minimal_resolution(&l, DEFAULT_CAP).unwrap();
        assert_eq!(pd.finite_value(), Some(1));
        // the resolution terms are the two principal projectives: P2 (dim 3)
        // covering L and P1 (dim 2) as the syzygy
        if let DimResult::Finite { certificate: Certificate::Chain(res), .. } = pd {
            let dims: Vec<usize> = res
                .terms
                .iter()
                .map(|t| match t {
                    ModuleHandle::FdRep(r) => r.dim,
                    _ => 0,
                })
                .collect();
            assert_eq!(dims, vec![3, 2]);
        } else {
            panic!("expected a chain certificate");
        }
    }

    #[test]
    fn syzygy_examples() {
        // syzygy(Z/2, 1) is free of rank 1
        let m2 = presentation(&z(), 1, Mat::from_i64(Domain::Int, &[&[2]])).unwrap();
        let s1 = syzygy(&m2, 1).unwrap();
        match &s1 {
            ModuleHandle::Presentation { gens, rels, .. } => {
                assert_eq!(*gens, 1);
                assert_eq!(rels.cols(), 0);
            }
            _ => panic!(),
        }
        // syzygy of the simple over dual numbers is the simple again
        let a = dual_numbers(Field::Prime(2));
        let ring = RingHandle::FdAlgebra(a);
        let dom = Domain::Field(Field::Prime(2));
        let k = make_fd_rep(&ring, vec![Mat::identity(dom, 1), Mat::zero(dom, 1, 1)]).unwrap();
        let s = syzygy(&ModuleHandle::FdRep(k.clone()), 1).unwrap();
        match &s {
            ModuleHandle::FdRep(r) => {
                assert_eq!(r.dim, 1);
                assert!(find_iso(&k, r).unwrap().is_some());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn koszul_resolution_ranks_and_certification() {
        let r = koszul_resolution(Field::Rational, 2, &[0, 1]).unwrap();
        assert_eq!(r.ranks, vec![1, 2, 1]);
        let r3 = koszul_resolution(Field::Rational, 3, &[0, 1, 2]).unwrap();
        assert_eq!(r3.ranks, vec![1, 3, 3, 1]);
        let r0 = koszul_resolution(Field::Rational, 2, &[]).unwrap();
        assert_eq!(r0.ranks, vec![1]);
    }

    #[test]
    fn koszul_dimension_formula() {
        let k = KoszulModule { field: Field::Rational, vars: 3, subset: vec![0, 1, 2], shift: 0 };
        assert_eq!(koszul_dimension(&k).unwrap().finite_value(), Some(3));
        let s1 = KoszulModule { shift: 1, ..k.clone() };
        assert_eq!(koszul_dimension(&s1).unwrap().finite_value(), Some(2));
        let s5 = KoszulModule { shift: 5, ..k };
        assert_eq!(koszul_dimension(&s5).unwrap().finite_value(), Some(0));
    }

    #[test]
    fn quotient_z_dimensions() {
        let ring = RingHandle::QuotientZ(4);
        // Z/2 over Z/4: certified infinite with period 1
        let m = presentation(&ring, 1, Mat::from_i64(Domain::Int, &[&[2]])).unwrap();
        match projective_dimension(&m, DEFAULT_CAP).unwrap() {
            DimResult::InfiniteCertified { period_start, period_length } => {
                assert_eq!((period_start, period_length), (1, 1));
            }
            other => panic!("expected infinite, got {}", other.describe()),
        }
        // Z/8 case with period 2: Z/2 over Z/8 has syzygy Z/4
        let ring8 = RingHandle::QuotientZ(8);
        let m8 = presentation(&ring8, 1, Mat::from_i64(Domain::Int, &[&[2]])).unwrap();
        match projective_dimension(&m8, DEFAULT_CAP).unwrap() {
            DimResult::InfiniteCertified { period_length, .. } => assert_eq!(period_length, 2),
            other => panic!("expected infinite, got {}", other.describe()),
        }
        // free over Z/4
        let f = ModuleHandle::free(&ring, 2).unwrap();
        assert_eq!(projective_dimension(&f, DEFAULT_CAP).unwrap().finite_value(), Some(0));
    }

    #[test]
    fn horseshoe_z2_z6_z3() {
        // 0 -> Z/2 -> Z/6 -> Z/3 -> 0
        let m2 = presentation(&z(), 1, Mat::from_i64(Domain::Int, &[&[2]])).unwrap();
        let m6 = presentation(&z(), 1, Mat::from_i64(Domain::Int, &[&[6]])).unwrap();
        let m3 = presentation(&z(), 1, Mat::from_i64(Domain::Int, &[&[3]])).unwrap();
        let inj = morphism(&m2, &m6, Mat::from_i64(Domain::Int, &[&[3]])).unwrap();
        let surj = morphism(&m6, &m3, Mat::from_i64(Domain::Int, &[&[1]])).unwrap();
        let ses = make_ses(inj, surj).unwrap();
        let res_a = pid_resolution(&m2).unwrap();
        let res_c = pid_resolution(&m3).unwrap();
        let res_b = horseshoe(&ses, &res_a, &res_c).unwrap();
        assert_eq!(res_b.length(), 1);
        let ranks: Vec<usize> = res_b
            .terms
            .iter()
            .map(|t| match t {
                ModuleHandle::Presentation { gens, .. } => *gens,
                _ => 0,
            })
            .collect();
        assert_eq!(ranks, vec![2, 2]);
    }

    #[test]
    fn horseshoe_random_over_pids() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for ring in [RingHandle::Integers, RingHandle::PolyPid(Field::Prime(5))] {
            for _ in 0..8 {
                let ses = random_ses(&ring, &mut rng, 3, 2).unwrap();
                let res_a = pid_resolution(ses.a()).unwrap();
                let res_c = pid_resolution(ses.c()).unwrap();
                let res_b = horseshoe(&ses, &res_a, &res_c).unwrap();
                assert!(res_b.length() <= res_a.length().max(res_c.length()));
            }
        }
    }

    #[test]
    fn horseshoe_random_over_triangular() {
        let r = dual_numbers(Field::Prime(2));
        let s = field_as_algebra(Field::Prime(2));
        let bim = BimoduleData::regular_over_field(&r);
        let t = Arc::new(assemble_triangular("T", r, s, bim).unwrap());
        let ring = RingHandle::Triangular(t);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..6 {
            let ses = random_rep_ses(&ring, &mut rng, 2, 1).unwrap();
            let cap = 6;
            let (ra, rc) = (
                minimal_resolution(rep_of(ses.a()), cap).unwrap(),
                minimal_resolution(rep_of(ses.c()), cap).unwrap(),
            );
            if let (
                DimResult::Finite { certificate: Certificate::Chain(res_a), .. },
                DimResult::Finite { certificate: Certificate::Chain(res_c), .. },
            ) = (ra, rc)
            {
                let res_b = horseshoe(&ses, &res_a, &res_c).unwrap();
                assert!(res_b.length() <= res_a.length().max(res_c.length()));
            }
        }
    }

    #[test]
    fn homology_oracle_agrees_on_a_resolution() {
        // the augmented minimal resolution of L over T has zero homology
        // everywhere, re-checked by the naive oracle
        let t = example_t();
        let l = module_l(&t);
        let pd = minimal_resolution(&l, DEFAULT_CAP).unwrap();
        if let DimResult::Finite { certificate: Certificate::Chain(res), .. } = pd {
            let mut dims = vec![l.dim];
            let mut maps = vec![res.augmentation.map.clone()];
            for (i, term) in res.terms.iter().enumerate() {
                dims.push(rep_of(term).dim);
                if i < res.differentials.len() {
                    maps.push(res.differentials[i].map.clone());
                }
            }
            let h = homology_dims(&dims, &maps);
            assert!(h.iter().all(|&d| d == 0), "homology {h:?}");
        } else {
            panic!("expected a finite verdict for L");
        }
    }
}
