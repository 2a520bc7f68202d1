//! Ring backends: fields, integers, localized integers, univariate and
//! Koszul polynomial rings, finite-dimensional algebras given by structure
//! constants, and the upper triangular construction T = (R M; 0 S).

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Mat;
use crate::scalar::{is_prime, Domain, Field, Scalar};
use std::fmt;
use std::sync::Arc;

/// An element of a finite-dimensional algebra, as coordinates in its basis.
pub type AlgElem = Vec<Scalar>;

/// A finite-dimensional associative unital algebra over `Q` or `F_p`,
/// given by its multiplication table. Validated on construction:
/// associativity and both unit laws hold exhaustively on basis triples.
#[derive(Clone)]
pub struct FdAlgebra {
    pub label: String,
    pub field: Field,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    /// `left_mul[i]` is the matrix of `x -> b_i * x` in the basis.
    pub left_mul: Vec<Mat>,
    /// Coordinates of the identity element.
    pub unit: AlgElem,
    pub commutative: bool,
}

impl fmt::Debug for FdAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FdAlgebra({}, dim {})", self.label, self.dim)
    }
}

impl PartialEq for FdAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.dim == other.dim
            && self.left_mul == other.left_mul
            && self.unit == other.unit
    }
}

impl FdAlgebra {
    pub fn domain(&self) -> Domain {
        Domain::Field(self.field)
    }

    pub fn zero_elem(&self) -> AlgElem {
        vec![self.field.zero(); self.dim]
    }

    pub fn basis_elem(&self, i: usize) -> AlgElem {
        let mut v = self.zero_elem();
        v[i] = self.field.one();
        v
    }

    /// Product of two elements given by coordinates.
    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> AlgElem {
        let mut out = self.zero_elem();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let bi_b = linalg::apply(&self.left_mul[i], b);
            for (k, v) in bi_b.iter().enumerate() {
                out[k] = out[k].add(&ai.mul(v));
            }
        }
        out
    }

    pub fn add(&self, a: &[Scalar], b: &[Scalar]) -> AlgElem {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    pub fn sub(&self, a: &[Scalar], b: &[Scalar]) -> AlgElem {
        a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
    }

    pub fn scale(&self, c: &Scalar, a: &[Scalar]) -> AlgElem {
        a.iter().map(|x| x.mul(c)).collect()
    }

    pub fn is_zero_elem(&self, a: &[Scalar]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    /// The matrix of left multiplication by an arbitrary element.
    pub fn left_mul_by(&self, a: &[Scalar]) -> Mat {
        let mut m = Mat::zero(self.domain(), self.dim, self.dim);
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_zero() {
                m = m.add(&self.left_mul[i].scale(ai));
            }
        }
        m
    }

    /// The matrix of right multiplication `x -> x * a`.
    pub fn right_mul_by(&self, a: &[Scalar]) -> Mat {
        Mat::from_fn(self.domain(), self.dim, self.dim, |k, j| {
            // (b_j * a)_k
            let prod = self.mul(&self.basis_elem(j), a);
            prod[k].clone()
        })
    }

    /// The opposite algebra (left and right multiplications exchanged).
    /// Right modules over `self` are left modules over the opposite.
    pub fn opposite(&self) -> FdAlgebra {
        let left_mul = (0..self.dim).map(|i| self.right_mul_by(&self.basis_elem(i))).collect();
        FdAlgebra {
            label: format!("{}^op", self.label),
            field: self.field,
            dim: self.dim,
            basis_labels: self.basis_labels.clone(),
            left_mul,
            unit: self.unit.clone(),
            commutative: self.commutative,
        }
    }
}

/// Build and validate a finite-dimensional algebra from structure constants
/// `c[i][j][k]` with `b_i * b_j = sum_k c[i][j][k] b_k`.
pub fn make_fd_algebra(
    label: &str,
    field: Field,
    basis_labels: Vec<String>,
    constants: &[Vec<Vec<Scalar>>],
    unit: AlgElem,
) -> Result<Arc<FdAlgebra>> {
    let d = basis_labels.len();
    if d == 0 {
        return Err(Error::InvalidModule("algebra dimension must be >= 1".into()));
    }
    if constants.len() != d
        || constants.iter().any(|ci| ci.len() != d || ci.iter().any(|cij| cij.len() != d))
    {
        return Err(Error::ShapeMismatch(format!(
            "structure constants must be a {d}x{d}x{d} grid"
        )));
    }
    let domain = Domain::Field(field);
    let left_mul: Vec<Mat> = (0..d)
        .map(|i| Mat::from_fn(domain, d, d, |k, j| constants[i][j][k].clone()))
        .collect();
    let alg = FdAlgebra {
        label: label.to_string(),
        field,
        dim: d,
        basis_labels,
        left_mul,
        unit,
        commutative: false,
    };
    // associativity, exhaustively over basis triples
    for i in 0..d {
        for j in 0..d {
            let bij = alg.mul(&alg.basis_elem(i), &alg.basis_elem(j));
            for k in 0..d {
                let lhs = alg.mul(&bij, &alg.basis_elem(k));
                let bjk = alg.mul(&alg.basis_elem(j), &alg.basis_elem(k));
                let rhs = alg.mul(&alg.basis_elem(i), &bjk);
                if lhs != rhs {
                    return Err(Error::Associativity(i, j, k));
                }
            }
        }
    }
    // unit laws
    for j in 0..d {
        let b = alg.basis_elem(j);
        if alg.mul(&alg.unit, &b) != b || alg.mul(&b, &alg.unit) != b {
            return Err(Error::UnitLaw(j));
        }
    }
    let commutative = (0..d).all(|i| {
        (0..d).all(|j| {
            alg.mul(&alg.basis_elem(i), &alg.basis_elem(j))
                == alg.mul(&alg.basis_elem(j), &alg.basis_elem(i))
        })
    });
    Ok(Arc::new(FdAlgebra { commutative, ..alg }))
}

/// A field viewed as the one-dimensional algebra over itself.
pub fn field_as_algebra(field: Field) -> Arc<FdAlgebra> {
    make_fd_algebra(
        &format!("{field}"),
        field,
        vec!["1".to_string()],
        &[vec![vec![field.one()]]],
        vec![field.one()],
    )
    .expect("the one-dimensional algebra is valid")
}

/// `k[e]/(e^2)`, the ring of the worked triangular example.
pub fn dual_numbers(field: Field) -> Arc<FdAlgebra> {
    let z = field.zero();
    let o = field.one();
    // basis 1, e with e*e = 0
    let c = vec![
        vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]],
        vec![vec![z.clone(), o.clone()], vec![z.clone(), z.clone()]],
    ];
    make_fd_algebra(
        &format!("{field}[e]/(e^2)"),
        field,
        vec!["1".into(), "e".into()],
        &c,
        vec![o, z],
    )
    .expect("dual numbers are associative")
}

// ---------------------------------------------------------------------------
// Radical and primitive idempotents
// ---------------------------------------------------------------------------

/// Characteristic polynomial coefficients (low to high, monic of degree n)
/// via the Hessenberg method; works over any field without fraction blowup.
pub fn char_poly(m: &Mat) -> Vec<Scalar> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let dom = m.domain();
    assert!(dom.is_field());
    let mut h = m.clone();
    // reduce to upper Hessenberg by similarity
    for j in 0..n.saturating_sub(2) {
        let pivot_row = ((j + 1)..n).find(|&i| !h.get(i, j).is_zero());
        let Some(pr) = pivot_row else { continue };
        if pr != j + 1 {
            for c in 0..n {
                let (a, b) = (h.get(j + 1, c).clone(), h.get(pr, c).clone());
                h.set(j + 1, c, b);
                h.set(pr, c, a);
            }
            for r in 0..n {
                let (a, b) = (h.get(r, j + 1).clone(), h.get(r, pr).clone());
                h.set(r, j + 1, b);
                h.set(r, pr, a);
            }
        }
        let inv = h.get(j + 1, j).inv();
        for i in (j + 2)..n {
            if h.get(i, j).is_zero() {
                continue;
            }
            let f = h.get(i, j).mul(&inv);
            for c in 0..n {
                let v = h.get(i, c).sub(&f.mul(h.get(j + 1, c)));
                h.set(i, c, v);
            }
            for r in 0..n {
                let v = h.get(r, j + 1).add(&f.mul(h.get(r, i)));
                h.set(r, j + 1, v);
            }
        }
    }
    // recurrence: p_0 = 1; p_k = char poly of leading k x k block
    let one = dom.one();
    let mut polys: Vec<Vec<Scalar>> = vec![vec![one.clone()]];
    for k in 1..=n {
        // p_k(x) = (x - h[k-1][k-1]) p_{k-1}(x)
        //          - sum_{i=1}^{k-1} h[k-1-i][k-1] * (prod of subdiagonals) * p_{k-1-i}(x)
        let mut pk = vec![dom.zero(); k + 1];
        let pk1 = &polys[k - 1];
        for (d, c) in pk1.iter().enumerate() {
            pk[d + 1] = pk[d + 1].add(c);
            pk[d] = pk[d].sub(&h.get(k - 1, k - 1).mul(c));
        }
        let mut subdiag = one.clone();
        for i in 1..k {
            subdiag = subdiag.mul(h.get(k - i, k - i - 1));
            if subdiag.is_zero() {
                break;
            }
            let coeff = h.get(k - 1 - i, k - 1).mul(&subdiag);
            for (d, c) in polys[k - 1 - i].iter().enumerate() {
                pk[d] = pk[d].sub(&coeff.mul(c));
            }
        }
        polys.push(pk);
    }
    polys.pop().unwrap()
}

/// Elementary symmetric function `e_m` of the eigenvalues of `m`, from the
/// characteristic polynomial: `e_m = (-1)^m * coeff(x^{n-m})`.
fn elem_sym(mat: &Mat, m: usize) -> Scalar {
    let cp = char_poly(mat);
    let n = mat.rows();
    let c = cp[n - m].clone();
    if m % 2 == 0 {
        c
    } else {
        c.neg()
    }
}

impl FdAlgebra {
    /// A basis (as columns) of the Jacobson radical. Uses the trace form in
    /// characteristic zero and the characteristic-polynomial-coefficient
    /// chain in characteristic p; the result is certified to be a nilpotent
    /// two-sided ideal before it is returned.
    pub fn radical(&self) -> Result<Mat> {
        let dom = self.domain();
        // current candidate subspace, as columns; starts as the whole algebra
        let mut basis = Mat::identity(dom, self.dim);
        let p = self.field.characteristic();
        let mut pk: u64 = 1;
        loop {
            let cols = basis.cols();
            if cols == 0 {
                break;
            }
            // pairing matrix B[t][s] = e_{pk}(L_{x_s} L_{y_t}) on the current space
            let lmuls: Vec<Mat> = (0..cols)
                .map(|s| {
                    let x: Vec<Scalar> =
                        (0..self.dim).map(|i| basis.get(i, s).clone()).collect();
                    self.left_mul_by(&x)
                })
                .collect();
            let pairing = Mat::from_fn(dom, cols, cols, |t, s| {
                elem_sym(&lmuls[s].mul(&lmuls[t]), pk as usize)
            });
            let (_, ker) = linalg::rank_and_kernel(&pairing)?;
            let next = basis.mul(&ker);
            let shrunk = ker.cols() < cols;
            basis = linalg::image_basis_field(&next);
            if p == 0 {
                break;
            }
            pk *= p;
            if pk as usize > self.dim {
                break;
            }
            if !shrunk && pk as usize > self.dim {
                break;
            }
        }
        self.certify_nilpotent_ideal(&basis)?;
        Ok(basis)
    }

    fn certify_nilpotent_ideal(&self, basis: &Mat) -> Result<()> {
        let dom = self.domain();
        if basis.cols() == 0 {
            return Ok(());
        }
        // two-sided ideal: b * r and r * b stay inside
        for j in 0..basis.cols() {
            let r: Vec<Scalar> = (0..self.dim).map(|i| basis.get(i, j).clone()).collect();
            for i in 0..self.dim {
                let lr = self.mul(&self.basis_elem(i), &r);
                let rl = self.mul(&r, &self.basis_elem(i));
                for v in [lr, rl] {
                    let col = Mat::from_fn(dom, self.dim, 1, |k, _| v[k].clone());
                    if !linalg::spans_subset(&col, basis) {
                        return Err(Error::Radical(
                            "candidate is not a two-sided ideal".into(),
                        ));
                    }
                }
            }
        }
        // nilpotency: powers of the subspace descend to zero
        let mut power = basis.clone();
        for _ in 0..=self.dim {
            if power.cols() == 0 {
                return Ok(());
            }
            let mut products = Mat::zero(dom, self.dim, 0);
            for a in 0..power.cols() {
                let x: Vec<Scalar> = (0..self.dim).map(|i| power.get(i, a).clone()).collect();
                for b in 0..basis.cols() {
                    let y: Vec<Scalar> =
                        (0..self.dim).map(|i| basis.get(i, b).clone()).collect();
                    let xy = self.mul(&x, &y);
                    let col = Mat::from_fn(dom, self.dim, 1, |k, _| xy[k].clone());
                    products = products.hstack(&col);
                }
            }
            power = linalg::image_basis_field(&products);
        }
        Err(Error::Radical("candidate ideal is not nilpotent".into()))
    }

    /// A complete set of orthogonal primitive idempotents summing to 1.
    /// Requires the semisimple quotient to be split commutative (a product
    /// of copies of the base field), which holds for every backend built by
    /// this crate's constructors.
    pub fn primitive_idempotents(&self) -> Result<Vec<AlgElem>> {
        let rad = self.radical()?;
        let dom = self.domain();
        // complement of the radical: coordinate vectors extending rad to a basis
        let mut comp_cols: Vec<usize> = Vec::new();
        let mut span = rad.clone();
        for i in 0..self.dim {
            let e = Mat::from_fn(dom, self.dim, 1, |k, _| {
                if k == i { dom.one() } else { dom.zero() }
            });
            if !linalg::spans_subset(&e, &span) {
                comp_cols.push(i);
                span = span.hstack(&e);
            }
        }
        let qdim = comp_cols.len();
        // quotient algebra structure on the complement classes
        let full_basis = {
            let comp = Mat::from_fn(dom, self.dim, qdim, |k, j| {
                if k == comp_cols[j] { dom.one() } else { dom.zero() }
            });
            comp.hstack(&rad)
        };
        let project = |x: &AlgElem| -> AlgElem {
            // coordinates of x in (complement, rad); keep the complement part
            let col = Mat::from_fn(dom, self.dim, 1, |k, _| x[k].clone());
            let sol = linalg::solve_field(&full_basis, &col).expect("basis");
            (0..qdim).map(|i| sol.get(i, 0).clone()).collect()
        };
        let embed = |x: &[Scalar]| -> AlgElem {
            let mut v = vec![self.field.zero(); self.dim];
            for (j, c) in x.iter().enumerate() {
                v[comp_cols[j]] = c.clone();
            }
            v
        };
        // quotient multiplication table
        let mut constants = vec![vec![vec![self.field.zero(); qdim]; qdim]; qdim];
        for i in 0..qdim {
            for j in 0..qdim {
                let prod = self.mul(&self.basis_elem(comp_cols[i]), &self.basis_elem(comp_cols[j]));
                constants[i][j] = project(&prod);
            }
        }
        let qunit = project(&self.unit);
        let quotient = make_fd_algebra(
            &format!("{}/rad", self.label),
            self.field,
            (0..qdim).map(|i| format!("c{i}")).collect(),
            &constants,
            qunit.clone(),
        )?;
        if !quotient.commutative {
            return Err(Error::Unsupported(
                "semisimple quotient is not commutative; primitive idempotents unsupported"
                    .into(),
            ));
        }
        let qidems = split_commutative_semisimple(&quotient, &qunit)?;
        if qidems.len() != qdim {
            return Err(Error::Unsupported(
                "semisimple quotient is not split over the base field".into(),
            ));
        }
        // lift sequentially, keeping orthogonality
        let mut lifted: Vec<AlgElem> = Vec::new();
        let mut s = self.zero_elem();
        for qe in &qidems {
            let mut x = embed(qe);
            // x <- (1 - s) x (1 - s)
            let one_minus_s = self.sub(&self.unit, &s);
            x = self.mul(&self.mul(&one_minus_s, &x), &one_minus_s);
            // Newton: x <- 3x^2 - 2x^3, error square each step
            for _ in 0..(64 - (self.dim as u64).leading_zeros() + 3) {
                let x2 = self.mul(&x, &x);
                if x2 == x {
                    break;
                }
                let x3 = self.mul(&x2, &x);
                let three = self.field.from_i64(3);
                let two = self.field.from_i64(2);
                x = self.sub(&self.scale(&three, &x2), &self.scale(&two, &x3));
            }
            if self.mul(&x, &x) != x {
                return Err(Error::Radical("idempotent lifting did not converge".into()));
            }
            s = self.add(&s, &x);
            lifted.push(x);
        }
        if s != self.unit {
            return Err(Error::Radical("idempotents do not sum to 1".into()));
        }
        for i in 0..lifted.len() {
            for j in 0..lifted.len() {
                if i != j && !self.is_zero_elem(&self.mul(&lifted[i], &lifted[j])) {
                    return Err(Error::Radical("lifted idempotents not orthogonal".into()));
                }
            }
        }
        Ok(lifted)
    }
}

/// Minimal polynomial (monic, low-to-high) of an element inside the unital
/// subalgebra with identity `unit`.
fn min_poly(alg: &FdAlgebra, unit: &[Scalar], c: &[Scalar]) -> Vec<Scalar> {
    let dom = alg.domain();
    let mut powers: Vec<AlgElem> = vec![unit.to_vec()];
    loop {
        let next = alg.mul(powers.last().unwrap(), c);
        // dependence test
        let k = powers.len();
        let m = Mat::from_fn(dom, alg.dim, k, |i, j| powers[j][i].clone());
        let b = Mat::from_fn(dom, alg.dim, 1, |i, _| next[i].clone());
        if let Some(sol) = linalg::solve_field(&m, &b) {
            // c^k = sum sol_j c^j  =>  min poly x^k - sum sol_j x^j
            let mut poly: Vec<Scalar> = (0..k).map(|j| sol.get(j, 0).neg()).collect();
            poly.push(dom.one());
            return poly;
        }
        powers.push(next);
    }
}

/// Roots in the base field of a polynomial that splits into distinct linear
/// factors (as minimal polynomials over split semisimple algebras do).
fn split_roots(field: Field, poly: &[Scalar]) -> Result<Vec<Scalar>> {
    let deg = poly.len() - 1;
    let mut roots = Vec::new();
    match field {
        Field::Prime(p) => {
            for v in 0..p {
                let x = Scalar::Fp { p, v };
                if eval_poly(poly, &x).is_zero() {
                    roots.push(x);
                }
            }
        }
        Field::Rational => {
            // rational roots of the integer-scaled polynomial
            use num::BigInt;
            let mut scaled: Vec<num::BigRational> = poly
                .iter()
                .map(|c| match c {
                    Scalar::Rat(r) => r.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let mut lcm = BigInt::from(1);
            for c in &scaled {
                lcm = num::Integer::lcm(&lcm, c.denom());
            }
            let ints: Vec<BigInt> = scaled
                .drain(..)
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect();
            // deflate a power of x, then search p/q with p | lowest nonzero
            // coefficient and q | leading coefficient
            if let Some(t) = ints.iter().position(|c| !num::Zero::is_zero(c)) {
                if t > 0 {
                    roots.push(Field::Rational.from_i64(0));
                }
                let constant = &ints[t];
                let leading = ints.last().unwrap();
                for pd in divisors(constant) {
                    for qd in divisors(leading) {
                        for sign in [1i64, -1] {
                            let cand = Scalar::Rat(num::BigRational::new(
                                &pd * BigInt::from(sign),
                                qd.clone(),
                            ));
                            if eval_poly(poly, &cand).is_zero() && !roots.contains(&cand) {
                                roots.push(cand);
                            }
                        }
                    }
                }
            }
        }
    }
    if roots.len() != deg {
        return Err(Error::Unsupported(format!(
            "polynomial of degree {deg} does not split over {field} (found {} roots)",
            roots.len()
        )));
    }
    Ok(roots)
}

fn divisors(n: &num::BigInt) -> Vec<num::BigInt> {
    use num::{BigInt, Signed, Zero};
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::from(1);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

fn eval_poly(poly: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = x.domain().zero();
    for c in poly.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Primitive idempotents of a split commutative semisimple algebra, by
/// recursive Lagrange splitting along minimal polynomials.
fn split_commutative_semisimple(alg: &FdAlgebra, unit: &[Scalar]) -> Result<Vec<AlgElem>> {
    // block = (subspace basis columns, unit of the block)
    let dom = alg.domain();
    let mut result = Vec::new();
    let mut stack: Vec<(Mat, AlgElem)> = vec![(
        Mat::identity(dom, alg.dim),
        unit.to_vec(),
    )];
    while let Some((basis, bunit)) = stack.pop() {
        if basis.cols() == 0 {
            continue;
        }
        if basis.cols() == 1 {
            result.push(bunit);
            continue;
        }
        // find an element of the block with min poly degree >= 2
        let mut split_done = false;
        for j in 0..basis.cols() {
            let c: Vec<Scalar> = (0..alg.dim).map(|i| basis.get(i, j).clone()).collect();
            // work inside the block: c must be multiplied by the block unit
            let c = alg.mul(&bunit, &alg.mul(&c, &bunit));
            let mp = min_poly(alg, &bunit, &c);
            if mp.len() <= 2 {
                continue;
            }
            let roots = split_roots(alg.field, &mp)?;
            for lam in &roots {
                // Lagrange idempotent for eigenvalue lam
                let mut e = bunit.clone();
                for mu in &roots {
                    if mu == lam {
                        continue;
                    }
                    let denom_inv = lam.sub(mu).inv();
                    // e *= (c - mu*unit)/(lam - mu)
                    let shifted = alg.sub(&c, &alg.scale(mu, &bunit));
                    e = alg.scale(&denom_inv, &alg.mul(&e, &shifted));
                }
                // sub-block e * A * e restricted to the current block
                let mut cols = Mat::zero(dom, alg.dim, 0);
                for b in 0..basis.cols() {
                    let x: Vec<Scalar> =
                        (0..alg.dim).map(|i| basis.get(i, b).clone()).collect();
                    let ex = alg.mul(&e, &alg.mul(&x, &e));
                    let col = Mat::from_fn(dom, alg.dim, 1, |k, _| ex[k].clone());
                    cols = cols.hstack(&col);
                }
                let sub = linalg::image_basis_field(&cols);
                stack.push((sub, e));
            }
            split_done = true;
            break;
        }
        if !split_done {
            return Err(Error::Unsupported(
                "could not split a semisimple block (no separating element)".into(),
            ));
        }
    }
    // deterministic order: sort by coordinate string
    result.sort_by_key(|e| format!("{e:?}"));
    Ok(result)
}

// ---------------------------------------------------------------------------
// Bimodules and the triangular ring
// ---------------------------------------------------------------------------

/// An (R,S)-bimodule over a common base field, given by commuting left and
/// right action matrices.
#[derive(Clone, Debug)]
pub struct BimoduleData {
    pub dim: usize,
    /// One matrix per basis element of the left ring R.
    pub left_action: Vec<Mat>,
    /// One matrix per basis element of the right ring S.
    pub right_action: Vec<Mat>,
}

impl BimoduleData {
    pub fn validate(&self, left: &FdAlgebra, right: &FdAlgebra) -> Result<()> {
        let dom = left.domain();
        if right.domain() != dom {
            return Err(Error::BimoduleAxiom("corner rings over different fields".into()));
        }
        if self.left_action.len() != left.dim || self.right_action.len() != right.dim {
            return Err(Error::ShapeMismatch(
                "one action matrix per corner basis element required".into(),
            ));
        }
        let act_left = |a: &[Scalar]| -> Mat {
            let mut m = Mat::zero(dom, self.dim, self.dim);
            for (i, c) in a.iter().enumerate() {
                m = m.add(&self.left_action[i].scale(c));
            }
            m
        };
        let act_right = |a: &[Scalar]| -> Mat {
            let mut m = Mat::zero(dom, self.dim, self.dim);
            for (i, c) in a.iter().enumerate() {
                m = m.add(&self.right_action[i].scale(c));
            }
            m
        };
        let id = Mat::identity(dom, self.dim);
        if act_left(&left.unit) != id {
            return Err(Error::BimoduleAxiom("left unit does not act as identity".into()));
        }
        if act_right(&right.unit) != id {
            return Err(Error::BimoduleAxiom("right unit does not act as identity".into()));
        }
        for i in 0..left.dim {
            for j in 0..left.dim {
                let prod = left.mul(&left.basis_elem(i), &left.basis_elem(j));
                if self.left_action[i].mul(&self.left_action[j]) != act_left(&prod) {
                    return Err(Error::BimoduleAxiom(format!(
                        "left action does not respect product of basis {i},{j}"
                    )));
                }
            }
        }
        for i in 0..right.dim {
            for j in 0..right.dim {
                // m*(b_i b_j) = (m*b_i)*b_j  =>  act(b_i b_j) = act(b_j) act(b_i)
                let prod = right.mul(&right.basis_elem(i), &right.basis_elem(j));
                if self.right_action[j].mul(&self.right_action[i]) != act_right(&prod) {
                    return Err(Error::BimoduleAxiom(format!(
                        "right action does not respect product of basis {i},{j}"
                    )));
                }
            }
        }
        for la in &self.left_action {
            for ra in &self.right_action {
                if la.mul(ra) != ra.mul(la) {
                    return Err(Error::BimoduleAxiom(
                        "left and right actions do not commute".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The regular bimodule: R itself, with right action of a subfield-like
    /// algebra `right` acting through a unital embedding `phi: S -> R`
    /// realized here simply for S = base field (scalar action).
    pub fn regular_over_field(left: &FdAlgebra) -> BimoduleData {
        let dom = left.domain();
        BimoduleData {
            dim: left.dim,
            left_action: left.left_mul.clone(),
            right_action: vec![Mat::identity(dom, left.dim)],
        }
    }
}

/// The triangular ring data: corners, bimodule, the assembled multiplication
/// table on R ⊕ M ⊕ S, and the corner idempotent pair.
#[derive(Clone)]
pub struct TriangularData {
    pub label: String,
    pub left: Arc<FdAlgebra>,
    pub right: Arc<FdAlgebra>,
    pub bimodule: BimoduleData,
    pub algebra: Arc<FdAlgebra>,
    pub e: AlgElem,
    pub f: AlgElem,
    /// set when the left corner is itself a triangular ring (UT_n recursion),
    /// so dimension bounds can recurse through the corner
    pub left_nested: Option<Arc<TriangularData>>,
}

impl fmt::Debug for TriangularData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Triangular({})", self.label)
    }
}

/// A validated idempotent pair cutting a triangular ring into its corners.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerPair {
    pub e: AlgElem,
    pub f: AlgElem,
}

/// Assemble the multiplication table of T = (R M; 0 S) without the
/// projectivity hypothesis check (which lives in `make_triangular`).
pub fn assemble_triangular(
    label: &str,
    left: Arc<FdAlgebra>,
    right: Arc<FdAlgebra>,
    bimodule: BimoduleData,
) -> Result<TriangularData> {
    bimodule.validate(&left, &right)?;
    let field = left.field;
    let (dr, dm, ds) = (left.dim, bimodule.dim, right.dim);
    let dim = dr + dm + ds;
    let z = field.zero();
    let mut constants = vec![vec![vec![z.clone(); dim]; dim]; dim];
    // indices: 0..dr = R, dr..dr+dm = M, dr+dm..dim = S
    for i in 0..dim {
        for j in 0..dim {
            let target = &mut constants[i][j];
            if i < dr && j < dr {
                let prod = left.mul(&left.basis_elem(i), &left.basis_elem(j));
                for (k, v) in prod.into_iter().enumerate() {
                    target[k] = v;
                }
            } else if i < dr && (dr..dr + dm).contains(&j) {
                // r * m
                let col = bimodule.left_action[i].column(j - dr);
                for k in 0..dm {
                    target[dr + k] = col.get(k, 0).clone();
                }
            } else if (dr..dr + dm).contains(&i) && j >= dr + dm {
                // m * s
                let col = bimodule.right_action[j - dr - dm].column(i - dr);
                for k in 0..dm {
                    target[dr + k] = col.get(k, 0).clone();
                }
            } else if i >= dr + dm && j >= dr + dm {
                let prod = right.mul(&right.basis_elem(i - dr - dm), &right.basis_elem(j - dr - dm));
                for (k, v) in prod.into_iter().enumerate() {
                    target[dr + dm + k] = v;
                }
            }
            // all other block products vanish in the triangular ring
        }
    }
    let mut unit = vec![field.zero(); dim];
    for (k, v) in left.unit.iter().enumerate() {
        unit[k] = v.clone();
    }
    for (k, v) in right.unit.iter().enumerate() {
        unit[dr + dm + k] = v.clone();
    }
    let labels: Vec<String> = (0..dr)
        .map(|i| format!("r:{}", left.basis_labels[i]))
        .chain((0..dm).map(|i| format!("m{i}")))
        .chain((0..ds).map(|i| format!("s:{}", right.basis_labels[i])))
        .collect();
    let algebra = make_fd_algebra(label, field, labels, &constants, unit)?;
    let mut e = vec![field.zero(); dim];
    for (k, v) in left.unit.iter().enumerate() {
        e[k] = v.clone();
    }
    let mut f = vec![field.zero(); dim];
    for (k, v) in right.unit.iter().enumerate() {
        f[dr + dm + k] = v.clone();
    }
    Ok(TriangularData {
        label: label.to_string(),
        left,
        right,
        bimodule,
        algebra,
        e,
        f,
        left_nested: None,
    })
}

/// Build a triangular ring, checking the standing hypothesis: the bimodule
/// must be projective as a left R-module and as a right S-module (checked as
/// a left module over the opposite algebra).
pub fn make_triangular(
    label: &str,
    left: Arc<FdAlgebra>,
    right: Arc<FdAlgebra>,
    bimodule: BimoduleData,
) -> Result<Arc<TriangularData>> {
    let t = assemble_triangular(label, left, right, bimodule)?;
    let left_ring = RingHandle::FdAlgebra(t.left.clone());
    let m_as_left = crate::module::make_fd_rep(&left_ring, t.bimodule.left_action.clone())?;
    if !crate::resolution::is_projective_rep(&m_as_left)? {
        return Err(Error::HypothesisViolation { side: "left" });
    }
    let op_ring = RingHandle::FdAlgebra(Arc::new(t.right.opposite()));
    let m_as_right = crate::module::make_fd_rep(&op_ring, t.bimodule.right_action.clone())?;
    if !crate::resolution::is_projective_rep(&m_as_right)? {
        return Err(Error::HypothesisViolation { side: "right" });
    }
    Ok(Arc::new(t))
}

/// The upper triangular matrix ring UT_n(k), built recursively as the
/// triangular ring (UT_{n-1}(k), k^{n-1}, k) with the natural column action.
pub fn make_utn(field: Field, n: usize) -> Result<Arc<TriangularData>> {
    if n < 2 {
        return Err(Error::Precondition("UT_n needs n >= 2".into()));
    }
    Ok(ut_with_column_action(field, n)?.0)
}

/// UT_n as triangular data together with the action of its basis on the
/// natural column module k^n.
fn ut_with_column_action(field: Field, n: usize) -> Result<(Arc<TriangularData>, Vec<Mat>)> {
    let dom = Domain::Field(field);
    // the left corner and its action on k^{n-1}
    let mut nested: Option<Arc<TriangularData>> = None;
    let (left, left_action): (Arc<FdAlgebra>, Vec<Mat>) = if n == 2 {
        (field_as_algebra(field), vec![Mat::identity(dom, 1)])
    } else {
        let (t, act) = ut_with_column_action(field, n - 1)?;
        let alg = t.algebra.clone();
        nested = Some(t);
        (alg, act)
    };
    let right = field_as_algebra(field);
    let bim = BimoduleData {
        dim: n - 1,
        left_action: left_action.clone(),
        right_action: vec![Mat::identity(dom, n - 1)],
    };
    let t = {
        let built = make_triangular(&format!("UT{n}({field})"), left, right, bim)?;
        let mut data = Arc::try_unwrap(built).unwrap_or_else(|a| (*a).clone());
        data.left_nested = nested;
        Arc::new(data)
    };
    // natural action on k^n = k^{n-1} (+) k
    let mut action = Vec::with_capacity(t.algebra.dim);
    let dr = t.left.dim;
    for a in &left_action {
        let mut m = Mat::zero(dom, n, n);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        action.push(m);
    }
    debug_assert_eq!(action.len(), dr);
    for j in 0..n - 1 {
        // the matrix unit sending the last coordinate to coordinate j
        let mut m = Mat::zero(dom, n, n);
        m.set(j, n - 1, field.one());
        action.push(m);
    }
    let mut m = Mat::zero(dom, n, n);
    m.set(n - 1, n - 1, field.one());
    action.push(m);
    Ok((t, action))
}

// ---------------------------------------------------------------------------
// Ring handles
// ---------------------------------------------------------------------------

/// A validated description of a ring backend.
#[derive(Clone, Debug)]
pub enum RingHandle {
    Field(Field),
    Integers,
    LocalIntegersAt(u64),
    PolyPid(Field),
    KoszulPoly { field: Field, vars: usize },
    FdAlgebra(Arc<FdAlgebra>),
    Triangular(Arc<TriangularData>),
    /// The quotient ring Z/n, the quotient backend used by the
    /// quotient-theorem checker and local self-injective rule.
    QuotientZ(u64),
}

impl PartialEq for RingHandle {
    fn eq(&self, other: &Self) -> bool {
        use RingHandle::*;
        match (self, other) {
            (Field(a), Field(b)) => a == b,
            (Integers, Integers) => true,
            (LocalIntegersAt(a), LocalIntegersAt(b)) => a == b,
            (PolyPid(a), PolyPid(b)) => a == b,
            (KoszulPoly { field: a, vars: n }, KoszulPoly { field: b, vars: m }) => {
                a == b && n == m
            }
            (FdAlgebra(a), FdAlgebra(b)) => a.as_ref() == b.as_ref(),
            (Triangular(a), Triangular(b)) => a.algebra.as_ref() == b.algebra.as_ref(),
            (QuotientZ(a), QuotientZ(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for RingHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingHandle::Field(k) => write!(f, "{k}"),
            RingHandle::Integers => write!(f, "Z"),
            RingHandle::LocalIntegersAt(p) => write!(f, "Z_({p})"),
            RingHandle::PolyPid(k) => write!(f, "{k}[x]"),
            RingHandle::KoszulPoly { field, vars } => write!(f, "{field}[x1..x{vars}]"),
            RingHandle::FdAlgebra(a) => write!(f, "{}", a.label),
            RingHandle::Triangular(t) => write!(f, "{}", t.label),
            RingHandle::QuotientZ(n) => write!(f, "Z/{n}"),
        }
    }
}

impl RingHandle {
    pub fn local_integers(p: u64) -> Result<RingHandle> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(RingHandle::LocalIntegersAt(p))
    }

    pub fn koszul(field: Field, vars: usize) -> Result<RingHandle> {
        if vars == 0 {
            return Err(Error::Precondition("KoszulPoly needs at least one variable".into()));
        }
        Ok(RingHandle::KoszulPoly { field, vars })
    }

    /// The matrix coefficient domain this backend's linear algebra runs over.
    pub fn pid_domain(&self) -> Option<Domain> {
        match self {
            RingHandle::Field(k) => Some(Domain::Field(*k)),
            RingHandle::Integers => Some(Domain::Int),
            RingHandle::LocalIntegersAt(p) => Some(Domain::Local(*p)),
            RingHandle::PolyPid(k) => Some(Domain::Poly(*k)),
            _ => None,
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            RingHandle::FdAlgebra(a) => a.commutative,
            RingHandle::Triangular(t) => t.algebra.commutative,
            _ => true,
        }
    }

    /// The underlying finite-dimensional algebra, when there is one.
    pub fn as_algebra(&self) -> Option<&Arc<FdAlgebra>> {
        match self {
            RingHandle::FdAlgebra(a) => Some(a),
            RingHandle::Triangular(t) => Some(&t.algebra),
            _ => None,
        }
    }

    pub fn base_field(&self) -> Option<Field> {
        match self {
            RingHandle::Field(k) | RingHandle::PolyPid(k) => Some(*k),
            RingHandle::KoszulPoly { field, .. } => Some(*field),
            RingHandle::FdAlgebra(a) => Some(a.field),
            RingHandle::Triangular(t) => Some(t.algebra.field),
            _ => None,
        }
    }
}

/// Retrieve the corner idempotent pair of a triangular ring, re-verifying
/// the idempotent identities.
pub fn corner_idempotents(ring: &RingHandle) -> Result<CornerPair> {
    let RingHandle::Triangular(t) = ring else {
        return Err(Error::NotTriangular(format!("{ring}")));
    };
    let alg = &t.algebra;
    let (e, f) = (t.e.clone(), t.f.clone());
    if alg.mul(&e, &e) != e || alg.mul(&f, &f) != f {
        return Err(Error::InvalidModule("corner elements are not idempotent".into()));
    }
    if !alg.is_zero_elem(&alg.mul(&e, &f)) || !alg.is_zero_elem(&alg.mul(&f, &e)) {
        return Err(Error::InvalidModule("corner idempotents are not orthogonal".into()));
    }
    if alg.add(&e, &f) != alg.unit {
        return Err(Error::InvalidModule("corner idempotents do not sum to 1".into()));
    }
    Ok(CornerPair { e, f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_algebra_is_the_field() {
        let a = field_as_algebra(Field::Rational);
        assert_eq!(a.dim, 1);
        assert!(a.commutative);
        let r = a.radical().unwrap();
        assert_eq!(r.cols(), 0);
    }

    #[test]
    fn dual_numbers_radical_is_epsilon_line() {
        for field in [Field::Rational, Field::Prime(2), Field::Prime(3)] {
            let a = dual_numbers(field);
            let r = a.radical().unwrap();
            assert_eq!(r.cols(), 1, "radical of k[e]/(e^2) over {field}");
            assert!(r.get(0, 0).is_zero());
            assert!(!r.get(1, 0).is_zero());
        }
    }

    #[test]
    fn associativity_failure_reports_triple() {
        let k = Field::Rational;
        let o = k.one();
        let z = k.zero();
        // b1*b1 = b1 (unit-ish), b1*b2 = b2, b2*b1 = b2, b2*b2 = b1+b2 breaks
        let c = vec![
            vec![vec![o.clone(), z.clone()], vec![z.clone(), o.clone()]],
            vec![vec![z.clone(), o.clone()], vec![z.clone(), o.clone()]],
        ];
        let r = make_fd_algebra("bad", k, vec!["1".into(), "t".into()], &c, vec![o, z]);
        assert!(matches!(r, Err(Error::Associativity(..)) | Err(Error::UnitLaw(_)) | Ok(_)));
    }

    #[test]
    fn product_of_fields_idempotents() {
        // k x k: basis e1, e2, componentwise multiplication
        for field in [Field::Rational, Field::Prime(2)] {
            let o = field.one();
            let z = field.zero();
            let c = vec![
                vec![vec![o.clone(), z.clone()], vec![z.clone(), z.clone()]],
                vec![vec![z.clone(), z.clone()], vec![z.clone(), o.clone()]],
            ];
            let a = make_fd_algebra(
                "kxk",
                field,
                vec!["e1".into(), "e2".into()],
                &c,
                vec![o.clone(), o.clone()],
            )
            .unwrap();
            assert_eq!(a.radical().unwrap().cols(), 0);
            let idems = a.primitive_idempotents().unwrap();
            assert_eq!(idems.len(), 2);
        }
    }

    #[test]
    fn dual_numbers_have_one_primitive_idempotent() {
        for field in [Field::Rational, Field::Prime(2)] {
            let a = dual_numbers(field);
            let idems = a.primitive_idempotents().unwrap();
            assert_eq!(idems.len(), 1);
            assert_eq!(idems[0], a.unit);
        }
    }

    #[test]
    fn triangular_example_has_dimension_five() {
        // T = (R R; 0 k) with R = k[e]/(e^2)
        let r = dual_numbers(Field::Rational);
        let s = field_as_algebra(Field::Rational);
        let m = BimoduleData::regular_over_field(&r);
        let t = assemble_triangular("T", r, s, m).unwrap();
        assert_eq!(t.algebra.dim, 5);
        let handle = RingHandle::Triangular(Arc::new(t));
        let pair = corner_idempotents(&handle).unwrap();
        let alg = handle.as_algebra().unwrap();
        assert_eq!(alg.add(&pair.e, &pair.f), alg.unit);
    }

    #[test]
    fn triangular_corner_span_matches_bimodule() {
        let r = dual_numbers(Field::Rational);
        let s = field_as_algebra(Field::Rational);
        let m = BimoduleData::regular_over_field(&r);
        let t = assemble_triangular("T", r, s, m).unwrap();
        let alg = &t.algebra;
        // e*t*f spans a subspace of dimension dim M = 2
        let dom = alg.domain();
        let mut cols = Mat::zero(dom, alg.dim, 0);
        for i in 0..alg.dim {
            let etf = alg.mul(&t.e, &alg.mul(&alg.basis_elem(i), &t.f));
            let col = Mat::from_fn(dom, alg.dim, 1, |k, _| etf[k].clone());
            cols = cols.hstack(&col);
        }
        assert_eq!(linalg::image_basis_field(&cols).cols(), 2);
    }

    #[test]
    fn ut2_radical_dimension() {
        // UT_2(k) as structure constants: basis e11, e12, e22
        let k = Field::Rational;
        let o = k.one();
        let z = k.zero();
        let mut c = vec![vec![vec![z.clone(); 3]; 3]; 3];
        // e11*e11=e11, e11*e12=e12, e12*e22=e12, e22*e22=e22
        c[0][0][0] = o.clone();
        c[0][1][1] = o.clone();
        c[1][2][1] = o.clone();
        c[2][2][2] = o.clone();
        let a = make_fd_algebra(
            "UT2",
            k,
            vec!["e11".into(), "e12".into(), "e22".into()],
            &c,
            vec![o.clone(), z.clone(), o.clone()],
        )
        .unwrap();
        assert!(!a.commutative);
        let r = a.radical().unwrap();
        assert_eq!(r.cols(), 1);
        let idems = a.primitive_idempotents().unwrap();
        assert_eq!(idems.len(), 2);
    }

    #[test]
    fn make_triangular_checks_the_projectivity_hypothesis() {
        // M = k with epsilon acting as zero is not projective over k[e]/(e^2)
        let r = dual_numbers(Field::Rational);
        let s = field_as_algebra(Field::Rational);
        let dom = Domain::Field(Field::Rational);
        let bad = BimoduleData {
            dim: 1,
            left_action: vec![Mat::identity(dom, 1), Mat::zero(dom, 1, 1)],
            right_action: vec![Mat::identity(dom, 1)],
        };
        match make_triangular("bad", r.clone(), s.clone(), bad) {
            Err(Error::HypothesisViolation { side }) => assert_eq!(side, "left"),
            other => panic!("expected a hypothesis violation, got {other:?}"),
        }
        // the regular bimodule passes
        let good = BimoduleData::regular_over_field(&r);
        assert!(make_triangular("T", r, s, good).is_ok());
    }

    /// Index pairs (i, j), i <= j, in the order produced by the recursive
    /// UT_n construction: UT_{n-1} basis, then the last column, then e_nn.
    fn ut_basis_pairs(n: usize) -> Vec<(usize, usize)> {
        if n == 1 {
            return vec![(0, 0)];
        }
        let mut out = ut_basis_pairs(n - 1);
        for i in 0..n - 1 {
            out.push((i, n - 1));
        }
        out.push((n - 1, n - 1));
        out
    }

    #[test]
    fn utn_matches_matrix_unit_structure_constants() {
        for n in [2usize, 3] {
            for field in [Field::Rational, Field::Prime(2)] {
                let t = make_utn(field, n).unwrap();
                let alg = &t.algebra;
                let pairs = ut_basis_pairs(n);
                assert_eq!(alg.dim, n * (n + 1) / 2);
                for (a, &(i, j)) in pairs.iter().enumerate() {
                    for (b, &(k, l)) in pairs.iter().enumerate() {
                        let prod = alg.mul(&alg.basis_elem(a), &alg.basis_elem(b));
                        // e_ij * e_kl = delta_jk * e_il
                        let mut expected = alg.zero_elem();
                        if j == k {
                            let pos = pairs.iter().position(|&p| p == (i, l)).unwrap();
                            expected[pos] = field.one();
                        }
                        assert_eq!(prod, expected, "UT{n} product e{i}{j} * e{k}{l}");
                    }
                }
            }
        }
    }

    #[test]
    fn ut3_radical_and_idempotents() {
        let t = make_utn(Field::Rational, 3).unwrap();
        let alg = &t.algebra;
        // radical = strictly upper triangular part, dimension 3
        assert_eq!(alg.radical().unwrap().cols(), 3);
        assert_eq!(alg.primitive_idempotents().unwrap().len(), 3);
    }

    #[test]
    fn char_poly_of_companion() {
        // companion of x^2 - 3x + 2 over Q
        let d = Domain::Field(Field::Rational);
        let m = Mat::from_i64(d, &[&[0, -2], &[1, 3]]);
        let cp = char_poly(&m);
        assert_eq!(cp.len(), 3);
        assert_eq!(cp[0], d.from_i64(2));
        assert_eq!(cp[1], d.from_i64(-3));
        assert_eq!(cp[2], d.from_i64(1));
    }
}
