//! Smith normal form over Euclidean domains (integers, localized integers,
//! univariate polynomials), with tracked transforms and their inverses, plus
//! the solvers and lattice computations built on it.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Mat;
use crate::scalar::{Domain, Scalar};
use num::BigInt;

/// `u * m * v = d` with `u`, `v` invertible over the domain and `d` diagonal
/// with a divisibility chain. Inverses are tracked during elimination so
/// invertibility is certified by direct multiplication.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
    pub u_inv: Mat,
    pub v_inv: Mat,
    pub rank: usize,
}

struct Work {
    d: Mat,
    u: Mat,
    v: Mat,
    u_inv: Mat,
    v_inv: Mat,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.d, &mut self.u] {
            for j in 0..m.cols() {
                let (x, y) = (m.get(a, j).clone(), m.get(b, j).clone());
                m.set(a, j, y);
                m.set(b, j, x);
            }
        }
        let m = &mut self.u_inv;
        for i in 0..m.rows() {
            let (x, y) = (m.get(i, a).clone(), m.get(i, b).clone());
            m.set(i, a, y);
            m.set(i, b, x);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.d, &mut self.v] {
            for i in 0..m.rows() {
                let (x, y) = (m.get(i, a).clone(), m.get(i, b).clone());
                m.set(i, a, y);
                m.set(i, b, x);
            }
        }
        let m = &mut self.v_inv;
        for j in 0..m.cols() {
            let (x, y) = (m.get(a, j).clone(), m.get(b, j).clone());
            m.set(a, j, y);
            m.set(b, j, x);
        }
    }

    /// row_a += c * row_b
    fn add_row(&mut self, a: usize, b: usize, c: &Scalar) {
        for m in [&mut self.d, &mut self.u] {
            for j in 0..m.cols() {
                let v = m.get(a, j).add(&c.mul(m.get(b, j)));
                m.set(a, j, v);
            }
        }
        // inverse: col_b -= c * col_a
        let m = &mut self.u_inv;
        for i in 0..m.rows() {
            let v = m.get(i, b).sub(&c.mul(m.get(i, a)));
            m.set(i, b, v);
        }
    }

    /// col_a += c * col_b
    fn add_col(&mut self, a: usize, b: usize, c: &Scalar) {
        for m in [&mut self.d, &mut self.v] {
            for i in 0..m.rows() {
                let v = m.get(i, a).add(&c.mul(m.get(i, b)));
                m.set(i, a, v);
            }
        }
        let m = &mut self.v_inv;
        for j in 0..m.cols() {
            let v = m.get(b, j).sub(&c.mul(m.get(a, j)));
            m.set(b, j, v);
        }
    }

    /// row_a *= unit
    fn scale_row(&mut self, a: usize, unit: &Scalar) {
        let inv = unit.inv();
        for m in [&mut self.d, &mut self.u] {
            for j in 0..m.cols() {
                let v = m.get(a, j).mul(unit);
                m.set(a, j, v);
            }
        }
        let m = &mut self.u_inv;
        for i in 0..m.rows() {
            let v = m.get(i, a).mul(&inv);
            m.set(i, a, v);
        }
    }
}

/// The canonical associate: positive over the integers, a plain power of `p`
/// over localized integers, monic over `k[x]`.
fn canonical_associate(x: &Scalar) -> Scalar {
    match x {
        Scalar::Int(n) => Scalar::Int(num::Signed::abs(n)),
        Scalar::Local { p, .. } => {
            let val = x.euclid_norm().unwrap();
            let mut acc = Domain::Local(*p).one();
            let pscal = Domain::Local(*p).from_i64(*p as i64);
            let mut i = BigInt::from(0);
            while i < val {
                acc = acc.mul(&pscal);
                i += 1;
            }
            acc
        }
        Scalar::Poly { field, coeffs } => {
            let lead_inv = coeffs.last().unwrap().inv();
            Scalar::Poly {
                field: *field,
                coeffs: coeffs.iter().map(|c| c.mul(&lead_inv)).collect(),
            }
        }
        _ => x.clone(),
    }
}

/// Smith normal form. Pivot selection: minimal Euclidean norm, ties broken
/// by lowest (row, col) index, for deterministic output.
pub fn smith_normal_form(m: &Mat) -> Result<Snf> {
    let domain = m.domain();
    // fields are Euclidean with the zero norm; everything below degenerates
    // to Gaussian elimination for them
    if !domain.is_euclidean() && !domain.is_field() {
        return Err(Error::UnsupportedDomain(domain));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        d: m.clone(),
        u: Mat::identity(domain, rows),
        v: Mat::identity(domain, cols),
        u_inv: Mat::identity(domain, rows),
        v_inv: Mat::identity(domain, cols),
    };
    let mut t = 0;
    while t < rows && t < cols {
        // minimal-norm pivot in the trailing submatrix
        let mut pivot: Option<(BigInt, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(n) = w.d.get(i, j).euclid_norm() {
                    if pivot.as_ref().is_none_or(|(best, _, _)| n < *best) {
                        pivot = Some((n, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = pivot else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        let mut clean = true;
        for i in (t + 1)..rows {
            if !w.d.get(i, t).is_zero() {
                let (q, r) = w.d.get(i, t).div_rem(w.d.get(t, t));
                w.add_row(i, t, &q.neg());
                if !r.is_zero() {
                    clean = false;
                }
            }
        }
        for j in (t + 1)..cols {
            if !w.d.get(t, j).is_zero() {
                let (q, r) = w.d.get(t, j).div_rem(w.d.get(t, t));
                w.add_col(j, t, &q.neg());
                if !r.is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // smaller entries appeared; re-pivot
        }
        // enforce the divisibility chain: fold a non-divisible entry into row t
        let mut fixed = None;
        'outer: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !w.d.get(i, j).is_zero()
                    && w.d.get(i, j).div_exact(w.d.get(t, t)).is_none()
                {
                    fixed = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = fixed {
            w.add_row(t, i, &domain.one());
            continue;
        }
        // normalize the pivot to its canonical associate
        let canon = canonical_associate(w.d.get(t, t));
        if let Some(unit) = canon.div_exact(w.d.get(t, t)) {
            if !unit.is_one() {
                w.scale_row(t, &unit);
            }
        }
        t += 1;
    }
    Ok(Snf {
        rank: t,
        u: w.u,
        d: w.d,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    })
}

impl Snf {
    /// The nonunit diagonal entries (the invariant factors of the cokernel).
    pub fn torsion_factors(&self) -> Vec<Scalar> {
        (0..self.rank)
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_unit())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Why a linear system has no solution over a Euclidean domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconsistency {
    /// Right-hand side has support outside the column space (rank jump at
    /// the given row of the diagonalized system).
    RankJump { row: usize },
    /// `d_i` does not divide the transformed right-hand side at the row.
    Divisibility { row: usize, diag: Scalar },
}

/// Solve `a * x = b` exactly over the matrix's domain (field or Euclidean),
/// for a multi-column right-hand side. Returns the inconsistency certificate
/// when no solution exists.
pub fn solve(a: &Mat, b: &Mat) -> Result<std::result::Result<Mat, Inconsistency>> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "solve: {} rows vs {} rows",
            a.rows(),
            b.rows()
        )));
    }
    a.check_same_domain(b)?;
    if a.domain().is_field() {
        return Ok(linalg::solve_field(a, b)
            .ok_or(Inconsistency::RankJump { row: 0 }));
    }
    let snf = smith_normal_form(a)?;
    let ub = snf.u.mul(b);
    let mut y = Mat::zero(a.domain(), a.cols(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let rhs = ub.get(i, j);
            if i < snf.rank {
                match rhs.div_exact(snf.d.get(i, i)) {
                    Some(q) => y.set(i, j, q),
                    None => {
                        return Ok(Err(Inconsistency::Divisibility {
                            row: i,
                            diag: snf.d.get(i, i).clone(),
                        }))
                    }
                }
            } else if !rhs.is_zero() {
                return Ok(Err(Inconsistency::RankJump { row: i }));
            }
        }
    }
    Ok(Ok(snf.v.mul(&y)))
}

/// Convenience wrapper discarding the certificate.
pub fn try_solve(a: &Mat, b: &Mat) -> Option<Mat> {
    solve(a, b).ok()?.ok()
}

/// A free basis of `{x : a x = 0}` over a Euclidean domain (or field).
pub fn kernel_lattice(a: &Mat) -> Result<Mat> {
    if a.domain().is_field() {
        return Ok(linalg::rank_and_kernel(a)?.1);
    }
    let snf = smith_normal_form(a)?;
    let all: Vec<usize> = (0..a.cols()).collect();
    let free: Vec<usize> = (snf.rank..a.cols()).collect();
    Ok(snf.v.submatrix(&all, &free))
}

/// A free basis of the column lattice of `a`.
pub fn image_lattice(a: &Mat) -> Result<Mat> {
    if a.domain().is_field() {
        return Ok(linalg::image_basis_field(a));
    }
    let snf = smith_normal_form(a)?;
    let mut cols = Vec::new();
    for i in 0..snf.rank {
        let mut col = snf.u_inv.column(i);
        col = col.scale(snf.d.get(i, i));
        cols.push(col);
    }
    if cols.is_empty() {
        return Ok(Mat::zero(a.domain(), a.rows(), 0));
    }
    let mut out = cols[0].clone();
    for c in &cols[1..] {
        out = out.hstack(c);
    }
    Ok(out)
}

/// Generators of `{x : a x ∈ columnspan(b)}`, as columns.
pub fn preimage_lattice(a: &Mat, b: &Mat) -> Result<Mat> {
    assert_eq!(a.rows(), b.rows());
    let stacked = a.hstack(b);
    let ker = kernel_lattice(&stacked)?;
    let first: Vec<usize> = (0..a.cols()).collect();
    let kcols: Vec<usize> = (0..ker.cols()).collect();
    let gens = ker.submatrix(&first, &kcols);
    image_lattice(&gens)
}

/// Is every column of `b` in the column span of `a` (over the domain)?
pub fn in_span(a: &Mat, b: &Mat) -> bool {
    try_solve(a, b).is_some()
}

pub fn verify_snf(m: &Mat, snf: &Snf) -> bool {
    // U m V = D, inverses certify invertibility, chain divisibility
    let umv = snf.u.mul(m).mul(&snf.v);
    if umv != snf.d {
        return false;
    }
    let idr = Mat::identity(m.domain(), m.rows());
    let idc = Mat::identity(m.domain(), m.cols());
    if snf.u.mul(&snf.u_inv) != idr || snf.v.mul(&snf.v_inv) != idc {
        return false;
    }
    for i in 0..snf.rank.saturating_sub(1) {
        if snf.d.get(i + 1, i + 1).div_exact(snf.d.get(i, i)).is_none() {
            return false;
        }
    }
    // off-diagonal must vanish
    for i in 0..snf.d.rows() {
        for j in 0..snf.d.cols() {
            if i != j && !snf.d.get(i, j).is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{poly_x, Field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn snf_scalar_four() {
        let m = Mat::from_i64(Domain::Int, &[&[4]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.d.get(0, 0), &Domain::Int.from_i64(4));
        assert!(verify_snf(&m, &s));
    }

    #[test]
    fn snf_diag_2_3_gives_1_6() {
        let m = Mat::from_i64(Domain::Int, &[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&m).unwrap();
        assert!(verify_snf(&m, &s));
        assert_eq!(s.d.get(0, 0), &Domain::Int.from_i64(1));
        assert_eq!(s.d.get(1, 1), &Domain::Int.from_i64(6));
    }

    #[test]
    fn snf_poly_x() {
        let d = Domain::Poly(Field::Rational);
        let m = Mat::from_fn(d, 1, 1, |_, _| poly_x(Field::Rational));
        let s = smith_normal_form(&m).unwrap();
        assert!(verify_snf(&m, &s));
        assert_eq!(s.d.get(0, 0), &poly_x(Field::Rational));
    }

    #[test]
    fn snf_random_integer_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let m = Mat::from_fn(Domain::Int, r, c, |_, _| {
                Domain::Int.from_i64(rng.gen_range(-6..=6))
            });
            let s = smith_normal_form(&m).unwrap();
            assert!(verify_snf(&m, &s), "failed on {m:?}");
        }
    }

    #[test]
    fn snf_local_integers() {
        let d = Domain::Local(2);
        let m = Mat::from_i64(d, &[&[6, 4], &[2, 12]]);
        let s = smith_normal_form(&m).unwrap();
        assert!(verify_snf(&m, &s));
        // diagonal entries are powers of 2 (all entries have valuation >= 1)
        assert_eq!(s.d.get(0, 0), &d.from_i64(2));
        // det = 64 = 2^6, so the second invariant factor has valuation 5
        assert_eq!(s.d.get(1, 1).euclid_norm().unwrap(), num::BigInt::from(5));
    }

    #[test]
    fn solve_identity() {
        let a = Mat::identity(Domain::Int, 2);
        let b = Mat::from_i64(Domain::Int, &[&[9], &[-4]]);
        assert_eq!(try_solve(&a, &b).unwrap(), b);
    }

    #[test]
    fn solve_two_x_eq_three_fails_with_divisibility() {
        let a = Mat::from_i64(Domain::Int, &[&[2]]);
        let b = Mat::from_i64(Domain::Int, &[&[3]]);
        match solve(&a, &b).unwrap() {
            Err(Inconsistency::Divisibility { diag, .. }) => {
                assert_eq!(diag, Domain::Int.from_i64(2));
            }
            other => panic!("expected divisibility certificate, got {other:?}"),
        }
    }

    #[test]
    fn solve_random_consistent_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=4);
            let a = Mat::from_fn(Domain::Int, r, c, |_, _| {
                Domain::Int.from_i64(rng.gen_range(-5..=5))
            });
            let x0 = Mat::from_fn(Domain::Int, c, 1, |_, _| {
                Domain::Int.from_i64(rng.gen_range(-5..=5))
            });
            let b = a.mul(&x0);
            let x = try_solve(&a, &b).expect("constructed system must be solvable");
            assert_eq!(a.mul(&x), b);
        }
    }

    #[test]
    fn kernel_lattice_is_exact() {
        let a = Mat::from_i64(Domain::Int, &[&[2, 4], &[1, 2]]);
        let k = kernel_lattice(&a).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
    }

    #[test]
    fn determinism_bit_for_bit() {
        let m = Mat::from_i64(Domain::Int, &[&[6, 4, 2], &[2, 8, 4]]);
        let s1 = smith_normal_form(&m).unwrap();
        let s2 = smith_normal_form(&m).unwrap();
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.d, s2.d);
        assert_eq!(s1.v, s2.v);
    }
}
