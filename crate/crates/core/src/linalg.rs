//! Exact Gaussian elimination over fields: rank, kernel, image, solving.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Reduced row echelon form together with the pivot column indices.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    assert!(m.domain().is_field(), "rref requires a field");
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                let (x, y) = (a.get(r, j).clone(), a.get(pr, j).clone());
                a.set(r, j, y);
                a.set(pr, j, x);
            }
        }
        let inv = a.get(r, c).inv();
        for j in 0..cols {
            let v = a.get(r, j).mul(&inv);
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i != r && !a.get(i, c).is_zero() {
                let f = a.get(i, c).clone();
                for j in 0..cols {
                    let v = a.get(i, j).sub(&f.mul(a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Mat) -> usize {
    rref(m).1.len()
}

/// Rank and a basis of the right kernel, columns independent and spanning.
pub fn rank_and_kernel(m: &Mat) -> Result<(usize, Mat)> {
    if !m.domain().is_field() {
        return Err(Error::NotAField(m.domain()));
    }
    let (r, pivots) = rref(m);
    let rank = pivots.len();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut kernel = Mat::zero(m.domain(), m.cols(), free.len());
    for (k, &fc) in free.iter().enumerate() {
        kernel.set(fc, k, m.domain().one());
        for (row, &pc) in pivots.iter().enumerate() {
            kernel.set(pc, k, r.get(row, fc).neg());
        }
    }
    Ok((rank, kernel))
}

/// Solve `A x = b` over a field; `None` when inconsistent. `b` may have
/// several columns (solved simultaneously).
pub fn solve_field(a: &Mat, b: &Mat) -> Option<Mat> {
    assert!(a.domain().is_field());
    assert_eq!(a.rows(), b.rows());
    let aug = a.hstack(b);
    let (r, pivots) = rref(&aug);
    // any pivot in the b-block means inconsistency
    if pivots.iter().any(|&c| c >= a.cols()) {
        return None;
    }
    let mut x = Mat::zero(a.domain(), a.cols(), b.cols());
    for (row, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(pc, j, r.get(row, a.cols() + j).clone());
        }
    }
    Some(x)
}

/// A basis of the column space over a field (the pivot columns of `m`).
pub fn image_basis_field(m: &Mat) -> Mat {
    let (_, pivots) = rref(m);
    let all_rows: Vec<usize> = (0..m.rows()).collect();
    m.submatrix(&all_rows, &pivots)
}

/// Does the column span of `sub` lie inside the column span of `ambient`?
pub fn spans_subset(sub: &Mat, ambient: &Mat) -> bool {
    solve_field(ambient, sub).is_some()
}

/// Intersect two column spans over a field; returns a basis.
pub fn span_intersection(a: &Mat, b: &Mat) -> Mat {
    // x in both spans: a*u = b*v; kernel of [a | -b]
    let stacked = a.hstack(&b.neg());
    let (_, ker) = rank_and_kernel(&stacked).expect("field");
    let mut gens = Mat::zero(a.domain(), a.rows(), ker.cols());
    for k in 0..ker.cols() {
        for i in 0..a.rows() {
            let mut acc = a.domain().zero();
            for j in 0..a.cols() {
                acc = acc.add(&a.get(i, j).mul(ker.get(j, k)));
            }
            gens.set(i, k, acc);
        }
    }
    image_basis_field(&gens)
}

/// Sum of two column spans; returns a basis.
pub fn span_sum(a: &Mat, b: &Mat) -> Mat {
    image_basis_field(&a.hstack(b))
}

/// Independent brute-force Gaussian elimination used as a test oracle: plain
/// forward elimination with partial (first-nonzero) pivoting, counting steps.
pub fn oracle_rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut row = 0;
    for c in 0..cols {
        let mut pivot = None;
        for i in row..rows {
            if !a.get(i, c).is_zero() {
                pivot = Some(i);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        for j in 0..cols {
            let (x, y) = (a.get(row, j).clone(), a.get(p, j).clone());
            a.set(row, j, y);
            a.set(p, j, x);
        }
        for i in (row + 1)..rows {
            if !a.get(i, c).is_zero() {
                let f = a.get(i, c).div_exact(a.get(row, c)).expect("field");
                for j in 0..cols {
                    let v = a.get(i, j).sub(&f.mul(a.get(row, j)));
                    a.set(i, j, v);
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Evaluate `m * v` for a single column `v` given as a slice.
pub fn apply(m: &Mat, v: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(m.cols(), v.len());
    (0..m.rows())
        .map(|i| {
            let mut acc = m.domain().zero();
            for j in 0..m.cols() {
                acc = acc.add(&m.get(i, j).mul(&v[j]));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Domain, Field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const QQ: Domain = Domain::Field(Field::Rational);

    #[test]
    fn identity_has_full_rank_empty_kernel() {
        let m = Mat::identity(QQ, 2);
        let (r, k) = rank_and_kernel(&m).unwrap();
        assert_eq!(r, 2);
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn row_vector_kernel() {
        // (1 1) has kernel spanned by (1, -1)
        let m = Mat::from_i64(QQ, &[&[1, 1]]);
        let (r, k) = rank_and_kernel(&m).unwrap();
        assert_eq!(r, 1);
        assert_eq!(k.cols(), 1);
        let prod = m.mul(&k);
        assert!(prod.is_zero());
        let ratio = k.get(0, 0).div_exact(k.get(1, 0)).unwrap();
        assert_eq!(ratio, QQ.from_i64(-1));
    }

    #[test]
    fn koszul_differential_rank() {
        // the 2x... Koszul differential (y, -x) specialized at generic rationals
        let m = Mat::from_i64(QQ, &[&[5, -3]]); // y=5, x=3
        assert_eq!(rank(&m), 1);
        assert_eq!(oracle_rank(&m), 1);
    }

    #[test]
    fn rank_matches_oracle_on_random_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let m = Mat::from_fn(QQ, 5, 5, |_, _| QQ.from_i64(rng.gen_range(-3..=3)));
            let (r, k) = rank_and_kernel(&m).unwrap();
            assert_eq!(r, oracle_rank(&m));
            assert_eq!(k.cols(), 5 - r);
            assert!(m.mul(&k).is_zero());
            // left kernel dimension agrees: rank = rows - dim(left kernel)
            let (rt, _) = rank_and_kernel(&m.transpose()).unwrap();
            assert_eq!(rt, r);
        }
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = Mat::identity(QQ, 3);
        let b = Mat::from_i64(QQ, &[&[5], &[-2], &[7]]);
        assert_eq!(solve_field(&a, &b).unwrap(), b);
    }

    #[test]
    fn rejects_non_field_domain() {
        let m = Mat::identity(Domain::Int, 2);
        assert!(rank_and_kernel(&m).is_err());
    }

    #[test]
    fn fp_elimination() {
        let d = Domain::Field(Field::Prime(2));
        let m = Mat::from_i64(d, &[&[1, 1], &[1, 1]]);
        assert_eq!(rank(&m), 1);
    }
}
