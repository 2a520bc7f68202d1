//! Dense exact matrices over a single coefficient domain.

use crate::error::{Error, Result};
use crate::scalar::{Domain, Scalar};
use std::fmt;

/// A dense matrix. All entries share one domain; immutable once built (the
/// mutating helpers are crate-internal and used only during construction).
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    domain: Domain,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zero(domain: Domain, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            domain,
            data: vec![domain.zero(); rows * cols],
        }
    }

    pub fn identity(domain: Domain, n: usize) -> Mat {
        let mut m = Mat::zero(domain, n, n);
        for i in 0..n {
            m.set(i, i, domain.one());
        }
        m
    }

    pub fn from_fn(
        domain: Domain,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.domain(), domain, "entry domain mismatch");
                data.push(e);
            }
        }
        Mat { rows, cols, domain, data }
    }

    /// Integer grid constructor, the common case in tests and the DSL.
    pub fn from_i64(domain: Domain, grid: &[&[i64]]) -> Mat {
        let rows = grid.len();
        let cols = grid.first().map_or(0, |r| r.len());
        Mat::from_fn(domain, rows, cols, |i, j| domain.from_i64(grid[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.domain(), self.domain);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn check_same_domain(&self, other: &Mat) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: format!("{}", self.domain),
                found: format!("{}", other.domain),
            });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        assert_eq!(self.domain, rhs.domain);
        Mat::from_fn(self.domain, self.rows, rhs.cols, |i, j| {
            let mut acc = self.domain.zero();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.domain, self.rows, self.cols, |i, j| {
            self.get(i, j).add(rhs.get(i, j))
        })
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.domain, self.rows, self.cols, |i, j| {
            self.get(i, j).sub(rhs.get(i, j))
        })
    }

    pub fn neg(&self) -> Mat {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        self.map(|e| e.mul(c))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.domain, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        let data: Vec<Scalar> = self.data.iter().map(f).collect();
        let domain = data.first().map_or(self.domain, |e| e.domain());
        Mat { rows: self.rows, cols: self.cols, domain, data }
    }

    pub fn column(&self, j: usize) -> Mat {
        Mat::from_fn(self.domain, self.rows, 1, |i, _| self.get(i, j).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(self.domain, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.domain, rhs.domain);
        Mat::from_fn(self.domain, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.cols);
        assert_eq!(self.domain, rhs.domain);
        Mat::from_fn(self.domain, self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                rhs.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        assert!(!blocks.is_empty());
        let domain = blocks[0].domain;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zero(domain, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(ro + i, co + j, b.get(i, j).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.domain, rhs.domain);
        Mat::from_fn(
            self.domain,
            self.rows * rhs.rows,
            self.cols * rhs.cols,
            |i, j| {
                let (ia, ib) = (i / rhs.rows, i % rhs.rows);
                let (ja, jb) = (j / rhs.cols, j % rhs.cols);
                self.get(ia, ja).mul(rhs.get(ib, jb))
            },
        )
    }

    /// Embed an integer or localized-integer matrix into the rationals.
    pub fn to_rational(&self) -> Mat {
        self.map(|e| e.to_rational())
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.domain)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    #[test]
    fn product_and_identity() {
        let d = Domain::Int;
        let a = Mat::from_i64(d, &[&[1, 2], &[3, 4]]);
        let i = Mat::identity(d, 2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(i.mul(&a), a);
    }

    #[test]
    fn kron_shape() {
        let d = Domain::Field(Field::Rational);
        let a = Mat::identity(d, 2);
        let b = Mat::from_i64(d, &[&[1, 2, 3]]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 6));
        assert_eq!(k.get(1, 4), &d.from_i64(2));
        assert!(k.get(0, 4).is_zero());
    }
}
