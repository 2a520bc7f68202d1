//! Exact coefficient arithmetic for the five supported domains: rationals,
//! prime fields, integers, integers localized at a prime, and univariate
//! polynomials over a field. No floating point anywhere.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::Serialize;
use std::fmt;

/// A coefficient field: the rationals or a prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(BigRational::zero()),
            Field::Prime(p) => Scalar::Fp { p: *p, v: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(BigRational::one()),
            Field::Prime(p) => Scalar::Fp { p: *p, v: 1 % *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(BigRational::from(BigInt::from(n))),
            Field::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Fp { p: *p, v: m }
            }
        }
    }

    /// All field elements, for exhaustive checks. Only meaningful for prime fields.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some((0..*p).map(|v| Scalar::Fp { p: *p, v }).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// The coefficient domain of a matrix. A closed enumeration: every ring
/// backend in scope reduces its linear algebra to one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Domain {
    /// A field (rationals or `F_p`). Supports Gaussian elimination.
    Field(Field),
    /// The integers.
    Int,
    /// Integers localized at a prime `p`: fractions with denominator coprime to `p`.
    Local(u64),
    /// Univariate polynomials over a field, in one variable `x`.
    Poly(Field),
}

impl Domain {
    pub fn is_field(&self) -> bool {
        matches!(self, Domain::Field(_))
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, Domain::Int | Domain::Local(_) | Domain::Poly(_))
    }

    /// The field of fractions, for rank computations over Euclidean domains.
    pub fn fraction_field(&self) -> Field {
        match self {
            Domain::Field(k) => *k,
            Domain::Int | Domain::Local(_) => Field::Rational,
            Domain::Poly(_) => unreachable!("no represented fraction field for k[x]"),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Domain::Field(k) => k.zero(),
            Domain::Int => Scalar::Int(BigInt::zero()),
            Domain::Local(p) => Scalar::Local {
                p: *p,
                num: BigInt::zero(),
                den: BigInt::one(),
            },
            Domain::Poly(k) => Scalar::Poly {
                field: *k,
                coeffs: vec![],
            },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Domain::Field(k) => k.one(),
            Domain::Int => Scalar::Int(BigInt::one()),
            Domain::Local(p) => Scalar::Local {
                p: *p,
                num: BigInt::one(),
                den: BigInt::one(),
            },
            Domain::Poly(k) => Scalar::Poly {
                field: *k,
                coeffs: vec![k.one()],
            },
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Domain::Field(k) => k.from_i64(n),
            Domain::Int => Scalar::Int(BigInt::from(n)),
            Domain::Local(p) => Scalar::Local {
                p: *p,
                num: BigInt::from(n),
                den: BigInt::one(),
            },
            Domain::Poly(k) => {
                let c = k.from_i64(n);
                if c.is_zero() {
                    self.zero()
                } else {
                    Scalar::Poly {
                        field: *k,
                        coeffs: vec![c],
                    }
                }
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Field(k) => write!(f, "{k}"),
            Domain::Int => write!(f, "Z"),
            Domain::Local(p) => write!(f, "Z_({p})"),
            Domain::Poly(k) => write!(f, "{k}[x]"),
        }
    }
}

/// An exact ring element. Rationals and localized integers are kept reduced;
/// polynomials carry no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { p: u64, v: u64 },
    Int(BigInt),
    Local { p: u64, num: BigInt, den: BigInt },
    Poly { field: Field, coeffs: Vec<Scalar> },
}

fn fp_mul(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_inv(p: u64, a: u64) -> u64 {
    // extended Euclid
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "element not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

fn local_reduce(p: u64, num: BigInt, den: BigInt) -> Scalar {
    let mut num = num;
    let mut den = den;
    assert!(!den.is_zero());
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let g = num.gcd(&den);
    if !g.is_zero() && !g.is_one() {
        num /= &g;
        den /= &g;
    }
    let pb = BigInt::from(p);
    assert!(
        den.gcd(&pb).is_one(),
        "denominator not coprime to {p} in localized integer"
    );
    Scalar::Local { p, num, den }
}

fn poly_trim(field: Field, mut coeffs: Vec<Scalar>) -> Scalar {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    Scalar::Poly { field, coeffs }
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Rat(_) => Domain::Field(Field::Rational),
            Scalar::Fp { p, .. } => Domain::Field(Field::Prime(*p)),
            Scalar::Int(_) => Domain::Int,
            Scalar::Local { p, .. } => Domain::Local(*p),
            Scalar::Poly { field, .. } => Domain::Poly(*field),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Int(n) => n.is_zero(),
            Scalar::Local { num, .. } => num.is_zero(),
            Scalar::Poly { coeffs, .. } => coeffs.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.domain().one()
    }

    /// Units of the coefficient domain.
    pub fn is_unit(&self) -> bool {
        match self {
            Scalar::Rat(r) => !r.is_zero(),
            Scalar::Fp { v, .. } => *v != 0,
            Scalar::Int(n) => n.abs().is_one(),
            Scalar::Local { num, p, .. } => {
                !num.is_zero() && num.gcd(&BigInt::from(*p)).is_one()
            }
            Scalar::Poly { coeffs, .. } => coeffs.len() == 1,
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q);
                Scalar::Fp { p: *p, v: (a + b) % p }
            }
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (
                Scalar::Local { p, num: an, den: ad },
                Scalar::Local { p: q, num: bn, den: bd },
            ) => {
                assert_eq!(p, q);
                local_reduce(*p, an * bd + bn * ad, ad * bd)
            }
            (
                Scalar::Poly { field, coeffs: a },
                Scalar::Poly { field: g, coeffs: b },
            ) => {
                assert_eq!(field, g);
                let n = a.len().max(b.len());
                let z = field.zero();
                let coeffs = (0..n)
                    .map(|i| a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z)))
                    .collect();
                poly_trim(*field, coeffs)
            }
            _ => panic!("scalar domain mismatch in add: {self:?} vs {rhs:?}"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
            Scalar::Int(a) => Scalar::Int(-a),
            Scalar::Local { p, num, den } => Scalar::Local {
                p: *p,
                num: -num,
                den: den.clone(),
            },
            Scalar::Poly { field, coeffs } => Scalar::Poly {
                field: *field,
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
            },
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q);
                Scalar::Fp { p: *p, v: fp_mul(*p, *a, *b) }
            }
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (
                Scalar::Local { p, num: an, den: ad },
                Scalar::Local { p: q, num: bn, den: bd },
            ) => {
                assert_eq!(p, q);
                local_reduce(*p, an * bn, ad * bd)
            }
            (
                Scalar::Poly { field, coeffs: a },
                Scalar::Poly { field: g, coeffs: b },
            ) => {
                assert_eq!(field, g);
                if a.is_empty() || b.is_empty() {
                    return Scalar::Poly { field: *field, coeffs: vec![] };
                }
                let mut out = vec![field.zero(); a.len() + b.len() - 1];
                for (i, ai) in a.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        out[i + j] = out[i + j].add(&ai.mul(bj));
                    }
                }
                poly_trim(*field, out)
            }
            _ => panic!("scalar domain mismatch in mul: {self:?} vs {rhs:?}"),
        }
    }

    /// Multiplicative inverse of a unit. Panics on non-units.
    pub fn inv(&self) -> Scalar {
        assert!(self.is_unit(), "inverse of a non-unit: {self:?}");
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Fp { p, v } => Scalar::Fp { p: *p, v: fp_inv(*p, *v) },
            Scalar::Int(a) => Scalar::Int(a.clone()),
            Scalar::Local { p, num, den } => local_reduce(*p, den.clone(), num.clone()),
            Scalar::Poly { field, coeffs } => Scalar::Poly {
                field: *field,
                coeffs: vec![coeffs[0].inv()],
            },
        }
    }

    /// Euclidean norm used for SNF pivot selection: `|a|` over the integers,
    /// the p-adic valuation over localized integers, the degree over `k[x]`.
    /// `None` for zero.
    pub fn euclid_norm(&self) -> Option<BigInt> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Int(a) => Some(a.abs()),
            Scalar::Local { p, num, .. } => {
                let pb = BigInt::from(*p);
                let mut n = num.abs();
                let mut val = BigInt::zero();
                while (&n % &pb).is_zero() {
                    n /= &pb;
                    val += 1;
                }
                Some(val)
            }
            Scalar::Poly { coeffs, .. } => Some(BigInt::from(coeffs.len() as i64 - 1)),
            _ => Some(BigInt::zero()),
        }
    }

    /// Division with remainder in a Euclidean domain: `self = q*rhs + r` with
    /// `r` of smaller norm (minimal remainder over the integers).
    pub fn div_rem(&self, rhs: &Scalar) -> (Scalar, Scalar) {
        assert!(!rhs.is_zero(), "division by zero");
        match (self, rhs) {
            (Scalar::Int(a), Scalar::Int(b)) => {
                let (mut q, mut r) = a.div_rem(b);
                // minimal remainder: |r| <= |b|/2
                if r.abs() * 2 > b.abs() {
                    if (r.is_negative()) == (b.is_negative()) {
                        q += 1;
                        r -= b;
                    } else {
                        q -= 1;
                        r += b;
                    }
                }
                (Scalar::Int(q), Scalar::Int(r))
            }
            (
                Scalar::Local { p, num: an, den: ad },
                Scalar::Local { num: bn, den: bd, .. },
            ) => {
                let na = self.euclid_norm();
                let nb = rhs.euclid_norm().unwrap();
                match na {
                    Some(va) if va >= nb => {
                        // exact division in the local ring: the p-power of the
                        // denominator cancels during reduction
                        (local_reduce(*p, an * bd, ad * bn), self.domain().zero())
                    }
                    None => (self.domain().zero(), self.domain().zero()),
                    _ => (self.domain().zero(), self.clone()),
                }
            }
            (
                Scalar::Poly { field, coeffs: a },
                Scalar::Poly { field: g, coeffs: b },
            ) => {
                assert_eq!(field, g);
                let mut rem = a.clone();
                let db = b.len() - 1;
                let lead_inv = b[db].inv();
                let mut q = vec![field.zero(); a.len().saturating_sub(db)];
                while rem.len() > db || (rem.len() == b.len() && !rem.is_empty()) {
                    if rem.len() < b.len() {
                        break;
                    }
                    let shift = rem.len() - b.len();
                    let c = rem.last().unwrap().mul(&lead_inv);
                    q[shift] = c.clone();
                    for (i, bi) in b.iter().enumerate() {
                        rem[shift + i] = rem[shift + i].sub(&c.mul(bi));
                    }
                    while rem.last().is_some_and(|c| c.is_zero()) {
                        rem.pop();
                    }
                }
                (poly_trim(*field, q), poly_trim(*field, rem))
            }
            _ if self.domain().is_field() => {
                (self.mul(&rhs.inv()), self.domain().zero())
            }
            _ => panic!("div_rem on mismatched domains"),
        }
    }

    /// Exact division; `None` when `rhs` does not divide `self`.
    pub fn div_exact(&self, rhs: &Scalar) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.domain().zero());
        }
        if rhs.is_zero() {
            return None;
        }
        if self.domain().is_field() {
            return Some(self.mul(&rhs.inv()));
        }
        let (q, r) = self.div_rem(rhs);
        r.is_zero().then_some(q)
    }

    /// View an element of a Euclidean subring of Q inside the rationals.
    pub fn to_rational(&self) -> Scalar {
        match self {
            Scalar::Int(a) => Scalar::Rat(BigRational::from(a.clone())),
            Scalar::Local { num, den, .. } => {
                Scalar::Rat(BigRational::new(num.clone(), den.clone()))
            }
            Scalar::Rat(_) => self.clone(),
            _ => panic!("no rational embedding for {self:?}"),
        }
    }

    pub fn int_value(&self) -> &BigInt {
        match self {
            Scalar::Int(a) => a,
            _ => panic!("not an integer scalar"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
            Scalar::Int(n) => write!(f, "{n}"),
            Scalar::Local { num, den, .. } => {
                if den.is_one() {
                    write!(f, "{num}")
                } else {
                    write!(f, "{num}/{den}")
                }
            }
            Scalar::Poly { coeffs, .. } => {
                if coeffs.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (i, c) in coeffs.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match i {
                        0 => write!(f, "{c}")?,
                        1 if c.is_one() => write!(f, "x")?,
                        1 => write!(f, "{c}*x")?,
                        _ if c.is_one() => write!(f, "x^{i}")?,
                        _ => write!(f, "{c}*x^{i}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// The polynomial `x` in `k[x]`.
pub fn poly_x(field: Field) -> Scalar {
    Scalar::Poly {
        field,
        coeffs: vec![field.zero(), field.one()],
    }
}

/// Build a polynomial from low-to-high integer coefficients.
pub fn poly_from_coeffs(field: Field, coeffs: &[i64]) -> Scalar {
    poly_trim(
        field,
        coeffs.iter().map(|&c| field.from_i64(c)).collect(),
    )
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_reduced() {
        let d = Domain::Field(Field::Rational);
        let a = d.from_i64(2);
        let b = d.from_i64(4);
        let q = a.div_exact(&b).unwrap();
        assert_eq!(format!("{q}"), "1/2");
    }

    #[test]
    fn fp_inverse() {
        let k = Field::Prime(7);
        let a = k.from_i64(3);
        assert!(a.mul(&a.inv()).is_one());
    }

    #[test]
    fn integer_min_remainder() {
        let a = Scalar::Int(BigInt::from(7));
        let b = Scalar::Int(BigInt::from(4));
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.int_value(), &BigInt::from(2));
        assert_eq!(r.int_value(), &BigInt::from(-1));
    }

    #[test]
    fn local_units_and_norm() {
        let d = Domain::Local(2);
        let three = d.from_i64(3);
        assert!(three.is_unit());
        let twelve = d.from_i64(12);
        assert_eq!(twelve.euclid_norm().unwrap(), BigInt::from(2));
        assert!(!twelve.is_unit());
        let q = twelve.div_exact(&d.from_i64(4)).unwrap();
        assert_eq!(q, d.from_i64(3));
    }

    #[test]
    #[should_panic]
    fn local_rejects_bad_denominator() {
        local_reduce(2, BigInt::from(1), BigInt::from(2));
    }

    #[test]
    fn poly_div_rem() {
        let k = Field::Rational;
        // x^2 + 1 = (x)(x) + 1
        let f = poly_from_coeffs(k, &[1, 0, 1]);
        let x = poly_x(k);
        let (q, r) = f.div_rem(&x);
        assert_eq!(q, x);
        assert_eq!(r, poly_from_coeffs(k, &[1]));
    }

    #[test]
    fn poly_units_are_constants() {
        let k = Field::Prime(2);
        assert!(poly_from_coeffs(k, &[1]).is_unit());
        assert!(!poly_x(k).is_unit());
    }
}
