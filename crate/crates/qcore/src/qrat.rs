//! The coefficient field: rational functions in `q` and declared parameters.

use crate::poly::{gcd, MPoly};
use crate::QCoreError;
use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// Ordered registry of auxiliary parameter names. Variable 0 is always `q`;
/// parameter `i` in the list is variable `i + 1`.
#[derive(Clone, Debug, Default)]
pub struct ParamContext {
    names: Arc<Vec<String>>,
}

impl ParamContext {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Self {
        ParamContext {
            names: Arc::new(names.into_iter().map(Into::into).collect()),
        }
    }

    pub fn empty() -> Self {
        ParamContext::default()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The parameter as a QRat; errors on undeclared names.
    pub fn param(&self, name: &str) -> Result<QRat, QCoreError> {
        match self.names.iter().position(|n| n == name) {
            Some(i) => Ok(QRat::from_poly(MPoly::var_pow(i + 1, 1))),
            None => Err(QCoreError::UndeclaredParameter(name.to_string())),
        }
    }

    pub fn var_name(&self, var: usize) -> String {
        if var == 0 {
            "q".to_string()
        } else {
            self.names
                .get(var - 1)
                .cloned()
                .unwrap_or_else(|| format!("p{}", var))
        }
    }
}

/// Exact rational function in `q` and parameters, stored reduced:
/// gcd(num, den) = 1, integer content coprime across the pair, and the
/// denominator's lex-leading coefficient positive. Equality is structural.
#[derive(Clone, PartialEq, Eq)]
pub struct QRat {
    num: MPoly,
    den: MPoly,
}

impl QRat {
    fn reduced(num: MPoly, den: MPoly) -> QRat {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return QRat {
                num: MPoly::zero(),
                den: MPoly::one(),
            };
        }
        let g = gcd(&num, &den);
        QRat::from_reduced_parts(num.div_exact(&g), den.div_exact(&g))
    }

    /// Pack parts already known to be coprime; fixes the sign convention
    /// (integer contents are coprime by construction of `gcd`).
    fn from_reduced_parts(mut num: MPoly, mut den: MPoly) -> QRat {
        if den.lead_sign() == Sign::Minus {
            num = num.neg();
            den = den.neg();
        }
        QRat { num, den }
    }

    pub fn from_poly(p: MPoly) -> QRat {
        QRat {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn zero() -> QRat {
        QRat::from_poly(MPoly::zero())
    }

    pub fn one() -> QRat {
        QRat::from_poly(MPoly::one())
    }

    pub fn from_int(n: i64) -> QRat {
        QRat::from_poly(MPoly::constant(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> QRat {
        assert!(d != 0);
        QRat::reduced(
            MPoly::constant(BigInt::from(n)),
            MPoly::constant(BigInt::from(d)),
        )
    }

    pub fn from_big_ratio(r: &BigRational) -> QRat {
        QRat::reduced(
            MPoly::constant(r.numer().clone()),
            MPoly::constant(r.denom().clone()),
        )
    }

    /// The distinguished deformation variable `q`.
    pub fn q() -> QRat {
        QRat::from_poly(MPoly::var_pow(0, 1))
    }

    /// `q^n` for any integer `n` (negative powers go to the denominator).
    pub fn q_pow(n: i64) -> QRat {
        if n >= 0 {
            QRat::from_poly(MPoly::var_pow(0, n as u32))
        } else {
            QRat {
                num: MPoly::one(),
                den: MPoly::var_pow(0, (-n) as u32),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn inv(&self) -> QRat {
        assert!(!self.is_zero(), "inverse of zero");
        QRat::from_reduced_parts(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: i64) -> QRat {
        if n == 0 {
            return QRat::one();
        }
        // coprime parts stay coprime under powers, so no reduction needed
        let base = if n < 0 { self.inv() } else { self.clone() };
        let e = n.unsigned_abs() as u32;
        QRat::from_reduced_parts(base.num.pow(e), base.den.pow(e))
    }

    /// Exact evaluation at a point; `assign(var)` supplies each variable's value.
    pub fn eval(&self, assign: &dyn Fn(usize) -> BigRational) -> Result<BigRational, QCoreError> {
        let d = self.den.eval(assign);
        if d.is_zero() {
            return Err(QCoreError::PoleAtPoint);
        }
        Ok(self.num.eval(assign) / d)
    }

    /// Evaluate with `q := value` keeping parameters formal.
    pub fn substitute_q(&self, value: &QRat) -> Result<QRat, QCoreError> {
        // write value = vn/vd and clear denominators degree by degree
        let dq_num = self.num.degree_in(0);
        let dq_den = self.den.degree_in(0);
        let subst = |p: &MPoly, top: u32| -> MPoly {
            // sum_k coeff_k(params) * vn^k * vd^(top-k)
            let mut acc = MPoly::zero();
            for (expo, c) in p.terms() {
                let k = expo.first().copied().unwrap_or(0);
                let mut rest = expo.clone();
                if !rest.is_empty() {
                    rest[0] = 0;
                }
                let base = MPoly::monomial(rest, c.clone());
                let term = base
                    .mul(&value.num.pow(k))
                    .mul(&value.den.pow(top - k));
                acc = acc.add(&term);
            }
            acc
        };
        let top = dq_num.max(dq_den);
        let n = subst(&self.num, top);
        let d = subst(&self.den, top);
        if d.is_zero() {
            return Err(QCoreError::PoleAtPoint);
        }
        Ok(QRat::reduced(n, d))
    }

    /// The q -> 1 specialization (parameters stay formal).
    pub fn limit_q1(&self) -> Result<QRat, QCoreError> {
        // after reduction a finite limit shows up as den(1) != 0; when the
        // reduced denominator still vanishes at q = 1 the value has a pole
        let n = self.num.substitute(0, &MPoly::one());
        let d = self.den.substitute(0, &MPoly::one());
        if d.is_zero() {
            return Err(QCoreError::PoleAtPoint);
        }
        Ok(QRat::reduced(n, d))
    }

    /// Partial derivative with respect to variable index (0 = q, i+1 = param i).
    pub fn derivative(&self, var: usize) -> QRat {
        let n = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        QRat::reduced(n, self.den.mul(&self.den))
    }

    /// Substitute a parameter variable by an arbitrary rational function.
    pub fn substitute_var(&self, var: usize, value: &QRat) -> Result<QRat, QCoreError> {
        let top = self.num.degree_in(var).max(self.den.degree_in(var));
        let subst = |p: &MPoly| -> MPoly {
            let mut acc = MPoly::zero();
            for (expo, c) in p.terms() {
                let k = expo.get(var).copied().unwrap_or(0);
                let mut rest = expo.clone();
                if var < rest.len() {
                    rest[var] = 0;
                }
                let base = MPoly::monomial(rest, c.clone());
                let term = base.mul(&value.num.pow(k)).mul(&value.den.pow(top - k));
                acc = acc.add(&term);
            }
            acc
        };
        let n = subst(&self.num);
        let d = subst(&self.den);
        if d.is_zero() {
            return Err(QCoreError::PoleAtPoint);
        }
        Ok(QRat::reduced(n, d))
    }

    /// Render using a context for parameter names.
    pub fn render(&self, ctx: &ParamContext) -> String {
        let name = |i: usize| ctx.var_name(i);
        if self.den.is_one() {
            self.num.render(&name)
        } else {
            let ns = self.num.render(&name);
            let ds = self.den.render(&name);
            let wrap = |s: String, p: &MPoly| {
                if p.num_terms() > 1 {
                    format!("({})", s)
                } else {
                    s
                }
            };
            format!("{}/{}", wrap(ns, &self.num), wrap(ds, &self.den))
        }
    }
}

impl fmt::Debug for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&ParamContext::empty()))
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&ParamContext::empty()))
    }
}

// The ring ops exploit that operands are stored reduced, so only small
// cross-gcds are needed instead of one giant reduction per operation.

fn add_sub(a: &QRat, b: &QRat, negate: bool) -> QRat {
    let bnum = if negate { b.num.neg() } else { b.num.clone() };
    let d = gcd(&a.den, &b.den);
    if d.is_one() {
        // coprime denominators: the result is already in lowest terms
        let num = a.num.mul(&b.den).add(&bnum.mul(&a.den));
        return QRat::from_reduced_parts(num, a.den.mul(&b.den));
    }
    let da = a.den.div_exact(&d);
    let db = b.den.div_exact(&d);
    let t = a.num.mul(&db).add(&bnum.mul(&da));
    if t.is_zero() {
        return QRat::zero();
    }
    let g = gcd(&t, &d);
    QRat::from_reduced_parts(t.div_exact(&g), da.mul(&b.den.div_exact(&g)))
}

impl Add for &QRat {
    type Output = QRat;
    fn add(self, rhs: &QRat) -> QRat {
        add_sub(self, rhs, false)
    }
}

impl Sub for &QRat {
    type Output = QRat;
    fn sub(self, rhs: &QRat) -> QRat {
        add_sub(self, rhs, true)
    }
}

impl Mul for &QRat {
    type Output = QRat;
    fn mul(self, rhs: &QRat) -> QRat {
        if self.is_zero() || rhs.is_zero() {
            return QRat::zero();
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        QRat::from_reduced_parts(
            self.num.div_exact(&g1).mul(&rhs.num.div_exact(&g2)),
            self.den.div_exact(&g2).mul(&rhs.den.div_exact(&g1)),
        )
    }
}

impl Div for &QRat {
    type Output = QRat;
    fn div(self, rhs: &QRat) -> QRat {
        assert!(!rhs.is_zero(), "division by zero QRat");
        if self.is_zero() {
            return QRat::zero();
        }
        let g1 = gcd(&self.num, &rhs.num);
        let g2 = gcd(&rhs.den, &self.den);
        QRat::from_reduced_parts(
            self.num.div_exact(&g1).mul(&rhs.den.div_exact(&g2)),
            self.den.div_exact(&g2).mul(&rhs.num.div_exact(&g1)),
        )
    }
}

impl Neg for &QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QRat {
            type Output = QRat;
            fn $m(self, rhs: QRat) -> QRat {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        -&self
    }
}
