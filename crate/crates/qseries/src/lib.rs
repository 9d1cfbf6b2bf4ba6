//! Truncated power series in one commuting variable over [`qcore::QRat`],
//! the q-shift / q-derivative operator family, and the four q-exponentials
//! with their inversion and limit identities.

use qcore::QCoreError;
use qcore::QRat;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("series has no constant term, not invertible")]
    NonUnitSeries,
    #[error(transparent)]
    Core(#[from] QCoreError),
}

/// Truncated power series: coefficients of degree 0..=trunc are significant,
/// absent degrees are zero. Results of arithmetic carry the minimum of the
/// operand truncation orders.
#[derive(Clone, PartialEq, Eq)]
pub struct XSeries {
    coeffs: BTreeMap<i64, QRat>,
    trunc: i64,
}

impl XSeries {
    pub fn zero(trunc: i64) -> Self {
        XSeries { coeffs: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: i64) -> Self {
        XSeries::monomial(0, QRat::one(), trunc)
    }

    pub fn monomial(degree: i64, c: QRat, trunc: i64) -> Self {
        let mut s = XSeries::zero(trunc);
        s.set(degree, c);
        s
    }

    /// Plain `x`.
    pub fn x(trunc: i64) -> Self {
        XSeries::monomial(1, QRat::one(), trunc)
    }

    pub fn from_coeffs(coeffs: Vec<QRat>, trunc: i64) -> Self {
        let mut s = XSeries::zero(trunc);
        for (i, c) in coeffs.into_iter().enumerate() {
            s.set(i as i64, c);
        }
        s
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeff(&self, degree: i64) -> QRat {
        self.coeffs.get(&degree).cloned().unwrap_or_else(QRat::zero)
    }

    pub fn set(&mut self, degree: i64, c: QRat) {
        if degree > self.trunc {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&degree);
        } else {
            self.coeffs.insert(degree, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = (&i64, &QRat)> {
        self.coeffs.iter()
    }

    pub fn with_trunc(&self, trunc: i64) -> XSeries {
        let mut s = XSeries::zero(trunc);
        for (&d, c) in &self.coeffs {
            s.set(d, c.clone());
        }
        s
    }

    pub fn add(&self, other: &XSeries) -> XSeries {
        let mut s = self.with_trunc(self.trunc.min(other.trunc));
        for (&d, c) in &other.coeffs {
            s.set(d, &s.coeff(d) + c);
        }
        s
    }

    pub fn sub(&self, other: &XSeries) -> XSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> XSeries {
        let mut s = self.clone();
        for (_, c) in s.coeffs.iter_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn scale(&self, k: &QRat) -> XSeries {
        let mut s = XSeries::zero(self.trunc);
        for (&d, c) in &self.coeffs {
            s.set(d, k * c);
        }
        s
    }

    pub fn mul(&self, other: &XSeries) -> XSeries {
        let trunc = self.trunc.min(other.trunc);
        let mut s = XSeries::zero(trunc);
        for (&da, ca) in &self.coeffs {
            for (&db, cb) in &other.coeffs {
                let d = da + db;
                if d <= trunc {
                    s.set(d, &s.coeff(d) + &(ca * cb));
                }
            }
        }
        s
    }

    /// Multiplicative inverse mod x^{trunc+1}; requires a unit constant term.
    pub fn inverse(&self) -> Result<XSeries, QSeriesError> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return Err(QSeriesError::NonUnitSeries);
        }
        let mut inv = XSeries::zero(self.trunc);
        inv.set(0, c0.inv());
        for d in 1..=self.trunc {
            let mut acc = QRat::zero();
            for k in 1..=d {
                let a = self.coeff(k);
                if !a.is_zero() {
                    acc = &acc + &(&a * &inv.coeff(d - k));
                }
            }
            inv.set(d, &(-&acc) / &c0);
        }
        Ok(inv)
    }

    /// Substitute `x -> c*x` (same as applying `T_scale(c)`).
    pub fn rescale_x(&self, c: &QRat) -> XSeries {
        let mut s = XSeries::zero(self.trunc);
        for (&d, v) in &self.coeffs {
            s.set(d, &c.pow(d) * v);
        }
        s
    }

    /// Coefficientwise map, e.g. q -> 1/q substitutions.
    pub fn map_coeffs(&self, f: &dyn Fn(&QRat) -> QRat) -> XSeries {
        let mut s = XSeries::zero(self.trunc);
        for (&d, v) in &self.coeffs {
            s.set(d, f(v));
        }
        s
    }

    /// Coefficientwise q -> 1 limit; PoleAtPoint if any coefficient blows up.
    pub fn limit_q_to_1(&self) -> Result<XSeries, QSeriesError> {
        let mut s = XSeries::zero(self.trunc);
        for (&d, v) in &self.coeffs {
            s.set(d, v.limit_q1()?);
        }
        Ok(s)
    }

    pub fn render(&self, var: &str, ctx: &qcore::ParamContext) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&d, c) in &self.coeffs {
            let cs = c.render(ctx);
            let body = match d {
                0 => cs,
                1 => format!("({})*{}", cs, var),
                _ => format!("({})*{}^{}", cs, var, d),
            };
            parts.push(body);
        }
        parts.join(" + ")
    }
}

impl std::fmt::Debug for XSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render("x", &qcore::ParamContext::empty()))
    }
}

/// The operator family acting on series. Monomial actions:
/// `T_scale(c) x^n = c^n x^n`, `D_q x^n = [n]_q x^{n-1}`,
/// `D^+ x^n = (1-q^n) x^{n-1}`, `D^- x^n = (1-q^{-n}) x^{n-1}`,
/// `Dcal^-(b) x^n = (1-b^{-n}) x^{n-1}` (the heat case uses `b = q^2`).
#[derive(Clone, Debug)]
pub enum QOperator {
    TScale(QRat),
    Dq,
    DqInv,
    DqSquared,
    DPlus,
    DMinus,
    DCalMinus(QRat),
}

impl QOperator {
    /// Eigenfactor on the monomial `x^n` together with the degree shift.
    fn monomial_action(&self, n: i64) -> (QRat, i64) {
        let q = QRat::q();
        match self {
            QOperator::TScale(c) => (c.pow(n), 0),
            QOperator::Dq => (qcore::q_int(n), -1),
            QOperator::DqInv => (qcore::q_int_base(&q.inv(), n), -1),
            QOperator::DqSquared => (qcore::q_int_base(&(&q * &q), n), -1),
            QOperator::DPlus => (&QRat::one() - &QRat::q_pow(n), -1),
            QOperator::DMinus => (&QRat::one() - &QRat::q_pow(-n), -1),
            QOperator::DCalMinus(b) => (&QRat::one() - &b.pow(-n), -1),
        }
    }

    pub fn apply(&self, s: &XSeries) -> XSeries {
        let trunc = match self {
            QOperator::TScale(_) => s.trunc(),
            _ => s.trunc() - 1,
        };
        let mut out = XSeries::zero(trunc);
        for (&d, c) in s.degrees() {
            let (f, shift) = self.monomial_action(d);
            if !f.is_zero() {
                let nd = d + shift;
                if nd >= 0 {
                    out.set(nd, &out.coeff(nd) + &(&f * c));
                }
            }
        }
        out
    }
}

/// Which q-exponential to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QExpKind {
    /// `e_q(x) = sum (1-q)^n x^n / (q;q)_n`
    EqLower,
    /// `~e_q(x) = sum x^n / (q;q)_n`
    EqLowerTilde,
    /// `E_q(x) = sum q^{n(n-1)/2} (1-q)^n x^n / (q;q)_n`
    EqUpper,
    /// `~E_q(x) = sum q^{n(n-1)/2} x^n / (q;q)_n`
    EqUpperTilde,
}

/// Build a q-exponential of `scale * x` to truncation `trunc`.
pub fn q_exp(kind: QExpKind, scale: &QRat, trunc: i64) -> XSeries {
    q_exp_base(kind, &QRat::q(), scale, trunc)
}

/// Same with the deformation base swapped out (used for `E_{q^2}` etc.).
pub fn q_exp_base(kind: QExpKind, base: &QRat, scale: &QRat, trunc: i64) -> XSeries {
    let mut s = XSeries::zero(trunc);
    let one = QRat::one();
    for n in 0..=trunc.max(0) {
        let nn = n as u32;
        let poch = qcore::q_pochhammer_base(base, base, nn);
        let mut c = &scale.pow(n) / &poch;
        match kind {
            QExpKind::EqLower => {
                c = &c * &(&one - base).pow(n);
            }
            QExpKind::EqLowerTilde => {}
            QExpKind::EqUpper => {
                c = &(&c * &(&one - base).pow(n)) * &base.pow(n * (n - 1) / 2);
            }
            QExpKind::EqUpperTilde => {
                c = &c * &base.pow(n * (n - 1) / 2);
            }
        }
        s.set(n, c);
    }
    s
}

/// `(c x^v; q)_infinity` as an exact series via Euler's expansion
/// `(a; q)_inf = sum_n (-1)^n q^{n(n-1)/2} a^n / (q;q)_n` (equivalently
/// `~E_q(-a)`), so every coefficient is the full rational-function value
/// rather than a finite-product partial sum.
pub fn pochhammer_inf_monomial(c: &QRat, v: i64, trunc: i64) -> XSeries {
    assert!(v >= 1, "infinite Pochhammer needs positive valuation");
    let mut out = XSeries::zero(trunc);
    for n in 0..=(trunc / v) {
        let sign = if n % 2 == 1 { -QRat::one() } else { QRat::one() };
        let coef = &(&(&sign * &QRat::q_pow(n * (n - 1) / 2)) * &c.pow(n))
            / &qcore::q_pochhammer(&QRat::q(), n as u32);
        out.set(v * n, coef);
    }
    out
}

pub use qcore::ParamContext;

#[cfg(test)]
mod tests {
    use super::*;

    const N: i64 = 16;

    #[test]
    fn dq_on_monomials() {
        let s = XSeries::monomial(2, QRat::one(), N);
        let d = QOperator::Dq.apply(&s);
        // D_q x^2 = (1+q) x
        assert_eq!(d.coeff(1), qcore::q_int(2));
    }

    #[test]
    fn tilde_exponentials_invert_each_other() {
        let e = q_exp(QExpKind::EqLowerTilde, &QRat::one(), N);
        let big_e = q_exp(QExpKind::EqUpperTilde, &(-&QRat::one()), N);
        let prod = e.mul(&big_e);
        assert_eq!(prod, XSeries::one(N));
    }

    #[test]
    fn inverse_of_tilde_e_is_tilde_e_upper() {
        let e = q_exp(QExpKind::EqLowerTilde, &QRat::one(), N);
        let inv = e.inverse().unwrap();
        let big_e = q_exp(QExpKind::EqUpperTilde, &(-&QRat::one()), N);
        assert_eq!(inv, big_e);
    }

    #[test]
    fn geometric_series_inverse() {
        let one_minus_x = XSeries::one(N).sub(&XSeries::x(N));
        let inv = one_minus_x.inverse().unwrap();
        for d in 0..=N {
            assert!(inv.coeff(d).is_one());
        }
        assert_eq!(XSeries::one(N).inverse().unwrap(), XSeries::one(N));
    }

    #[test]
    fn non_unit_series_rejected() {
        assert!(matches!(
            XSeries::x(N).inverse(),
            Err(QSeriesError::NonUnitSeries)
        ));
    }

    #[test]
    fn a1_rescaling_identity() {
        // e_q(x) = ~e_q((1-q)x)
        let e = q_exp(QExpKind::EqLower, &QRat::one(), N);
        let scale = &QRat::one() - &QRat::q();
        let et = q_exp(QExpKind::EqLowerTilde, &scale, N);
        assert_eq!(e, et);
    }

    #[test]
    fn a5_eigen_relations() {
        // D^+ ~e_q = ~e_q and D^- ~E_q = -q^{-1} ~E_q
        let e = q_exp(QExpKind::EqLowerTilde, &QRat::one(), N);
        let de = QOperator::DPlus.apply(&e);
        assert_eq!(de, e.with_trunc(N - 1));

        let big_e = q_exp(QExpKind::EqUpperTilde, &QRat::one(), N);
        let dbe = QOperator::DMinus.apply(&big_e);
        let expect = big_e.scale(&-&QRat::q_pow(-1)).with_trunc(N - 1);
        assert_eq!(dbe, expect);
    }

    #[test]
    fn a6_base_inversion_identity() {
        // ~E_q(x) = e_{1/q}((1-q)^{-1} x)
        let big_e = q_exp(QExpKind::EqUpperTilde, &QRat::one(), N);
        let qinv = QRat::q().inv();
        let scale = (&QRat::one() - &QRat::q()).inv();
        let rhs = q_exp_base(QExpKind::EqLower, &qinv, &scale, N);
        assert_eq!(big_e, rhs);
    }

    #[test]
    fn tilde_e_inverse_base_identity() {
        // ~e_{1/q}(x) = ~E_q(-q x)
        let qinv = QRat::q().inv();
        let lhs = q_exp_base(QExpKind::EqLowerTilde, &qinv, &QRat::one(), N);
        let rhs = q_exp(QExpKind::EqUpperTilde, &(-&QRat::q()), N);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dq_eigenvalue_with_formal_parameter() {
        // D_q e_q(zx) = z e_q(zx) with a declared formal z
        let ctx = ParamContext::new(vec!["z"]);
        let z = ctx.param("z").unwrap();
        let e = q_exp(QExpKind::EqLower, &z, N);
        let de = QOperator::Dq.apply(&e);
        assert_eq!(de, e.scale(&z).with_trunc(N - 1));
    }

    #[test]
    fn operator_composition_identity() {
        // D_{1/q} = q * D_q o T_q^{-1} on monomials up to degree N
        let qinv = QRat::q().inv();
        for n in 0..=N {
            let m = XSeries::monomial(n, QRat::one(), N);
            let lhs = QOperator::DqInv.apply(&m);
            let shifted = QOperator::TScale(qinv.clone()).apply(&m);
            let rhs = QOperator::Dq.apply(&shifted).scale(&QRat::q());
            assert_eq!(lhs, rhs, "n={}", n);
        }
    }

    #[test]
    fn q_to_1_limits_are_factorials() {
        // coefficients of ~e_q(x(1-q)) and ~E_q(x(1-q)) tend to 1/n!
        let scale = &QRat::one() - &QRat::q();
        for kind in [QExpKind::EqLowerTilde, QExpKind::EqUpperTilde] {
            let s = q_exp(kind, &scale, N).limit_q_to_1().unwrap();
            let mut fact = num::BigInt::from(1);
            for n in 0..=N {
                if n > 0 {
                    fact *= n;
                }
                let expect = QRat::from_big_ratio(&num::BigRational::new(
                    num::BigInt::from(1),
                    fact.clone(),
                ));
                assert_eq!(s.coeff(n), expect, "kind {:?} n={}", kind, n);
            }
        }
    }

    #[test]
    fn limit_of_dq_x_cubed() {
        let s = XSeries::monomial(3, QRat::one(), N);
        let d = QOperator::Dq.apply(&s).limit_q_to_1().unwrap();
        assert_eq!(d.coeff(2), QRat::from_int(3));
    }

    #[test]
    fn dcal_minus_base_action() {
        // Dcal^-(b) x^n = (1 - b^{-n}) x^{n-1} with b = q^2
        let b = &QRat::q() * &QRat::q();
        let op = QOperator::DCalMinus(b.clone());
        let s = XSeries::monomial(3, QRat::one(), N);
        let out = op.apply(&s);
        assert_eq!(out.coeff(2), &QRat::one() - &b.pow(-3));
    }
}
