//! The ordering symbol map between the quantum xp-plane and classical
//! variables: ordered words map to monomials, q-partials to their hatted
//! classical avatars.

use qcore::{q_int_base, QRat};
use std::collections::BTreeMap;

/// Polynomial in ordered `x^n p^m` words (noncommutative side) or in
/// commuting `x_c^n p_c^m` (classical side); the data is identical, the
/// product differs.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct XpPoly {
    pub terms: BTreeMap<(i64, i64), QRat>,
}

impl XpPoly {
    pub fn monomial(n: i64, m: i64, c: QRat) -> Self {
        let mut p = XpPoly::default();
        p.insert((n, m), c);
        p
    }

    pub fn insert(&mut self, k: (i64, i64), c: QRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add(&self, other: &XpPoly) -> XpPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    /// Noncommutative product with `x p = q p x`, i.e. reordering
    /// `p^b x^c = q^{-bc} x^c p^b`.
    pub fn mul_nc(&self, other: &XpPoly) -> XpPoly {
        let mut out = XpPoly::default();
        for (&(a, b), ca) in &self.terms {
            for (&(c2, d), cb) in &other.terms {
                let factor = QRat::q_pow(-b * c2);
                out.insert((a + c2, b + d), &(ca * cb) * &factor);
            }
        }
        out
    }

    pub fn mul_classical(&self, other: &XpPoly) -> XpPoly {
        let mut out = XpPoly::default();
        for (&(a, b), ca) in &self.terms {
            for (&(c2, d), cb) in &other.terms {
                out.insert((a + c2, b + d), ca * cb);
            }
        }
        out
    }
}

/// `[[n]]_{q^2}`.
pub fn qq_int(n: i64) -> QRat {
    q_int_base(&QRat::q_pow(2), n)
}

/// Operators on the noncommutative side, acting on ordered words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XpOp {
    /// `d_x (x^n p^m) = [[n]]_{q^2} x^{n-1} p^m`
    DelX,
    /// `d_p (x^n p^m) = q^n [[m]]_{q^2} x^n p^{m-1}`
    DelP,
    /// left multiplication by x
    MulX,
    /// left multiplication by p
    MulP,
}

/// Apply on the noncommutative side.
pub fn apply_nc(op: XpOp, f: &XpPoly) -> XpPoly {
    let mut out = XpPoly::default();
    for (&(n, m), c) in &f.terms {
        match op {
            XpOp::DelX => {
                let v = qq_int(n);
                if !v.is_zero() {
                    out.insert((n - 1, m), &v * c);
                }
            }
            XpOp::DelP => {
                let v = &QRat::q_pow(n) * &qq_int(m);
                if !v.is_zero() {
                    out.insert((n, m - 1), &v * c);
                }
            }
            XpOp::MulX => {
                out.insert((n + 1, m), c.clone());
            }
            XpOp::MulP => {
                // p x^n p^m = q^{-n} x^n p^{m+1}
                out.insert((n, m + 1), &QRat::q_pow(-n) * c);
            }
        }
    }
    out
}

/// The symbol map is the identity on ordered data.
pub fn sigma(f: &XpPoly) -> XpPoly {
    f.clone()
}

pub fn sigma_inv(f: &XpPoly) -> XpPoly {
    f.clone()
}

/// `hat(D) = sigma o D o sigma^{-1}` applied to a classical polynomial.
pub fn hat_apply(op: XpOp, phi: &XpPoly) -> XpPoly {
    sigma(&apply_nc(op, &sigma_inv(phi)))
}

/// The classical wave operator pulled through the symbol map:
/// `sigma^{-1} (d_xc^2 - d_pc^2) sigma` acting on an ordered word.
pub fn eqq_wave_pullback(f: &XpPoly) -> XpPoly {
    let mut classical = XpPoly::default();
    for (&(n, m), c) in &sigma(f).terms {
        if n >= 2 {
            classical.insert((n - 2, m), &QRat::from_int(n * (n - 1)) * c);
        }
        if m >= 2 {
            classical.insert((n, m - 2), &(-&QRat::from_int(m * (m - 1))) * c);
        }
    }
    sigma_inv(&classical)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_del_x_value() {
        // hat-d_x (x^2 p) = (1 + q^2) x p
        let f = XpPoly::monomial(2, 1, QRat::one());
        let out = hat_apply(XpOp::DelX, &f);
        let expect = XpPoly::monomial(1, 1, &QRat::one() + &QRat::q_pow(2));
        assert_eq!(out, expect);
    }

    #[test]
    fn sigma_roundtrip_identity() {
        // degree <= 6 words
        for n in 0..=6i64 {
            for m in 0..=(6 - n) {
                let f = XpPoly::monomial(n, m, QRat::from_int(3));
                assert_eq!(sigma_inv(&sigma(&f)), f);
            }
        }
    }

    #[test]
    fn hat_is_multiplicative() {
        // compositions of hatted operators agree with hatting the
        // composition, on an exhaustive degree <= 3 polynomial
        let mut f = XpPoly::default();
        let mut c = 1i64;
        for n in 0..=3i64 {
            for m in 0..=(3 - n) {
                f.insert((n, m), QRat::from_int(c));
                c += 1;
            }
        }
        let ops = [XpOp::DelX, XpOp::DelP, XpOp::MulX, XpOp::MulP];
        for o1 in ops {
            for o2 in ops {
                let lhs = hat_apply(o1, &hat_apply(o2, &f));
                let composed = apply_nc(o1, &apply_nc(o2, &sigma_inv(&f)));
                let rhs = sigma(&composed);
                assert_eq!(lhs, rhs, "{:?} {:?}", o1, o2);
            }
        }
    }

    #[test]
    fn eqq_correspondence_on_words() {
        // the pulled-back wave operator acts with coefficients
        // n(n-1) / ([[n]] [[n-1]]) against (d_x)^2 etc., checked on words
        for n in 2..=5i64 {
            for m in 2..=4i64 {
                let f = XpPoly::monomial(n, m, QRat::one());
                let direct = eqq_wave_pullback(&f);
                // via the q-operators with ratio coefficients
                let dxx = apply_nc(XpOp::DelX, &apply_nc(XpOp::DelX, &f));
                let dpp = apply_nc(XpOp::DelP, &apply_nc(XpOp::DelP, &f));
                let rx = &QRat::from_int(n * (n - 1)) / &(&qq_int(n) * &qq_int(n - 1));
                let rp_raw = &QRat::from_int(m * (m - 1)) / &(&qq_int(m) * &qq_int(m - 1));
                // the d_p^2 action carries q^{2n}; the ratio removes it
                let rp = &rp_raw * &QRat::q_pow(-2 * n);
                let mut expect = XpPoly::default();
                for (k, c) in &dxx.terms {
                    expect.insert(*k, &rx * c);
                }
                for (k, c) in &dpp.terms {
                    expect.insert(*k, &(-&rp) * c);
                }
                assert_eq!(direct, expect, "n={} m={}", n, m);
            }
        }
    }

    #[test]
    fn nc_product_reorders() {
        // (p)(x) = q^{-1} x p
        let p_ = XpPoly::monomial(0, 1, QRat::one());
        let x_ = XpPoly::monomial(1, 0, QRat::one());
        let prod = p_.mul_nc(&x_);
        assert_eq!(prod, XpPoly::monomial(1, 1, QRat::q_pow(-1)));
    }
}
