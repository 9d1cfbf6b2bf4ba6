//! The two q-Bessel families, their recurrence and shift relations, and
//! the second-order ladder equation residual.

use crate::{phi_rs, PhiSpec, ResidualReport};
use qcore::{q_pochhammer, ParamContext, QRat};
use qseries::{QOperator, XSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    First,
    Second,
}

/// `J^k_nu(z; q)` as a series in z (the `z^nu` prefactor folded in).
pub fn q_bessel(kind: BesselKind, nu: i64, trunc: i64) -> XSeries {
    assert!(nu >= 0, "integer order only");
    let half = QRat::from_ratio(1, 2);
    let quarter_neg = QRat::from_ratio(-1, 4);
    let pref = &half.pow(nu) / &q_pochhammer(&QRat::q(), nu as u32);
    let kernel = match kind {
        BesselKind::First => phi_rs(&PhiSpec {
            num_params: vec![QRat::zero(), QRat::zero()],
            den_params: vec![QRat::q_pow(nu + 1)],
            scale: quarter_neg,
            trunc: (trunc - nu).max(0) / 2,
        })
        .expect("positive q-power denominators"),
        BesselKind::Second => phi_rs(&PhiSpec {
            num_params: vec![],
            den_params: vec![QRat::q_pow(nu + 1)],
            scale: &quarter_neg * &QRat::q_pow(nu + 1),
            trunc: (trunc - nu).max(0) / 2,
        })
        .expect("positive q-power denominators"),
    };
    // kernel is a series in w = z^2; expand into z and shift by nu
    let mut out = XSeries::zero(trunc);
    for (&d, c) in kernel.degrees() {
        let deg = nu + 2 * d;
        if deg <= trunc {
            out.set(deg, &pref * c);
        }
    }
    out
}

/// Divide a series by z (exact: requires zero constant coefficient).
fn div_z(s: &XSeries) -> XSeries {
    let mut out = XSeries::zero(s.trunc() - 1);
    for (&d, c) in s.degrees() {
        assert!(d >= 1, "division by z with constant term present");
        out.set(d - 1, c.clone());
    }
    out
}

fn mul_z(s: &XSeries) -> XSeries {
    let mut out = XSeries::zero(s.trunc() + 1);
    for (&d, c) in s.degrees() {
        out.set(d + 1, c.clone());
    }
    out
}

/// `(D^+ - z/4)` applied to a series in z.
fn ladder_op(s: &XSeries) -> XSeries {
    let d = QOperator::DPlus.apply(s);
    let z4 = mul_z(s).scale(&QRat::from_ratio(1, 4));
    d.sub(&z4.with_trunc(d.trunc()))
}

/// Residual of the recurrence `(1-q^nu)/z J_nu = (J_{nu-1} + q^nu J_{nu+1})/2`.
pub fn recurrence_residual(kind: BesselKind, nu: i64, trunc: i64) -> XSeries {
    let jm = q_bessel(kind, nu - 1, trunc);
    let j0 = q_bessel(kind, nu, trunc + 1);
    let jp = q_bessel(kind, nu + 1, trunc);
    let lhs = div_z(&j0).scale(&(&QRat::one() - &QRat::q_pow(nu)));
    let rhs = jm
        .add(&jp.scale(&QRat::q_pow(nu)))
        .scale(&QRat::from_ratio(1, 2));
    lhs.sub(&rhs).with_trunc(trunc - 1)
}

/// Residuals of the two shift relations built from `(D^+ - z/4)`:
/// lowering `[(D^+ - z/4) q^nu + (1-q^nu)/z] J^1_nu = (1+q^nu)/2 J^1_{nu-1}`
/// and raising `[-(D^+ - z/4) + (1-q^nu)/z] J^1_nu = (1+q^nu)/2 J^1_{nu+1}`.
pub fn shift_residuals(nu: i64, trunc: i64) -> (XSeries, XSeries) {
    let j0 = q_bessel(BesselKind::First, nu, trunc + 2);
    let jm = q_bessel(BesselKind::First, nu - 1, trunc);
    let jp = q_bessel(BesselKind::First, nu + 1, trunc);
    let lad = ladder_op(&j0);
    let inv = div_z(&j0).scale(&(&QRat::one() - &QRat::q_pow(nu)));
    let half = |n: i64| (&(&QRat::one() + &QRat::q_pow(n)) * &QRat::from_ratio(1, 2));

    let lower = lad
        .scale(&QRat::q_pow(nu))
        .add(&inv)
        .sub(&jm.scale(&half(nu)))
        .with_trunc(trunc - 1);
    let raise = lad
        .neg()
        .add(&inv)
        .sub(&jp.scale(&half(nu)))
        .with_trunc(trunc - 1);
    (lower, raise)
}

/// `(1-q^k)/z * s`, skipping the division entirely when the prefactor is
/// zero (the m=1 ladder hits `(1-q^0) = 0` against a constant term).
fn scaled_div_z(s: &XSeries, k: i64) -> XSeries {
    let f = &QRat::one() - &QRat::q_pow(k);
    if f.is_zero() {
        return XSeries::zero(s.trunc() - 1);
    }
    div_z(s).scale(&f)
}

/// Residual of the factored second-order equation
/// `[-(D^+ - z/4) + (1-q^{m-1})/z][(D^+ - z/4) q^m + (1-q^m)/z] J^1_m
///   = (1+q^m)(1+q^{m-1})/4 J^1_m`.
/// The leading sign of the first bracket follows the raising operator of
/// the ladder pair (the printed equation drops it; with a plus the
/// residual is exactly `-(1+q^m)(1+q^{m-1})/2 J^1_m`, never zero).
pub fn bessel_eq11_residual(m: i64, trunc: i64) -> ResidualReport {
    let j = q_bessel(BesselKind::First, m, trunc + 4);
    let inner = ladder_op(&j)
        .scale(&QRat::q_pow(m))
        .add(&scaled_div_z(&j, m));
    let outer = ladder_op(&inner).neg().add(&scaled_div_z(&inner, m - 1));
    let ev = &(&(&QRat::one() + &QRat::q_pow(m)) * &(&QRat::one() + &QRat::q_pow(m - 1)))
        * &QRat::from_ratio(1, 4);
    let resid = outer.sub(&j.scale(&ev).with_trunc(outer.trunc())).with_trunc(trunc);
    ResidualReport::from_series(&format!("bessel_eq11 m={}", m), &resid, &ParamContext::empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qseries::pochhammer_inf_monomial;

    const N: i64 = 12;

    #[test]
    fn a8_product_relation() {
        // J^2_nu = (-z^2/4; q)_inf J^1_nu, with the infinite product
        // expanded exactly via Euler's series
        for nu in 0..=4 {
            let j1 = q_bessel(BesselKind::First, nu, N);
            let j2 = q_bessel(BesselKind::Second, nu, N);
            let infprod = pochhammer_inf_monomial(&QRat::from_ratio(-1, 4), 2, N);
            assert_eq!(j2, infprod.mul(&j1), "nu={}", nu);
        }
    }

    #[test]
    fn recurrence_eq6_both_kinds() {
        for kind in [BesselKind::First, BesselKind::Second] {
            for nu in 1..=4 {
                let r = recurrence_residual(kind, nu, N);
                assert!(r.is_zero(), "kind={:?} nu={} residual={:?}", kind, nu, r);
            }
        }
    }

    #[test]
    fn shift_relations_eq7() {
        for nu in 1..=4 {
            let (lower, raise) = shift_residuals(nu, N);
            assert!(lower.is_zero(), "lowering nu={} {:?}", nu, lower);
            assert!(raise.is_zero(), "raising nu={} {:?}", nu, raise);
        }
    }

    #[test]
    fn eq11_zero_residual() {
        for m in 1..=3 {
            let rep = bessel_eq11_residual(m, N);
            assert!(rep.zero, "m={} {:?}", m, rep.offending);
        }
    }

    #[test]
    fn q_to_1_limit_matches_classical_bessel() {
        // lim J^1_nu((1-q)z, q) = J_nu(z): classical coefficients
        // (-1)^k / (k! (k+nu)! 2^{2k+nu}) at degree nu+2k
        for nu in 0..=2i64 {
            let j = q_bessel(BesselKind::First, nu, 8 + nu);
            let scaled = j.rescale_x(&(&QRat::one() - &QRat::q()));
            let lim = scaled.limit_q_to_1().unwrap();
            for k in 0..=((8 - nu) / 2) {
                let mut denom = num::BigInt::from(1);
                for i in 1..=k {
                    denom *= i;
                }
                for i in 1..=(k + nu) {
                    denom *= i;
                }
                denom <<= (2 * k + nu) as usize;
                let mut expect =
                    QRat::from_big_ratio(&num::BigRational::new(num::BigInt::from(1), denom));
                if k % 2 == 1 {
                    expect = -expect;
                }
                assert_eq!(lim.coeff(nu + 2 * k), expect, "nu={} k={}", nu, k);
            }
        }
    }
}
