//! The qKdV Lax machinery: solving the gauge coefficients `s_0..s_4` from
//! `L^2 = (d_q + s_0 + s_1 d_q^{-1} + ...)^2` being a differential
//! operator, building `L^3_+`, and extracting the t_3 flows.

use crate::coeff::{CoeffExpr, CoeffOps, ExprRing, SeriesRing};
use crate::psdo::{
    psdo_add, psdo_commutator, psdo_from, psdo_minus, psdo_mul, psdo_plus, QPsdo,
};
use crate::QPsdoError;
use qcore::QRat;
use qseries::XSeries;

/// Everything the t_3 extraction produces in one mode.
pub struct LaxData<R: CoeffOps> {
    pub s: Vec<R::C>,
    pub u: R::C,
    pub u1: R::C,
    pub l_op: QPsdo<R::C>,
    pub l2: QPsdo<R::C>,
    pub l3_plus: QPsdo<R::C>,
    /// `d_t u = [L^3_+, L^2]_0`
    pub u_flow: R::C,
    /// `d_t s_0 = [L^3_+, L]_0`
    pub s0_flow: R::C,
    /// `d_t s_1 = [L^3_+, L]_{-1}`
    pub s1_flow: R::C,
    /// coefficients of `d_q^{1,2,3}` in `[L^3_+, L]`, all expected zero
    pub high_orders: Vec<R::C>,
}

/// Build L from `u` by solving, in order, `(1+D) s_0 = (q-1) x u`,
/// `(1+D) s_1 = u - d_q s_0 - s_0^2`, then `s_2, s_3, s_4` from the
/// vanishing of the `d_q^{-1..-3}` coefficients of `L^2`.
pub fn lax_solve<R: CoeffOps>(
    ring: &R,
    u: &R::C,
    u1: &R::C,
    depth: i64,
) -> Result<LaxData<R>, QPsdoError> {
    let s0 = ring.inv_one_plus_shift(u1)?;
    let f1 = ring.sub(&ring.sub(u, &ring.qderiv(&s0)), &ring.mul(&s0, &s0));
    let s1 = ring.inv_one_plus_shift(&f1)?;

    let mut s = vec![s0, s1];
    // sequentially: [L^2]_{-(j-1)} = (1+D)s_j + known(s_{<j}) = 0
    for j in 2..=4u32 {
        let l_partial = build_l(ring, &s, depth);
        let l2 = psdo_mul(ring, &l_partial, &l_partial);
        let zero = ring.zero();
        let c = l2.coeff_or(-(j as i64 - 1), &zero).clone();
        let sj = ring.neg(&ring.inv_one_plus_shift(&c)?);
        s.push(sj);
    }

    let l_op = build_l(ring, &s, depth);
    let l2 = psdo_mul(ring, &l_op, &l_op);
    // sanity: the solved tail must vanish where constructed
    for k in 1..=3i64 {
        let zero = ring.zero();
        if !ring.is_zero(l2.coeff_or(-k, &zero)) {
            return Err(QPsdoError::Internal(format!(
                "L^2 tail at order {} failed to cancel",
                -k
            )));
        }
    }
    let l2_diff = psdo_plus(&l2);
    let l3 = psdo_mul(ring, &l2_diff, &l_op);
    let l3_plus = psdo_plus(&l3);

    let flow_l2 = psdo_commutator(ring, &l3_plus, &l2_diff);
    let flow_l = psdo_commutator(ring, &l3_plus, &l_op);

    let zero = ring.zero();
    let u_flow = flow_l2.coeff_or(0, &zero).clone();
    let s0_flow = flow_l.coeff_or(0, &zero).clone();
    let s1_flow = flow_l.coeff_or(-1, &zero).clone();
    let high_orders = (1..=3)
        .map(|k| flow_l.coeff_or(k, &zero).clone())
        .collect();

    Ok(LaxData {
        s,
        u: u.clone(),
        u1: u1.clone(),
        l_op,
        l2: l2_diff,
        l3_plus,
        u_flow,
        s0_flow,
        s1_flow,
        high_orders,
    })
}

fn build_l<R: CoeffOps>(ring: &R, s: &[R::C], depth: i64) -> QPsdo<R::C> {
    // L = d_q + s_0 + s_1 d_q^{-1} + ... : s_i sits at order -i
    let mut l = QPsdo::new(depth);
    l.coeffs.insert(1, ring.one());
    for (i, si) in s.iter().enumerate() {
        if !ring.is_zero(si) {
            l.coeffs.insert(-(i as i64), si.clone());
        }
    }
    l
}

/// Series-mode run: `u` a series in x, `q` a rational (or formal) value.
pub fn lax_solve_series(
    u: &XSeries,
    q: &QRat,
    trunc: i64,
    depth: i64,
) -> Result<(SeriesRing, LaxData<SeriesRing>), QPsdoError> {
    let ring = SeriesRing::new(q.clone(), trunc);
    let u1 = {
        // (q-1) x u
        let mut m = XSeries::zero(trunc);
        for (&d, c) in u.degrees() {
            m.set(d + 1, &(q - &QRat::one()) * c);
        }
        m
    };
    let data = lax_solve(&ring, &u.with_trunc(trunc), &u1, depth)?;
    Ok((ring, data))
}

/// Symbolic q=1 run with `u` a primitive differential symbol. Here
/// `s_0 = 0`, `s_1 = u/2`, and every inversion is division by two.
pub fn lax_solve_symbolic_q1() -> Result<(ExprRing, LaxData<ExprRing>), QPsdoError> {
    let ring = ExprRing::new(QRat::one(), vec!["u"]);
    let u = CoeffExpr::atom(0);
    let u1 = ring.zero(); // (q-1) x u vanishes at q = 1
    let data = lax_solve(&ring, &u, &u1, 4)?;
    Ok((ring, data))
}

/// The closed form of `[L^3_+, L]_{-1}` assembled term by term (the
/// `d_q^{-1}`-coefficient bookkeeping done by hand with the Eq.-42w
/// binomials), as an independent cross-check on the generic product.
pub fn s1_flow_closed_form<R: CoeffOps>(ring: &R, d: &LaxData<R>) -> R::C {
    let q = ring.q().clone();
    let zero = ring.zero();
    let s1 = &d.s[1];
    let s2 = &d.s[2];
    let s3 = &d.s[3];
    let s4 = &d.s[4];
    let w2 = d.l3_plus.coeff_or(2, &zero).clone();
    let w1 = d.l3_plus.coeff_or(1, &zero).clone();
    let w0 = d.l3_plus.coeff_or(0, &zero).clone();
    let d3 = |c: &R::C| ring.qderiv(&ring.qderiv(&ring.qderiv(c)));
    let d2 = |c: &R::C| ring.qderiv(&ring.qderiv(c));
    let d1 = |c: &R::C| ring.qderiv(c);
    let sh = |c: &R::C, r: i64| ring.shift(c, r);
    let three = crate::coeff::ring_qint(&q, 3);
    let two = crate::coeff::ring_qint(&q, 2);

    let mut acc = d3(s1);
    acc = ring.add(&acc, &ring.scale(&sh(&d2(s2), 1), &three));
    acc = ring.add(&acc, &ring.scale(&sh(&d1(s3), 2), &three));
    acc = ring.add(&acc, &sh(s4, 3));
    acc = ring.add(&acc, &ring.mul(&w2, &d2(s1)));
    acc = ring.add(&acc, &ring.scale(&ring.mul(&w2, &sh(&d1(s2), 1)), &two));
    acc = ring.add(&acc, &ring.mul(&w2, &sh(s3, 2)));
    acc = ring.add(&acc, &ring.mul(&w1, &d1(s1)));
    acc = ring.add(&acc, &ring.mul(&w1, &sh(s2, 1)));
    acc = ring.add(&acc, &ring.mul(&w0, s1));
    // right-action side, with the negative-index Gaussian binomials
    acc = ring.sub(
        &acc,
        &ring.scale(&ring.mul(s1, &sh(&d2(&w2), -3)), &q.pow(-3)),
    );
    acc = ring.add(
        &acc,
        &ring.scale(&ring.mul(s1, &sh(&d1(&w1), -2)), &q.pow(-1)),
    );
    acc = ring.sub(&acc, &ring.mul(s1, &sh(&w0, -1)));
    acc = ring.add(
        &acc,
        &ring.scale(&ring.mul(s2, &sh(&d1(&w2), -3)), &(&two * &q.pow(-2))),
    );
    acc = ring.sub(&acc, &ring.mul(s2, &sh(&w1, -2)));
    acc = ring.sub(&acc, &ring.mul(s3, &sh(&w2, -3)));
    acc = ring.sub(&acc, s4);
    acc
}

/// The closed form of `d_t u = [L^3_+, L^2]_0`:
/// `(d_q^3 u) + w_2 (d_q^2 u) + w_1 (d_q u) - (d_q^2 w_0) - u_1 (d_q w_0)`.
pub fn u_flow_closed_form<R: CoeffOps>(ring: &R, d: &LaxData<R>) -> R::C {
    let zero = ring.zero();
    let w2 = d.l3_plus.coeff_or(2, &zero).clone();
    let w1 = d.l3_plus.coeff_or(1, &zero).clone();
    let w0 = d.l3_plus.coeff_or(0, &zero).clone();
    let du = ring.qderiv(&d.u);
    let ddu = ring.qderiv(&du);
    let dddu = ring.qderiv(&ddu);
    let dw0 = ring.qderiv(&w0);
    let ddw0 = ring.qderiv(&dw0);
    let mut acc = dddu;
    acc = ring.add(&acc, &ring.mul(&w2, &ddu));
    acc = ring.add(&acc, &ring.mul(&w1, &du));
    acc = ring.sub(&acc, &ddw0);
    acc = ring.sub(&acc, &ring.mul(&d.u1, &dw0));
    acc
}

/// Independent two-path check of `w_2` against
/// `(q-1)(D^2 + D + 1)(1+D)^{-1}(x u)` computed diagonally per monomial.
pub fn w2_series_check(ring: &SeriesRing, d: &LaxData<SeriesRing>) -> (XSeries, XSeries) {
    let zero = ring.zero();
    let engine_w2 = d.l3_plus.coeff_or(2, &zero).clone();
    let q = &ring.q;
    let mut xu = XSeries::zero(ring.trunc);
    for (&k, c) in d.u.degrees() {
        xu.set(k + 1, c.clone());
    }
    let mut indep = XSeries::zero(ring.trunc);
    for (&n, c) in xu.degrees() {
        // (q-1)(q^{2n} + q^n + 1)/(1 + q^n) per monomial x^n
        let qn = q.pow(n);
        let f = &(&(q - &QRat::one())
            * &(&(&(&qn * &qn) + &qn) + &QRat::one()))
            / &(&QRat::one() + &qn);
        indep.set(n, &f * c);
    }
    (engine_w2, indep)
}

/// The flow-consistency identity: differentiating `u = d_q s_0 + s_0^2 +
/// (1+D) s_1` through time must reproduce the `L^2` flow:
/// `d_t u = (1+D) d_t s_1 + d_q d_t s_0 + 2 s_0 d_t s_0`.
pub fn flow_consistency_residual<R: CoeffOps>(ring: &R, d: &LaxData<R>) -> R::C {
    let lhs = d.u_flow.clone();
    let mut rhs = ring.add(&d.s1_flow, &ring.shift(&d.s1_flow, 1));
    rhs = ring.add(&rhs, &ring.qderiv(&d.s0_flow));
    rhs = ring.add(
        &rhs,
        &ring.scale(&ring.mul(&d.s[0], &d.s0_flow), &QRat::from_int(2)),
    );
    ring.sub(&lhs, &rhs)
}

/// Restrict a series to degrees <= cap (the reliably-exact window when
/// inputs are truncated).
pub fn capped(s: &XSeries, cap: i64) -> XSeries {
    s.with_trunc(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{Atom, TermKey};

    #[test]
    fn s0_for_constant_u() {
        // u = 1: s_0 = (q-1) x / (1+q)
        let u = XSeries::one(20);
        let (_, d) = lax_solve_series(&u, &QRat::q(), 20, 4).unwrap();
        let expect = XSeries::monomial(
            1,
            &(&QRat::q() - &QRat::one()) / &(&QRat::one() + &QRat::q()),
            20,
        );
        assert_eq!(d.s[0], expect);
        // reconstruction: (1+D)s_0 = (q-1) x u exactly
        let back = d.s[0].add(&d.s[0].rescale_x(&QRat::q()));
        assert_eq!(back, d.u1);
    }

    #[test]
    fn symbolic_q1_flows_are_kdv() {
        let (ring, d) = lax_solve_symbolic_q1().unwrap();
        // s_0 = 0, s_1 = u/2
        assert!(d.s[0].is_zero());
        let mut half_u = CoeffExpr::atom(0);
        half_u = ring.scale(&half_u, &QRat::from_ratio(1, 2));
        assert_eq!(d.s[1], half_u);

        // d_t u = 1/4 d^3 u + 3/2 u du
        let mut expect = CoeffExpr::zero();
        expect.insert(
            TermKey { xpow: 0, atoms: vec![Atom { sym: 0, r: 0, s: 3 }] },
            QRat::from_ratio(1, 4),
        );
        expect.insert(
            TermKey {
                xpow: 0,
                atoms: vec![Atom { sym: 0, r: 0, s: 0 }, Atom { sym: 0, r: 0, s: 1 }],
            },
            QRat::from_ratio(3, 2),
        );
        assert_eq!(d.u_flow, expect);

        // d_t s_1 = 1/4 d^3 s_1 + 3 s_1 d s_1, expressed through s_1 = u/2:
        // = 1/8 d^3 u + 3/4 u du
        let mut expect_s1 = CoeffExpr::zero();
        expect_s1.insert(
            TermKey { xpow: 0, atoms: vec![Atom { sym: 0, r: 0, s: 3 }] },
            QRat::from_ratio(1, 8),
        );
        expect_s1.insert(
            TermKey {
                xpow: 0,
                atoms: vec![Atom { sym: 0, r: 0, s: 0 }, Atom { sym: 0, r: 0, s: 1 }],
            },
            QRat::from_ratio(3, 4),
        );
        assert_eq!(d.s1_flow, expect_s1);

        // the d_q^{1,2,3} coefficients of [L^3_+, L] vanish
        for h in &d.high_orders {
            assert!(h.is_zero());
        }
        // and both closed forms match the generic product
        assert_eq!(s1_flow_closed_form(&ring, &d), d.s1_flow);
        assert_eq!(u_flow_closed_form(&ring, &d), d.u_flow);
        // flow consistency
        assert!(flow_consistency_residual(&ring, &d).is_zero());
    }

    #[test]
    fn series_mode_q_half_u_x() {
        // q = 1/2, u = x, N = 8, M = 4: everything stays polynomial
        let trunc = 40;
        let u = XSeries::x(trunc);
        let q = QRat::from_ratio(1, 2);
        let (ring, d) = lax_solve_series(&u, &q, trunc, 4).unwrap();

        for (k, h) in d.high_orders.iter().enumerate() {
            assert!(h.is_zero(), "d_q^{} coefficient nonzero: {:?}", k + 1, h);
        }
        let closed = s1_flow_closed_form(&ring, &d);
        assert_eq!(closed, d.s1_flow);
        let closed_u = u_flow_closed_form(&ring, &d);
        assert_eq!(closed_u, d.u_flow);
        assert!(flow_consistency_residual(&ring, &d).is_zero());

        let (engine_w2, indep_w2) = w2_series_check(&ring, &d);
        assert_eq!(engine_w2, indep_w2);
    }

    #[test]
    fn series_mode_symbolic_q_u_one() {
        // u = 1 with formal q: w_2 two-path check has the closed value
        let trunc = 24;
        let u = XSeries::one(trunc);
        let (ring, d) = lax_solve_series(&u, &QRat::q(), trunc, 4).unwrap();
        let (engine_w2, indep_w2) = w2_series_check(&ring, &d);
        assert_eq!(engine_w2, indep_w2);
        // w_2 at q=1 must vanish (s_0, u_1 -> 0)
        let w2_q1 = engine_w2.limit_q_to_1().unwrap();
        assert!(w2_q1.is_zero());
        assert!(flow_consistency_residual(&ring, &d).is_zero());
    }

    #[test]
    fn series_mode_q_third_u_x() {
        let trunc = 40;
        let u = XSeries::x(trunc);
        let q = QRat::from_ratio(1, 3);
        let (ring, d) = lax_solve_series(&u, &q, trunc, 4).unwrap();
        let (engine_w2, indep_w2) = w2_series_check(&ring, &d);
        assert_eq!(engine_w2, indep_w2);
    }

    #[test]
    fn psdo_ring_laws() {
        // associativity, unit laws, distributivity, and d^n d^{-n} = 1
        let ring = SeriesRing::new(QRat::from_ratio(1, 2), 16);
        let m = 4;
        let mk = |order: i64, deg: i64| {
            psdo_from(
                &ring,
                m,
                vec![(order, XSeries::monomial(deg, QRat::one(), 16))],
            )
        };
        let ops = [mk(1, 0), mk(0, 1), mk(-1, 2), mk(2, 1)];
        let one = psdo_from(&ring, m, vec![(0, ring.one())]);
        for p in &ops {
            assert_eq!(psdo_mul(&ring, p, &one), *p);
            assert_eq!(psdo_mul(&ring, &one, p), *p);
        }
        for a in &ops {
            for b in &ops {
                for c in &ops {
                    let lhs = psdo_mul(&ring, &psdo_mul(&ring, a, b), c);
                    let rhs = psdo_mul(&ring, a, &psdo_mul(&ring, b, c));
                    // compare above the truncation-contaminated margin
                    for k in (-m + 3)..=5 {
                        let z = ring.zero();
                        assert_eq!(lhs.coeff_or(k, &z), rhs.coeff_or(k, &z), "order {}", k);
                    }
                    let dist = psdo_mul(&ring, a, &psdo_add(&ring, b, c));
                    let dist2 =
                        psdo_add(&ring, &psdo_mul(&ring, a, b), &psdo_mul(&ring, a, c));
                    assert_eq!(dist, dist2);
                }
            }
        }
        // d^n d^{-n} = 1 for n = 1..3
        for n in 1..=3i64 {
            let dn = mk(n, 0);
            let dninv = mk(-n, 0);
            let prod = psdo_mul(&ring, &dn, &dninv);
            for k in (-m + n)..=n {
                let z = ring.zero();
                let expect = if k == 0 { ring.one() } else { ring.zero() };
                assert_eq!(prod.coeff_or(k, &z), &expect, "n={} order {}", n, k);
            }
        }
    }

    #[test]
    fn plus_minus_decomposition() {
        let ring = SeriesRing::new(QRat::q(), 8);
        let p = psdo_from(
            &ring,
            3,
            vec![
                (2, XSeries::one(8)),
                (0, XSeries::x(8)),
                (-2, XSeries::one(8)),
            ],
        );
        let back = psdo_add(&ring, &psdo_plus(&p), &psdo_minus(&p));
        assert_eq!(back, p);
    }
}
