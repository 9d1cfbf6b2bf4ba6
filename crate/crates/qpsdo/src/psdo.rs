//! The formal q-pseudodifferential operator ring: Laurent series in the
//! Jackson derivative with coefficients on the left, truncated below at a
//! configurable depth.

use crate::coeff::{ring_qbinom, CoeffOps};
use std::collections::BTreeMap;

/// `sum_i c_i d_q^i`, with orders kept in `[-depth, +maxdeg]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPsdo<C> {
    pub coeffs: BTreeMap<i64, C>,
    pub depth: i64,
}

impl<C: Clone + PartialEq> QPsdo<C> {
    pub fn new(depth: i64) -> Self {
        QPsdo { coeffs: BTreeMap::new(), depth }
    }

    pub fn order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff_or<'a>(&'a self, order: i64, zero: &'a C) -> &'a C {
        self.coeffs.get(&order).unwrap_or(zero)
    }
}

pub fn psdo_from<R: CoeffOps>(ring: &R, depth: i64, entries: Vec<(i64, R::C)>) -> QPsdo<R::C> {
    let mut p = QPsdo::new(depth);
    for (k, c) in entries {
        if !ring.is_zero(&c) && k >= -depth {
            p.coeffs.insert(k, c);
        }
    }
    p
}

pub fn psdo_add<R: CoeffOps>(ring: &R, a: &QPsdo<R::C>, b: &QPsdo<R::C>) -> QPsdo<R::C> {
    let mut out = a.clone();
    out.depth = a.depth.min(b.depth);
    for (&k, c) in &b.coeffs {
        let merged = match out.coeffs.get(&k) {
            Some(cur) => ring.add(cur, c),
            None => c.clone(),
        };
        if ring.is_zero(&merged) {
            out.coeffs.remove(&k);
        } else {
            out.coeffs.insert(k, merged);
        }
    }
    out
}

pub fn psdo_neg<R: CoeffOps>(ring: &R, a: &QPsdo<R::C>) -> QPsdo<R::C> {
    let mut out = a.clone();
    for (_, c) in out.coeffs.iter_mut() {
        *c = ring.neg(c);
    }
    out
}

pub fn psdo_sub<R: CoeffOps>(ring: &R, a: &QPsdo<R::C>, b: &QPsdo<R::C>) -> QPsdo<R::C> {
    psdo_add(ring, a, &psdo_neg(ring, b))
}

/// Composition via the twisted Leibniz expansion
/// `d_q^i (g .) = sum_m [i m]_q D^{i-m}(d_q^m g) d_q^{i-m}`,
/// with the infinite tails (i < 0) truncated at the common depth.
pub fn psdo_mul<R: CoeffOps>(ring: &R, a: &QPsdo<R::C>, b: &QPsdo<R::C>) -> QPsdo<R::C> {
    let depth = a.depth.min(b.depth);
    let q = ring.q().clone();
    let mut out: BTreeMap<i64, R::C> = BTreeMap::new();
    for (&i, ci) in &a.coeffs {
        for (&j, cj) in &b.coeffs {
            // m ranges until the output order i+j-m falls below -depth
            let mut m: i64 = 0;
            let mut dm = cj.clone(); // d_q^m applied to cj
            loop {
                let k = i + j - m;
                if k < -depth {
                    break;
                }
                if i >= 0 && m > i {
                    break;
                }
                let qb = ring_qbinom(&q, i, m);
                if !qb.is_zero() {
                    // D^{i-m}(d_q^m cj)
                    let shifted = ring.shift(&dm, i - m);
                    let term = ring.scale(&ring.mul(ci, &shifted), &qb);
                    if !ring.is_zero(&term) {
                        match out.get_mut(&k) {
                            Some(cur) => {
                                let s = ring.add(cur, &term);
                                *cur = s;
                            }
                            None => {
                                out.insert(k, term);
                            }
                        }
                    }
                }
                m += 1;
                dm = ring.qderiv(&dm);
                if ring.is_zero(&dm) && (i >= 0 || ring.is_zero(&ring.qderiv(&dm))) {
                    // nothing further can contribute
                    break;
                }
            }
        }
    }
    out.retain(|_, c| !ring.is_zero(c));
    QPsdo { coeffs: out, depth }
}

/// Commutator `[a, b]`.
pub fn psdo_commutator<R: CoeffOps>(ring: &R, a: &QPsdo<R::C>, b: &QPsdo<R::C>) -> QPsdo<R::C> {
    psdo_sub(ring, &psdo_mul(ring, a, b), &psdo_mul(ring, b, a))
}

/// Differential-operator part (orders >= 0).
pub fn psdo_plus<C: Clone + PartialEq>(p: &QPsdo<C>) -> QPsdo<C> {
    let mut out = QPsdo::new(p.depth);
    for (&k, c) in &p.coeffs {
        if k >= 0 {
            out.coeffs.insert(k, c.clone());
        }
    }
    out
}

/// Tail part (orders < 0); `plus + minus` is the identity decomposition.
pub fn psdo_minus<C: Clone + PartialEq>(p: &QPsdo<C>) -> QPsdo<C> {
    let mut out = QPsdo::new(p.depth);
    for (&k, c) in &p.coeffs {
        if k < 0 {
            out.coeffs.insert(k, c.clone());
        }
    }
    out
}

/// Residue: the coefficient of `d_q^{-1}`.
pub fn psdo_residue<R: CoeffOps>(ring: &R, p: &QPsdo<R::C>) -> R::C {
    p.coeffs.get(&-1).cloned().unwrap_or_else(|| ring.zero())
}

/// Formal adjoint with the `(d_q)^* = -(1/q) D_{1/q}` convention. The
/// result lives in the mirrored ring (base 1/q); `(PQ)^* = Q^* P^*` holds
/// there. Coefficients transfer unchanged; only the ring's base flips.
pub fn psdo_adjoint<R: CoeffOps>(ring: &R, mirror: &R, p: &QPsdo<R::C>) -> QPsdo<R::C> {
    // sum_i (-1/q)^i  d_{1/q}^i o c_i   computed in the mirror ring
    let q = ring.q().clone();
    let mut out = QPsdo::new(p.depth);
    for (&i, ci) in &p.coeffs {
        let bare = psdo_from(mirror, p.depth, vec![(i, mirror.one())]);
        let coeff_op = psdo_from(mirror, p.depth, vec![(0, ci.clone())]);
        let mut term = psdo_mul(mirror, &bare, &coeff_op);
        let factor = (-&q.inv()).pow(i);
        for (_, c) in term.coeffs.iter_mut() {
            *c = mirror.scale(c, &factor);
        }
        out = psdo_add(mirror, &out, &term);
    }
    out
}

/// Apply an operator to a plain function; negative orders integrate
/// monomials exactly (`d_q^{-1} x^n = x^{n+1}/[n+1]`).
pub fn psdo_apply(ring: &crate::coeff::SeriesRing, p: &QPsdo<qseries::XSeries>, f: &qseries::XSeries) -> qseries::XSeries {
    use crate::coeff::ring_qint;
    let mut out = ring.zero();
    for (&i, ci) in &p.coeffs {
        let mut g = f.clone();
        if i >= 0 {
            for _ in 0..i {
                g = ring.qderiv(&g);
            }
        } else {
            for _ in 0..(-i) {
                let mut h = ring.zero();
                for (&n, c) in g.degrees() {
                    let d = ring_qint(&ring.q, n + 1);
                    h.set(n + 1, &h.coeff(n + 1) + &(c / &d));
                }
                g = h;
            }
        }
        out = out.add(&ci.mul(&g));
    }
    out
}
