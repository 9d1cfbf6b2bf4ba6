//! Schur polynomials from the generating function `exp(sum t_k z^k)` and
//! their scaled-derivative operator avatars.

use crate::tpoly::{dt, t, NT};
use qcore::QRat;
use std::collections::BTreeMap;

/// Monomial in t-exponents -> coefficient, a lightweight view of `p_n`
/// used for operator substitution (restricted to t_1..t_4; monomials in
/// higher times act as zero on the tau ring and are dropped).
pub type SchurMono = [u8; NT];

/// Coefficients of `p_n(t1..t4)` (the restriction of the full Schur
/// polynomial to the first four times).
pub fn schur_monomials(n: u32) -> BTreeMap<SchurMono, QRat> {
    // iterate exp(sum_{k<=4} t_k z^k) degree by degree: p_n = sum over
    // compositions; recursion p_n = (1/n) sum_{k=1..min(n,4)} k t_k p_{n-k}
    // is the standard Newton-type identity, but direct expansion is
    // simplest: walk multi-indices a with sum k*a_k = n
    let mut out = BTreeMap::new();
    fn rec(
        n: i64,
        k: usize,
        current: &mut [u8; NT],
        out: &mut BTreeMap<SchurMono, QRat>,
    ) {
        if n == 0 {
            // coefficient prod 1/a_k!
            let mut c = QRat::one();
            for &a in current.iter() {
                let mut f = 1i64;
                for j in 1..=(a as i64) {
                    f *= j;
                }
                c = &c / &QRat::from_int(f);
            }
            out.insert(*current, c);
            return;
        }
        if k > NT || (k as i64) > n {
            return;
        }
        // a_k copies of part k
        let mut a = 0u8;
        loop {
            let used = (a as i64) * (k as i64);
            if used > n {
                break;
            }
            current[k - 1] = a;
            rec(n - used, k + 1, current, out);
            current[k - 1] = 0;
            a += 1;
        }
    }
    rec(n as i64, 1, &mut [0; NT], &mut out);
    out
}

/// `p_n` as a polynomial value.
pub fn schur_p(n: u32) -> QRat {
    let mut acc = QRat::zero();
    for (mono, c) in schur_monomials(n) {
        let mut term = c;
        for (k, &a) in mono.iter().enumerate() {
            term = &term * &t(k + 1).pow(a as i64);
        }
        acc = &acc + &term;
    }
    acc
}

/// `p_n(t)` or `p_n(-t)`. Each monomial of `p_n(-t)` picks up the sign
/// `(-1)^{sum a_k}` (the number of t-factors, not n), so substitute
/// honestly rather than using a global parity.
pub fn schur_p_signed(n: u32, negate: bool) -> QRat {
    if negate {
        schur_substituted_neg(n)
    } else {
        schur_p(n)
    }
}

fn schur_substituted_neg(n: u32) -> QRat {
    let mut acc = QRat::zero();
    for (mono, c) in schur_monomials(n) {
        let mut term = c;
        let mut parity = 0u32;
        for (k, &a) in mono.iter().enumerate() {
            term = &term * &t(k + 1).pow(a as i64);
            parity += a as u32;
        }
        if parity % 2 == 1 {
            term = -term;
        }
        acc = &acc + &term;
    }
    acc
}

/// Apply `p_n(sign * ~d)` with `~d = (d_1, d_2/2, d_3/3, ...)` to a
/// rational function of the times.
pub fn schur_apply(n: u32, negate: bool, f: &QRat) -> QRat {
    let mut acc = QRat::zero();
    for (mono, c) in schur_monomials(n) {
        let mut g = f.clone();
        let mut scale = c;
        let mut parity = 0u32;
        for (k, &a) in mono.iter().enumerate() {
            for _ in 0..a {
                g = dt(&g, k + 1);
                scale = &scale / &QRat::from_int((k + 1) as i64);
            }
            parity += a as u32;
        }
        if negate && parity % 2 == 1 {
            scale = -scale;
        }
        acc = &acc + &(&scale * &g);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpoly::hirota_ctx;

    #[test]
    fn low_schur_values() {
        // p_0 = 1, p_1 = t1, p_2 = t2 + t1^2/2
        assert!(schur_p(0).is_one());
        assert_eq!(schur_p(1), t(1));
        let expect = &t(2) + &(&(&t(1) * &t(1)) * &QRat::from_ratio(1, 2));
        assert_eq!(schur_p(2), expect);
    }

    #[test]
    fn operator_avatar_on_t1_cubed() {
        // p_2(~d) t1^3 = (d2/2 + d1^2/2) t1^3 = 3 t1
        let f = t(1).pow(3);
        let out = schur_apply(2, false, &f);
        assert_eq!(out, &QRat::from_int(3) * &t(1));
    }

    #[test]
    fn generating_function_inverse() {
        // sum_n p_n(t) p_m(-t) with n+m = N vanishes for N >= 1
        let ctx = hirota_ctx();
        let _ = &ctx;
        for total in 1..=6u32 {
            let mut acc = QRat::zero();
            for n in 0..=total {
                let m = total - n;
                acc = &acc + &(&schur_p_signed(n, false) * &schur_p_signed(m, true));
            }
            assert!(acc.is_zero(), "total={}", total);
        }
    }
}
