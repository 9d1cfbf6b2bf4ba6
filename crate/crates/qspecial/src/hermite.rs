//! q-Hermite polynomials: the operator-defined family `(z + T_z)^n 1`
//! and the discrete q-Hermite I family from the three-term recurrence.

use qcore::QRat;
use qseries::XSeries;

/// `H_n(z, q) = (z + T_z)^n . 1` expanded on polynomials.
pub fn q_hermite(n: u32) -> XSeries {
    let q = QRat::q();
    let mut p = XSeries::one(n as i64);
    for _ in 0..n {
        // z*p + p(qz)
        let mut next = XSeries::zero(p.trunc() + 1);
        for (&d, c) in p.degrees() {
            next.set(d + 1, &next.coeff(d + 1) + c);
            next.set(d, &next.coeff(d) + &(&q.pow(d) * c));
        }
        p = next;
    }
    p
}

/// Discrete q-Hermite I: `h_0 = 1`, `h_1 = z`,
/// `h_{n+1}(z) = z h_n(z) - q^{n-1}(1-q^n) h_{n-1}(z)`.
pub fn discrete_q_hermite(n: u32) -> XSeries {
    let nn = n as i64;
    let mut prev = XSeries::one(nn);
    if n == 0 {
        return prev;
    }
    let mut cur = XSeries::x(nn);
    for k in 1..n {
        let kk = k as i64;
        let mut next = XSeries::zero(nn);
        for (&d, c) in cur.degrees() {
            next.set(d + 1, c.clone());
        }
        let fac = &QRat::q_pow(kk - 1) * &(&QRat::one() - &QRat::q_pow(kk));
        next = next.sub(&prev.scale(&fac));
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_hermite_low_orders() {
        // H_0 = 1, H_1 = z + 1, H_2 = (z+T_z)(z+1) = z^2 + (1+q)z + 1;
        // the operator application is its own oracle
        assert_eq!(q_hermite(0), XSeries::one(0));

        let h1 = q_hermite(1);
        assert!(h1.coeff(0).is_one() && h1.coeff(1).is_one());

        let h2 = q_hermite(2);
        assert!(h2.coeff(2).is_one());
        assert_eq!(h2.coeff(1), &QRat::one() + &QRat::q());
        assert!(h2.coeff(0).is_one());
    }

    #[test]
    fn discrete_hermite_low_orders() {
        // h_2 = z^2 - (1-q), h_3 = z^3 - (1-q^3) z
        let h2 = discrete_q_hermite(2);
        assert!(h2.coeff(2).is_one());
        assert_eq!(h2.coeff(0), -&(&QRat::one() - &QRat::q()));

        let h3 = discrete_q_hermite(3);
        assert!(h3.coeff(3).is_one());
        assert_eq!(h3.coeff(1), -&(&QRat::one() - &QRat::q_pow(3)));
        assert!(h3.coeff(0).is_zero());
    }

    #[test]
    fn discrete_hermite_q1_is_probabilists_shape() {
        // at q = 1 the recurrence collapses to h_{n+1} = z h_n, so h_n = z^n
        for n in 0..=5u32 {
            let h = discrete_q_hermite(n).limit_q_to_1().unwrap();
            assert_eq!(h, XSeries::monomial(n as i64, QRat::one(), n as i64));
        }
    }
}
