//! q-numbers, q-binomial coefficients and q-Pochhammer symbols.

use crate::QRat;

/// `[n]_q = (q^n - 1)/(q - 1)` for any integer `n`. With a base `b` instead
/// of `q` this computes `[[n]]_b = (b^n - 1)/(b - 1)`.
pub fn q_int_base(base: &QRat, n: i64) -> QRat {
    &(&base.pow(n) - &QRat::one()) / &(base - &QRat::one())
}

/// `[n]_q`, polynomial for `n >= 0`, Laurent-rational for `n < 0`.
pub fn q_int(n: i64) -> QRat {
    q_int_base(&QRat::q(), n)
}

/// Gaussian binomial with arbitrary integer upper index:
/// `[n m]_q = prod_{j=1}^{m} [n-j+1]_q / [j]_q`.
pub fn q_binom(n: i64, m: i64) -> QRat {
    assert!(m >= 0, "q_binom lower index must be nonnegative");
    let mut acc = QRat::one();
    for j in 1..=m {
        acc = &acc * &(&q_int(n - j + 1) / &q_int(j));
    }
    acc
}

/// `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`.
pub fn q_pochhammer(a: &QRat, n: u32) -> QRat {
    let q = QRat::q();
    let mut acc = QRat::one();
    let mut qa = a.clone();
    for _ in 0..n {
        acc = &acc * &(&QRat::one() - &qa);
        qa = &qa * &q;
    }
    acc
}

/// `(a; b)_n` with an arbitrary base `b`.
pub fn q_pochhammer_base(a: &QRat, base: &QRat, n: u32) -> QRat {
    let mut acc = QRat::one();
    let mut qa = a.clone();
    for _ in 0..n {
        acc = &acc * &(&QRat::one() - &qa);
        qa = &qa * base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational};

    fn at_q1(v: &QRat) -> BigRational {
        v.eval(&|_| BigRational::from(BigInt::from(1))).unwrap()
    }

    #[test]
    fn q_int_small_values() {
        assert!(q_int(0).is_zero());
        // [3]_q = 1 + q + q^2
        let q = QRat::q();
        let expect = &(&QRat::one() + &q) + &(&q * &q);
        assert_eq!(q_int(3), expect);
    }

    #[test]
    fn q_int_negative_cross_check() {
        // derived oracle: [-2]_q + q^{-2} [2]_q = 0
        let v = &q_int(-2) + &(&QRat::q_pow(-2) * &q_int(2));
        assert!(v.is_zero());
        // and the reduced closed form -q^{-2}(1+q)
        let expect = &(-&QRat::q_pow(-2)) * &(&QRat::one() + &QRat::q());
        assert_eq!(q_int(-2), expect);
    }

    #[test]
    fn q_int_addition_rule() {
        // [n+m]_q = [n]_q + q^n [m]_q for |n|,|m| <= 6
        for n in -6i64..=6 {
            for m in -6i64..=6 {
                let lhs = q_int(n + m);
                let rhs = &q_int(n) + &(&QRat::q_pow(n) * &q_int(m));
                assert_eq!(lhs, rhs, "n={} m={}", n, m);
            }
        }
    }

    #[test]
    fn q_binom_basics() {
        assert!(q_binom(5, 0).is_one());
        // [4 2]_q = (q^2+1)(q^2+q+1), expanded oracle
        let q = QRat::q();
        let f1 = &(&q * &q) + &QRat::one();
        let f2 = &(&(&q * &q) + &q) + &QRat::one();
        assert_eq!(q_binom(4, 2), &f1 * &f2);
    }

    #[test]
    fn q_binom_negative_one_closed_form() {
        // Gaussian binomial with upper index -1: (-1)^m q^{-m(m+1)/2}
        for m in 0..=6i64 {
            let sign = if m % 2 == 0 { QRat::one() } else { -&QRat::one() };
            let expect = &sign * &QRat::q_pow(-m * (m + 1) / 2);
            assert_eq!(q_binom(-1, m), expect, "m={}", m);
        }
    }

    #[test]
    fn q_binom_negative_closed_forms() {
        // upper index -2 and -3 closed forms against the product definition
        for m in 0..=6i64 {
            let sign = if m % 2 == 0 { QRat::one() } else { -&QRat::one() };
            let e2 = &(&sign * &q_int(m + 1)) * &QRat::q_pow(-m * (m + 3) / 2);
            assert_eq!(q_binom(-2, m), e2, "n=-2 m={}", m);
            // upper index -3 is (-1)^m [m+2 choose 2]_q q^{-m(m+5)/2}; the
            // two-factor numerator needs the [2]_q! normalization
            let e3 = &(&(&(&sign * &q_int(m + 2)) * &q_int(m + 1)) / &q_int(2))
                * &QRat::q_pow(-m * (m + 5) / 2);
            assert_eq!(q_binom(-3, m), e3, "n=-3 m={}", m);
        }
    }

    #[test]
    fn q_binom_q1_is_binomial() {
        for n in 0..=8i64 {
            for m in 0..=n {
                let mut c = BigInt::from(1);
                for j in 0..m {
                    c = c * BigInt::from(n - j) / BigInt::from(j + 1);
                }
                assert_eq!(at_q1(&q_binom(n, m)), BigRational::from(c));
            }
        }
    }

    #[test]
    fn q_binom_pascal() {
        // [n m] = [n-1 m-1] + q^m [n-1 m]
        for n in 1..=8i64 {
            for m in 1..=n {
                let lhs = q_binom(n, m);
                let rhs = &q_binom(n - 1, m - 1) + &(&QRat::q_pow(m) * &q_binom(n - 1, m));
                assert_eq!(lhs, rhs, "n={} m={}", n, m);
            }
        }
    }

    #[test]
    fn pochhammer_values() {
        assert!(q_pochhammer(&QRat::q(), 0).is_one());
        let q = QRat::q();
        let two = q_pochhammer(&q, 2);
        let expect = &(&QRat::one() - &q) * &(&QRat::one() - &(&q * &q));
        assert_eq!(two, expect);
        let three = q_pochhammer(&q, 3);
        let expect3 = &expect * &(&QRat::one() - &q.pow(3));
        assert_eq!(three, expect3);
    }

    #[test]
    fn q_eval_pole_detected() {
        let q = QRat::q();
        let v = &QRat::one() / &(&q - &QRat::one());
        assert!(v.eval(&|_| BigRational::from(BigInt::from(1))).is_err());
        // but [3]_q at q=1 is 3 despite the (q-1) denominators en route
        assert_eq!(at_q1(&q_int(3)), BigRational::from(BigInt::from(3)));
    }
}
