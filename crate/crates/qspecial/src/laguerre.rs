//! q-Laguerre functions from the 1phi1 kernel.

use crate::{phi_rs, PhiSpec, QSpecialError};
use num::{BigInt, BigRational};
use qcore::{q_pochhammer, QRat};
use qseries::XSeries;

/// `L^lambda_nu(x; q) = ((q^{lambda+1};q)_nu / (q;q)_nu)
///   1phi1(q^{-nu}; q^{lambda+1}; q, -(1-q) q^{lambda+nu+1} x)`,
/// a polynomial of degree `nu` thanks to the terminating `q^{-nu}`.
pub fn q_laguerre(nu: u32, lambda: u32, trunc: i64) -> Result<XSeries, QSpecialError> {
    let arg = &(-&(&QRat::one() - &QRat::q())) * &QRat::q_pow((lambda + nu + 1) as i64);
    let kernel = phi_rs(&PhiSpec {
        num_params: vec![QRat::q_pow(-(nu as i64))],
        den_params: vec![QRat::q_pow((lambda + 1) as i64)],
        scale: arg,
        trunc,
    })?;
    let pref = &q_pochhammer(&QRat::q_pow((lambda + 1) as i64), nu)
        / &q_pochhammer(&QRat::q(), nu);
    Ok(kernel.scale(&pref))
}

/// Classical generalized Laguerre coefficient of `x^k` in `L^(lambda)_nu`:
/// `(-1)^k C(nu+lambda, nu-k) / k!` -- the brute-force oracle.
pub fn classical_laguerre_coeff(nu: u32, lambda: u32, k: u32) -> BigRational {
    let n = (nu + lambda) as i64;
    let choose = (nu - k) as i64;
    let mut c = BigInt::from(1);
    for j in 0..choose {
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    let mut fact = BigInt::from(1);
    for j in 1..=(k as i64) {
        fact *= j;
    }
    let mut v = BigRational::new(c, fact);
    if k % 2 == 1 {
        v = -v;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_zero_is_constant_one() {
        let l = q_laguerre(0, 3, 8).unwrap();
        assert_eq!(l, XSeries::one(8));
    }

    #[test]
    fn degree_equals_nu() {
        for nu in 1..=3u32 {
            let l = q_laguerre(nu, 2, 10).unwrap();
            let degs: Vec<i64> = l.degrees().map(|(d, _)| *d).collect();
            assert_eq!(*degs.last().unwrap(), nu as i64, "nu={}", nu);
        }
    }

    #[test]
    fn q1_limit_matches_classical_laguerre() {
        // coefficientwise limit, then an evaluation at a sample rational x
        let nu = 2u32;
        let lambda = 1u32;
        let l = q_laguerre(nu, lambda, 6).unwrap().limit_q_to_1().unwrap();
        for k in 0..=nu {
            let expect = classical_laguerre_coeff(nu, lambda, k);
            assert_eq!(l.coeff(k as i64), QRat::from_big_ratio(&expect), "k={}", k);
        }
        // value check at x = 3/2: L^1_2(x) = 3 - 3x + x^2/2
        let x = BigRational::new(BigInt::from(3), BigInt::from(2));
        let mut val = BigRational::from(BigInt::from(0));
        let mut xp = BigRational::from(BigInt::from(1));
        for k in 0..=nu {
            let c = l
                .coeff(k as i64)
                .eval(&|_| BigRational::from(BigInt::from(1)))
                .unwrap();
            val += c * xp.clone();
            xp *= x.clone();
        }
        let brute = BigRational::from(BigInt::from(3))
            - BigRational::from(BigInt::from(3)) * x.clone()
            + x.clone() * x.clone() / BigRational::from(BigInt::from(2));
        assert_eq!(val, brute);
    }
}
