//! Basic hypergeometric series r_phi_s.

use crate::QSpecialError;
use qcore::{q_pochhammer, QRat};
use qseries::XSeries;

/// Data for an r_phi_s series. The twist factor `[(-1)^n q^{n(n-1)/2}]`
/// enters with exponent `s + 1 - r`; the series terminates when some
/// numerator parameter is `q^{-m}`.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub num_params: Vec<QRat>,
    pub den_params: Vec<QRat>,
    pub scale: QRat,
    pub trunc: i64,
}

pub fn phi_rs(spec: &PhiSpec) -> Result<XSeries, QSpecialError> {
    let r = spec.num_params.len() as i64;
    let s = spec.den_params.len() as i64;
    let twist_pow = s + 1 - r;
    let mut out = XSeries::zero(spec.trunc);
    for n in 0..=spec.trunc.max(0) {
        let nn = n as u32;
        let mut num = QRat::one();
        for a in &spec.num_params {
            num = &num * &q_pochhammer(a, nn);
        }
        let mut den = q_pochhammer(&QRat::q(), nn);
        for b in &spec.den_params {
            let p = q_pochhammer(b, nn);
            if p.is_zero() {
                return Err(QSpecialError::UndefinedTerm(n));
            }
            den = &den * &p;
        }
        let mut c = &(&num * &spec.scale.pow(n)) / &den;
        if twist_pow != 0 && !c.is_zero() {
            let sign = if n % 2 == 1 { -QRat::one() } else { QRat::one() };
            let tw = &sign * &QRat::q_pow(n * (n - 1) / 2);
            c = &c * &tw.pow(twist_pow);
        }
        out.set(n, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qseries::{q_exp, QExpKind};

    const N: i64 = 12;

    #[test]
    fn one_phi_zero_at_zero_is_tilde_e() {
        // 1phi0 with a = 0 has coefficients 1/(q;q)_n, i.e. ~e_q(x)
        let spec = PhiSpec {
            num_params: vec![QRat::zero()],
            den_params: vec![],
            scale: QRat::one(),
            trunc: N,
        };
        let s = phi_rs(&spec).unwrap();
        assert_eq!(s, q_exp(QExpKind::EqLowerTilde, &QRat::one(), N));
    }

    #[test]
    fn termination_with_negative_q_power() {
        // a1 = q^{-2}: exactly 3 nonzero coefficients
        let spec = PhiSpec {
            num_params: vec![QRat::q_pow(-2), QRat::zero()],
            den_params: vec![QRat::q_pow(3)],
            scale: QRat::one(),
            trunc: N,
        };
        let s = phi_rs(&spec).unwrap();
        let nonzero: Vec<i64> = s.degrees().map(|(d, _)| *d).collect();
        assert_eq!(nonzero, vec![0, 1, 2]);
    }

    #[test]
    fn zero_phi_zero_is_upper_tilde_e_of_minus_x() {
        // 0phi0 = sum (-1)^n q^{n(n-1)/2} x^n/(q;q)_n = ~E_q(-x)
        let spec = PhiSpec {
            num_params: vec![],
            den_params: vec![],
            scale: QRat::one(),
            trunc: N,
        };
        let s = phi_rs(&spec).unwrap();
        assert_eq!(s, q_exp(QExpKind::EqUpperTilde, &(-&QRat::one()), N));
    }

    #[test]
    fn undefined_denominator_reported() {
        let spec = PhiSpec {
            num_params: vec![],
            den_params: vec![QRat::q_pow(-3)],
            scale: QRat::one(),
            trunc: N,
        };
        assert!(matches!(
            phi_rs(&spec),
            Err(QSpecialError::UndefinedTerm(_))
        ));
    }
}
