//! Polynomials and rational functions in the time variables, with the
//! tau-shift machinery. A `TPoly` is a `QRat` over the shared context
//! `(q; t1, t2, t3, t4, x)`.

use qcore::{ParamContext, QRat};

pub const NT: usize = 4;
/// variable index (into the QRat variable numbering) of t_k, 1-based k
pub fn tvar(k: usize) -> usize {
    debug_assert!((1..=NT).contains(&k));
    k
}
/// variable index of x
pub fn xvar() -> usize {
    NT + 1
}

pub fn hirota_ctx() -> ParamContext {
    ParamContext::new(vec!["t1", "t2", "t3", "t4", "x"])
}

/// The t-variable as a value.
pub fn t(k: usize) -> QRat {
    hirota_ctx().param(&format!("t{}", k)).expect("declared")
}

pub fn x_val() -> QRat {
    hirota_ctx().param("x").expect("declared")
}

/// `c_n(x) = (1-q)^n x^n / (n (1-q^n))`, the tau-shift vector entries.
pub fn c_of_x(n: u32) -> QRat {
    let q = QRat::q();
    let one = QRat::one();
    let num = &(&one - &q).pow(n as i64) * &x_val().pow(n as i64);
    let den = &QRat::from_int(n as i64) * &(&one - &q.pow(n as i64));
    &num / &den
}

/// Substitute `t_k -> t_k + shift_k` for k = 1..=NT.
pub fn shift_times(f: &QRat, shifts: &[QRat; NT]) -> QRat {
    let mut out = f.clone();
    for k in 1..=NT {
        let val = &t(k) + &shifts[k - 1];
        out = out.substitute_var(tvar(k), &val).expect("polynomial shift");
    }
    out
}

/// `tau_q(t, x) = tau(t + c(x))`.
pub fn tau_q(tau: &QRat) -> QRat {
    let shifts = [c_of_x(1), c_of_x(2), c_of_x(3), c_of_x(4)];
    shift_times(tau, &shifts)
}

/// The multiplicative x-shift `D^m` (x -> q^m x).
pub fn d_shift(f: &QRat, m: i64) -> QRat {
    let val = &QRat::q_pow(m) * &x_val();
    f.substitute_var(xvar(), &val).expect("polynomial shift")
}

/// Jackson derivative in x: `(f(qx) - f(x)) / ((q-1) x)`.
pub fn dq_x(f: &QRat) -> QRat {
    let num = &d_shift(f, 1) - f;
    &num / &(&(&QRat::q() - &QRat::one()) * &x_val())
}

/// `d/dt_k`.
pub fn dt(f: &QRat, k: usize) -> QRat {
    f.derivative(tvar(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_is_x() {
        assert_eq!(c_of_x(1), x_val());
    }

    #[test]
    fn shift_vector_identity_a57() {
        // D c(x) = c(qx): c_n(x) - (1/n) lambda_1^{-n} = c_n(qx) with
        // lambda_1^{-1} = (1-q) x
        let lam1 = &(&QRat::one() - &QRat::q()) * &x_val();
        for n in 1..=4u32 {
            let lhs = &c_of_x(n) - &(&lam1.pow(n as i64) / &QRat::from_int(n as i64));
            let rhs = d_shift(&c_of_x(n), 1);
            assert_eq!(lhs, rhs, "n={}", n);
        }
    }

    #[test]
    fn shift_vector_identity_a58() {
        // D^n c(x) = c(x) - sum_{i=1}^n [lambda_i^{-1}] with
        // lambda_i^{-1} = (1-q) x q^{i-1}
        for n in 1..=3i64 {
            for comp in 1..=4u32 {
                let mut acc = c_of_x(comp);
                for i in 1..=n {
                    let lam = &(&(&QRat::one() - &QRat::q()) * &x_val())
                        * &QRat::q_pow(i - 1);
                    acc = &acc - &(&lam.pow(comp as i64) / &QRat::from_int(comp as i64));
                }
                assert_eq!(acc, d_shift(&c_of_x(comp), n), "n={} comp={}", n, comp);
            }
        }
    }

    #[test]
    fn tau_shift_composes_with_d() {
        // D tau_q, computed as an x-shift, equals tau(t + c(qx))
        let tau = &(&t(1) * &t(2)) + &t(1);
        let lhs = d_shift(&tau_q(&tau), 1);
        let shifts = [
            d_shift(&c_of_x(1), 1),
            d_shift(&c_of_x(2), 1),
            d_shift(&c_of_x(3), 1),
            d_shift(&c_of_x(4), 1),
        ];
        let rhs = shift_times(&tau, &shifts);
        assert_eq!(lhs, rhs);
    }
}
