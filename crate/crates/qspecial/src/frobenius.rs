//! Frobenius-type solver for q-difference equations with a regular
//! singularity: `z^2 (D_q^2 u) + z A(z) (D_q u) + B(z) u = 0` with
//! `u = sum c_k z^{lambda+k}`, `c_0 = 1`.

use crate::{QSpecialError, ResidualReport};
use qcore::{ParamContext, QRat};
use qseries::XSeries;

/// Coefficient data plus the exponent, carried as the value of `q^lambda`
/// (a rational function so formal exponents like `1 - c` become `q/C`).
#[derive(Clone, Debug)]
pub struct FrobeniusProblem {
    pub a: XSeries,
    pub b: XSeries,
    pub lambda_pow: QRat,
    pub trunc: i64,
}

/// A solved series `z^lambda * sum c_k z^k`.
#[derive(Clone, Debug)]
pub struct FrobeniusSolution {
    pub coeffs: XSeries,
    pub lambda_pow: QRat,
}

/// `[lambda + k]_q` expressed through `q^lambda`.
fn q_int_shifted(lambda_pow: &QRat, k: i64) -> QRat {
    let q = QRat::q();
    &(&(lambda_pow * &QRat::q_pow(k)) - &QRat::one()) / &(&q - &QRat::one())
}

fn indicial(p: &FrobeniusProblem, k: i64) -> QRat {
    let mu = q_int_shifted(&p.lambda_pow, k);
    let mu1 = q_int_shifted(&p.lambda_pow, k - 1);
    &(&(&mu * &mu1) + &(&p.a.coeff(0) * &mu)) + &p.b.coeff(0)
}

pub fn frobenius_solve(p: &FrobeniusProblem) -> Result<FrobeniusSolution, QSpecialError> {
    let i0 = indicial(p, 0);
    if !i0.is_zero() {
        return Err(QSpecialError::ResonantExponent(format!(
            "indicial quantity nonzero at k=0: {:?}",
            i0
        )));
    }
    let mut coeffs = XSeries::zero(p.trunc);
    coeffs.set(0, QRat::one());
    for k in 1..=p.trunc {
        let ik = indicial(p, k);
        let mut acc = QRat::zero();
        for i in 0..k {
            let ci = coeffs.coeff(i);
            if ci.is_zero() {
                continue;
            }
            let mu_i = q_int_shifted(&p.lambda_pow, i);
            let t = &(&p.a.coeff(k - i) * &mu_i) + &p.b.coeff(k - i);
            acc = &acc + &(&t * &ci);
        }
        if ik.is_zero() {
            // a resonant index is tolerable only when the forcing term also
            // vanishes; then the minimal solution takes c_k = 0
            if acc.is_zero() {
                continue;
            }
            return Err(QSpecialError::ResonantExponent(format!(
                "indicial quantity vanishes at k={}",
                k
            )));
        }
        coeffs.set(k, &(-&acc) / &ik);
    }
    Ok(FrobeniusSolution {
        coeffs,
        lambda_pow: p.lambda_pow.clone(),
    })
}

/// Apply `D_q` to a tagged series: degree-k coefficient picks up
/// `[lambda+k]_q` and the exponent drops by one (tracked externally).
fn dq_tagged(s: &XSeries, lambda_pow: &QRat) -> XSeries {
    let mut out = XSeries::zero(s.trunc());
    for (&k, c) in s.degrees() {
        out.set(k, &q_int_shifted(lambda_pow, k) * c);
    }
    out
}

/// Residual of the q-hypergeometric equation on a tagged candidate, with
/// formal parameters A=q^a, B=q^b, C=q^c taken from `ctx`. The middle
/// coefficient uses the sum of the two displayed terms.
pub fn hypergeom_residual(
    ctx: &ParamContext,
    cand: &FrobeniusSolution,
    trunc: i64,
) -> Result<ResidualReport, QSpecialError> {
    let pa = ctx.param("A")?;
    let pb = ctx.param("B")?;
    let pc = ctx.param("C")?;
    let q = QRat::q();
    let qm1 = &q - &QRat::one();

    // z (q^c - q^{a+b+1} z) D^2 u + ([c]_q - (q^b [a]_q + q^a [b+1]_q) z) D u
    //   - [a]_q [b]_q u = 0
    let d1 = dq_tagged(&cand.coeffs, &cand.lambda_pow);
    // D_q u lives on exponents lambda-1+k, so the second derivative picks
    // up [lambda-1+k]_q
    let d2 = dq_tagged(&d1, &(&cand.lambda_pow / &q));
    // assemble on the common exponent grid z^{lambda+k}:
    //   u at offset 0; D u at offset -1; D^2 u at offset -2
    let shift = |s: &XSeries, off: i64| -> XSeries {
        let mut out = XSeries::zero(trunc);
        for (&k, c) in s.degrees() {
            let d = k + off;
            if (0..=trunc).contains(&d) {
                out.set(d, c.clone());
            }
        }
        out
    };

    // z * q^c * D^2 u -> offset -1; z^2 * q^{a+b+1} D^2 u -> offset 0
    let t1 = shift(&d2, -1).scale(&pc);
    let t1b = shift(&d2, 0).scale(&(&(&pa * &pb) * &q)).neg();
    let c_int = &(&pc - &QRat::one()) / &qm1;
    let t2 = shift(&d1, -1).scale(&c_int);
    let g = &(&(&pb * &(&pa - &QRat::one())) + &(&pa * &(&(&pb * &q) - &QRat::one()))) / &qm1;
    let t2b = shift(&d1, 0).scale(&g).neg();
    let ab = &(&(&pa - &QRat::one()) * &(&pb - &QRat::one())) / &(&qm1 * &qm1);
    let t3 = shift(&cand.coeffs, 0).scale(&ab).neg();

    // the grid shift moves everything to exponents lambda-1+k; combining
    // term offsets consistently keeps the equation exact degreewise
    let resid = t1.add(&t1b).add(&t2).add(&t2b).add(&t3).with_trunc(trunc - 1);
    Ok(ResidualReport::from_series("hypergeom_eq18", &resid, ctx))
}

/// The q-hypergeometric instance of the Frobenius data: `A(z)`, `B(z)`
/// expanded from `z(q^c - q^{a+b+1}z) D^2 u + (...) D u - [a][b] u = 0`
/// normalized to `z^2 D^2 u + z A(z) D u + B(z) u = 0`.
pub fn hypergeom_problem(
    ctx: &ParamContext,
    lambda_pow: QRat,
    trunc: i64,
) -> Result<FrobeniusProblem, QSpecialError> {
    let pa = ctx.param("A")?;
    let pb = ctx.param("B")?;
    let pc = ctx.param("C")?;
    let q = QRat::q();
    let qm1 = &q - &QRat::one();

    // 1/(q^c - q^{a+b+1} z) = C^{-1} sum (q A B / C)^k z^k
    let ratio = &(&(&pa * &pb) * &q) / &pc;
    let mut geo = XSeries::zero(trunc);
    for k in 0..=trunc {
        geo.set(k, &ratio.pow(k) / &pc);
    }
    let c_int = &(&pc - &QRat::one()) / &qm1;
    let g = &(&(&pb * &(&pa - &QRat::one())) + &(&pa * &(&(&pb * &q) - &QRat::one()))) / &qm1;
    let mut m = XSeries::zero(trunc);
    m.set(0, c_int);
    m.set(1, -&g);
    let a = m.mul(&geo);
    let ab = &(&(&pa - &QRat::one()) * &(&pb - &QRat::one())) / &(&qm1 * &qm1);
    let b = XSeries::monomial(1, -&ab, trunc).mul(&geo);
    Ok(FrobeniusProblem { a, b, lambda_pow, trunc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_phi_one;

    const N: i64 = 12;

    fn abc() -> (ParamContext, QRat, QRat, QRat) {
        let ctx = ParamContext::new(vec!["A", "B", "C"]);
        let a = ctx.param("A").unwrap();
        let b = ctx.param("B").unwrap();
        let c = ctx.param("C").unwrap();
        (ctx, a, b, c)
    }

    #[test]
    fn hypergeometric_ratio_matches_recursion() {
        // c_{k+1}/c_k = (1-Aq^k)(1-Bq^k)/((1-Cq^k)(1-q^{k+1})) at lambda = 0
        let (ctx, a, b, c) = abc();
        let p = hypergeom_problem(&ctx, QRat::one(), N).unwrap();
        let sol = frobenius_solve(&p).unwrap();
        let q = QRat::q();
        for k in 0..N - 1 {
            let lhs = &sol.coeffs.coeff(k + 1) / &sol.coeffs.coeff(k);
            let one = QRat::one();
            let rhs = &(&(&one - &(&a * &q.pow(k))) * &(&one - &(&b * &q.pow(k))))
                / &(&(&one - &(&c * &q.pow(k))) * &(&one - &q.pow(k + 1)));
            assert_eq!(lhs, rhs, "k={}", k);
        }
        // and equals 2phi1 itself
        let phi = two_phi_one(&a, &b, &c, N).unwrap();
        assert_eq!(sol.coeffs, phi);
    }

    #[test]
    fn trivial_problem_has_constant_solution() {
        // A = B = 0 except b0 chosen so the indicial roots work at lambda=0:
        // with A=B=0 identically, every c_k (k>=1) vanishes
        let p = FrobeniusProblem {
            a: XSeries::zero(N),
            b: XSeries::zero(N),
            lambda_pow: QRat::one(),
            trunc: N,
        };
        let sol = frobenius_solve(&p).unwrap();
        assert_eq!(sol.coeffs, XSeries::one(N));
    }

    #[test]
    fn first_solution_kills_eq18() {
        let (ctx, a, b, c) = abc();
        let phi = two_phi_one(&a, &b, &c, N).unwrap();
        let cand = FrobeniusSolution { coeffs: phi, lambda_pow: QRat::one() };
        let rep = hypergeom_residual(&ctx, &cand, N).unwrap();
        assert!(rep.zero, "{:?}", rep.offending);
    }

    #[test]
    fn second_solution_kills_eq18() {
        // u2 = z^{1-c} 2phi1(qA/C, qB/C; q^2/C; q, z), q^lambda = q/C
        let (ctx, a, b, c) = abc();
        let q = QRat::q();
        let phi = two_phi_one(
            &(&(&q * &a) / &c),
            &(&(&q * &b) / &c),
            &(&(&q * &q) / &c),
            N,
        )
        .unwrap();
        let cand = FrobeniusSolution { coeffs: phi, lambda_pow: &q / &c };
        let rep = hypergeom_residual(&ctx, &cand, N).unwrap();
        assert!(rep.zero, "{:?}", rep.offending);
    }

    #[test]
    fn non_solution_has_residual() {
        let (ctx, ..) = abc();
        let mut s = XSeries::one(N);
        s.set(1, QRat::one());
        let cand = FrobeniusSolution { coeffs: s, lambda_pow: QRat::one() };
        let rep = hypergeom_residual(&ctx, &cand, N).unwrap();
        assert!(!rep.zero);
    }

    #[test]
    fn uniqueness_perturbation_breaks_residual() {
        // perturbing c_k breaks the residual at order k (k <= 4)
        let (ctx, a, b, c) = abc();
        let phi = two_phi_one(&a, &b, &c, N).unwrap();
        for k in 1..=4 {
            let mut bad = phi.clone();
            bad.set(k, &bad.coeff(k) + &QRat::one());
            let cand = FrobeniusSolution { coeffs: bad, lambda_pow: QRat::one() };
            let rep = hypergeom_residual(&ctx, &cand, N).unwrap();
            assert!(!rep.zero, "k={}", k);
            // lowest offending degree is exactly k-1 in the shifted grid
            assert!(rep.offending[0].starts_with(&format!("deg {}", k - 1)));
        }
    }

    #[test]
    fn resonant_exponent_detected() {
        // lambda = 1 on the hypergeometric problem is resonant at k = 0
        let (ctx, ..) = abc();
        let p = hypergeom_problem(&ctx, QRat::q(), N).unwrap();
        assert!(matches!(
            frobenius_solve(&p),
            Err(QSpecialError::ResonantExponent(_))
        ));
    }
}
