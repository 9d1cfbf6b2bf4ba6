//! The Lenard recursion for KdV: `A_0 = 1`,
//! `D A_{j+1} = [D^3 + (1/3)(D u + u D)] A_j` with formal integration by
//! exact-derivative recognition in the differential polynomial ring.

use crate::coeff::{Atom, CoeffExpr, CoeffOps, ExprRing, TermKey};
use crate::QPsdoError;
use qcore::QRat;

fn classical_ring() -> ExprRing {
    ExprRing::new(QRat::one(), vec!["u"])
}

/// `[D^3 + (1/3)(D u + u D)] a` where `D = d/dx`:
/// `a''' + (1/3)(u' a + 2 u a')`.
pub fn lenard_operator(ring: &ExprRing, a: &CoeffExpr) -> CoeffExpr {
    let u = CoeffExpr::atom(0);
    let du = ring.qderiv(&u);
    let da = ring.qderiv(a);
    let third = QRat::from_ratio(1, 3);
    let mut out = ring.qderiv(&ring.qderiv(&da));
    out = ring.add(&out, &ring.scale(&ring.mul(&du, a), &third));
    out = ring.add(
        &out,
        &ring.scale(&ring.mul(&u, &da), &(&third * &QRat::from_int(2))),
    );
    out
}

/// All differential monomials in `u` of scaling weight `w` (`u` weighs 2,
/// each derivative 1), as candidate terms of an antiderivative.
fn weight_monomials(w: i64) -> Vec<TermKey> {
    fn rec(w: i64, min_part: i64, parts: &mut Vec<u32>, out: &mut Vec<TermKey>) {
        if w == 0 {
            let atoms: Vec<Atom> = parts
                .iter()
                .map(|&s| Atom { sym: 0, r: 0, s })
                .collect();
            let mut sorted = atoms.clone();
            sorted.sort();
            out.push(TermKey { xpow: 0, atoms: sorted });
            return;
        }
        let mut p = min_part;
        while p <= w {
            // part p corresponds to the atom with s = p - 2
            parts.push((p - 2) as u32);
            rec(w - p, p, parts, out);
            parts.pop();
            p += 1;
        }
    }
    let mut out = Vec::new();
    let mut parts = Vec::new();
    rec(w, 2, &mut parts, &mut out);
    out
}

/// Solve `D candidate = rhs` by linear algebra over the weight-graded
/// monomial basis; `NotExactDerivative` if no antiderivative exists.
pub fn integrate_exact(ring: &ExprRing, rhs: &CoeffExpr, weight: i64) -> Result<CoeffExpr, QPsdoError> {
    if rhs.is_zero() {
        return Ok(CoeffExpr::zero());
    }
    let basis = weight_monomials(weight);
    // derivative images of the basis
    let images: Vec<CoeffExpr> = basis
        .iter()
        .map(|k| {
            let mut e = CoeffExpr::zero();
            e.insert(k.clone(), QRat::one());
            ring.qderiv(&e)
        })
        .collect();
    // collect all monomials appearing anywhere
    let mut rows: Vec<TermKey> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for e in images.iter().chain(std::iter::once(rhs)) {
        for k in e.terms.keys() {
            if seen.insert(k.clone()) {
                rows.push(k.clone());
            }
        }
    }
    // dense linear system rows x cols
    let ncols = basis.len();
    let mut mat: Vec<Vec<QRat>> = Vec::with_capacity(rows.len());
    let mut vec_rhs: Vec<QRat> = Vec::with_capacity(rows.len());
    for rk in &rows {
        let mut row = Vec::with_capacity(ncols);
        for img in &images {
            row.push(img.terms.get(rk).cloned().unwrap_or_else(QRat::zero));
        }
        mat.push(row);
        vec_rhs.push(rhs.terms.get(rk).cloned().unwrap_or_else(QRat::zero));
    }
    // gaussian elimination
    let nrows = mat.len();
    let mut solution = vec![QRat::zero(); ncols];
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let mut piv = None;
        for i in r..nrows {
            if !mat[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        mat.swap(r, p);
        vec_rhs.swap(r, p);
        let inv = mat[r][c].inv();
        for j in c..ncols {
            mat[r][j] = &mat[r][j] * &inv;
        }
        vec_rhs[r] = &vec_rhs[r] * &inv;
        for i in 0..nrows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in c..ncols {
                    let t = &mat[r][j] * &f;
                    mat[i][j] = &mat[i][j] - &t;
                }
                let t = &vec_rhs[r] * &f;
                vec_rhs[i] = &vec_rhs[i] - &t;
            }
        }
        pivot_rows.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    // back-substitute (matrix is in reduced echelon form already)
    for (row_i, &col) in pivot_rows.iter().enumerate() {
        solution[col] = vec_rhs[row_i].clone();
    }
    // consistency: rows beyond rank must have zero rhs
    for i in r..nrows {
        if !vec_rhs[i].is_zero() {
            return Err(QPsdoError::NotExactDerivative(format!(
                "no antiderivative: residual monomial row {:?}",
                rows[i]
            )));
        }
    }
    // certify by substitution
    let mut cand = CoeffExpr::zero();
    for (k, &ref coef) in basis.iter().zip(solution.iter()) {
        cand.insert(k.clone(), coef.clone());
    }
    let check = ring.sub(&ring.qderiv(&cand), rhs);
    if !check.is_zero() {
        return Err(QPsdoError::NotExactDerivative(format!(
            "certification failed with residual {}",
            ring.render(&check)
        )));
    }
    Ok(cand)
}

/// `A_0..A_n` with an exact-derivative certificate at each step.
pub fn lenard_recursion(n: u32) -> Result<Vec<CoeffExpr>, QPsdoError> {
    let ring = classical_ring();
    let mut out = vec![CoeffExpr::constant(QRat::one())];
    for j in 0..n {
        let rhs = lenard_operator(&ring, &out[j as usize]);
        let a_next = integrate_exact(&ring, &rhs, 2 * (j as i64 + 1))?;
        out.push(a_next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_steps() {
        let ring = classical_ring();
        let a = lenard_recursion(3).unwrap();
        // A_0 = 1
        assert_eq!(a[0], CoeffExpr::constant(QRat::one()));
        // A_1 = u/3
        let u3 = ring.scale(&CoeffExpr::atom(0), &QRat::from_ratio(1, 3));
        assert_eq!(a[1], u3);
        // A_2 = u''/3 + u^2/6 (derived by integrating u'''/3 + u u'/3)
        let u = CoeffExpr::atom(0);
        let ddu = ring.qderiv(&ring.qderiv(&u));
        let mut expect = ring.scale(&ddu, &QRat::from_ratio(1, 3));
        expect = ring.add(
            &expect,
            &ring.scale(&ring.mul(&u, &u), &QRat::from_ratio(1, 6)),
        );
        assert_eq!(a[2], expect);
    }

    #[test]
    fn flow_at_n1_is_the_kdv_shape() {
        // u_t = [D^3 + (1/3)(Du+uD)] A_1 = u'''/3 + u u'/3
        let ring = classical_ring();
        let a = lenard_recursion(1).unwrap();
        let flow = lenard_operator(&ring, &a[1]);
        let u = CoeffExpr::atom(0);
        let du = ring.qderiv(&u);
        let dddu = ring.qderiv(&ring.qderiv(&du));
        let mut expect = ring.scale(&dddu, &QRat::from_ratio(1, 3));
        expect = ring.add(
            &expect,
            &ring.scale(&ring.mul(&u, &du), &QRat::from_ratio(1, 3)),
        );
        assert_eq!(flow, expect);
    }

    #[test]
    fn non_integrable_input_rejected() {
        // u'^2 has weight 6 but is not an exact derivative
        let ring = classical_ring();
        let du = ring.qderiv(&CoeffExpr::atom(0));
        let bad = ring.mul(&du, &du);
        assert!(matches!(
            integrate_exact(&ring, &bad, 5),
            Err(QPsdoError::NotExactDerivative(_))
        ));
    }
}
