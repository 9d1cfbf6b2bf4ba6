//! Zero-curvature derivations: `dA + A^2 = 0` expanded over a preset,
//! coefficientwise on the 2-form basis, with classical limits and the
//! qKP decoupling.

use crate::expr::{apply_word, Decor, NcAtom, NcExpr, NcKey};
use crate::preset::{CalculusPreset, OpKind};
use crate::NcError;
use qcore::QRat;

/// The curvature equations of a connection one-form: one 0-form
/// expression per declared basis 2-form, each set to zero.
#[derive(Clone, Debug)]
pub struct ZeroCurvature {
    pub basis: Vec<(u8, u8)>,
    pub equations: Vec<NcExpr>,
}

/// `A = sum_i sym_i d(xi_i)`.
pub fn zero_curvature(
    p: &CalculusPreset,
    a: &[(u8, u8)], // (symbol, differential)
) -> Result<ZeroCurvature, NcError> {
    let mut aform = NcExpr::zero();
    for &(sym, d) in a {
        let mut key = NcKey {
            mono: vec![0; p.ncoords()],
            atoms: vec![NcAtom { sym, decor: Decor::identity(p.ncoords()) }],
            diffs: vec![d],
        };
        key.atoms.sort();
        aform.insert(key, QRat::one());
    }
    let da = p.d(&aform)?;
    let asq = p.mul(&aform, &aform)?;
    let total = da.add(&asq);
    // collect coefficients per basis 2-form
    let mut equations = vec![NcExpr::zero(); p.basis2.len()];
    for (key, c) in &total.terms {
        if key.diffs.len() != 2 {
            return Err(NcError::Unsupported(
                "curvature produced a non-2-form term".into(),
            ));
        }
        let pair = (key.diffs[0], key.diffs[1]);
        let idx = p
            .basis2
            .iter()
            .position(|&b| b == pair)
            .ok_or_else(|| NcError::Unsupported("unnormalized 2-form".into()))?;
        equations[idx].insert(
            NcKey { mono: key.mono.clone(), atoms: key.atoms.clone(), diffs: vec![] },
            c.clone(),
        );
    }
    Ok(ZeroCurvature { basis: p.basis2.clone(), equations })
}

/// q -> 1 specialization: coefficients take their limit (after optional
/// parameter substitutions), multiplicative shifts become the identity,
/// Jackson counts merge into classical ones, and additive shifts drop
/// when their parameter was substituted to zero.
pub fn classical_limit_nc(
    p: &CalculusPreset,
    e: &NcExpr,
    param_subs: &[(&str, QRat)],
) -> Result<NcExpr, NcError> {
    let mut out = NcExpr::zero();
    for (key, c) in &e.terms {
        let mut coeff = c.clone();
        for (name, val) in param_subs {
            let var = p
                .ctx
                .names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| NcError::Unsupported(format!("unknown parameter {}", name)))?
                + 1;
            coeff = coeff.substitute_var(var, val)?;
        }
        coeff = coeff.limit_q1()?;
        if coeff.is_zero() {
            continue;
        }
        let mut atoms = Vec::with_capacity(key.atoms.len());
        for a in &key.atoms {
            let mut d = Decor::identity(p.ncoords());
            for i in 0..p.ncoords() {
                d.classical[i] = a.decor.classical[i] + a.decor.jackson[i];
                if a.decor.addshift[i] > 0 {
                    // legal only when the shift parameter was killed
                    let param = p.addshift_param(i)?;
                    let mut killed = param;
                    for (name, val) in param_subs {
                        let var = p.ctx.names().iter().position(|n| n == name).unwrap() + 1;
                        killed = killed.substitute_var(var, val)?;
                    }
                    if !killed.is_zero() {
                        return Err(NcError::Unsupported(
                            "additive shift survives the classical limit".into(),
                        ));
                    }
                }
            }
            atoms.push(NcAtom { sym: a.sym, decor: d });
        }
        out.insert(
            NcKey { mono: key.mono.clone(), atoms, diffs: key.diffs.clone() },
            coeff,
        );
    }
    Ok(out)
}

/// Decor as an operator word (outermost first).
pub fn decor_word(p: &CalculusPreset, d: &Decor) -> Vec<OpKind> {
    let mut w = Vec::new();
    for i in 0..p.ncoords() {
        if d.shift[i] != 0 {
            w.push(OpKind::Shift(i, d.shift[i]));
        }
        for _ in 0..d.addshift[i] {
            w.push(OpKind::AddShift(i));
        }
    }
    for i in 0..p.ncoords() {
        let j = d.jackson[i];
        if j > 0 {
            for _ in 0..j {
                w.push(OpKind::Jackson(i));
            }
        } else {
            for _ in 0..(-j) {
                w.push(OpKind::JacksonInv(i));
            }
        }
    }
    for i in 0..p.ncoords() {
        let cdeg = d.classical[i];
        if cdeg > 0 {
            for _ in 0..cdeg {
                w.push(OpKind::Classical(i));
            }
        } else {
            for _ in 0..(-cdeg) {
                w.push(OpKind::ClassicalInv(i));
            }
        }
    }
    w
}

/// Replace every decorated occurrence of `sym` by the decorated image of
/// `replacement` (a 0-form).
pub fn subst_symbol(
    p: &CalculusPreset,
    e: &NcExpr,
    sym: u8,
    replacement: &NcExpr,
) -> Result<NcExpr, NcError> {
    let mut out = NcExpr::zero();
    for (key, c) in &e.terms {
        let mut acc = NcExpr::zero();
        acc.insert(
            NcKey { mono: key.mono.clone(), atoms: vec![], diffs: key.diffs.clone() },
            c.clone(),
        );
        for a in &key.atoms {
            let factor = if a.sym == sym {
                apply_word(p, &decor_word(p, &a.decor), replacement)?
            } else {
                let mut f = NcExpr::zero();
                f.insert(
                    NcKey {
                        mono: vec![0; p.ncoords()],
                        atoms: vec![a.clone()],
                        diffs: vec![],
                    },
                    QRat::one(),
                );
                f
            };
            // functions-left products of 0-forms never touch the diff word
            let mut next = NcExpr::zero();
            for (k1, c1) in &acc.terms {
                for (k2, c2) in &factor.terms {
                    let (s, mono) = p.mono_mul(&k1.mono, &k2.mono)?;
                    let mut atoms = k1.atoms.clone();
                    atoms.extend_from_slice(&k2.atoms);
                    next.insert(
                        NcKey { mono, atoms, diffs: k1.diffs.clone() },
                        &(c1 * c2) * &s,
                    );
                }
            }
            acc = next;
        }
        out = out.add(&acc);
    }
    Ok(out)
}

/// The qKP decoupling: from the `dt dy` curvature equation of the
/// three-symbol connection, choose `w` to cancel every `v`-bearing term,
/// substitute it, and split the result into the linear core, the
/// `A(u, w)` product block and the `B(u)` cross-derivative block.
pub struct QkpTheorem {
    pub full: NcExpr,
    pub a_block: NcExpr,
    pub b_block: NcExpr,
    pub core: NcExpr,
    pub w_expr: NcExpr,
}

pub fn qkp_theorem71(p: &CalculusPreset) -> Result<QkpTheorem, NcError> {
    // A = v dx + w dt + u dy with the preset's symbol table [u, v, w]
    let (u, v, w) = (p.sym("u"), p.sym("v"), p.sym("w"));
    let zc = zero_curvature(p, &[(v, 0), (w, 2), (u, 1)])?;
    // the dt dy equation
    let idx = p
        .basis2
        .iter()
        .position(|&b| b == (2, 1))
        .ok_or_else(|| NcError::Unsupported("no dt dy basis element".into()))?;
    let eq = zc.equations[idx].clone();

    // w choice: b [2]_q Dx jx w = 3 a Dx py u + a b [3]_q Dx jx jx u, so
    // w = 3a/(b [2]_q) (ijx py u) + a [3]_q/[2]_q (jx u)
    let a_p = p.ctx.param("a")?;
    let b_p = p.ctx.param("b")?;
    let two = qcore::q_int(2);
    let three = qcore::q_int(3);
    let uex = NcExpr::atom(p, u);
    let c1 = &(&QRat::from_int(3) * &a_p) / &(&b_p * &two);
    let c2 = &(&a_p * &three) / &two;
    let w_expr = apply_word(p, &[OpKind::JacksonInv(0), OpKind::Classical(1)], &uex)?
        .scale(&c1)
        .add(&apply_word(p, &[OpKind::Jackson(0)], &uex)?.scale(&c2));

    let full = subst_symbol(p, &eq, w, &w_expr)?;
    // every v must be gone
    for key in full.terms.keys() {
        if key.atoms.iter().any(|at| at.sym == v) {
            return Err(NcError::EliminationFailed(format!(
                "v-bearing term survives: {}",
                full.render(p)
            )));
        }
    }

    // A(u, w) = w Dx^3 u - u Dx^2 w, substituted
    let d3u = apply_word(p, &[OpKind::Shift(0, 3)], &uex)?;
    let d2w = apply_word(p, &[OpKind::Shift(0, 2)], &w_expr)?;
    let a_block = p.mul(&w_expr, &d3u)?.sub(&p.mul(&uex, &d2w)?);

    // core: the atoms of Eq. 48c's left side, selected by pattern
    let mut core = NcExpr::zero();
    let mut b_block = NcExpr::zero();
    let rest = full.sub(&a_block);
    for (key, c) in &rest.terms {
        let is_core = match key.atoms.len() {
            1 => {
                let at = &key.atoms[0];
                let d = &at.decor;
                let pure_t = d.classical[2] == 1
                    && d.classical[1] == 0
                    && d.jackson[0] == 0;
                let pure_q3 = d.jackson[0] == 3 && d.classical[1] == 0 && d.classical[2] == 0;
                let inv_yy =
                    d.jackson[0] == -1 && d.classical[1] == 2 && d.classical[2] == 0;
                pure_t || pure_q3 || inv_yy
            }
            2 => true, // u (Dx^2 jx u) nonlinearity
            _ => false,
        };
        if is_core {
            core.insert(key.clone(), c.clone());
        } else {
            b_block.insert(key.clone(), c.clone());
        }
    }
    Ok(QkpTheorem { full, a_block, b_block, core, w_expr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn atom_with(p: &CalculusPreset, sym: &str, f: impl FnOnce(&mut Decor)) -> NcExpr {
        let mut d = Decor::identity(p.ncoords());
        f(&mut d);
        let mut e = NcExpr::zero();
        e.insert(
            NcKey {
                mono: vec![0; p.ncoords()],
                atoms: vec![NcAtom { sym: p.sym(sym), decor: d }],
                diffs: vec![],
            },
            QRat::one(),
        );
        e
    }

    #[test]
    fn builtins_parse_and_validate() {
        for name in crate::BUILTIN_NAMES {
            let p = builtin(name).unwrap_or_else(|e| panic!("{}: {}", name, e));
            p.validate(4).unwrap_or_else(|e| panic!("{}: {}", name, e));
        }
    }

    #[test]
    fn malformed_line_is_positioned_error() {
        let src = "PRESET bad\nCOORD x\nREL dx * -> x\n";
        match crate::preset_parse(src) {
            Err(NcError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn gamma_plus_squares_vanish() {
        let p = builtin("gamma_plus").unwrap();
        for d in 0..p.ncoords() as u8 {
            let dx = NcExpr::differential(&p, d);
            let sq = p.mul(&dx, &dx).unwrap();
            assert!(sq.is_zero());
        }
    }

    #[test]
    fn qkp74_pass_examples() {
        // dt x -> q^3 x dt and dx y^m -> y^m dx + 3 a m y^{m-1} dt
        let p = builtin("qkp74").unwrap();
        let dt = NcExpr::differential(&p, 2);
        let x = NcExpr::coordinate(&p, 0, 1);
        let prod = p.mul(&dt, &x).unwrap();
        let expect = p
            .mul(&x, &NcExpr::differential(&p, 2))
            .unwrap()
            .scale(&QRat::q_pow(3));
        assert_eq!(prod, expect);

        let dx = NcExpr::differential(&p, 0);
        for m in 1..=3i64 {
            let ym = NcExpr::coordinate(&p, 1, m);
            let lhs = p.mul(&dx, &ym).unwrap();
            let a = p.ctx.param("a").unwrap();
            let mut expect = p.mul(&ym, &NcExpr::differential(&p, 0)).unwrap();
            let ym1 = NcExpr::coordinate(&p, 1, m - 1);
            expect = expect.add(
                &p.mul(&ym1, &NcExpr::differential(&p, 2))
                    .unwrap()
                    .scale(&(&(&QRat::from_int(3 * m) * &a))),
            );
            assert_eq!(lhs, expect, "m={}", m);
        }
    }

    #[test]
    fn qline_dl_past_x() {
        let p = builtin("qline").unwrap();
        let dl = NcExpr::differential(&p, 1);
        let x = NcExpr::coordinate(&p, 0, 1);
        let prod = p.mul(&dl, &x).unwrap();
        let expect = p
            .mul(&x, &NcExpr::differential(&p, 1))
            .unwrap()
            .scale(&QRat::q_pow(-1));
        assert_eq!(prod, expect);
    }

    #[test]
    fn qkp74_zero_curvature_dxdy_is_eq22c() {
        let p = builtin("qkp74").unwrap();
        let (u, v, w) = (p.sym("u"), p.sym("v"), p.sym("w"));
        let zc = zero_curvature(&p, &[(v, 0), (w, 2), (u, 1)]).unwrap();
        let idx = p.basis2.iter().position(|&b| b == (0, 1)).unwrap();
        let eq = &zc.equations[idx];

        // v Dx u - u Dx^2 v - b [2]_q v Dx jx v - py v - b jx jx v + jx u
        let b_p = p.ctx.param("b").unwrap();
        let two = qcore::q_int(2);
        let dxu = atom_with(&p, "u", |d| d.shift[0] = 1);
        let vplain = atom_with(&p, "v", |_| {});
        let uplain = atom_with(&p, "u", |_| {});
        let d2v = atom_with(&p, "v", |d| d.shift[0] = 2);
        let dxjxv = atom_with(&p, "v", |d| {
            d.shift[0] = 1;
            d.jackson[0] = 1;
        });
        let pyv = atom_with(&p, "v", |d| d.classical[1] = 1);
        let jx2v = atom_with(&p, "v", |d| d.jackson[0] = 2);
        let jxu = atom_with(&p, "u", |d| d.jackson[0] = 1);

        let mut expect = p.mul(&vplain, &dxu).unwrap();
        expect = expect.sub(&p.mul(&uplain, &d2v).unwrap());
        expect = expect.sub(&p.mul(&vplain, &dxjxv).unwrap().scale(&(&b_p * &two)));
        expect = expect.sub(&pyv);
        expect = expect.sub(&jx2v.scale(&b_p));
        expect = expect.add(&jxu);
        assert!(
            eq.eq_up_to_sign(&expect),
            "got {}\nexpected {}",
            eq.render(&p),
            expect.render(&p)
        );
    }

    #[test]
    fn qkp74_limit_is_classical_system() {
        // at q = 1 the three equations reduce to the classical KP system
        let p = builtin("qkp74").unwrap();
        let (u, v, w) = (p.sym("u"), p.sym("v"), p.sym("w"));
        let zc = zero_curvature(&p, &[(v, 0), (w, 2), (u, 1)]).unwrap();
        // dx dy equation at q=1: u_x = v_y + b v_xx + 2b v v_x (up to sign)
        let idx = p.basis2.iter().position(|&b| b == (0, 1)).unwrap();
        let lim = classical_limit_nc(&p, &zc.equations[idx], &[]).unwrap();
        let b_p = p.ctx.param("b").unwrap();
        let ux = atom_with(&p, "u", |d| d.classical[0] = 1);
        let vy = atom_with(&p, "v", |d| d.classical[1] = 1);
        let vxx = atom_with(&p, "v", |d| d.classical[0] = 2);
        let vplain = atom_with(&p, "v", |_| {});
        let vx = atom_with(&p, "v", |d| d.classical[0] = 1);
        let mut expect = ux.sub(&vy).sub(&vxx.scale(&b_p));
        expect = expect.sub(
            &p.mul(&vplain, &vx)
                .unwrap()
                .scale(&(&QRat::from_int(2) * &b_p)),
        );
        assert!(
            lim.eq_up_to_sign(&expect),
            "got {}\nexpected {}",
            lim.render(&p),
            expect.render(&p)
        );
    }

    #[test]
    fn theorem71_blocks_vanish_classically() {
        let p = builtin("qkp74").unwrap();
        let th = qkp_theorem71(&p).unwrap();
        let a_lim = classical_limit_nc(&p, &th.a_block, &[]).unwrap();
        assert!(a_lim.is_zero(), "A block: {}", a_lim.render(&p));
        let b_lim = classical_limit_nc(&p, &th.b_block, &[]).unwrap();
        assert!(b_lim.is_zero(), "B block: {}", b_lim.render(&p));

        // the full equation tends to the KP form
        // u_t - (ab/2) u_xxx - (3a/2b) ipx u_yy + 3a u u_x
        let lim = classical_limit_nc(&p, &th.full, &[]).unwrap();
        let a_p = p.ctx.param("a").unwrap();
        let b_p = p.ctx.param("b").unwrap();
        let ut = atom_with(&p, "u", |d| d.classical[2] = 1);
        let uxxx = atom_with(&p, "u", |d| d.classical[0] = 3);
        let inv_uyy = atom_with(&p, "u", |d| {
            d.classical[0] = -1;
            d.classical[1] = 2;
        });
        let uplain = atom_with(&p, "u", |_| {});
        let ux = atom_with(&p, "u", |d| d.classical[0] = 1);
        let mut expect = ut;
        expect = expect.sub(&uxxx.scale(&(&(&a_p * &b_p) / &QRat::from_int(2))));
        expect = expect.sub(&inv_uyy.scale(
            &(&(&QRat::from_int(3) * &a_p) / &(&QRat::from_int(2) * &b_p)),
        ));
        expect = expect.add(
            &p.mul(&uplain, &ux)
                .unwrap()
                .scale(&(&QRat::from_int(3) * &a_p)),
        );
        assert!(
            lim.eq_up_to_sign(&expect),
            "got {}\nexpected {}",
            lim.render(&p),
            expect.render(&p)
        );
    }

    #[test]
    fn dmh_presets_give_burgers_and_kp() {
        // dmh_burgers: u_t - w_x + (eta/2) u_xx + eta u u_x (w_x := 0 case)
        let p = builtin("dmh_burgers").unwrap();
        let (u, w) = (p.sym("u"), p.sym("w"));
        let zc = zero_curvature(&p, &[(w, 1), (u, 0)]).unwrap();
        let eq = &zc.equations[0];
        let eta = p.ctx.param("eta").unwrap();
        let ut = atom_with(&p, "u", |d| d.classical[1] = 1);
        let wx = atom_with(&p, "w", |d| d.classical[0] = 1);
        let uxx = atom_with(&p, "u", |d| d.classical[0] = 2);
        let uplain = atom_with(&p, "u", |_| {});
        let ux = atom_with(&p, "u", |d| d.classical[0] = 1);
        let mut expect = ut.sub(&wx);
        expect = expect.add(&uxx.scale(&(&eta / &QRat::from_int(2))));
        expect = expect.add(&p.mul(&uplain, &ux).unwrap().scale(&eta));
        assert!(
            eq.eq_up_to_sign(&expect),
            "got {}\nexpected {}",
            eq.render(&p),
            expect.render(&p)
        );
    }
}
