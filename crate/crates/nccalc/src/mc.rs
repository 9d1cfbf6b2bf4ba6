//! Maurer-Cartan derivations: the structure equations
//! `dw0 = Q w0^w1`, `dw1 = -w0^w2`, `dw2 = Q w1^w2` with `Q = q^2 + q^4`,
//! pulled back to coefficient functions of (x, t) (or (x, Lambda, t) on
//! the quantum line), eliminated down to a single evolution equation.

use crate::expr::{apply_word, Decor, NcAtom, NcExpr, NcKey};
use crate::preset::{CalculusPreset, OpKind, PassTerm, RuleTerm};
use crate::zerocurv::classical_limit_nc;
use crate::NcError;
use qcore::{ParamContext, QRat};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McSetting {
    /// q = 1, ordinary derivative: the classical derivation.
    ClassicalSl2,
    /// generic q, ordinary derivative in x.
    QThreeD,
    /// generic q, Jackson derivative in x with the twisted product rule.
    QThreeDJackson,
}

/// The derived scalar system and the eliminated evolution equation.
pub struct McReport {
    pub preset: CalculusPreset,
    pub system: Vec<NcExpr>,
    pub evolution: NcExpr,
}

/// Minimal two-coordinate carrier for the plane settings: commuting
/// coordinates and differentials (the ansatz treats coefficients as
/// freely movable), with the x-derivative kind per setting.
fn plane_preset(jackson: bool, q1: bool) -> CalculusPreset {
    let ctx = ParamContext::new(vec!["eta"]);
    let coords = vec!["x".to_string(), "t".to_string()];
    let mut rules = BTreeMap::new();
    for d in 0..2u8 {
        for c in 0..2usize {
            let mut mono = vec![0i64; 2];
            mono[c] = 1;
            rules.insert((d, c), vec![RuleTerm { coeff: QRat::one(), mono, diff: d }]);
        }
    }
    let mut wedge = BTreeMap::new();
    wedge.insert((1u8, 0u8), vec![(-&QRat::one(), (0u8, 1u8))]);
    wedge.insert((0u8, 0u8), vec![]);
    wedge.insert((1u8, 1u8), vec![]);
    let mut pass = BTreeMap::new();
    for d in 0..2u8 {
        pass.insert(
            d,
            vec![PassTerm { coeff: QRat::one(), mono: vec![0; 2], word: vec![], diff: d }],
        );
    }
    let mut df = BTreeMap::new();
    let x_word = if jackson {
        vec![OpKind::Jackson(0)]
    } else {
        vec![OpKind::Classical(0)]
    };
    df.insert(
        0u8,
        vec![PassTerm { coeff: QRat::one(), mono: vec![0; 2], word: x_word, diff: 0 }],
    );
    df.insert(
        1u8,
        vec![PassTerm {
            coeff: QRat::one(),
            mono: vec![0; 2],
            word: vec![OpKind::Classical(1)],
            diff: 1,
        }],
    );
    CalculusPreset {
        name: "mc_plane".into(),
        ctx,
        coords,
        shift_scale: vec![if q1 { QRat::one() } else { QRat::q() }, QRat::one()],
        jackson_base: vec![if q1 { QRat::one() } else { QRat::q() }, QRat::one()],
        jackson_shift_pow: vec![1, 0],
        addshift_param: vec![None, None],
        coord_swap: vec![vec![Some(QRat::one()); 2]; 2],
        rules,
        wedge,
        basis2: vec![(0, 1)],
        pass,
        df,
        d2_exception: true,
        sym_names: vec!["u".into(), "mu".into(), "nu".into(), "beta".into()],
    }
}

fn atom(p: &CalculusPreset, sym: u8) -> NcExpr {
    NcExpr::atom(p, sym)
}

/// One-form with scalar or atom coefficients on the (dx, dt) basis.
fn one_form(p: &CalculusPreset, dx_part: &NcExpr, dt_part: &NcExpr) -> Result<NcExpr, NcError> {
    let dx = NcExpr::differential(p, 0);
    let dt = NcExpr::differential(p, 1);
    Ok(p.mul(dx_part, &dx)?.add(&p.mul(dt_part, &dt)?))
}

fn two_form_coeff(p: &CalculusPreset, e: &NcExpr, basis: (u8, u8)) -> NcExpr {
    let mut out = NcExpr::zero();
    for (k, c) in &e.terms {
        if k.diffs.len() == 2 && (k.diffs[0], k.diffs[1]) == basis {
            out.insert(
                NcKey { mono: k.mono.clone(), atoms: k.atoms.clone(), diffs: vec![] },
                c.clone(),
            );
        }
    }
    out
}

/// The structure-equation system for the plane ansatz
/// `w1 = eta dx + mu dt`, `w0 = dx + nu dt`, `w2 = u dx + beta dt`,
/// as three scalar equations (each = 0).
pub fn mc_plane_system(p: &CalculusPreset) -> Result<Vec<NcExpr>, NcError> {
    let eta = p.ctx.param("eta")?;
    let qq = mystic_q(p);
    let u = atom(p, 0);
    let mu = atom(p, 1);
    let nu = atom(p, 2);
    let beta = atom(p, 3);
    let one = NcExpr::constant(p, QRat::one());
    let eta_e = NcExpr::constant(p, eta);

    let w1 = one_form(p, &eta_e, &mu)?;
    let w0 = one_form(p, &one, &nu)?;
    let w2 = one_form(p, &u, &beta)?;

    let eqs = vec![
        // dw1 + w0 ^ w2 = 0
        p.d(&w1)?.add(&p.mul(&w0, &w2)?),
        // dw2 - Q w1 ^ w2 = 0
        p.d(&w2)?.sub(&p.mul(&w1, &w2)?.scale(&qq)),
        // dw0 - Q w0 ^ w1 = 0
        p.d(&w0)?.sub(&p.mul(&w0, &w1)?.scale(&qq)),
    ];
    Ok(eqs
        .into_iter()
        .map(|e| two_form_coeff(p, &e, (0, 1)))
        .collect())
}

fn mystic_q(p: &CalculusPreset) -> QRat {
    // the structure constant q^2 + q^4 (2 at the classical point)
    let q = if p.jackson_base[0].is_one() && p.shift_scale[0].is_one() {
        QRat::one()
    } else {
        QRat::q()
    };
    &q.pow(2) + &q.pow(4)
}

/// Eliminate down to `u_t = ...` with `nu = eta^2 - u/Q`.
pub fn mc_derive(setting: McSetting) -> Result<McReport, NcError> {
    let (jackson, q1) = match setting {
        McSetting::ClassicalSl2 => (false, true),
        McSetting::QThreeD => (false, false),
        McSetting::QThreeDJackson => (true, false),
    };
    let p = plane_preset(jackson, q1);
    let system = mc_plane_system(&p)?;

    let eta = p.ctx.param("eta")?;
    let qq = mystic_q(&p);
    let u = atom(&p, 0);
    let dx_op: &[OpKind] = if jackson {
        &[OpKind::Jackson(0)]
    } else {
        &[OpKind::Classical(0)]
    };

    // nu = eta^2 - (1/Q) u
    let nu = NcExpr::constant(&p, eta.pow(2)).sub(&u.scale(&qq.inv()));
    // mu = eta nu + (1/Q) dx nu
    let mu = nu
        .scale(&eta)
        .add(&apply_word(&p, dx_op, &nu)?.scale(&qq.inv()));
    // beta = nu u - dx mu
    let beta = p.mul(&nu, &u)?.sub(&apply_word(&p, dx_op, &mu)?);
    // consistency: system equations (1) and (3) vanish under these choices
    let check1 = apply_word(&p, dx_op, &mu)?
        .sub(&p.mul(&nu, &u)?)
        .add(&beta);
    if !check1.is_zero() {
        return Err(NcError::EliminationFailed(check1.render(&p)));
    }
    let check3 = apply_word(&p, dx_op, &nu)?
        .sub(&mu.sub(&nu.scale(&eta)).scale(&qq));
    if !check3.is_zero() {
        return Err(NcError::EliminationFailed(check3.render(&p)));
    }
    // u_t = dx beta - Q(eta beta - mu u)
    let evolution = apply_word(&p, dx_op, &beta)?
        .sub(&beta.scale(&(&qq * &eta)))
        .add(&p.mul(&mu, &u)?.scale(&qq));
    Ok(McReport { preset: p, system, evolution })
}

// ---------------------------------------------------------------------
// the quantum-line version
// ---------------------------------------------------------------------

pub struct QlineReport {
    pub preset: CalculusPreset,
    /// the three dx dt structure equations (eta constant, alpha = 1)
    pub dxdt_system: Vec<NcExpr>,
    /// evolution with the Lambda-shifts kept
    pub evolution_full: NcExpr,
    /// evolution restricted to Lambda-independent u
    pub evolution: NcExpr,
}

/// Set every Lambda-shift decoration on `u`-atoms to zero (u independent
/// of Lambda).
fn drop_lambda_shifts(p: &CalculusPreset, e: &NcExpr, lambda: usize) -> NcExpr {
    let mut out = NcExpr::zero();
    for (k, c) in &e.terms {
        let mut atoms = Vec::with_capacity(k.atoms.len());
        for a in &k.atoms {
            let mut d = a.decor.clone();
            d.shift[lambda] = 0;
            atoms.push(NcAtom { sym: a.sym, decor: d });
        }
        out.insert(NcKey { mono: k.mono.clone(), atoms, diffs: k.diffs.clone() }, c.clone());
    }
    out
}

pub fn mc_qline() -> Result<QlineReport, NcError> {
    // coordinates x (0), L (1), t (2); eta enters as a declared parameter
    let src = crate::builtin_source("qline").unwrap();
    // extend the preset with the eta parameter by re-parsing with PARAM
    let src = src.replace("COORD x L t", "PARAM eta\nCOORD x L t");
    let p = crate::preset_parse(&src)?
        .with_symbols(&["u", "mu", "nu", "beta", "phi", "psi", "chi"]);

    let eta = p.ctx.param("eta")?;
    let qq = &QRat::q_pow(2) + &QRat::q_pow(4);
    let dx = NcExpr::differential(&p, 0);
    let dl = NcExpr::differential(&p, 1);
    let dt = NcExpr::differential(&p, 2);
    let u = atom(&p, 0);
    let mu = atom(&p, 1);
    let nu = atom(&p, 2);
    let beta = atom(&p, 3);
    let phi = atom(&p, 4);
    let psi = atom(&p, 5);
    let chi = atom(&p, 6);
    let one = NcExpr::constant(&p, QRat::one());

    let form = |cx: &NcExpr, ct: &NcExpr, cl: &NcExpr| -> Result<NcExpr, NcError> {
        Ok(p.mul(cx, &dx)?
            .add(&p.mul(ct, &dt)?)
            .add(&p.mul(cl, &dl)?))
    };
    let w1 = form(&NcExpr::constant(&p, eta.clone()), &mu, &phi)?;
    let w0 = form(&one, &nu, &psi)?;
    let w2 = form(&u, &beta, &chi)?;

    let e1 = p.d(&w1)?.add(&p.mul(&w0, &w2)?);
    let e2 = p.d(&w2)?.sub(&p.mul(&w1, &w2)?.scale(&qq));
    let e0 = p.d(&w0)?.sub(&p.mul(&w0, &w1)?.scale(&qq));

    let dxdt = (0u8, 2u8);
    let dxdt_system = vec![
        two_form_coeff(&p, &e1, dxdt),
        two_form_coeff(&p, &e2, dxdt),
        two_form_coeff(&p, &e0, dxdt),
    ];

    // elimination with nu = eta^2 - u/Q:
    //   mu = (1/Q) jx nu + eta Dx DL^{-1} nu
    //   beta = DL^{-1}(Dx(nu u)) - (1/Q) DL^{-1} DL jx jx nu - eta q Dx DL^{-1} jx nu
    //        = Dx DL^{-1}(nu u) - (1/Q) jx jx nu - eta q Dx DL^{-1} jx nu
    //   u_t = DL jhatx beta - Q eta Dx^{-1} DL beta + Q mu u
    let jx: &[OpKind] = &[OpKind::Jackson(0)];
    let nu_e = NcExpr::constant(&p, eta.pow(2)).sub(&u.scale(&qq.inv()));
    let mu_e = apply_word(&p, jx, &nu_e)?
        .scale(&qq.inv())
        .add(&apply_word(&p, &[OpKind::Shift(0, 1), OpKind::Shift(1, -1)], &nu_e)?.scale(&eta));
    let nu_u = p.mul(&nu_e, &u)?;
    let beta_e = apply_word(&p, &[OpKind::Shift(0, 1), OpKind::Shift(1, -1)], &nu_u)?
        .sub(&apply_word(&p, &[OpKind::Jackson(0), OpKind::Jackson(0)], &nu_e)?.scale(&qq.inv()))
        .sub(
            &apply_word(
                &p,
                &[OpKind::Shift(0, 1), OpKind::Shift(1, -1), OpKind::Jackson(0)],
                &nu_e,
            )?
            .scale(&(&eta * &QRat::q())),
        );

    // consistency of (1) and (3) in their dx dt form:
    //  (3): DL hat-dx nu - Q(Dx^{-1} DL mu - eta nu) = 0
    let hat = |e: &NcExpr| -> Result<NcExpr, NcError> {
        apply_word(&p, &[OpKind::Shift(0, -1), OpKind::Jackson(0)], e)
    };
    let dl_op = |e: &NcExpr, r: i64| -> Result<NcExpr, NcError> {
        apply_word(&p, &[OpKind::Shift(1, r)], e)
    };
    let dxs = |e: &NcExpr, r: i64| -> Result<NcExpr, NcError> {
        apply_word(&p, &[OpKind::Shift(0, r)], e)
    };
    let check3 = dl_op(&hat(&nu_e)?, 1)?.sub(
        &dxs(&dl_op(&mu_e, 1)?, -1)?
            .sub(&nu_e.scale(&eta))
            .scale(&qq),
    );
    if !check3.is_zero() {
        return Err(NcError::EliminationFailed(format!(
            "(3): {}",
            check3.render(&p)
        )));
    }
    //  (1): DL hat-dx mu - nu u + Dx^{-1} DL beta = 0
    let check1 = dl_op(&hat(&mu_e)?, 1)?
        .sub(&nu_u)
        .add(&dxs(&dl_op(&beta_e, 1)?, -1)?);
    if !check1.is_zero() {
        return Err(NcError::EliminationFailed(format!(
            "(1): {}",
            check1.render(&p)
        )));
    }
    //  (2): u_t = DL hat-dx beta - Q (eta Dx^{-1} DL beta - mu u)
    let evolution_full = dl_op(&hat(&beta_e)?, 1)?
        .sub(&dxs(&dl_op(&beta_e, 1)?, -1)?.scale(&(&qq * &eta)))
        .add(&p.mul(&mu_e, &u)?.scale(&qq));
    let evolution = drop_lambda_shifts(&p, &evolution_full, 1);

    Ok(QlineReport { preset: p, dxdt_system, evolution_full, evolution })
}

/// Classical limit of an evolution equation (q -> 1, shifts dropped).
pub fn mc_classical_limit(p: &CalculusPreset, e: &NcExpr) -> Result<NcExpr, NcError> {
    classical_limit_nc(p, e, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u_atom(p: &CalculusPreset, f: impl FnOnce(&mut Decor)) -> NcExpr {
        let mut d = Decor::identity(p.ncoords());
        f(&mut d);
        let mut e = NcExpr::zero();
        e.insert(
            NcKey {
                mono: vec![0; p.ncoords()],
                atoms: vec![NcAtom { sym: 0, decor: d }],
                diffs: vec![],
            },
            QRat::one(),
        );
        e
    }

    #[test]
    fn classical_sl2_gives_kdv() {
        let rep = mc_derive(McSetting::ClassicalSl2).unwrap();
        let p = &rep.preset;
        // u_t = 1/4 u_xxx - 3/2 u u_x
        let uxxx = u_atom(p, |d| d.classical[0] = 3);
        let uplain = u_atom(p, |_| {});
        let ux = u_atom(p, |d| d.classical[0] = 1);
        let expect = uxxx.scale(&QRat::from_ratio(1, 4)).sub(
            &p.mul(&uplain, &ux)
                .unwrap()
                .scale(&QRat::from_ratio(3, 2)),
        );
        assert_eq!(rep.evolution, expect, "got {}", rep.evolution.render(p));
    }

    #[test]
    fn classical_sl2_system_matches_enumeration() {
        // (1) mu_x - nu u + beta ; (2) -u_t + beta_x - Q(eta beta - mu u) ;
        // (3) nu_x - Q(mu - eta nu)   [each up to overall sign]
        let rep = mc_derive(McSetting::ClassicalSl2).unwrap();
        let p = &rep.preset;
        let eta = p.ctx.param("eta").unwrap();
        let qq = QRat::from_int(2);
        let sym = |s: u8, f: &dyn Fn(&mut Decor)| {
            let mut d = Decor::identity(p.ncoords());
            f(&mut d);
            let mut e = NcExpr::zero();
            e.insert(
                NcKey {
                    mono: vec![0; p.ncoords()],
                    atoms: vec![NcAtom { sym: s, decor: d }],
                    diffs: vec![],
                },
                QRat::one(),
            );
            e
        };
        let mu_x = sym(1, &|d| d.classical[0] = 1);
        let nu = sym(2, &|_| {});
        let beta = sym(3, &|_| {});
        let u = sym(0, &|_| {});
        let e1 = mu_x.sub(&p.mul(&nu, &u).unwrap()).add(&beta);
        assert!(rep.system[0].eq_up_to_sign(&e1), "{}", rep.system[0].render(p));

        let u_t = sym(0, &|d| d.classical[1] = 1);
        let beta_x = sym(3, &|d| d.classical[0] = 1);
        let mu = sym(1, &|_| {});
        let e2 = beta_x
            .sub(&u_t)
            .sub(&beta.scale(&(&qq * &eta)))
            .add(&p.mul(&mu, &u).unwrap().scale(&qq));
        assert!(rep.system[1].eq_up_to_sign(&e2), "{}", rep.system[1].render(p));

        let nu_x = sym(2, &|d| d.classical[0] = 1);
        let e3 = nu_x.sub(&mu.sub(&nu.scale(&eta)).scale(&qq));
        assert!(rep.system[2].eq_up_to_sign(&e3), "{}", rep.system[2].render(p));
    }

    #[test]
    fn q3d_gives_rescalable_kdv() {
        // u_t = (1/Q^2) u_xxx - (3/Q) u u_x; the printed display carries
        // the classical 3/2, which is its q = 1 value
        let rep = mc_derive(McSetting::QThreeD).unwrap();
        let p = &rep.preset;
        let qq = &QRat::q_pow(2) + &QRat::q_pow(4);
        let uxxx = u_atom(p, |d| d.classical[0] = 3);
        let uplain = u_atom(p, |_| {});
        let ux = u_atom(p, |d| d.classical[0] = 1);
        let expect = uxxx.scale(&qq.pow(2).inv()).sub(
            &p.mul(&uplain, &ux)
                .unwrap()
                .scale(&(&QRat::from_int(3) / &qq)),
        );
        assert_eq!(rep.evolution, expect, "got {}", rep.evolution.render(p));
    }

    #[test]
    fn q3d_jackson_gives_qkdv() {
        // u_t = (1/Q^2) jx^3 u - (2/Q) u jx u - (1/Q)(Dx u)(jx u)
        let rep = mc_derive(McSetting::QThreeDJackson).unwrap();
        let p = &rep.preset;
        let qq = &QRat::q_pow(2) + &QRat::q_pow(4);
        let u3 = u_atom(p, |d| d.jackson[0] = 3);
        let uplain = u_atom(p, |_| {});
        let ujx = u_atom(p, |d| d.jackson[0] = 1);
        let udx = u_atom(p, |d| d.shift[0] = 1);
        let mut expect = u3.scale(&qq.pow(2).inv());
        expect = expect.sub(
            &p.mul(&uplain, &ujx)
                .unwrap()
                .scale(&(&QRat::from_int(2) / &qq)),
        );
        expect = expect.sub(&p.mul(&udx, &ujx).unwrap().scale(&qq.inv()));
        assert_eq!(rep.evolution, expect, "got {}", rep.evolution.render(p));

        // classical limit: 1/4 u_xxx - 3/2 u u_x
        let lim = mc_classical_limit(p, &rep.evolution).unwrap();
        let uxxx = u_atom(p, |d| d.classical[0] = 3);
        let ux = u_atom(p, |d| d.classical[0] = 1);
        let expect_lim = uxxx.scale(&QRat::from_ratio(1, 4)).sub(
            &p.mul(&uplain, &ux)
                .unwrap()
                .scale(&QRat::from_ratio(3, 2)),
        );
        assert_eq!(lim, expect_lim);
    }

    #[test]
    fn qline_evolution_matches_the_lambda_free_form() {
        // u_t = (1/Q^2) Dx^{-1} jx^3 u
        //     + (eta/Q)(q^2 jx^2 u - Dx^{-1} jx^2 u)
        //     - (1/Q)(q (jx u)(Dx u) + (1+q) u (jx u))
        //     + eta u (u - Dx u)
        let rep = mc_qline().unwrap();
        let p = &rep.preset;
        let eta = p.ctx.param("eta").unwrap();
        let q = QRat::q();
        let qq = &QRat::q_pow(2) + &QRat::q_pow(4);
        let mk = |f: &dyn Fn(&mut Decor)| u_atom(p, f);

        let inv_j3 = mk(&|d| {
            d.shift[0] = -1;
            d.jackson[0] = 3;
        });
        let j2 = mk(&|d| d.jackson[0] = 2);
        let inv_j2 = mk(&|d| {
            d.shift[0] = -1;
            d.jackson[0] = 2;
        });
        let ju = mk(&|d| d.jackson[0] = 1);
        let du = mk(&|d| d.shift[0] = 1);
        let uplain = mk(&|_| {});

        let mut expect = inv_j3.scale(&qq.pow(2).inv());
        expect = expect.add(
            &j2.scale(&q.pow(2))
                .sub(&inv_j2)
                .scale(&(&eta / &qq)),
        );
        expect = expect.sub(
            &p.mul(&ju, &du)
                .unwrap()
                .scale(&(&q / &qq))
                .add(&p.mul(&uplain, &ju).unwrap().scale(&(&(&QRat::one() + &q) / &qq))),
        );
        expect = expect.add(
            &p.mul(&uplain, &uplain.sub(&du))
                .unwrap()
                .scale(&eta),
        );
        assert_eq!(
            rep.evolution, expect,
            "got {}\nexpected {}",
            rep.evolution.render(p),
            expect.render(p)
        );
    }

    #[test]
    fn qline_limit_is_classical_kdv_shape() {
        let rep = mc_qline().unwrap();
        let p = &rep.preset;
        let lim = mc_classical_limit(p, &rep.evolution).unwrap();
        let uxxx = u_atom(p, |d| d.classical[0] = 3);
        let uplain = u_atom(p, |_| {});
        let ux = u_atom(p, |d| d.classical[0] = 1);
        let expect = uxxx.scale(&QRat::from_ratio(1, 4)).sub(
            &p.mul(&uplain, &ux)
                .unwrap()
                .scale(&QRat::from_ratio(3, 2)),
        );
        assert_eq!(lim, expect, "got {}", lim.render(p));
    }
}
