//! Calculus presets: the rule tables parsed from the line-based DSL, the
//! product and exterior-derivative engines, and the termination /
//! confluence / pass-through witnesses.

use crate::expr::{apply_word, compose_op, Decor, NcAtom, NcExpr, NcKey};
use crate::scalar::{lex_line, parse_scalar, parse_scalar_atom, Tok, TokStream};
use crate::NcError;
use qcore::{ParamContext, QRat};
use std::collections::BTreeMap;

/// Primitive operator decorations usable in DF/PASS words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OpKind {
    /// `D_i^r`, the multiplicative shift with the coordinate's scale.
    Shift(usize, i64),
    /// Additive shift `x -> x + param`.
    AddShift(usize),
    /// Jackson derivative with the coordinate's declared base.
    Jackson(usize),
    /// Formal inverse of the Jackson derivative.
    JacksonInv(usize),
    /// Plain partial derivative.
    Classical(usize),
    /// Formal inverse of the plain derivative.
    ClassicalInv(usize),
}

/// One RHS term of a `REL d x -> ...` rule.
#[derive(Clone, Debug)]
pub struct RuleTerm {
    pub coeff: QRat,
    pub mono: Vec<i64>,
    pub diff: u8,
}

/// One RHS term of a `PASS d f -> ...` rule or a DF component.
#[derive(Clone, Debug)]
pub struct PassTerm {
    pub coeff: QRat,
    pub mono: Vec<i64>,
    pub word: Vec<OpKind>,
    pub diff: u8,
}

#[derive(Clone, Debug)]
pub struct CalculusPreset {
    pub name: String,
    pub ctx: ParamContext,
    pub coords: Vec<String>,
    pub shift_scale: Vec<QRat>,
    pub jackson_base: Vec<QRat>,
    pub jackson_shift_pow: Vec<i64>,
    pub addshift_param: Vec<Option<QRat>>,
    /// `x_j x_i = swap[j][i] x_i x_j` for j > i; `None` means the
    /// reordered product is undefined (ordering is primitive).
    pub coord_swap: Vec<Vec<Option<QRat>>>,
    /// `(d, coord) -> RHS` of the commutation rule.
    pub rules: BTreeMap<(u8, usize), Vec<RuleTerm>>,
    /// `(d1, d2) ->` rewritten 2-form (empty = zero).
    pub wedge: BTreeMap<(u8, u8), Vec<(QRat, (u8, u8))>>,
    /// Declared 2-form basis orientation.
    pub basis2: Vec<(u8, u8)>,
    /// `d -> ` pass-through decoration past an opaque atom.
    pub pass: BTreeMap<u8, Vec<PassTerm>>,
    /// `df = sum_d (sum_j w_j f) dx_d`.
    pub df: BTreeMap<u8, Vec<PassTerm>>,
    /// d^2 = 0 is waived for paper-exploratory presets.
    pub d2_exception: bool,
    pub sym_names: Vec<String>,
}

/// `[n]_b = (b^n - 1)/(b - 1)` handling the classical base b = 1.
pub fn bracket(b: &QRat, n: i64) -> QRat {
    if b.is_one() {
        QRat::from_int(n)
    } else {
        &(&b.pow(n) - &QRat::one()) / &(b - &QRat::one())
    }
}

impl CalculusPreset {
    pub fn ncoords(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_name(&self, i: usize) -> String {
        self.coords[i].clone()
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn shift_scale(&self, coord: usize) -> QRat {
        self.shift_scale[coord].clone()
    }

    pub fn jackson_base(&self, coord: usize) -> QRat {
        self.jackson_base[coord].clone()
    }

    pub fn jackson_shift_power(&self, coord: usize) -> i64 {
        self.jackson_shift_pow[coord]
    }

    pub fn addshift_param(&self, coord: usize) -> Result<QRat, NcError> {
        self.addshift_param[coord]
            .clone()
            .ok_or_else(|| NcError::Unsupported("no additive shift declared".into()))
    }

    pub fn with_symbols(mut self, syms: &[&str]) -> Self {
        self.sym_names = syms.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn sym(&self, name: &str) -> u8 {
        self.sym_names
            .iter()
            .position(|s| s == name)
            .map(|i| i as u8)
            .unwrap_or_else(|| panic!("unknown symbol {}", name))
    }

    pub fn render_atom(&self, a: &NcAtom) -> String {
        let mut s = String::new();
        for i in 0..self.ncoords() {
            let n = self.coord_name(i);
            if a.decor.shift[i] != 0 {
                s.push_str(&format!("D{}^{}", n, a.decor.shift[i]));
            }
            if a.decor.addshift[i] != 0 {
                s.push_str(&format!("E{}^{}", n, a.decor.addshift[i]));
            }
        }
        for i in 0..self.ncoords() {
            let n = self.coord_name(i);
            let j = a.decor.jackson[i];
            if j == 1 {
                s.push_str(&format!("dq{}", n));
            } else if j != 0 {
                s.push_str(&format!("dq{}^{}", n, j));
            }
        }
        for i in 0..self.ncoords() {
            let n = self.coord_name(i);
            let cdeg = a.decor.classical[i];
            if cdeg == 1 {
                s.push_str(&format!("d{}", n));
            } else if cdeg != 0 {
                s.push_str(&format!("d{}^{}", n, cdeg));
            }
        }
        if !s.is_empty() {
            s.push('.');
        }
        s.push_str(
            &self
                .sym_names
                .get(0usize.max(a.sym as usize))
                .cloned()
                .unwrap_or_else(|| format!("f{}", a.sym)),
        );
        s
    }

    /// Scalar picked up by reordering `mono1 * mono2` into canonical order.
    /// Errors when a needed swap relation is undeclared.
    pub fn mono_mul(&self, m1: &[i64], m2: &[i64]) -> Result<(QRat, Vec<i64>), NcError> {
        let mut scale = QRat::one();
        for j in 0..self.ncoords() {
            for i in 0..j {
                let e = m1[j] * m2[i];
                if e != 0 {
                    let Some(sw) = &self.coord_swap[j][i] else {
                        return Err(NcError::Unsupported(format!(
                            "no reorder relation for {} past {}",
                            self.coord_name(j),
                            self.coord_name(i)
                        )));
                    };
                    scale = &scale * &sw.pow(e);
                }
            }
        }
        let mono = m1.iter().zip(m2.iter()).map(|(a, b)| a + b).collect();
        Ok((scale, mono))
    }

    /// Move a differential through a coordinate monomial:
    /// returns a sum of `coeff * mono * diff` words.
    pub fn pass_mono(&self, d: u8, mono: &[i64]) -> Result<Vec<(QRat, Vec<i64>, u8)>, NcError> {
        // find the leftmost coordinate with nonzero exponent
        let Some(i) = mono.iter().position(|&e| e != 0) else {
            return Ok(vec![(QRat::one(), mono.to_vec(), d)]);
        };
        let e = mono[i];
        let rule = self
            .rules
            .get(&(d, i))
            .ok_or_else(|| {
                NcError::Unsupported(format!(
                    "no rule for d{} past {}",
                    self.coord_name(d as usize),
                    self.coord_name(i)
                ))
            })?
            .clone();
        let mut rest = mono.to_vec();
        if e > 0 {
            rest[i] -= 1;
            let mut out = Vec::new();
            for t in &rule {
                // t.mono * (pass t.diff through rest)
                let inner = self.pass_mono(t.diff, &rest)?;
                for (c2, m2, d2) in inner {
                    let (s, m) = self.mono_mul(&t.mono, &m2)?;
                    out.push((&(&t.coeff * &c2) * &s, m, d2));
                }
            }
            Ok(merge_mono_terms(out))
        } else {
            // Laurent exponent: invertible only for diagonal rules
            if rule.len() == 1 && rule[0].diff == d {
                let t = &rule[0];
                let mut expect = vec![0i64; self.ncoords()];
                expect[i] = 1;
                if t.mono == expect {
                    rest[i] += 1;
                    let mut out = Vec::new();
                    let inv = t.coeff.inv();
                    let inner = self.pass_mono(d, &rest)?;
                    for (c2, m2, d2) in inner {
                        let mut m = m2.clone();
                        m[i] -= 1;
                        out.push((&inv * &c2, m, d2));
                    }
                    return Ok(merge_mono_terms(out));
                }
            }
            Err(NcError::Unsupported(format!(
                "negative power of {} under a non-diagonal rule",
                self.coord_name(i)
            )))
        }
    }

    /// Move a differential through one decorated atom.
    pub fn pass_atom(
        &self,
        d: u8,
        atom: &NcAtom,
    ) -> Result<Vec<(QRat, Vec<i64>, NcAtom, u8)>, NcError> {
        let terms = self
            .pass
            .get(&d)
            .ok_or_else(|| {
                NcError::Unsupported(format!(
                    "no pass rule for d{}",
                    self.coord_name(d as usize)
                ))
            })?
            .clone();
        let mut out = Vec::new();
        for t in &terms {
            let mut scale = t.coeff.clone();
            let mut decor = atom.decor.clone();
            for op in t.word.iter().rev() {
                let (s, nd) = compose_op(self, op, &decor)?;
                scale = &scale * &s;
                decor = nd;
            }
            out.push((
                scale,
                t.mono.clone(),
                NcAtom { sym: atom.sym, decor },
                t.diff,
            ));
        }
        Ok(out)
    }

    /// Product of two expressions, normalized functions-left.
    pub fn mul(&self, a: &NcExpr, b: &NcExpr) -> Result<NcExpr, NcError> {
        let mut out = NcExpr::zero();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                self.mul_terms(ka, &(ca * cb), kb, &mut out)?;
            }
        }
        Ok(out)
    }

    fn mul_terms(
        &self,
        ka: &NcKey,
        c: &QRat,
        kb: &NcKey,
        out: &mut NcExpr,
    ) -> Result<(), NcError> {
        // move each diff of ka (rightmost first is unnecessary: at most one
        // diff passes since 2-forms cannot multiply nontrivial words)
        if ka.diffs.len() + kb.diffs.len() > 2 {
            return Err(NcError::Unsupported("form degree above two".into()));
        }
        if ka.diffs.is_empty() {
            // plain juxtaposition with monomial reordering
            let (s, mono) = self.mono_mul(&ka.mono, &kb.mono)?;
            let mut atoms = ka.atoms.clone();
            atoms.extend_from_slice(&kb.atoms);
            let mut diffs = ka.diffs.clone();
            diffs.extend_from_slice(&kb.diffs);
            self.push_wedged(out, mono, atoms, diffs, &(c * &s))?;
            return Ok(());
        }
        if ka.diffs.len() == 2 {
            if kb.mono.iter().any(|&e| e != 0) || !kb.atoms.is_empty() {
                return Err(NcError::Unsupported(
                    "2-form times a function is not needed and not defined here".into(),
                ));
            }
            let mut diffs = ka.diffs.clone();
            diffs.extend_from_slice(&kb.diffs);
            self.push_wedged(out, ka.mono.clone(), ka.atoms.clone(), diffs, c)?;
            return Ok(());
        }
        // one diff on the left word: pass it through kb's mono, then atoms
        let d0 = ka.diffs[0];
        let mono_passed = self.pass_mono(d0, &kb.mono)?;
        for (c1, m1, d1) in mono_passed {
            // then through each atom in sequence
            let mut states: Vec<(QRat, Vec<i64>, Vec<NcAtom>, u8)> =
                vec![(c1.clone(), m1.clone(), Vec::new(), d1)];
            for atom in &kb.atoms {
                let mut next = Vec::new();
                for (cs, ms, atoms_acc, ds) in &states {
                    for (c2, m2, natom, d2) in self.pass_atom(*ds, atom)? {
                        let (s, m) = self.mono_mul(ms, &m2)?;
                        let mut atoms_n = atoms_acc.clone();
                        atoms_n.push(natom);
                        next.push((&(cs * &c2) * &s, m, atoms_n, d2));
                    }
                }
                states = next
                    .into_iter()
                    .map(|(c, m, a, d)| (c.clone(), m, a, d))
                    .collect();
            }
            for (cs, ms, atoms_passed, ds) in states {
                // assemble: ka.mono ka.atoms * ms atoms_passed * [ds kb.diffs]
                let (s, mono) = self.mono_mul(&ka.mono, &ms)?;
                let mut atoms = ka.atoms.clone();
                atoms.extend(atoms_passed);
                let mut diffs = vec![ds];
                diffs.extend_from_slice(&kb.diffs);
                self.push_wedged(out, mono, atoms, diffs, &(&(c * &cs) * &s))?;
            }
        }
        Ok(())
    }

    /// Insert a term, normalizing the differential word through the wedge
    /// rules onto the declared basis.
    fn push_wedged(
        &self,
        out: &mut NcExpr,
        mono: Vec<i64>,
        atoms: Vec<NcAtom>,
        diffs: Vec<u8>,
        c: &QRat,
    ) -> Result<(), NcError> {
        match diffs.len() {
            0 | 1 => {
                out.insert(NcKey { mono, atoms, diffs }, c.clone());
                Ok(())
            }
            2 => {
                let pair = (diffs[0], diffs[1]);
                if self.basis2.contains(&pair) {
                    out.insert(NcKey { mono, atoms, diffs }, c.clone());
                    return Ok(());
                }
                let Some(rw) = self.wedge.get(&pair) else {
                    return Err(NcError::Unsupported(format!(
                        "no wedge rule for d{} d{}",
                        self.coord_name(pair.0 as usize),
                        self.coord_name(pair.1 as usize)
                    )));
                };
                for (s, np) in rw {
                    if !self.basis2.contains(np) {
                        return Err(NcError::Unsupported(
                            "wedge rule does not land on the declared basis".into(),
                        ));
                    }
                    out.insert(
                        NcKey {
                            mono: mono.clone(),
                            atoms: atoms.clone(),
                            diffs: vec![np.0, np.1],
                        },
                        c * s,
                    );
                }
                Ok(())
            }
            _ => Err(NcError::Unsupported("form degree above two".into())),
        }
    }

    /// Exterior derivative via the declared df-formula, extended to
    /// 1-forms by `d(g dxi) = (dg) ^ dxi`.
    pub fn d(&self, e: &NcExpr) -> Result<NcExpr, NcError> {
        let mut out = NcExpr::zero();
        for (key, c) in &e.terms {
            let zero_part = NcExpr {
                terms: [(
                    NcKey { mono: key.mono.clone(), atoms: key.atoms.clone(), diffs: vec![] },
                    c.clone(),
                )]
                .into_iter()
                .collect(),
            };
            for (&dd, terms) in &self.df {
                for t in terms {
                    let applied = apply_word(self, &t.word, &zero_part)?;
                    let scaled = applied.scale(&t.coeff);
                    // multiply by the coordinate-monomial prefactor if any
                    for (k2, c2) in &scaled.terms {
                        let (s, mono) = self.mono_mul(&t.mono, &k2.mono)?;
                        let mut diffs = vec![dd];
                        diffs.extend_from_slice(&key.diffs);
                        self.push_wedged(
                            &mut out,
                            mono,
                            k2.atoms.clone(),
                            diffs,
                            &(&(c2 * &s)),
                        )?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Termination shape check plus confluence and pass-through witnesses.
    pub fn validate(&self, max_degree: i64) -> Result<(), NcError> {
        // termination: every coordinate rule's RHS terms have total degree
        // not exceeding the LHS (degree one)
        for ((d, i), terms) in &self.rules {
            for t in terms {
                let deg: i64 = t.mono.iter().sum();
                if deg > 1 {
                    return Err(NcError::NonTerminating(format!(
                        "rule d{} {} raises coordinate degree",
                        self.coord_name(*d as usize),
                        self.coord_name(*i)
                    )));
                }
            }
        }
        // confluence: d(x_i x_j) by the df formula against both Leibniz
        // orders; reversed pairs are skipped when the preset leaves the
        // reordered product undefined (ordering primitive)
        for i in 0..self.ncoords() {
            for j in 0..self.ncoords() {
                if j < i && self.coord_swap[i][j].is_none() {
                    continue;
                }
                let xi = NcExpr::coordinate(self, i, 1);
                let xj = NcExpr::coordinate(self, j, 1);
                let prod = self.mul(&xi, &xj)?;
                let direct = self.d(&prod)?;
                let leibniz = self
                    .mul(&self.d(&xi)?, &xj)?
                    .add(&self.mul(&xi, &self.d(&xj)?)?);
                if direct != leibniz {
                    return Err(NcError::ConfluenceFailure(format!(
                        "d({} {}) Leibniz mismatch: direct {} vs leibniz {}",
                        self.coord_name(i),
                        self.coord_name(j),
                        direct.render(self),
                        leibniz.render(self)
                    )));
                }
            }
        }
        // pass-through witnesses: moving d past a monomial by the rules
        // agrees with the declared decoration formula on monomials
        for d in 0..self.ncoords() as u8 {
            if !self.pass.contains_key(&d) {
                continue;
            }
            for mono in all_monomials(self.ncoords(), max_degree) {
                let by_rules = self.pass_mono(d, &mono)?;
                let mut lhs = NcExpr::zero();
                for (c, m, dd) in by_rules {
                    lhs.insert(NcKey { mono: m, atoms: vec![], diffs: vec![dd] }, c);
                }
                let mut rhs = NcExpr::zero();
                let mono_expr = {
                    let mut e = NcExpr::zero();
                    e.insert(
                        NcKey { mono: mono.clone(), atoms: vec![], diffs: vec![] },
                        QRat::one(),
                    );
                    e
                };
                for t in &self.pass[&d] {
                    let applied = apply_word(self, &t.word, &mono_expr)?;
                    for (k2, c2) in &applied.terms {
                        let (s, m) = self.mono_mul(&t.mono, &k2.mono)?;
                        rhs.insert(
                            NcKey { mono: m, atoms: vec![], diffs: vec![t.diff] },
                            &(c2 * &t.coeff) * &s,
                        );
                    }
                }
                if lhs != rhs {
                    return Err(NcError::ConfluenceFailure(format!(
                        "pass rule for d{} disagrees with the coordinate rules on {:?}: {} vs {}",
                        self.coord_name(d as usize),
                        mono,
                        lhs.render(self),
                        rhs.render(self)
                    )));
                }
            }
        }
        // d^2 = 0 on monomials, unless the preset opts out
        if !self.d2_exception {
            for mono in all_monomials(self.ncoords(), max_degree) {
                let mut e = NcExpr::zero();
                e.insert(NcKey { mono, atoms: vec![], diffs: vec![] }, QRat::one());
                let dd = self.d(&self.d(&e)?)?;
                if !dd.is_zero() {
                    return Err(NcError::ConfluenceFailure(format!(
                        "d^2 != 0: {}",
                        dd.render(self)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn merge_mono_terms(terms: Vec<(QRat, Vec<i64>, u8)>) -> Vec<(QRat, Vec<i64>, u8)> {
    let mut map: BTreeMap<(Vec<i64>, u8), QRat> = BTreeMap::new();
    for (c, m, d) in terms {
        let e = map.entry((m, d)).or_insert_with(QRat::zero);
        *e = &*e + &c;
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((m, d), c)| (c, m, d))
        .collect()
}

fn all_monomials(ncoords: usize, max_degree: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64; ncoords]];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for m in &out {
            for i in 0..ncoords {
                let mut n = m.clone();
                n[i] += 1;
                next.push(n);
            }
        }
        out.extend(next.into_iter());
    }
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------

pub fn preset_parse(src: &str) -> Result<CalculusPreset, NcError> {
    let mut name = String::new();
    let mut params: Vec<String> = Vec::new();
    let mut coords: Vec<String> = Vec::new();
    let mut lines: Vec<(usize, Vec<Tok>)> = Vec::new();
    for (lineno0, raw) in src.lines().enumerate() {
        let line = lineno0 + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let toks = lex_line(stripped, line)?;
        lines.push((line, toks));
    }
    // first pass: PRESET / PARAM / COORD to build the context
    for (line, toks) in &lines {
        let mut ts = TokStream::new(toks.clone(), *line);
        match ts.bump() {
            Some(Tok::Ident(kw)) if kw == "PRESET" => {
                if let Some(Tok::Ident(n)) = ts.bump() {
                    name = n;
                }
            }
            Some(Tok::Ident(kw)) if kw == "PARAM" => {
                while let Some(Tok::Ident(p)) = ts.bump() {
                    params.push(p);
                }
            }
            Some(Tok::Ident(kw)) if kw == "COORD" => {
                while let Some(Tok::Ident(c)) = ts.bump() {
                    coords.push(c);
                }
            }
            _ => {}
        }
    }
    if coords.is_empty() {
        return Err(NcError::Parse { line: 1, col: 1, msg: "no COORD line".into() });
    }
    let ctx = ParamContext::new(params);
    let n = coords.len();
    let mut p = CalculusPreset {
        name,
        ctx: ctx.clone(),
        coords: coords.clone(),
        shift_scale: vec![QRat::q(); n],
        jackson_base: vec![QRat::q(); n],
        jackson_shift_pow: vec![1; n],
        addshift_param: vec![None; n],
        coord_swap: vec![vec![None; n]; n],
        rules: BTreeMap::new(),
        wedge: BTreeMap::new(),
        basis2: Vec::new(),
        pass: BTreeMap::new(),
        df: BTreeMap::new(),
        d2_exception: false,
        sym_names: vec!["u".into(), "v".into(), "w".into()],
    };

    let coord_index = |name: &str| coords.iter().position(|c| c == name);
    let diff_index = |name: &str| -> Option<u8> {
        name.strip_prefix('d')
            .and_then(coord_index)
            .map(|i| i as u8)
    };

    for (line, toks) in &lines {
        let mut ts = TokStream::new(toks.clone(), *line);
        let Some(Tok::Ident(kw)) = ts.bump() else {
            return Err(NcError::Parse { line: *line, col: 1, msg: "expected keyword".into() });
        };
        match kw.as_str() {
            "PRESET" | "PARAM" | "COORD" => {}
            "SHIFT" => {
                let c = expect_coord(&mut ts, &coord_index)?;
                let v = parse_scalar(&mut ts, &ctx)?;
                p.shift_scale[c] = v;
            }
            "JACKSON" => {
                let c = expect_coord(&mut ts, &coord_index)?;
                let base = parse_scalar_atom(&mut ts, &ctx)?;
                let pow = match ts.bump() {
                    Some(Tok::Int(k)) => k,
                    Some(Tok::Minus) => match ts.bump() {
                        Some(Tok::Int(k)) => -k,
                        _ => return Err(ts.err("expected shift power")),
                    },
                    _ => return Err(ts.err("expected shift power")),
                };
                p.jackson_base[c] = base;
                p.jackson_shift_pow[c] = pow;
            }
            "CLASSICAL" => {
                let c = expect_coord(&mut ts, &coord_index)?;
                p.jackson_base[c] = QRat::one();
                p.jackson_shift_pow[c] = 0;
            }
            "ADDSHIFT" => {
                let c = expect_coord(&mut ts, &coord_index)?;
                let v = parse_scalar(&mut ts, &ctx)?;
                p.addshift_param[c] = Some(v);
            }
            "CREL" => {
                // CREL xj xi -> scalar  (x_j x_i = scalar x_i x_j)
                let j = expect_coord(&mut ts, &coord_index)?;
                skip_star(&mut ts);
                let i = expect_coord(&mut ts, &coord_index)?;
                expect_arrow(&mut ts)?;
                let v = parse_scalar(&mut ts, &ctx)?;
                if j <= i {
                    return Err(ts.err("CREL expects the later coordinate first"));
                }
                p.coord_swap[j][i] = Some(v);
            }
            "REL" => {
                // REL d x -> terms
                let d = expect_diff(&mut ts, &diff_index)?;
                skip_star(&mut ts);
                let c = expect_coord(&mut ts, &coord_index)?;
                expect_arrow(&mut ts)?;
                let terms = parse_rule_rhs(&mut ts, &ctx, &coords, &diff_index)?;
                if ts.peek().is_some() {
                    return Err(ts.err("trailing tokens in REL"));
                }
                p.rules.insert((d, c), terms);
            }
            "PASS" => {
                let d = expect_diff(&mut ts, &diff_index)?;
                skip_star(&mut ts);
                match ts.bump() {
                    Some(Tok::Ident(f)) if f == "f" => {}
                    _ => return Err(ts.err("PASS expects the atom placeholder `f`")),
                }
                expect_arrow(&mut ts)?;
                let terms = parse_pass_rhs(&mut ts, &ctx, &coords, &diff_index, true)?;
                p.pass.insert(d, terms);
            }
            "DF" => {
                let d = expect_diff(&mut ts, &diff_index)?;
                match ts.bump() {
                    Some(Tok::Colon) => {}
                    _ => return Err(ts.err("expected `:` in DF line")),
                }
                let terms = parse_pass_rhs(&mut ts, &ctx, &coords, &diff_index, false)?;
                let mut fixed = terms;
                for t in fixed.iter_mut() {
                    t.diff = d;
                }
                p.df.insert(d, fixed);
            }
            "WEDGE" => {
                let d1 = expect_diff(&mut ts, &diff_index)?;
                let d2 = expect_diff(&mut ts, &diff_index)?;
                expect_arrow(&mut ts)?;
                if matches!(ts.peek(), Some(Tok::Int(0))) && ts.toks.len() == ts.pos + 1 {
                    ts.bump();
                    p.wedge.insert((d1, d2), vec![]);
                } else {
                    let coeff = parse_wedge_scalar(&mut ts, &ctx)?;
                    let e1 = expect_diff(&mut ts, &diff_index)?;
                    let e2 = expect_diff(&mut ts, &diff_index)?;
                    p.wedge.insert((d1, d2), vec![(coeff, (e1, e2))]);
                }
            }
            "BASIS" => {
                loop {
                    let d1 = expect_diff(&mut ts, &diff_index)?;
                    let d2 = expect_diff(&mut ts, &diff_index)?;
                    p.basis2.push((d1, d2));
                    match ts.peek() {
                        Some(Tok::Comma) => {
                            ts.bump();
                        }
                        _ => break,
                    }
                }
            }
            "OPT" => {
                while let Some(Tok::Ident(flag)) = ts.bump() {
                    if flag == "d2_exception" {
                        p.d2_exception = true;
                    }
                }
            }
            other => {
                return Err(NcError::Parse {
                    line: *line,
                    col: 1,
                    msg: format!("unknown keyword `{}`", other),
                })
            }
        }
    }
    // implicit zero wedge for squares not declared
    for d in 0..n as u8 {
        p.wedge.entry((d, d)).or_insert_with(Vec::new);
    }
    Ok(p)
}

fn skip_star(ts: &mut TokStream) {
    if matches!(ts.peek(), Some(Tok::Star)) {
        ts.bump();
    }
}

fn expect_arrow(ts: &mut TokStream) -> Result<(), NcError> {
    match ts.bump() {
        Some(Tok::Arrow) => Ok(()),
        _ => Err(ts.err("expected `->`")),
    }
}

fn expect_coord(
    ts: &mut TokStream,
    coord_index: &dyn Fn(&str) -> Option<usize>,
) -> Result<usize, NcError> {
    match ts.bump() {
        Some(Tok::Ident(n)) => {
            coord_index(&n).ok_or_else(|| ts.err(&format!("unknown coordinate `{}`", n)))
        }
        _ => Err(ts.err("expected coordinate name")),
    }
}

fn expect_diff(
    ts: &mut TokStream,
    diff_index: &dyn Fn(&str) -> Option<u8>,
) -> Result<u8, NcError> {
    match ts.bump() {
        Some(Tok::Ident(n)) => {
            diff_index(&n).ok_or_else(|| ts.err(&format!("unknown differential `{}`", n)))
        }
        _ => Err(ts.err("expected differential name")),
    }
}

/// Wedge coefficients never contain bare identifiers other than q.
fn parse_wedge_scalar(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    // scalars stop before the first differential identifier; we parse
    // greedily but differentials start with `d` followed by a coordinate,
    // so temporarily cut the stream at the first such token
    let cut = ts
        .toks
        .iter()
        .enumerate()
        .skip(ts.pos)
        .find(|(_, t)| matches!(t, Tok::Ident(n) if n.starts_with('d') && n.len() > 1))
        .map(|(i, _)| i)
        .unwrap_or(ts.toks.len());
    let sub = ts.toks[ts.pos..cut].to_vec();
    let mut sts = TokStream::new(sub, ts.line);
    let v = parse_scalar(&mut sts, ctx)?;
    if !sts.done() {
        return Err(ts.err("trailing tokens in wedge coefficient"));
    }
    ts.pos = cut;
    Ok(v)
}

/// RHS of REL: sum of `scalar coordword diff` terms.
fn parse_rule_rhs(
    ts: &mut TokStream,
    ctx: &ParamContext,
    coords: &[String],
    diff_index: &dyn Fn(&str) -> Option<u8>,
) -> Result<Vec<RuleTerm>, NcError> {
    let mut out = Vec::new();
    let mut sign = QRat::one();
    loop {
        let term = parse_one_rule_term(ts, ctx, coords, diff_index)?;
        out.push(RuleTerm { coeff: &term.0 * &sign, mono: term.1, diff: term.2 });
        match ts.peek() {
            Some(Tok::Plus) => {
                ts.bump();
                sign = QRat::one();
            }
            Some(Tok::Minus) => {
                ts.bump();
                sign = -&QRat::one();
            }
            _ => break,
        }
    }
    Ok(out)
}

fn parse_one_rule_term(
    ts: &mut TokStream,
    ctx: &ParamContext,
    coords: &[String],
    diff_index: &dyn Fn(&str) -> Option<u8>,
) -> Result<(QRat, Vec<i64>, u8), NcError> {
    let mut coeff = QRat::one();
    let mut mono = vec![0i64; coords.len()];
    loop {
        match ts.peek().cloned() {
            Some(Tok::Ident(name)) => {
                if let Some(d) = diff_index(&name) {
                    ts.bump();
                    return Ok((coeff, mono, d));
                }
                if let Some(ci) = coords.iter().position(|c| *c == name) {
                    ts.bump();
                    let mut e = 1i64;
                    if matches!(ts.peek(), Some(Tok::Caret)) {
                        ts.bump();
                        let neg = if matches!(ts.peek(), Some(Tok::Minus)) {
                            ts.bump();
                            true
                        } else {
                            false
                        };
                        match ts.bump() {
                            Some(Tok::Int(k)) => e = if neg { -k } else { k },
                            _ => return Err(ts.err("bad coordinate power")),
                        }
                    }
                    mono[ci] += e;
                    continue;
                }
                // otherwise `q` or a scalar parameter
                let v = if name == "q" {
                    QRat::q()
                } else {
                    ctx.param(&name)
                        .map_err(|_| ts.err(&format!("unknown name `{}`", name)))?
                };
                ts.bump();
                let v = maybe_pow(ts, v)?;
                coeff = &coeff * &v;
            }
            Some(Tok::Int(_)) | Some(Tok::QBracket(_)) | Some(Tok::LParen)
            | Some(Tok::Minus) | Some(Tok::Slash) => {
                // scalar factor; reuse the scalar parser for a single
                // primary (with optional power)
                let v = parse_scalar_primary(ts, ctx)?;
                coeff = &coeff * &v;
            }
            _ => return Err(ts.err("rule term must end with a differential")),
        }
    }
}

fn maybe_pow(ts: &mut TokStream, base: QRat) -> Result<QRat, NcError> {
    if matches!(ts.peek(), Some(Tok::Caret)) {
        ts.bump();
        let neg = if matches!(ts.peek(), Some(Tok::Minus)) {
            ts.bump();
            true
        } else {
            false
        };
        match ts.bump() {
            Some(Tok::Int(k)) => Ok(base.pow(if neg { -k } else { k })),
            _ => Err(ts.err("bad exponent")),
        }
    } else {
        Ok(base)
    }
}

fn parse_scalar_primary(ts: &mut TokStream, ctx: &ParamContext) -> Result<QRat, NcError> {
    match ts.bump() {
        Some(Tok::Int(n)) => {
            let v = maybe_pow(ts, QRat::from_int(n))?;
            if matches!(ts.peek(), Some(Tok::Slash)) {
                ts.bump();
                match ts.bump() {
                    Some(Tok::Int(d)) => Ok(&v / &QRat::from_int(d)),
                    _ => Err(ts.err("bad rational")),
                }
            } else {
                Ok(v)
            }
        }
        Some(Tok::QBracket(n)) => maybe_pow(ts, qcore::q_int(n)),
        Some(Tok::Minus) => {
            let v = parse_scalar_primary(ts, ctx)?;
            Ok(-&v)
        }
        Some(Tok::LParen) => {
            // parenthesized scalar subexpression
            let mut depth = 1usize;
            let start = ts.pos;
            while depth > 0 {
                match ts.bump() {
                    Some(Tok::LParen) => depth += 1,
                    Some(Tok::RParen) => depth -= 1,
                    Some(_) => {}
                    None => return Err(ts.err("unbalanced parenthesis")),
                }
            }
            let inner = ts.toks[start..ts.pos - 1].to_vec();
            let mut sts = TokStream::new(inner, ts.line);
            let v = parse_scalar(&mut sts, ctx)?;
            if !sts.done() {
                return Err(ts.err("trailing tokens in scalar group"));
            }
            maybe_pow(ts, v)
        }
        _ => Err(ts.err("expected scalar factor")),
    }
}

/// RHS of PASS / DF: sum of `scalars coordword (opword f) [diff]` terms.
fn parse_pass_rhs(
    ts: &mut TokStream,
    ctx: &ParamContext,
    coords: &[String],
    diff_index: &dyn Fn(&str) -> Option<u8>,
    with_diff: bool,
) -> Result<Vec<PassTerm>, NcError> {
    let mut out = Vec::new();
    let mut sign = QRat::one();
    loop {
        let term = parse_one_pass_term(ts, ctx, coords, diff_index, with_diff)?;
        out.push(PassTerm {
            coeff: &term.coeff * &sign,
            mono: term.mono,
            word: term.word,
            diff: term.diff,
        });
        match ts.peek() {
            Some(Tok::Plus) => {
                ts.bump();
                sign = QRat::one();
            }
            Some(Tok::Minus) => {
                ts.bump();
                sign = -&QRat::one();
            }
            None => break,
            _ => return Err(ts.err("expected `+`, `-`, or end of line")),
        }
    }
    Ok(out)
}

fn parse_one_pass_term(
    ts: &mut TokStream,
    ctx: &ParamContext,
    coords: &[String],
    diff_index: &dyn Fn(&str) -> Option<u8>,
    with_diff: bool,
) -> Result<PassTerm, NcError> {
    let mut coeff = QRat::one();
    let mut mono = vec![0i64; coords.len()];
    let mut word: Option<Vec<OpKind>> = None;
    loop {
        match ts.peek().cloned() {
            Some(Tok::LParen) if word.is_none() && looks_like_word_group(ts) => {
                ts.bump();
                word = Some(parse_op_word(ts, coords)?);
                // closing paren consumed by parse_op_word
            }
            Some(Tok::LParen) => {
                let v = parse_scalar_primary(ts, ctx)?;
                coeff = &coeff * &v;
            }
            Some(Tok::Ident(name)) => {
                if word.is_some() {
                    if with_diff {
                        if let Some(d) = diff_index(&name) {
                            ts.bump();
                            return Ok(PassTerm {
                                coeff,
                                mono,
                                word: word.unwrap(),
                                diff: d,
                            });
                        }
                    }
                    return Err(ts.err("unexpected token after atom group"));
                }
                if name == "f" {
                    // bare identity word
                    ts.bump();
                    word = Some(vec![]);
                    continue;
                }
                if let Some(ci) = coords.iter().position(|c| *c == name) {
                    ts.bump();
                    let mut e = 1i64;
                    if matches!(ts.peek(), Some(Tok::Caret)) {
                        ts.bump();
                        let neg = matches!(ts.peek(), Some(Tok::Minus));
                        if neg {
                            ts.bump();
                        }
                        match ts.bump() {
                            Some(Tok::Int(k)) => e = if neg { -k } else { k },
                            _ => return Err(ts.err("bad power")),
                        }
                    }
                    mono[ci] += e;
                    continue;
                }
                let v = if name == "q" {
                    QRat::q()
                } else {
                    ctx.param(&name)
                        .map_err(|_| ts.err(&format!("unknown name `{}`", name)))?
                };
                ts.bump();
                coeff = &coeff * &maybe_pow(ts, v)?;
            }
            Some(Tok::Int(_)) | Some(Tok::QBracket(_)) | Some(Tok::Minus)
            | Some(Tok::Slash) => {
                let v = parse_scalar_primary(ts, ctx)?;
                coeff = &coeff * &v;
            }
            None => {
                if let Some(w) = word {
                    if with_diff {
                        return Err(ts.err("pass term must end with a differential"));
                    }
                    return Ok(PassTerm { coeff, mono, word: w, diff: 0 });
                }
                return Err(ts.err("missing atom group"));
            }
            _ => {
                if let Some(w) = word {
                    if !with_diff {
                        return Ok(PassTerm { coeff, mono, word: w, diff: 0 });
                    }
                }
                return Err(ts.err("unexpected token in pass term"));
            }
        }
        if word.is_some() && !with_diff {
            // DF terms end right after the group (or continue with +/-)
            match ts.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) | None => {
                    return Ok(PassTerm { coeff, mono, word: word.unwrap(), diff: 0 })
                }
                _ => return Err(ts.err("unexpected token after DF atom group")),
            }
        }
    }
}

/// Lookahead: does this parenthesis open an operator-word group `( ... f )`?
fn looks_like_word_group(ts: &TokStream) -> bool {
    let mut depth = 0usize;
    for t in ts.toks.iter().skip(ts.pos) {
        match t {
            Tok::LParen => depth += 1,
            Tok::RParen => {
                depth -= 1;
                if depth == 0 {
                    return false;
                }
            }
            Tok::Ident(n) if n == "f" && depth == 1 => return true,
            _ => {}
        }
    }
    false
}

/// Operator word inside parens: sequence of op tokens ending with `f )`.
fn parse_op_word(ts: &mut TokStream, coords: &[String]) -> Result<Vec<OpKind>, NcError> {
    let coord_index = |name: &str| coords.iter().position(|c| c == name);
    let mut word = Vec::new();
    loop {
        match ts.bump() {
            Some(Tok::Ident(name)) if name == "f" => {
                match ts.bump() {
                    Some(Tok::RParen) => return Ok(word),
                    _ => return Err(ts.err("expected `)` after f")),
                }
            }
            Some(Tok::Ident(name)) => {
                let op = if let Some(rest) = name.strip_prefix("ij") {
                    OpKind::JacksonInv(
                        coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?,
                    )
                } else if let Some(rest) = name.strip_prefix("ip") {
                    OpKind::ClassicalInv(
                        coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?,
                    )
                } else if let Some(rest) = name.strip_prefix('D') {
                    let c = coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?;
                    let mut r = 1i64;
                    if matches!(ts.peek(), Some(Tok::Caret)) {
                        ts.bump();
                        let neg = matches!(ts.peek(), Some(Tok::Minus));
                        if neg {
                            ts.bump();
                        }
                        match ts.bump() {
                            Some(Tok::Int(k)) => r = if neg { -k } else { k },
                            _ => return Err(ts.err("bad shift power")),
                        }
                    }
                    OpKind::Shift(c, r)
                } else if let Some(rest) = name.strip_prefix('j') {
                    OpKind::Jackson(
                        coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?,
                    )
                } else if let Some(rest) = name.strip_prefix('p') {
                    OpKind::Classical(
                        coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?,
                    )
                } else if let Some(rest) = name.strip_prefix('E') {
                    OpKind::AddShift(
                        coord_index(rest).ok_or_else(|| ts.err("unknown coordinate"))?,
                    )
                } else {
                    return Err(ts.err(&format!("unknown operator token `{}`", name)));
                };
                word.push(op);
            }
            _ => return Err(ts.err("expected operator token or `f`")),
        }
    }
}
