//! Word expressions over a calculus preset: coefficient x coordinate
//! monomial x decorated function atoms x differential word, with a
//! functions-left canonical form.

use crate::preset::{CalculusPreset, OpKind};
use crate::NcError;
use qcore::QRat;
use std::collections::BTreeMap;

/// Per-coordinate operator word on one atom, canonical order
/// `[shift][addshift][jackson][classical]` per coordinate (the innermost
/// classical derivatives apply first). Negative jackson/classical counts
/// are the formal inverses, composed only on exact match.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Decor {
    pub shift: Vec<i64>,
    pub addshift: Vec<u32>,
    pub jackson: Vec<i64>,
    pub classical: Vec<i64>,
}

impl Decor {
    pub fn identity(ncoords: usize) -> Self {
        Decor {
            shift: vec![0; ncoords],
            addshift: vec![0; ncoords],
            jackson: vec![0; ncoords],
            classical: vec![0; ncoords],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shift.iter().all(|&r| r == 0)
            && self.addshift.iter().all(|&e| e == 0)
            && self.jackson.iter().all(|&s| s == 0)
            && self.classical.iter().all(|&s| s == 0)
    }
}

/// A decorated opaque function atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NcAtom {
    pub sym: u8,
    pub decor: Decor,
}

/// One canonical word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NcKey {
    pub mono: Vec<i64>,
    pub atoms: Vec<NcAtom>,
    pub diffs: Vec<u8>,
}

/// Formal sum of words.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct NcExpr {
    pub terms: BTreeMap<NcKey, QRat>,
}

impl NcExpr {
    pub fn zero() -> Self {
        NcExpr::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, mut key: NcKey, c: QRat) {
        if c.is_zero() {
            return;
        }
        key.atoms.sort();
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &NcExpr) -> NcExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> NcExpr {
        let mut out = self.clone();
        for (_, c) in out.terms.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &NcExpr) -> NcExpr {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &QRat) -> NcExpr {
        let mut out = NcExpr::zero();
        for (key, c) in &self.terms {
            out.insert(key.clone(), k * c);
        }
        out
    }

    pub fn atom(p: &CalculusPreset, sym: u8) -> NcExpr {
        let mut e = NcExpr::zero();
        e.insert(
            NcKey {
                mono: vec![0; p.ncoords()],
                atoms: vec![NcAtom { sym, decor: Decor::identity(p.ncoords()) }],
                diffs: vec![],
            },
            QRat::one(),
        );
        e
    }

    pub fn coordinate(p: &CalculusPreset, coord: usize, e: i64) -> NcExpr {
        let mut mono = vec![0i64; p.ncoords()];
        mono[coord] = e;
        let mut out = NcExpr::zero();
        out.insert(NcKey { mono, atoms: vec![], diffs: vec![] }, QRat::one());
        out
    }

    pub fn differential(p: &CalculusPreset, d: u8) -> NcExpr {
        let mut out = NcExpr::zero();
        out.insert(
            NcKey { mono: vec![0; p.ncoords()], atoms: vec![], diffs: vec![d] },
            QRat::one(),
        );
        out
    }

    pub fn constant(p: &CalculusPreset, c: QRat) -> NcExpr {
        let mut out = NcExpr::zero();
        out.insert(NcKey { mono: vec![0; p.ncoords()], atoms: vec![], diffs: vec![] }, c);
        out
    }

    /// Equality up to one overall sign (for equations `E = 0`).
    pub fn eq_up_to_sign(&self, other: &NcExpr) -> bool {
        self == other || *self == other.neg()
    }

    pub fn render(&self, p: &CalculusPreset) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut factors = vec![format!("({})", c.render(&p.ctx))];
            for (i, &e) in k.mono.iter().enumerate() {
                if e == 1 {
                    factors.push(p.coord_name(i));
                } else if e != 0 {
                    factors.push(format!("{}^{}", p.coord_name(i), e));
                }
            }
            for a in &k.atoms {
                factors.push(p.render_atom(a));
            }
            for &d in &k.diffs {
                factors.push(format!("d{}", p.coord_name(d as usize)));
            }
            parts.push(factors.join(" "));
        }
        parts.join("  +  ")
    }
}

/// Compose a primitive operator on the left of a decor word, collecting
/// the commutation scalar.
pub fn compose_op(
    p: &CalculusPreset,
    op: &OpKind,
    d: &Decor,
) -> Result<(QRat, Decor), NcError> {
    let mut out = d.clone();
    let mut scale = QRat::one();
    match *op {
        OpKind::Shift(coord, r) => {
            // shifts are outermost: no factor
            out.shift[coord] += r;
        }
        OpKind::AddShift(coord) => {
            if d.shift[coord] != 0 {
                return Err(NcError::Unsupported(
                    "additive shift over a multiplicative shift".into(),
                ));
            }
            out.addshift[coord] += 1;
        }
        OpKind::Jackson(coord) => {
            if d.addshift[coord] != 0 {
                return Err(NcError::Unsupported(
                    "jackson derivative over an additive shift".into(),
                ));
            }
            // pass left over D^r: factor scale^r per the d_b D_c = c D_c d_b rule
            let c = p.shift_scale(coord);
            scale = &scale * &c.pow(d.shift[coord]);
            out.jackson[coord] += 1;
        }
        OpKind::JacksonInv(coord) => {
            // formal inverse: exact-match only (inert otherwise is handled
            // by the caller; at the decor level we require composability)
            let c = p.shift_scale(coord);
            scale = &scale * &c.pow(-d.shift[coord]);
            out.jackson[coord] -= 1;
        }
        OpKind::Classical(coord) => {
            // a plain derivative also q-commutes with same-coordinate
            // multiplicative shifts: d(f(cx)) = c f'(cx)
            let c = p.shift_scale(coord);
            scale = &scale * &c.pow(d.shift[coord]);
            out.classical[coord] += 1;
        }
        OpKind::ClassicalInv(coord) => {
            let c = p.shift_scale(coord);
            scale = &scale * &c.pow(-d.shift[coord]);
            out.classical[coord] -= 1;
        }
    }
    Ok((scale, out))
}

/// Apply a primitive operator to a 0-form expression (twisted Leibniz for
/// Jackson kinds, plain Leibniz for classical, multiplicative for shifts).
pub fn apply_op(p: &CalculusPreset, op: &OpKind, e: &NcExpr) -> Result<NcExpr, NcError> {
    let mut out = NcExpr::zero();
    for (key, c) in &e.terms {
        debug_assert!(key.diffs.is_empty(), "operators act on 0-forms");
        match *op {
            OpKind::Shift(coord, r) => {
                // multiplicative on every factor
                let mut scale = p.shift_scale(coord).pow(r * key.mono[coord]);
                let mut atoms = Vec::with_capacity(key.atoms.len());
                for a in &key.atoms {
                    let mut d = a.decor.clone();
                    d.shift[coord] += r;
                    atoms.push(NcAtom { sym: a.sym, decor: d });
                }
                scale = &scale * c;
                out.insert(NcKey { mono: key.mono.clone(), atoms, diffs: vec![] }, scale);
            }
            OpKind::Classical(coord) => {
                // plain Leibniz over the monomial and each atom
                let n = key.mono[coord];
                if n != 0 {
                    let mut mono = key.mono.clone();
                    mono[coord] -= 1;
                    out.insert(
                        NcKey { mono, atoms: key.atoms.clone(), diffs: vec![] },
                        &QRat::from_int(n) * c,
                    );
                }
                for i in 0..key.atoms.len() {
                    let mut atoms = key.atoms.clone();
                    let (s, nd) = compose_op(p, op, &atoms[i].decor)?;
                    atoms[i].decor = nd;
                    out.insert(
                        NcKey { mono: key.mono.clone(), atoms, diffs: vec![] },
                        &s * c,
                    );
                }
            }
            OpKind::Jackson(coord) => {
                // twisted Leibniz: d(F G) = (d F)(T G) + F (d G), with
                // T = the coordinate shift by the jackson base
                let base_pow = p.jackson_shift_power(coord);
                let factors = 1 + key.atoms.len();
                for i in 0..factors {
                    let mut coefficient = c.clone();
                    let mut mono = key.mono.clone();
                    let mut atoms: Vec<NcAtom> = Vec::with_capacity(key.atoms.len());
                    let mut ok = true;
                    for j in 0..factors {
                        if j == 0 {
                            // the coordinate monomial factor
                            let n = key.mono[coord];
                            if j < i {
                                // shifted: T x^n = base^n x^n
                                coefficient =
                                    &coefficient * &p.jackson_base(coord).pow(n);
                            } else if j == i {
                                let br = crate::preset::bracket(&p.jackson_base(coord), n);
                                if br.is_zero() {
                                    ok = false;
                                    break;
                                }
                                coefficient = &coefficient * &br;
                                mono[coord] = n - 1;
                            }
                        } else {
                            let a = &key.atoms[j - 1];
                            let mut d = a.decor.clone();
                            if j < i {
                                d.shift[coord] += base_pow;
                            } else if j == i {
                                let (s, nd) =
                                    compose_op(p, &OpKind::Jackson(coord), &d)?;
                                coefficient = &coefficient * &s;
                                d = nd;
                            }
                            atoms.push(NcAtom { sym: a.sym, decor: d });
                        }
                    }
                    if ok {
                        out.insert(NcKey { mono, atoms, diffs: vec![] }, coefficient);
                    }
                }
            }
            OpKind::JacksonInv(_) | OpKind::ClassicalInv(_) => {
                // formal inverse: a decoration with the single rule
                // `d o d^{-1} = id` (counts cancel on exact match); it can
                // only be attached to single-atom terms
                if key.atoms.len() == 1 && key.mono.iter().all(|&m| m == 0) {
                    let mut atoms = key.atoms.clone();
                    let (s, nd) = compose_op(p, op, &atoms[0].decor)?;
                    atoms[0].decor = nd;
                    out.insert(
                        NcKey { mono: key.mono.clone(), atoms, diffs: vec![] },
                        &s * c,
                    );
                } else {
                    return Err(NcError::Unsupported(
                        "formal inverse applied to a non-atomic term".into(),
                    ));
                }
            }
            OpKind::AddShift(coord) => {
                // x -> x + param: binomial on the monomial, decoration on atoms
                let n = key.mono[coord];
                if n < 0 {
                    return Err(NcError::Unsupported(
                        "additive shift of a negative power".into(),
                    ));
                }
                let aparam = p.addshift_param(coord)?;
                for k2 in 0..=n {
                    let binom = crate::expr::binom(n, k2);
                    let mut mono = key.mono.clone();
                    mono[coord] = n - k2;
                    let mut atoms = Vec::with_capacity(key.atoms.len());
                    for a in &key.atoms {
                        let mut d = a.decor.clone();
                        d.addshift[coord] += 1;
                        atoms.push(NcAtom { sym: a.sym, decor: d });
                    }
                    out.insert(
                        NcKey { mono, atoms, diffs: vec![] },
                        &(&QRat::from_int(binom) * &aparam.pow(k2)) * c,
                    );
                }
            }
        }
    }
    Ok(out)
}

pub fn binom(n: i64, k: i64) -> i64 {
    let mut c = 1i64;
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c
}

/// Apply a whole operator word (rightmost first).
pub fn apply_word(p: &CalculusPreset, word: &[OpKind], e: &NcExpr) -> Result<NcExpr, NcError> {
    let mut cur = e.clone();
    for op in word.iter().rev() {
        cur = apply_op(p, op, &cur)?;
    }
    Ok(cur)
}
