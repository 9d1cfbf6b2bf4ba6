//! Sparse multivariate polynomials over the integers.
//!
//! Variable 0 is always `q`; higher indices are auxiliary parameters
//! registered in a [`crate::ParamContext`]. Exponent vectors are packed
//! into a single `u128` (q in the top 32 bits, then up to six 16-bit
//! parameter fields), so the lexicographic monomial order with `q` most
//! significant is plain integer comparison. This fixes the canonical form
//! used for structural equality of rational functions.

use num::bigint::Sign;
use num::{BigInt, Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Maximum number of auxiliary parameters a context may declare.
pub const MAX_PARAMS: usize = 6;

const Q_SHIFT: u32 = 96;
const FIELD_BITS: u32 = 16;

/// Exponent vector view. Entry `i` is the exponent of variable `i`.
pub type Expo = Vec<u32>;

#[inline]
fn mono_get(m: u128, var: usize) -> u32 {
    if var == 0 {
        (m >> Q_SHIFT) as u32
    } else {
        debug_assert!(var <= MAX_PARAMS);
        ((m >> (Q_SHIFT - FIELD_BITS * var as u32)) & 0xFFFF) as u32
    }
}

#[inline]
fn mono_from_parts(parts: &[u32]) -> u128 {
    let mut m: u128 = 0;
    for (i, &e) in parts.iter().enumerate() {
        if i == 0 {
            m |= (e as u128) << Q_SHIFT;
        } else {
            assert!(i <= MAX_PARAMS, "at most {} parameters supported", MAX_PARAMS);
            assert!(e < (1 << FIELD_BITS), "parameter exponent too large");
            m |= (e as u128) << (Q_SHIFT - FIELD_BITS * i as u32);
        }
    }
    m
}

#[inline]
fn mono_to_expo(m: u128) -> Expo {
    let mut out = vec![mono_get(m, 0)];
    for i in 1..=MAX_PARAMS {
        out.push(mono_get(m, i));
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

#[inline]
fn mono_set(m: u128, var: usize, e: u32) -> u128 {
    let cleared = if var == 0 {
        m & !(0xFFFF_FFFFu128 << Q_SHIFT)
    } else {
        m & !(0xFFFFu128 << (Q_SHIFT - FIELD_BITS * var as u32))
    };
    if var == 0 {
        cleared | ((e as u128) << Q_SHIFT)
    } else {
        assert!(e < (1 << FIELD_BITS), "parameter exponent too large");
        cleared | ((e as u128) << (Q_SHIFT - FIELD_BITS * var as u32))
    }
}

/// Sparse multivariate polynomial with `BigInt` coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<u128, BigInt>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = MPoly::zero();
        if !c.is_zero() {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn one() -> Self {
        MPoly::constant(BigInt::one())
    }

    /// Single variable raised to a power.
    pub fn var_pow(var: usize, exp: u32) -> Self {
        if exp == 0 {
            return MPoly::one();
        }
        let mut p = MPoly::zero();
        p.terms.insert(mono_set(0, var, exp), BigInt::one());
        p
    }

    pub fn monomial(expo: Expo, coef: BigInt) -> Self {
        let mut p = MPoly::zero();
        if !coef.is_zero() {
            p.terms.insert(mono_from_parts(&expo), coef);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&0))
    }

    pub fn constant_value(&self) -> Option<&BigInt> {
        if self.is_constant() {
            self.terms.get(&0)
        } else {
            None
        }
    }

    /// Iterate terms as (exponent vector, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Expo, &BigInt)> {
        self.terms.iter().map(|(&m, c)| (mono_to_expo(m), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest variable index that actually occurs, if any.
    pub fn max_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (&m, _) in &self.terms {
            for i in (0..=MAX_PARAMS).rev() {
                if mono_get(m, i) > 0 {
                    if best.map(|b| i > b).unwrap_or(true) {
                        best = Some(i);
                    }
                    break;
                }
            }
        }
        best
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|&m| mono_get(m, var)).max().unwrap_or(0)
    }

    fn insert_add(&mut self, m: u128, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.insert_add(m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        let mut out = self.clone();
        for (_, c) in out.terms.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.insert_add(m, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        // collect into a vec and merge once; cheaper than tree inserts when
        // the product is large
        let mut prods: Vec<(u128, BigInt)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &other.terms {
                prods.push((ma + mb, ca * cb));
            }
        }
        prods.sort_unstable_by_key(|(m, _)| *m);
        let mut out = BTreeMap::new();
        let mut iter = prods.into_iter();
        if let Some((mut cur_m, mut cur_c)) = iter.next() {
            for (m, c) in iter {
                if m == cur_m {
                    cur_c += c;
                } else {
                    if !cur_c.is_zero() {
                        out.insert(cur_m, cur_c);
                    }
                    cur_m = m;
                    cur_c = c;
                }
            }
            if !cur_c.is_zero() {
                out.insert(cur_m, cur_c);
            }
        }
        MPoly { terms: out }
    }

    pub fn mul_bigint(&self, c: &BigInt) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        let mut out = self.clone();
        for (_, v) in out.terms.iter_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// gcd of all integer coefficients (zero polynomial yields zero).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_bigint_exact(&self, d: &BigInt) -> MPoly {
        assert!(!d.is_zero());
        let mut out = MPoly::zero();
        for (&m, c) in &self.terms {
            let (quo, rem) = c.div_rem(d);
            assert!(rem.is_zero(), "non-exact integer division in poly");
            out.insert_add(m, quo);
        }
        out
    }

    /// Leading coefficient under the lex order.
    pub fn leading_coeff(&self) -> BigInt {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigInt::zero)
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> MPoly {
        let mut out = MPoly::zero();
        for (&m, c) in &self.terms {
            let e = mono_get(m, var);
            if e > 0 {
                out.insert_add(mono_set(m, var, e - 1), c * BigInt::from(e));
            }
        }
        out
    }

    /// Substitute variable `var := value` where `value` is a polynomial.
    pub fn substitute(&self, var: usize, value: &MPoly) -> MPoly {
        // group by exponent of var, then Horner over the grouped slices
        let top = self.degree_in(var);
        let mut buckets: Vec<MPoly> = vec![MPoly::zero(); top as usize + 1];
        for (&m, c) in &self.terms {
            let e = mono_get(m, var);
            buckets[e as usize].insert_add(mono_set(m, var, 0), c.clone());
        }
        let mut acc = MPoly::zero();
        for b in buckets.into_iter().rev() {
            acc = acc.mul(value).add(&b);
        }
        acc
    }

    /// View as univariate in `var`: coefficients indexed by degree.
    fn coeffs_in(&self, var: usize) -> Vec<MPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![MPoly::zero(); d + 1];
        for (&m, c) in &self.terms {
            let e = mono_get(m, var) as usize;
            out[e].insert_add(mono_set(m, var, 0), c.clone());
        }
        out
    }

    fn from_coeffs_in(var: usize, coeffs: Vec<MPoly>) -> MPoly {
        let mut out = MPoly::zero();
        for (deg, p) in coeffs.into_iter().enumerate() {
            for (&m, c) in &p.terms {
                out.insert_add(mono_set(m, var, mono_get(m, var) + deg as u32), c.clone());
            }
        }
        out
    }

    /// Exact division; panics if not divisible (internal use after gcd).
    pub fn div_exact(&self, d: &MPoly) -> MPoly {
        self.try_div_exact(d).expect("non-exact poly division")
    }

    /// Exact division, `None` if `d` does not divide `self`.
    pub fn try_div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero poly");
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if d.is_one() {
            return Some(self.clone());
        }
        if let Some(c) = d.constant_value() {
            let mut out = MPoly::zero();
            for (&m, v) in &self.terms {
                let (quo, rem) = v.div_rem(c);
                if !rem.is_zero() {
                    return None;
                }
                out.insert_add(m, quo);
            }
            return Some(out);
        }
        if d.terms.len() == 1 {
            // monomial divisor: exponent subtraction with underflow checks
            let (&dm, dc) = d.terms.iter().next().unwrap();
            let mut out = MPoly::zero();
            for (&m, v) in &self.terms {
                for i in 0..=MAX_PARAMS {
                    if mono_get(m, i) < mono_get(dm, i) {
                        return None;
                    }
                }
                let (quo, rem) = v.div_rem(dc);
                if !rem.is_zero() {
                    return None;
                }
                out.insert_add(m - dm, quo);
            }
            return Some(out);
        }
        let var = d.max_var().expect("nonconstant divisor");
        let dc = d.coeffs_in(var);
        let ddeg = dc.len() - 1;
        let mut rem = self.coeffs_in(var);
        let mut quo: Vec<MPoly> = Vec::new();
        loop {
            while rem.last().map(|p| p.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() < ddeg + 1 {
                break;
            }
            let shift = rem.len() - 1 - ddeg;
            let qc = rem.last().unwrap().try_div_exact(&dc[ddeg])?;
            for (i, dcoef) in dc.iter().enumerate() {
                let prod = qc.mul(dcoef);
                rem[i + shift] = rem[i + shift].sub(&prod);
            }
            if quo.len() < shift + 1 {
                quo.resize(shift + 1, MPoly::zero());
            }
            quo[shift] = quo[shift].add(&qc);
        }
        if rem.iter().all(|p| p.is_zero()) {
            Some(MPoly::from_coeffs_in(var, quo))
        } else {
            None
        }
    }

    /// Content with respect to `var`: gcd of the univariate coefficients.
    fn content_in(&self, var: usize) -> MPoly {
        let mut g = MPoly::zero();
        for c in self.coeffs_in(var) {
            if !c.is_zero() {
                g = gcd(&g, &c);
            }
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Evaluate at a full assignment of rational values per variable index.
    pub fn eval(&self, assign: &dyn Fn(usize) -> num::BigRational) -> num::BigRational {
        use num::BigRational;
        let mut acc = BigRational::zero();
        for (&m, c) in &self.terms {
            let mut t = BigRational::from(c.clone());
            for i in 0..=MAX_PARAMS {
                let e = mono_get(m, i);
                if e > 0 {
                    let v = assign(i);
                    let mut p = BigRational::one();
                    for _ in 0..e {
                        p *= v.clone();
                    }
                    t *= p;
                }
            }
            acc += t;
        }
        acc
    }

    /// The single variable this polynomial depends on, if exactly one.
    fn single_var(&self) -> Option<usize> {
        let mut var: Option<usize> = None;
        for (&m, _) in &self.terms {
            for i in 0..=MAX_PARAMS {
                if mono_get(m, i) > 0 {
                    match var {
                        None => var = Some(i),
                        Some(v) if v == i => {}
                        _ => return None,
                    }
                }
            }
        }
        var
    }

    /// Render with variable names supplied by `name`.
    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (&m, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            for i in 0..=MAX_PARAMS {
                let e = mono_get(m, i);
                if e == 1 {
                    factors.push(name(i));
                } else if e > 1 {
                    factors.push(format!("{}^{}", name(i), e));
                }
            }
            let mono = factors.join("*");
            let s = if mono.is_empty() {
                format!("{}", c)
            } else if c.is_one() {
                mono
            } else if (-c.clone()).is_one() {
                format!("-{}", mono)
            } else {
                format!("{}*{}", c, mono)
            };
            parts.push(s);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }

    /// Sign of the leading (lex-greatest) coefficient.
    pub fn lead_sign(&self) -> Sign {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.sign())
            .unwrap_or(Sign::NoSign)
    }
}

/// Pseudo-remainder of `a` by `b` in variable `var`.
fn prem(a: &MPoly, b: &MPoly, var: usize) -> MPoly {
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    if da < db {
        return a.clone();
    }
    let bc = b.coeffs_in(var);
    let lb = bc.last().unwrap().clone();
    let mut rem = a.coeffs_in(var);
    let steps = da - db + 1;
    for c in rem.iter_mut() {
        *c = c.mul(&lb.pow(steps));
    }
    loop {
        while rem.last().map(|p| p.is_zero()).unwrap_or(false) {
            rem.pop();
        }
        if rem.len() < bc.len() {
            break;
        }
        let shift = rem.len() - bc.len();
        let qc = rem.last().unwrap().div_exact(&lb);
        for (i, dcoef) in bc.iter().enumerate() {
            let prod = qc.mul(dcoef);
            rem[i + shift] = rem[i + shift].sub(&prod);
        }
    }
    MPoly::from_coeffs_in(var, rem)
}

/// Multivariate gcd: dense modular for univariate inputs, heuristic
/// evaluation gcd next, recursive primitive PRS as the certified fallback.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    if a.is_one() || b.is_one() {
        return MPoly::one();
    }
    if a.is_constant() || b.is_constant() {
        let ca = a.content();
        let cb = b.content();
        return MPoly::constant(ca.gcd(&cb));
    }
    if let (Some(va), Some(vb)) = (a.single_var(), b.single_var()) {
        if va == vb {
            return modular::gcd_univariate(a, b, va);
        }
    }
    if let Some(g) = heuristic_gcd(a, b, 0) {
        return normalize_sign(g);
    }
    let var = a.max_var().unwrap_or(0).max(b.max_var().unwrap_or(0));
    if a.degree_in(var) == 0 || b.degree_in(var) == 0 {
        let ca = a.content_in(var);
        let cb = b.content_in(var);
        return gcd(&ca, &cb);
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let c = gcd(&ca, &cb);
    let mut f = a.div_exact(&ca);
    let mut g = b.div_exact(&cb);
    loop {
        if g.is_zero() {
            break;
        }
        if g.degree_in(var) == 0 {
            f = MPoly::one();
            break;
        }
        let r = prem(&f, &g, var);
        f = g;
        g = if r.is_zero() {
            MPoly::zero()
        } else {
            let cr = r.content_in(var);
            r.div_exact(&cr)
        };
    }
    normalize_sign(c.mul(&f))
}

fn normalize_sign(p: MPoly) -> MPoly {
    if p.lead_sign() == Sign::Minus {
        p.neg()
    } else {
        p
    }
}

/// Heuristic gcd by evaluation at a large integer point, digit
/// reconstruction, and a certifying division check. Returns `None` when
/// the heuristic fails to certify.
fn heuristic_gcd(a: &MPoly, b: &MPoly, depth: usize) -> Option<MPoly> {
    if depth > 8 {
        return None;
    }
    if a.is_zero() {
        return Some(b.clone());
    }
    if b.is_zero() {
        return Some(a.clone());
    }
    if a.is_constant() || b.is_constant() {
        return Some(MPoly::constant(a.content().gcd(&b.content())));
    }
    let var = a.max_var().unwrap_or(0).max(b.max_var().unwrap_or(0));
    let max_norm = |p: &MPoly| -> BigInt {
        p.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    };
    let na = max_norm(a);
    let nb = max_norm(b);
    let mut xi: BigInt = BigInt::from(2) * na.min(nb) + BigInt::from(29);
    if xi < BigInt::from(1 << 16) {
        xi = BigInt::from(1 << 16) + BigInt::from(29);
    }
    for _ in 0..6 {
        let av = a.substitute(var, &MPoly::constant(xi.clone()));
        let bv = b.substitute(var, &MPoly::constant(xi.clone()));
        if !av.is_zero() && !bv.is_zero() {
            let sub = match (av.single_var(), bv.single_var()) {
                (Some(x), Some(y)) if x == y => Some(modular::gcd_univariate(&av, &bv, x)),
                _ => heuristic_gcd(&av, &bv, depth + 1),
            };
            if let Some(gv) = sub {
                // rebuild candidate coefficients from balanced base-xi digits
                let mut digits: Vec<MPoly> = Vec::new();
                let mut rest = gv;
                let half = &xi / BigInt::from(2);
                while !rest.is_zero() {
                    let mut digit = MPoly::zero();
                    for (&m, c) in &rest.terms {
                        let mut r = c.mod_floor(&xi);
                        if r > half {
                            r -= &xi;
                        }
                        digit.insert_add(m, r);
                    }
                    digits.push(digit.clone());
                    rest = rest.sub(&digit).div_bigint_exact(&xi);
                }
                let mut cand = MPoly::zero();
                for (k, d) in digits.iter().enumerate() {
                    cand = cand.add(&d.mul(&MPoly::var_pow(var, k as u32)));
                }
                if !cand.is_zero() {
                    let content = cand.content();
                    let cand = cand.div_bigint_exact(&content);
                    if a.try_div_exact(&cand).is_some() && b.try_div_exact(&cand).is_some() {
                        let ic = a.content().gcd(&b.content());
                        return Some(cand.mul_bigint(&ic));
                    }
                }
            }
        }
        xi = &xi * BigInt::from(73) / BigInt::from(32) + BigInt::from(37);
    }
    None
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|i| format!("v{}", i)))
    }
}

/// Dense univariate gcd over Z by modular images + CRT + division check.
mod modular {
    use super::{normalize_sign, MPoly};
    use num::{BigInt, Integer, One, Signed, Zero};

    fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, b, p);
            }
            b = mul_mod(b, b, p);
            e >>= 1;
        }
        acc
    }

    fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n % p == 0 {
                return n == p;
            }
        }
        let mut d = n - 1;
        let mut s = 0;
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = pow_mod(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 0..s - 1 {
                x = mul_mod(x, x, n);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    fn to_dense(p: &MPoly, var: usize) -> Vec<BigInt> {
        let d = p.degree_in(var) as usize;
        let mut out = vec![BigInt::zero(); d + 1];
        for (e, c) in p.terms() {
            let k = e.get(var).copied().unwrap_or(0) as usize;
            out[k] += c;
        }
        out
    }

    fn from_dense(coeffs: &[BigInt], var: usize) -> MPoly {
        let mut p = MPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0u32; var + 1];
                e[var] = k as u32;
                p = p.add(&MPoly::monomial(e, c.clone()));
            }
        }
        p
    }

    fn reduce_mod(coeffs: &[BigInt], p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut out: Vec<u64> = coeffs
            .iter()
            .map(|c| {
                let r = c.mod_floor(&pb);
                let (_, digits) = r.to_u64_digits();
                digits.first().copied().unwrap_or(0)
            })
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        let trim = |v: &mut Vec<u64>| {
            while v.last() == Some(&0) {
                v.pop();
            }
        };
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let lb_inv = inv_mod(*b.last().unwrap(), p);
            while a.len() >= b.len() && !a.is_empty() {
                let shift = a.len() - b.len();
                let f = mul_mod(*a.last().unwrap(), lb_inv, p);
                if f != 0 {
                    for (i, &bc) in b.iter().enumerate() {
                        let sub = mul_mod(f, bc, p);
                        let idx = i + shift;
                        a[idx] = (a[idx] + p - sub) % p;
                    }
                }
                trim(&mut a);
                if a.len() < b.len() {
                    break;
                }
            }
            std::mem::swap(&mut a, &mut b);
            trim(&mut b);
        }
        if let Some(&lc) = a.last() {
            let inv = inv_mod(lc, p);
            for c in a.iter_mut() {
                *c = mul_mod(*c, inv, p);
            }
        }
        a
    }

    fn divides(candidate: &[BigInt], target: &[BigInt]) -> bool {
        if candidate.len() == 1 {
            return true;
        }
        let mut rem = target.to_vec();
        let lc = candidate.last().unwrap();
        while rem.len() >= candidate.len() {
            while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() < candidate.len() {
                break;
            }
            let (quo, r) = rem.last().unwrap().div_rem(lc);
            if !r.is_zero() {
                return false;
            }
            let shift = rem.len() - candidate.len();
            for (i, c) in candidate.iter().enumerate() {
                let sub = &quo * c;
                rem[i + shift] -= sub;
            }
            rem.pop();
        }
        rem.iter().all(|c| c.is_zero())
    }

    fn content(v: &[BigInt]) -> BigInt {
        let mut g = BigInt::zero();
        for c in v {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn gcd_univariate(a: &MPoly, b: &MPoly, var: usize) -> MPoly {
        let da = to_dense(a, var);
        let db = to_dense(b, var);
        let ca = content(&da);
        let cb = content(&db);
        let gc = ca.gcd(&cb);
        let pa: Vec<BigInt> = da.iter().map(|c| c / &ca).collect();
        let pb: Vec<BigInt> = db.iter().map(|c| c / &cb).collect();
        let gamma = pa.last().unwrap().gcd(pb.last().unwrap());

        let mut prime: u64 = (1 << 62) - 1;
        let mut modulus = BigInt::one();
        let mut images: Vec<BigInt> = Vec::new();
        let mut best_deg = usize::MAX;
        loop {
            prime += 2;
            while !is_prime(prime) {
                prime += 2;
            }
            let pb_big = BigInt::from(prime);
            if (pa.last().unwrap() % &pb_big).is_zero() || (pb.last().unwrap() % &pb_big).is_zero()
            {
                continue;
            }
            let ga = reduce_mod(&pa, prime);
            let gb = reduce_mod(&pb, prime);
            let mut g = gcd_mod(ga, gb, prime);
            if g.len() == 1 {
                return normalize_sign(MPoly::constant(gc));
            }
            let deg = g.len() - 1;
            if deg > best_deg {
                continue; // unlucky prime
            }
            let gm = {
                let r = gamma.mod_floor(&pb_big);
                let (_, d) = r.to_u64_digits();
                d.first().copied().unwrap_or(0)
            };
            for c in g.iter_mut() {
                *c = mul_mod(*c, gm, prime);
            }
            if deg < best_deg {
                best_deg = deg;
                modulus = pb_big.clone();
                images = g.iter().map(|&c| BigInt::from(c)).collect();
            } else {
                let inv = {
                    let r = modulus.mod_floor(&pb_big);
                    let (_, d) = r.to_u64_digits();
                    inv_mod(d.first().copied().unwrap_or(0), prime)
                };
                for (acc, &gi) in images.iter_mut().zip(g.iter()) {
                    let cur = acc.mod_floor(&pb_big);
                    let (_, d) = cur.to_u64_digits();
                    let cur64 = d.first().copied().unwrap_or(0);
                    let diff = (gi + prime - cur64) % prime;
                    let t = mul_mod(diff, inv, prime);
                    if t != 0 {
                        *acc += &modulus * BigInt::from(t);
                    }
                }
                modulus *= &pb_big;
            }
            // try the balanced lift after every round; the division check
            // certifies the result, so an early hit is simply a fast exit
            let half = &modulus / BigInt::from(2);
            let lifted: Vec<BigInt> = images
                .iter()
                .map(|c| if c > &half { c - &modulus } else { c.clone() })
                .collect();
            let cl = content(&lifted);
            if !cl.is_zero() {
                let prim: Vec<BigInt> = lifted.iter().map(|c| c / &cl).collect();
                if divides(&prim, &pa) && divides(&prim, &pb) {
                    let g = from_dense(&prim, var).mul_bigint(&gc);
                    return normalize_sign(g);
                }
            }
        }
    }
}
