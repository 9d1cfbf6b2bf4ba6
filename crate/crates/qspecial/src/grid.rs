//! Small exact polynomial carriers in two or three variables for the PDE
//! residual checks.

use qcore::QRat;
use qseries::XSeries;
use std::collections::BTreeMap;

/// Sparse polynomial in two variables with integer (possibly negative)
/// exponents in the second slot; used for the heat/Hermite check where
/// the second variable is `w = sqrt(t)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BiPoly {
    pub terms: BTreeMap<(i64, i64), QRat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn set(&mut self, k: (i64, i64), c: QRat) {
        if c.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, c);
        }
    }

    pub fn add_assign_at(&mut self, k: (i64, i64), c: &QRat) {
        let cur = self.terms.get(&k).cloned().unwrap_or_else(QRat::zero);
        self.set(k, &cur + c);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_assign_at(*k, &(-c));
        }
        out
    }

    /// Map each monomial `(i, j)` through an exact monomial action.
    pub fn map_monomials(&self, f: &dyn Fn(i64, i64) -> Option<((i64, i64), QRat)>) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            if let Some((k, factor)) = f(i, j) {
                if !factor.is_zero() {
                    out.add_assign_at(k, &(&factor * c));
                }
            }
        }
        out
    }

    /// Outer product of two univariate series (exact, no truncation).
    pub fn outer(a: &XSeries, b: &XSeries) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&i, ca) in a.degrees() {
            for (&j, cb) in b.degrees() {
                out.add_assign_at((i, j), &(ca * cb));
            }
        }
        out
    }
}

/// Same for three variables (the wave check).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TriPoly {
    pub terms: BTreeMap<(i64, i64, i64), QRat>,
}

impl TriPoly {
    pub fn zero() -> Self {
        TriPoly::default()
    }

    pub fn add_assign_at(&mut self, k: (i64, i64, i64), c: &QRat) {
        let cur = self.terms.get(&k).cloned().unwrap_or_else(QRat::zero);
        let newc = &cur + c;
        if newc.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, newc);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_assign_at(*k, &(-c));
        }
        out
    }

    pub fn map_monomials(
        &self,
        f: &dyn Fn(i64, i64, i64) -> Option<((i64, i64, i64), QRat)>,
    ) -> TriPoly {
        let mut out = TriPoly::zero();
        for (&(i, j, k), c) in &self.terms {
            if let Some((key, factor)) = f(i, j, k) {
                if !factor.is_zero() {
                    out.add_assign_at(key, &(&factor * c));
                }
            }
        }
        out
    }

    pub fn outer3(a: &XSeries, b: &XSeries, c: &XSeries) -> TriPoly {
        let mut out = TriPoly::zero();
        for (&i, ca) in a.degrees() {
            for (&j, cb) in b.degrees() {
                for (&k, cc) in c.degrees() {
                    out.add_assign_at((i, j, k), &(&(ca * cb) * cc));
                }
            }
        }
        out
    }
}
