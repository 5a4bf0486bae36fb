//! Sound but incomplete quasi-isomorphism test between twisted complexes.

use serde::{Deserialize, Serialize};

use crate::complex::TwistedComplex;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom::HomComplex;
use crate::matrix::{generic_invertible, AffineFamily, Matrix};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub(crate) fn require_valid<F: Field>(c: &TwistedComplex<F>) -> Result<()> {
    let v = c.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidComplex(v))
    }
}

pub fn equivalent<F: Field>(c: &TwistedComplex<F>, d: &TwistedComplex<F>) -> Result<Verdict> {
    equivalent_seeded(c, d, DEFAULT_SEED)
}

/// Minimal complexes with different summand multisets are never equivalent:
/// identity components of a quasi-isomorphism between minimal complexes must
/// form an invertible matrix. With equal multisets, closed degree-zero maps are
/// searched for one whose identity part is invertible, and the candidate is
/// confirmed by checking that its cone is contractible.
pub fn equivalent_seeded<F: Field>(c: &TwistedComplex<F>, d: &TwistedComplex<F>, seed: u64) -> Result<Verdict> {
    c.same_category(d)?;
    require_valid(c)?;
    require_valid(d)?;
    let (c, d) = (c.minimize(), d.minimize());
    if c.summand_multiset() != d.summand_multiset() {
        return Ok(Verdict::No);
    }
    if c.is_empty() {
        return Ok(Verdict::Yes);
    }
    let field = c.field().clone();
    let cat = c.category().clone();
    let hom = HomComplex::new(&c, &d)?;
    let cocycles = hom.cocycles(0);
    let m = c.len();
    let unit_part = |z: &[F::Elem]| {
        let mut mat = Matrix::zeros(&field, m, m);
        for (coord, x) in hom.coords(0).iter().zip(z) {
            if cat.element(coord.basis).degree == 0 {
                mat.add_at(coord.from, coord.to, x);
            }
        }
        mat
    };
    let family = AffineFamily::new(Matrix::zeros(&field, m, m), cocycles.iter().map(|z| unit_part(z)).collect());
    let Some(found) = generic_invertible(&family, seed) else {
        return Ok(Verdict::Inconclusive);
    };
    let mut phi = vec![field.zero(); hom.dim(0)];
    for (z, k) in cocycles.iter().zip(&found.coefficients) {
        for (acc, x) in phi.iter_mut().zip(z) {
            *acc = field.add(acc, &field.mul(k, x));
        }
    }
    let map = hom.to_map(0, &phi);
    let cone = c.cone(&d, &map)?;
    Ok(if cone.minimize().is_empty() { Verdict::Yes } else { Verdict::Inconclusive })
}
