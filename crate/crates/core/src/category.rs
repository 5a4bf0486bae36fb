//! The graded linear category on two objects Q0, Q1 with strict units, a
//! binary composition table, and vanishing higher products.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};

pub type Vertex = u8;
pub type BasisId = usize;

pub const E0: BasisId = 0;
pub const E1: BasisId = 1;
pub const P: BasisId = 2;
pub const Q: BasisId = 3;
pub const F0: BasisId = 4;
pub const F1: BasisId = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Unit,
    Fundamental,
    P,
    Q,
    /// A class of degree `0 < degree < n` in the cohomology of a non-spherical Q0.
    Intermediate { degree: i64, index: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub kind: BasisKind,
    pub name: String,
    pub source: Vertex,
    pub target: Vertex,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryParams {
    pub n: i64,
    /// Betti vector `(b^0, ..., b^n)` of Q0; `None` is the homology sphere.
    pub betti0: Option<Vec<u32>>,
    pub field: FieldSpec,
}

impl CategoryParams {
    pub fn sphere(n: i64, field: FieldSpec) -> Self {
        Self { n, betti0: None, field }
    }

    pub fn is_spherical(&self) -> bool {
        match &self.betti0 {
            None => true,
            Some(b) => b.iter().skip(1).take(b.len().saturating_sub(2)).all(|&x| x == 0),
        }
    }
}

pub fn validate_params(params: &CategoryParams) -> Result<()> {
    let n = params.n;
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "n = {n}: higher products not guaranteed to vanish (need n >= 3)"
        )));
    }
    params.field.validate().map_err(|e| Error::InvalidParams(e.to_string()))?;
    if let Some(b) = &params.betti0 {
        if b.len() as i64 != n + 1 {
            return Err(Error::InvalidParams(format!(
                "betti vector has {} entries, expected n + 1 = {}",
                b.len(),
                n + 1
            )));
        }
        if b[0] != 1 || b[n as usize] != 1 {
            return Err(Error::InvalidParams(format!(
                "betti vector must have b^0 = b^n = 1, got b^0 = {}, b^n = {}",
                b[0], b[n as usize]
            )));
        }
        for d in 1..n as usize {
            if b[d] != b[n as usize - d] {
                return Err(Error::InvalidParams(format!(
                    "betti vector violates Poincare duality: b^{d} = {} but b^{} = {}",
                    b[d],
                    n as usize - d,
                    b[n as usize - d]
                )));
            }
        }
    }
    Ok(())
}

/// Finite linear combination of basis morphisms, sorted by basis id, no zero terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism<F: Field> {
    terms: Vec<(BasisId, F::Elem)>,
}

impl<F: Field> Default for Morphism<F> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<F: Field> Morphism<F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(field: &F, id: BasisId, coeff: F::Elem) -> Self {
        if field.is_zero(&coeff) {
            Self::zero()
        } else {
            Self { terms: vec![(id, coeff)] }
        }
    }

    pub fn from_terms(field: &F, mut terms: Vec<(BasisId, F::Elem)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(BasisId, F::Elem)> = Vec::with_capacity(terms.len());
        for (id, c) in terms {
            match out.last_mut() {
                Some((last, acc)) if *last == id => *acc = field.add(acc, &c),
                _ => out.push((id, c)),
            }
        }
        out.retain(|(_, c)| !field.is_zero(c));
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(BasisId, F::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, id: BasisId) -> Option<&F::Elem> {
        self.terms.iter().find(|t| t.0 == id).map(|t| &t.1)
    }

    pub fn add(&self, field: &F, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        Self::from_terms(field, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        if field.is_zero(c) {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(id, x)| (*id, field.mul(x, c))).collect() }
    }

    pub fn neg(&self, field: &F) -> Self {
        Self { terms: self.terms.iter().map(|(id, x)| (*id, field.neg(x))).collect() }
    }
}

/// The category itself: basis, slot index and composition table.
#[derive(Debug)]
pub struct Category<F: Field> {
    field: F,
    params: CategoryParams,
    basis: Vec<BasisElement>,
    by_name: HashMap<String, BasisId>,
    slots: HashMap<(Vertex, Vertex, i64), Vec<BasisId>>,
    // table[g][f] = Some(h) iff g∘f = h; every nonzero product has coefficient 1
    table: Vec<Vec<Option<BasisId>>>,
}

impl<F: Field> Category<F> {
    pub fn new(field: F, params: CategoryParams) -> Result<Self> {
        validate_params(&params)?;
        if field.characteristic() != params.field.characteristic {
            return Err(Error::InvalidParams(format!(
                "field of characteristic {} does not match parameters ({})",
                field.characteristic(),
                params.field.characteristic
            )));
        }
        let n = params.n;
        let el = |kind, name: &str, source, target, degree| BasisElement {
            kind,
            name: name.to_string(),
            source,
            target,
            degree,
        };
        let mut basis = vec![
            el(BasisKind::Unit, "e0", 0, 0, 0),
            el(BasisKind::Unit, "e1", 1, 1, 0),
            el(BasisKind::P, "p", 0, 1, 1),
            el(BasisKind::Q, "q", 1, 0, n - 1),
            el(BasisKind::Fundamental, "f0", 0, 0, n),
            el(BasisKind::Fundamental, "f1", 1, 1, n),
        ];
        if let Some(b) = &params.betti0 {
            for d in 1..n {
                let mult = b[d as usize];
                for k in 0..mult {
                    let name = if mult == 1 { format!("x{d}") } else { format!("x{d}.{}", k + 1) };
                    basis.push(el(BasisKind::Intermediate { degree: d, index: k }, &name, 0, 0, d));
                }
            }
        }

        let m = basis.len();
        let mut table = vec![vec![None; m]; m];
        for g in 0..m {
            for f in 0..m {
                let (bg, bf) = (&basis[g], &basis[f]);
                if bf.target != bg.source {
                    continue;
                }
                table[g][f] = match (bg.kind, bf.kind) {
                    (BasisKind::Unit, _) => Some(f),
                    (_, BasisKind::Unit) => Some(g),
                    (BasisKind::Q, BasisKind::P) => Some(F0),
                    (BasisKind::P, BasisKind::Q) => Some(F1),
                    (
                        BasisKind::Intermediate { degree: dg, index: kg },
                        BasisKind::Intermediate { degree: df, index: kf },
                    ) if dg + df == n && kg == kf => Some(F0),
                    _ => None,
                };
            }
        }

        let mut slots: HashMap<(Vertex, Vertex, i64), Vec<BasisId>> = HashMap::new();
        let mut by_name = HashMap::new();
        for (id, b) in basis.iter().enumerate() {
            slots.entry((b.source, b.target, b.degree)).or_default().push(id);
            by_name.insert(b.name.clone(), id);
        }
        Ok(Self { field, params, basis, by_name, slots, table })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn params(&self) -> &CategoryParams {
        &self.params
    }

    pub fn n(&self) -> i64 {
        self.params.n
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, id: BasisId) -> &BasisElement {
        &self.basis[id]
    }

    pub fn lookup(&self, name: &str) -> Option<BasisId> {
        self.by_name.get(name).copied()
    }

    /// Basis elements `i -> j`, ordered by degree then id.
    pub fn morphism_space(&self, i: Vertex, j: Vertex) -> Vec<BasisId> {
        let mut ids: Vec<BasisId> =
            (0..self.basis.len()).filter(|&b| self.basis[b].source == i && self.basis[b].target == j).collect();
        ids.sort_by_key(|&b| (self.basis[b].degree, b));
        ids
    }

    /// Basis elements `i -> j` of internal degree `d`.
    pub fn slot(&self, i: Vertex, j: Vertex, d: i64) -> &[BasisId] {
        self.slots.get(&(i, j, d)).map_or(&[], |v| v.as_slice())
    }

    pub fn unit(&self, v: Vertex) -> BasisId {
        if v == 0 { E0 } else { E1 }
    }

    pub fn fundamental(&self, v: Vertex) -> BasisId {
        if v == 0 { F0 } else { F1 }
    }

    pub fn compose_basis(&self, g: BasisId, f: BasisId) -> Option<BasisId> {
        self.table[g][f]
    }

    /// `g ∘ f`, bilinear; assumes composability (zero for non-composable pairs).
    pub fn compose(&self, g: &Morphism<F>, f: &Morphism<F>) -> Morphism<F> {
        if g.is_zero() || f.is_zero() {
            return Morphism::zero();
        }
        let field = &self.field;
        let mut terms = Vec::new();
        for (bg, cg) in g.terms() {
            for (bf, cf) in f.terms() {
                if let Some(h) = self.table[*bg][*bf] {
                    terms.push((h, field.mul(cg, cf)));
                }
            }
        }
        Morphism::from_terms(field, terms)
    }

    pub fn compose_checked(&self, g: &Morphism<F>, f: &Morphism<F>) -> Result<Morphism<F>> {
        for (bg, _) in g.terms() {
            for (bf, _) in f.terms() {
                if self.basis[*bf].target != self.basis[*bg].source {
                    return Err(Error::NotComposable {
                        g: self.basis[*bg].name.clone(),
                        f: self.basis[*bf].name.clone(),
                    });
                }
            }
        }
        Ok(self.compose(g, f))
    }

    pub fn render(&self, m: &Morphism<F>) -> String {
        if m.is_zero() {
            return "0".into();
        }
        m.terms()
            .iter()
            .map(|(b, c)| {
                let name = &self.basis[*b].name;
                if self.field.is_one(c) {
                    name.clone()
                } else {
                    format!("{}*{}", self.field.render(c), name)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {} [{}]", self.name, self.source, self.target, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn sphere(n: i64) -> Category<Rationals> {
        Category::new(Rationals, CategoryParams::sphere(n, FieldSpec::rationals())).unwrap()
    }

    fn names<F: Field>(c: &Category<F>, ids: &[BasisId]) -> Vec<(String, i64)> {
        ids.iter().map(|&b| (c.element(b).name.clone(), c.element(b).degree)).collect()
    }

    #[test]
    fn morphism_spaces() {
        let c = sphere(4);
        assert_eq!(names(&c, &c.morphism_space(0, 1)), vec![("p".into(), 1)]);
        assert_eq!(names(&c, &c.morphism_space(0, 0)), vec![("e0".into(), 0), ("f0".into(), 4)]);
        assert_eq!(names(&c, &c.morphism_space(1, 0)), vec![("q".into(), 3)]);
    }

    #[test]
    fn composition_examples() {
        let c = sphere(3);
        let k = c.field();
        let m = |id| Morphism::basis(k, id, k.one());
        assert_eq!(c.compose(&m(P), &m(E0)), m(P));
        assert_eq!(c.compose(&m(Q), &m(P)), m(F0));
        assert_eq!(c.compose(&m(P), &m(Q)), m(F1));
        assert!(c.compose(&m(F0), &m(F0)).is_zero());
        assert!(c.compose_checked(&m(P), &m(P)).is_err());
    }

    #[test]
    fn params_validation() {
        let f2 = FieldSpec::new(2);
        assert!(validate_params(&CategoryParams::sphere(4, f2)).is_ok());
        let err = validate_params(&CategoryParams::sphere(2, f2)).unwrap_err();
        assert!(err.to_string().contains("higher products not guaranteed to vanish"));
        let p = CategoryParams { n: 4, betti0: Some(vec![1, 0, 2, 0, 1]), field: f2 };
        assert!(validate_params(&p).is_ok());
        let bad = CategoryParams { n: 4, betti0: Some(vec![2, 0, 0, 0, 1]), field: f2 };
        assert!(validate_params(&bad).is_err());
        assert!(validate_params(&CategoryParams::sphere(4, FieldSpec::new(9))).is_err());
    }

    fn all_categories() -> Vec<Category<PrimeField>> {
        let f = PrimeField::new(7).unwrap();
        let spec = FieldSpec::new(7);
        let mut out = Vec::new();
        for n in 3..=6 {
            out.push(Category::new(f, CategoryParams::sphere(n, spec)).unwrap());
        }
        out.push(Category::new(f, CategoryParams { n: 4, betti0: Some(vec![1, 0, 2, 0, 1]), field: spec }).unwrap());
        out.push(Category::new(f, CategoryParams { n: 6, betti0: Some(vec![1, 1, 0, 2, 0, 1, 1]), field: spec }).unwrap());
        out
    }

    #[test]
    fn unit_laws_and_degrees() {
        for c in all_categories() {
            for (f, bf) in c.basis().iter().enumerate() {
                assert_eq!(c.compose_basis(c.unit(bf.target), f), Some(f));
                assert_eq!(c.compose_basis(f, c.unit(bf.source)), Some(f));
                assert!((0..=c.n()).contains(&bf.degree));
            }
        }
    }

    #[test]
    fn associativity_and_degree_additivity() {
        for c in all_categories() {
            let m = c.basis().len();
            for g in 0..m {
                for f in 0..m {
                    if let Some(h) = c.compose_basis(g, f) {
                        assert_eq!(c.element(h).degree, c.element(g).degree + c.element(f).degree);
                        assert_eq!(c.element(h).source, c.element(f).source);
                        assert_eq!(c.element(h).target, c.element(g).target);
                    }
                    for e in 0..m {
                        if c.element(e).target != c.element(f).source
                            || c.element(f).target != c.element(g).source
                        {
                            continue;
                        }
                        let left = c.compose_basis(g, f).and_then(|gf| c.compose_basis(gf, e));
                        let right = c.compose_basis(f, e).and_then(|fe| c.compose_basis(g, fe));
                        assert_eq!(left, right, "({g} {f}) {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn intermediate_classes_pair_into_top() {
        let f = PrimeField::new(7).unwrap();
        let c = Category::new(f, CategoryParams { n: 4, betti0: Some(vec![1, 0, 2, 0, 1]), field: FieldSpec::new(7) })
            .unwrap();
        let a = c.lookup("x2.1").unwrap();
        let b = c.lookup("x2.2").unwrap();
        assert_eq!(c.compose_basis(a, a), Some(F0));
        assert_eq!(c.compose_basis(a, b), None);
        assert_eq!(c.compose_basis(P, a), None);
        assert_eq!(c.compose_basis(a, Q), None);
    }
}
