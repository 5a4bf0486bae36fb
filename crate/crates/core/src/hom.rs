//! Morphism complexes between twisted complexes and their cohomology ranks.

use std::collections::{BTreeMap, HashMap};

use crate::category::BasisId;
use crate::complex::{ComplexMap, TwistedComplex};
use crate::error::Result;
use crate::field::Field;
use crate::matrix::{EchelonSpan, Matrix};
use crate::category::Morphism;

/// Coordinate of a hom-complex basis vector: basis morphism `basis` from
/// source summand `from` to target summand `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomCoord {
    pub from: usize,
    pub to: usize,
    pub basis: BasisId,
}

#[derive(Clone, Debug)]
pub struct HomComplex<F: Field> {
    source: TwistedComplex<F>,
    target: TwistedComplex<F>,
    components: BTreeMap<i64, Vec<HomCoord>>,
    index: HashMap<HomCoord, usize>,
}

impl<F: Field> HomComplex<F> {
    pub fn new(source: &TwistedComplex<F>, target: &TwistedComplex<F>) -> Result<Self> {
        source.same_category(target)?;
        let cat = source.category();
        let mut components: BTreeMap<i64, Vec<HomCoord>> = BTreeMap::new();
        for (a, sa) in source.summands().iter().enumerate() {
            for (b, sb) in target.summands().iter().enumerate() {
                for basis in cat.morphism_space(sa.vertex, sb.vertex) {
                    let d = cat.element(basis).degree;
                    let total = d - sa.position + sb.position;
                    components.entry(total).or_default().push(HomCoord { from: a, to: b, basis });
                }
            }
        }
        let mut index = HashMap::new();
        for coords in components.values_mut() {
            coords.sort();
            for (i, c) in coords.iter().enumerate() {
                index.insert(*c, i);
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), components, index })
    }

    pub fn source(&self) -> &TwistedComplex<F> {
        &self.source
    }

    pub fn target(&self) -> &TwistedComplex<F> {
        &self.target
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.components.keys().copied()
    }

    pub fn coords(&self, degree: i64) -> &[HomCoord] {
        self.components.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.coords(degree).len()
    }

    pub fn to_map(&self, degree: i64, v: &[F::Elem]) -> ComplexMap<F> {
        let field = self.source.field();
        let mut out = ComplexMap::zero(degree, self.source.len(), self.target.len());
        for (c, x) in self.coords(degree).iter().zip(v) {
            if field.is_zero(x) {
                continue;
            }
            let cur = out.get(c.from, c.to).add(field, &Morphism::basis(field, c.basis, x.clone()));
            out.set(c.from, c.to, cur);
        }
        out
    }

    pub fn from_map(&self, f: &ComplexMap<F>) -> Vec<F::Elem> {
        let field = self.source.field();
        let mut v = vec![field.zero(); self.dim(f.degree)];
        for a in 0..f.rows {
            for b in 0..f.cols {
                for (basis, x) in f.get(a, b).terms() {
                    let c = HomCoord { from: a, to: b, basis: *basis };
                    let i = *self.index.get(&c).expect("map entry outside the hom complex");
                    debug_assert_eq!(self.coords(f.degree)[i], c);
                    v[i] = x.clone();
                }
            }
        }
        v
    }

    /// Matrix of `D: hom^degree -> hom^{degree+1}`.
    pub fn differential(&self, degree: i64) -> Matrix<F> {
        let field = self.source.field();
        let cat = self.source.category();
        let rows = self.dim(degree + 1);
        let cols = self.dim(degree);
        let mut m = Matrix::zeros(field, rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        // D(φ) = δ_t ∘ φ − (−1)^{|φ|} φ ∘ δ_s
        let right_sign = if degree.rem_euclid(2) == 0 { field.neg(&field.one()) } else { field.one() };
        let targets = self.coords(degree + 1);
        let row_of = |c: HomCoord| {
            let i = self.index[&c];
            debug_assert_eq!(targets[i], c);
            i
        };
        for (j, c) in self.coords(degree).iter().enumerate() {
            for b2 in 0..self.target.len() {
                let d = self.target.entry(c.to, b2);
                for (bd, xd) in d.terms() {
                    if let Some(h) = cat.compose_basis(*bd, c.basis) {
                        m.add_at(row_of(HomCoord { from: c.from, to: b2, basis: h }), j, xd);
                    }
                }
            }
            for a0 in 0..self.source.len() {
                let d = self.source.entry(a0, c.from);
                for (bd, xd) in d.terms() {
                    if let Some(h) = cat.compose_basis(c.basis, *bd) {
                        let x = field.mul(xd, &right_sign);
                        m.add_at(row_of(HomCoord { from: a0, to: c.to, basis: h }), j, &x);
                    }
                }
            }
        }
        m
    }

    pub fn cocycles(&self, degree: i64) -> Vec<Vec<F::Elem>> {
        self.differential(degree).kernel_basis()
    }

    /// Cocycles whose classes form a basis of cohomology in `degree`: kernel
    /// basis vectors kept in echelon order when independent of the boundaries
    /// and of the vectors kept before them.
    pub fn cohomology_representatives(&self, degree: i64) -> Vec<Vec<F::Elem>> {
        let field = self.source.field();
        let mut span = EchelonSpan::new(field);
        let boundary = self.differential(degree - 1);
        for j in 0..boundary.cols() {
            span.insert(&boundary.column(j));
        }
        self.cocycles(degree).into_iter().filter(|z| span.insert(z)).collect()
    }

    pub fn cohomology_rank(&self, degree: i64) -> usize {
        let dim = self.dim(degree);
        if dim == 0 {
            return 0;
        }
        dim - self.differential(degree).rank() - self.differential(degree - 1).rank()
    }

    /// Nonzero cohomology ranks by total degree.
    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for d in self.degrees() {
            let r = self.cohomology_rank(d);
            if r > 0 {
                out.insert(d, r);
            }
        }
        out
    }
}

pub fn hf_ranks<F: Field>(c: &TwistedComplex<F>, d: &TwistedComplex<F>) -> Result<BTreeMap<i64, usize>> {
    Ok(HomComplex::new(c, d)?.ranks())
}

pub fn total_rank(ranks: &BTreeMap<i64, usize>) -> usize {
    ranks.values().sum()
}

/// Alternating sum of ranks.
pub fn euler_characteristic(ranks: &BTreeMap<i64, usize>) -> i64 {
    ranks.iter().map(|(d, r)| if d.rem_euclid(2) == 0 { *r as i64 } else { -(*r as i64) }).sum()
}
