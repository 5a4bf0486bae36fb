//! Twisted complexes over the two-object category: ordered shifted cores with a
//! degree-one strictly triangular differential whose square vanishes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{BasisKind, Category, Morphism, Vertex};
use crate::error::{Error, Result};
use crate::field::Field;

/// `Q_vertex[-position]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub vertex: Vertex,
    pub position: i64,
}

impl Summand {
    pub fn new(vertex: Vertex, position: i64) -> Self {
        Self { vertex, position }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = if self.vertex == 0 { 'U' } else { 'V' };
        write!(f, "{row}_{}", self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A basis element whose endpoints do not match the summand vertices.
    VertexMismatch { from: usize, to: usize, basis: String },
    DegreeMismatch { from: usize, to: usize, basis: String, expected: i64, found: i64 },
    NotTriangular { from: usize, to: usize },
    /// Nonzero entry of the square of the differential.
    MaurerCartan { from: usize, to: usize, slot: String, value: String },
    CurvedArrowReach { from: usize, to: usize, position: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexMismatch { from, to, basis } => {
                write!(f, "entry {from}->{to}: {basis} has the wrong source or target")
            }
            Violation::DegreeMismatch { from, to, basis, expected, found } => write!(
                f,
                "entry {from}->{to}: {basis} has internal degree {found}, slot requires {expected}"
            ),
            Violation::NotTriangular { from, to } => {
                write!(f, "entry {from}->{to} points backwards in the summand order")
            }
            Violation::MaurerCartan { from, to, slot, value } => {
                write!(f, "Maurer-Cartan violation in slot ({slot}) [{from}->{to}]: {value}")
            }
            Violation::CurvedArrowReach { from, to, position } => write!(
                f,
                "entry {from}->{to}: fundamental-class arrow leaves position {position}, too close to the bottom"
            ),
        }
    }
}

pub fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug)]
pub struct TwistedComplex<F: Field> {
    cat: Arc<Category<F>>,
    summands: Vec<Summand>,
    // row-major m x m; entry a*m + b is the arrow a -> b
    delta: Vec<Morphism<F>>,
}

impl<F: Field> PartialEq for TwistedComplex<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cat.params() == other.cat.params()
            && self.summands == other.summands
            && self.delta == other.delta
    }
}

/// Morphism of twisted complexes as a matrix of basis combinations, entry
/// `(a, b)` going from source summand `a` to target summand `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMap<F: Field> {
    pub degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Morphism<F>>,
}

impl<F: Field> ComplexMap<F> {
    pub fn zero(degree: i64, rows: usize, cols: usize) -> Self {
        Self { degree, rows, cols, entries: vec![Morphism::zero(); rows * cols] }
    }

    pub fn get(&self, a: usize, b: usize) -> &Morphism<F> {
        &self.entries[a * self.cols + b]
    }

    pub fn set(&mut self, a: usize, b: usize, m: Morphism<F>) {
        self.entries[a * self.cols + b] = m;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|m| m.is_zero())
    }
}

impl<F: Field> TwistedComplex<F> {
    pub fn empty(cat: &Arc<Category<F>>) -> Self {
        Self { cat: cat.clone(), summands: Vec::new(), delta: Vec::new() }
    }

    /// `Q_vertex` placed at `position`.
    pub fn core(cat: &Arc<Category<F>>, vertex: Vertex, position: i64) -> Self {
        Self::from_parts(cat, vec![Summand::new(vertex, position)], Vec::new())
    }

    /// Builds without validation; entries are `(from, to, morphism)` and accumulate.
    pub fn from_parts(cat: &Arc<Category<F>>, summands: Vec<Summand>, entries: Vec<(usize, usize, Morphism<F>)>) -> Self {
        let m = summands.len();
        let mut c = Self { cat: cat.clone(), summands, delta: vec![Morphism::zero(); m * m] };
        for (a, b, mor) in entries {
            let cur = c.entry(a, b).add(cat.field(), &mor);
            c.set_entry(a, b, cur);
        }
        c
    }

    pub fn validated(cat: &Arc<Category<F>>, summands: Vec<Summand>, entries: Vec<(usize, usize, Morphism<F>)>) -> Result<Self> {
        let c = Self::from_parts(cat, summands, entries);
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidComplex(v))
        }
    }

    pub fn category(&self) -> &Arc<Category<F>> {
        &self.cat
    }

    pub fn field(&self) -> &F {
        self.cat.field()
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn entry(&self, a: usize, b: usize) -> &Morphism<F> {
        &self.delta[a * self.len() + b]
    }

    pub fn set_entry(&mut self, a: usize, b: usize, m: Morphism<F>) {
        let k = a * self.len() + b;
        self.delta[k] = m;
    }

    /// Nonzero differential entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Morphism<F>)> + '_ {
        let m = self.len();
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (k / m, k % m, x))
    }

    /// Internal degree a basis element must have to sit in the slot `a -> b`
    /// of a map of total degree `total`.
    pub fn slot_degree(total: i64, from: &Summand, to: &Summand) -> i64 {
        total + from.position - to.position
    }

    pub fn same_category(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.cat, &other.cat) || self.cat.params() == other.cat.params() {
            Ok(())
        } else {
            Err(Error::CategoryMismatch)
        }
    }

    /// `delta ∘ delta`, as the matrix `(a, c) -> Σ_b δ_bc ∘ δ_ab`.
    pub fn delta_squared(&self) -> Vec<Morphism<F>> {
        let m = self.len();
        let field = self.field();
        let mut out = vec![Morphism::zero(); m * m];
        for a in 0..m {
            for b in 0..m {
                let ab = self.entry(a, b);
                if ab.is_zero() {
                    continue;
                }
                for c in 0..m {
                    let bc = self.entry(b, c);
                    if bc.is_zero() {
                        continue;
                    }
                    let prod = self.cat.compose(bc, ab);
                    if !prod.is_zero() {
                        out[a * m + c] = out[a * m + c].add(field, &prod);
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Vec<Violation> {
        let cat = &self.cat;
        let n = cat.n();
        let mut out = Vec::new();
        let min_pos = self.summands.iter().map(|s| s.position).min().unwrap_or(0);
        for (a, b, mor) in self.entries() {
            let (sa, sb) = (self.summands[a], self.summands[b]);
            let expected = Self::slot_degree(1, &sa, &sb);
            for (id, _) in mor.terms() {
                let el = cat.element(*id);
                if el.source != sa.vertex || el.target != sb.vertex {
                    out.push(Violation::VertexMismatch { from: a, to: b, basis: el.name.clone() });
                } else if el.degree != expected {
                    out.push(Violation::DegreeMismatch {
                        from: a,
                        to: b,
                        basis: el.name.clone(),
                        expected,
                        found: el.degree,
                    });
                }
                if el.kind == BasisKind::Fundamental && sa.position < min_pos + n - 1 {
                    out.push(Violation::CurvedArrowReach { from: a, to: b, position: sa.position });
                }
            }
            if a >= b {
                out.push(Violation::NotTriangular { from: a, to: b });
            }
        }
        let m = self.len();
        for (k, sq) in self.delta_squared().iter().enumerate() {
            if !sq.is_zero() {
                let (a, c) = (k / m, k % m);
                out.push(Violation::MaurerCartan {
                    from: a,
                    to: c,
                    slot: format!("{} -> {}", self.summands[a], self.summands[c]),
                    value: cat.render(sq),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `c[k]`: positions decrease by `k`, differential picks up `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let field = self.field();
        let summands = self.summands.iter().map(|s| Summand::new(s.vertex, s.position - k)).collect();
        let delta = if k.rem_euclid(2) == 0 {
            self.delta.clone()
        } else {
            self.delta.iter().map(|x| x.neg(field)).collect()
        };
        Self { cat: self.cat.clone(), summands, delta }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_category(other)?;
        let (m1, m2) = (self.len(), other.len());
        let mut summands = self.summands.clone();
        summands.extend_from_slice(&other.summands);
        let mut entries: Vec<_> = self.entries().map(|(a, b, x)| (a, b, x.clone())).collect();
        entries.extend(other.entries().map(|(a, b, x)| (a + m1, b + m1, x.clone())));
        let out = Self::from_parts(&self.cat, summands, entries);
        debug_assert_eq!(out.len(), m1 + m2);
        Ok(out)
    }

    /// Direct sum of a list of complexes (the zero object for an empty list).
    pub fn sum_all(cat: &Arc<Category<F>>, parts: &[Self]) -> Result<Self> {
        parts.iter().try_fold(Self::empty(cat), |acc, p| acc.direct_sum(p))
    }

    /// `g ∘ f` for maps `f: self -> d`, `g: d -> e`.
    pub fn compose_maps(&self, g: &ComplexMap<F>, f: &ComplexMap<F>) -> ComplexMap<F> {
        assert_eq!(f.cols, g.rows, "maps are not composable");
        let field = self.field();
        let mut out = ComplexMap::zero(f.degree + g.degree, f.rows, g.cols);
        for a in 0..f.rows {
            for b in 0..f.cols {
                let fab = f.get(a, b);
                if fab.is_zero() {
                    continue;
                }
                for c in 0..g.cols {
                    let gbc = g.get(b, c);
                    if gbc.is_zero() {
                        continue;
                    }
                    let prod = self.cat.compose(gbc, fab);
                    let cur = out.get(a, c).add(field, &prod);
                    out.set(a, c, cur);
                }
            }
        }
        out
    }

    /// The differential as a degree-one self map.
    pub fn differential_map(&self) -> ComplexMap<F> {
        let m = self.len();
        ComplexMap { degree: 1, rows: m, cols: m, entries: self.delta.clone() }
    }

    /// `δ_d ∘ f − (−1)^{|f|} f ∘ δ_c` for `f: self -> d`.
    pub fn map_differential(&self, d: &Self, f: &ComplexMap<F>) -> ComplexMap<F> {
        let field = self.field();
        let left = self.compose_maps(&d.differential_map(), f);
        let right = self.compose_maps(f, &self.differential_map());
        let sign = if f.degree.rem_euclid(2) == 0 { field.neg(&field.one()) } else { field.one() };
        let entries = left
            .entries
            .iter()
            .zip(&right.entries)
            .map(|(l, r)| l.add(field, &r.scale(field, &sign)))
            .collect();
        ComplexMap { degree: f.degree + 1, rows: left.rows, cols: left.cols, entries }
    }

    fn check_map_degrees(&self, d: &Self, f: &ComplexMap<F>) -> Result<()> {
        if (f.rows, f.cols) != (self.len(), d.len()) {
            return Err(Error::Shape(format!(
                "map is {}x{}, complexes have {} and {} summands",
                f.rows,
                f.cols,
                self.len(),
                d.len()
            )));
        }
        for a in 0..f.rows {
            for b in 0..f.cols {
                let expected = Self::slot_degree(f.degree, &self.summands[a], &d.summands[b]);
                for (id, _) in f.get(a, b).terms() {
                    let el = self.cat.element(*id);
                    if el.degree != expected
                        || el.source != self.summands[a].vertex
                        || el.target != d.summands[b].vertex
                    {
                        return Err(Error::Shape(format!(
                            "entry {a}->{b}: {} does not fit a map of degree {}",
                            el.name, f.degree
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Mapping cone of a closed degree-zero map `f: self -> d`: summands of
    /// `self[1]` followed by those of `d`, with `f` as the off-diagonal block.
    pub fn cone(&self, d: &Self, f: &ComplexMap<F>) -> Result<Self> {
        self.same_category(d)?;
        if f.degree != 0 {
            return Err(Error::DegreeMismatch(f.degree));
        }
        self.check_map_degrees(d, f)?;
        if !self.map_differential(d, f).is_zero() {
            return Err(Error::NotClosed);
        }
        let shifted = self.shift(1);
        let m1 = self.len();
        let mut summands = shifted.summands.clone();
        summands.extend_from_slice(&d.summands);
        let mut entries: Vec<_> = shifted.entries().map(|(a, b, x)| (a, b, x.clone())).collect();
        entries.extend(d.entries().map(|(a, b, x)| (a + m1, b + m1, x.clone())));
        for a in 0..f.rows {
            for b in 0..f.cols {
                let x = f.get(a, b);
                if !x.is_zero() {
                    entries.push((a, b + m1, x.clone()));
                }
            }
        }
        Ok(Self::from_parts(&self.cat, summands, entries))
    }

    /// Gaussian elimination of identity-labelled arrows, followed by the
    /// canonical summand order.
    pub fn minimize(&self) -> Self {
        let field = self.field().clone();
        let cat = &self.cat;
        let m = self.len();
        let mut delta = self.delta.clone();
        let mut alive = vec![true; m];
        loop {
            let mut pivot = None;
            'search: for a in (0..m).filter(|&a| alive[a]) {
                for b in (0..m).filter(|&b| alive[b] && b != a) {
                    let x = &delta[a * m + b];
                    if let Some(c) = x.coeff(cat.unit(self.summands[a].vertex)) {
                        if self.summands[a].vertex == self.summands[b].vertex {
                            pivot = Some((a, b, c.clone()));
                            break 'search;
                        }
                    }
                }
            }
            let Some((a, b, lambda)) = pivot else { break };
            let inv = field.inv(&lambda).expect("pivot coefficient is nonzero");
            alive[a] = false;
            alive[b] = false;
            let sources: Vec<usize> = (0..m).filter(|&x| alive[x] && !delta[x * m + b].is_zero()).collect();
            let targets: Vec<usize> = (0..m).filter(|&y| alive[y] && !delta[a * m + y].is_zero()).collect();
            for &x in &sources {
                for &y in &targets {
                    let corr = cat.compose(&delta[a * m + y], &delta[x * m + b]);
                    if corr.is_zero() {
                        continue;
                    }
                    let corr = corr.scale(&field, &field.neg(&inv));
                    delta[x * m + y] = delta[x * m + y].add(&field, &corr);
                }
            }
        }
        let keep: Vec<usize> = (0..m).filter(|&i| alive[i]).collect();
        let summands = keep.iter().map(|&i| self.summands[i]).collect();
        let mut entries = Vec::new();
        for (na, &a) in keep.iter().enumerate() {
            for (nb, &b) in keep.iter().enumerate() {
                let x = &delta[a * m + b];
                if !x.is_zero() {
                    entries.push((na, nb, x.clone()));
                }
            }
        }
        Self::from_parts(cat, summands, entries).canonical_order()
    }

    /// Stable topological order of the support graph, ties broken by
    /// (position descending, vertex ascending, current index). Summands on a
    /// cycle (never produced from valid inputs) keep their relative order.
    pub fn canonical_order(&self) -> Self {
        let m = self.len();
        let mut indeg = vec![0usize; m];
        let mut out_edges = vec![Vec::new(); m];
        for (a, b, _) in self.entries() {
            if a != b {
                indeg[b] += 1;
                out_edges[a].push(b);
            }
        }
        let key = |i: usize| Reverse((-self.summands[i].position, self.summands[i].vertex, i));
        let mut heap: BinaryHeap<_> = (0..m).filter(|&i| indeg[i] == 0).map(key).collect();
        let mut order = Vec::with_capacity(m);
        let mut placed = vec![false; m];
        while let Some(Reverse((_, _, i))) = heap.pop() {
            order.push(i);
            placed[i] = true;
            for &b in &out_edges[i] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    heap.push(key(b));
                }
            }
        }
        order.extend((0..m).filter(|&i| !placed[i]));
        self.permute(&order)
    }

    /// Reorders summands: new index `k` is old index `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Self {
        let m = self.len();
        assert_eq!(order.len(), m);
        let summands = order.iter().map(|&i| self.summands[i]).collect();
        let mut delta = vec![Morphism::zero(); m * m];
        for (na, &a) in order.iter().enumerate() {
            for (nb, &b) in order.iter().enumerate() {
                delta[na * m + nb] = self.entry(a, b).clone();
            }
        }
        Self { cat: self.cat.clone(), summands, delta }
    }

    /// Lowest and highest occupied positions.
    pub fn position_range(&self) -> Option<(i64, i64)> {
        let lo = self.summands.iter().map(|s| s.position).min()?;
        let hi = self.summands.iter().map(|s| s.position).max()?;
        Some((lo, hi))
    }

    /// Sorted multiset of `(vertex, position)`.
    pub fn summand_multiset(&self) -> Vec<Summand> {
        let mut v = self.summands.clone();
        v.sort();
        v
    }

    /// Entries whose only basis term is an identity.
    pub fn has_identity_entries(&self) -> bool {
        let cat = &self.cat;
        self.entries().any(|(_, _, x)| x.terms().iter().any(|(id, _)| cat.element(*id).kind == BasisKind::Unit))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, x) in self.summands.iter().enumerate() {
            s.push_str(&format!("[{i}] Q{}@{}\n", x.vertex, x.position));
        }
        for (a, b, x) in self.entries() {
            s.push_str(&format!("  {a} -> {b}: {}\n", self.cat.render(x)));
        }
        s
    }
}
