//! Dense matrices over an exact field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Self { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { field: field.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Self::from_rows(field, rows)
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F::Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &F::Elem) {
        let k = i * self.cols + j;
        self.data[k] = self.field.add(&self.data[k], x);
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !f.is_zero(b) {
                        out.add_at(i, j, &f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.field.add(a, b)).collect();
        Self { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, c)).collect();
        Self { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form in place; returns the pivot column of each nonzero row.
    pub fn reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let k = r * self.cols + j;
                self.data[k] = f.mul(&self.data[k], &inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..self.cols {
                    let pivot_entry = &self.data[r * self.cols + j];
                    if f.is_zero(pivot_entry) {
                        continue;
                    }
                    let delta = f.mul(&factor, pivot_entry);
                    let k = i * self.cols + j;
                    self.data[k] = f.sub(&self.data[k], &delta);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.rows > self.cols {
            self.transpose().reduce().len()
        } else {
            self.clone().reduce().len()
        }
    }

    /// Basis of the right kernel, read off the reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let mut m = self.clone();
        let pivots = m.reduce();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![f.zero(); self.cols];
                v[free] = f.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Incrementally built span; each stored row has a unit pivot that vanishes in
/// every later row.
#[derive(Clone, Debug)]
pub struct EchelonSpan<F: Field> {
    field: F,
    rows: Vec<(usize, Vec<F::Elem>)>,
}

impl<F: Field> EchelonSpan<F> {
    pub fn new(field: &F) -> Self {
        Self { field: field.clone(), rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [F::Elem]) {
        let f = &self.field;
        for (p, row) in &self.rows {
            if f.is_zero(&v[*p]) {
                continue;
            }
            let c = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !f.is_zero(r) {
                    *x = f.sub(x, &f.mul(&c, r));
                }
            }
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        let f = &self.field;
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&w[p]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(x, &inv);
        }
        self.rows.push((p, w));
        true
    }
}

/// `base + sum_k c_k * directions[k]`, all square of the same size.
#[derive(Clone, Debug)]
pub struct AffineFamily<F: Field> {
    pub base: Matrix<F>,
    pub directions: Vec<Matrix<F>>,
}

#[derive(Clone, Debug)]
pub struct InvertibleMember<F: Field> {
    pub coefficients: Vec<F::Elem>,
    pub matrix: Matrix<F>,
}

pub const GENERIC_SAMPLES: usize = 32;

impl<F: Field> AffineFamily<F> {
    pub fn new(base: Matrix<F>, directions: Vec<Matrix<F>>) -> Self {
        for d in &directions {
            assert_eq!((d.rows, d.cols), (base.rows, base.cols), "direction shape mismatch");
        }
        Self { base, directions }
    }

    pub fn member(&self, coefficients: &[F::Elem]) -> Matrix<F> {
        assert_eq!(coefficients.len(), self.directions.len());
        self.directions
            .iter()
            .zip(coefficients)
            .fold(self.base.clone(), |acc, (d, c)| acc.add(&d.scale(c)))
    }
}

/// Finds an invertible member of the family by seeded sampling, with an
/// exhaustive two-parameter sweep over small fields. `None` means no member was
/// found, which is a proof of non-existence only when the sweep covered the
/// whole family.
pub fn generic_invertible<F: Field>(family: &AffineFamily<F>, seed: u64) -> Option<InvertibleMember<F>> {
    let field = family.base.field().clone();
    if family.base.rows() != family.base.cols() {
        return None;
    }
    let k = family.directions.len();
    let try_coeffs = |coefficients: Vec<F::Elem>| {
        let matrix = family.member(&coefficients);
        matrix.is_invertible().then_some(InvertibleMember { coefficients, matrix })
    };

    if let Some(m) = try_coeffs(vec![field.zero(); k]) {
        return Some(m);
    }
    if k == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERIC_SAMPLES {
        let coeffs = (0..k).map(|_| field.sample(&mut rng)).collect();
        if let Some(m) = try_coeffs(coeffs) {
            return Some(m);
        }
    }

    let q = field.order()?;
    if q > GENERIC_SAMPLES as u64 {
        return None;
    }
    // two-parameter sub-family: the directions themselves when there are at
    // most two, otherwise two seeded random combinations of them
    let plane: Vec<Vec<F::Elem>> = if k <= 2 {
        (0..k)
            .map(|i| (0..k).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect()
    } else {
        (0..2).map(|_| (0..k).map(|_| field.sample(&mut rng)).collect()).collect()
    };
    let combine = |s: &F::Elem, t: &F::Elem| -> Vec<F::Elem> {
        (0..k)
            .map(|j| {
                let a = field.mul(s, &plane[0][j]);
                let b = plane.get(1).map_or(field.zero(), |p| field.mul(t, &p[j]));
                field.add(&a, &b)
            })
            .collect()
    };
    let t_range = if plane.len() > 1 { q } else { 1 };
    for si in 0..q {
        for ti in 0..t_range {
            if let Some(m) = try_coeffs(combine(&field.nth(si), &field.nth(ti))) {
                return Some(m);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;

    fn q_mat(rows: &[&[i64]]) -> Matrix<Rationals> {
        Matrix::from_i64(&Rationals, rows)
    }

    #[test]
    fn rank_examples() {
        let q = Rationals;
        assert_eq!(Matrix::identity(&q, 3).rank(), 3);
        assert_eq!(Matrix::zeros(&q, 2, 2).rank(), 0);
        assert_eq!(q_mat(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let q = Rationals;
        assert!(Matrix::identity(&q, 3).kernel_basis().is_empty());
        assert_eq!(Matrix::zeros(&q, 2, 3).kernel_basis().len(), 3);
        let k = q_mat(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], q.neg(&k[0][1]));
        assert!(!q.is_zero(&k[0][0]));
    }

    #[test]
    fn solve_examples() {
        let q = Rationals;
        let b = vec![q.from_i64(3), q.from_i64(-2)];
        assert_eq!(Matrix::identity(&q, 2).solve(&b), Some(b.clone()));
        assert_eq!(Matrix::zeros(&q, 2, 2).solve(&b), None);
        let f5 = PrimeField::new(5).unwrap();
        let m = Matrix::from_i64(&f5, &[&[2]]);
        assert_eq!(m.solve(&[3]), Some(vec![4]));
    }

    #[test]
    fn generic_invertible_examples() {
        let q = Rationals;
        let id = Matrix::identity(&q, 3);
        let found = generic_invertible(&AffineFamily::new(id.clone(), vec![]), 7).unwrap();
        assert_eq!(found.matrix, id);

        let zero = Matrix::zeros(&q, 2, 2);
        let fam = AffineFamily::new(zero.clone(), vec![zero.clone(), zero]);
        assert!(generic_invertible(&fam, 7).is_none());
    }

    // 2x2 determinant by the Leibniz formula, independent of row reduction.
    fn det2(f: &PrimeField, m: &Matrix<PrimeField>) -> u64 {
        f.sub(&f.mul(m.get(0, 0), m.get(1, 1)), &f.mul(m.get(0, 1), m.get(1, 0)))
    }

    #[test]
    fn generic_invertible_diagonal_family_over_f5() {
        let f5 = PrimeField::new(5).unwrap();
        let d1 = Matrix::from_i64(&f5, &[&[1, 0], &[0, 0]]);
        let d2 = Matrix::from_i64(&f5, &[&[0, 0], &[0, 1]]);
        let fam = AffineFamily::new(Matrix::zeros(&f5, 2, 2), vec![d1, d2]);

        // enumeration oracle: exactly the pairs with both coefficients nonzero
        let mut invertible = 0;
        for s in 0..5 {
            for t in 0..5 {
                let m = fam.member(&[s, t]);
                if det2(&f5, &m) != 0 {
                    invertible += 1;
                    assert!(s != 0 && t != 0);
                }
            }
        }
        assert_eq!(invertible, 16);

        let found = generic_invertible(&fam, 1).unwrap();
        assert_ne!(det2(&f5, &found.matrix), 0);
        assert_eq!(found.matrix, fam.member(&found.coefficients));
        assert_eq!(found.matrix.get(0, 1), &0);
        assert_eq!(found.matrix.get(1, 0), &0);
    }

    #[test]
    fn small_field_sweep_is_exhaustive_on_two_directions() {
        // only (1,1) is invertible over F2 for this family
        let f2 = PrimeField::new(2).unwrap();
        let d1 = Matrix::from_i64(&f2, &[&[1, 0], &[0, 0]]);
        let d2 = Matrix::from_i64(&f2, &[&[0, 0], &[0, 1]]);
        let fam = AffineFamily::new(Matrix::zeros(&f2, 2, 2), vec![d1, d2]);
        for seed in 0..20 {
            let found = generic_invertible(&fam, seed).unwrap();
            assert_eq!(found.coefficients, vec![1, 1]);
        }
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), proptest::collection::vec(-3i64..=3, r * c))
        })
    }

    fn build(f: &PrimeField, (r, c, data): &(usize, usize, Vec<i64>)) -> Matrix<PrimeField> {
        let rows = data.chunks(*c).map(|row| row.iter().map(|&x| f.from_i64(x)).collect()).collect();
        let m = Matrix::from_rows(f, rows);
        assert_eq!((m.rows(), m.cols()), (*r, *c));
        m
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(spec in arb_matrix(), p in prop::sample::select(vec![2u64, 3, 7, 32003])) {
            let f = PrimeField::new(p).unwrap();
            let m = build(&f, &spec);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_nullity(spec in arb_matrix(), p in prop::sample::select(vec![2u64, 5, 32003])) {
            let f = PrimeField::new(p).unwrap();
            let m = build(&f, &spec);
            let kernel = m.kernel_basis();
            prop_assert_eq!(m.cols(), m.rank() + kernel.len());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).iter().all(|x| *x == 0));
            }
        }

        #[test]
        fn solve_is_exact(spec in arb_matrix(), x in proptest::collection::vec(-4i64..=4, 6)) {
            let q = Rationals;
            let rows = spec.2.chunks(spec.1).map(|r| r.iter().map(|&v| q.from_i64(v)).collect()).collect();
            let m = Matrix::from_rows(&q, rows);
            let x: Vec<_> = x[..m.cols()].iter().map(|&v| q.from_i64(v)).collect();
            let b = m.mul_vec(&x);
            let sol = m.solve(&b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&sol), b);
        }
    }
}
