//! Dense exact linear algebra over a [`Field`]: row reduction, null spaces,
//! solving, determinants and characteristic polynomials.

use crate::field::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        DenseMatrix {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + &(a * b);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> DenseMatrix {
        DenseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        if let Field::Prime(p) = self.field {
            return self.rref_mod(p as u64);
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let pv = self.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &(&factor * pv);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn rref_mod(&mut self, p: u64) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut a: Vec<u64> = self
            .data
            .iter()
            .map(|s| match s {
                Scalar::Mod { v, .. } => *v as u64,
                Scalar::Rat(_) => unreachable!("rational entry in prime-field matrix"),
            })
            .collect();
        let inv = |x: u64| -> u64 {
            let (mut r, mut b, mut e) = (1u64, x, p - 2);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            r
        };
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    a.swap(pr * cols + j, r * cols + j);
                }
            }
            let iv = inv(a[r * cols + c]);
            for j in c..cols {
                a[r * cols + j] = a[r * cols + j] * iv % p;
            }
            let prow: Vec<(usize, u64)> = (c..cols)
                .filter(|&j| a[r * cols + j] != 0)
                .map(|j| (j, a[r * cols + j]))
                .collect();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = a[i * cols + c];
                if factor == 0 {
                    continue;
                }
                let neg = p - factor;
                for &(j, v) in &prow {
                    let x = &mut a[i * cols + j];
                    *x = (*x + neg * v) % p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let p32 = p as u32;
        self.data = a
            .into_iter()
            .map(|v| Scalar::Mod { v: v as u32, p: p32 })
            .collect();
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.nullspace_with_free().0
    }

    /// Null space basis together with the free columns: basis vector `k`
    /// is one at `free[k]` and zero at every other free column.
    pub fn nullspace_with_free(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(r, free);
            }
            basis.push(v);
        }
        let free = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        (basis, free)
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = DenseMatrix::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = DenseMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = DenseMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return self.field.zero();
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero");
            for i in c + 1..n {
                let factor = m.get(i, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &(&factor * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(t·I - A)`, coefficients from the
    /// constant term upward (monic). Hessenberg reduction, so it works over
    /// any field.
    pub fn charpoly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let f = self.field;
        let mut h = self.clone();
        // reduce to upper Hessenberg form by similarity transforms
        for c in 0..n.saturating_sub(2) {
            let Some(pr) = (c + 1..n).find(|&i| !h.get(i, c).is_zero()) else {
                continue;
            };
            if pr != c + 1 {
                for j in 0..n {
                    h.data.swap(pr * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + pr, i * n + c + 1);
                }
            }
            let inv = h.get(c + 1, c).inv().expect("nonzero");
            for i in c + 2..n {
                let factor = h.get(i, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h.get(i, j) - &(&factor * h.get(c + 1, j));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = h.get(r, c + 1) + &(&factor * h.get(r, i));
                    h.set(r, c + 1, v);
                }
            }
        }
        // recurrence on leading principal Hessenberg minors
        let mut polys: Vec<Vec<Scalar>> = vec![vec![f.one()]];
        for k in 0..n {
            // p_{k+1} = (t - h_kk) p_k - sum_{i<k} h_ik * prod_{j=i+1}^{k} h_{j,j-1} * p_i
            let mut next = vec![f.zero(); k + 2];
            for (d, c) in polys[k].iter().enumerate() {
                next[d + 1] = &next[d + 1] + c;
                next[d] = &next[d] - &(c * h.get(k, k));
            }
            let mut prod = f.one();
            for i in (0..k).rev() {
                prod = &prod * h.get(i + 1, i);
                let coef = &prod * h.get(i, k);
                if coef.is_zero() {
                    continue;
                }
                for (d, c) in polys[i].iter().enumerate() {
                    next[d] = &next[d] - &(&coef * c);
                }
            }
            polys.push(next);
        }
        polys.pop().expect("nonempty")
    }
}

/// Row-reduces a set of vectors, returning a basis of their span in echelon
/// form together with the pivot positions.
pub fn span_basis(field: Field, len: usize, vectors: &[Vec<Scalar>]) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    if vectors.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut m = DenseMatrix::zeros(field, vectors.len(), len);
    for (i, v) in vectors.iter().enumerate() {
        for (j, x) in v.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    let pivots = m.rref();
    let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
    (basis, pivots)
}

/// Incrementally maintained subspace of `field^len` in reduced echelon form,
/// supporting membership tests and reduction of vectors modulo the span.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub field: Field,
    pub len: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Subspace {
    pub fn new(field: Field, len: usize) -> Self {
        Subspace {
            field,
            len,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            let c = v[*p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    v[j] = &v[j] - &(&c * x);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero");
        let r: Vec<Scalar> = r.iter().map(|x| x * &inv).collect();
        for (_, row) in self.rows.iter_mut() {
            let c = row[p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    row[j] = &row[j] - &(&c * x);
                }
            }
        }
        self.rows.push((p, r));
        true
    }

    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}
