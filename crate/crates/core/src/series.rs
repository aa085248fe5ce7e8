//! Truncated multivariate power series over an exact field, series matrices,
//! the polynomial text grammar and the linear solving kernel.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::DenseMatrix;

pub const DEFAULT_PRECISION: u32 = 30;

/// Ring descriptor: ordered variable names, coefficient field, precision.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    vars: Arc<Vec<String>>,
    pub field: Field,
    pub prec: u32,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring[{}; {}; D={}]", self.vars.join(","), self.field, self.prec)
    }
}

impl Ring {
    pub fn new<S: AsRef<str>>(vars: &[S], field: Field, prec: u32) -> Result<Ring> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().trim().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Invalid(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Ring {
            vars: Arc::new(vars),
            field,
            prec,
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn with_prec(&self, prec: u32) -> Ring {
        Ring {
            vars: self.vars.clone(),
            field: self.field,
            prec,
        }
    }

    /// Same ring with one extra variable appended.
    pub fn extend(&self, name: &str) -> Result<Ring> {
        let mut v = (*self.vars).clone();
        v.push(name.to_string());
        Ring::new(&v, self.field, self.prec)
    }

    pub fn zero(&self) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> TruncatedSeries {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: Scalar) -> TruncatedSeries {
        self.term(c, Monomial::one(self.nvars()))
    }

    pub fn int(&self, n: i64) -> TruncatedSeries {
        self.constant(self.field.from_i64(n))
    }

    pub fn var(&self, i: usize) -> TruncatedSeries {
        self.term(self.field.one(), Monomial::var(self.nvars(), i, 1))
    }

    pub fn var_pow(&self, i: usize, e: u32) -> TruncatedSeries {
        self.term(self.field.one(), Monomial::var(self.nvars(), i, e))
    }

    pub fn term(&self, c: Scalar, m: Monomial) -> TruncatedSeries {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && m.degree() <= self.prec {
            terms.insert(m, c);
        }
        TruncatedSeries {
            ring: self.clone(),
            terms,
        }
    }

    pub fn parse(&self, s: &str) -> Result<TruncatedSeries> {
        parse_series(self, s)
    }
}

/// Exponent vector. The `Ord` instance is the canonical print order:
/// ascending total degree, and within one degree descending graded
/// reverse-lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = e;
        Monomial(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weighted_degree(&self, w: &[u32]) -> u64 {
        self.0.iter().zip(w).map(|(&e, &w)| e as u64 * w as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if !o.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect()))
    }

    /// Graded reverse-lexicographic comparison.
    pub fn grevlex_cmp(&self, o: &Monomial) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            c => return c,
        }
        for (a, b) in self.0.iter().zip(&o.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => o.grevlex_cmp(self),
            c => c,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// All monomials in `n` variables of total degree at most `d`, in print order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=d {
        out.extend(monomials_of_degree(n, deg));
    }
    out
}

pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    monomials_of_weight(&vec![1; n], d as u64)
}

/// All monomials with weighted degree exactly `e`, in print order.
/// Weights must be positive.
pub fn monomials_of_weight(w: &[u32], e: u64) -> Vec<Monomial> {
    fn rec(w: &[u32], i: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == w.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let wi = w[i] as u64;
        let mut k = 0u64;
        while k * wi <= left {
            cur[i] = k as u32;
            rec(w, i + 1, left - k * wi, cur, out);
            k += 1;
        }
        cur[i] = 0;
    }
    assert!(w.iter().all(|&x| x > 0), "weights must be positive");
    let mut out = Vec::new();
    rec(w, 0, e, &mut vec![0; w.len()], &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    ring: Ring,
    terms: BTreeMap<Monomial, Scalar>,
}

impl TruncatedSeries {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn prec(&self) -> u32 {
        self.ring.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.ring.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.ring.nvars()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Lowest total degree of a term, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn check(&self, o: &TruncatedSeries) -> Result<()> {
        if self.ring.vars != o.ring.vars || self.ring.field != o.ring.field {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.ring, o.ring)));
        }
        if self.ring.prec != o.ring.prec {
            return Err(Error::PrecisionMismatch {
                left: self.ring.prec,
                right: o.ring.prec,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(o)?;
        Ok(self.add_unchecked(o, false))
    }

    pub fn sub(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(o)?;
        Ok(self.add_unchecked(o, true))
    }

    pub fn mul(&self, o: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn add_unchecked(&self, o: &TruncatedSeries, negate: bool) -> TruncatedSeries {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let c = if negate { -c } else { c.clone() };
            add_term(&mut terms, m.clone(), c);
        }
        TruncatedSeries {
            ring: self.ring.clone(),
            terms,
        }
    }

    fn mul_unchecked(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let d = self.ring.prec;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &o.terms {
                if d1 + m2.degree() > d {
                    // terms are sorted by degree
                    break;
                }
                add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        TruncatedSeries {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedSeries {
        if c.is_zero() {
            return self.ring.zero();
        }
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> TruncatedSeries {
        let d = self.ring.prec;
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .filter(|(k, _)| k.degree() <= d)
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> TruncatedSeries {
        let mut r = self.ring.one();
        for _ in 0..e {
            r = r.mul_unchecked(self);
        }
        r
    }

    pub fn invert_unit(&self) -> Result<TruncatedSeries> {
        let c0 = self.constant_term();
        let Some(c0inv) = c0.inv() else {
            return Err(Error::NonUnit(self.to_string()));
        };
        // a = c0 (1 - n) with n in the maximal ideal; 1/a = c0^-1 sum n^k
        let n = self.ring.one().add_unchecked(&self.scale(&c0inv), true);
        let mut result = self.ring.one();
        let mut power = self.ring.one();
        for _ in 0..self.ring.prec {
            power = power.mul_unchecked(&n);
            if power.is_zero() {
                break;
            }
            result = result.add_unchecked(&power, false);
        }
        Ok(result.scale(&c0inv))
    }

    pub fn truncate(&self, prec: u32) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring.with_prec(prec),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= prec)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the series over a ring with more (or renamed) variables;
    /// `map[i]` is the target index of variable `i`.
    pub fn embed(&self, target: &Ring, map: &[usize]) -> TruncatedSeries {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            let m = Monomial(e);
            if m.degree() <= target.prec {
                add_term(&mut terms, m, c.clone());
            }
        }
        TruncatedSeries {
            ring: target.clone(),
            terms,
        }
    }

    /// Substitutes `0` for variable `i` (keeping the variable declared).
    pub fn set_zero(&self, i: usize) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[i] == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Weighted degree if every term has the same one.
    pub fn weighted_degree(&self, w: &[u32]) -> Option<u64> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(w));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> TruncatedSeries {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            if m.degree() <= ring.prec {
                add_term(&mut map, m, c);
            }
        }
        TruncatedSeries {
            ring: ring.clone(),
            terms: map,
        }
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_series(ring: &Ring, s: &str) -> Result<TruncatedSeries> {
    let err = |msg: String| Error::Parse { line: 0, msg };
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty polynomial".into()));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && !cur.ends_with('^') {
            if i > 0 {
                if cur.is_empty() {
                    return Err(err(format!("dangling sign in `{s}`")));
                }
                pieces.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(err(format!("trailing sign in `{s}`")));
    }
    pieces.push((neg, cur));

    let mut terms = BTreeMap::new();
    for (neg, piece) in pieces {
        let mut coef = ring.field.one();
        let mut exps = vec![0u32; ring.nvars()];
        for factor in piece.split('*') {
            if factor.is_empty() {
                return Err(err(format!("empty factor in `{piece}`")));
            }
            if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                coef = &coef * &ring.field.parse_scalar(factor)?;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e: u32 = e
                        .parse()
                        .map_err(|_| err(format!("bad exponent in `{factor}`")))?;
                    (n, e)
                }
                None => (factor, 1),
            };
            let i = ring
                .var_index(name)
                .ok_or_else(|| err(format!("unknown variable `{name}`")))?;
            exps[i] += exp;
        }
        let m = Monomial(exps);
        if m.degree() > ring.prec {
            return Err(err(format!(
                "term `{piece}` exceeds precision {}",
                ring.prec
            )));
        }
        add_term(&mut terms, m, if neg { -coef } else { coef });
    }
    Ok(TruncatedSeries {
        ring: ring.clone(),
        terms,
    })
}

/// Rectangular matrix of series sharing one ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        SeriesMatrix {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        Self::scalar(ring, n, &ring.one())
    }

    pub fn scalar(ring: &Ring, n: usize, s: &TruncatedSeries) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<TruncatedSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<TruncatedSeries> = rows.into_iter().flatten().collect();
        for e in &data {
            e.check(&ring.zero())?;
        }
        Ok(SeriesMatrix {
            ring: ring.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    /// Parses rows of polynomial strings.
    pub fn parse(ring: &Ring, rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, rows)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncatedSeries) {
        debug_assert_eq!(v.ring, self.ring);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(TruncatedSeries::is_zero)
    }

    pub fn mul(&self, o: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        self.ring.zero().check(&o.ring.zero())?;
        let mut out = SeriesMatrix::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = BTreeMap::new();
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = o.get(l, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for (m, c) in a.mul_unchecked(b).terms {
                        add_term(&mut acc, m, c);
                    }
                }
                out.data[i * o.cols + j] = TruncatedSeries {
                    ring: self.ring.clone(),
                    terms: acc,
                };
            }
        }
        Ok(out)
    }

    fn zip(&self, o: &SeriesMatrix, negate: bool) -> Result<SeriesMatrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::DimensionMismatch("shape".into()));
        }
        self.ring.zero().check(&o.ring.zero())?;
        Ok(SeriesMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.add_unchecked(b, negate))
                .collect(),
        })
    }

    pub fn add(&self, o: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.zip(o, false)
    }

    pub fn sub(&self, o: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.zip(o, true)
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> SeriesMatrix {
        let data: Vec<TruncatedSeries> = self.data.iter().map(f).collect();
        let ring = data.first().map_or(self.ring.clone(), |e| e.ring.clone());
        SeriesMatrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> SeriesMatrix {
        self.map(TruncatedSeries::neg)
    }

    pub fn scale(&self, s: &TruncatedSeries) -> SeriesMatrix {
        self.map(|e| e.mul_unchecked(s))
    }

    pub fn transpose(&self) -> SeriesMatrix {
        let mut t = SeriesMatrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn truncate(&self, prec: u32) -> SeriesMatrix {
        let mut m = self.map(|e| e.truncate(prec));
        m.ring = self.ring.with_prec(prec);
        m
    }

    pub fn embed(&self, target: &Ring, map: &[usize]) -> SeriesMatrix {
        let mut m = self.map(|e| e.embed(target, map));
        m.ring = target.clone();
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SeriesMatrix {
        let mut m = SeriesMatrix::zeros(&self.ring, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Assembles a block matrix; all blocks in a block row share a row
    /// count, all blocks in a block column share a column count.
    pub fn block(blocks: &[Vec<SeriesMatrix>]) -> Result<SeriesMatrix> {
        let ring = blocks
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::DimensionMismatch("empty block matrix".into()))?
            .ring
            .clone();
        let row_sizes: Vec<usize> = blocks.iter().map(|r| r[0].rows).collect();
        let col_sizes: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        let mut out = SeriesMatrix::zeros(&ring, row_sizes.iter().sum(), col_sizes.iter().sum());
        let mut r0 = 0;
        for (bi, brow) in blocks.iter().enumerate() {
            if brow.len() != col_sizes.len() {
                return Err(Error::DimensionMismatch("block row length".into()));
            }
            let mut c0 = 0;
            for (bj, b) in brow.iter().enumerate() {
                if b.rows != row_sizes[bi] || b.cols != col_sizes[bj] {
                    return Err(Error::DimensionMismatch("block shape".into()));
                }
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
                c0 += col_sizes[bj];
            }
            r0 += row_sizes[bi];
        }
        Ok(out)
    }

    pub fn block_diag(blocks: &[SeriesMatrix]) -> Result<SeriesMatrix> {
        let ring = blocks
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty block list".into()))?
            .ring
            .clone();
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = SeriesMatrix::zeros(&ring, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.ring.zero().check(&o.ring.zero())?;
        let mut out = SeriesMatrix::zeros(&self.ring, self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out.set(i * o.rows + k, j * o.cols + l, a.mul_unchecked(o.get(k, l)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Constant parts of the entries.
    pub fn constant_part(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.ring.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).constant_term());
            }
        }
        m
    }

    pub fn from_dense(ring: &Ring, d: &DenseMatrix) -> SeriesMatrix {
        let mut m = SeriesMatrix::zeros(ring, d.rows, d.cols);
        for i in 0..d.rows {
            for j in 0..d.cols {
                m.set(i, j, ring.constant(d.get(i, j).clone()));
            }
        }
        m
    }

    /// Inverse of a matrix whose constant part is invertible.
    pub fn invert(&self) -> Result<SeriesMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("non-square inverse".into()));
        }
        let c = self
            .constant_part()
            .inverse()
            .ok_or_else(|| Error::NonUnit("matrix with singular constant part".into()))?;
        let cinv = SeriesMatrix::from_dense(&self.ring, &c);
        // self = C (I - N) with N nilpotent modulo the maximal ideal
        let n = SeriesMatrix::identity(&self.ring, self.rows).sub(&cinv.mul(self)?)?;
        let mut result = SeriesMatrix::identity(&self.ring, self.rows);
        let mut power = result.clone();
        for _ in 0..self.ring.prec {
            power = power.mul(&n)?;
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        result.mul(&cinv)
    }

    pub fn entries(&self) -> impl Iterator<Item = &TruncatedSeries> {
        self.data.iter()
    }

    /// Row strings in the file format, e.g. `[x^3, -y]`.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| {
                let e: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", e.join(", "))
            })
            .collect()
    }

    pub fn parse_row(ring: &Ring, line: &str) -> Result<Vec<TruncatedSeries>> {
        let t = line.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("matrix row must be bracketed: `{t}`"),
            })?;
        inner.split(',').map(|s| ring.parse(s)).collect()
    }
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.row_strings().join(", "))
    }
}

impl fmt::Debug for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A linear system over the coefficients of unknown series.
///
/// Unknown `u` ranges over the span of `unknowns[u]`. Each equation asserts
/// `sum c * u = 0` as an exact polynomial identity, except that monomials
/// in the ideal generated by `relations` and (if set) monomials of degree
/// above `check_bound` are ignored.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub ring: Ring,
    pub unknowns: Vec<Vec<Monomial>>,
    pub equations: Vec<Vec<(usize, TruncatedSeries)>>,
    pub relations: Vec<Monomial>,
    pub check_bound: Option<u32>,
}

impl LinearSystem {
    pub fn new(ring: &Ring, unknowns: Vec<Vec<Monomial>>) -> Self {
        LinearSystem {
            ring: ring.clone(),
            unknowns,
            equations: Vec::new(),
            relations: Vec::new(),
            check_bound: None,
        }
    }

    fn ignored(&self, m: &Monomial) -> bool {
        self.check_bound.is_some_and(|b| m.degree() > b)
            || self.relations.iter().any(|r| r.divides(m))
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.unknowns.len() + 1);
        let mut acc = 0;
        for u in &self.unknowns {
            off.push(acc);
            acc += u.len();
        }
        off.push(acc);
        off
    }

    /// Coefficient matrix, one row per surviving (equation, monomial).
    pub fn matrix(&self) -> DenseMatrix {
        let off = self.offsets();
        let nv = off[self.unknowns.len()];
        let mut rows: Vec<HashMap<usize, Scalar>> = Vec::new();
        for eq in &self.equations {
            let mut index: HashMap<Monomial, usize> = HashMap::new();
            for (u, c) in eq {
                for (k, m) in self.unknowns[*u].iter().enumerate() {
                    if self.relations.iter().any(|r| r.divides(m)) {
                        continue;
                    }
                    for (cm, cc) in c.terms() {
                        let pm = cm.mul(m);
                        if self.ignored(&pm) {
                            continue;
                        }
                        let r = *index.entry(pm).or_insert_with(|| {
                            rows.push(HashMap::new());
                            rows.len() - 1
                        });
                        let slot = rows[r].entry(off[*u] + k).or_insert_with(|| self.ring.field.zero());
                        *slot = &*slot + cc;
                    }
                }
            }
        }
        let mut mat = DenseMatrix::zeros(self.ring.field, rows.len(), nv);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r {
                mat.set(i, j, v);
            }
        }
        mat
    }

    /// Turns a coefficient vector into one series per unknown.
    pub fn to_series(&self, v: &[Scalar]) -> Vec<TruncatedSeries> {
        let off = self.offsets();
        self.unknowns
            .iter()
            .enumerate()
            .map(|(u, mons)| {
                TruncatedSeries::from_terms(
                    &self.ring,
                    mons.iter()
                        .enumerate()
                        .filter(|(_, m)| !self.relations.iter().any(|r| r.divides(m)))
                        .map(|(k, m)| (m.clone(), v[off[u] + k].clone())),
                )
            })
            .collect()
    }

    pub fn num_coefficients(&self) -> usize {
        self.offsets()[self.unknowns.len()]
    }
}

/// Basis of the solution space of `sys`, each solution given as one series
/// per unknown.
pub fn graded_solve(sys: &LinearSystem) -> Vec<Vec<TruncatedSeries>> {
    let mat = sys.matrix();
    // coefficients on monomials killed by the relations are not unknowns
    let off = sys.offsets();
    let mut killed = vec![false; mat.cols];
    for (u, mons) in sys.unknowns.iter().enumerate() {
        for (k, m) in mons.iter().enumerate() {
            if sys.relations.iter().any(|r| r.divides(m)) {
                killed[off[u] + k] = true;
            }
        }
    }
    mat.nullspace()
        .into_iter()
        .filter(|v| !v.iter().zip(&killed).any(|(x, &k)| k && !x.is_zero()))
        .map(|v| sys.to_series(&v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(d: u32) -> Ring {
        Ring::new(&["x", "y"], Field::Prime(32003), d).unwrap()
    }

    #[test]
    fn truncation_boundary() {
        let r = ring(5);
        let x = r.var(0);
        assert!(x.mul(&r.var_pow(0, 5)).unwrap().is_zero());
        assert_eq!(x.mul(&r.var_pow(0, 4)).unwrap().to_string(), "x^5");
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(10);
        let a = r.parse("1+x").unwrap();
        let b = r.parse("1-x").unwrap();
        assert_eq!(a.mul(&b).unwrap().to_string(), "1-x^2");
    }

    #[test]
    fn geometric_inverse() {
        let r = ring(4);
        let inv = r.parse("1+x").unwrap().invert_unit().unwrap();
        assert_eq!(inv.to_string(), "1-x+x^2-x^3+x^4");
        let c = r.int(7).invert_unit().unwrap();
        assert_eq!(&c.constant_term() * &r.field.from_i64(7), r.field.one());
        assert!(r.var(0).invert_unit().is_err());
    }

    #[test]
    fn mismatched_precision_rejected() {
        let a = ring(5).var(0);
        let b = ring(6).var(0);
        assert!(matches!(a.add(&b), Err(Error::PrecisionMismatch { .. })));
        let c = Ring::new(&["x", "z"], Field::Prime(32003), 5).unwrap().var(0);
        assert!(matches!(a.mul(&c), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn print_parse_roundtrip() {
        let r = ring(30);
        for s in ["x^4+y^3", "-3*x*y^2+x^2*y+1/2", "y-x", "x^2-2*x*y+y^2", "0"] {
            let q = Ring::new(&["x", "y"], Field::Rational, 30).unwrap();
            let p = q.parse(s).unwrap();
            assert_eq!(q.parse(&p.to_string()).unwrap(), p);
        }
        assert_eq!(r.parse("x^4+y^3").unwrap().to_string(), "y^3+x^4");
        assert_eq!(r.parse("y^2+x*y+x^2").unwrap().to_string(), "x^2+x*y+y^2");
        assert!(r.parse("x+").is_err());
        assert!(r.parse("z").is_err());
    }

    #[test]
    fn e6_pair_product() {
        let r = ring(30);
        let phi = SeriesMatrix::parse(&r, &[&["x^3", "-y"], &["y^2", "x"]]).unwrap();
        let psi = SeriesMatrix::parse(&r, &[&["x", "y"], &["-y^2", "x^3"]]).unwrap();
        let f = r.parse("x^4+y^3").unwrap();
        assert_eq!(phi.mul(&psi).unwrap(), SeriesMatrix::scalar(&r, 2, &f));
        assert_eq!(psi.mul(&phi).unwrap(), SeriesMatrix::scalar(&r, 2, &f));
        assert_eq!(phi.mul(&SeriesMatrix::identity(&r, 2)).unwrap(), phi);
    }

    fn random_series(r: &Ring, rng: &mut ChaCha8Rng, terms: usize) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            r,
            (0..terms).map(|_| {
                let a = rng.gen_range(0..=r.prec);
                let b = rng.gen_range(0..=r.prec - a);
                (Monomial(vec![a, b]), r.field.random(rng))
            }),
        )
    }

    // per-coefficient convolution over a dense exponent grid
    fn convolution(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
        let d = a.prec();
        let r = a.ring().clone();
        let mut out = Vec::new();
        for i in 0..=d {
            for j in 0..=d - i {
                let mut s = r.field.zero();
                for i1 in 0..=i {
                    for j1 in 0..=j {
                        let ca = a.coeff(&Monomial(vec![i1, j1]));
                        let cb = b.coeff(&Monomial(vec![i - i1, j - j1]));
                        s = &s + &(&ca * &cb);
                    }
                }
                out.push((Monomial(vec![i, j]), s));
            }
        }
        TruncatedSeries::from_terms(&r, out)
    }

    #[test]
    fn product_matches_convolution_and_ring_axioms() {
        let r = ring(8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_series(&r, &mut rng, 6);
            let b = random_series(&r, &mut rng, 6);
            let c = random_series(&r, &mut rng, 6);
            assert_eq!(a.mul(&b).unwrap(), convolution(&a, &b));
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
            assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            // precision coherence
            assert_eq!(
                a.mul(&b).unwrap().truncate(5),
                a.truncate(5).mul(&b.truncate(5)).unwrap()
            );
        }
    }

    #[test]
    fn random_unit_inverse_multiplies_back() {
        let r = ring(9);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let u = random_series(&r, &mut rng, 8).add(&r.int(rng.gen_range(1..50))).unwrap();
            if !u.is_unit() {
                continue;
            }
            assert_eq!(u.mul(&u.invert_unit().unwrap()).unwrap(), r.one());
        }
    }

    #[test]
    fn matrix_product_matches_dot_products() {
        let r = ring(6);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mk = |rng: &mut ChaCha8Rng, m: usize, n: usize| {
            let rows = (0..m)
                .map(|_| (0..n).map(|_| random_series(&r, rng, 3)).collect())
                .collect();
            SeriesMatrix::from_rows(&r, rows).unwrap()
        };
        let a = mk(&mut rng, 2, 3);
        let b = mk(&mut rng, 3, 4);
        let p = a.mul(&b).unwrap();
        for i in 0..2 {
            for j in 0..4 {
                let mut s = r.zero();
                for l in 0..3 {
                    s = s.add(&convolution(a.get(i, l), b.get(l, j))).unwrap();
                }
                assert_eq!(p.get(i, j), &s);
            }
        }
        assert!(a.mul(&a).is_err());
    }

    #[test]
    fn matrix_inverse() {
        let r = ring(10);
        let a = SeriesMatrix::parse(&r, &[&["1+x", "y"], &["x*y", "2-y"]]).unwrap();
        let inv = a.invert().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), SeriesMatrix::identity(&r, 2));
    }

    #[test]
    fn solve_nonzerodivisor_and_relation() {
        let r = Ring::new(&["x"], Field::Prime(32003), 3).unwrap();
        let mut sys = LinearSystem::new(&r, vec![monomials_up_to(1, 3)]);
        sys.equations.push(vec![(0, r.var(0))]);
        assert!(graded_solve(&sys).is_empty());

        sys.relations.push(Monomial(vec![2]));
        let sol = graded_solve(&sys);
        assert_eq!(sol.len(), 1);
        assert_eq!(sol[0][0].to_string(), "x");
    }

    #[test]
    fn weighted_monomials() {
        let ms = monomials_of_weight(&[3, 4], 12);
        let strs: Vec<Vec<u32>> = ms.iter().map(|m| m.0.clone()).collect();
        assert_eq!(strs, vec![vec![0, 3], vec![4, 0]]);
        assert_eq!(monomials_up_to(2, 2).len(), 6);
    }
}
