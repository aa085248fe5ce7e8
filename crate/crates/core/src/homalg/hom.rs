//! Graded morphism spaces between factorizations, null-homotopies, stable
//! Hom and Ext¹.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{DenseMatrix, Subspace};
use crate::mf::{detect_cover, Grading, MatrixFactorization};
use crate::series::{monomials_of_weight, LinearSystem, Monomial, SeriesMatrix, TruncatedSeries};

/// A morphism `(α, β)` from `X` to `Y`: `α φ_X = φ_Y β` and
/// `β ψ_X = ψ_Y α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapPair {
    pub alpha: SeriesMatrix,
    pub beta: SeriesMatrix,
}

impl MapPair {
    pub fn identity(x: &MatrixFactorization) -> Self {
        let i = SeriesMatrix::identity(x.ring(), x.size());
        MapPair { alpha: i.clone(), beta: i }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &MapPair) -> Result<MapPair> {
        Ok(MapPair {
            alpha: self.alpha.mul(&o.alpha)?,
            beta: self.beta.mul(&o.beta)?,
        })
    }

    pub fn add(&self, o: &MapPair) -> Result<MapPair> {
        Ok(MapPair {
            alpha: self.alpha.add(&o.alpha)?,
            beta: self.beta.add(&o.beta)?,
        })
    }

    pub fn sub(&self, o: &MapPair) -> Result<MapPair> {
        Ok(MapPair {
            alpha: self.alpha.sub(&o.alpha)?,
            beta: self.beta.sub(&o.beta)?,
        })
    }

    pub fn scale(&self, c: &TruncatedSeries) -> MapPair {
        MapPair {
            alpha: self.alpha.scale(c),
            beta: self.beta.scale(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn is_morphism(&self, x: &MatrixFactorization, y: &MatrixFactorization) -> bool {
        let ok = |a: Result<SeriesMatrix>, b: Result<SeriesMatrix>| matches!((a, b), (Ok(a), Ok(b)) if a == b);
        ok(self.alpha.mul(&x.phi), y.phi.mul(&self.beta)) && ok(self.beta.mul(&x.psi), y.psi.mul(&self.alpha))
    }

    /// Both constant parts are invertible.
    pub fn is_invertible(&self) -> bool {
        self.alpha.constant_part().inverse().is_some() && self.beta.constant_part().inverse().is_some()
    }
}

pub(crate) fn check_same_potential(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<()> {
    if x.potential != y.potential {
        return Err(Error::Invalid(format!(
            "potentials differ: {} vs {}",
            x.potential, y.potential
        )));
    }
    Ok(())
}

/// Morphisms `X → Y` of one weighted degree `d`, as a basis of coefficient
/// vectors. Unknowns are `α[i][j]` (index `i*n + j`) followed by `β[l][k]`.
#[derive(Clone, Debug)]
pub struct HomDegree {
    pub degree: i64,
    sys: LinearSystem,
    index: HashMap<(usize, Monomial), usize>,
    pub basis: Vec<Vec<Scalar>>,
    free: Vec<usize>,
    n_src: usize,
    n_tgt: usize,
}

impl HomDegree {
    /// Degree-`d` morphisms. With `cap`, every entry is further restricted
    /// to monomials of total degree at most `cap`.
    pub fn compute(
        x: &MatrixFactorization,
        gx: &Grading,
        y: &MatrixFactorization,
        gy: &Grading,
        d: i64,
        cap: Option<u32>,
    ) -> HomDegree {
        let (n, m) = (x.size(), y.size());
        let w = &gx.weights;
        let support = |e: i64| -> Vec<Monomial> {
            if e < 0 {
                return Vec::new();
            }
            let mut v = monomials_of_weight(w, e as u64);
            if let Some(c) = cap {
                v.retain(|mo| mo.degree() <= c);
            }
            v
        };
        let mut unknowns = Vec::with_capacity(2 * n * m);
        for i in 0..m {
            for j in 0..n {
                unknowns.push(support(gx.row[j] + d - gy.row[i]));
            }
        }
        for l in 0..m {
            for k in 0..n {
                unknowns.push(support(gx.col[k] + d - gy.col[l]));
            }
        }
        let mut sys = LinearSystem::new(x.ring(), unknowns);
        let a = |i: usize, j: usize| i * n + j;
        let b = |l: usize, k: usize| m * n + l * n + k;
        // α φ_X = φ_Y β; the ψ identity follows since φ_Y is a non-zerodivisor
        for i in 0..m {
            for k in 0..n {
                let mut eq = Vec::new();
                for j in 0..n {
                    let c = x.phi.get(j, k);
                    if !c.is_zero() && !sys.unknowns[a(i, j)].is_empty() {
                        eq.push((a(i, j), c.clone()));
                    }
                }
                for l in 0..m {
                    let c = y.phi.get(i, l);
                    if !c.is_zero() && !sys.unknowns[b(l, k)].is_empty() {
                        eq.push((b(l, k), c.neg()));
                    }
                }
                if !eq.is_empty() {
                    sys.equations.push(eq);
                }
            }
        }
        let mut index = HashMap::new();
        let mut pos = 0;
        for (u, mons) in sys.unknowns.iter().enumerate() {
            for mo in mons {
                index.insert((u, mo.clone()), pos);
                pos += 1;
            }
        }
        let (basis, free) = sys.matrix().nullspace_with_free();
        HomDegree {
            degree: d,
            sys,
            index,
            basis,
            free,
            n_src: n,
            n_tgt: m,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_coefficients(&self) -> usize {
        self.index.len()
    }

    pub fn pair_from_vec(&self, v: &[Scalar]) -> MapPair {
        let series = self.sys.to_series(v);
        let (n, m) = (self.n_src, self.n_tgt);
        let r = &self.sys.ring;
        let mut alpha = SeriesMatrix::zeros(r, m, n);
        let mut beta = SeriesMatrix::zeros(r, m, n);
        for i in 0..m {
            for j in 0..n {
                alpha.set(i, j, series[i * n + j].clone());
                beta.set(i, j, series[m * n + i * n + j].clone());
            }
        }
        MapPair { alpha, beta }
    }

    pub fn pair(&self, k: usize) -> MapPair {
        self.pair_from_vec(&self.basis[k])
    }

    pub fn pairs(&self) -> Vec<MapPair> {
        (0..self.dim()).map(|k| self.pair(k)).collect()
    }

    /// Coefficient vector of a pair of this degree; `None` if some term
    /// lies outside the supports.
    pub fn vec_of_pair(&self, p: &MapPair) -> Option<Vec<Scalar>> {
        let mut v = vec![self.sys.ring.field.zero(); self.num_coefficients()];
        let (n, m) = (self.n_src, self.n_tgt);
        for i in 0..m {
            for j in 0..n {
                for (u, e) in [(i * n + j, p.alpha.get(i, j)), (m * n + i * n + j, p.beta.get(i, j))] {
                    for (mo, c) in e.terms() {
                        let k = *self.index.get(&(u, mo.clone()))?;
                        v[k] = c.clone();
                    }
                }
            }
        }
        Some(v)
    }

    /// Coordinates in `basis` of a solution vector.
    pub fn coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.free.iter().map(|&f| v[f].clone()).collect()
    }

    pub fn combine(&self, c: &[Scalar]) -> Vec<Scalar> {
        let mut v = vec![self.sys.ring.field.zero(); self.num_coefficients()];
        for (ck, b) in c.iter().zip(&self.basis) {
            if ck.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = &*x + &(ck * y);
                }
            }
        }
        v
    }

    /// Images of the degree-`d` null-homotopies `(s, t)`:
    /// `α = φ_Y s + t ψ_X`, `β = ψ_Y t + s φ_X`, as coefficient vectors.
    pub fn null_vectors(
        &self,
        x: &MatrixFactorization,
        gx: &Grading,
        y: &MatrixFactorization,
        gy: &Grading,
    ) -> Vec<Vec<Scalar>> {
        let (n, m) = (self.n_src, self.n_tgt);
        let d = self.degree;
        let w = &gx.weights;
        let field = self.sys.ring.field;
        let mut out = Vec::new();
        let mut push = |contribs: Vec<(usize, &TruncatedSeries, &Monomial)>| {
            let mut v = vec![field.zero(); self.num_coefficients()];
            for (u, c, mo) in contribs {
                for (cm, cc) in c.terms() {
                    let k = self.index[&(u, cm.mul(mo))];
                    v[k] = &v[k] + cc;
                }
            }
            out.push(v);
        };
        // s[l][j]: F0_X → F1_Y
        for l in 0..m {
            for j in 0..n {
                let e = gx.row[j] + d - gy.col[l];
                if e < 0 {
                    continue;
                }
                for mo in monomials_of_weight(w, e as u64) {
                    let mut c = Vec::new();
                    for i in 0..m {
                        let p = y.phi.get(i, l);
                        if !p.is_zero() {
                            c.push((i * n + j, p, &mo));
                        }
                    }
                    for k in 0..n {
                        let p = x.phi.get(j, k);
                        if !p.is_zero() {
                            c.push((m * n + l * n + k, p, &mo));
                        }
                    }
                    push(c);
                }
            }
        }
        // t[i][k]: F1_X → F0_Y
        for i in 0..m {
            for k in 0..n {
                let e = gx.col[k] + d - gx.total - gy.row[i];
                if e < 0 {
                    continue;
                }
                for mo in monomials_of_weight(w, e as u64) {
                    let mut c = Vec::new();
                    for j in 0..n {
                        let p = x.psi.get(k, j);
                        if !p.is_zero() {
                            c.push((i * n + j, p, &mo));
                        }
                    }
                    for l in 0..m {
                        let p = y.psi.get(l, i);
                        if !p.is_zero() {
                            c.push((m * n + l * n + k, p, &mo));
                        }
                    }
                    push(c);
                }
            }
        }
        out
    }
}

/// Degree-`d` piece of the stable Hom: `Hom_d / Null_d`, with
/// representatives chosen among the `Hom_d` basis vectors.
#[derive(Clone, Debug)]
pub struct StableDegree {
    pub hom: HomDegree,
    null: Subspace,
    pub reps: Vec<usize>,
}

impl StableDegree {
    pub fn compute(
        x: &MatrixFactorization,
        gx: &Grading,
        y: &MatrixFactorization,
        gy: &Grading,
        d: i64,
    ) -> StableDegree {
        let hom = HomDegree::compute(x, gx, y, gy, d, None);
        let field = x.ring().field;
        let mut null = Subspace::new(field, hom.dim());
        for v in hom.null_vectors(x, gx, y, gy) {
            null.insert(&hom.coords(&v));
        }
        let mut span = null.clone();
        let mut reps = Vec::new();
        for k in 0..hom.dim() {
            let mut e = vec![field.zero(); hom.dim()];
            e[k] = field.one();
            if span.insert(&e) {
                reps.push(k);
            }
        }
        StableDegree { hom, null, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Whether a coefficient vector of this degree is null-homotopic.
    pub fn is_null(&self, v: &[Scalar]) -> bool {
        self.null.contains(&self.hom.coords(v))
    }

    /// Coordinates of a coefficient vector in the representative basis.
    pub fn stable_coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        let field = self.hom.sys.ring.field;
        let c = self.hom.coords(v);
        let nb = self.null.basis();
        let m = self.hom.dim();
        let mut a = DenseMatrix::zeros(field, m, self.reps.len() + nb.len());
        for (col, &r) in self.reps.iter().enumerate() {
            a.set(r, col, field.one());
        }
        for (k, b) in nb.iter().enumerate() {
            for (i, x) in b.iter().enumerate() {
                a.set(i, self.reps.len() + k, x.clone());
            }
        }
        let sol = a.solve(&c).expect("reps and null span Hom_d");
        sol[..self.reps.len()].to_vec()
    }

    pub fn rep_pair(&self, k: usize) -> MapPair {
        self.hom.pair(self.reps[k])
    }
}

/// Range of degrees in which Hom between the gradings can be nonzero at the
/// bottom, and a heuristic top for the stable part.
fn degree_window(gx: &Grading, gy: &Grading) -> (i64, i64) {
    let mut diffs = Vec::new();
    for &a in &gy.row {
        for &b in &gx.row {
            diffs.push(a - b);
        }
    }
    for &a in &gy.col {
        for &b in &gx.col {
            diffs.push(a - b);
        }
    }
    let lo = diffs.iter().copied().min().unwrap_or(0);
    let hi = diffs.iter().copied().max().unwrap_or(0);
    // socle degree of the Milnor algebra, which kills stable Hom
    let socle: i64 = gx.weights.iter().map(|&w| gx.total - 2 * w as i64).sum();
    (lo, hi + socle.max(0) + gx.total)
}

/// Extra degrees checked above the window before a stable answer is
/// accepted.
pub const STABILITY_MARGIN: i64 = 4;

/// The graded stable Hom `\underline{Hom}(X, Y)`.
#[derive(Clone, Debug)]
pub struct StableHom {
    pub source: MatrixFactorization,
    pub target: MatrixFactorization,
    pub gx: Grading,
    pub gy: Grading,
    pub pieces: Vec<StableDegree>,
}

impl StableHom {
    pub fn compute(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<StableHom> {
        check_same_potential(x, y)?;
        let gx = x.grading()?;
        let gy = y.grading()?;
        let (lo, hi) = degree_window(&gx, &gy);
        let mut pieces = Vec::new();
        for d in lo..=hi {
            let p = StableDegree::compute(x, &gx, y, &gy, d);
            if p.dim() > 0 {
                pieces.push(p);
            }
        }
        for d in hi + 1..=hi + STABILITY_MARGIN {
            if StableDegree::compute(x, &gx, y, &gy, d).dim() > 0 {
                return Err(Error::Inconclusive(format!(
                    "stable Hom nonzero in degree {d} beyond the search window"
                )));
            }
        }
        Ok(StableHom {
            source: x.clone(),
            target: y.clone(),
            gx,
            gy,
            pieces,
        })
    }

    pub fn dim(&self) -> usize {
        self.pieces.iter().map(StableDegree::dim).sum()
    }

    /// `(degree, pair)` for every basis element.
    pub fn basis(&self) -> Vec<(i64, MapPair)> {
        self.pieces
            .iter()
            .flat_map(|p| (0..p.dim()).map(move |k| (p.hom.degree, p.rep_pair(k))))
            .collect()
    }

    fn offset_of(&self, d: i64) -> Option<(usize, &StableDegree)> {
        let mut off = 0;
        for p in &self.pieces {
            if p.hom.degree == d {
                return Some((off, p));
            }
            off += p.dim();
        }
        None
    }

    /// Multiplication by each ring variable, as a matrix on the basis
    /// (column `k` is the image of basis element `k`).
    pub fn action_tables(&self) -> Vec<DenseMatrix> {
        let r = self.source.ring();
        let field = r.field;
        let total = self.dim();
        let mut tables = Vec::new();
        for v in 0..r.nvars() {
            let wv = self.gx.weights[v] as i64;
            let mut t = DenseMatrix::zeros(field, total, total);
            let mut col = 0;
            for p in &self.pieces {
                for k in 0..p.dim() {
                    let img = p.rep_pair(k).scale(&r.var(v));
                    if let Some((off, q)) = self.offset_of(p.hom.degree + wv) {
                        let vec = q.hom.vec_of_pair(&img).expect("homogeneous image");
                        for (i, c) in q.stable_coords(&vec).into_iter().enumerate() {
                            t.set(off + i, col, c);
                        }
                    }
                    col += 1;
                }
            }
            tables.push(t);
        }
        tables
    }
}

/// `Ext¹(X, Y)`, realized as the stable Hom `X → ΩY`.
#[derive(Clone, Debug, Serialize)]
pub struct ExtSpace {
    pub dim: usize,
    /// `(degree, multiplicity)` of the basis.
    pub degrees: Vec<(i64, usize)>,
    /// Rank of multiplication by each variable.
    pub action_ranks: Vec<usize>,
}

pub fn stable_hom(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<StableHom> {
    StableHom::compute(x, y)
}

pub fn ext1(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<ExtSpace> {
    let sh = StableHom::compute(x, &y.syzygy())?;
    Ok(ExtSpace {
        dim: sh.dim(),
        degrees: sh.pieces.iter().map(|p| (p.hom.degree, p.dim())).collect(),
        action_ranks: sh.action_tables().iter().map(DenseMatrix::rank).collect(),
    })
}

/// All morphisms `X → Y` whose entries have total degree at most `cap`.
pub fn hom_space(x: &MatrixFactorization, y: &MatrixFactorization, cap: u32) -> Result<Vec<MapPair>> {
    check_same_potential(x, y)?;
    let gx = x.grading()?;
    let gy = y.grading()?;
    let (lo, _) = degree_window(&gx, &gy);
    let wmax = *gx.weights.iter().max().unwrap_or(&1) as i64;
    let spread = gx.row.iter().chain(&gx.col).max().unwrap_or(&0) - gy.row.iter().chain(&gy.col).min().unwrap_or(&0);
    let hi = spread.max(lo) + wmax * cap as i64;
    let mut out = Vec::new();
    for d in lo..=hi {
        out.extend(HomDegree::compute(x, &gx, y, &gy, d, Some(cap)).pairs());
    }
    Ok(out)
}

/// Smallest `k ≥ 0` with `y^k · Ext¹(N, ΩN) = 0`, where `y` is the cover
/// variable. Since `Ext¹(N, ΩN)` is the stable endomorphism ring, this is
/// the least `k` making `y^k · id_N` null-homotopic.
pub fn annihilator_power(n: &MatrixFactorization) -> Result<u32> {
    let (yi, ne) = detect_cover(&n.potential)
        .ok_or_else(|| Error::Invalid("annihilator_power needs a branched-cover potential".into()))?;
    n.ring().field.check_unit(ne as u64)?;
    let g = n.grading()?;
    let r = n.ring();
    let wy = g.weights[yi] as i64;
    for k in 0..ne {
        let d = k as i64 * wy;
        let sd = StableDegree::compute(n, &g, n, &g, d);
        let yk = r.var_pow(yi, k);
        let p = MapPair::identity(n).scale(&yk);
        let v = sd.hom.vec_of_pair(&p).expect("homogeneous");
        if sd.is_null(&v) {
            return Ok(k);
        }
    }
    Err(Error::TheoremViolation(format!(
        "y^{} does not annihilate Ext^1(N, ΩN) although {} is a unit",
        ne - 1,
        ne
    )))
}

/// Basis of the degree-`d` morphisms `X → Y`.
pub fn hom_degree_pairs(
    x: &MatrixFactorization,
    y: &MatrixFactorization,
    d: i64,
) -> Result<Vec<MapPair>> {
    check_same_potential(x, y)?;
    let gx = x.grading()?;
    let gy = y.grading()?;
    Ok(HomDegree::compute(x, &gx, y, &gy, d, None).pairs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::mf::{branched_cover, BranchedCoverSpec};
    use crate::series::{monomials_up_to, Ring};

    fn base(e: u32, a: u32) -> MatrixFactorization {
        let r = Ring::new(&["x"], Field::default(), 30).unwrap();
        MatrixFactorization::new(
            r.var_pow(0, a),
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, e)),
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, a - e)),
        )
        .unwrap()
    }

    fn cover(e: u32, a: u32) -> MatrixFactorization {
        branched_cover(&base(e, a), &BranchedCoverSpec::new(3, "y").unwrap()).unwrap()
    }

    // Brute force: every entry ranges over all monomials of total degree
    // <= cap, both identities imposed, each column of the constraint matrix
    // obtained by multiplying out a unit coefficient choice.
    fn dense_hom_dim(x: &MatrixFactorization, y: &MatrixFactorization, cap: u32) -> usize {
        let r = x.ring();
        let mons = monomials_up_to(r.nvars(), cap);
        let (n, m) = (x.size(), y.size());
        let mut columns: Vec<Vec<(String, Scalar)>> = Vec::new();
        for which in 0..2 {
            for i in 0..m {
                for j in 0..n {
                    for mo in &mons {
                        let mut a = SeriesMatrix::zeros(r, m, n);
                        let mut b = SeriesMatrix::zeros(r, m, n);
                        let e = r.term(r.field.one(), mo.clone());
                        if which == 0 {
                            a.set(i, j, e);
                        } else {
                            b.set(i, j, e);
                        }
                        let d1 = a.mul(&x.phi).unwrap().sub(&y.phi.mul(&b).unwrap()).unwrap();
                        let d2 = b.mul(&x.psi).unwrap().sub(&y.psi.mul(&a).unwrap()).unwrap();
                        let mut col = Vec::new();
                        for (tag, dm) in [("p", d1), ("q", d2)] {
                            for ii in 0..m {
                                for jj in 0..n {
                                    for (mm, c) in dm.get(ii, jj).terms() {
                                        col.push((format!("{tag}{ii},{jj}:{:?}", mm.0), c.clone()));
                                    }
                                }
                            }
                        }
                        columns.push(col);
                    }
                }
            }
        }
        let mut keys: Vec<String> = columns.iter().flatten().map(|(k, _)| k.clone()).collect();
        keys.sort();
        keys.dedup();
        let mut mat = DenseMatrix::zeros(r.field, keys.len(), columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (k, v) in col {
                let row = keys.binary_search(k).unwrap();
                mat.set(row, c, v.clone());
            }
        }
        columns.len() - mat.rank()
    }

    #[test]
    fn hom_matches_dense_enumeration() {
        let n1 = cover(1, 4);
        let m2 = cover(2, 4);
        for (x, y) in [(&n1, &n1), (&n1, &m2), (&m2, &n1.syzygy())] {
            let pairs = hom_space(x, y, 4).unwrap();
            for p in &pairs {
                assert!(p.is_morphism(x, y));
            }
            assert_eq!(pairs.len(), dense_hom_dim(x, y, 4));
        }
    }

    #[test]
    fn identity_is_a_morphism() {
        let n1 = cover(1, 4);
        let d0 = hom_degree_pairs(&n1, &n1, 0).unwrap();
        assert!(d0.iter().any(MapPair::is_invertible));
        assert!(MapPair::identity(&n1).is_morphism(&n1, &n1));
    }

    #[test]
    fn ext_of_free_vanishes_and_is_periodic() {
        let n1 = cover(1, 4);
        let free = MatrixFactorization::free(&n1.potential);
        assert_eq!(ext1(&free, &n1).unwrap().dim, 0);
        assert_eq!(ext1(&n1, &free).unwrap().dim, 0);
        for x in [cover(1, 4), cover(2, 4)] {
            let direct = ext1(&x, &x.syzygy()).unwrap().dim;
            let shifted = stable_hom(&x.syzygy(), &x.syzygy()).unwrap().dim();
            assert!(direct > 0);
            assert_eq!(direct, shifted);
        }
    }

    #[test]
    fn annihilator_powers_of_covers() {
        assert_eq!(annihilator_power(&cover(1, 4)).unwrap(), 1);
        assert_eq!(annihilator_power(&cover(1, 4).syzygy()).unwrap(), 1);
        assert_eq!(annihilator_power(&cover(2, 4)).unwrap(), 1);
        let f = cover(1, 4).potential;
        assert_eq!(annihilator_power(&MatrixFactorization::free(&f)).unwrap(), 0);
    }
}
