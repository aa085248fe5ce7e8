//! First syzygies of finitely presented modules over `S/(f)` for weighted
//! homogeneous `f`, via graded minimal generators.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{DenseMatrix, Subspace};
use crate::mf::{potential_weights, MatrixFactorization, ModulePresentation};
use crate::series::{monomials_of_weight, Monomial, Ring, SeriesMatrix, TruncatedSeries};

#[derive(Clone, Debug)]
pub enum Syzygy {
    /// The syzygy is maximal Cohen–Macaulay; given as the cokernel of a
    /// factorization, possibly with summands `(f, 1)` for free parts.
    Mcm(MatrixFactorization),
    Module(ModulePresentation),
}

impl Syzygy {
    pub fn mcm(&self) -> Option<&MatrixFactorization> {
        match self {
            Syzygy::Mcm(x) => Some(x),
            Syzygy::Module(_) => None,
        }
    }
}

/// Sparse homogeneous element of a graded free module.
type GVec = BTreeMap<(usize, Monomial), Scalar>;

struct Ctx {
    ring: Ring,
    weights: Vec<u32>,
    total: i64,
    f: TruncatedSeries,
}

impl Ctx {
    fn monos(&self, e: i64) -> Vec<Monomial> {
        if e < 0 {
            Vec::new()
        } else {
            monomials_of_weight(&self.weights, e as u64)
        }
    }

    /// `m · col`, computed without truncation.
    fn mul_col(&self, m: &Monomial, col: &[TruncatedSeries]) -> GVec {
        let mut out = GVec::new();
        for (i, e) in col.iter().enumerate() {
            for (em, c) in e.terms() {
                let key = (i, em.mul(m));
                let v = out.remove(&key).map_or_else(|| c.clone(), |old| &old + c);
                if !v.is_zero() {
                    out.insert(key, v);
                }
            }
        }
        out
    }

    /// `m · f · ε_i`.
    fn f_unit(&self, i: usize, m: &Monomial) -> GVec {
        self.f.terms().map(|(fm, c)| ((i, fm.mul(m)), c.clone())).collect()
    }

    fn to_series(&self, v: &GVec, len: usize) -> Vec<TruncatedSeries> {
        let mut parts: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); len];
        for ((i, m), c) in v {
            parts[*i].push((m.clone(), c.clone()));
        }
        parts.into_iter().map(|t| TruncatedSeries::from_terms(&self.ring, t)).collect()
    }
}

/// Coordinates of the degree `d` part of `⊕ S(-s_i)`.
struct Coords {
    index: HashMap<(usize, Monomial), usize>,
    keys: Vec<(usize, Monomial)>,
}

impl Coords {
    fn new(ctx: &Ctx, shifts: &[i64], d: i64) -> Coords {
        let mut keys = Vec::new();
        for (i, &s) in shifts.iter().enumerate() {
            for m in ctx.monos(d - s) {
                keys.push((i, m));
            }
        }
        let index = keys.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
        Coords { index, keys }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn dense(&self, field: Field, v: &GVec) -> Vec<Scalar> {
        let mut out = vec![field.zero(); self.len()];
        for (k, c) in v {
            out[self.index[k]] = c.clone();
        }
        out
    }

    fn sparse(&self, v: &[Scalar]) -> GVec {
        self.keys
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect()
    }
}

/// Eliminates unit entries and zero columns.
fn minimize(m: &SeriesMatrix) -> SeriesMatrix {
    let mut a = m.clone();
    loop {
        let unit = (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| a.get(i, j).is_unit());
        let Some((pi, pj)) = unit else { break };
        let uinv = a.get(pi, pj).invert_unit().expect("unit");
        let rows: Vec<usize> = (0..a.rows()).filter(|&i| i != pi).collect();
        let cols: Vec<usize> = (0..a.cols()).filter(|&j| j != pj).collect();
        let mut s = a.submatrix(&rows, &cols);
        for (ri, &i) in rows.iter().enumerate() {
            if a.get(i, pj).is_zero() {
                continue;
            }
            let cu = a.get(i, pj).mul(&uinv).expect("same ring");
            for (ci, &l) in cols.iter().enumerate() {
                if a.get(pi, l).is_zero() {
                    continue;
                }
                let v = s.get(ri, ci).sub(&cu.mul(a.get(pi, l)).expect("same ring")).expect("same ring");
                s.set(ri, ci, v);
            }
        }
        a = s;
    }
    let keep: Vec<usize> = (0..a.cols()).filter(|&j| (0..a.rows()).any(|i| !a.get(i, j).is_zero())).collect();
    let rows: Vec<usize> = (0..a.rows()).collect();
    a.submatrix(&rows, &keep)
}

/// Row and column shifts making every entry homogeneous of degree
/// `col[j] - row[i]`.
fn shifts(ctx: &Ctx, a: &SeriesMatrix) -> Result<(Vec<i64>, Vec<i64>)> {
    let (g, h) = (a.rows(), a.cols());
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); g + h];
    for i in 0..g {
        for j in 0..h {
            let e = a.get(i, j);
            if e.is_zero() {
                continue;
            }
            let w = e
                .weighted_degree(&ctx.weights)
                .ok_or_else(|| Error::NotGraded(format!("presentation entry ({i},{j}) = {e} is not homogeneous")))?
                as i64;
            adj[i].push((g + j, w));
            adj[g + j].push((i, -w));
        }
    }
    let mut shift: Vec<Option<i64>> = vec![None; g + h];
    for start in 0..g + h {
        if shift[start].is_some() {
            continue;
        }
        shift[start] = Some(0);
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let su = shift[u].expect("visited");
            for &(v, d) in &adj[u] {
                match shift[v] {
                    None => {
                        shift[v] = Some(su + d);
                        comp.push(v);
                        queue.push_back(v);
                    }
                    Some(sv) if sv != su + d => {
                        return Err(Error::NotGraded("inconsistent presentation degrees".into()));
                    }
                    Some(_) => {}
                }
            }
        }
        let base = comp.iter().filter(|&&u| u < g).map(|&u| shift[u].expect("set")).min().unwrap_or(0);
        for &u in &comp {
            shift[u] = Some(shift[u].expect("set") - base);
        }
    }
    let s: Vec<i64> = shift.into_iter().map(|s| s.expect("visited")).collect();
    Ok((s[..g].to_vec(), s[g..].to_vec()))
}

fn columns(a: &SeriesMatrix) -> Vec<Vec<TruncatedSeries>> {
    (0..a.cols()).map(|j| (0..a.rows()).map(|i| a.get(i, j).clone()).collect()).collect()
}

/// Minimal generators of the submodule of `⊕ S(-row)` spanned by `cols`
/// (shifted by `cshift`) modulo `f`, as indices into `cols`.
fn minimal_columns(ctx: &Ctx, row: &[i64], cols: &[Vec<TruncatedSeries>], cshift: &[i64]) -> Vec<usize> {
    let field = ctx.ring.field;
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by_key(|&j| cshift[j]);
    let mut chosen = Vec::new();
    let mut k = 0;
    while k < order.len() {
        let d = cshift[order[k]];
        let coords = Coords::new(ctx, row, d);
        let mut span = Subspace::new(field, coords.len());
        for (l, col) in cols.iter().enumerate() {
            for m in ctx.monos(d - cshift[l]) {
                if !m.is_one() {
                    span.insert(&coords.dense(field, &ctx.mul_col(&m, col)));
                }
            }
        }
        for (i, &r) in row.iter().enumerate() {
            for m in ctx.monos(d - r - ctx.total) {
                span.insert(&coords.dense(field, &ctx.f_unit(i, &m)));
            }
        }
        while k < order.len() && cshift[order[k]] == d {
            let j = order[k];
            if span.insert(&coords.dense(field, &ctx.mul_col(&Monomial::one(ctx.weights.len()), &cols[j]))) {
                chosen.push(j);
            }
            k += 1;
        }
    }
    chosen
}

/// Degree `d` part of `{v : G v ∈ f·S^g}`.
fn relations_in_degree(ctx: &Ctx, row: &[i64], gens: &[Vec<TruncatedSeries>], gshift: &[i64], d: i64) -> Vec<GVec> {
    let field = ctx.ring.field;
    let target = Coords::new(ctx, row, d);
    let vcoords = Coords::new(ctx, gshift, d);
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for (j, m) in &vcoords.keys {
        cols.push(target.dense(field, &ctx.mul_col(m, &gens[*j])));
    }
    let nv = cols.len();
    for (i, &r) in row.iter().enumerate() {
        for m in ctx.monos(d - r - ctx.total) {
            cols.push(target.dense(field, &ctx.f_unit(i, &m)));
        }
    }
    if nv == 0 {
        return Vec::new();
    }
    let mut mat = DenseMatrix::zeros(field, target.len(), cols.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            if !x.is_zero() {
                mat.set(r, c, x.clone());
            }
        }
    }
    mat.nullspace().into_iter().map(|v| vcoords.sparse(&v[..nv])).collect()
}

struct Relations {
    gens: Vec<(i64, GVec)>,
}

/// Minimal homogeneous generators of the relation module in degrees
/// `lo..=hi`.
fn relation_generators(ctx: &Ctx, row: &[i64], gens: &[Vec<TruncatedSeries>], gshift: &[i64], lo: i64, hi: i64) -> Relations {
    let field = ctx.ring.field;
    let n = ctx.weights.len();
    let mut by_degree: HashMap<i64, Vec<GVec>> = HashMap::new();
    let mut out = Vec::new();
    for d in lo..=hi {
        let basis = relations_in_degree(ctx, row, gens, gshift, d);
        if basis.is_empty() {
            continue;
        }
        let coords = Coords::new(ctx, gshift, d);
        let mut span = Subspace::new(field, coords.len());
        for k in 0..n {
            let xk = Monomial::var(n, k, 1);
            if let Some(prev) = by_degree.get(&(d - ctx.weights[k] as i64)) {
                for v in prev {
                    let shifted: GVec = v.iter().map(|((j, m), c)| ((*j, m.mul(&xk)), c.clone())).collect();
                    span.insert(&coords.dense(field, &shifted));
                }
            }
        }
        for v in &basis {
            if span.insert(&coords.dense(field, v)) {
                out.push((d, v.clone()));
            }
        }
        by_degree.insert(d, basis);
    }
    Relations { gens: out }
}

/// `Ω(cok P)`, the kernel of `R^g → cok P` with `R = S/(f)`.
pub fn syzygy_module(p: &ModulePresentation) -> Result<Syzygy> {
    let ring = p.ring().clone();
    let weights = potential_weights(&p.potential)?;
    let total = p.potential.weighted_degree(&weights).expect("homogeneous") as i64;
    let ctx = Ctx {
        ring: ring.clone(),
        weights,
        total,
        f: p.potential.clone(),
    };
    let a = minimize(&p.matrix);
    let (row, cshift) = shifts(&ctx, &a)?;
    let cols = columns(&a);
    let chosen = minimal_columns(&ctx, &row, &cols, &cshift);
    let gens: Vec<Vec<TruncatedSeries>> = chosen.iter().map(|&j| cols[j].clone()).collect();
    let gshift: Vec<i64> = chosen.iter().map(|&j| cshift[j]).collect();
    let h = gens.len();
    if h == 0 {
        return Ok(Syzygy::Mcm(MatrixFactorization::zero(&p.potential)));
    }
    let lo = *gshift.iter().min().expect("nonempty");
    let hi = *gshift.iter().max().expect("nonempty") + total;
    let rel = relation_generators(&ctx, &row, &gens, &gshift, lo, hi);
    if rel.gens.len() == h {
        if let Some(x) = assemble_mf(&ctx, &rel, &gshift, h)? {
            return Ok(Syzygy::Mcm(x));
        }
    }
    // not maximal Cohen-Macaulay: scan further and return a presentation
    let wmax = *ctx.weights.iter().max().expect("nonempty") as i64;
    let window = total + 2 * wmax;
    let rel = relation_generators(&ctx, &row, &gens, &gshift, lo, hi + 2 * window);
    if rel.gens.iter().any(|(d, _)| *d > hi + window) {
        return Err(Error::Inconclusive("syzygy relations did not stabilize".into()));
    }
    let field = ring.field;
    let kept: Vec<Vec<TruncatedSeries>> = rel
        .gens
        .iter()
        .filter(|(d, v)| !in_f_multiples(&ctx, &gshift, *d, v, field))
        .map(|(_, v)| ctx.to_series(v, h))
        .collect();
    let m = if kept.is_empty() {
        SeriesMatrix::zeros(&ring, h, 0)
    } else {
        SeriesMatrix::from_rows(&ring, (0..h).map(|i| kept.iter().map(|c| c[i].clone()).collect()).collect())?
    };
    Ok(Syzygy::Module(ModulePresentation::new(p.potential.clone(), m)?))
}

fn in_f_multiples(ctx: &Ctx, gshift: &[i64], d: i64, v: &GVec, field: Field) -> bool {
    let coords = Coords::new(ctx, gshift, d);
    let mut span = Subspace::new(field, coords.len());
    for (j, &s) in gshift.iter().enumerate() {
        for m in ctx.monos(d - s - ctx.total) {
            span.insert(&coords.dense(field, &ctx.f_unit(j, &m)));
        }
    }
    span.contains(&coords.dense(field, v))
}

/// Builds `(φ, ψ)` from `h` relation generators, or `None` if `f·I` is
/// not in their span.
fn assemble_mf(ctx: &Ctx, rel: &Relations, gshift: &[i64], h: usize) -> Result<Option<MatrixFactorization>> {
    let phi_cols: Vec<Vec<TruncatedSeries>> = rel.gens.iter().map(|(_, v)| ctx.to_series(v, h)).collect();
    let bshift: Vec<i64> = rel.gens.iter().map(|(d, _)| *d).collect();
    let phi = SeriesMatrix::from_rows(&ctx.ring, (0..h).map(|i| phi_cols.iter().map(|c| c[i].clone()).collect()).collect())?;
    match solve_psi(ctx, &phi_cols, gshift, &bshift) {
        Some(psi) => MatrixFactorization::new(ctx.f.clone(), phi, psi).map(Some),
        None => Ok(None),
    }
}

/// `ψ` with `φ ψ = f·I` for the square matrix with columns `phi_cols`,
/// row shifts `row` and column shifts `col`.
fn solve_psi(ctx: &Ctx, phi_cols: &[Vec<TruncatedSeries>], row: &[i64], col: &[i64]) -> Option<SeriesMatrix> {
    let field = ctx.ring.field;
    let h = row.len();
    let mut psi = SeriesMatrix::zeros(&ctx.ring, h, h);
    for j in 0..h {
        let d = row[j] + ctx.total;
        let coords = Coords::new(ctx, row, d);
        let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
        let mut cols = Vec::new();
        for (k, c) in phi_cols.iter().enumerate() {
            for m in ctx.monos(d - col[k]) {
                cols.push(coords.dense(field, &ctx.mul_col(&m, c)));
                unknowns.push((k, m));
            }
        }
        let rhs = coords.dense(field, &ctx.f_unit(j, &Monomial::one(ctx.weights.len())));
        let mut mat = DenseMatrix::zeros(field, coords.len(), cols.len());
        for (c, colv) in cols.iter().enumerate() {
            for (r, x) in colv.iter().enumerate() {
                if !x.is_zero() {
                    mat.set(r, c, x.clone());
                }
            }
        }
        let sol = mat.solve(&rhs)?;
        let mut parts: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); h];
        for ((k, m), c) in unknowns.into_iter().zip(sol) {
            if !c.is_zero() {
                parts[k].push((m, c));
            }
        }
        for (k, t) in parts.into_iter().enumerate() {
            psi.set(k, j, TruncatedSeries::from_terms(&ctx.ring, t));
        }
    }
    Some(psi)
}

/// Completes a square weighted homogeneous `φ` with `det φ ≠ 0` and
/// `f·I ⊆ im φ` to a factorization `(φ, ψ)` of `f`.
pub fn complete_factorization(f: &TruncatedSeries, phi: &SeriesMatrix) -> Result<MatrixFactorization> {
    if phi.rows() != phi.cols() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", phi.rows(), phi.cols())));
    }
    let weights = potential_weights(f)?;
    let total = f.weighted_degree(&weights).expect("homogeneous") as i64;
    let ctx = Ctx {
        ring: f.ring().clone(),
        weights,
        total,
        f: f.clone(),
    };
    let (row, col) = shifts(&ctx, phi)?;
    let psi = solve_psi(&ctx, &columns(phi), &row, &col)
        .ok_or_else(|| Error::Invalid(format!("{phi} does not divide f·I")))?;
    MatrixFactorization::new(f.clone(), phi.clone(), psi)
}

/// `Ω^m(cok P)` for `m ≥ 1`.
pub fn syzygy_module_pow(p: &ModulePresentation, m: usize) -> Result<Syzygy> {
    if m == 0 {
        return Err(Error::Invalid("syzygy power must be positive".into()));
    }
    let mut cur = syzygy_module(p)?;
    for _ in 1..m {
        cur = match cur {
            Syzygy::Mcm(x) => Syzygy::Mcm(x.syzygy()),
            Syzygy::Module(q) => syzygy_module(&q)?,
        };
    }
    Ok(cur)
}
