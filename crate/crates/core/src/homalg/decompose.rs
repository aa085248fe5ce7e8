//! Krull-Remak-Schmidt decomposition through idempotents of the degree-zero
//! endomorphism algebra.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hom::{HomDegree, MapPair};
use super::iso::is_isomorphic;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::DenseMatrix;
use crate::mf::MatrixFactorization;
use crate::poly::Poly;
use crate::series::SeriesMatrix;

#[derive(Clone, Debug)]
pub struct Piece {
    pub name: Option<String>,
    pub mf: MatrixFactorization,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub free_rank: usize,
}

/// Serializable summary: `(name, size, multiplicity)` plus free rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionSummary {
    pub pieces: Vec<(String, usize, usize)>,
    pub free_rank: usize,
}

impl Decomposition {
    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            pieces: self
                .pieces
                .iter()
                .map(|p| (p.name.clone().unwrap_or_else(|| "?".into()), p.mf.size(), p.multiplicity))
                .collect(),
            free_rank: self.free_rank,
        }
    }

    /// Multiset as `name^k` terms joined by ` + `, sorted by name, free
    /// part written `R^k`.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                let n = p.name.clone().unwrap_or_else(|| format!("<size {}>", p.mf.size()));
                if p.multiplicity == 1 {
                    n
                } else {
                    format!("{n}^{}", p.multiplicity)
                }
            })
            .collect();
        parts.sort();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "R".into()
            } else {
                format!("R^{}", self.free_rank)
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Multiplicity of a named piece.
    pub fn count(&self, name: &str) -> usize {
        self.pieces
            .iter()
            .filter(|p| p.name.as_deref() == Some(name))
            .map(|p| p.multiplicity)
            .sum()
    }

    pub fn is_named(&self) -> bool {
        self.pieces.iter().all(|p| p.name.is_some())
    }

    /// Direct sum of all pieces with multiplicity, free part included.
    pub fn reassemble(&self, f: &crate::series::TruncatedSeries) -> Result<MatrixFactorization> {
        let mut acc = MatrixFactorization::zero(f);
        for p in &self.pieces {
            acc = acc.direct_sum(&p.mf.power(p.multiplicity)?)?;
        }
        for _ in 0..self.free_rank {
            acc = acc.direct_sum(&MatrixFactorization::free(f))?;
        }
        Ok(acc)
    }
}

const SPLIT_ATTEMPTS: usize = 40;
const LOCALITY_SAMPLES: usize = 3;

/// Complete decomposition of `cok X`, with pieces matched against `named`.
pub fn decompose(x: &MatrixFactorization, named: &[(String, MatrixFactorization)]) -> Result<Decomposition> {
    let (reduced, free_rank) = x.strip_trivial_summands();
    let mut rng = ChaCha8Rng::seed_from_u64(0xdec0);
    let mut indecomposables = Vec::new();
    let mut stack = vec![reduced];
    while let Some(y) = stack.pop() {
        if y.size() == 0 {
            continue;
        }
        match split_once(&y, &mut rng)? {
            Some((a, b)) => {
                stack.push(a);
                stack.push(b);
            }
            None => indecomposables.push(y),
        }
    }
    let mut pieces: Vec<Piece> = Vec::new();
    'outer: for y in indecomposables {
        for p in pieces.iter_mut() {
            if p.mf.size() == y.size() && is_isomorphic(&p.mf, &y)?.is_iso() {
                p.multiplicity += 1;
                continue 'outer;
            }
        }
        pieces.push(Piece {
            name: None,
            mf: y,
            multiplicity: 1,
        });
    }
    for p in pieces.iter_mut() {
        p.name = name_of(&p.mf, named)?;
    }
    pieces.sort_by(|a, b| a.name.cmp(&b.name).then(a.mf.size().cmp(&b.mf.size())));
    Ok(Decomposition { pieces, free_rank })
}

/// Name of the first entry of `named` isomorphic to the indecomposable `y`.
pub fn name_of(y: &MatrixFactorization, named: &[(String, MatrixFactorization)]) -> Result<Option<String>> {
    for (n, z) in named {
        if z.potential != y.potential {
            continue;
        }
        let (zs, fz) = z.strip_trivial_summands();
        if fz == 0 && zs.size() == y.size() && is_isomorphic(&zs, y)?.is_iso() {
            return Ok(Some(n.clone()));
        }
    }
    Ok(None)
}

/// Whether a reduced factorization is indecomposable.
pub fn is_indecomposable(x: &MatrixFactorization) -> Result<bool> {
    let (r, free) = x.strip_trivial_summands();
    if r.size() == 0 {
        return Ok(free == 1);
    }
    if free > 0 {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1dec);
    Ok(split_once(&r, &mut rng)?.is_none())
}

/// Degree-zero endomorphisms with their constant parts `α(0) ⊕ β(0)`.
struct EndAlgebra {
    hom: HomDegree,
    pairs: Vec<MapPair>,
    consts: Vec<DenseMatrix>,
}

impl EndAlgebra {
    fn new(x: &MatrixFactorization) -> Result<EndAlgebra> {
        let g = x.grading()?;
        let hom = HomDegree::compute(x, &g, x, &g, 0, None);
        let pairs = hom.pairs();
        let consts = pairs.iter().map(rho).collect();
        Ok(EndAlgebra { hom, pairs, consts })
    }

    fn element(&self, c: &[Scalar]) -> MapPair {
        self.hom.pair_from_vec(&self.hom.combine(c))
    }

    fn rho_of(&self, c: &[Scalar], field: Field) -> DenseMatrix {
        let (r, k) = (self.consts[0].rows, self.consts[0].cols);
        let mut m = DenseMatrix::zeros(field, r, k);
        for (b, ck) in self.consts.iter().zip(c) {
            if !ck.is_zero() {
                m = m.add(&b.scale(ck));
            }
        }
        m
    }
}

fn rho(p: &MapPair) -> DenseMatrix {
    let a = p.alpha.constant_part();
    let b = p.beta.constant_part();
    let n = a.rows;
    let mut out = DenseMatrix::zeros(a.field, 2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, a.get(i, j).clone());
            out.set(n + i, n + j, b.get(i, j).clone());
        }
    }
    out
}

/// `(t - λ)^N` test for a monic characteristic polynomial.
fn is_pure_power(cp: &[Scalar]) -> bool {
    let n = cp.len() - 1;
    if n == 0 {
        return true;
    }
    let f = cp[0].field();
    let Some(ninv) = f.from_i64(n as i64).inv() else {
        return false;
    };
    let lambda = -(&cp[n - 1] * &ninv);
    Poly::linear(&lambda).pow(n).coeffs == cp
}

/// Splits `x` into two nonzero summands, or returns `None` when `x` is
/// indecomposable.
fn split_once(x: &MatrixFactorization, rng: &mut ChaCha8Rng) -> Result<Option<(MatrixFactorization, MatrixFactorization)>> {
    let field = x.ring().field;
    let alg = EndAlgebra::new(x)?;
    let m = alg.pairs.len();
    if m == 0 {
        return Err(Error::Invalid("empty endomorphism algebra".into()));
    }
    let mut pure = 0;
    for _ in 0..SPLIT_ATTEMPTS {
        let c: Vec<Scalar> = (0..m).map(|_| field.random(rng)).collect();
        let cp = Poly::new(field, alg.rho_of(&c, field).charpoly());
        if is_pure_power(&cp.coeffs) {
            pure += 1;
            if pure >= LOCALITY_SAMPLES {
                return Ok(None);
            }
            continue;
        }
        let roots = cp.roots(rng);
        let Some(lambda) = roots.first() else {
            continue;
        };
        let mult = cp.root_multiplicity(lambda);
        let lin_pow = Poly::linear(lambda).pow(mult);
        let h = cp.divrem(&lin_pow).0;
        // e ≡ 1 mod (t-λ)^mult, e ≡ 0 mod h
        let (_, s, _) = h.xgcd(&lin_pow);
        let e_poly = h.mul(&s).rem(&cp);
        let a = alg.element(&c);
        let e = lift_idempotent(x, eval_poly(&e_poly, &a, x)?)?;
        return Ok(Some(split_by_idempotent(x, &e)?));
    }
    Err(Error::Inconclusive(format!(
        "no eigenvalue in {field} found for a random endomorphism after {SPLIT_ATTEMPTS} attempts"
    )))
}

fn eval_poly(p: &Poly, a: &MapPair, x: &MatrixFactorization) -> Result<MapPair> {
    let id = MapPair::identity(x);
    let r = x.ring();
    let mut acc = id.scale(&r.constant(x.ring().field.zero()));
    for c in p.coeffs.iter().rev() {
        acc = acc.compose(a)?.add(&id.scale(&r.constant(c.clone())))?;
    }
    Ok(acc)
}

/// Newton iteration `e ← 3e² − 2e³` until `e² = e`.
fn lift_idempotent(x: &MatrixFactorization, mut e: MapPair) -> Result<MapPair> {
    let r = x.ring();
    for _ in 0..64 {
        let e2 = e.compose(&e)?;
        if e2 == e {
            return Ok(e);
        }
        let e3 = e2.compose(&e)?;
        e = e2.scale(&r.int(3)).sub(&e3.scale(&r.int(2)))?;
    }
    Err(Error::Inconclusive("idempotent lifting did not converge".into()))
}

/// Columns of `a` followed by columns of `1 - a` whose constant parts form
/// a basis.
fn adapted_basis(a: &SeriesMatrix) -> Result<(SeriesMatrix, usize)> {
    let n = a.rows();
    let r = a.ring();
    let comp = SeriesMatrix::identity(r, n).sub(a)?;
    let mut span = crate::linalg::Subspace::new(r.field, n);
    let mut cols: Vec<Vec<crate::series::TruncatedSeries>> = Vec::new();
    let mut first = 0;
    for (k, m) in [a, &comp].into_iter().enumerate() {
        let c0 = m.constant_part();
        for j in 0..n {
            let v: Vec<Scalar> = (0..n).map(|i| c0.get(i, j).clone()).collect();
            if span.insert(&v) {
                cols.push((0..n).map(|i| m.get(i, j).clone()).collect());
                if k == 0 {
                    first += 1;
                }
            }
        }
    }
    if cols.len() != n {
        return Err(Error::Invalid("idempotent images do not span".into()));
    }
    let mut p = SeriesMatrix::zeros(r, n, n);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, e) in col.into_iter().enumerate() {
            p.set(i, j, e);
        }
    }
    Ok((p, first))
}

fn split_by_idempotent(x: &MatrixFactorization, e: &MapPair) -> Result<(MatrixFactorization, MatrixFactorization)> {
    let (p0, r0) = adapted_basis(&e.alpha)?;
    let (p1, r1) = adapted_basis(&e.beta)?;
    if r0 != r1 || r0 == 0 || r0 == x.size() {
        return Err(Error::Invalid(format!("idempotent ranks {r0}, {r1} do not split")));
    }
    let phi = p0.invert()?.mul(&x.phi)?.mul(&p1)?;
    let psi = p1.invert()?.mul(&x.psi)?.mul(&p0)?;
    let n = x.size();
    let top: Vec<usize> = (0..r0).collect();
    let bot: Vec<usize> = (r0..n).collect();
    if !phi.submatrix(&top, &bot).is_zero()
        || !phi.submatrix(&bot, &top).is_zero()
        || !psi.submatrix(&top, &bot).is_zero()
        || !psi.submatrix(&bot, &top).is_zero()
    {
        return Err(Error::Invalid("basis change did not block-diagonalize".into()));
    }
    let a = MatrixFactorization::new(x.potential.clone(), phi.submatrix(&top, &top), psi.submatrix(&top, &top))?;
    let b = MatrixFactorization::new(x.potential.clone(), phi.submatrix(&bot, &bot), psi.submatrix(&bot, &bot))?;
    Ok((a, b))
}
