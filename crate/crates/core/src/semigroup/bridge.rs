//! Passage from `t`-graded submodules of `k((t))^c` to matrix factorizations
//! of `x^a + y^n`, using `x = ±t^n`, `y = ±t^a`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{colon, FractionalIdeal, SemigroupRing};
use crate::catalog::{base_of, match_entry, SingularityCatalog};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::homalg::complete_factorization;
use crate::linalg::{DenseMatrix, Subspace};
use crate::mf::MatrixFactorization;
use crate::series::{Monomial, SeriesMatrix, TruncatedSeries};

/// Identification of `S/(x^a + y^n)` with `k[[t^n, t^a]]`.
#[derive(Clone, Debug)]
pub struct Bridge {
    pub potential: TruncatedSeries,
    pub ring: SemigroupRing,
    xi: usize,
    yi: usize,
    /// `t`-degrees of `x` and `y`.
    wx: i64,
    wy: i64,
    sx: Scalar,
    sy: Scalar,
}

impl Bridge {
    pub fn new(f: &TruncatedSeries) -> Result<Self> {
        let (_, a, yi, n) = base_of(f)?;
        let xi = 1 - yi;
        let r = f.ring();
        let expect = r.var_pow(xi, a).add(&r.var_pow(yi, n))?;
        if *f != expect {
            return Err(Error::Invalid(format!("{f} is not of the form x^a + y^n")));
        }
        let field = r.field;
        let (one, minus) = (field.one(), field.from_i64(-1));
        // x^a + y^n = 0 needs sx^a = -sy^n
        let (sx, sy) = if n % 2 == 1 {
            (one, minus)
        } else if a % 2 == 1 {
            (minus, one)
        } else {
            return Err(Error::Invalid("exponents are not coprime".into()));
        };
        Ok(Bridge {
            potential: f.clone(),
            ring: SemigroupRing::new(n, a)?,
            xi,
            yi,
            wx: n as i64,
            wy: a as i64,
            sx,
            sy,
        })
    }

    fn field(&self) -> Field {
        self.potential.ring().field
    }
}

/// Submodule `K ⊂ k((t))^c` with `K_D ⊂ k^c` for `lo ≤ D ≤ hi` and
/// `K_D = K_hi` beyond.
struct Graded {
    c: usize,
    lo: i64,
    hi: i64,
    spaces: BTreeMap<i64, Vec<Vec<Scalar>>>,
}

impl Graded {
    fn at(&self, d: i64) -> &[Vec<Scalar>] {
        if d < self.lo {
            return &[];
        }
        self.spaces.get(&d.min(self.hi)).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Minimal generators `(degree, vector)` of `K` over `k[[t^wx, t^wy]]`.
fn generators(b: &Bridge, k: &Graded) -> Vec<(i64, Vec<Scalar>)> {
    let mut out = Vec::new();
    for d in k.lo..=k.hi + b.wx.max(b.wy) {
        let mut sub = Subspace::new(b.field(), k.c);
        for v in k.at(d - b.wx).iter().chain(k.at(d - b.wy)) {
            sub.insert(v);
        }
        for v in k.at(d) {
            if sub.insert(v) {
                out.push((d, v.clone()));
            }
        }
    }
    out
}

/// `(p, q, k)` for `x^p y^q e_k` in degree `d`.
fn monomials(b: &Bridge, gens: &[(i64, Vec<Scalar>)], d: i64) -> Vec<(u32, u32, usize)> {
    let mut out = Vec::new();
    for (k, (dk, _)) in gens.iter().enumerate() {
        let rest = d - dk;
        if rest < 0 {
            continue;
        }
        for q in 0..=rest / b.wy {
            let r = rest - q * b.wy;
            if r % b.wx == 0 {
                out.push(((r / b.wx) as u32, q as u32, k));
            }
        }
    }
    out
}

/// Square presentation over `S` of the module generated by `gens`, as a
/// factorization of the potential.
fn factorization(b: &Bridge, gens: &[(i64, Vec<Scalar>)], c: usize) -> Result<MatrixFactorization> {
    let f = &b.potential;
    let g = gens.len();
    if g == 0 {
        return Ok(MatrixFactorization::zero(f));
    }
    let field = b.field();
    let dmin = gens.iter().map(|(d, _)| *d).min().expect("nonempty");
    let dmax = gens.iter().map(|(d, _)| *d).max().expect("nonempty");
    let cap = dmax + 2 * b.wx * b.wy + b.wx + b.wy;
    let mut rels: BTreeMap<i64, Vec<BTreeMap<(u32, u32, usize), Scalar>>> = BTreeMap::new();
    let mut found: Vec<BTreeMap<(u32, u32, usize), Scalar>> = Vec::new();
    let mut d = dmin;
    while found.len() < g {
        if d > cap {
            return Err(Error::Inconclusive(format!("found {} of {g} relations by degree {cap}", found.len())));
        }
        let mons = monomials(b, gens, d);
        let index: BTreeMap<(u32, u32, usize), usize> = mons.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut img = DenseMatrix::zeros(field, c, mons.len());
        for (col, &(p, q, k)) in mons.iter().enumerate() {
            let s = &b.sx.pow(p as u64) * &b.sy.pow(q as u64);
            for (row, x) in gens[k].1.iter().enumerate() {
                img.set(row, col, &s * x);
            }
        }
        let mut sub = Subspace::new(field, mons.len());
        for (shift, (dp, dq)) in [(b.wx, (1, 0)), (b.wy, (0, 1))] {
            for r in rels.get(&(d - shift)).into_iter().flatten() {
                let mut v = vec![field.zero(); mons.len()];
                for (&(p, q, k), x) in r {
                    v[index[&(p + dp, q + dq, k)]] = x.clone();
                }
                sub.insert(&v);
            }
        }
        let mut here = Vec::new();
        for v in img.nullspace() {
            let as_map = |v: &[Scalar]| -> BTreeMap<(u32, u32, usize), Scalar> {
                mons.iter().zip(v).filter(|(_, x)| !x.is_zero()).map(|(m, x)| (*m, x.clone())).collect()
            };
            if sub.insert(&v) {
                found.push(as_map(&v));
            }
            here.push(as_map(&v));
        }
        rels.insert(d, here);
        d += 1;
    }
    let r = f.ring();
    let mut phi = SeriesMatrix::zeros(r, g, g);
    for (col, rel) in found.iter().enumerate() {
        for (&(p, q, k), x) in rel {
            let mut e = vec![0; 2];
            e[b.xi] = p;
            e[b.yi] = q;
            let t = r.term(x.clone(), Monomial(e));
            let cur = phi.get(k, col).add(&t)?;
            phi.set(k, col, cur);
        }
    }
    complete_factorization(f, &phi)
}

/// The factorization whose cokernel is the ideal `I`.
pub fn ideal_factorization(b: &Bridge, i: &FractionalIdeal) -> Result<MatrixFactorization> {
    let field = b.field();
    let gens: Vec<(i64, Vec<Scalar>)> = i.gens().iter().map(|&e| (e, vec![field.one()])).collect();
    factorization(b, &gens, 1)
}

/// A matrix of `t`-powers `⊕ sources → ⊕ targets`; `entries[r][s]` is the
/// exponent of the component from source `s` to target `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TPowerMap {
    pub sources: Vec<FractionalIdeal>,
    pub targets: Vec<FractionalIdeal>,
    pub entries: Vec<Vec<Option<i64>>>,
}

impl TPowerMap {
    /// A column `⊕ sources → target`.
    pub fn column(sources: Vec<FractionalIdeal>, target: FractionalIdeal, exps: Vec<Option<i64>>) -> Self {
        TPowerMap {
            sources,
            targets: vec![target],
            entries: vec![exps],
        }
    }

    /// Every component maps its source into its target.
    pub fn check(&self, ring: &SemigroupRing) -> Result<()> {
        if self.entries.len() != self.targets.len() || self.entries.iter().any(|r| r.len() != self.sources.len()) {
            return Err(Error::DimensionMismatch("t-power map shape".into()));
        }
        for (r, row) in self.entries.iter().enumerate() {
            for (s, e) in row.iter().enumerate() {
                if let Some(m) = e {
                    if !colon(ring, &self.targets[r], &self.sources[s]).contains(ring, *m) {
                        return Err(Error::Invalid(format!(
                            "t^{m} does not map {} into {}",
                            self.sources[s], self.targets[r]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Degree offsets making every component degree preserving.
    fn shifts(&self) -> Result<(Vec<i64>, Vec<i64>)> {
        let (ns, nt) = (self.sources.len(), self.targets.len());
        let mut src: Vec<Option<i64>> = vec![None; ns];
        let mut tgt: Vec<Option<i64>> = vec![None; nt];
        for start in 0..ns {
            if src[start].is_some() {
                continue;
            }
            src[start] = Some(0);
            let mut changed = true;
            while changed {
                changed = false;
                for (r, row) in self.entries.iter().enumerate() {
                    for (s, e) in row.iter().enumerate() {
                        let Some(m) = e else { continue };
                        match (src[s], tgt[r]) {
                            (Some(a), None) => {
                                tgt[r] = Some(a - m);
                                changed = true;
                            }
                            (None, Some(b)) => {
                                src[s] = Some(b + m);
                                changed = true;
                            }
                            (Some(a), Some(b)) if a != b + m => {
                                return Err(Error::Invalid("map is not homogeneous for the t-grading".into()))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok((
            src.into_iter().map(|s| s.unwrap_or(0)).collect(),
            tgt.into_iter().map(|t| t.unwrap_or(0)).collect(),
        ))
    }

    /// Applies the map to `v` in degree `d`, given the shifts.
    fn apply(&self, field: Field, v: &[Scalar]) -> Vec<Scalar> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(e, _)| e.is_some())
                    .fold(field.zero(), |acc, (_, x)| &acc + x)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct KernelRecord {
    pub mf: MatrixFactorization,
    pub rank: usize,
    /// Degrees of the minimal generators.
    pub generator_degrees: Vec<i64>,
    pub name: Option<String>,
    /// The generators map to zero.
    pub exact: bool,
}

/// Kernel of a `t`-power map as a factorization, matched against `cat`.
pub fn kernel_of_map(b: &Bridge, d: &TPowerMap, cat: Option<&SingularityCatalog>) -> Result<KernelRecord> {
    d.check(&b.ring)?;
    let field = b.field();
    let ring = &b.ring;
    let (ss, ts) = d.shifts()?;
    let c = d.sources.len();
    let lo = d.sources.iter().zip(&ss).map(|(i, s)| i.order() + s).min().unwrap_or(0);
    let hi = d
        .sources
        .iter()
        .zip(&ss)
        .map(|(i, s)| i.threshold(ring) + s)
        .chain(d.targets.iter().zip(&ts).map(|(j, t)| j.threshold(ring) + t))
        .max()
        .unwrap_or(0);
    let mut spaces = BTreeMap::new();
    for deg in lo..=hi {
        let present: Vec<usize> = (0..c).filter(|&s| d.sources[s].contains(ring, deg - ss[s])).collect();
        let mut m = DenseMatrix::zeros(field, d.targets.len(), present.len());
        for (col, &s) in present.iter().enumerate() {
            for (r, row) in d.entries.iter().enumerate() {
                if row[s].is_some() {
                    m.set(r, col, field.one());
                }
            }
        }
        let basis: Vec<Vec<Scalar>> = m
            .nullspace()
            .into_iter()
            .map(|v| {
                let mut full = vec![field.zero(); c];
                for (x, &s) in v.into_iter().zip(&present) {
                    full[s] = x;
                }
                full
            })
            .collect();
        spaces.insert(deg, basis);
    }
    let k = Graded { c, lo, hi, spaces };
    let gens = generators(b, &k);
    let exact = gens.iter().all(|(_, v)| d.apply(field, v).iter().all(Scalar::is_zero));
    let mf = factorization(b, &gens, c)?;
    let rank = mf.rank()?;
    let name = match cat {
        Some(cat) => match_entry(&mf, cat)?.or_else(|| cat.decompose(&mf).ok().map(|x| x.label())),
        None => None,
    };
    Ok(KernelRecord {
        mf,
        rank,
        generator_degrees: gens.iter().map(|(d, _)| *d).collect(),
        name,
        exact,
    })
}
