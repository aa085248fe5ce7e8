//! Enumeration of indecomposable MCM modules over a curve `f(x) + y^n` by
//! closing the covers of the base modules under `Ω` and almost split
//! middles.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::homalg::{almost_split_middle, decompose, decompose_artinian, is_isomorphic};
use crate::mf::{branched_cover, detect_cover, quotient_presentation, BranchedCoverSpec, MatrixFactorization};
use crate::series::{Ring, SeriesMatrix, TruncatedSeries};

/// One indecomposable found by knitting.
#[derive(Clone, Debug)]
pub struct Knitted {
    pub mf: MatrixFactorization,
    /// Index of `Ω` of this module.
    pub syzygy: usize,
    /// `e ↦ multiplicity` in `Z/yZ ≅ ⊕ R/(x^e)`.
    pub quotient: BTreeMap<u32, usize>,
    /// For covers of `R/(x^e)`, the exponent `e`.
    pub cover_of: Option<u32>,
    /// Indices of the modules whose almost split middle contains this one.
    pub ar_middle_of: Vec<usize>,
    /// Middle of the almost split sequence ending here: `(index, multiplicity)`
    /// and free rank.
    pub ar_middle: Vec<(usize, usize)>,
    pub ar_free: usize,
}

/// Base ring `k[[x]]/(x^a)`, cover variable index and `n` for a potential
/// `x^a + y^n`.
pub fn base_of(f: &TruncatedSeries) -> Result<(Ring, u32, usize, u32)> {
    let (yi, n) = detect_cover(f).ok_or_else(|| Error::Invalid(format!("{f} is not a cover potential")))?;
    let r = f.ring();
    if r.nvars() != 2 {
        return Err(Error::Invalid("knitting needs a curve potential in two variables".into()));
    }
    let xi = 1 - yi;
    let a = f
        .terms()
        .find(|(m, _)| m.0[yi] == 0)
        .map(|(m, _)| m.0[xi])
        .ok_or_else(|| Error::Invalid("potential has no base part".into()))?;
    let base = Ring::new(&[r.vars()[xi].as_str()], r.field, r.prec)?;
    Ok((base, a, yi, n))
}

/// `Ω_{R#}(R/(x^e))`.
pub fn base_cover(f: &TruncatedSeries, e: u32) -> Result<MatrixFactorization> {
    let (base, a, yi, n) = base_of(f)?;
    let x = MatrixFactorization::new(
        base.var_pow(0, a),
        SeriesMatrix::scalar(&base, 1, &base.var_pow(0, e)),
        SeriesMatrix::scalar(&base, 1, &base.var_pow(0, a - e)),
    )?;
    let c = branched_cover(&x, &BranchedCoverSpec::new(n, &f.ring().vars()[yi])?)?;
    // same variable order as f
    let target = f.ring();
    let map: Vec<usize> = c.ring().vars().iter().map(|v| target.var_index(v).expect("same names")).collect();
    MatrixFactorization::new(f.clone(), c.phi.embed(target, &map), c.psi.embed(target, &map))
}

/// `Z/yZ` as a multiset of cyclic `R`-modules.
pub fn quotient_signature(z: &MatrixFactorization) -> Result<BTreeMap<u32, usize>> {
    let (_, _, yi, _) = base_of(&z.potential)?;
    decompose_artinian(&quotient_presentation(z, 1)?.eliminate_var(yi)?)
}

/// Indecomposable non-free modules reachable from the base covers.
pub fn knit(f: &TruncatedSeries, limit: usize) -> Result<Vec<Knitted>> {
    let (_, a, _, _) = base_of(f)?;
    let mut found: Vec<Knitted> = Vec::new();
    let add = |found: &mut Vec<Knitted>, x: MatrixFactorization, cover_of: Option<u32>| -> Result<usize> {
        for (i, k) in found.iter().enumerate() {
            if is_isomorphic(&k.mf, &x)?.is_iso() {
                return Ok(i);
            }
        }
        let quotient = quotient_signature(&x)?;
        found.push(Knitted {
            mf: x,
            syzygy: usize::MAX,
            quotient,
            cover_of,
            ar_middle_of: Vec::new(),
            ar_middle: Vec::new(),
            ar_free: 0,
        });
        Ok(found.len() - 1)
    };
    for e in 1..a {
        add(&mut found, base_cover(f, e)?, Some(e))?;
    }
    let mut next = 0;
    while next < found.len() {
        if found.len() > limit {
            return Err(Error::Invalid(format!("more than {limit} indecomposables")));
        }
        let z = found[next].mf.clone();
        let oz = add(&mut found, z.syzygy(), None)?;
        found[next].syzygy = oz;
        let mid = decompose(&almost_split_middle(&z)?, &[])?;
        found[next].ar_free = mid.free_rank;
        for p in mid.pieces {
            let i = add(&mut found, p.mf, None)?;
            if !found[i].ar_middle_of.contains(&next) {
                found[i].ar_middle_of.push(next);
            }
            found[next].ar_middle.push((i, p.multiplicity));
        }
        next += 1;
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn explore(f: &str) {
        let r = Ring::new(&["x", "y"], Field::default(), 30).unwrap();
        let f = r.parse(f).unwrap();
        let ks = knit(&f, 40).unwrap();
        for (i, k) in ks.iter().enumerate() {
            let g = k.mf.grading().unwrap();
            let mut rows = g.row.clone();
            rows.sort();
            println!(
                "{i}: size {} rank {} cover {:?} omega {} quot {:?} ar {:?} rows {:?}\n   {}",
                k.mf.size(),
                k.mf.rank().unwrap(),
                k.cover_of,
                k.syzygy,
                k.quotient,
                k.ar_middle_of,
                rows,
                k.mf.phi
            );
        }
    }

    #[test]
    #[ignore]
    fn explore_e6() {
        explore("x^4+y^3");
    }

    #[test]
    #[ignore]
    fn explore_e8() {
        explore("x^5+y^3");
    }
}
