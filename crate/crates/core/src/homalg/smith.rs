//! Smith normal form over `k[[t]]` and cyclic decompositions over
//! `k[[x]]/(x^a)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mf::ModulePresentation;
use crate::series::{Monomial, SeriesMatrix, TruncatedSeries};

/// Divides by `t^v` (all terms have order at least `v`).
fn shift_down(s: &TruncatedSeries, v: u32) -> TruncatedSeries {
    TruncatedSeries::from_terms(s.ring(), s.terms().map(|(m, c)| (Monomial(vec![m.0[0] - v]), c.clone())))
}

/// Elementary divisor exponents `e₁ ≤ e₂ ≤ …` of a matrix over `k[[t]]`.
pub fn smith_over_dvr(m: &SeriesMatrix) -> Result<Vec<u32>> {
    if m.ring().nvars() != 1 {
        return Err(Error::Invalid("smith_over_dvr needs a one-variable ring".into()));
    }
    let mut a: Vec<Vec<TruncatedSeries>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut exps = Vec::new();
    while !a.is_empty() && !a[0].is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(v) = e.order() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            return Err(Error::Inconclusive(format!(
                "{} elementary divisors vanish to precision {}",
                a.len().min(a[0].len()),
                m.ring().prec
            )));
        };
        exps.push(v);
        let uinv = shift_down(&a[pi][pj], v).invert_unit()?;
        let prow = a[pi].clone();
        // clear the pivot column
        for (i, row) in a.iter_mut().enumerate() {
            if i == pi || row[pj].is_zero() {
                continue;
            }
            let q = shift_down(&row[pj], v).mul(&uinv)?;
            for (j, x) in row.iter_mut().enumerate() {
                if !prow[j].is_zero() {
                    *x = x.sub(&q.mul(&prow[j])?)?;
                }
            }
        }
        // the pivot row is now cleared by column operations, which leave
        // the other rows untouched since their pivot-column entries are zero
        a.remove(pi);
        for row in a.iter_mut() {
            row.remove(pj);
        }
    }
    exps.sort();
    Ok(exps)
}

/// Cyclic decomposition `⊕ R/(x^e)` of a module over `R = k[[x]]/(x^a)`
/// presented by `P`; returns `e ↦ multiplicity` with `e > 0`.
pub fn decompose_artinian(p: &ModulePresentation) -> Result<BTreeMap<u32, usize>> {
    let r = p.ring();
    if r.nvars() != 1 {
        return Err(Error::Invalid("decompose_artinian needs a one-variable ring".into()));
    }
    let f = &p.potential;
    let terms: Vec<_> = f.terms().collect();
    let a = match terms.as_slice() {
        [(m, _)] => m.0[0],
        _ => return Err(Error::Invalid(format!("potential {f} is not a power of the variable"))),
    };
    let g = p.generators();
    let fa = SeriesMatrix::scalar(r, g, &r.var_pow(0, a));
    let full = if p.matrix.cols() == 0 {
        fa
    } else {
        SeriesMatrix::block(&[vec![p.matrix.clone(), fa]])?
    };
    let mut out = BTreeMap::new();
    for e in smith_over_dvr(&full)? {
        if e > 0 {
            *out.entry(e.min(a)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::series::Ring;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring() -> Ring {
        Ring::new(&["t"], Field::default(), 30).unwrap()
    }

    #[test]
    fn diagonal_and_triangular() {
        let r = ring();
        let d = SeriesMatrix::parse(&r, &[&["t", "0"], &["0", "t^3"]]).unwrap();
        assert_eq!(smith_over_dvr(&d).unwrap(), vec![1, 3]);
        let u = SeriesMatrix::parse(&r, &[&["t", "t^2"], &["0", "t^3"]]).unwrap();
        assert_eq!(smith_over_dvr(&u).unwrap(), vec![1, 3]);
        let z = SeriesMatrix::parse(&r, &[&["t", "0"], &["0", "0"]]).unwrap();
        assert!(matches!(smith_over_dvr(&z), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn invariant_under_unit_conjugation() {
        use rand::Rng;
        let r = ring();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = SeriesMatrix::parse(&r, &[&["t", "0", "0"], &["0", "t^3", "0"], &["0", "0", "t^3"]]).unwrap();
        for _ in 0..5 {
            let mut rand_unit = || {
                let mut m = SeriesMatrix::zeros(&r, 3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        let c0 = if i == j { rng.gen_range(1..100) } else { rng.gen_range(0..100) };
                        let s = r.parse(&format!("{c0}+{}*t+{}*t^2", rng.gen_range(0..50), rng.gen_range(0..50))).unwrap();
                        m.set(i, j, s);
                    }
                }
                m
            };
            let (p, q) = (rand_unit(), rand_unit());
            if p.constant_part().inverse().is_none() || q.constant_part().inverse().is_none() {
                continue;
            }
            let c = p.mul(&d).unwrap().mul(&q).unwrap();
            assert_eq!(smith_over_dvr(&c).unwrap(), vec![1, 3, 3]);
        }
    }

    #[test]
    fn artinian_identity_is_empty() {
        let r = ring();
        let p = ModulePresentation::new(r.var_pow(0, 4), SeriesMatrix::identity(&r, 2)).unwrap();
        assert!(decompose_artinian(&p).unwrap().is_empty());
        let p = ModulePresentation::new(r.var_pow(0, 4), SeriesMatrix::parse(&r, &[&["t^2", "t"], &["0", "t^5"]]).unwrap()).unwrap();
        let d = decompose_artinian(&p).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(1, 1), (4, 1)]);
    }
}
