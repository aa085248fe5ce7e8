//! Isomorphism testing of factorizations up to trivial summands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hom::{check_same_potential, HomDegree, MapPair};
use crate::error::Result;
use crate::field::Scalar;
use crate::linalg::{DenseMatrix, Subspace};
use crate::mf::{Grading, MatrixFactorization};

pub const ISO_TRIALS: usize = 20;
/// Largest evaluation grid used by the deterministic fallback.
pub const GRID_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    FreeRank { left: usize, right: usize },
    Size { left: usize, right: usize },
    /// No element of the candidate Hom pieces is invertible. `exhaustive`
    /// is true when this was certified on an evaluation grid rather than
    /// by random sampling alone.
    NoInvertibleMap { hom_dim: usize, exhaustive: bool },
}

#[derive(Clone, Debug)]
pub enum IsoVerdict {
    /// `witness` maps the reduced form of the source onto the reduced form
    /// of the target.
    Isomorphic {
        source: MatrixFactorization,
        target: MatrixFactorization,
        witness: MapPair,
    },
    NotIsomorphic(Refutation),
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }
}

/// Whether `cok X ≅ cok Y`.
pub fn is_isomorphic(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<IsoVerdict> {
    is_isomorphic_seeded(x, y, 0x150)
}

pub fn is_isomorphic_seeded(x: &MatrixFactorization, y: &MatrixFactorization, seed: u64) -> Result<IsoVerdict> {
    check_same_potential(x, y)?;
    let (xs, fx) = x.strip_trivial_summands();
    let (ys, fy) = y.strip_trivial_summands();
    if fx != fy {
        return Ok(IsoVerdict::NotIsomorphic(Refutation::FreeRank { left: fx, right: fy }));
    }
    if xs.size() != ys.size() {
        return Ok(IsoVerdict::NotIsomorphic(Refutation::Size {
            left: xs.size(),
            right: ys.size(),
        }));
    }
    if xs.size() == 0 {
        let witness = MapPair::identity(&xs);
        return Ok(IsoVerdict::Isomorphic {
            source: xs,
            target: ys,
            witness,
        });
    }
    let gx = xs.grading()?;
    let gy = ys.grading()?;
    let pieces = candidate_pieces(&xs, &gx, &ys, &gy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match find_unit(&pieces, xs.ring().field, &mut rng) {
        UnitSearch::Found(witness) => {
            debug_assert!(witness.is_morphism(&xs, &ys));
            Ok(IsoVerdict::Isomorphic {
                source: xs,
                target: ys,
                witness,
            })
        }
        UnitSearch::None { dim, exhaustive } => Ok(IsoVerdict::NotIsomorphic(Refutation::NoInvertibleMap {
            hom_dim: dim,
            exhaustive,
        })),
    }
}

/// Hom pieces in the degrees where a map can have constant entries.
pub(crate) fn candidate_pieces(
    x: &MatrixFactorization,
    gx: &Grading,
    y: &MatrixFactorization,
    gy: &Grading,
) -> Vec<HomDegree> {
    let mut degs: Vec<i64> = Vec::new();
    for &a in &gy.row {
        for &b in &gx.row {
            degs.push(a - b);
        }
    }
    degs.sort();
    degs.dedup();
    degs.into_iter()
        .map(|d| HomDegree::compute(x, gx, y, gy, d, None))
        .filter(|h| h.dim() > 0)
        .collect()
}

enum UnitSearch {
    Found(MapPair),
    None { dim: usize, exhaustive: bool },
}

fn block_constant(p: &MapPair) -> DenseMatrix {
    let a = p.alpha.constant_part();
    let b = p.beta.constant_part();
    let (n, m) = (a.rows, a.cols);
    let mut out = DenseMatrix::zeros(a.field, 2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            out.set(i, j, a.get(i, j).clone());
            out.set(n + i, m + j, b.get(i, j).clone());
        }
    }
    out
}

fn find_unit<R: Rng>(pieces: &[HomDegree], field: crate::field::Field, rng: &mut R) -> UnitSearch {
    let consts: Vec<Vec<DenseMatrix>> = pieces
        .iter()
        .map(|h| h.pairs().iter().map(block_constant).collect())
        .collect();
    let dim: usize = pieces.iter().map(HomDegree::dim).sum();
    let Some(shape) = consts.iter().flatten().next().map(|m| (m.rows, m.cols)) else {
        return UnitSearch::None { dim, exhaustive: true };
    };
    if shape.0 != shape.1 {
        return UnitSearch::None { dim, exhaustive: true };
    }
    let build = |coeffs: &[Vec<Scalar>]| -> MapPair {
        let mut acc: Option<MapPair> = None;
        for (h, c) in pieces.iter().zip(coeffs) {
            let p = h.pair_from_vec(&h.combine(c));
            acc = Some(match acc {
                None => p,
                Some(a) => a.add(&p).expect("same shape"),
            });
        }
        acc.expect("nonempty")
    };
    let evaluate = |coeffs: &[Vec<Scalar>]| -> bool {
        let mut m = DenseMatrix::zeros(field, shape.0, shape.1);
        for (cs, c) in consts.iter().zip(coeffs) {
            for (b, ck) in cs.iter().zip(c) {
                if !ck.is_zero() {
                    m = m.add(&b.scale(ck));
                }
            }
        }
        !m.det().is_zero()
    };
    for _ in 0..ISO_TRIALS {
        let coeffs: Vec<Vec<Scalar>> = pieces
            .iter()
            .map(|h| (0..h.dim()).map(|_| field.random(rng)).collect())
            .collect();
        if evaluate(&coeffs) {
            return UnitSearch::Found(build(&coeffs));
        }
    }
    // Deterministic fallback: the determinant is a polynomial of degree at
    // most `shape.0` on the span of the constant parts, so it vanishes on a
    // grid of `shape.0 + 1` values per coordinate only if it is zero.
    let flat: Vec<Vec<Scalar>> = consts.iter().flatten().map(|m| m.data.clone()).collect();
    let mut span = Subspace::new(field, shape.0 * shape.1);
    for v in &flat {
        span.insert(v);
    }
    let r = span.dim() as u32;
    let side = shape.0 as u64 + 1;
    if side.checked_pow(r).is_none_or(|g| g > GRID_LIMIT) {
        return UnitSearch::None { dim, exhaustive: false };
    }
    let basis = span.basis();
    let total = side.pow(r);
    for idx in 0..total {
        let mut m = vec![field.zero(); shape.0 * shape.1];
        let mut rest = idx;
        for b in &basis {
            let c = field.from_i64((rest % side) as i64);
            rest /= side;
            if c.is_zero() {
                continue;
            }
            for (x, y) in m.iter_mut().zip(b) {
                *x = &*x + &(&c * y);
            }
        }
        let dm = DenseMatrix {
            field,
            rows: shape.0,
            cols: shape.1,
            data: m,
        };
        if !dm.det().is_zero() {
            // an invertible constant part exists; sampling was unlucky
            return UnitSearch::None { dim, exhaustive: false };
        }
    }
    UnitSearch::None { dim, exhaustive: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::mf::{branched_cover, BranchedCoverSpec};
    use crate::series::{Ring, SeriesMatrix};

    fn base(e: u32, a: u32) -> MatrixFactorization {
        let r = Ring::new(&["x"], Field::default(), 30).unwrap();
        MatrixFactorization::new(
            r.var_pow(0, a),
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, e)),
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, a - e)),
        )
        .unwrap()
    }

    #[test]
    fn reflexive_and_conjugation_invariant() {
        let n1 = branched_cover(&base(1, 4), &BranchedCoverSpec::new(3, "y").unwrap()).unwrap();
        assert!(is_isomorphic(&n1, &n1).unwrap().is_iso());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = n1.random_conjugate(&mut rng).unwrap();
        match is_isomorphic(&n1, &c).unwrap() {
            IsoVerdict::Isomorphic { source, target, witness } => {
                assert!(witness.is_morphism(&source, &target));
                assert!(witness.is_invertible());
            }
            v => panic!("{v:?}"),
        }
        let f = n1.potential.clone();
        let padded = n1.direct_sum(&MatrixFactorization::trivial(&f)).unwrap();
        assert!(is_isomorphic(&padded, &n1).unwrap().is_iso());
    }

    #[test]
    fn distinct_base_modules() {
        let a = base(2, 4);
        let b = base(1, 4);
        let v = is_isomorphic(&a, &b).unwrap();
        assert!(matches!(
            v,
            IsoVerdict::NotIsomorphic(Refutation::NoInvertibleMap { exhaustive: true, .. })
        ));
        let n1 = branched_cover(&b, &BranchedCoverSpec::new(3, "y").unwrap()).unwrap();
        let m1 = n1.syzygy();
        assert!(!is_isomorphic(&n1, &m1).unwrap().is_iso());
        let f = n1.potential.clone();
        let v = is_isomorphic(&n1, &n1.direct_sum(&MatrixFactorization::free(&f)).unwrap()).unwrap();
        assert!(matches!(v, IsoVerdict::NotIsomorphic(Refutation::FreeRank { .. })));
    }
}
