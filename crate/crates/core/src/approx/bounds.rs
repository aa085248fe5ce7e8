//! Dimension bounds for Brieskorn-Pham singularities `x_0^{a_0} + … + x_d^{a_d}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrieskornPhamSpec {
    /// `a_0, …, a_d`; the first is the base exponent, the rest are covers.
    pub exponents: Vec<u32>,
}

impl BrieskornPhamSpec {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Invalid("no exponents".into()));
        }
        if let Some(a) = exponents.iter().find(|&&a| a < 2) {
            return Err(Error::Invalid(format!("exponent {a} is below 2")));
        }
        Ok(BrieskornPhamSpec { exponents })
    }

    /// Every exponent must be a unit in the field.
    pub fn check_field(&self, field: Field) -> Result<()> {
        self.exponents.iter().try_for_each(|&a| field.check_unit(a as u64))
    }

    pub fn cover_exponents(&self) -> &[u32] {
        &self.exponents[1..]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BphBounds {
    /// Loewy length of the Tjurina algebra.
    pub loewy: u32,
    /// `2ℓ - 1`.
    pub bfk: u32,
    /// `Σ (a_i - 2)` over the cover exponents.
    pub paper: u32,
    /// `paper + 1`: the `Σ_m` that exhausts the MCM modules.
    pub m: u32,
}

pub fn bph_bounds(spec: &BrieskornPhamSpec) -> BphBounds {
    let loewy = spec.exponents.iter().map(|a| a - 2).sum::<u32>() + 1;
    let paper = spec.cover_exponents().iter().map(|a| a - 2).sum::<u32>();
    BphBounds {
        loewy,
        bfk: 2 * loewy - 1,
        paper,
        m: paper + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(e: &[u32]) -> BphBounds {
        bph_bounds(&BrieskornPhamSpec::new(e.to_vec()).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(b(&[4, 3]), BphBounds { loewy: 4, bfk: 7, paper: 1, m: 2 });
        assert_eq!(b(&[5, 3]), BphBounds { loewy: 5, bfk: 9, paper: 1, m: 2 });
        assert_eq!(b(&[2, 2, 2]), BphBounds { loewy: 1, bfk: 1, paper: 0, m: 1 });
    }

    #[test]
    fn rejects_small_exponents() {
        assert!(BrieskornPhamSpec::new(vec![3, 1]).is_err());
        assert!(BrieskornPhamSpec::new(vec![]).is_err());
        assert!(BrieskornPhamSpec::new(vec![3, 2]).unwrap().check_field(Field::Prime(3)).is_err());
    }

    #[test]
    fn paper_bound_below_bfk() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let len = rng.gen_range(2..6);
            let e: Vec<u32> = (0..len).map(|_| rng.gen_range(2..12)).collect();
            let r = b(&e);
            assert!(r.paper <= r.bfk, "{e:?}");
            // ℓ counts every exponent, the paper bound only the covers
            assert_eq!(r.loewy, r.paper + e[0] - 1);
        }
    }
}
