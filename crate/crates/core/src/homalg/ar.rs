//! Almost split sequences ending at an indecomposable non-free module of a
//! curve singularity, where the translate is `Ω`.

use super::hom::StableHom;
use crate::error::{Error, Result};
use crate::mf::{extension_from_class, MatrixFactorization};

/// Middle term of `0 → ΩZ → E → Z → 0` whose class spans the top degree of
/// `Ext¹(Z, ΩZ) = \underline{End}(ΩZ)`.
pub fn almost_split_middle(z: &MatrixFactorization) -> Result<MatrixFactorization> {
    let (z, _) = z.strip_trivial_summands();
    if z.size() == 0 {
        return Err(Error::Invalid("no almost split sequence ends at a free module".into()));
    }
    let oz = z.syzygy();
    let sh = StableHom::compute(&oz, &oz)?;
    let top = sh
        .pieces
        .last()
        .ok_or_else(|| Error::Invalid("stable endomorphisms vanish".into()))?;
    if top.dim() != 1 {
        return Err(Error::Invalid(format!(
            "top degree of the stable endomorphisms has dimension {}",
            top.dim()
        )));
    }
    let c = top.rep_pair(0);
    extension_from_class(&z, &oz, &c.alpha, &c.beta)
}
