//! Witnesses for `Σ_k = Σ_{k-j} ◇ Σ_j`: a short exact sequence with outer
//! terms in `Σ_{k-j}` and `Σ_j` whose middle contains the target.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_k, module_label, sigma_membership};
use crate::catalog::SingularityCatalog;
use crate::error::{Error, Result};
use crate::homalg::{
    almost_split_middle, annihilator_power, decompose, decompose_artinian, is_isomorphic, syzygy_module_pow,
    Decomposition, Syzygy,
};
use crate::mf::{detect_cover, filtration_piece, quotient_presentation, MatrixFactorization, ModulePresentation};

/// `0 → left → middle ⊕ R^free → right → 0`.
#[derive(Clone, Debug)]
pub struct SigmaWitness {
    pub j: u32,
    pub k: u32,
    /// Odd number of syzygy steps taken on the artinian quotients.
    pub shift: u32,
    /// The module `X` whose quotients `y^jX/y^kX`, `X/y^kX`, `X/y^jX` give
    /// the sequence.
    pub x: Option<MatrixFactorization>,
    pub left: MatrixFactorization,
    pub middle: MatrixFactorization,
    pub right: MatrixFactorization,
    pub left_pieces: Decomposition,
    /// Includes the free part.
    pub middle_pieces: Decomposition,
    pub right_pieces: Decomposition,
    pub free_rank: usize,
    /// Cyclic decompositions of the three quotients over the base curve.
    pub quotients: Option<[BTreeMap<u32, usize>; 3]>,
    pub left_member: bool,
    pub right_member: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaWitnessSummary {
    pub j: u32,
    pub k: u32,
    pub left: String,
    pub middle: String,
    pub right: String,
    pub free_rank: usize,
    pub left_member: bool,
    pub right_member: bool,
    pub degenerate: bool,
}

impl SigmaWitness {
    pub fn certified(&self) -> bool {
        self.left_member && self.right_member
    }

    pub fn sequence(&self) -> String {
        format!(
            "0 -> {} -> {} -> {} -> 0",
            self.left_pieces.label(),
            self.middle_pieces.label(),
            self.right_pieces.label()
        )
    }

    pub fn summary(&self) -> SigmaWitnessSummary {
        SigmaWitnessSummary {
            j: self.j,
            k: self.k,
            left: self.left_pieces.label(),
            middle: self.middle_pieces.label(),
            right: self.right_pieces.label(),
            free_rank: self.free_rank,
            left_member: self.left_member,
            right_member: self.right_member,
            degenerate: self.degenerate,
        }
    }

    /// Whether every indecomposable summand of `n` occurs in the middle
    /// with at least its multiplicity.
    pub fn middle_contains(&self, n: &MatrixFactorization) -> Result<bool> {
        contains(&self.middle_pieces, &decompose(n, &[])?)
    }
}

fn contains(big: &Decomposition, small: &Decomposition) -> Result<bool> {
    if small.free_rank > big.free_rank {
        return Ok(false);
    }
    for p in &small.pieces {
        let mut have = 0;
        for q in &big.pieces {
            if q.mf.size() == p.mf.size() && is_isomorphic(&q.mf, &p.mf)?.is_iso() {
                have += q.multiplicity;
            }
        }
        if have < p.multiplicity {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_jk(x: &MatrixFactorization, j: u32, k: u32) -> Result<()> {
    let ne = check_k(x, k)?;
    if j < 1 || j >= k {
        return Err(Error::Invalid(format!("need 1 <= j < k <= {ne}, got j = {j}, k = {k}")));
    }
    Ok(())
}

/// Smallest odd integer above `dim R`, where `R# = R[[y]]/(f + yⁿ)`.
fn odd_shift(x: &MatrixFactorization) -> u32 {
    let d = x.ring().nvars() as u32 - 2;
    if d.is_multiple_of(2) {
        d + 1
    } else {
        d + 2
    }
}

fn omega(p: &ModulePresentation, m: u32) -> Result<MatrixFactorization> {
    match syzygy_module_pow(p, m as usize)? {
        Syzygy::Mcm(x) => Ok(x.strip_trivial_summands().0),
        Syzygy::Module(_) => Err(Error::Inconclusive(format!("syzygy {m} of a quotient is not maximal Cohen-Macaulay"))),
    }
}

/// The sequence of syzygies of `0 → y^jX/y^kX → X/y^kX → X/y^jX → 0`.
pub fn sigma_witness_from_x(
    x: &MatrixFactorization,
    j: u32,
    k: u32,
    named: &[(String, MatrixFactorization)],
) -> Result<SigmaWitness> {
    check_jk(x, j, k)?;
    let (x, _) = x.strip_trivial_summands();
    let shift = odd_shift(&x);
    let ps = [filtration_piece(&x, j, k)?, quotient_presentation(&x, k)?, quotient_presentation(&x, j)?];
    let quotients = match detect_cover(&x.potential) {
        Some((yi, _)) if x.ring().nvars() == 2 => {
            let mut q = Vec::new();
            for p in &ps {
                q.push(decompose_artinian(&p.eliminate_var(yi)?)?);
            }
            q.try_into().ok()
        }
        _ => None,
    };
    let left = omega(&ps[0], shift)?;
    let middle = omega(&ps[1], shift)?;
    let right = omega(&ps[2], shift)?;
    let total = left.rank()? + right.rank()?;
    let free_rank = total
        .checked_sub(middle.rank()?)
        .ok_or_else(|| Error::TheoremViolation("middle rank exceeds the outer ranks".into()))?;
    let mut middle_pieces = decompose(&middle, named)?;
    middle_pieces.free_rank += free_rank;
    Ok(SigmaWitness {
        j,
        k,
        shift,
        left_pieces: decompose(&left, named)?,
        right_pieces: decompose(&right, named)?,
        middle_pieces,
        left_member: sigma_membership(&left, k - j)?.member,
        right_member: sigma_membership(&right, j)?.member,
        x: Some(x),
        left,
        middle,
        right,
        free_rank,
        quotients,
        degenerate: false,
    })
}

/// A witness for `N ∈ Σ_{k-j} ◇ Σ_j`. Modules already in `Σ_j` get the
/// sequence `0 → 0 → N → N → 0`; otherwise `X` is searched among `N`, `ΩN`
/// and the named modules so that the middle of the sequence contains `N`.
pub fn sigma_factorization_witness(
    n: &MatrixFactorization,
    j: u32,
    k: u32,
    named: &[(String, MatrixFactorization)],
) -> Result<SigmaWitness> {
    check_jk(n, j, k)?;
    let (red, _) = n.strip_trivial_summands();
    let ap = if red.size() == 0 { 0 } else { annihilator_power(&red)? };
    if ap <= j {
        let zero = MatrixFactorization::zero(&n.potential);
        let d = decompose(n, named)?;
        return Ok(SigmaWitness {
            j,
            k,
            shift: odd_shift(n),
            x: None,
            left_pieces: decompose(&zero, named)?,
            middle_pieces: d.clone(),
            right_pieces: d,
            left: zero,
            middle: n.clone(),
            right: n.clone(),
            free_rank: 0,
            quotients: None,
            left_member: true,
            right_member: true,
            degenerate: true,
        });
    }
    if ap > k {
        return Err(Error::Invalid(format!("module is not in Σ_{k} (annihilator power {ap})")));
    }
    let mut candidates = vec![red.clone(), red.syzygy()];
    candidates.extend(named.iter().map(|(_, m)| m.clone()));
    let target = decompose(&red, &[])?;
    for x in &candidates {
        if x.strip_trivial_summands().0.size() == 0 {
            continue;
        }
        let w = sigma_witness_from_x(x, j, k, named)?;
        if contains(&w.middle_pieces, &target)? {
            return Ok(w);
        }
    }
    Err(Error::Inconclusive("no module X among the candidates realizes the target".into()))
}

/// The almost split sequence `0 → ΩZ → E → Z → 0` read as a witness for
/// `E ∈ Σ_{k-j} ◇ Σ_j`.
pub fn sigma_witness_almost_split(
    z: &MatrixFactorization,
    j: u32,
    k: u32,
    named: &[(String, MatrixFactorization)],
) -> Result<SigmaWitness> {
    check_jk(z, j, k)?;
    let (z, _) = z.strip_trivial_summands();
    let left = z.syzygy();
    let middle = almost_split_middle(&z)?;
    Ok(SigmaWitness {
        j,
        k,
        shift: 1,
        x: None,
        left_pieces: decompose(&left, named)?,
        middle_pieces: decompose(&middle, named)?,
        right_pieces: decompose(&z, named)?,
        left_member: sigma_membership(&left, k - j)?.member,
        right_member: sigma_membership(&z, j)?.member,
        left,
        middle,
        right: z,
        free_rank: 0,
        quotients: None,
        degenerate: false,
    })
}

impl SigmaWitness {
    /// Catalog labels of the three terms.
    pub fn labels(&self, cat: &SingularityCatalog) -> Result<[String; 3]> {
        Ok([
            module_label(&self.left, Some(cat))?,
            self.middle_pieces.label(),
            module_label(&self.right, Some(cat))?,
        ])
    }
}
