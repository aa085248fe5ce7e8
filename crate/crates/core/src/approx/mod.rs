//! Approximation sequences by `Σ_k`, splitting verdicts, `Σ_k` membership,
//! filtration witnesses, iterated covers and dimension bounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::SingularityCatalog;
use crate::error::{Error, Result};
use crate::homalg::{
    annihilator_power, decompose, ext1, is_indecomposable, is_isomorphic, stable_hom, Decomposition,
    DecompositionSummary, ExtSpace,
};
use crate::mf::{detect_cover, extension_block, MatrixFactorization};

mod bounds;
mod cover;
mod witness;

pub use bounds::{bph_bounds, BphBounds, BrieskornPhamSpec};
pub use cover::{takahashi_check, verify_knorrer_hp, KnorrerVerdict, TakahashiVerdict};
pub use witness::{
    sigma_factorization_witness, sigma_witness_almost_split, sigma_witness_from_x, SigmaWitness, SigmaWitnessSummary,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            _ => Err(Error::Invalid(format!("side must be right or left, got `{s}`"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

/// The sequence `0 → kernel → middle → cokernel → 0`. On the right side the
/// cokernel is the target `N` and the kernel is `ΩN`; on the left side the
/// kernel is `N` and the cokernel is `ΩN`.
#[derive(Clone, Debug)]
pub struct ApproximationWitness {
    pub side: Side,
    pub k: u32,
    pub target: MatrixFactorization,
    pub kernel: MatrixFactorization,
    pub middle: MatrixFactorization,
    pub cokernel: MatrixFactorization,
    pub decomposition: Decomposition,
    pub split: bool,
    /// Certified minimal: the sequence does not split and `N` is
    /// indecomposable.
    pub minimal: bool,
    /// Free summands of the middle term.
    pub free_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximationSummary {
    pub side: Side,
    pub k: u32,
    pub target: String,
    pub kernel: String,
    pub middle: String,
    pub middle_pieces: DecompositionSummary,
    pub cokernel: String,
    pub split: bool,
    pub minimal: bool,
    pub free_rank: usize,
}

/// Catalog label of a module, or its size when no catalog is given.
pub fn module_label(x: &MatrixFactorization, cat: Option<&SingularityCatalog>) -> Result<String> {
    match cat {
        Some(c) => Ok(c.decompose(x)?.label()),
        None => {
            let (r, free) = x.strip_trivial_summands();
            Ok(match (r.size(), free) {
                (0, 0) => "0".into(),
                (0, f) => format!("R^{f}"),
                (s, 0) => format!("<size {s}>"),
                (s, f) => format!("<size {s}> + R^{f}"),
            })
        }
    }
}

impl ApproximationWitness {
    /// The sequence as text, `0 → K → M → C → 0`.
    pub fn sequence(&self, cat: Option<&SingularityCatalog>) -> Result<String> {
        Ok(format!(
            "0 -> {} -> {} -> {} -> 0",
            module_label(&self.kernel, cat)?,
            self.decomposition.label(),
            module_label(&self.cokernel, cat)?
        ))
    }

    pub fn summary(&self, cat: Option<&SingularityCatalog>) -> Result<ApproximationSummary> {
        Ok(ApproximationSummary {
            side: self.side,
            k: self.k,
            target: module_label(&self.target, cat)?,
            kernel: module_label(&self.kernel, cat)?,
            middle: self.decomposition.label(),
            middle_pieces: self.decomposition.summary(),
            cokernel: module_label(&self.cokernel, cat)?,
            split: self.split,
            minimal: self.minimal,
            free_rank: self.free_rank,
        })
    }
}

fn check_k(n: &MatrixFactorization, k: u32) -> Result<u32> {
    let (_, ne) = detect_cover(&n.potential)
        .ok_or_else(|| Error::Invalid(format!("{} is not a branched-cover potential", n.potential)))?;
    if k < 1 || k > ne {
        return Err(Error::Invalid(format!("k = {k} outside 1..={ne}")));
    }
    Ok(ne)
}

/// Whether `0 → ΩN → E → N → 0` with class `y^k` splits, for reduced `N`.
/// A short exact sequence of finitely generated modules splits exactly when
/// its middle is isomorphic to the sum of its ends.
fn splits(n: &MatrixFactorization, k: u32) -> Result<bool> {
    if n.size() == 0 {
        return Ok(true);
    }
    let e = extension_block(n, k)?;
    Ok(is_isomorphic(&e, &n.direct_sum(&n.syzygy())?)?.is_iso())
}

/// `0 → ΩN → cok E → N → 0` with `E = extension_block(N, k)`, a right
/// `Σ_k`-approximation of `N`.
pub fn right_approximation(
    n: &MatrixFactorization,
    k: u32,
    named: &[(String, MatrixFactorization)],
) -> Result<ApproximationWitness> {
    check_k(n, k)?;
    let (red, free) = n.strip_trivial_summands();
    let f = &n.potential;
    let kernel = red.syzygy();
    let (middle, decomposition) = if red.size() == 0 {
        let m = MatrixFactorization::free(f).power(free)?;
        let d = Decomposition {
            pieces: Vec::new(),
            free_rank: free,
        };
        (m, d)
    } else {
        let m = extension_block(&red, k)?;
        let mut d = decompose(&m, named)?;
        d.free_rank += free;
        let m = m.direct_sum(&MatrixFactorization::free(f).power(free)?)?;
        (m, d)
    };
    let split = red.size() == 0 || is_isomorphic(&middle, &n.direct_sum(&kernel)?)?.is_iso();
    let minimal = !split && free == 0 && is_indecomposable(&red)?;
    Ok(ApproximationWitness {
        side: Side::Right,
        k,
        target: n.clone(),
        kernel,
        free_rank: decomposition.free_rank,
        middle,
        cokernel: n.clone(),
        decomposition,
        split,
        minimal,
    })
}

/// `0 → N → cok E → ΩN → 0` with `E = extension_block(ΩN, k)`, a left
/// `Σ_k`-approximation of `N`.
pub fn left_approximation(
    n: &MatrixFactorization,
    k: u32,
    named: &[(String, MatrixFactorization)],
) -> Result<ApproximationWitness> {
    check_k(n, k)?;
    let (red, free) = n.strip_trivial_summands();
    let on = red.syzygy();
    let mut w = right_approximation(&on, k, named)?;
    // free summands of N map isomorphically into the middle
    if free > 0 {
        let fr = MatrixFactorization::free(&n.potential).power(free)?;
        w.middle = w.middle.direct_sum(&fr)?;
        w.decomposition.free_rank += free;
        w.free_rank += free;
        w.split = w.split || red.size() == 0;
    }
    w.side = Side::Left;
    w.kernel = n.clone();
    w.cokernel = on;
    w.target = n.clone();
    w.minimal = !w.split && free == 0 && is_indecomposable(&red)?;
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaRow {
    pub k: u32,
    pub member: bool,
    pub split: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub label: String,
    pub n: u32,
    pub annihilator_power: u32,
    pub rows: Vec<SigmaRow>,
    /// `Ext¹(N, ΩN)`.
    pub ext: ExtSpace,
}

impl SigmaReport {
    /// Least `k` with `N ∈ Σ_k`.
    pub fn least_k(&self) -> Option<u32> {
        self.rows.iter().find(|r| r.member).map(|r| r.k)
    }
}

/// Whether `N ∈ Σ_k`, by `annihilator_power(N) ≤ k`, checked against the
/// splitting of the right approximation sequence.
pub fn sigma_membership(n: &MatrixFactorization, k: u32) -> Result<SigmaRow> {
    check_k(n, k)?;
    let (red, _) = n.strip_trivial_summands();
    let member = red.size() == 0 || annihilator_power(&red)? <= k;
    let split = splits(&red, k)?;
    if member != split {
        return Err(Error::TheoremViolation(format!(
            "membership in Σ_{k} is {member} but the approximation sequence split verdict is {split}"
        )));
    }
    Ok(SigmaRow { k, member, split })
}

/// Membership in `Σ_1, …, Σ_n`.
pub fn sigma_report(n: &MatrixFactorization, cat: Option<&SingularityCatalog>) -> Result<SigmaReport> {
    let ne = check_k(n, 1)?;
    let (red, _) = n.strip_trivial_summands();
    let ap = if red.size() == 0 { 0 } else { annihilator_power(&red)? };
    let mut rows = Vec::new();
    for k in 1..=ne {
        let row = sigma_membership(&red, k)?;
        if let Some(prev) = rows.last().map(|r: &SigmaRow| r.member) {
            if prev && !row.member {
                return Err(Error::TheoremViolation(format!("Σ_{} is not contained in Σ_{k}", k - 1)));
            }
        }
        rows.push(row);
    }
    let ext = if red.size() == 0 {
        ExtSpace {
            dim: 0,
            degrees: Vec::new(),
            action_ranks: vec![0; n.ring().nvars()],
        }
    } else {
        ext1(&red, &red.syzygy())?
    };
    Ok(SigmaReport {
        label: module_label(n, cat)?,
        n: ne,
        annihilator_power: ap,
        rows,
        ext,
    })
}

/// The five equivalent conditions for `N` and `k`: `N ∈ Σ_k`, the right
/// sequence splits, the left sequence splits, `ΩN ∈ Σ_k`, and `y^k` acts as
/// zero on `Ext¹(N, ΩN)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub k: u32,
    pub member: bool,
    pub right_split: bool,
    pub left_split: bool,
    pub syzygy_member: bool,
    pub ext_killed: bool,
}

impl Equivalence {
    pub fn coherent(&self) -> bool {
        let v = self.member;
        [self.right_split, self.left_split, self.syzygy_member, self.ext_killed]
            .iter()
            .all(|&b| b == v)
    }
}

pub fn equivalence(n: &MatrixFactorization, k: u32) -> Result<Equivalence> {
    check_k(n, k)?;
    let (red, _) = n.strip_trivial_summands();
    if red.size() == 0 {
        return Ok(Equivalence {
            k,
            member: true,
            right_split: true,
            left_split: true,
            syzygy_member: true,
            ext_killed: true,
        });
    }
    let on = red.syzygy();
    let (yi, _) = detect_cover(&n.potential).expect("checked");
    // Ext¹(N, ΩN) as stable maps N → Ω²N = N
    let sh = stable_hom(&red, &red)?;
    let t = &sh.action_tables()[yi];
    let mut p = crate::linalg::DenseMatrix::identity(n.ring().field, sh.dim());
    for _ in 0..k {
        p = t.mul(&p);
    }
    Ok(Equivalence {
        k,
        member: annihilator_power(&red)? <= k,
        right_split: splits(&red, k)?,
        left_split: splits(&on, k)?,
        syzygy_member: annihilator_power(&on)? <= k,
        ext_killed: p.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{load_catalog, Label};

    #[test]
    fn e6_sequences_for_a() {
        let cat = load_catalog(Label::E6).unwrap();
        let named = cat.named();
        let a = cat.get("A").unwrap();
        let r = right_approximation(a, 1, &named).unwrap();
        assert_eq!(r.sequence(Some(&cat)).unwrap(), "0 -> B -> M1^2 + M2 -> A -> 0");
        assert!(!r.split && r.minimal);
        let l = left_approximation(a, 1, &named).unwrap();
        assert_eq!(l.sequence(Some(&cat)).unwrap(), "0 -> A -> M2 + N1^2 -> B -> 0");
        assert!(!l.split);
    }

    #[test]
    fn split_at_n_minus_one() {
        let cat = load_catalog(Label::E6).unwrap();
        for e in cat.entries.iter().filter(|e| e.name != crate::catalog::FREE) {
            let r = right_approximation(&e.mf, 2, &[]).unwrap();
            assert!(r.split, "{}", e.name);
            assert!(left_approximation(&e.mf, 2, &[]).unwrap().split, "{}", e.name);
        }
    }

    #[test]
    fn free_is_degenerate() {
        let cat = load_catalog(Label::E6).unwrap();
        let r = right_approximation(cat.get("free").unwrap(), 1, &[]).unwrap();
        assert!(r.split && !r.minimal);
        assert_eq!(r.decomposition.label(), "R");
        assert_eq!(r.kernel.size(), 0);
        let l = left_approximation(cat.get("free").unwrap(), 1, &[]).unwrap();
        assert_eq!(l.decomposition.label(), "R");
        assert!(sigma_membership(cat.get("free").unwrap(), 1).unwrap().member);
    }

    #[test]
    fn membership_e6() {
        let cat = load_catalog(Label::E6).unwrap();
        assert!(sigma_membership(cat.get("M1").unwrap(), 1).unwrap().member);
        assert!(!sigma_membership(cat.get("A").unwrap(), 1).unwrap().member);
        assert!(sigma_membership(cat.get("A").unwrap(), 2).unwrap().member);
        let rep = sigma_report(cat.get("X").unwrap(), Some(&cat)).unwrap();
        assert_eq!(rep.label, "X");
        assert_eq!(rep.least_k(), Some(rep.annihilator_power.max(1)));
        assert!(rep.ext.dim > 0);
    }

    #[test]
    fn five_verdicts_agree_e6() {
        let cat = load_catalog(Label::E6).unwrap();
        for e in &cat.entries {
            for k in 1..=3 {
                let v = equivalence(&e.mf, k).unwrap();
                assert!(v.coherent(), "{} k={k}: {v:?}", e.name);
            }
        }
    }

    #[test]
    fn right_middle_lies_in_sigma_k() {
        let cat = load_catalog(Label::E6).unwrap();
        for e in cat.entries.iter().filter(|e| e.name != crate::catalog::FREE) {
            let w = right_approximation(&e.mf, 1, &[]).unwrap();
            for p in &w.decomposition.pieces {
                assert!(annihilator_power(&p.mf).unwrap() <= 1, "{}", e.name);
            }
        }
    }
}
