//! Splitting of syzygies of quotients over branched covers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homalg::{is_isomorphic, syzygy_module_pow, Syzygy};
use crate::mf::{detect_cover, extension_block, tensor_hat, MatrixFactorization, ModulePresentation};
use crate::series::{Ring, SeriesMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct KnorrerVerdict {
    pub n: u32,
    /// Size of the reduced `N`.
    pub size: usize,
    /// Free summands of `Ω(N/y^{n-1}N)` beyond `N ⊕ ΩN`.
    pub free_rank: usize,
}

/// Checks `Ω(N/y^{n-1}N) ≅ N ⊕ ΩN` up to free summands. A failure is a
/// `TheoremViolation`.
pub fn verify_knorrer_hp(n: &MatrixFactorization) -> Result<KnorrerVerdict> {
    let (_, ne) = detect_cover(&n.potential)
        .ok_or_else(|| Error::Invalid(format!("{} is not a branched-cover potential", n.potential)))?;
    n.ring().field.check_unit(ne as u64)?;
    let (red, _) = n.strip_trivial_summands();
    if red.size() == 0 {
        return Ok(KnorrerVerdict { n: ne, size: 0, free_rank: 0 });
    }
    let (e, free_rank) = extension_block(&red, ne - 1)?.strip_trivial_summands();
    if !is_isomorphic(&e, &red.direct_sum(&red.syzygy())?)?.is_iso() {
        return Err(Error::TheoremViolation(format!(
            "Ω(N/y^{}N) is not N + ΩN for a module of size {}",
            ne - 1,
            red.size()
        )));
    }
    Ok(KnorrerVerdict {
        n: ne,
        size: red.size(),
        free_rank,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TakahashiVerdict {
    pub exponents: Vec<u32>,
    pub potential: String,
    /// Size of the iterated cover `N`.
    pub size: usize,
    /// Size of the reduced `Ω^r` of the quotient, and its free rank.
    pub syzygy_size: usize,
    pub free_rank: usize,
    pub pass: bool,
}

fn binomial(r: usize, j: usize) -> usize {
    (0..j).fold(1, |acc, i| acc * (r - i) / (i + 1))
}

/// For `X` over `f` and exponents `a_1..a_r`, builds
/// `N = X ⊗̂ (y_1, y_1^{a_1-1}) ⊗̂ … ⊗̂ (y_r, y_r^{a_r-1})` over
/// `f + Σ y_i^{a_i}` and compares `Ω^r(N/(y_1^{a_1-1}, …)N)` with
/// `⊕_j (Ω^j N)^{C(r,j)}` up to free summands.
pub fn takahashi_check(x: &MatrixFactorization, exponents: &[u32]) -> Result<TakahashiVerdict> {
    let r = exponents.len();
    if !(1..=2).contains(&r) {
        return Err(Error::Invalid(format!("takahashi_check supports one or two covers, got {r}")));
    }
    let field = x.ring().field;
    let names: Vec<String> = if r == 1 { vec!["y".into()] } else { (1..=r).map(|i| format!("y{i}")).collect() };
    let mut n = x.clone();
    for (name, &a) in names.iter().zip(exponents) {
        if a < 2 {
            return Err(Error::Invalid(format!("cover exponent {a} is below 2")));
        }
        field.check_unit(a as u64)?;
        if x.ring().var_index(name).is_some() {
            return Err(Error::Invalid(format!("variable `{name}` already in use")));
        }
        let ry = Ring::new(&[name.as_str()], field, x.prec())?;
        let y = MatrixFactorization::new(
            ry.var_pow(0, a),
            SeriesMatrix::scalar(&ry, 1, &ry.var(0)),
            SeriesMatrix::scalar(&ry, 1, &ry.var_pow(0, a - 1)),
        )?;
        n = tensor_hat(&n, &y)?;
    }
    let ring = n.ring().clone();
    let mut blocks = vec![n.phi.clone()];
    for (name, &a) in names.iter().zip(exponents) {
        let i = ring.var_index(name).expect("cover variable");
        blocks.push(SeriesMatrix::scalar(&ring, n.size(), &ring.var_pow(i, a - 1)));
    }
    let p = ModulePresentation::new(n.potential.clone(), SeriesMatrix::block(&[blocks])?)?;
    let omega = match syzygy_module_pow(&p, r)? {
        Syzygy::Mcm(m) => m,
        Syzygy::Module(_) => {
            return Err(Error::Inconclusive(format!("syzygy {r} of the quotient is not maximal Cohen-Macaulay")))
        }
    };
    let (omega, free_rank) = omega.strip_trivial_summands();
    let (nred, _) = n.strip_trivial_summands();
    let mut pattern = MatrixFactorization::zero(&n.potential);
    for j in 0..=r {
        let term = if j % 2 == 0 { nred.clone() } else { nred.syzygy() };
        pattern = pattern.direct_sum(&term.power(binomial(r, j))?)?;
    }
    let pass = if omega.size() == 0 && pattern.size() == 0 {
        true
    } else {
        omega.size() == pattern.size() && is_isomorphic(&omega, &pattern)?.is_iso()
    };
    Ok(TakahashiVerdict {
        exponents: exponents.to_vec(),
        potential: n.potential.to_string(),
        size: n.size(),
        syzygy_size: omega.size(),
        free_rank,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{load_catalog, Label};
    use crate::field::Field;
    use crate::mf::{branched_cover, BranchedCoverSpec};

    fn base(f: &str, phi: &str, psi: &str) -> MatrixFactorization {
        let r = Ring::new(&["x"], Field::default(), 30).unwrap();
        MatrixFactorization::from_strs(&r.parse(f).unwrap(), &[&[phi]], &[&[psi]]).unwrap()
    }

    #[test]
    fn knorrer_on_a2_cover() {
        let x = base("x^3", "x", "x^2");
        let n = branched_cover(&x, &BranchedCoverSpec::new(2, "y").unwrap()).unwrap();
        let v = verify_knorrer_hp(&n).unwrap();
        assert_eq!(v.n, 2);
    }

    #[test]
    fn knorrer_on_catalogs() {
        for l in [Label::E6, Label::E8] {
            let cat = load_catalog(l).unwrap();
            for e in &cat.entries {
                verify_knorrer_hp(&e.mf).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            }
        }
    }

    #[test]
    fn knorrer_needs_unit_n() {
        let r = Ring::new(&["x", "y"], Field::Prime(3), 20).unwrap();
        let f = r.parse("x^2+y^3").unwrap();
        let n = MatrixFactorization::from_strs(&f, &[&["x", "y"], &["-y^2", "x"]], &[&["x", "-y"], &["y^2", "x"]]).unwrap();
        assert!(verify_knorrer_hp(&n).is_err());
    }

    #[test]
    fn takahashi_two_covers_of_a1() {
        let v = takahashi_check(&base("x^2", "x", "x"), &[2, 2]).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.size, 4);
        assert_eq!(v.syzygy_size, 16);
    }

    #[test]
    fn takahashi_one_cover() {
        let v = takahashi_check(&base("x^4", "x", "x^3"), &[3]).unwrap();
        assert!(v.pass);
        assert_eq!(v.syzygy_size, 4);
    }

    #[test]
    fn takahashi_free() {
        let v = takahashi_check(&base("x^2", "x^2", "1"), &[2, 2]).unwrap();
        assert!(v.pass);
        assert_eq!(v.syzygy_size, 0);
    }

    #[test]
    fn binomials() {
        assert_eq!((0..=2).map(|j| binomial(2, j)).collect::<Vec<_>>(), [1, 2, 1]);
    }
}
