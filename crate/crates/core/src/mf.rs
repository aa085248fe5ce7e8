//! Matrix factorizations `(φ, ψ)` with `φψ = ψφ = f·I` and the constructions
//! on them: syzygy, sums, the tensor product, branched covers, extension
//! blocks and quotient presentations.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::DenseMatrix;
use crate::series::{monomials_of_weight, Monomial, Ring, SeriesMatrix, TruncatedSeries};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixFactorization {
    pub potential: TruncatedSeries,
    pub phi: SeriesMatrix,
    pub psi: SeriesMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryFailure {
    pub product: String,
    pub row: usize,
    pub col: usize,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub reduced: bool,
    pub size: usize,
    pub failure: Option<EntryFailure>,
}

/// Row and column degree shifts making `φ` and `ψ` weighted homogeneous.
///
/// `φ[j][k]` has weight `col[k] - row[j]`, `ψ[k][j]` has weight
/// `row[j] + total - col[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub weights: Vec<u32>,
    pub total: i64,
    pub row: Vec<i64>,
    pub col: Vec<i64>,
}

impl MatrixFactorization {
    pub fn new(potential: TruncatedSeries, phi: SeriesMatrix, psi: SeriesMatrix) -> Result<Self> {
        let x = Self::new_unchecked(potential, phi, psi)?;
        let rep = x.validate();
        if let Some(fail) = rep.failure {
            return Err(Error::Invalid(format!(
                "{} differs from f*I at entry ({}, {}) in degree {}",
                fail.product, fail.row, fail.col, fail.degree
            )));
        }
        Ok(x)
    }

    /// Builds without checking the factorization identities.
    pub fn new_unchecked(potential: TruncatedSeries, phi: SeriesMatrix, psi: SeriesMatrix) -> Result<Self> {
        let n = phi.rows();
        if phi.cols() != n || psi.rows() != n || psi.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "phi {}x{}, psi {}x{}",
                phi.rows(),
                phi.cols(),
                psi.rows(),
                psi.cols()
            )));
        }
        if phi.ring() != potential.ring() || psi.ring() != potential.ring() {
            return Err(Error::RingMismatch("entries and potential".into()));
        }
        if potential.is_zero() || potential.is_unit() {
            return Err(Error::Invalid("potential must be a nonzero non-unit".into()));
        }
        Ok(MatrixFactorization { potential, phi, psi })
    }

    /// Parses `phi`/`psi` row strings over the ring of `f`.
    pub fn from_strs(f: &TruncatedSeries, phi: &[&[&str]], psi: &[&[&str]]) -> Result<Self> {
        let r = f.ring();
        Self::new(f.clone(), SeriesMatrix::parse(r, phi)?, SeriesMatrix::parse(r, psi)?)
    }

    /// The factorization `(1, f)`, whose cokernel is zero.
    pub fn trivial(f: &TruncatedSeries) -> Self {
        let r = f.ring();
        MatrixFactorization {
            potential: f.clone(),
            phi: SeriesMatrix::identity(r, 1),
            psi: SeriesMatrix::scalar(r, 1, f),
        }
    }

    /// The factorization `(f, 1)`, whose cokernel is free of rank one.
    pub fn free(f: &TruncatedSeries) -> Self {
        Self::trivial(f).syzygy()
    }

    /// The empty factorization (size zero).
    pub fn zero(f: &TruncatedSeries) -> Self {
        MatrixFactorization {
            potential: f.clone(),
            phi: SeriesMatrix::zeros(f.ring(), 0, 0),
            psi: SeriesMatrix::zeros(f.ring(), 0, 0),
        }
    }

    pub fn ring(&self) -> &Ring {
        self.potential.ring()
    }

    pub fn size(&self) -> usize {
        self.phi.rows()
    }

    pub fn prec(&self) -> u32 {
        self.ring().prec
    }

    pub fn is_reduced(&self) -> bool {
        self.phi.entries().chain(self.psi.entries()).all(|e| !e.is_unit())
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.size();
        let target = SeriesMatrix::scalar(self.ring(), n, &self.potential);
        let mut failure = None;
        for (name, a, b) in [("phi*psi", &self.phi, &self.psi), ("psi*phi", &self.psi, &self.phi)] {
            let d = a.mul(b).and_then(|p| p.sub(&target));
            let d = match d {
                Ok(d) => d,
                Err(_) => {
                    failure = Some(EntryFailure {
                        product: name.into(),
                        row: 0,
                        col: 0,
                        degree: 0,
                    });
                    break;
                }
            };
            let bad = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_zero());
            if let Some((i, j)) = bad {
                failure = Some(EntryFailure {
                    product: name.into(),
                    row: i,
                    col: j,
                    degree: d.get(i, j).order().unwrap_or(0),
                });
                break;
            }
        }
        ValidationReport {
            valid: failure.is_none(),
            reduced: self.is_reduced(),
            size: n,
            failure,
        }
    }

    /// `Ω(φ, ψ) = (ψ, φ)`.
    pub fn syzygy(&self) -> Self {
        MatrixFactorization {
            potential: self.potential.clone(),
            phi: self.psi.clone(),
            psi: self.phi.clone(),
        }
    }

    pub fn syzygy_pow(&self, m: usize) -> Self {
        if m % 2 == 1 {
            self.syzygy()
        } else {
            self.clone()
        }
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self> {
        if self.potential != o.potential {
            return Err(Error::Invalid("direct sum of factorizations of different potentials".into()));
        }
        if o.size() == 0 {
            return Ok(self.clone());
        }
        if self.size() == 0 {
            return Ok(o.clone());
        }
        Ok(MatrixFactorization {
            potential: self.potential.clone(),
            phi: SeriesMatrix::block_diag(&[self.phi.clone(), o.phi.clone()])?,
            psi: SeriesMatrix::block_diag(&[self.psi.clone(), o.psi.clone()])?,
        })
    }

    pub fn direct_sum_all<'a>(f: &TruncatedSeries, parts: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut acc = Self::zero(f);
        for p in parts {
            acc = acc.direct_sum(p)?;
        }
        Ok(acc)
    }

    pub fn power(&self, k: usize) -> Result<Self> {
        Self::direct_sum_all(&self.potential, std::iter::repeat_n(self, k))
    }

    /// Rank of the cokernel over `S/(f)`, from the degree of `det φ`.
    pub fn rank(&self) -> Result<usize> {
        let g = self.grading()?;
        let s: i64 = g.col.iter().sum::<i64>() - g.row.iter().sum::<i64>();
        if s % g.total != 0 || s < 0 {
            return Err(Error::Invalid("determinant degree not a multiple of f".into()));
        }
        Ok((s / g.total) as usize)
    }

    /// Removes all summands `(1, f)` and `(f, 1)`; returns the reduced
    /// factorization and the number of free summands `(f, 1)` removed.
    pub fn strip_trivial_summands(&self) -> (Self, usize) {
        let mut x = self.clone();
        let mut free = 0;
        loop {
            if let Some((j, k)) = find_unit(&x.phi) {
                let (phi, psi) = eliminate(&x.phi, &x.psi, j, k);
                x.phi = phi;
                x.psi = psi;
                continue;
            }
            if let Some((k, j)) = find_unit(&x.psi) {
                let (psi, phi) = eliminate(&x.psi, &x.phi, k, j);
                x.phi = phi;
                x.psi = psi;
                free += 1;
                continue;
            }
            return (x, free);
        }
    }

    /// `P φ Q`, `Q⁻¹ ψ P⁻¹` for graded automorphisms `P`, `Q` with random
    /// coefficients; the result is isomorphic to `self`.
    pub fn random_conjugate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self> {
        let g = self.grading()?;
        let r = self.ring();
        let p = random_graded_automorphism(r, &g.weights, &g.row, rng)?;
        let q = random_graded_automorphism(r, &g.weights, &g.col, rng)?;
        let phi = p.mul(&self.phi)?.mul(&q)?;
        let psi = q.invert()?.mul(&self.psi)?.mul(&p.invert()?)?;
        MatrixFactorization::new(self.potential.clone(), phi, psi)
    }

    /// Finds the degree shifts of a weighted homogeneous factorization.
    pub fn grading(&self) -> Result<Grading> {
        let weights = potential_weights(&self.potential)?;
        let total = self.potential.weighted_degree(&weights).expect("checked homogeneous") as i64;
        let n = self.size();
        let mut degs = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for k in 0..n {
                let e = self.phi.get(j, k);
                if !e.is_zero() {
                    let w = e.weighted_degree(&weights).ok_or_else(|| {
                        Error::NotGraded(format!("phi entry ({j},{k}) = {e} is not homogeneous"))
                    })?;
                    // col[k] - row[j] = w
                    degs.push((j, n + k, w as i64));
                }
                let e = self.psi.get(k, j);
                if !e.is_zero() {
                    let w = e.weighted_degree(&weights).ok_or_else(|| {
                        Error::NotGraded(format!("psi entry ({k},{j}) = {e} is not homogeneous"))
                    })?;
                    // row[j] + total - col[k] = w
                    degs.push((j, n + k, total - w as i64));
                }
            }
        }
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); 2 * n];
        for &(u, v, d) in &degs {
            adj[u].push((v, d));
            adj[v].push((u, -d));
        }
        let mut shift: Vec<Option<i64>> = vec![None; 2 * n];
        for start in 0..2 * n {
            if shift[start].is_some() {
                continue;
            }
            let mut comp = vec![start];
            shift[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let su = shift[u].expect("visited");
                for &(v, d) in &adj[u] {
                    match shift[v] {
                        None => {
                            shift[v] = Some(su + d);
                            comp.push(v);
                            queue.push_back(v);
                        }
                        Some(sv) if sv != su + d => {
                            return Err(Error::NotGraded("inconsistent degree shifts".into()));
                        }
                        Some(_) => {}
                    }
                }
            }
            // normalize: smallest row shift in the component is zero
            let base = comp
                .iter()
                .filter(|&&u| u < n)
                .map(|&u| shift[u].expect("set"))
                .min()
                .unwrap_or_else(|| comp.iter().map(|&u| shift[u].expect("set")).min().expect("nonempty"));
            for &u in &comp {
                shift[u] = Some(shift[u].expect("set") - base);
            }
        }
        let shift: Vec<i64> = shift.into_iter().map(|s| s.expect("all visited")).collect();
        Ok(Grading {
            weights,
            total,
            row: shift[..n].to_vec(),
            col: shift[n..].to_vec(),
        })
    }

    pub fn to_file_string(&self) -> String {
        let r = self.ring();
        let mut s = String::new();
        s.push_str(&format!("ring {}\n", r.vars().join(",")));
        s.push_str(&format!("prec {}\n", r.prec));
        s.push_str(&format!("field {}\n", r.field));
        s.push_str(&format!("potential {}\n", self.potential));
        s.push_str("phi\n");
        for row in self.phi.row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s.push_str("psi\n");
        for row in self.psi.row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s
    }

    /// Parses the line-oriented file format. Blank lines and `#` comments
    /// are ignored.
    pub fn parse_file(text: &str) -> Result<Self> {
        let x = Self::parse_file_unchecked(text)?;
        Self::new(x.potential, x.phi, x.psi)
    }

    /// Like [`parse_file`](Self::parse_file) but leaves the identities
    /// `φψ = ψφ = f·I` to [`validate`](Self::validate).
    pub fn parse_file_unchecked(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let at = |line: usize, msg: String| Error::Parse { line, msg };
        let mut it = lines.into_iter().peekable();
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (ln, l) = it.next().ok_or_else(|| at(0, format!("missing `{key}` line")))?;
            let rest = l
                .strip_prefix(key)
                .filter(|r| r.starts_with(' '))
                .ok_or_else(|| at(ln, format!("expected `{key} ...`")))?;
            Ok((ln, rest.trim().to_string()))
        };
        let (_, vars) = header("ring")?;
        let (ln, prec) = header("prec")?;
        let prec: u32 = prec.parse().map_err(|_| at(ln, "bad precision".into()))?;
        let (ln, field) = header("field")?;
        let field: Field = field.parse().map_err(|e: Error| at(ln, e.to_string()))?;
        let (ln, pot) = header("potential")?;
        let vars: Vec<&str> = vars.split(',').collect();
        let ring = Ring::new(&vars, field, prec)?;
        let f = ring.parse(&pot).map_err(|e| relocate(e, ln))?;
        let mut phi_rows = Vec::new();
        let mut psi_rows = Vec::new();
        let mut section = 0;
        for (ln, l) in it {
            match l {
                "phi" if section == 0 => section = 1,
                "psi" if section == 1 => section = 2,
                _ if section == 1 => phi_rows.push(SeriesMatrix::parse_row(&ring, l).map_err(|e| relocate(e, ln))?),
                _ if section == 2 => psi_rows.push(SeriesMatrix::parse_row(&ring, l).map_err(|e| relocate(e, ln))?),
                _ => return Err(at(ln, format!("unexpected line `{l}`"))),
            }
        }
        if section != 2 {
            return Err(at(0, "missing phi/psi sections".into()));
        }
        let phi = SeriesMatrix::from_rows(&ring, phi_rows)?;
        let psi = SeriesMatrix::from_rows(&ring, psi_rows)?;
        MatrixFactorization::new_unchecked(f, phi, psi)
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

impl fmt::Display for MatrixFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.phi, self.psi)
    }
}

impl fmt::Debug for MatrixFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn find_unit(m: &SeriesMatrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| m.get(i, j).is_unit())
}

/// Splits off the unit `a[j][k]`: returns the Schur complement of `a` and
/// `b` with row `k` and column `j` removed.
fn eliminate(a: &SeriesMatrix, b: &SeriesMatrix, j: usize, k: usize) -> (SeriesMatrix, SeriesMatrix) {
    let n = a.rows();
    let uinv = a.get(j, k).invert_unit().expect("unit pivot");
    let rows: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let cols: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    let mut s = a.submatrix(&rows, &cols);
    for (ri, &i) in rows.iter().enumerate() {
        let c = a.get(i, k);
        if c.is_zero() {
            continue;
        }
        let cu = c.mul(&uinv).expect("same ring");
        for (ci, &l) in cols.iter().enumerate() {
            let r = a.get(j, l);
            if r.is_zero() {
                continue;
            }
            let v = s.get(ri, ci).sub(&cu.mul(r).expect("same ring")).expect("same ring");
            s.set(ri, ci, v);
        }
    }
    (s, b.submatrix(&cols, &rows))
}

fn random_graded_automorphism<R: Rng + ?Sized>(
    ring: &Ring,
    weights: &[u32],
    shifts: &[i64],
    rng: &mut R,
) -> Result<SeriesMatrix> {
    let n = shifts.len();
    for _ in 0..100 {
        let mut m = SeriesMatrix::zeros(ring, n, n);
        for i in 0..n {
            for j in 0..n {
                let w = shifts[j] - shifts[i];
                if w < 0 {
                    continue;
                }
                let terms: Vec<(Monomial, Scalar)> = monomials_of_weight(weights, w as u64)
                    .into_iter()
                    .map(|mo| (mo, ring.field.random(rng)))
                    .collect();
                m.set(i, j, TruncatedSeries::from_terms(ring, terms));
            }
        }
        if m.constant_part().inverse().is_some() {
            return Ok(m);
        }
    }
    Err(Error::Inconclusive("could not sample an invertible matrix".into()))
}

/// Positive integer weights making `f` weighted homogeneous. Variables that
/// do not occur in `f` get the weight one.
pub fn potential_weights(f: &TruncatedSeries) -> Result<Vec<u32>> {
    let nv = f.ring().nvars();
    let mons: Vec<&Monomial> = f.terms().map(|(m, _)| m).collect();
    let used: Vec<usize> = (0..nv).filter(|&i| mons.iter().any(|m| m.0[i] > 0)).collect();
    let q = Field::Rational;
    let rows: Vec<Vec<Scalar>> = mons
        .iter()
        .skip(1)
        .map(|m| {
            used.iter()
                .map(|&i| q.from_i64(m.0[i] as i64 - mons[0].0[i] as i64))
                .collect()
        })
        .collect();
    let ns = if rows.is_empty() {
        DenseMatrix::zeros(q, 0, used.len()).nullspace()
    } else {
        DenseMatrix::from_rows(q, rows).nullspace()
    };
    if ns.len() != 1 {
        return Err(Error::NotGraded(format!("no unique weight vector for {f}")));
    }
    let mut nums: Vec<BigInt> = Vec::new();
    let mut lcm = BigInt::one();
    for s in &ns[0] {
        let Scalar::Rat(r) = s else { unreachable!() };
        lcm = lcm.lcm(r.denom());
    }
    for s in &ns[0] {
        let Scalar::Rat(r) = s else { unreachable!() };
        nums.push(r.numer() * (&lcm / r.denom()));
    }
    let g = nums.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let sign = if nums[0].is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut w = vec![1u32; nv];
    for (k, &i) in used.iter().enumerate() {
        let v = &nums[k] / &g * &sign;
        if !v.is_positive() {
            return Err(Error::NotGraded(format!("weights of {f} are not positive")));
        }
        w[i] = v.to_u32().ok_or_else(|| Error::NotGraded("weight overflow".into()))?;
    }
    Ok(w)
}

/// Base potential `f`, exponent `n` and variable name of a branched cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchedCoverSpec {
    pub n: u32,
    pub var: String,
}

impl BranchedCoverSpec {
    pub fn new(n: u32, var: &str) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("cover exponent {n} < 2")));
        }
        Ok(BranchedCoverSpec { n, var: var.into() })
    }

    /// Ring with the cover variable appended and the potential `f + yⁿ`.
    pub fn cover_potential(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        let r = f.ring();
        r.field.check_unit(self.n as u64)?;
        if r.var_index(&self.var).is_some() {
            return Err(Error::Invalid(format!("variable `{}` already in ring", self.var)));
        }
        let cr = r.extend(&self.var)?;
        let map: Vec<usize> = (0..r.nvars()).collect();
        f.embed(&cr, &map).add(&cr.var_pow(cr.nvars() - 1, self.n))
    }
}

/// Locates a cover variable: the last `y` with `f = g + c·yⁿ`, `g` free
/// of `y`. Returns its index and `n`.
pub fn detect_cover(f: &TruncatedSeries) -> Option<(usize, u32)> {
    let nv = f.ring().nvars();
    (0..nv).rev().find_map(|i| {
        let with: Vec<&Monomial> = f.terms().map(|(m, _)| m).filter(|m| m.0[i] > 0).collect();
        match with.as_slice() {
            [m] if m.0.iter().enumerate().all(|(k, &e)| k == i || e == 0) && m.0[i] >= 2 => Some((i, m.0[i])),
            _ => None,
        }
    })
}

fn cover_var(x: &MatrixFactorization) -> Result<(usize, u32)> {
    detect_cover(&x.potential)
        .ok_or_else(|| Error::Invalid(format!("{} is not a branched-cover potential", x.potential)))
}

/// `X ⊗̂ Y`, a factorization of `f + g` over the union of the variables.
pub fn tensor_hat(x: &MatrixFactorization, y: &MatrixFactorization) -> Result<MatrixFactorization> {
    let (rx, ry) = (x.ring(), y.ring());
    if rx.field != ry.field {
        return Err(Error::FieldMismatch);
    }
    if let Some(v) = rx.vars().iter().find(|v| ry.vars().contains(v)) {
        return Err(Error::Invalid(format!("variable `{v}` occurs in both rings")));
    }
    let vars: Vec<&String> = rx.vars().iter().chain(ry.vars()).collect();
    let r = Ring::new(&vars, rx.field, rx.prec.max(ry.prec))?;
    let mx: Vec<usize> = (0..rx.nvars()).collect();
    let my: Vec<usize> = (rx.nvars()..rx.nvars() + ry.nvars()).collect();
    let (phi, psi) = (x.phi.embed(&r, &mx), x.psi.embed(&r, &mx));
    let (phi2, psi2) = (y.phi.embed(&r, &my), y.psi.embed(&r, &my));
    let i_n = SeriesMatrix::identity(&r, x.size());
    let i_m = SeriesMatrix::identity(&r, y.size());
    let big_phi = SeriesMatrix::block(&[
        vec![phi.kron(&i_m)?, i_n.kron(&phi2)?],
        vec![i_n.kron(&psi2)?.neg(), psi.kron(&i_m)?],
    ])?;
    let big_psi = SeriesMatrix::block(&[
        vec![psi.kron(&i_m)?, i_n.kron(&phi2)?.neg()],
        vec![i_n.kron(&psi2)?, phi.kron(&i_m)?],
    ])?;
    let f = x.potential.embed(&r, &mx).add(&y.potential.embed(&r, &my))?;
    MatrixFactorization::new(f, big_phi, big_psi)
}

/// `Ω(X ⊗̂ (y, y^{n-1}))`: the factorization over `f + yⁿ` whose cokernel
/// is the syzygy over the cover of the module `cok X`.
pub fn branched_cover(x: &MatrixFactorization, spec: &BranchedCoverSpec) -> Result<MatrixFactorization> {
    if !x.is_reduced() {
        return Err(Error::Invalid("branched cover of a non-reduced factorization".into()));
    }
    x.ring().field.check_unit(spec.n as u64)?;
    let ry = Ring::new(&[spec.var.as_str()], x.ring().field, x.prec())?;
    let yn = ry.var_pow(0, spec.n);
    let y = MatrixFactorization::new(
        yn,
        SeriesMatrix::scalar(&ry, 1, &ry.var(0)),
        SeriesMatrix::scalar(&ry, 1, &ry.var_pow(0, spec.n - 1)),
    )?;
    Ok(tensor_hat(x, &y)?.syzygy())
}

/// `([[ψ, y^k·I], [0, φ]], [[φ, -y^k·I], [0, ψ]])` for `N = (φ, ψ)` over a
/// cover ring; the middle term of `0 → ΩN → · → N → 0` with class `y^k`.
pub fn extension_block(n: &MatrixFactorization, k: u32) -> Result<MatrixFactorization> {
    if k < 1 {
        return Err(Error::Invalid("extension_block needs k >= 1".into()));
    }
    let (yi, _) = cover_var(n)?;
    let r = n.ring();
    let yk = SeriesMatrix::scalar(r, n.size(), &r.var_pow(yi, k));
    let z = SeriesMatrix::zeros(r, n.size(), n.size());
    let phi = SeriesMatrix::block(&[vec![n.psi.clone(), yk.clone()], vec![z.clone(), n.phi.clone()]])?;
    let psi = SeriesMatrix::block(&[vec![n.phi.clone(), yk.neg()], vec![z, n.psi.clone()]])?;
    MatrixFactorization::new(n.potential.clone(), phi, psi)
}

/// The extension `E = ([[φ_Y, α], [0, φ_X]], [[ψ_Y, -β'], [0, ψ_X]])` of
/// `X` by `Y` given by a map `(α, β): ΩX → Y`, i.e. `α ψ_X = φ_Y β` and
/// `β φ_X = ψ_Y α`.
pub fn extension_from_class(
    x: &MatrixFactorization,
    y: &MatrixFactorization,
    alpha: &SeriesMatrix,
    beta: &SeriesMatrix,
) -> Result<MatrixFactorization> {
    let r = x.ring();
    let z = SeriesMatrix::zeros(r, x.size(), y.size());
    // ψ_E = [[ψ_Y, γ], [0, ψ_X]] with φ_Y γ + α ψ_X = 0, so γ = -β
    let phi = SeriesMatrix::block(&[vec![y.phi.clone(), alpha.clone()], vec![z.clone(), x.phi.clone()]])?;
    let psi = SeriesMatrix::block(&[vec![y.psi.clone(), beta.neg()], vec![z, x.psi.clone()]])?;
    MatrixFactorization::new(x.potential.clone(), phi, psi)
}

/// Module `cok P` over `S/(f)` given by generators (rows) and relations
/// (columns).
#[derive(Clone, PartialEq, Eq)]
pub struct ModulePresentation {
    pub potential: TruncatedSeries,
    pub matrix: SeriesMatrix,
}

impl ModulePresentation {
    pub fn new(potential: TruncatedSeries, matrix: SeriesMatrix) -> Result<Self> {
        if matrix.ring() != potential.ring() {
            return Err(Error::RingMismatch("presentation and potential".into()));
        }
        Ok(ModulePresentation { potential, matrix })
    }

    pub fn ring(&self) -> &Ring {
        self.potential.ring()
    }

    pub fn generators(&self) -> usize {
        self.matrix.rows()
    }

    /// Sets variable `v` to zero and removes it from the ring; the
    /// potential loses its `v`-terms.
    pub fn eliminate_var(&self, v: usize) -> Result<ModulePresentation> {
        let r = self.ring();
        let keep: Vec<&String> = r.vars().iter().enumerate().filter(|(i, _)| *i != v).map(|(_, s)| s).collect();
        let nr = Ring::new(&keep, r.field, r.prec)?;
        let map: Vec<usize> = (0..r.nvars()).map(|i| if i > v { i - 1 } else { i.min(nr.nvars().saturating_sub(1)) }).collect();
        let f = self.potential.set_zero(v).embed(&nr, &map);
        let m = self.matrix.map(|e| e.set_zero(v)).embed(&nr, &map);
        ModulePresentation::new(f, m)
    }
}

impl fmt::Debug for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cok {} over {}", self.matrix, self.potential)
    }
}

/// `[φ_N | y^j·I]`, presenting `N/y^jN`.
pub fn quotient_presentation(n: &MatrixFactorization, j: u32) -> Result<ModulePresentation> {
    let (yi, ne) = cover_var(n)?;
    if j < 1 || j > ne {
        return Err(Error::Invalid(format!("quotient exponent {j} outside 1..={ne}")));
    }
    let r = n.ring();
    let yj = SeriesMatrix::scalar(r, n.size(), &r.var_pow(yi, j));
    ModulePresentation::new(n.potential.clone(), SeriesMatrix::block(&[vec![n.phi.clone(), yj]])?)
}

/// Presentation of `y^i N / y^j N`, isomorphic to `N/y^{j-i}N` since `y`
/// is a non-zerodivisor on `N`.
pub fn filtration_piece(n: &MatrixFactorization, i: u32, j: u32) -> Result<ModulePresentation> {
    if i >= j {
        return Err(Error::Invalid(format!("empty filtration piece {i}..{j}")));
    }
    quotient_presentation(n, j - i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e6() -> (Ring, TruncatedSeries) {
        let r = Ring::new(&["x", "y"], Field::default(), 30).unwrap();
        let f = r.parse("x^4+y^3").unwrap();
        (r, f)
    }

    fn n1() -> MatrixFactorization {
        let (_, f) = e6();
        MatrixFactorization::from_strs(&f, &[&["x^3", "-y"], &["y^2", "x"]], &[&["x", "y"], &["-y^2", "x^3"]]).unwrap()
    }

    fn base(e: u32, a: u32) -> MatrixFactorization {
        let r = Ring::new(&["x"], Field::default(), 30).unwrap();
        let f = r.var_pow(0, a);
        MatrixFactorization::new(
            f,
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, e)),
            SeriesMatrix::scalar(&r, 1, &r.var_pow(0, a - e)),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let (_, f) = e6();
        let t = MatrixFactorization::trivial(&f).validate();
        assert!(t.valid && !t.reduced);
        let rep = n1().validate();
        assert!(rep.valid && rep.reduced);
        let mut bad = n1();
        bad.phi.set(1, 0, f.ring().parse("y^2+x^3").unwrap());
        let rep = bad.validate();
        assert!(!rep.valid);
        let fail = rep.failure.unwrap();
        assert_eq!((fail.product.as_str(), fail.row, fail.col, fail.degree), ("phi*psi", 1, 0, 4));
    }

    #[test]
    fn syzygy_involution() {
        let x = n1();
        assert_eq!(x.syzygy().syzygy(), x);
        let (_, f) = e6();
        assert_eq!(MatrixFactorization::free(&f).syzygy(), MatrixFactorization::trivial(&f));
    }

    #[test]
    fn tensor_matches_block_formula() {
        let x = base(3, 4);
        let ry = Ring::new(&["y"], Field::default(), 30).unwrap();
        let y = MatrixFactorization::new(
            ry.var_pow(0, 3),
            SeriesMatrix::scalar(&ry, 1, &ry.var(0)),
            SeriesMatrix::scalar(&ry, 1, &ry.var_pow(0, 2)),
        )
        .unwrap();
        let t = tensor_hat(&x, &y).unwrap();
        assert_eq!(t.phi.to_string(), "[[x^3, y], [-y^2, x]]");
        assert_eq!(t.psi.to_string(), "[[x, -y], [y^2, x^3]]");
        assert!(t.validate().reduced);
        assert_eq!(t.potential.to_string(), "y^3+x^4");
    }

    #[test]
    fn cover_is_valid_and_graded() {
        let c = branched_cover(&base(1, 4), &BranchedCoverSpec::new(3, "y").unwrap()).unwrap();
        assert!(c.validate().valid);
        let g = c.grading().unwrap();
        assert_eq!(g.weights, vec![3, 4]);
        assert_eq!(g.total, 12);
        assert_eq!(c.rank().unwrap(), 1);
        assert!(branched_cover(&MatrixFactorization::free(&base(1, 4).potential), &BranchedCoverSpec::new(3, "y").unwrap()).is_err());
    }

    #[test]
    fn strip_removes_trivial_summands() {
        let x = n1();
        let (_, f) = e6();
        let padded = x
            .direct_sum(&MatrixFactorization::trivial(&f))
            .unwrap()
            .direct_sum(&MatrixFactorization::free(&f))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let conj = padded.random_conjugate(&mut rng).unwrap();
        let (s, free) = conj.strip_trivial_summands();
        assert_eq!(free, 1);
        assert_eq!(s.size(), 2);
        assert!(s.validate().valid && s.is_reduced());
        assert_eq!(x.strip_trivial_summands(), (x.clone(), 0));
        let e = extension_block(&MatrixFactorization::free(&f), 1).unwrap();
        let (s, free) = e.strip_trivial_summands();
        assert_eq!((s.size(), free), (0, 1));
    }

    #[test]
    fn file_roundtrip() {
        let x = n1();
        let s = x.to_file_string();
        assert!(s.starts_with("ring x,y\nprec 30\nfield fp:32003\npotential y^3+x^4\nphi\n[x^3, -y]\n"));
        let back = MatrixFactorization::parse_file(&s).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.to_file_string(), s);
        assert!(MatrixFactorization::parse_file("ring x\nprec 3\nfield fp:7\npotential x^2\nphi\n[x]\npsi\n[x^2]\n").is_err());
    }

    #[test]
    fn weights() {
        let (_, f) = e6();
        assert_eq!(potential_weights(&f).unwrap(), vec![3, 4]);
        let r = Ring::new(&["x", "y1", "y2"], Field::default(), 30).unwrap();
        assert_eq!(potential_weights(&r.parse("x^2+y1^2+y2^2").unwrap()).unwrap(), vec![1, 1, 1]);
        let r = Ring::new(&["x", "y"], Field::default(), 30).unwrap();
        assert!(potential_weights(&r.parse("x^2+x*y^3+y^4").unwrap()).is_err());
        assert_eq!(detect_cover(&f), Some((1, 3)));
    }

    #[test]
    fn quotient_presentation_shape() {
        let p = quotient_presentation(&n1(), 1).unwrap();
        assert_eq!((p.matrix.rows(), p.matrix.cols()), (2, 4));
        let base = p.eliminate_var(1).unwrap();
        assert_eq!(base.ring().vars(), &["x".to_string()]);
        assert_eq!(base.matrix.to_string(), "[[x^3, 0, 0, 0], [0, x, 0, 0]]");
        assert!(quotient_presentation(&n1(), 4).is_err());
    }
}
