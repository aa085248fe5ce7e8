//! Dense univariate polynomials over a [`Field`], with roots in the field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};

use crate::field::{Field, Scalar};

/// Coefficients from the constant term upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub field: Field,
    pub coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Poly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Field) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly::new(c.field(), vec![c])
    }

    /// `t - λ`.
    pub fn linear(lambda: &Scalar) -> Poly {
        let f = lambda.field();
        Poly::new(f, vec![-lambda, f.one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let mut v = self.field.zero();
        for c in self.coeffs.iter().rev() {
            v = &(&v * t) + c;
        }
        v
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = self.field.zero();
        Poly::new(
            self.field,
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-self.field.one()))
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.field, out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut r = Poly::constant(self.field.one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().inv().expect("nonzero lead");
        let mut r = self.coeffs.clone();
        let mut q = vec![self.field.zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().expect("nonempty") * &inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = &r[k + i] - &(&c * dc);
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Scalar::is_zero) {
                r.pop();
            }
        }
        (Poly::new(self.field, q), Poly::new(self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv().expect("nonzero"))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &self.field.from_i64(i as i64))
                .collect(),
        )
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g = gcd`.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::constant(f.one()), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::constant(f.one()));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = r0.lead().inv().expect("nonzero gcd");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Multiplicity of `λ` as a root.
    pub fn root_multiplicity(&self, lambda: &Scalar) -> usize {
        let lin = Poly::linear(lambda);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            let (q, r) = p.divrem(&lin);
            if !r.is_zero() {
                break;
            }
            p = q;
            m += 1;
        }
        m
    }

    fn powmod(&self, mut e: BigInt, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut r = Poly::constant(self.field.one()).rem(m);
        while e.is_positive() {
            if e.is_odd() {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Distinct roots lying in the field, sorted by their printed form.
    pub fn roots<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Scalar> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = match self.field {
            Field::Prime(p) => self.roots_mod(p, rng),
            Field::Rational => self.roots_rational(),
        };
        roots.sort_by_key(|r| r.to_string());
        roots.dedup();
        roots
    }

    fn roots_mod<R: Rng + ?Sized>(&self, p: u32, rng: &mut R) -> Vec<Scalar> {
        let f = self.field;
        if p < 2000 {
            return (0..p as i64).map(|v| f.from_i64(v)).filter(|v| self.eval(v).is_zero()).collect();
        }
        let t = Poly::new(f, vec![f.zero(), f.one()]);
        // product of the distinct linear factors
        let tp = t.powmod(BigInt::from(p), self);
        let mut g = self.gcd(&tp.sub(&t));
        let mut out = Vec::new();
        let mut stack = vec![std::mem::replace(&mut g, Poly::zero(f))];
        while let Some(h) = stack.pop() {
            match h.degree() {
                None | Some(0) => continue,
                Some(1) => {
                    let h = h.monic();
                    out.push(-&h.coeffs[0]);
                    continue;
                }
                _ => {}
            }
            loop {
                let a = f.random(rng);
                let shifted = Poly::new(f, vec![a, f.one()]);
                let s = shifted
                    .powmod(BigInt::from((p - 1) / 2), &h)
                    .sub(&Poly::constant(f.one()));
                let d = h.gcd(&s);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < h.degree().expect("nonzero") {
                    let (q, _) = h.divrem(&d);
                    stack.push(d);
                    stack.push(q);
                    break;
                }
            }
        }
        out
    }

    fn roots_rational(&self) -> Vec<Scalar> {
        // squarefree part, cleared to primitive integer coefficients
        let sf = self.divrem(&self.gcd(&self.derivative())).0;
        let mut den = BigInt::one();
        for c in &sf.coeffs {
            let Scalar::Rat(r) = c else { unreachable!() };
            den = den.lcm(r.denom());
        }
        let ints: Vec<BigInt> = sf
            .coeffs
            .iter()
            .map(|c| {
                let Scalar::Rat(r) = c else { unreachable!() };
                r.numer() * (&den / r.denom())
            })
            .collect();
        let mut out = Vec::new();
        let mut rest = ints.clone();
        // zero root
        while rest.first().is_some_and(Zero::is_zero) {
            rest.remove(0);
            if !out.iter().any(|r: &Scalar| r.is_zero()) {
                out.push(Field::Rational.zero());
            }
        }
        if rest.len() <= 1 {
            return out;
        }
        // p-adic lifting of simple roots modulo a prime not dividing the
        // leading coefficient or the discriminant, then reconstruction
        let lead = rest.last().expect("nonempty").clone();
        let bound: BigInt = rest.iter().map(|c| c.abs()).max().expect("nonempty") * BigInt::from(2) + 1;
        for p in [32003u32, 32009, 32027, 32029, 32051] {
            let fp = Field::Prime(p);
            if (&lead % BigInt::from(p)).is_zero() {
                continue;
            }
            let red = Poly::new(fp, rest.iter().map(|c| fp.from_bigint(c)).collect());
            if red.gcd(&red.derivative()).degree() != Some(0) {
                continue;
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p as u64);
            for r in red.roots_mod(p, &mut rng) {
                if let Some(q) = lift_and_reconstruct(&rest, p, &r, &bound) {
                    let s = Scalar::Rat(q);
                    if self.eval(&s).is_zero() && !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
            return out;
        }
        out
    }
}

fn eval_int(c: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut v = BigInt::zero();
    for a in c.iter().rev() {
        v = (v * x + a).mod_floor(m);
    }
    v
}

fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

fn lift_and_reconstruct(c: &[BigInt], p: u32, r: &Scalar, bound: &BigInt) -> Option<BigRational> {
    let deriv: Vec<BigInt> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * BigInt::from(i))
        .collect();
    let mut m = BigInt::from(p);
    let mut x = BigInt::from(r.to_i64()?).mod_floor(&m);
    // |num|, |den| of any rational root are bounded by the coefficients
    let target = bound * bound * BigInt::from(4);
    for _ in 0..64 {
        if let Some(q) = rational_reconstruct(&x, &m) {
            let num = q.numer();
            let ok = c
                .iter()
                .rev()
                .fold(BigRational::zero(), |acc, a| acc * &q + BigRational::from_integer(a.clone()));
            if ok.is_zero() && num.abs() <= *bound {
                return Some(q);
            }
        }
        if m > target {
            return None;
        }
        let m2 = &m * &m;
        let fx = eval_int(c, &x, &m2);
        let dfx = eval_int(&deriv, &x, &m2);
        let inv = modinv(&dfx, &m2)?;
        x = (&x - fx * inv).mod_floor(&m2);
        m = m2;
    }
    None
}

fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    // half-extended Euclid until the remainder drops below sqrt(m/2)
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &(&r1 * &r1 * BigInt::from(2)) > m {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &(&t1 * &t1 * BigInt::from(2)) > m {
        return None;
    }
    Some(BigRational::new(r1, t1))
}
