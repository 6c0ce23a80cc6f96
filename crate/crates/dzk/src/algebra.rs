//! Prime fields, univariate and sparse multivariate polynomials, multilinear
//! extensions of boolean tables, and brute-force hypercube oracles.
//!
//! Hot loops work on raw `u64` residues through [`PrimeModulus`]; the checked
//! [`FieldElem`] wrapper is there for callers that want modulus tracking.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// Largest hypercube dimension the brute-force oracles will enumerate.
pub const MAX_ENUM_VARS: usize = 26;

/// Upper bound (exclusive) on supported moduli, so products fit in `u128`.
pub const MAX_MODULUS: u64 = 1 << 61;

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod64(acc, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = powmod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime `q` of `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeModulus {
    q: u64,
}

impl PrimeModulus {
    pub fn new(q: u64) -> Result<Self, AlgebraError> {
        if !(3..MAX_MODULUS).contains(&q) || !is_prime(q) {
            return Err(AlgebraError::BadModulus(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Bits needed to write one element: `ceil(log2 q)`.
    pub fn bits(&self) -> u64 {
        64 - (self.q - 1).leading_zeros() as u64
    }

    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem { value: v % self.q, modulus: *self }
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.q
    }

    /// Maps a signed integer into `[0, q)`.
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod64(a, b, self.q)
    }

    pub fn pow(&self, b: u64, e: u64) -> u64 {
        powmod64(b, e, self.q)
    }

    pub fn inv(&self, a: u64) -> Result<u64, AlgebraError> {
        if a.is_multiple_of(self.q) {
            return Err(AlgebraError::InverseOfZero);
        }
        Ok(powmod64(a, self.q - 2, self.q))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.q)
    }

    pub fn sum<I: IntoIterator<Item = u64>>(&self, it: I) -> u64 {
        it.into_iter().fold(0, |acc, v| self.add(acc, v))
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A residue tagged with its modulus. Mixing moduli is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    fn same(&self, o: &FieldElem) -> Result<PrimeModulus, AlgebraError> {
        if self.modulus != o.modulus {
            return Err(AlgebraError::ModulusMismatch(self.modulus.q, o.modulus.q));
        }
        Ok(self.modulus)
    }

    pub fn try_add(self, o: FieldElem) -> Result<FieldElem, AlgebraError> {
        let m = self.same(&o)?;
        Ok(m.elem(m.add(self.value, o.value)))
    }

    pub fn try_sub(self, o: FieldElem) -> Result<FieldElem, AlgebraError> {
        let m = self.same(&o)?;
        Ok(m.elem(m.sub(self.value, o.value)))
    }

    pub fn try_mul(self, o: FieldElem) -> Result<FieldElem, AlgebraError> {
        let m = self.same(&o)?;
        Ok(m.elem(m.mul(self.value, o.value)))
    }

    pub fn pow(self, e: u64) -> FieldElem {
        self.modulus.elem(self.modulus.pow(self.value, e))
    }

    pub fn inv(self) -> Result<FieldElem, AlgebraError> {
        Ok(self.modulus.elem(self.modulus.inv(self.value)?))
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on modulus mismatch; use the `try_` methods to handle it.
impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        self.try_add(o).expect("field modulus mismatch")
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        self.try_sub(o).expect("field modulus mismatch")
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        self.try_mul(o).expect("field modulus mismatch")
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.modulus.elem(self.modulus.neg(self.value))
    }
}

/// Returns a uniformly random prime from `[r, 2r]`, deterministic in `seed`.
///
/// Rejection sampling over the integers of the interval, so every prime in
/// range is equally likely.
pub fn sample_prime(r: u64, seed: u64) -> Result<PrimeModulus, AlgebraError> {
    if !(3..MAX_MODULUS / 2).contains(&r) {
        return Err(AlgebraError::BadPrimeRange(r));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let c = rng.gen_range(r..=2 * r);
        if is_prime(c) {
            return PrimeModulus::new(c);
        }
    }
}

/// Smallest prime strictly greater than `x` (and at least 3).
pub fn next_prime_above(x: u64) -> Result<PrimeModulus, AlgebraError> {
    let mut c = x.max(2) + 1;
    while !is_prime(c) {
        c += 1;
        if c >= MAX_MODULUS {
            return Err(AlgebraError::BadModulus(c));
        }
    }
    PrimeModulus::new(c)
}

/// Dense univariate polynomial; `coeffs[j]` multiplies `x^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<u64>,
    pub modulus: PrimeModulus,
}

impl UniPoly {
    pub fn new(coeffs: Vec<u64>, modulus: PrimeModulus) -> Self {
        let coeffs = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        Self { coeffs, modulus }
    }

    pub fn zero(len: usize, modulus: PrimeModulus) -> Self {
        Self { coeffs: vec![0; len], modulus }
    }

    /// Index of the last nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    /// Horner evaluation on raw residues.
    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        self.coeffs.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    pub fn eval_naive(&self, x: u64) -> u64 {
        let m = self.modulus;
        let mut s = 0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            s = m.add(s, m.mul(c, m.pow(x, j as u64)));
        }
        s
    }

    /// Pads with zeros (or errors if a nonzero coefficient would be dropped).
    pub fn resized(&self, len: usize) -> Result<UniPoly, AlgebraError> {
        if let Some(d) = self.degree() {
            if d >= len {
                return Err(AlgebraError::DegreeTooLarge { degree: d, len });
            }
        }
        let mut c = self.coeffs.clone();
        c.resize(len, 0);
        Ok(UniPoly { coeffs: c, modulus: self.modulus })
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let m = self.modulus;
        let len = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![0; len];
        for (j, slot) in c.iter_mut().enumerate() {
            let a = self.coeffs.get(j).copied().unwrap_or(0);
            let b = o.coeffs.get(j).copied().unwrap_or(0);
            *slot = m.add(a, b);
        }
        UniPoly { coeffs: c, modulus: m }
    }

    pub fn scale(&self, s: u64) -> UniPoly {
        let m = self.modulus;
        UniPoly { coeffs: self.coeffs.iter().map(|&c| m.mul(c, s)).collect(), modulus: m }
    }
}

/// The checked entry point: evaluate `p` at a tagged element.
pub fn uni_eval(p: &UniPoly, x: FieldElem) -> Result<FieldElem, AlgebraError> {
    if x.modulus() != p.modulus {
        return Err(AlgebraError::ModulusMismatch(p.modulus.q(), x.modulus().q()));
    }
    Ok(p.modulus.elem(p.eval(x.value())))
}

/// The unique polynomial of degree at most one through two points.
pub fn interpolate_deg1(
    m: PrimeModulus,
    x1: u64,
    y1: u64,
    x2: u64,
    y2: u64,
) -> Result<UniPoly, AlgebraError> {
    if m.reduce(x1) == m.reduce(x2) {
        return Err(AlgebraError::RepeatedNode);
    }
    let slope = m.mul(m.sub(y2, y1), m.inv(m.sub(x2, x1))?);
    let icept = m.sub(y1, m.mul(slope, x1));
    Ok(UniPoly { coeffs: vec![icept, slope], modulus: m })
}

/// Value at zero of the line through `(x1,y1)` and `(x2,y2)`.
pub fn line_at_zero(m: PrimeModulus, x1: u64, y1: u64, x2: u64, y2: u64) -> u64 {
    interpolate_deg1(m, x1, y1, x2, y2).map(|p| p.coeffs[0]).expect("distinct nodes")
}

/// Lagrange interpolation into coefficient form.
pub fn interpolate(m: PrimeModulus, xs: &[u64], ys: &[u64]) -> Result<UniPoly, AlgebraError> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut out = vec![0u64; n.max(1)];
    for i in 0..n {
        // basis numerator prod_{j != i} (x - x_j), built incrementally
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for j in 0..n {
            if j == i {
                continue;
            }
            let diff = m.sub(xs[i], xs[j]);
            if diff == 0 {
                return Err(AlgebraError::RepeatedNode);
            }
            denom = m.mul(denom, diff);
            let mut next = vec![0u64; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = m.add(next[k + 1], b);
                next[k] = m.sub(next[k], m.mul(b, xs[j]));
            }
            basis = next;
        }
        let w = m.mul(ys[i], m.inv(denom)?);
        for (k, &b) in basis.iter().enumerate() {
            out[k] = m.add(out[k], m.mul(b, w));
        }
    }
    Ok(UniPoly { coeffs: out, modulus: m })
}

/// Anything the protocols can query at a point of `F_q^N`.
pub trait Oracle: Send + Sync {
    fn num_vars(&self) -> usize;
    /// Upper bound on the degree in each single variable.
    fn degree(&self) -> usize;
    fn modulus(&self) -> PrimeModulus;
    fn eval(&self, point: &[u64]) -> u64;
}

/// Sparse multivariate polynomial keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    num_vars: usize,
    individual_degree: usize,
    modulus: PrimeModulus,
    monomials: BTreeMap<Vec<u8>, u64>,
}

impl SparsePoly {
    pub fn zero(num_vars: usize, individual_degree: usize, modulus: PrimeModulus) -> Self {
        Self { num_vars, individual_degree, modulus, monomials: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: u64, modulus: PrimeModulus) -> Self {
        let mut p = Self::zero(num_vars, 0, modulus);
        p.add_term(vec![0; num_vars], c).expect("constant term");
        p
    }

    /// Single variable `x_i` (0-based).
    pub fn var(num_vars: usize, i: usize, modulus: PrimeModulus) -> Self {
        let mut e = vec![0u8; num_vars];
        e[i] = 1;
        let mut p = Self::zero(num_vars, 1, modulus);
        p.add_term(e, 1).expect("variable");
        p
    }

    pub fn from_terms<I>(
        num_vars: usize,
        individual_degree: usize,
        modulus: PrimeModulus,
        terms: I,
    ) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u8>, u64)>,
    {
        let mut p = Self::zero(num_vars, individual_degree, modulus);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// Adds `c * x^e`.
    pub fn add_term(&mut self, e: Vec<u8>, c: u64) -> Result<(), AlgebraError> {
        if e.len() != self.num_vars {
            return Err(AlgebraError::Arity { expected: self.num_vars, got: e.len() });
        }
        let maxe = e.iter().copied().max().unwrap_or(0) as usize;
        if maxe > self.individual_degree {
            return Err(AlgebraError::DegreeBound { bound: self.individual_degree, got: maxe });
        }
        let m = self.modulus;
        let c = m.reduce(c);
        let slot = self.monomials.entry(e).or_insert(0);
        *slot = m.add(*slot, c);
        if *slot == 0 {
            self.monomials.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn individual_degree(&self) -> usize {
        self.individual_degree
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn monomials(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Largest exponent actually present in any monomial.
    pub fn actual_degree(&self) -> usize {
        self.monomials.keys().flat_map(|e| e.iter()).copied().max().unwrap_or(0) as usize
    }

    pub fn try_eval(&self, point: &[u64]) -> Result<u64, AlgebraError> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::Arity { expected: self.num_vars, got: point.len() });
        }
        let m = self.modulus;
        let dmax = self.actual_degree();
        // powers[i][e] = point[i]^e
        let powers: Vec<Vec<u64>> = point
            .iter()
            .map(|&x| {
                let mut v = Vec::with_capacity(dmax + 1);
                let mut acc = 1 % m.q();
                for _ in 0..=dmax {
                    v.push(acc);
                    acc = m.mul(acc, m.reduce(x));
                }
                v
            })
            .collect();
        let mut s = 0;
        for (e, &c) in &self.monomials {
            let mut t = c;
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    t = m.mul(t, powers[i][ei as usize]);
                }
            }
            s = m.add(s, t);
        }
        Ok(s)
    }

    pub fn mul(&self, o: &SparsePoly) -> Result<SparsePoly, AlgebraError> {
        if self.num_vars != o.num_vars {
            return Err(AlgebraError::Arity { expected: self.num_vars, got: o.num_vars });
        }
        let m = self.modulus;
        let bound = self.individual_degree + o.individual_degree;
        if bound > u8::MAX as usize {
            return Err(AlgebraError::DegreeBound { bound: u8::MAX as usize, got: bound });
        }
        let mut out = SparsePoly::zero(self.num_vars, bound, m);
        for (e1, &c1) in &self.monomials {
            for (e2, &c2) in &o.monomials {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = out.monomials.entry(e).or_insert(0);
                *slot = m.add(*slot, m.mul(c1, c2));
            }
        }
        out.monomials.retain(|_, v| *v != 0);
        Ok(out)
    }

    pub fn add(&self, o: &SparsePoly) -> Result<SparsePoly, AlgebraError> {
        if self.num_vars != o.num_vars {
            return Err(AlgebraError::Arity { expected: self.num_vars, got: o.num_vars });
        }
        let mut out = self.clone();
        out.individual_degree = self.individual_degree.max(o.individual_degree);
        for (e, &c) in &o.monomials {
            out.add_term(e.clone(), c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: u64) -> SparsePoly {
        let m = self.modulus;
        let mut out = self.clone();
        for v in out.monomials.values_mut() {
            *v = m.mul(*v, s);
        }
        out.monomials.retain(|_, v| *v != 0);
        out
    }

    /// Random polynomial with `terms` monomials (fewer on collisions).
    pub fn random<R: Rng + ?Sized>(
        num_vars: usize,
        individual_degree: usize,
        terms: usize,
        modulus: PrimeModulus,
        rng: &mut R,
    ) -> SparsePoly {
        let mut p = SparsePoly::zero(num_vars, individual_degree, modulus);
        for _ in 0..terms {
            let e: Vec<u8> =
                (0..num_vars).map(|_| rng.gen_range(0..=individual_degree) as u8).collect();
            let c = rng.gen_range(1..modulus.q());
            p.add_term(e, c).expect("within bounds");
        }
        p
    }
}

impl SparsePoly {
    /// Substitutes `vals` for the first `vals.len()` variables.
    pub fn fix_prefix(&self, vals: &[u64]) -> SparsePoly {
        let m = self.modulus;
        let k = vals.len().min(self.num_vars);
        let mut out = SparsePoly::zero(self.num_vars - k, self.individual_degree, m);
        for (e, &c) in &self.monomials {
            let mut t = c;
            for (i, &ei) in e[..k].iter().enumerate() {
                t = m.mul(t, m.pow(vals[i], ei as u64));
            }
            out.add_term(e[k..].to_vec(), t).expect("shape preserved");
        }
        out
    }

    /// Sums out every variable after the first `keep` over `{0, 1}`.
    pub fn sum_suffix(&self, keep: usize) -> SparsePoly {
        let m = self.modulus;
        let mut out = SparsePoly::zero(keep, self.individual_degree, m);
        for (e, &c) in &self.monomials {
            let zeros = e[keep..].iter().filter(|&&x| x == 0).count() as u64;
            out.add_term(e[..keep].to_vec(), m.mul(c, m.pow(2, zeros))).expect("shape preserved");
        }
        out
    }

    /// Appends `extra` variables that appear in no monomial.
    pub fn pad_vars(&self, extra: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.num_vars + extra, self.individual_degree, self.modulus);
        for (e, &c) in &self.monomials {
            let mut e2 = e.clone();
            e2.resize(self.num_vars + extra, 0);
            out.monomials.insert(e2, c);
        }
        out
    }

    /// Same polynomial with a different declared individual degree.
    pub fn with_degree(&self, d: usize) -> Result<SparsePoly, AlgebraError> {
        if self.actual_degree() > d {
            return Err(AlgebraError::DegreeBound { bound: d, got: self.actual_degree() });
        }
        let mut out = self.clone();
        out.individual_degree = d;
        Ok(out)
    }
}

/// Polynomial of individual degree `d` in `vars` variables through the given
/// values on the grid `{0..=d}^vars`; `values[idx]` with the first variable as
/// the most significant base-`(d+1)` digit of `idx`.
pub fn interpolate_grid(m: PrimeModulus, vars: usize, d: usize, values: &[u64]) -> Result<SparsePoly, AlgebraError> {
    let w = d + 1;
    let total = w.checked_pow(vars as u32).ok_or(AlgebraError::TooManyVars { vars, max: MAX_ENUM_VARS })?;
    if values.len() != total {
        return Err(AlgebraError::Arity { expected: total, got: values.len() });
    }
    if (m.q() as usize) < w {
        return Err(AlgebraError::RepeatedNode);
    }
    // inv_v[c][j]: coefficient of x^c in the Lagrange basis polynomial of node j
    let xs: Vec<u64> = (0..w as u64).collect();
    let mut inv_v = vec![vec![0u64; w]; w];
    for j in 0..w {
        let mut ys = vec![0u64; w];
        ys[j] = 1;
        let p = interpolate(m, &xs, &ys)?;
        for (c, &v) in p.coeffs.iter().enumerate().take(w) {
            inv_v[c][j] = v;
        }
    }
    let mut cur = values.to_vec();
    let mut stride = total;
    for _ in 0..vars {
        stride /= w;
        let mut next = vec![0u64; total];
        for base in 0..total {
            let digit = (base / stride) % w;
            if digit != 0 {
                continue;
            }
            for c in 0..w {
                let mut acc = 0;
                for j in 0..w {
                    acc = m.add(acc, m.mul(inv_v[c][j], cur[base + j * stride]));
                }
                next[base + c * stride] = acc;
            }
        }
        cur = next;
    }
    let mut out = SparsePoly::zero(vars, d, m);
    for (idx, &c) in cur.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut e = vec![0u8; vars];
        let mut r = idx;
        for i in (0..vars).rev() {
            e[i] = (r % w) as u8;
            r /= w;
        }
        out.monomials.insert(e, c);
    }
    Ok(out)
}

impl Oracle for SparsePoly {
    fn num_vars(&self) -> usize {
        self.num_vars
    }
    fn degree(&self) -> usize {
        self.individual_degree
    }
    fn modulus(&self) -> PrimeModulus {
        self.modulus
    }
    fn eval(&self, point: &[u64]) -> u64 {
        self.try_eval(point).expect("oracle arity")
    }
}

/// Checked evaluation of a sparse polynomial.
pub fn sparse_eval(f: &SparsePoly, point: &[u64]) -> Result<u64, AlgebraError> {
    f.try_eval(point)
}

fn enum_guard(n: usize) -> Result<(), AlgebraError> {
    if n > MAX_ENUM_VARS {
        return Err(AlgebraError::TooManyVars { vars: n, max: MAX_ENUM_VARS });
    }
    Ok(())
}

/// Writes the bits of `mask` into `out`, first coordinate = most significant.
#[inline]
pub fn fill_bits(out: &mut [u64], mask: u64) {
    let n = out.len();
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = (mask >> (n - 1 - j)) & 1;
    }
}

/// Exact sum of an oracle over `{0,1}^N`.
pub fn hypercube_sum<O: Oracle + ?Sized>(f: &O) -> Result<u64, AlgebraError> {
    let n = f.num_vars();
    enum_guard(n)?;
    let m = f.modulus();
    let mut pt = vec![0u64; n];
    let mut s = 0;
    for mask in 0..(1u64 << n) {
        fill_bits(&mut pt, mask);
        s = m.add(s, f.eval(&pt));
    }
    Ok(s)
}

/// Honest Sumcheck message for variable `i` (1-based): the univariate
/// polynomial obtained by fixing the first `i-1` variables to `fixed` and
/// summing the last `N-i` over the cube. Returned with `degree+1` coefficients.
pub fn partial_sum_univariate<O: Oracle + ?Sized>(
    f: &O,
    fixed: &[u64],
    i: usize,
) -> Result<UniPoly, AlgebraError> {
    let n = f.num_vars();
    if i == 0 || i > n || fixed.len() != i - 1 {
        return Err(AlgebraError::Arity { expected: i.saturating_sub(1), got: fixed.len() });
    }
    let rest = n - i;
    enum_guard(rest)?;
    let m = f.modulus();
    let d = f.degree();
    let xs: Vec<u64> = (0..=d as u64).map(|x| m.reduce(x)).collect();
    let mut pt = vec![0u64; n];
    pt[..i - 1].copy_from_slice(fixed);
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        pt[i - 1] = x;
        let mut s = 0;
        for mask in 0..(1u64 << rest) {
            fill_bits(&mut pt[i..], mask);
            s = m.add(s, f.eval(&pt));
        }
        ys.push(s);
    }
    interpolate(m, &xs, &ys)
}

/// `ceil(log2 n)`, at least 1.
pub fn id_bits(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b.max(1)
}

/// A boolean function on pairs of node IDs, given by its 1-entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoolTable {
    /// Bits per ID; the function takes `2 * bits` boolean inputs.
    pub bits: usize,
    pub entries: Vec<(u64, u64)>,
}

impl BoolTable {
    pub fn new(bits: usize, mut entries: Vec<(u64, u64)>) -> Result<Self, AlgebraError> {
        for &(z, w) in &entries {
            if z >> bits != 0 || w >> bits != 0 {
                return Err(AlgebraError::Arity { expected: bits, got: 64 - z.max(w).leading_zeros() as usize });
            }
        }
        entries.sort_unstable();
        entries.dedup();
        Ok(Self { bits, entries })
    }

    pub fn arity(&self) -> usize {
        2 * self.bits
    }

    pub fn get(&self, z: u64, w: u64) -> bool {
        self.entries.binary_search(&(z, w)).is_ok()
    }
}

/// `chi_b(x) = prod_j (x_j if b_j else 1 - x_j)`, big-endian bits of `b`.
pub fn chi(m: PrimeModulus, b: u64, x: &[u64]) -> u64 {
    let n = x.len();
    let mut acc = 1;
    for (j, &xj) in x.iter().enumerate() {
        let bit = (b >> (n - 1 - j)) & 1;
        let f = if bit == 1 { xj } else { m.sub(1, xj) };
        acc = m.mul(acc, f);
    }
    acc
}

/// Multilinear extension of a [`BoolTable`] at an arbitrary point.
pub fn mle_eval(m: PrimeModulus, table: &BoolTable, point: &[u64]) -> Result<u64, AlgebraError> {
    if point.len() != table.arity() {
        return Err(AlgebraError::Arity { expected: table.arity(), got: point.len() });
    }
    let (x, y) = point.split_at(table.bits);
    let mut s = 0;
    for &(z, w) in &table.entries {
        s = m.add(s, m.mul(chi(m, z, x), chi(m, w, y)));
    }
    Ok(s)
}

/// Symbolic `chi_b` as a sparse polynomial over `vars` variables, placed at
/// offset `at`.
pub fn chi_poly(m: PrimeModulus, vars: usize, at: usize, width: usize, b: u64) -> SparsePoly {
    let mut p = SparsePoly::constant(vars, 1, m);
    for j in 0..width {
        let bit = (b >> (width - 1 - j)) & 1;
        let xj = SparsePoly::var(vars, at + j, m);
        let f = if bit == 1 { xj } else { SparsePoly::constant(vars, 1, m).add(&xj.scale(m.neg(1))).unwrap() };
        p = p.mul(&f).expect("multilinear product");
    }
    p
}

/// Expanded multilinear extension of a table as a [`SparsePoly`].
pub fn mle_poly(m: PrimeModulus, table: &BoolTable) -> SparsePoly {
    let vars = table.arity();
    let mut acc = SparsePoly::zero(vars, 1, m);
    for &(z, w) in &table.entries {
        let t = chi_poly(m, vars, 0, table.bits, z).mul(&chi_poly(m, vars, table.bits, table.bits, w)).unwrap();
        acc = acc.add(&t).unwrap();
    }
    acc
}
