//! The weight table `w(t′, N′, k, ℓ)` of the gadget `Γ′`: total weight of edge sets with
//! `k` terminal components and `ℓ` other components.
//!
//! The recurrence runs over a small integer ring. With clique weight `x = xn/sx` and
//! terminal weight `y = yn/sy` it tracks `W = w · sx^{C(N′,2)} · sy^{N′t′}`, which keeps
//! every entry integral. The same code runs over `Z[X]` with `x` left symbolic, which is
//! what the tuner uses to evaluate many values of `ρ` from a single table.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::number::binomial;

pub(crate) trait DpRing: Clone + Send + Sync {
    fn r_zero() -> Self;
    fn r_one() -> Self;
    fn r_is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn sub_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &BigInt) -> Self;
}

impl DpRing for BigInt {
    fn r_zero() -> Self {
        Zero::zero()
    }
    fn r_one() -> Self {
        One::one()
    }
    fn r_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &BigInt) -> Self {
        self * c
    }
}

/// Dense integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn constant(c: BigInt) -> Self {
        let mut p = IntPoly(vec![c]);
        p.trim();
        p
    }

    pub fn x() -> Self {
        IntPoly(vec![<BigInt as Zero>::zero(), <BigInt as One>::one()])
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }
}

impl DpRing for IntPoly {
    fn r_zero() -> Self {
        IntPoly(Vec::new())
    }
    fn r_one() -> Self {
        IntPoly(vec![<BigInt as One>::one()])
    }
    fn r_is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), <BigInt as Zero>::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += b;
        }
        self.trim();
    }
    fn sub_assign(&mut self, o: &Self) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), <BigInt as Zero>::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a -= b;
        }
        self.trim();
    }
    fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Self::r_zero();
        }
        let mut out = vec![<BigInt as Zero>::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let mut p = IntPoly(out);
        p.trim();
        p
    }
    fn scale(&self, c: &BigInt) -> Self {
        if Zero::is_zero(c) {
            return Self::r_zero();
        }
        IntPoly(self.0.iter().map(|a| a * c).collect())
    }
}

/// Scaled table over a ring, indexed by `(t′, N′, k, ℓ)` with `k ≤ t`, `ℓ ≤ N`.
pub(crate) struct ScaledTable<R> {
    pub t: usize,
    pub n: usize,
    vals: Vec<R>,
}

impl<R: DpRing> ScaledTable<R> {
    fn idx(&self, tt: usize, nn: usize, k: usize, l: usize) -> usize {
        ((tt * (self.n + 1) + nn) * (self.t + 1) + k) * (self.n + 1) + l
    }

    pub fn get(&self, tt: usize, nn: usize, k: usize, l: usize) -> &R {
        &self.vals[self.idx(tt, nn, k, l)]
    }

    /// Fills the table for all `t′ ≤ t`, `N′ ≤ n`.
    pub fn compute(t: usize, n: usize, xv: &R, sx: &R, yv: &R, sy: &R) -> Self {
        let size = (t + 1) * (n + 1) * (t + 1) * (n + 1);
        let mut table = ScaledTable {
            t,
            n,
            vals: vec![R::r_zero(); size],
        };
        let powers = |base: &R, upto: usize| {
            let mut p = vec![R::r_one()];
            for i in 0..upto {
                let next = p[i].mul(base);
                p.push(next);
            }
            p
        };
        let sx_pow = powers(sx, n * n / 4 + 1);
        let sy_pow = powers(sy, n * t + 1);
        let mut x_total = sx.clone();
        x_total.add_assign(xv);
        let mut y_total = sy.clone();
        y_total.add_assign(yv);
        let x_total_pow = powers(&x_total, n * n.saturating_sub(1) / 2);
        let y_total_pow = powers(&y_total, n * t);
        let binom_t: Vec<Vec<BigInt>> = (0..=t)
            .map(|a| (0..=t).map(|b| binomial(a, b)).collect())
            .collect();
        let binom_n: Vec<Vec<BigInt>> = (0..=n)
            .map(|a| (0..=n).map(|b| binomial(a, b)).collect())
            .collect();

        for nn in 0..=n {
            for tt in 0..=t {
                if nn == 0 {
                    let i = table.idx(tt, 0, tt, 0);
                    table.vals[i] = R::r_one();
                    continue;
                }
                let cells: Vec<(usize, usize)> = (0..=tt)
                    .flat_map(|k| (0..=nn).map(move |l| (k, l)))
                    .filter(|&(k, l)| k + l > 1 && (k == 0) == (tt == 0))
                    .collect();
                let computed: Vec<((usize, usize), R)> = cells
                    .par_iter()
                    .map(|&(k, l)| {
                        let mut acc = R::r_zero();
                        if k >= 1 {
                            for i in 1..=tt {
                                if k - 1 > tt - i {
                                    continue;
                                }
                                for j in 1..=nn {
                                    if (i, j) == (tt, nn) {
                                        continue;
                                    }
                                    let a = table.get(i, j, 1, 0);
                                    let b = table.get(tt - i, nn - j, k - 1, l);
                                    if a.r_is_zero() || b.r_is_zero() {
                                        continue;
                                    }
                                    let c = &binom_t[tt][i] * &binom_n[nn - 1][j - 1];
                                    let term = a
                                        .mul(b)
                                        .mul(&sx_pow[j * (nn - j)])
                                        .mul(&sy_pow[j * (tt - i) + (nn - j) * i])
                                        .scale(&c);
                                    acc.add_assign(&term);
                                }
                            }
                        }
                        if l >= 1 {
                            for j in 1..=nn {
                                let a = table.get(0, j, 0, 1);
                                let b = table.get(tt, nn - j, k, l - 1);
                                if a.r_is_zero() || b.r_is_zero() {
                                    continue;
                                }
                                let term = a
                                    .mul(b)
                                    .mul(&sx_pow[j * (nn - j)])
                                    .mul(&sy_pow[j * tt])
                                    .scale(&binom_n[nn - 1][j - 1]);
                                acc.add_assign(&term);
                            }
                        }
                        ((k, l), acc)
                    })
                    .collect();
                let mut rest = x_total_pow[nn * (nn - 1) / 2].mul(&y_total_pow[nn * tt]);
                for ((k, l), v) in computed {
                    rest.sub_assign(&v);
                    let i = table.idx(tt, nn, k, l);
                    table.vals[i] = v;
                }
                let i = if tt > 0 {
                    table.idx(tt, nn, 1, 0)
                } else {
                    table.idx(0, nn, 0, 1)
                };
                table.vals[i] = rest;
            }
        }
        table
    }
}

/// Exact table `w(t′, N′, k, ℓ)` for `t′ ≤ t`, `N′ ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    t: usize,
    n: usize,
    gamma_clique: BigRational,
    gamma_terminal: BigRational,
    values: BTreeMap<(usize, usize, usize, usize), BigRational>,
}

impl DpTable {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma_clique(&self) -> &BigRational {
        &self.gamma_clique
    }

    pub fn gamma_terminal(&self) -> &BigRational {
        &self.gamma_terminal
    }

    /// `w(t′, N′, k, ℓ)`; indices outside the table (including `k = −1`, `ℓ = −1`) give 0.
    pub fn get(&self, tt: i64, nn: i64, k: i64, l: i64) -> BigRational {
        if tt < 0 || nn < 0 || k < 0 || l < 0 {
            return BigRational::zero();
        }
        self.values
            .get(&(tt as usize, nn as usize, k as usize, l as usize))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Non-zero entries in `(t′, N′, k, ℓ)` order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &BigRational)> {
        self.values.iter()
    }
}

/// Runs the recurrence at rational clique weight `γ′` and terminal weight `γ″`.
pub fn dp_weights(
    t: usize,
    n: usize,
    gamma_clique: &BigRational,
    gamma_terminal: &BigRational,
) -> Result<DpTable> {
    if gamma_clique.is_negative() || gamma_terminal.is_negative() {
        return Err(Error::InvalidParameter("gadget weights must be non-negative".into()));
    }
    let (xn, sx) = (gamma_clique.numer().clone(), gamma_clique.denom().clone());
    let (yn, sy) = (gamma_terminal.numer().clone(), gamma_terminal.denom().clone());
    let table = ScaledTable::<BigInt>::compute(t, n, &xn, &sx, &yn, &sy);
    let mut values = BTreeMap::new();
    for tt in 0..=t {
        for nn in 0..=n {
            let scale = num_traits::pow(sx.clone(), nn * nn.saturating_sub(1) / 2)
                * num_traits::pow(sy.clone(), nn * tt);
            for k in 0..=t {
                for l in 0..=n {
                    let v = table.get(tt, nn, k, l);
                    if !Zero::is_zero(v) {
                        values.insert((tt, nn, k, l), BigRational::new(v.clone(), scale.clone()));
                    }
                }
            }
        }
    }
    Ok(DpTable {
        t,
        n,
        gamma_clique: gamma_clique.clone(),
        gamma_terminal: gamma_terminal.clone(),
        values,
    })
}

/// `Z^k` for `k = 1..t`, plus `ψ = Z^t/Z^1` and `ζ = Z^1/Z^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSummary {
    pub z: Vec<BigRational>,
    pub total: BigRational,
    pub psi: BigRational,
    pub zeta: BigRational,
}

impl GadgetSummary {
    /// `Z^k` for `1 ≤ k ≤ t`.
    pub fn z_k(&self, k: usize) -> &BigRational {
        &self.z[k - 1]
    }
}

pub fn z_k(table: &DpTable, t: usize, n: usize, q: &BigRational) -> Result<GadgetSummary> {
    if t == 0 || t > table.t || n > table.n {
        return Err(Error::InvalidParameter(format!(
            "table covers t ≤ {}, N ≤ {}; asked for t = {t}, N = {n}",
            table.t, table.n
        )));
    }
    let mut q_pow = vec![BigRational::one()];
    for l in 0..n {
        let next = &q_pow[l] * q;
        q_pow.push(next);
    }
    let z: Vec<BigRational> = (1..=t)
        .map(|k| {
            (0..=n).fold(BigRational::zero(), |acc, l| {
                acc + table.get(t as i64, n as i64, k as i64, l as i64) * &q_pow[l]
            })
        })
        .collect();
    let total = z.iter().fold(BigRational::zero(), |a, b| a + b);
    if z[0].is_zero() || z[t - 1].is_zero() {
        return Err(Error::InvalidParameter(
            "Z^1 or Z^t vanishes; weights must be positive".into(),
        ));
    }
    Ok(GadgetSummary {
        psi: &z[t - 1] / &z[0],
        zeta: &z[0] / &z[t - 1],
        total,
        z,
    })
}

/// `Z^k` as polynomials in the clique weight `X`, times the common positive constant
/// `sy^{Nt} · qd^N` (`γ″ = yn/sy`, `q = qn/qd`). Index `k−1` holds `Z^k`.
pub(crate) fn z_polynomials(
    t: usize,
    n: usize,
    gamma_terminal: &BigRational,
    q: &BigRational,
) -> Vec<IntPoly> {
    let yn = IntPoly::constant(gamma_terminal.numer().clone());
    let sy = IntPoly::constant(gamma_terminal.denom().clone());
    let table = ScaledTable::<IntPoly>::compute(t, n, &IntPoly::x(), &IntPoly::r_one(), &yn, &sy);
    let (qn, qd) = (q.numer(), q.denom());
    (1..=t)
        .map(|k| {
            let mut acc = IntPoly::r_zero();
            for l in 0..=n {
                let c = num_traits::pow(qn.clone(), l) * num_traits::pow(qd.clone(), n - l);
                acc.add_assign(&table.get(t, n, k, l).scale(&c));
            }
            acc
        })
        .collect()
}
