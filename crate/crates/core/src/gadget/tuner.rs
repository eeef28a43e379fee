//! Search for a clique probability `ρ` that balances `Pr(Y=1)` against `Pr(Y=t)`.
//!
//! The grid is `ρ_μ = N^{-3}(1+δ)^μ`, `δ = χ/(16(n+m))`, up to `λ/N`. Grid points are
//! dyadic rationals (`precision_bits` fractional bits) obtained by rounding the
//! recursion `ρ_{μ+1} = ρ_μ(1+δ)` down, so consecutive ratios stay within `1+δ`.
//! `ζ(ρ) = Z^1/Z^t` is evaluated exactly from one symbolic run of the weight recurrence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::number::{exp_bounds, int, inverse_three_quarter_power};

use super::dp::{z_polynomials, IntPoly};
use super::phase::phase_constants;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TunerConfig {
    pub precision_bits: u32,
    /// Largest clique size the exact symbolic recurrence is attempted for.
    pub n_limit: usize,
    /// Size from which the asymptotic statements are assumed; informational only.
    pub n0: usize,
    pub max_grid: u64,
}

impl Default for TunerConfig {
    fn default() -> Self {
        Self {
            precision_bits: 128,
            n_limit: 32,
            n0: 0,
            max_grid: 20_000_000,
        }
    }
}

/// `ζ` as a ratio of two polynomials in the clique weight `x = ρ/(1−ρ)`.
#[derive(Clone, Debug)]
pub struct ZetaCurve {
    pub clique: usize,
    pub terminals: usize,
    pub p_terminal: BigRational,
    pub p_terminal_exact: bool,
    degree: usize,
    z_one: Vec<BigInt>,
    z_all: Vec<BigInt>,
}

fn padded(p: &IntPoly, len: usize) -> Vec<BigInt> {
    let mut v = p.coeffs().to_vec();
    v.resize(len, BigInt::zero());
    v
}

impl ZetaCurve {
    pub fn new(clique: usize, terminals: usize, q: &BigRational, bits: u32) -> Result<Self> {
        if clique == 0 || terminals == 0 {
            return Err(Error::InvalidParameter("gadget needs N ≥ 1 and t ≥ 1".into()));
        }
        let (p, exact) = inverse_three_quarter_power(clique as u64, bits);
        if p >= BigRational::one() {
            return Err(Error::InvalidParameter(
                "N = 1 gives an infinite clique-terminal weight".into(),
            ));
        }
        let gamma_terminal = &p / (int(1) - &p);
        let polys = z_polynomials(terminals, clique, &gamma_terminal, q);
        let degree = clique * (clique - 1) / 2;
        Ok(Self {
            clique,
            terminals,
            p_terminal: p,
            p_terminal_exact: exact,
            degree,
            z_one: padded(&polys[0], degree + 1),
            z_all: padded(&polys[terminals - 1], degree + 1),
        })
    }

    /// Homogenised `(Z^1, Z^t)` at `ρ = a/b`, both scaled by the same positive factor.
    fn eval_pair(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        // x = a/(b−a); evaluate Σ c_i a^i (b−a)^{d−i}
        let c = b - a;
        let d = self.degree;
        let mut one = self.z_one[d].clone();
        let mut all = self.z_all[d].clone();
        let mut cp = BigInt::one();
        for i in (0..d).rev() {
            cp *= &c;
            one = one * a + &self.z_one[i] * &cp;
            all = all * a + &self.z_all[i] * &cp;
        }
        (one, all)
    }

    pub fn zeta(&self, rho: &BigRational) -> Result<BigRational> {
        if !rho.is_positive() || *rho >= int(1) {
            return Err(Error::InvalidParameter(format!("rho = {rho} outside (0,1)")));
        }
        let (one, all) = self.eval_pair(rho.numer(), rho.denom());
        Ok(BigRational::new(one, all))
    }

    pub fn psi(&self, rho: &BigRational) -> Result<BigRational> {
        Ok(int(1) / self.zeta(rho)?)
    }
}

/// The `ρ` grid for given `(N, t, q, χ)`.
#[derive(Clone, Debug)]
pub struct RhoGrid {
    pub delta: BigRational,
    pub bits: u32,
    pub upper: BigRational,
    numerators: Vec<BigInt>,
}

impl RhoGrid {
    pub fn new(
        clique: usize,
        terminals: usize,
        q: &BigRational,
        chi: &BigRational,
        config: &TunerConfig,
    ) -> Result<Self> {
        if !chi.is_positive() {
            return Err(Error::InvalidParameter("chi must be positive".into()));
        }
        let n = clique + terminals;
        let m = clique * (clique - 1) / 2 + clique * terminals;
        let delta = chi / int(16 * (n + m) as i64);
        let phase = phase_constants(q, config.precision_bits)?;
        let upper = &phase.lambda.lo / int(clique as i64);
        let bits = config.precision_bits;
        let scale = BigInt::one() << bits;
        let n3 = BigInt::from(clique).pow(3);
        // ceil(2^bits / N^3) so the first point is not below N^-3
        let mut cur = (&scale + &n3 - 1u32) / &n3;
        let upper_num = (&upper * BigRational::from_integer(scale.clone())).floor().to_integer();
        let (dn, dd) = (delta.numer() + delta.denom(), delta.denom().clone());
        let mut numerators = Vec::new();
        while cur <= upper_num {
            if numerators.len() as u64 >= config.max_grid {
                return Err(Error::InvalidParameter(format!(
                    "grid exceeds {} points; increase chi",
                    config.max_grid
                )));
            }
            let next = &cur * &dn / &dd;
            numerators.push(cur);
            cur = next;
        }
        Ok(Self {
            delta,
            bits,
            upper,
            numerators,
        })
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn rho(&self, mu: usize) -> BigRational {
        BigRational::new(self.numerators[mu].clone(), BigInt::one() << self.bits)
    }

    fn pair(&self, curve: &ZetaCurve, mu: usize) -> (BigInt, BigInt) {
        curve.eval_pair(&self.numerators[mu], &(BigInt::one() << self.bits))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TuneResult {
    #[serde(serialize_with = "ser_rat")]
    pub rho: BigRational,
    pub mu: usize,
    pub grid_len: usize,
    #[serde(serialize_with = "ser_rat")]
    pub zeta: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub delta: BigRational,
    /// Acceptance band actually enforced; it lies inside `[e^{−χ/2}γ, e^{χ/2}γ]`.
    #[serde(serialize_with = "ser_rat")]
    pub accept_low: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub accept_high: BigRational,
    pub p_terminal_exact: bool,
    /// Whether `N ≥ max(t^16, N0)` and `N^{1/4}` is an integer.
    pub asymptotic_regime: bool,
}

pub(crate) fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `L ≤ Ln/Ld`, i.e. `one/all ≥ Ln/Ld`.
fn at_least(one: &BigInt, all: &BigInt, bound: &BigRational) -> bool {
    one * bound.denom() >= all * bound.numer()
}

fn at_most(one: &BigInt, all: &BigInt, bound: &BigRational) -> bool {
    one * bound.denom() <= all * bound.numer()
}

pub fn tune_rho(
    clique: usize,
    terminals: usize,
    q: &BigRational,
    gamma: &BigRational,
    chi: &BigRational,
) -> Result<TuneResult> {
    tune_rho_with(clique, terminals, q, gamma, chi, &TunerConfig::default())
}

pub fn tune_rho_with(
    clique: usize,
    terminals: usize,
    q: &BigRational,
    gamma: &BigRational,
    chi: &BigRational,
    config: &TunerConfig,
) -> Result<TuneResult> {
    if clique > config.n_limit {
        return Err(Error::GadgetTooLarge {
            n: clique as u64,
            limit: config.n_limit as u64,
        });
    }
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    let grid = RhoGrid::new(clique, terminals, q, chi, config)?;
    let curve = ZetaCurve::new(clique, terminals, q, config.precision_bits)?;
    let half = chi / int(2);
    // inner band: certified to lie within [e^{−χ/2}γ, e^{χ/2}γ]
    let accept_low = exp_bounds(&-&half, config.precision_bits).hi * gamma;
    let accept_high = exp_bounds(&half, config.precision_bits).lo * gamma;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty rho grid (λ/N < N^-3)".into()));
    }
    let last = grid.len() - 1;
    let first = grid.pair(&curve, 0);
    let end = grid.pair(&curve, last);
    let no_crossing = || Error::NoCrossing {
        zeta_low: Box::new(BigRational::new(first.0.clone(), first.1.clone())),
        zeta_high: Box::new(BigRational::new(end.0.clone(), end.1.clone())),
        grid_len: grid.len() as u64,
    };
    let mu = if at_least(&first.0, &first.1, &accept_low) {
        0
    } else if !at_least(&end.0, &end.1, &accept_low) {
        return Err(no_crossing());
    } else {
        // invariant: lo fails the lower bound, hi meets it
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let (one, all) = grid.pair(&curve, mid);
            if at_least(&one, &all, &accept_low) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let (one, all) = grid.pair(&curve, mu);
    if !at_most(&one, &all, &accept_high) {
        return Err(no_crossing());
    }
    let fourth = crate::model::number::exact_fourth_root(clique as u64).is_some();
    let t16 = (terminals as u128).saturating_pow(16);
    Ok(TuneResult {
        rho: grid.rho(mu),
        mu,
        grid_len: grid.len(),
        zeta: BigRational::new(one, all),
        delta: grid.delta.clone(),
        accept_low,
        accept_high,
        p_terminal_exact: curve.p_terminal_exact,
        asymptotic_regime: fourth && clique as u128 >= t16.max(config.n0 as u128),
    })
}

/// Outcome of evaluating `ψ` on every grid point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub points: usize,
    /// Indices `μ` with `ψ(ρ_{μ+1}) > ψ(ρ_μ)`.
    pub increases: Vec<usize>,
    /// Indices with `ψ(ρ_{μ+1}) = ψ(ρ_μ)`.
    pub ties: Vec<usize>,
}

impl MonotonicityReport {
    pub fn non_increasing(&self) -> bool {
        self.increases.is_empty()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.increases.is_empty() && self.ties.is_empty()
    }
}

/// Exact check that `ψ = Z^t/Z^1` never increases along the grid.
pub fn psi_monotonicity(
    clique: usize,
    terminals: usize,
    q: &BigRational,
    chi: &BigRational,
    config: &TunerConfig,
) -> Result<MonotonicityReport> {
    if clique > config.n_limit {
        return Err(Error::GadgetTooLarge {
            n: clique as u64,
            limit: config.n_limit as u64,
        });
    }
    let grid = RhoGrid::new(clique, terminals, q, chi, config)?;
    let curve = ZetaCurve::new(clique, terminals, q, config.precision_bits)?;
    const CHUNK: usize = 2048;
    let mut report = MonotonicityReport {
        points: grid.len(),
        increases: Vec::new(),
        ties: Vec::new(),
    };
    let mut prev: Option<(BigInt, BigInt)> = None;
    let mut start = 0;
    while start < grid.len() {
        let stop = (start + CHUNK).min(grid.len());
        let pairs: Vec<(BigInt, BigInt)> = (start..stop)
            .into_par_iter()
            .map(|mu| grid.pair(&curve, mu))
            .collect();
        for (offset, cur) in pairs.into_iter().enumerate() {
            if let Some((one0, all0)) = &prev {
                // ψ_{μ+1} vs ψ_μ: all1/one1 vs all0/one0
                let lhs = &cur.1 * one0;
                let rhs = all0 * &cur.0;
                let mu = start + offset - 1;
                if lhs > rhs {
                    report.increases.push(mu);
                } else if lhs == rhs {
                    report.ties.push(mu);
                }
            }
            prev = Some(cur);
        }
        start = stop;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{dp_weights, z_k};
    use crate::model::number::rat;

    #[test]
    fn curve_matches_numeric_table() {
        let q = int(3);
        let curve = ZetaCurve::new(4, 2, &q, 96).unwrap();
        assert!(!curve.p_terminal_exact);
        let gt = &curve.p_terminal / (int(1) - &curve.p_terminal);
        for rho in [rat(1, 64), rat(1, 5)] {
            let gc = &rho / (int(1) - &rho);
            let s = z_k(&dp_weights(2, 4, &gc, &gt).unwrap(), 2, 4, &q).unwrap();
            assert_eq!(curve.zeta(&rho).unwrap(), s.zeta);
            assert_eq!(curve.psi(&rho).unwrap() * curve.zeta(&rho).unwrap(), int(1));
        }
    }

    #[test]
    fn grid_steps_and_range() {
        let cfg = TunerConfig::default();
        let grid = RhoGrid::new(16, 2, &int(3), &int(1), &cfg).unwrap();
        assert!(grid.rho(0) >= rat(1, 4096));
        assert!(grid.rho(grid.len() - 1) <= grid.upper);
        let one_plus = int(1) + &grid.delta;
        for mu in [0, 1, grid.len() / 2, grid.len() - 2] {
            let ratio = grid.rho(mu + 1) / grid.rho(mu);
            assert!(ratio <= one_plus && ratio > int(1));
        }
    }

    #[test]
    fn tuner_balances_or_reports() {
        let (q, chi) = (int(3), int(1));
        let r = tune_rho(8, 2, &q, &int(2), &chi).unwrap();
        assert!(r.zeta >= r.accept_low && r.zeta <= r.accept_high);
        assert!(!r.asymptotic_regime);
        let curve = ZetaCurve::new(8, 2, &q, 128).unwrap();
        assert_eq!(curve.zeta(&r.rho).unwrap(), r.zeta);

        let huge = BigRational::from_integer(BigInt::from(10u32).pow(30));
        assert!(matches!(
            tune_rho(8, 2, &q, &huge, &chi),
            Err(Error::NoCrossing { .. })
        ));
        assert!(matches!(
            tune_rho(81, 2, &q, &int(2), &chi),
            Err(Error::GadgetTooLarge { .. })
        ));
    }
}
