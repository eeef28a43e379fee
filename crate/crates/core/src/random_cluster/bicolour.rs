use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::number::to_f64;
use crate::model::Seed;

/// Bounds for colouring `ν` elements, split into `s` blocks of size at most `ν_max`,
/// yellow and blue by two independent Bernoulli(π̂) processes:
///
/// * `Pr(no block bicoloured) ≤ [(1−π̂)^{ν/s}(2−(1−π̂)^{ν/s})]^s`
/// * `Pr(some block bicoloured) ≤ ν[1−(1−π̂)^{ν_max}]²`
///
/// "Bicoloured" means the block holds at least one yellow and one blue element.
pub fn bicolour_bounds(nu: u64, s: u64, nu_max: u64, pi_hat: &BigRational) -> Result<(f64, f64)> {
    if s == 0 || nu < s || nu_max > nu {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ s ≤ ν and ν_max ≤ ν (ν = {nu}, s = {s}, ν_max = {nu_max})"
        )));
    }
    if pi_hat.is_negative() || *pi_hat > BigRational::one() {
        return Err(Error::InvalidParameter(format!("π̂ = {pi_hat} outside [0,1]")));
    }
    let keep = 1.0 - to_f64(pi_hat);
    let x = keep.powf(nu as f64 / s as f64);
    let none = (x * (2.0 - x)).powf(s as f64);
    let y = 1.0 - keep.powi(nu_max as i32);
    Ok((none, nu as f64 * y * y))
}

/// Exact `Pr(no block bicoloured) = Π_j (1 − π_j²)` with `π_j = 1 − (1−π̂)^{ν_j}`.
pub fn no_bicolour_probability(blocks: &[u64], pi_hat: f64) -> f64 {
    blocks
        .iter()
        .map(|&b| {
            let pj = 1.0 - (1.0 - pi_hat).powi(b as i32);
            1.0 - pj * pj
        })
        .product()
}

/// Monte Carlo estimate of `(Pr(no block bicoloured), Pr(some block bicoloured))`.
pub fn simulate_bicolour(blocks: &[u64], pi_hat: f64, trials: u64, seed: Seed) -> (f64, f64) {
    let mut rng = seed.rng();
    let mut clean = 0u64;
    for _ in 0..trials {
        let mut any = false;
        for &b in blocks {
            let (mut yellow, mut blue) = (false, false);
            for _ in 0..b {
                yellow |= rng.random_bool(pi_hat);
                blue |= rng.random_bool(pi_hat);
            }
            any |= yellow && blue;
        }
        if !any {
            clean += 1;
        }
    }
    let f = clean as f64 / trials as f64;
    (f, 1.0 - f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::{int, rat};

    #[test]
    fn zero_probability() {
        assert_eq!(bicolour_bounds(10, 2, 5, &int(0)).unwrap(), (1.0, 0.0));
        assert!(bicolour_bounds(3, 4, 1, &rat(1, 2)).is_err());
        assert!(bicolour_bounds(3, 1, 4, &rat(1, 2)).is_err());
        assert!(bicolour_bounds(3, 1, 3, &rat(3, 2)).is_err());
    }

    #[test]
    fn bounds_dominate_simulation() {
        let blocks = vec![10u64; 10];
        let (none, some) = bicolour_bounds(100, 10, 10, &rat(1, 20)).unwrap();
        let trials = 100_000;
        let (f_none, f_some) = simulate_bicolour(&blocks, 0.05, trials, Seed(41));
        // equal blocks make the first bound tight, so allow sampling noise above it
        let sd = (none * (1.0 - none) / trials as f64).sqrt();
        assert!(f_none <= none + 4.0 * sd, "{f_none} vs {none}");
        assert!(f_some <= some);
        assert!((no_bicolour_probability(&blocks, 0.05) - none).abs() < 1e-12);
    }

    #[test]
    fn first_bound_monotone() {
        let pi = rat(1, 30);
        for nu in [20u64, 40, 80] {
            let mut last = 0.0;
            for s in 1..=nu / 2 {
                let (b, _) = bicolour_bounds(nu, s, 1, &pi).unwrap();
                assert!(b >= last - 1e-15);
                last = b;
            }
        }
        for s in [1u64, 3, 7] {
            let mut last = 1.0;
            for nu in (s..200).step_by(7) {
                let (b, _) = bicolour_bounds(nu, s, 1, &pi).unwrap();
                assert!(b <= last + 1e-15);
                last = b;
            }
        }
    }

    #[test]
    fn exact_value_below_bound_for_unequal_blocks() {
        let mut rng = Seed(12).rng();
        for _ in 0..100 {
            let s = rng.random_range(1..8u64);
            let blocks: Vec<u64> = (0..s).map(|_| rng.random_range(1..12)).collect();
            let nu: u64 = blocks.iter().sum();
            let nu_max = *blocks.iter().max().unwrap();
            let k = rng.random_range(1..20);
            let (none, some) = bicolour_bounds(nu, s, nu_max, &rat(k, 40)).unwrap();
            let exact = no_bicolour_probability(&blocks, k as f64 / 40.0);
            assert!(exact <= none + 1e-12);
            assert!(1.0 - exact <= some + 1e-12);
        }
    }
}
