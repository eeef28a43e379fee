use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::model::number::{int, ln_bounds, Bounds};

/// `λ_c = 2((q−1)/(q−2))·ln(q−1)`, `δ = (q−λ_c)/2`, `λ = λ_c + δ`, `θ = (q−2)/(q−1)`.
///
/// Real quantities are certified enclosures; `theta` is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseConstants {
    pub q: BigRational,
    pub lambda_c: Bounds,
    pub delta: Bounds,
    pub lambda: Bounds,
    pub theta: BigRational,
}

const MAX_BITS: u32 = 1 << 14;

pub fn phase_constants(q: &BigRational, precision_bits: u32) -> Result<PhaseConstants> {
    if *q <= int(2) {
        return Err(Error::InvalidParameter(format!(
            "phase constants need q > 2, got {q}"
        )));
    }
    let q1 = q - int(1);
    let factor = int(2) * &q1 / (q - int(2));
    let mut bits = precision_bits.max(16);
    loop {
        let ln = ln_bounds(&q1, bits)?;
        let lambda_c = Bounds {
            lo: &ln.lo * &factor,
            hi: &ln.hi * &factor,
        };
        // λ_c < q holds for every q > 2 but gets arbitrarily tight as q → 2
        if lambda_c.hi < *q {
            let half = int(1) / int(2);
            let delta = Bounds {
                lo: (q - &lambda_c.hi) * &half,
                hi: (q - &lambda_c.lo) * &half,
            };
            let lambda = Bounds {
                lo: (q + &lambda_c.lo) * &half,
                hi: (q + &lambda_c.hi) * &half,
            };
            return Ok(PhaseConstants {
                q: q.clone(),
                theta: (q - int(2)) / &q1,
                lambda_c,
                delta,
                lambda,
            });
        }
        if bits >= MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "could not separate lambda_c from q = {q} at {bits} bits"
            )));
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::{parse_rational, rat};

    #[test]
    fn q_three_and_four() {
        let c = phase_constants(&int(3), 128).unwrap();
        assert!((c.lambda_c.to_f64() - 4.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((c.lambda_c.to_f64() - 2.772589).abs() < 1e-6);
        assert!((c.lambda.to_f64() - 2.886294).abs() < 1e-6);
        assert_eq!(c.theta, rat(1, 2));

        let c = phase_constants(&int(4), 128).unwrap();
        assert!((c.lambda_c.to_f64() - 3.295837).abs() < 1e-6);
        assert_eq!(c.theta, rat(2, 3));

        assert_eq!(phase_constants(&int(10), 64).unwrap().theta, rat(8, 9));
    }

    #[test]
    fn critical_value_below_q() {
        for s in ["2.1", "2.5", "3", "5", "10", "100", "2.0001"] {
            let q = parse_rational(s).unwrap();
            let c = phase_constants(&q, 64).unwrap();
            assert!(c.lambda_c.hi < q, "q = {s}");
            assert!(c.lambda.hi < q);
            assert!(c.lambda_c.lo < c.lambda.lo);
        }
    }

    #[test]
    fn rejects_small_q() {
        assert!(phase_constants(&int(2), 64).is_err());
        assert!(phase_constants(&rat(3, 2), 64).is_err());
    }
}
