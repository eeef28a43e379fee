use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadget::ser_rat;
use crate::model::number::{int, pow, rat};
use crate::model::{BipartiteGraph, WeightedHypergraph};

/// The `s`-fold blow-up used to count maximum independent sets with a weighted
/// independent-set oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxIsBlowup {
    #[serde(skip)]
    pub graph: BipartiteGraph,
    pub s: usize,
    #[serde(serialize_with = "ser_rat")]
    pub mu: BigRational,
    /// Size of a maximum independent set of the input.
    pub xi: usize,
    /// `((1+μ)^s − 1)^ξ`.
    #[serde(serialize_with = "ser_rat")]
    pub divisor: BigRational,
}

impl MaxIsBlowup {
    /// `⌊Z / ((1+μ)^s − 1)^ξ⌋`, the maximum-independent-set count recovered from an
    /// estimate `Z` of `Z_IS(B′; μ)`.
    pub fn postprocess(&self, z: &BigRational) -> BigInt {
        (z / &self.divisor).floor().to_integer()
    }
}

/// Every vertex `u` becomes `s` copies `(u, i)`; every edge becomes the complete
/// bipartite graph between the copies of its ends. Copy `(u, i)` gets index `u·s + i`.
pub fn blowup(b: &BipartiteGraph, s: usize) -> Result<BipartiteGraph> {
    let mut edges = Vec::with_capacity(b.edges().len() * s * s);
    for &(u, v) in b.edges() {
        for i in 0..s {
            for j in 0..s {
                edges.push((u * s + i, v * s + j));
            }
        }
    }
    BipartiteGraph::new(b.left() * s, b.right() * s, edges)
}

fn check_mu(mu: &BigRational) -> Result<()> {
    if !mu.is_positive() {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    Ok(())
}

/// Blow-up factor `s` and the brute-force maximum independent set size `ξ`.
///
/// `s` starts at `⌈(n+3)/lg(1+2μ/3)⌉` and is raised until `2^n/((1+μ)^s − 1) ≤ 1/4`
/// holds exactly, which is what makes the final rounding correct.
pub fn maxis_blowup(b: &BipartiteGraph, mu: &BigRational) -> Result<MaxIsBlowup> {
    check_mu(mu)?;
    let n = b.n();
    if n == 0 {
        return Err(Error::InvalidInstance("bipartite graph has no vertices".into()));
    }
    let muf = crate::model::number::to_f64(mu);
    let guess = ((n as f64 + 3.0) / (1.0 + 2.0 * muf / 3.0).log2()).ceil();
    let mut s = if guess.is_finite() && guess >= 1.0 {
        guess as usize
    } else {
        1
    };
    let one_plus = BigRational::one() + mu;
    let two_n = BigRational::from_integer(BigInt::one() << n);
    while two_n.clone() / (pow(&one_plus, s) - int(1)) > rat(1, 4) {
        s += 1;
    }
    let (xi, _) = b.maximum_independent_sets()?;
    let divisor = pow(&(pow(&one_plus, s) - int(1)), xi);
    Ok(MaxIsBlowup {
        graph: blowup(b, s)?,
        s,
        mu: mu.clone(),
        xi,
        divisor,
    })
}

/// Parameters of the padding that makes every right vertex have degree `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadParams {
    /// Size of the `y` side of each attached complete bipartite graph `Ψ = K_{d,s}`.
    pub s_pad: usize,
    pub d: usize,
    /// Number of copies of `Ψ` attached.
    pub g: usize,
    #[serde(serialize_with = "ser_rat")]
    pub mu_minus: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub mu_plus: BigRational,
    /// `D(μ⁺) = (1+μ⁺)^{d−1}`.
    #[serde(serialize_with = "ser_rat")]
    pub d_plus: BigRational,
    /// `U(μ⁺) = μ⁺ D(μ⁺)`.
    #[serde(serialize_with = "ser_rat")]
    pub u_plus: BigRational,
    /// `L(s, μ⁻) = (1+μ⁻)^s`.
    #[serde(serialize_with = "ser_rat")]
    pub l_minus: BigRational,
    /// `Y(s, μ) = L(s, μ) + D(μ) − 1`, the weight of `Ψ` with `z₁` excluded.
    #[serde(serialize_with = "ser_rat")]
    pub y: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiregularPad {
    pub graph: BipartiteGraph,
    pub params: PadParams,
    /// `Y^g`; `Z_IS(B; μ) ≈ Z_IS(B″; μ) / Y^g`.
    pub correction: BigRational,
}

/// `Z_IS(Ψ; μ) = L(s,μ) + (1+μ)D(μ) − 1` for `Ψ = K_{d,s}`.
pub fn psi_weight(d: usize, s: usize, mu: &BigRational) -> BigRational {
    let one_plus = BigRational::one() + mu;
    pow(&one_plus, s) + &one_plus * pow(&one_plus, d.saturating_sub(1)) - int(1)
}

/// Pads `b` so that every right vertex has the maximum right degree `d`.
///
/// A right vertex of degree `δ < d` gets `d − δ` fresh copies of `K_{d,s}`, joined to
/// it through the copy's first left vertex. `s` is the least value with
/// `max(D(μ⁺)−1, U(μ⁺)) / L(s,μ⁻) ≤ ε/(6dn)`, where `μ^± ` bracket `μ` as
/// `4μ/5` and `4μ/3`. An input that is already semiregular is returned unchanged.
/// `d = 1` with some isolated right vertex is still padded, since the hypergraph stage
/// needs uniform hyperedge sizes.
pub fn semiregular_pad(b: &BipartiteGraph, mu: &BigRational, eps: &BigRational) -> Result<SemiregularPad> {
    check_mu(mu)?;
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let degrees = b.right_degrees();
    let d = degrees.iter().copied().max().unwrap_or(0);
    let mu_minus = mu * rat(4, 5);
    let mu_plus = mu * rat(4, 3);
    let one = BigRational::one();
    let d_plus = pow(&(&one + &mu_plus), d.saturating_sub(1));
    let u_plus = &mu_plus * &d_plus;
    let y_of = |s: usize| pow(&(&one + mu), s) + pow(&(&one + mu), d.saturating_sub(1)) - int(1);

    if degrees.iter().all(|&x| x == d) {
        return Ok(SemiregularPad {
            graph: b.clone(),
            params: PadParams {
                s_pad: 0,
                d,
                g: 0,
                mu_minus,
                mu_plus,
                d_plus,
                u_plus,
                l_minus: one.clone(),
                y: one.clone(),
            },
            correction: one,
        });
    }

    let n = b.n();
    let bound = eps / int((6 * d * n) as i64);
    let numer = (&d_plus - &one).max(u_plus.clone());
    let base = &one + &mu_minus;
    let mut s = 1usize;
    let mut l_minus = base.clone();
    while &numer / &l_minus > bound {
        s += 1;
        l_minus *= &base;
    }

    let mut left = b.left();
    let mut right = b.right();
    let mut edges = b.edges().to_vec();
    let mut g = 0usize;
    for (v, &delta) in degrees.iter().enumerate() {
        for _ in delta..d {
            let z0 = left;
            let y0 = right;
            left += d;
            right += s;
            for z in 0..d {
                for y in 0..s {
                    edges.push((z0 + z, y0 + y));
                }
            }
            edges.push((z0, v));
            g += 1;
        }
    }
    let y = y_of(s);
    Ok(SemiregularPad {
        graph: BipartiteGraph::new(left, right, edges)?,
        correction: pow(&y, g),
        params: PadParams {
            s_pad: s,
            d,
            g,
            mu_minus,
            mu_plus,
            d_plus,
            u_plus,
            l_minus,
            y,
        },
    })
}

/// Exact check of `Z_IS(B)·Y^g ≤ Z_IS(B″) ≤ Z_IS(B)·Z_IS(Ψ)^g`.
pub fn pad_sandwich_holds(b: &BipartiteGraph, pad: &SemiregularPad, mu: &BigRational) -> Result<bool> {
    let zb = b.independence_polynomial(mu)?;
    let zp = pad.graph.independence_polynomial(mu)?;
    let psi = psi_weight(pad.params.d, pad.params.s_pad, mu);
    let upper = &zb * pow(&psi, pad.params.g);
    Ok(&zb * &pad.correction <= zp && zp <= upper)
}

/// Hypergraph on `U ∪ {apex}` with one hyperedge `Γ(v) ∪ {apex}` of weight `μ` per right
/// vertex `v`; the apex is vertex `left()`.
///
/// `Z_IS(B; μ) = (μ+1)^{-1} Z_Tutte(H; μ+1, μ)`; the returned scale is `(μ+1)^{-1}`.
pub fn semiregular_to_hypertutte(
    b: &BipartiteGraph,
    mu: &BigRational,
) -> Result<(WeightedHypergraph, BigRational)> {
    check_mu(mu)?;
    let apex = b.left();
    let hyperedges = b.right_neighbourhoods().into_iter().map(|mut f| {
        f.push(apex);
        (f, mu.clone())
    });
    let h = WeightedHypergraph::from_hyperedges(apex + 1, hyperedges)?;
    Ok((h, (BigRational::one() + mu).recip()))
}
