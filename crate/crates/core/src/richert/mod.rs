//! Richert's weighted one-dimensional sieve: the main-term function `F`, the
//! two parameter families, the ω/Ω bound formulas, and evaluators that run the
//! sifting sum on real data.
//!
//! Everything here is `f64`. Exact quantities come in from other modules and
//! are converted at the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod weighted;

pub use weighted::{
    check_hyp_omega2, weighted_sum_w, Contribution, Omega2Report, WeightMode, WeightedSum,
};

/// Euler's constant, fixed to 12 decimals.
pub const EULER_GAMMA: f64 = 0.577215664901;

/// Absolute tolerance of [`positivity_threshold`].
pub const BISECTION_TOLERANCE: f64 = 1e-3;

/// Half-width of the bisection bracket around the expected root.
pub const BRACKET_MARGIN: f64 = 0.05;

/// Constants `A₁..A₅` and `L` of the sieve hypotheses, when known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub l: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub alpha: f64,
    pub u: f64,
    pub v: f64,
    pub lambda: f64,
    pub k: Option<u32>,
    pub constants: Option<HypothesisConstants>,
}

impl SieveParams {
    pub fn new(alpha: f64, u: f64, v: f64, lambda: f64) -> Self {
        SieveParams {
            alpha,
            u,
            v,
            lambda,
            k: None,
            constants: None,
        }
    }

    /// `1/α < u < v`, `2/α ≤ v ≤ 4/α`, `λ > 0`. Only `λ > 0` is checked
    /// against `A₅`, which is never known.
    pub fn is_valid(&self) -> bool {
        let Self {
            alpha, u, v, lambda, ..
        } = *self;
        alpha > 0.0
            && 1.0 / alpha < u
            && u < v
            && 2.0 / alpha <= v * (1.0 + 1e-12)
            && v <= 4.0 / alpha * (1.0 + 1e-12)
            && lambda > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::invalid(
                "params",
                format!("{self:?} violates 1/α < u < v, 2/α ≤ v ≤ 4/α, λ > 0"),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SieveFamily {
    Main,
    OmegaVariant,
}

impl SieveFamily {
    /// The family at a real weight `k > 1`.
    pub fn params_at(self, k: f64) -> Result<SieveParams> {
        if !(k > 1.0) {
            return Err(Error::invalid("k", format!("family undefined at k = {k}")));
        }
        let alpha = (k - 1.0) / (14.0 * k);
        let (u, v, lambda) = match self {
            SieveFamily::Main => (
                (14.0 * k + 1.0) / (k - 1.0),
                56.0 * k / (k - 1.0),
                k.powf(-0.2),
            ),
            SieveFamily::OmegaVariant => (
                (26.0 * k + 1.0) / (k - 1.0),
                30.0 * k / (k - 1.0),
                1.0 / k.ln().sqrt(),
            ),
        };
        Ok(SieveParams::new(alpha, u, v, lambda))
    }

    pub fn params(self, k: u32) -> Result<SieveParams> {
        if k < 2 {
            return Err(Error::invalid("k", format!("need k ≥ 2, got {k}")));
        }
        let mut p = self.params_at(k as f64)?;
        p.k = Some(k);
        Ok(p)
    }

    /// Where the sign change of `F` is expected.
    pub fn expected_root(self) -> f64 {
        match self {
            SieveFamily::Main => 1.71,
            SieveFamily::OmegaVariant => 1.006,
        }
    }
}

pub fn params_main(k: u32) -> Result<SieveParams> {
    SieveFamily::Main.params(k)
}

pub fn params_omega_variant(k: u32) -> Result<SieveParams> {
    SieveFamily::OmegaVariant.params(k)
}

#[allow(non_snake_case)]
pub fn F_value(p: &SieveParams) -> Result<f64> {
    p.validate()?;
    let (au, av) = (p.alpha * p.u, p.alpha * p.v);
    if av <= 1.0 || au <= 1.0 {
        return Err(Error::invalid("params", format!("αv = {av}, αu = {au} must exceed 1")));
    }
    Ok(f_raw(p.alpha, p.u, p.v, p.lambda))
}

fn f_raw(alpha: f64, u: f64, v: f64, lambda: f64) -> f64 {
    let (au, av) = (alpha * u, alpha * v);
    2.0 * EULER_GAMMA.exp() / av
        * ((av - 1.0).ln() - lambda * au * (v / u).ln()
            + lambda * (au - 1.0) * ((av - 1.0) / (au - 1.0)).ln())
}

/// `F(params_main(k))` simplified by hand; agrees with [`F_value`].
#[allow(non_snake_case)]
pub fn closed_form_F_main(k: f64) -> f64 {
    let k65 = k.powf(1.2);
    EULER_GAMMA.exp()
        * (14.0 * k65 * 3f64.ln() + (42.0 * k).ln()
            - (1.0 + 14.0 * k) * (56.0 * k / (14.0 * k + 1.0)).ln())
        / (28.0 * k65)
}

/// Root of `k ↦ F(family(k))` by bisection inside `expected_root ± margin`.
///
/// The variant family is undefined for `k ≤ 1`, so its bracket is clipped to
/// start just above 1.
pub fn positivity_threshold(family: SieveFamily) -> Result<f64> {
    let centre = family.expected_root();
    let lo = (centre - BRACKET_MARGIN).max(1.0 + 1e-9);
    let hi = centre + BRACKET_MARGIN;
    bisect(|k| family_f(family, k), lo, hi, BISECTION_TOLERANCE)
}

fn family_f(family: SieveFamily, k: f64) -> Result<f64> {
    let p = family.params_at(k)?;
    Ok(f_raw(p.alpha, p.u, p.v, p.lambda))
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let rising = flo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSet {
    pub k: u32,
    pub b_omega: u64,
    /// Only defined for `k ≥ 6`.
    pub b_omega_sqrtlog: Option<u64>,
    pub b_big_omega: u64,
    pub b_selberg_upper: u64,
    pub b_joshi: u64,
}

pub fn bounds(k: u32) -> Result<BoundSet> {
    if k < 2 {
        return Err(Error::invalid("k", format!("need k ≥ 2, got {k}")));
    }
    let kf = k as f64;
    let sqrt_log = kf.ln().sqrt();
    let floor = |x: f64| x.floor() as u64;
    Ok(BoundSet {
        k,
        b_omega: floor(7.0 * kf + 0.5 + kf.powf(0.2)),
        b_omega_sqrtlog: (k >= 6).then(|| floor(7.0 * kf + 0.5 + sqrt_log)),
        b_big_omega: floor(13.0 * kf + 0.5 + sqrt_log),
        b_selberg_upper: (29 * k as u64 - 13) / 2,
        b_joshi: floor(5.0 * kf + 1.0 + sqrt_log),
    })
}

/// `1/λ + u(k−1)/2 + u·log 4/log X`.
pub fn bound_from_chain(k: u32, u: f64, lambda: f64, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::invalid("x", format!("need X > 1, got {x}")));
    }
    Ok(chain_limit(k, u, lambda) + u * 4f64.ln() / x.ln())
}

/// The `X → ∞` limit of [`bound_from_chain`].
pub fn chain_limit(k: u32, u: f64, lambda: f64) -> f64 {
    1.0 / lambda + u * (k as f64 - 1.0) / 2.0
}

/// Per-record form of the chain before Deligne's estimate:
/// `1/λ + u·log|d|/log X`.
pub fn record_chain_bound(abs_log_d: f64, u: f64, lambda: f64, x: f64) -> f64 {
    1.0 / lambda + u * abs_log_d / x.ln()
}
