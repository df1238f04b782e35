//! The weight framework `(h, H, F)` and its structural assumptions.
//!
//! A weight `h > 0` on `(0, ∞)`, locally integrable at 0, induces
//!
//! ```text
//!     H(v) = ∫_0^v h(r) dr,      F(v) = h(v) a(v),
//! ```
//!
//! with `H(0) = 0` and `F(0) = 0`. Multiplying `u_t ≤ a(u)Δu` by `h(u)`
//! turns it into the divergence-style inequality `[H(u)]_t ≤ F(u)Δu`,
//! which is what the stability machinery consumes. The decay estimates
//! rest on derivative inequalities between powers of `H` and `F`; this
//! module renders numeric verdicts on those assumptions over a grid.
//!
//! The power family `h(s) = scale·(1−γ)·s^{−γ}` (so `H(s) = scale·s^{1−γ}`)
//! covers the basic degenerate model; a small registry of named closed
//! forms is available for the custom family.

use serde::{Deserialize, Serialize};

use crate::coefficients::{Coefficient, ConditionReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::fit::{decade_sups, growing_tail};
use crate::quad::adaptive_simpson_rel;

/// Relative Richardson disagreement above which a finite-difference
/// derivative sample is considered unreliable.
const FD_DISAGREE_REL: f64 = 0.10;

/// Decades of strict growth/collapse required to report an assumption
/// violation at a grid end.
const ASSUMPTION_GROWTH_DECADES: usize = 3;

/// Named closed-form weights available to the custom family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CustomWeight {
    /// `h(s) = 1/(1+s)`, `H(s) = ln(1+s)`.
    LogDamped,
    /// `h(s) = e^{−s}`, `H(s) = 1 − e^{−s}`.
    ExpDecay,
    /// `h(s) = 1/s`; not locally integrable at 0, so `H` does not exist.
    /// Registered to exercise the divergence path.
    Harmonic,
}

/// A weight `h` together with its antiderivative `H`; the flux factor
/// `F = h·a` is formed against a coefficient at evaluation time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum WeightPair {
    Power { gamma: f64, scale: f64 },
    Custom { h: CustomWeight },
}

impl WeightPair {
    pub fn power(gamma: f64, scale: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::Parameter(format!("power weight requires γ ∈ [0,1), got {gamma}")));
        }
        if !(scale > 0.0) {
            return Err(Error::Parameter(format!("power weight requires scale > 0, got {scale}")));
        }
        Ok(Self::Power { gamma, scale })
    }

    pub fn custom(h: CustomWeight) -> Self {
        Self::Custom { h }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Power { gamma, scale } = self {
            Self::power(*gamma, *scale)?;
        }
        Ok(())
    }

    /// The weight `h(s)` itself. Singular weights reject `s = 0`.
    pub fn density(&self, s: f64) -> Result<f64> {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::Domain(format!("weight argument must be ≥ 0, got {s}")));
        }
        match self {
            Self::Power { gamma, scale } => {
                if s == 0.0 {
                    if *gamma == 0.0 {
                        Ok(*scale)
                    } else {
                        Err(Error::Domain("power weight is singular at s = 0".into()))
                    }
                } else {
                    Ok(scale * (1.0 - gamma) * s.powf(-gamma))
                }
            }
            Self::Custom { h: CustomWeight::LogDamped } => Ok(1.0 / (1.0 + s)),
            Self::Custom { h: CustomWeight::ExpDecay } => Ok((-s).exp()),
            Self::Custom { h: CustomWeight::Harmonic } => {
                if s == 0.0 {
                    Err(Error::Domain("harmonic weight is singular at s = 0".into()))
                } else {
                    Ok(1.0 / s)
                }
            }
        }
    }

    /// `H(s) = ∫_0^s h`. Closed form for the power family; adaptive
    /// quadrature toward the origin for custom weights, failing with a
    /// domain error when `h` is not locally integrable at 0.
    pub fn integral(&self, s: f64) -> Result<f64> {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::Domain(format!("H argument must be ≥ 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::Power { gamma, scale } => Ok(scale * s.powf(1.0 - gamma)),
            Self::Custom { .. } => self.integral_by_quadrature(s),
        }
    }

    fn integral_by_quadrature(&self, s: f64) -> Result<f64> {
        // geometric bisection toward 0, mirroring the tail treatment at
        // infinity: segments [s·2^{-(k+1)}, s·2^{-k}] until quiet
        let rel_tol = 1e-10;
        let mut total = 0.0;
        let mut hi = s;
        let mut quiet = 0;
        for _ in 0..60 {
            let lo = 0.5 * hi;
            let piece = adaptive_simpson_rel(|x| self.density(x).unwrap_or(f64::INFINITY), lo, hi, rel_tol);
            if !piece.value.is_finite() {
                return Err(Error::Domain("weight is not integrable near 0".into()));
            }
            total += piece.value;
            if piece.value.abs() <= rel_tol * total.abs().max(f64::MIN_POSITIVE) {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(total);
                }
            } else {
                quiet = 0;
            }
            hi = lo;
        }
        Err(Error::Domain(
            "weight quadrature failed to stabilize near 0 (h not locally integrable)".into(),
        ))
    }

    /// Closed form of `H`, when one is registered. Used as the fast path
    /// by the functional quadratures and as the test oracle for the
    /// quadrature route.
    pub fn closed_integral(&self, s: f64) -> Option<f64> {
        if s < 0.0 {
            return None;
        }
        match self {
            Self::Power { gamma, scale } => Some(scale * s.powf(1.0 - gamma)),
            Self::Custom { h: CustomWeight::LogDamped } => Some(s.ln_1p()),
            Self::Custom { h: CustomWeight::ExpDecay } => Some(-(-s).exp_m1()),
            Self::Custom { h: CustomWeight::Harmonic } => None,
        }
    }

    /// `H` via the closed form when available, quadrature otherwise.
    pub fn integral_fast(&self, s: f64) -> Result<f64> {
        match self.closed_integral(s) {
            Some(v) => Ok(v),
            None => self.integral(s),
        }
    }

    /// The flux factor `F(s) = h(s)·a(s)`, with `F(0) = 0` by convention.
    pub fn flux_factor(&self, coeff: &Coefficient, s: f64) -> Result<f64> {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::Domain(format!("F argument must be ≥ 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(self.density(s)? * coeff.eval(s)?)
    }
}

/// The structural assumptions on `(H, F)` behind the decay estimates,
/// with the exponents each one needs. Bounded forms hold on `[0, M]`
/// (the grid's upper end plays the role of `M`); the rest are global.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Assumption {
    /// `[H^{γ₁+1}]'(s) ≤ c₁` on `[0, M]`.
    DerivativeBounded { gamma1: f64 },
    /// `[F·H^{γ₁+1}]'(s) ≥ c₂ > 0` on `[0, M]`.
    ProductDerivativeLower { gamma1: f64 },
    /// `[F·H^p]'(s) ≥ 0` on `[0, ∞)`.
    ProductDerivativeNonneg { p: f64 },
    /// `[H^{p₁}·F]'(s) ≥ c₃·H^{q₁}(s)` on `[0, ∞)`.
    LowerEnvelope { p1: f64, q1: f64 },
    /// `[H^{γ₁+1}]'(s) ≤ c₄·H^β(s)` on `[0, ∞)`.
    UpperEnvelope { gamma1: f64, beta: f64 },
    /// `[H^{γ₁+1}]'(s) ≤ c₅·(H^{β₁}(s) + H^{β₂}(s))` on `[0, ∞)`.
    UpperEnvelopeTwoTerm { gamma1: f64, beta1: f64, beta2: f64 },
}

impl Assumption {
    pub fn id(&self) -> &'static str {
        match self {
            Self::DerivativeBounded { .. } => "derivative-bounded",
            Self::ProductDerivativeLower { .. } => "product-derivative-lower",
            Self::ProductDerivativeNonneg { .. } => "product-derivative-nonneg",
            Self::LowerEnvelope { .. } => "lower-envelope",
            Self::UpperEnvelope { .. } => "upper-envelope",
            Self::UpperEnvelopeTwoTerm { .. } => "upper-envelope-two-term",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::DerivativeBounded { gamma1 } => gamma1 > 0.0,
            Self::ProductDerivativeLower { gamma1 } => gamma1 > 0.0,
            Self::ProductDerivativeNonneg { p } => p >= 0.0,
            Self::LowerEnvelope { p1, q1 } => p1 > 0.0 && q1 > 0.0,
            Self::UpperEnvelope { gamma1, beta } => gamma1 > 0.0 && beta > 0.0,
            Self::UpperEnvelopeTwoTerm { gamma1, beta1, beta2 } => {
                gamma1 > 0.0 && beta1 > 0.0 && beta2 > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("assumption {} requires positive exponents", self.id())))
        }
    }

    fn is_upper(&self) -> bool {
        matches!(
            self,
            Self::DerivativeBounded { .. }
                | Self::UpperEnvelope { .. }
                | Self::UpperEnvelopeTwoTerm { .. }
        )
    }

    fn is_global(&self) -> bool {
        matches!(
            self,
            Self::ProductDerivativeNonneg { .. }
                | Self::LowerEnvelope { .. }
                | Self::UpperEnvelope { .. }
                | Self::UpperEnvelopeTwoTerm { .. }
        )
    }
}

/// The default assumption-checking grid: log-spaced near zero, where the
/// degeneracy lives, then linear out to `s_max`.
pub fn assumption_grid(s_max: f64, per_decade: usize, n_linear: usize) -> Vec<f64> {
    assert!(s_max > 0.1);
    let mut grid = crate::coefficients::log_grid(1e-9, 0.1, per_decade);
    let step = (s_max - 0.1) / n_linear as f64;
    for i in 1..=n_linear {
        grid.push(0.1 + step * i as f64);
    }
    grid
}

/// One derivative sample: value plus whether the two finite-difference
/// refinements agreed.
struct DerivSample {
    value: f64,
    reliable: bool,
}

/// The derivative of the assumption's left-hand quantity at `s`, in
/// closed form when the (power weight, power-law coefficient) pair
/// permits, otherwise by central differences with Richardson refinement.
fn lhs_derivative(
    w: &WeightPair,
    coeff: &Coefficient,
    assumption: &Assumption,
    s: f64,
) -> Result<DerivSample> {
    // exponent of H inside the derivative and whether F participates
    let (h_pow, with_f) = match *assumption {
        Assumption::DerivativeBounded { gamma1 } => (gamma1 + 1.0, false),
        Assumption::ProductDerivativeLower { gamma1 } => (gamma1 + 1.0, true),
        Assumption::ProductDerivativeNonneg { p } => (p, true),
        Assumption::LowerEnvelope { p1, .. } => (p1, true),
        Assumption::UpperEnvelope { gamma1, .. } => (gamma1 + 1.0, false),
        Assumption::UpperEnvelopeTwoTerm { gamma1, .. } => (gamma1 + 1.0, false),
    };
    if let (WeightPair::Power { gamma, scale }, Coefficient::PowerLaw { k, rho }) = (w, coeff) {
        // H^p (F) = C · s^e with C, e assembled from the exponents
        let (c, e) = if with_f {
            (
                scale.powf(h_pow) * scale * (1.0 - gamma) * k,
                (1.0 - gamma) * h_pow + rho - gamma,
            )
        } else {
            (scale.powf(h_pow), (1.0 - gamma) * h_pow)
        };
        let value = if e == 0.0 { 0.0 } else { c * e * s.powf(e - 1.0) };
        return Ok(DerivSample { value, reliable: true });
    }
    if let (WeightPair::Power { gamma, scale }, false) = (w, with_f) {
        let e = (1.0 - gamma) * h_pow;
        let c = scale.powf(h_pow);
        let value = if e == 0.0 { 0.0 } else { c * e * s.powf(e - 1.0) };
        return Ok(DerivSample { value, reliable: true });
    }
    // numeric route on the closed-form values
    let g = |x: f64| -> Result<f64> {
        let h_val = w.integral_fast(x)?;
        let base = h_val.powf(h_pow);
        Ok(if with_f { base * w.flux_factor(coeff, x)? } else { base })
    };
    let step = (1e-4 * s).max(1e-12);
    let d_at = |h: f64| -> Result<f64> { Ok((g(s + h)? - g(s - h)?) / (2.0 * h)) };
    let d1 = d_at(step)?;
    let d2 = d_at(0.5 * step)?;
    let richardson = (4.0 * d2 - d1) / 3.0;
    let reliable = (d2 - d1).abs() <= FD_DISAGREE_REL * richardson.abs().max(1e-12);
    Ok(DerivSample { value: richardson, reliable })
}

/// The right-hand comparison quantity of the assumption at `s` (1 for the
/// bounded forms).
fn rhs_value(w: &WeightPair, assumption: &Assumption, s: f64) -> Result<f64> {
    let h_val = w.integral_fast(s)?;
    Ok(match *assumption {
        Assumption::DerivativeBounded { .. }
        | Assumption::ProductDerivativeLower { .. }
        | Assumption::ProductDerivativeNonneg { .. } => 1.0,
        Assumption::LowerEnvelope { q1, .. } => h_val.powf(q1),
        Assumption::UpperEnvelope { beta, .. } => h_val.powf(beta),
        Assumption::UpperEnvelopeTwoTerm { beta1, beta2, .. } => {
            h_val.powf(beta1) + h_val.powf(beta2)
        }
    })
}

/// Checks a structural assumption over a grid and reports the tightest
/// constant: the sup of `lhs'/rhs` for upper bounds, the inf for lower
/// bounds. A violation is declared when the ratio collapses or blows up
/// monotonically over trailing decades at a grid end (where all in-scope
/// failures occur), or when a lower bound goes nonpositive. Unreliable
/// finite differences make the verdict inconclusive.
pub fn check_assumption(
    w: &WeightPair,
    coeff: &Coefficient,
    assumption: &Assumption,
    s_grid: &[f64],
) -> Result<ConditionReport> {
    assumption.validate()?;
    w.validate()?;
    let mut grid: Vec<f64> = s_grid.iter().cloned().filter(|&s| s > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    if grid.len() < 8 {
        return Err(Error::Parameter("assumption grid needs at least 8 positive points".into()));
    }
    let grid_spec = format!(
        "[{:.3e},{:.3e}]x{} ({})",
        grid[0],
        grid[grid.len() - 1],
        grid.len(),
        if assumption.is_global() { "global" } else { "bounded" }
    );

    let mut ratios: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    let mut all_reliable = true;
    for &s in &grid {
        let d = lhs_derivative(w, coeff, assumption, s)?;
        all_reliable &= d.reliable;
        let r = rhs_value(w, assumption, s)?;
        ratios.push((s, d.value / r));
    }
    if !all_reliable {
        return Ok(report(assumption, Verdict::Inconclusive, None, None, grid_spec));
    }

    if let Assumption::ProductDerivativeNonneg { .. } = assumption {
        let scale = ratios.iter().map(|&(_, r)| r.abs()).fold(0.0, f64::max);
        let &(ws, wv) = ratios.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        return Ok(if wv >= -1e-12 * scale.max(1.0) {
            report(assumption, Verdict::Satisfied, Some(("min", wv)), None, grid_spec)
        } else {
            report(
                assumption,
                Verdict::Violated,
                Some(("min", wv)),
                Some(Witness { s: ws, value: wv }),
                grid_spec,
            )
        });
    }

    if assumption.is_upper() {
        // blow-up detection toward the zero end, and toward infinity for
        // the global forms
        let toward_zero: Vec<(f64, f64)> = ratios.iter().rev().cloned().collect();
        let ends: Vec<&[(f64, f64)]> = if assumption.is_global() {
            vec![&toward_zero, &ratios]
        } else {
            vec![&toward_zero]
        };
        for end in ends {
            if let Some((ws, wv)) = end_blowup(end) {
                return Ok(report(
                    assumption,
                    Verdict::Violated,
                    Some(("sup", wv)),
                    Some(Witness { s: ws, value: wv }),
                    grid_spec,
                ));
            }
        }
        let &(ws, wv) = ratios.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let name = match assumption {
            Assumption::DerivativeBounded { .. } => "c1",
            Assumption::UpperEnvelope { .. } => "c4",
            _ => "c5",
        };
        let mut rep = report(assumption, Verdict::Satisfied, Some((name, wv)), None, grid_spec);
        rep.constants.insert("sup_at".into(), ws);
        Ok(rep)
    } else {
        // lower bounds: nonpositive ratio is an outright violation;
        // otherwise look for monotone collapse of the inf toward an end
        let &(ws, wv) = ratios.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        if wv <= 0.0 {
            return Ok(report(
                assumption,
                Verdict::Violated,
                Some(("inf", wv)),
                Some(Witness { s: ws, value: wv }),
                grid_spec,
            ));
        }
        let inverted: Vec<(f64, f64)> = ratios.iter().map(|&(s, r)| (s, 1.0 / r)).collect();
        let toward_zero: Vec<(f64, f64)> = inverted.iter().rev().cloned().collect();
        let ends: Vec<&[(f64, f64)]> = if assumption.is_global() {
            vec![&toward_zero, &inverted]
        } else {
            vec![&toward_zero]
        };
        for end in ends {
            if let Some((ws, wv_inv)) = end_blowup(end) {
                let wv = 1.0 / wv_inv;
                return Ok(report(
                    assumption,
                    Verdict::Violated,
                    Some(("inf", wv)),
                    Some(Witness { s: ws, value: wv }),
                    grid_spec,
                ));
            }
        }
        let name = match assumption {
            Assumption::ProductDerivativeLower { .. } => "c2",
            _ => "c3",
        };
        let mut rep = report(assumption, Verdict::Satisfied, Some((name, wv)), None, grid_spec);
        rep.constants.insert("inf_at".into(), ws);
        Ok(rep)
    }
}

/// Detects unbounded monotone growth of `(s, value)` samples toward the
/// end they progress to. A sequence whose trailing decade sups have
/// already stabilized is converging, not blowing up.
fn end_blowup(samples_toward_end: &[(f64, f64)]) -> Option<(f64, f64)> {
    let sups = decade_sups(samples_toward_end);
    if sups.len() >= 2 {
        let last = sups[sups.len() - 1].1;
        let prev = sups[sups.len() - 2].1;
        if (last - prev).abs()
            <= crate::coefficients::LIMSUP_STABILIZE_REL * last.abs().max(f64::MIN_POSITIVE)
        {
            return None;
        }
    }
    if growing_tail(&sups, ASSUMPTION_GROWTH_DECADES) {
        let &(_, v, s) = sups.last().unwrap();
        return Some((s, v));
    }
    None
}

fn report(
    assumption: &Assumption,
    verdict: Verdict,
    constant: Option<(&str, f64)>,
    witness: Option<Witness>,
    grid: String,
) -> ConditionReport {
    let mut r = ConditionReport {
        condition: assumption.id().into(),
        verdict,
        constants: Default::default(),
        witness,
        grid,
    };
    if let Some((name, v)) = constant {
        r.constants.insert(name.into(), v);
    }
    r
}
