//! Closed-form capacity algebra and the axiom harness.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::body::Body;
use crate::dual::{minimize_capacity, SolverOptions};
use crate::error::{Error, Result};
use crate::spectrum::ellipsoid_min_action;
use crate::symplectic::CoisoIndex;

/// `l_0, ..., l_{m-1}` with `l_j = max(l_{j-1} - n_j, 0)`.
pub fn product_index_chain(l0: usize, dims: &[usize]) -> Result<Vec<usize>> {
    let total: usize = dims.iter().sum();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(
            "factor dimensions must be positive".into(),
        ));
    }
    if l0 > total {
        return Err(Error::InvalidIndex { n: total, k: l0 });
    }
    let mut chain = Vec::with_capacity(dims.len());
    let mut l = l0;
    for d in dims {
        chain.push(l);
        l = l.saturating_sub(*d);
    }
    Ok(chain)
}

/// Per-factor indices `k_i = min(n_i, l_{i-1})`.
pub fn effective_indices(l0: usize, dims: &[usize]) -> Result<Vec<usize>> {
    let chain = product_index_chain(l0, dims)?;
    Ok(chain.iter().zip(dims).map(|(l, n)| (*l).min(*n)).collect())
}

/// Something that knows the capacities of one factor at every index.
pub trait FactorCapacity {
    /// Half-dimension `n_i`.
    fn dim(&self) -> usize;
    fn capacity(&self, k: usize) -> Result<f64>;
}

/// Disc of radius `r` in `R^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc(pub f64);

impl FactorCapacity for Disc {
    fn dim(&self) -> usize {
        1
    }

    fn capacity(&self, k: usize) -> Result<f64> {
        disc_capacity(self.0, k)
    }
}

/// Factor evaluated through [`closed_form_capacity`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm(pub Body);

impl FactorCapacity for ClosedForm {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn capacity(&self, k: usize) -> Result<f64> {
        let idx = CoisoIndex::new(self.0.n(), k)?;
        closed_form_capacity(&self.0, idx)?
            .ok_or_else(|| Error::InvalidBody("no closed form for this factor".into()))
    }
}

/// Factor evaluated by the dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub body: Body,
    pub opts: SolverOptions,
}

impl FactorCapacity for Solved {
    fn dim(&self) -> usize {
        self.body.n()
    }

    fn capacity(&self, k: usize) -> Result<f64> {
        let idx = CoisoIndex::new(self.body.n(), k)?;
        Ok(minimize_capacity(&self.body, idx, &self.opts)?.value)
    }
}

/// `c^{n, l0}(D_1 x ... x D_m) = min_i c^{n_i, min(n_i, l_{i-1})}(D_i)`.
pub fn product_capacity(factors: &[&dyn FactorCapacity], l0: usize) -> Result<f64> {
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let ks = effective_indices(l0, &dims)?;
    let mut best = f64::INFINITY;
    for (f, k) in factors.iter().zip(ks) {
        best = best.min(f.capacity(k)?);
    }
    Ok(best)
}

/// `pi r^2` for `k = 1`, `pi r^2 / 2` for `k = 0`.
pub fn disc_capacity(r: f64, k: usize) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidBody(format!(
            "radius must be positive, got {r}"
        )));
    }
    match k {
        0 => Ok(PI * r * r / 2.0),
        1 => Ok(PI * r * r),
        _ => Err(Error::InvalidIndex { n: 1, k }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NontrivialityConstants {
    pub ball: f64,
    pub w_domain: f64,
    pub u_domain: f64,
}

/// Capacities of the unit ball and of the model domains `W(1)`, `U(1)`; all `pi/2` for `k < n`.
pub fn nontriviality_constants(idx: CoisoIndex) -> Result<NontrivialityConstants> {
    if idx.k() == idx.n() {
        return Err(Error::InvalidParameter(
            "the constants are only pinned down for k < n".into(),
        ));
    }
    Ok(NontrivialityConstants {
        ball: PI / 2.0,
        w_domain: PI / 2.0,
        u_domain: PI / 2.0,
    })
}

/// Exact capacity when the body is built from balls, diagonal ellipsoids,
/// products of such and translates along `R^{n,k}`; `None` otherwise.
pub fn closed_form_capacity(body: &Body, idx: CoisoIndex) -> Result<Option<f64>> {
    if body.n() != idx.n() {
        return Err(Error::DimensionMismatch {
            expected: idx.dim(),
            got: body.dim(),
        });
    }
    match body {
        Body::Ball { .. } | Body::Ellipsoid { .. } => match body.plane_radii() {
            Some(r) => Ok(Some(ellipsoid_min_action(&r, idx)?)),
            None => Ok(None),
        },
        Body::Translate { base, .. } => {
            body.check_admissible(idx)?;
            closed_form_capacity(base, idx)
        }
        Body::Product { factors, .. } => {
            let dims: Vec<usize> = factors.iter().map(|f| f.n()).collect();
            let ks = effective_indices(idx.k(), &dims)?;
            let mut best = f64::INFINITY;
            for (f, k) in factors.iter().zip(ks) {
                match closed_form_capacity(f, CoisoIndex::new(f.n(), k)?)? {
                    Some(c) => best = best.min(c),
                    None => return Ok(None),
                }
            }
            Ok(Some(best))
        }
        Body::LpBall { .. } => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    Conformality,
    Translation,
    ProductFormula,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::Conformality => "conformality",
            Axiom::Translation => "translation",
            Axiom::ProductFormula => "product_formula",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    /// The compared quantity: a ratio, or a capacity margin for monotonicity.
    pub measured: f64,
    pub expected: f64,
    /// Relative violation; zero when the axiom holds exactly.
    pub violation: f64,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Dilation factor of the conformality check.
pub const CONFORMAL_LAMBDA: f64 = 2.0;
/// Relative slack on ratios (conformality, translation, product formula).
pub const RATIO_SLACK: f64 = 0.01;
/// Dilation of the enclosing comparator in the monotonicity check.
pub const MONOTONE_DILATION: f64 = 1.1;

fn failed(axiom: Axiom, e: Error) -> AxiomCheck {
    AxiomCheck {
        axiom,
        measured: f64::NAN,
        expected: f64::NAN,
        violation: f64::INFINITY,
        passed: false,
        error: Some(e.to_string()),
    }
}

fn ratio_check(axiom: Axiom, measured: f64, expected: f64) -> AxiomCheck {
    let violation = (measured / expected - 1.0).abs();
    AxiomCheck {
        axiom,
        measured,
        expected,
        violation,
        passed: violation <= RATIO_SLACK,
        error: None,
    }
}

/// Runs the axiom checks with an arbitrary capacity evaluator.
pub fn axiom_harness_with(
    body: &Body,
    idx: CoisoIndex,
    eval: &(dyn Fn(&Body, CoisoIndex) -> Result<f64> + Sync),
) -> AxiomReport {
    let mut checks = Vec::new();
    let base = eval(body, idx);

    let conformal = (|| {
        let c0 = base.clone()?;
        let c1 = eval(&body.dilate(CONFORMAL_LAMBDA)?, idx)?;
        Ok(ratio_check(
            Axiom::Conformality,
            c1 / c0,
            CONFORMAL_LAMBDA * CONFORMAL_LAMBDA,
        ))
    })();
    checks.push(conformal.unwrap_or_else(|e| failed(Axiom::Conformality, e)));

    let translation = (|| {
        let c0 = base.clone()?;
        let mut w = vec![0.0; idx.dim()];
        w[0] = 1.0;
        let c1 = eval(&Body::translate(body.clone(), &w)?, idx)?;
        Ok(ratio_check(Axiom::Translation, c1 / c0, 1.0))
    })();
    checks.push(translation.unwrap_or_else(|e| failed(Axiom::Translation, e)));

    let monotone = (|| {
        let c0 = base.clone()?;
        let c1 = eval(&body.dilate(MONOTONE_DILATION)?, idx)?;
        let margin = c1 * (1.0 + RATIO_SLACK) - c0;
        Ok(AxiomCheck {
            axiom: Axiom::Monotonicity,
            measured: margin,
            expected: 0.0,
            violation: (c0 / c1 - 1.0).max(0.0),
            passed: margin >= 0.0,
            error: None,
        })
    })();
    checks.push(monotone.unwrap_or_else(|e| failed(Axiom::Monotonicity, e)));

    if let Body::Product { factors, .. } = body.centered() {
        let product = (|| {
            let c0 = base.clone()?;
            let dims: Vec<usize> = factors.iter().map(|f| f.n()).collect();
            let ks = effective_indices(idx.k(), &dims)?;
            let mut best = f64::INFINITY;
            for (f, k) in factors.iter().zip(ks) {
                best = best.min(eval(f, CoisoIndex::new(f.n(), k)?)?);
            }
            Ok(ratio_check(Axiom::ProductFormula, c0 / best, 1.0))
        })();
        checks.push(product.unwrap_or_else(|e| failed(Axiom::ProductFormula, e)));
    }

    AxiomReport { checks }
}

/// Runs the axiom checks with the dual solver.
pub fn axiom_harness(body: &Body, idx: CoisoIndex, opts: &SolverOptions) -> AxiomReport {
    axiom_harness_with(body, idx, &|b, i| Ok(minimize_capacity(b, i, opts)?.value))
}
