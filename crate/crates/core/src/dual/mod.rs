//! Clarke-dual computation of coisotropic capacities.
//!
//! The capacity of a convex body `D` is the minimum of
//!
//! ```text
//! I(w) / A(w),   I(w) = int_0^1 H*(-J w'(t)) dt,   A(w) > 0,
//! ```
//!
//! over loops `w` with leafwise boundary conditions. Both functionals are
//! 2-homogeneous, so the ratio is minimized on the open cone `A > 0` and every
//! iterate is rescaled to `A = 1`.

mod chord;
mod lbfgs;

pub use chord::{
    reconstruct_chord, verify_chord, Chord, ChordReport, ChordSample, VerifyTolerances,
};

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{Body, Smoothness};
use crate::error::{Error, Result};
use crate::fourier::{FourierLoop, DEFAULT_MODES};
use crate::symplectic::CoisoIndex;

/// Quadrature intervals per Fourier mode.
pub const NODES_PER_MODE: usize = 16;

/// Iterations without measurable progress before a restart is abandoned.
const STALL_WINDOW: usize = 100;

/// Relative spread within which two restart values count as the same minimum.
pub const AGREEMENT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub modes: usize,
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            modes: DEFAULT_MODES,
            starts: 16,
            max_iters: 5000,
            grad_tol: 1e-7,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidParameter("modes must be at least 1".into()));
        }
        if self.starts == 0 {
            return Err(Error::InvalidParameter("starts must be at least 1".into()));
        }
        if !(self.grad_tol.is_finite() && self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        Ok(())
    }
}

/// Outcome of a single restart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    /// Minimizing loop in the zero-mean gauge, scaled to `A = 1`.
    pub minimizer: FourierLoop,
    /// Norm of the coefficient gradient of `I/A` at the minimizer.
    pub rayleigh_residual: f64,
    pub starts_agreeing: usize,
    pub converged: bool,
    pub grad_tol: f64,
    /// Some quadrature node used a subgradient selection.
    pub nonsmooth: bool,
    pub restarts: Vec<Option<RestartSummary>>,
}

/// Discretized dual problem for one body, index and truncation order.
pub struct DualProblem<'a> {
    body: &'a Body,
    idx: CoisoIndex,
    modes: usize,
    weights: Vec<f64>,
    /// `cos(l pi t_j)` for `l = 0..=2M`, row-major by node.
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl<'a> DualProblem<'a> {
    pub fn new(body: &'a Body, idx: CoisoIndex, modes: usize) -> Result<Self> {
        Self::with_intervals(body, idx, modes, NODES_PER_MODE * modes)
    }

    /// Closed trapezoid rule with `intervals` subintervals of `[0, 1]`.
    pub fn with_intervals(
        body: &'a Body,
        idx: CoisoIndex,
        modes: usize,
        intervals: usize,
    ) -> Result<Self> {
        if body.n() != idx.n() {
            return Err(Error::DimensionMismatch {
                expected: idx.dim(),
                got: body.dim(),
            });
        }
        if modes == 0 || intervals == 0 {
            return Err(Error::InvalidParameter(
                "modes and intervals must be positive".into(),
            ));
        }
        let h = 1.0 / intervals as f64;
        let mut weights = vec![h; intervals + 1];
        weights[0] *= 0.5;
        weights[intervals] *= 0.5;
        let width = 2 * modes + 1;
        let mut cos = Vec::with_capacity((intervals + 1) * width);
        let mut sin = Vec::with_capacity((intervals + 1) * width);
        for j in 0..=intervals {
            let t = j as f64 * h;
            for l in 0..width {
                let (s, c) = (l as f64 * PI * t).sin_cos();
                cos.push(c);
                sin.push(s);
            }
        }
        Ok(Self {
            body,
            idx,
            modes,
            weights,
            cos,
            sin,
        })
    }

    pub fn idx(&self) -> CoisoIndex {
        self.idx
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coeff_len(&self) -> usize {
        FourierLoop::coeff_len(self.idx, self.modes)
    }

    fn nodes(&self) -> usize {
        self.weights.len()
    }

    fn check_len(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.coeff_len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeff_len(),
                got: c.len(),
            });
        }
        Ok(())
    }

    /// `-J w'(t_j)` at every node, node-major.
    fn velocities(&self, c: &[f64]) -> Vec<f64> {
        let (n, k) = (self.idx.n(), self.idx.k());
        let (da, d) = (n - k, 2 * n);
        let width = 2 * self.modes + 1;
        let mm = self.modes as i64;
        let mut out = vec![0.0; self.nodes() * d];
        for j in 0..self.nodes() {
            let row = &mut out[j * d..(j + 1) * d];
            let (ct, st) = (&self.cos[j * width..], &self.sin[j * width..]);
            let mut pos = 0;
            for m in (-mm..=mm).filter(|m| *m != 0) {
                let l = m.unsigned_abs() as usize;
                let sg = m.signum() as f64;
                let f = m as f64 * PI;
                let (c1, s1) = (ct[l], sg * st[l]);
                for i in 0..da {
                    let a = c[pos + i];
                    row[k + i] += f * c1 * a;
                    row[n + k + i] -= f * s1 * a;
                }
                pos += da;
                let (c2, s2) = (ct[2 * l], sg * st[2 * l]);
                for i in 0..k {
                    let (x, y) = (c[pos + i], c[pos + k + i]);
                    row[i] += 2.0 * f * (c2 * x + s2 * y);
                    row[n + i] += 2.0 * f * (c2 * y - s2 * x);
                }
                pos += 2 * k;
            }
        }
        out
    }

    /// Pulls node-wise covectors back to coefficient space.
    fn adjoint(&self, g: &[f64], grad: &mut [f64]) {
        let (n, k) = (self.idx.n(), self.idx.k());
        let (da, d) = (n - k, 2 * n);
        let width = 2 * self.modes + 1;
        let mm = self.modes as i64;
        grad.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..self.nodes() {
            let row = &g[j * d..(j + 1) * d];
            let (ct, st) = (&self.cos[j * width..], &self.sin[j * width..]);
            let mut pos = 0;
            for m in (-mm..=mm).filter(|m| *m != 0) {
                let l = m.unsigned_abs() as usize;
                let sg = m.signum() as f64;
                let f = m as f64 * PI;
                let (c1, s1) = (ct[l], sg * st[l]);
                for i in 0..da {
                    grad[pos + i] += f * (c1 * row[k + i] - s1 * row[n + k + i]);
                }
                pos += da;
                let (c2, s2) = (ct[2 * l], sg * st[2 * l]);
                for i in 0..k {
                    let (gq, gp) = (row[i], row[n + i]);
                    grad[pos + i] += 2.0 * f * (c2 * gq - s2 * gp);
                    grad[pos + k + i] += 2.0 * f * (s2 * gq + c2 * gp);
                }
                pos += 2 * k;
            }
        }
    }

    /// `I` by quadrature.
    pub fn functional(&self, c: &[f64]) -> Result<f64> {
        self.check_len(c)?;
        let d = self.idx.dim();
        let v = self.velocities(c);
        Ok(self
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * self.body.legendre_gauge_sq(&v[j * d..(j + 1) * d]))
            .sum())
    }

    /// `I` and its coefficient gradient; the flag reports subgradient selections.
    pub fn functional_grad(&self, c: &[f64], grad: &mut [f64]) -> Result<(f64, Smoothness)> {
        self.check_len(c)?;
        if grad.len() != c.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                got: grad.len(),
            });
        }
        Ok(self.functional_grad_unchecked(c, grad))
    }

    fn functional_grad_unchecked(&self, c: &[f64], grad: &mut [f64]) -> (f64, Smoothness) {
        let d = self.idx.dim();
        let mut v = self.velocities(c);
        let mut g = vec![0.0; d];
        let mut total = 0.0;
        let mut smooth = Smoothness::Smooth;
        for (j, w) in self.weights.iter().enumerate() {
            let node = &mut v[j * d..(j + 1) * d];
            let (val, s) = self.body.legendre_with_grad(node, &mut g);
            if s == Smoothness::Selected {
                smooth = Smoothness::Selected;
            }
            total += w * val;
            for (x, gi) in node.iter_mut().zip(&g) {
                *x = w * gi;
            }
        }
        self.adjoint(&v, grad);
        (total, smooth)
    }

    /// Closed-form action of the loop with these coefficients.
    pub fn action(&self, c: &[f64]) -> f64 {
        let mut grad = vec![0.0; c.len()];
        self.action_grad(c, &mut grad)
    }

    fn action_grad(&self, c: &[f64], grad: &mut [f64]) -> f64 {
        let (da, db) = (self.idx.dim_v0(), self.idx.dim_v1());
        let mm = self.modes as i64;
        let mut pos = 0;
        let mut a = 0.0;
        for m in (-mm..=mm).filter(|m| *m != 0) {
            let f = m as f64 * PI;
            for i in pos..pos + da {
                grad[i] = f * c[i];
                a += 0.5 * f * c[i] * c[i];
            }
            pos += da;
            for i in pos..pos + db {
                grad[i] = 2.0 * f * c[i];
                a += f * c[i] * c[i];
            }
            pos += db;
        }
        a
    }

    /// `I/A` and its gradient, or `None` where `A <= 0`.
    pub fn ratio_grad(&self, c: &[f64], grad: &mut [f64]) -> Option<(f64, Smoothness)> {
        let mut ga = vec![0.0; c.len()];
        let a = self.action_grad(c, &mut ga);
        if !(a > 0.0) {
            return None;
        }
        let (i, s) = self.functional_grad_unchecked(c, grad);
        let r = i / a;
        for (g, x) in grad.iter_mut().zip(&ga) {
            *g = (*g - r * x) / a;
        }
        Some((r, s))
    }

    /// Inverse-Hessian scaling `1 / freq^2` per coefficient.
    fn preconditioner(&self) -> Vec<f64> {
        let (da, db) = (self.idx.dim_v0(), self.idx.dim_v1());
        let mm = self.modes as i64;
        let mut out = Vec::with_capacity(self.coeff_len());
        for m in (-mm..=mm).filter(|m| *m != 0) {
            let f = m as f64;
            out.extend(std::iter::repeat_n(1.0 / (f * f), da));
            out.extend(std::iter::repeat_n(1.0 / (4.0 * f * f), db));
        }
        out
    }

    /// Rescales `c` to `A = 1`, returning the factor.
    fn normalize(&self, c: &mut [f64]) -> f64 {
        let a = self.action(c);
        if !(a > 0.0) {
            return 1.0;
        }
        let l = 1.0 / a.sqrt();
        c.iter_mut().for_each(|x| *x *= l);
        l
    }
}

/// `I(w)` and its gradient with respect to [`FourierLoop::coeffs`].
pub fn dual_functional(w: &FourierLoop, body: &Body) -> Result<(f64, Vec<f64>)> {
    let prob = DualProblem::new(body, w.idx(), w.modes())?;
    let c = w.coeffs();
    let mut grad = vec![0.0; c.len()];
    let (v, _) = prob.functional_grad(&c, &mut grad)?;
    Ok((v, grad))
}

/// Lowest mode in one symplectic plane: `a_1` along `q_j` for the planes
/// `j > k` (taken first), `b_1` along `q_j` for `j <= k`.
fn seed_loop(idx: CoisoIndex, modes: usize, which: usize) -> Vec<f64> {
    let (n, k) = (idx.n(), idx.k());
    let plane = (k + which) % n;
    let mut w = FourierLoop::zeros(idx, modes);
    let mut e = vec![0.0; idx.dim()];
    e[plane] = 1.0;
    if plane >= k {
        w.set_a(1, &e).expect("q_j lies in V0 for j > k");
    } else {
        w.set_b(1, &e).expect("q_j lies in V1 for j <= k");
    }
    w.coeffs()
}

fn random_loop(idx: CoisoIndex, modes: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (da, db) = (idx.dim_v0(), idx.dim_v1());
    let block = da + db;
    let mm = modes as i64;
    let mut c = Vec::with_capacity(2 * modes * block);
    for m in (-mm..=mm).filter(|m| *m != 0) {
        let decay = 1.0 / (m * m) as f64;
        for _ in 0..block {
            let z: f64 = StandardNormal.sample(rng);
            c.push(decay * z);
        }
    }
    c
}

/// Swaps the blocks of `m` and `-m`, which flips the sign of the action.
fn mirror(c: &mut [f64], modes: usize, block: usize) {
    for i in 0..modes {
        let lo = i * block;
        let hi = (2 * modes - 1 - i) * block;
        for t in 0..block {
            c.swap(lo + t, hi + t);
        }
    }
}

struct RestartOutcome {
    coeffs: Vec<f64>,
    summary: RestartSummary,
}

fn run_restart(prob: &DualProblem, opts: &SolverOptions, start: usize) -> Option<RestartOutcome> {
    let idx = prob.idx();
    let block = idx.dim_v0() + idx.dim_v1();
    let mut c = if start < idx.n() {
        seed_loop(idx, opts.modes, start)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(start as u64);
        random_loop(idx, opts.modes, &mut rng)
    };
    if prob.action(&c) < 0.0 {
        mirror(&mut c, opts.modes, block);
    }
    if !(prob.action(&c) > 0.0) {
        return None;
    }
    let precond = prob.preconditioner();
    let settings = lbfgs::Settings {
        memory: 12,
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
        stall_window: STALL_WINDOW,
    };
    let out = lbfgs::minimize(
        &settings,
        c,
        &precond,
        |x, g| prob.ratio_grad(x, g).map(|(r, _)| r),
        |x| prob.normalize(x),
    )?;
    if !(out.value.is_finite() && out.value > 0.0) {
        return None;
    }
    Some(RestartOutcome {
        coeffs: out.x,
        summary: RestartSummary {
            value: out.value,
            residual: out.grad_norm,
            iterations: out.iterations,
            converged: out.converged,
        },
    })
}

/// Tightens a converged minimizer well below the requested tolerance.
fn polish(
    prob: &DualProblem,
    opts: &SolverOptions,
    coeffs: &[f64],
) -> Option<(Vec<f64>, f64, f64)> {
    let settings = lbfgs::Settings {
        memory: 12,
        max_iters: 500,
        grad_tol: opts.grad_tol * 1e-3,
        stall_window: STALL_WINDOW,
    };
    let out = lbfgs::minimize(
        &settings,
        coeffs.to_vec(),
        &prob.preconditioner(),
        |x, g| prob.ratio_grad(x, g).map(|(r, _)| r),
        |x| prob.normalize(x),
    )?;
    Some((out.x, out.value, out.grad_norm))
}

/// Minimizes the dual ratio over `opts.starts` restarts.
pub fn minimize_capacity(
    body: &Body,
    idx: CoisoIndex,
    opts: &SolverOptions,
) -> Result<CapacityEstimate> {
    opts.validate()?;
    body.check_admissible(idx)?;
    body.dual_estimate_raw()?;
    let prob = DualProblem::new(body, idx, opts.modes)?;

    let outcomes: Vec<Option<RestartOutcome>> = (0..opts.starts)
        .into_par_iter()
        .map(|s| run_restart(&prob, opts, s))
        .collect();

    let mut best: Option<&RestartOutcome> = None;
    for o in outcomes.iter().flatten() {
        if best.is_none_or(|b| o.summary.value < b.summary.value) {
            best = Some(o);
        }
    }
    let best = best.ok_or_else(|| {
        Error::Solver(format!(
            "all {} restarts left the positive-action region",
            opts.starts
        ))
    })?;

    let mut coeffs = best.coeffs.clone();
    let mut value = best.summary.value;
    let mut residual = best.summary.residual;
    if let Some((c, v, r)) = polish(&prob, opts, &coeffs) {
        if r <= residual && v <= value * (1.0 + 1e-12) {
            coeffs = c;
            value = v;
            residual = r;
        }
    }

    let agreeing = outcomes
        .iter()
        .flatten()
        .filter(|o| {
            (o.summary.value - best.summary.value).abs() <= AGREEMENT_TOL * best.summary.value
        })
        .count();
    let mut g = vec![0.0; coeffs.len()];
    let smooth = prob
        .ratio_grad(&coeffs, &mut g)
        .map(|(_, s)| s)
        .unwrap_or(Smoothness::Selected);

    Ok(CapacityEstimate {
        value,
        minimizer: FourierLoop::from_coeffs(idx, opts.modes, &coeffs)?,
        rayleigh_residual: residual,
        starts_agreeing: agreeing,
        converged: residual <= opts.grad_tol,
        grad_tol: opts.grad_tol,
        nonsmooth: smooth == Smoothness::Selected,
        restarts: outcomes
            .iter()
            .map(|o| o.as_ref().map(|o| o.summary))
            .collect(),
    })
}

impl CapacityEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("estimate serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize, k: usize) -> CoisoIndex {
        CoisoIndex::new(n, k).unwrap()
    }

    #[test]
    fn circle_b_mode_on_unit_ball() {
        let i = idx(1, 1);
        let mut w = FourierLoop::zeros(i, 4);
        w.set_b(1, &[1.0, 0.0]).unwrap();
        let ball = Body::ball(1, 1.0).unwrap();
        let (v, _) = dual_functional(&w, &ball).unwrap();
        assert!((v - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let i = idx(2, 1);
        let body = Body::ellipsoid(&[1.0, 1.7]).unwrap();
        let prob = DualProblem::new(&body, i, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = random_loop(i, 3, &mut rng);
        let mut g = vec![0.0; c.len()];
        prob.functional_grad(&c, &mut g).unwrap();
        let h = 1e-6;
        for t in 0..c.len() {
            let mut cp = c.clone();
            let mut cm = c.clone();
            cp[t] += h;
            cm[t] -= h;
            let fd = (prob.functional(&cp).unwrap() - prob.functional(&cm).unwrap()) / (2.0 * h);
            assert!(
                (fd - g[t]).abs() <= 1e-6 * (1.0 + g[t].abs()),
                "{t}: {fd} vs {}",
                g[t]
            );
        }
    }

    #[test]
    fn action_matches_loop_closed_form() {
        let i = idx(3, 1);
        let body = Body::ball(3, 1.0).unwrap();
        let prob = DualProblem::new(&body, i, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_loop(i, 5, &mut rng);
        let w = FourierLoop::from_coeffs(i, 5, &c).unwrap();
        assert!((prob.action(&c) - w.action()).abs() < 1e-12);
    }

    #[test]
    fn mirror_flips_action() {
        let i = idx(2, 1);
        let body = Body::ball(2, 1.0).unwrap();
        let prob = DualProblem::new(&body, i, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut c = random_loop(i, 4, &mut rng);
        let a = prob.action(&c);
        mirror(&mut c, 4, i.dim_v0() + i.dim_v1());
        assert!((prob.action(&c) + a).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_options() {
        let body = Body::ball(1, 1.0).unwrap();
        let opts = SolverOptions {
            starts: 0,
            ..Default::default()
        };
        assert!(minimize_capacity(&body, idx(1, 0), &opts).is_err());
    }

    #[test]
    fn half_disc_capacity() {
        let body = Body::ball(1, 1.0).unwrap();
        let opts = SolverOptions {
            modes: 8,
            starts: 4,
            ..Default::default()
        };
        let est = minimize_capacity(&body, idx(1, 0), &opts).unwrap();
        assert!((est.value - PI / 2.0).abs() < 1e-9, "{}", est.value);
        assert!(est.converged);
    }
}
