//! Preconditioned L-BFGS for scale-invariant objectives.
//!
//! The objective is 0-homogeneous, so every accepted iterate is rescaled by a
//! caller-supplied normalization. Curvature pairs are transported with it:
//! under `x -> l x` the gradient maps to `g / l`, hence `s -> l s` and `y -> y / l`.

use std::collections::VecDeque;

use crate::symplectic::{dot, norm};

pub(crate) struct Settings {
    pub memory: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Stop once the value improved by less than `STALL_REL` over this many iterations.
    pub stall_window: usize,
}

const STALL_REL: f64 = 1e-11;

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `eval` starting from `x0`.
///
/// `eval(x, g)` returns `None` outside the feasible region. `normalize(x)`
/// rescales `x` in place and returns the factor it applied. `precond` is a
/// positive diagonal approximating the inverse Hessian up to a constant.
pub(crate) fn minimize(
    settings: &Settings,
    x0: Vec<f64>,
    precond: &[f64],
    mut eval: impl FnMut(&[f64], &mut [f64]) -> Option<f64>,
    mut normalize: impl FnMut(&mut [f64]) -> f64,
) -> Option<Outcome> {
    let dim = x0.len();
    let mut x = x0;
    normalize(&mut x);
    let mut g = vec![0.0; dim];
    let mut f = eval(&x, &mut g)?;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut gamma = 1.0;
    let mut x_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut iterations = 0;
    let mut history: VecDeque<f64> = VecDeque::new();

    loop {
        let gn = norm(&g);
        if gn <= settings.grad_tol {
            return Some(Outcome {
                x,
                value: f,
                grad_norm: gn,
                iterations,
                converged: true,
            });
        }
        history.push_back(f);
        let stalled = history.len() > settings.stall_window
            && history
                .pop_front()
                .is_some_and(|old| old - f <= STALL_REL * f.abs());
        if iterations >= settings.max_iters || stalled {
            return Some(Outcome {
                x,
                value: f,
                grad_norm: gn,
                iterations,
                converged: false,
            });
        }
        iterations += 1;

        let mut accepted = false;
        for attempt in 0..2 {
            if attempt == 1 {
                if pairs.is_empty() {
                    break;
                }
                pairs.clear();
            }
            let mut d = two_loop(&g, &pairs, precond, gamma);
            let mut slope = dot(&g, &d);
            if !(slope < 0.0) {
                pairs.clear();
                d = two_loop(&g, &pairs, precond, gamma);
                slope = dot(&g, &d);
            }
            let mut alpha = if pairs.is_empty() {
                // without curvature information cap the first trial step
                (0.1 * norm(&x) / norm(&d)).min(1.0)
            } else {
                1.0
            };
            let slack = 4.0 * f64::EPSILON * f.abs();
            for _ in 0..60 {
                for i in 0..dim {
                    x_new[i] = x[i] + alpha * d[i];
                }
                if let Some(fv) = eval(&x_new, &mut g_new) {
                    if fv.is_finite() && fv <= f + 1e-4 * alpha * slope + slack {
                        accepted = true;
                        f = fv;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            return Some(Outcome {
                x,
                value: f,
                grad_norm: gn,
                iterations,
                converged: false,
            });
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            let ydy: f64 = y.iter().zip(precond).map(|(a, p)| a * a * p).sum();
            gamma = sy / ydy;
            pairs.push_back((s, y, 1.0 / sy));
            if pairs.len() > settings.memory {
                pairs.pop_front();
            }
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        let l = normalize(&mut x);
        if l != 1.0 {
            g.iter_mut().for_each(|v| *v /= l);
            for (s, y, _) in pairs.iter_mut() {
                s.iter_mut().for_each(|v| *v *= l);
                y.iter_mut().for_each(|v| *v /= l);
            }
            gamma *= l * l;
        }
    }
}

fn two_loop(
    g: &[f64],
    pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    precond: &[f64],
    gamma: f64,
) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    let scale = if pairs.is_empty() { 1.0 } else { gamma };
    q.iter_mut()
        .zip(precond)
        .for_each(|(qi, p)| *qi *= scale * p);
    for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
