//! Convex bodies given by their Minkowski gauge.
//!
//! Every body exposes the gauge `j`, the Hamiltonian `H = j^2`, the support
//! function `h`, and the Legendre transform `H*`. For bodies centered at the
//! origin `H* = h^2 / 4`; a translated body keeps the gauge of its base
//! evaluated at `z - s`, so its Legendre transform is `H*_base(w) + <s, w>`.

mod spec;

pub use spec::BodySpec;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{dot, norm, CoisoIndex, PhasePoint, Subspace};

/// Whether a gradient was evaluated at a point of differentiability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    /// A subgradient selection was returned.
    Selected,
}

impl Smoothness {
    fn and(self, other: Smoothness) -> Smoothness {
        if self == Smoothness::Smooth && other == Smoothness::Smooth {
            Smoothness::Smooth
        } else {
            Smoothness::Selected
        }
    }
}

/// Constants with `|z|^2/r1 <= H(z) <= r1 |z|^2` and `|z|^2/r2 <= H*(z) <= r2 |z|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualEstimate {
    pub r1: f64,
    pub r2: f64,
}

/// Safety factor applied to sampled dual-estimate constants.
pub const DUAL_ESTIMATE_INFLATION: f64 = 1.05;

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Ball {
        n: usize,
        r: f64,
    },
    Ellipsoid {
        n: usize,
        /// Per-plane radii when the body was given that way.
        radii: Option<Vec<f64>>,
        q: DMatrix<f64>,
        q_inv: DMatrix<f64>,
    },
    LpBall {
        n: usize,
        p: f64,
        /// Per-plane radii.
        radii: Vec<f64>,
    },
    Product {
        n: usize,
        factors: Vec<Body>,
        /// Offset of each factor's `q` block (its `p` block sits at `n + offset`).
        offsets: Vec<usize>,
    },
    Translate {
        base: Box<Body>,
        shift: Vec<f64>,
    },
}

fn positive_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!(
            "{what} must be positive and finite, got {x}"
        )))
    }
}

impl Body {
    pub fn ball(n: usize, r: f64) -> Result<Body> {
        if n == 0 {
            return Err(Error::InvalidBody("ball dimension must be positive".into()));
        }
        positive_finite(r, "ball radius")?;
        Ok(Body::Ball { n, r })
    }

    /// Ellipsoid `sum_i (q_i^2 + p_i^2) / r_i^2 <= 1` with per-plane radii.
    pub fn ellipsoid(radii: &[f64]) -> Result<Body> {
        if radii.is_empty() {
            return Err(Error::InvalidBody(
                "ellipsoid needs at least one radius".into(),
            ));
        }
        for &r in radii {
            positive_finite(r, "ellipsoid radius")?;
        }
        let n = radii.len();
        let diag: Vec<f64> = (0..2 * n).map(|i| radii[i % n].powi(-2)).collect();
        let inv: Vec<f64> = (0..2 * n).map(|i| radii[i % n].powi(2)).collect();
        Ok(Body::Ellipsoid {
            n,
            radii: Some(radii.to_vec()),
            q: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
            q_inv: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv)),
        })
    }

    /// Ellipsoid `z^T Q z <= 1` for a symmetric positive definite `Q`.
    pub fn ellipsoid_matrix(q: DMatrix<f64>) -> Result<Body> {
        let d = q.nrows();
        if d == 0 || !d.is_multiple_of(2) || q.ncols() != d {
            return Err(Error::InvalidBody(format!(
                "ellipsoid matrix must be square with even size, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
            return Err(Error::InvalidBody(
                "ellipsoid matrix must be symmetric".into(),
            ));
        }
        let chol = q.clone().cholesky().ok_or_else(|| {
            Error::InvalidBody("ellipsoid matrix must be positive definite".into())
        })?;
        let q_inv = chol.inverse();
        Ok(Body::Ellipsoid {
            n: d / 2,
            radii: None,
            q,
            q_inv,
        })
    }

    /// `{ z : sum_i |z_i / r_i|^p <= 1 }` with per-plane radii and `p >= 2`.
    pub fn lp_ball(p: f64, radii: &[f64]) -> Result<Body> {
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidBody(format!(
                "lp exponent must be finite and >= 2, got {p}"
            )));
        }
        if radii.is_empty() {
            return Err(Error::InvalidBody(
                "lp ball needs at least one radius".into(),
            ));
        }
        for &r in radii {
            positive_finite(r, "lp radius")?;
        }
        Ok(Body::LpBall {
            n: radii.len(),
            p,
            radii: radii.to_vec(),
        })
    }

    /// Cartesian product; factor `i` occupies `(q^(i), p^(i))` under the
    /// identification `((q^(1),p^(1)),...,(q^(m),p^(m))) -> (q^(1),...,q^(m),p^(1),...,p^(m))`.
    pub fn product(factors: Vec<Body>) -> Result<Body> {
        if factors.is_empty() {
            return Err(Error::InvalidBody(
                "product needs at least one factor".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut n = 0;
        for f in &factors {
            offsets.push(n);
            n += f.n();
        }
        Ok(Body::Product {
            n,
            factors,
            offsets,
        })
    }

    pub fn translate(base: Body, shift: &[f64]) -> Result<Body> {
        if shift.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: shift.len(),
            });
        }
        if shift.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidBody("translation must be finite".into()));
        }
        Ok(Body::Translate {
            base: Box::new(base),
            shift: shift.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Body::Ball { n, .. }
            | Body::Ellipsoid { n, .. }
            | Body::LpBall { n, .. }
            | Body::Product { n, .. } => *n,
            Body::Translate { base, .. } => base.n(),
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n()
    }

    pub fn to_spec(&self) -> BodySpec {
        match self {
            Body::Ball { n, r } => BodySpec::Ball { r: *r, n: Some(*n) },
            Body::Ellipsoid { radii, q, .. } => match radii {
                Some(r) => BodySpec::Ellipsoid {
                    radii: Some(r.clone()),
                    q: None,
                },
                None => BodySpec::Ellipsoid {
                    radii: None,
                    q: Some(
                        q.row_iter()
                            .map(|row| row.iter().copied().collect())
                            .collect(),
                    ),
                },
            },
            Body::LpBall { p, radii, .. } => BodySpec::LpBall {
                p: *p,
                radii: radii.clone(),
            },
            Body::Product { factors, .. } => BodySpec::Product {
                factors: factors.iter().map(Body::to_spec).collect(),
            },
            Body::Translate { base, shift } => BodySpec::Translate {
                shift: shift.clone(),
                base: Box::new(base.to_spec()),
            },
        }
    }

    /// The image `lambda * D` for `lambda > 0`.
    pub fn dilate(&self, lambda: f64) -> Result<Body> {
        positive_finite(lambda, "dilation factor")?;
        Ok(match self {
            Body::Ball { n, r } => Body::Ball {
                n: *n,
                r: r * lambda,
            },
            Body::Ellipsoid { n, radii, q, q_inv } => Body::Ellipsoid {
                n: *n,
                radii: radii
                    .as_ref()
                    .map(|r| r.iter().map(|x| x * lambda).collect()),
                q: q / (lambda * lambda),
                q_inv: q_inv * (lambda * lambda),
            },
            Body::LpBall { n, p, radii } => Body::LpBall {
                n: *n,
                p: *p,
                radii: radii.iter().map(|x| x * lambda).collect(),
            },
            Body::Product { factors, .. } => Body::product(
                factors
                    .iter()
                    .map(|f| f.dilate(lambda))
                    .collect::<Result<_>>()?,
            )?,
            Body::Translate { base, shift } => Body::Translate {
                base: Box::new(base.dilate(lambda)?),
                shift: shift.iter().map(|s| s * lambda).collect(),
            },
        })
    }

    /// Total translation applied to the underlying centered body.
    pub fn anchor(&self) -> Vec<f64> {
        match self {
            Body::Translate { base, shift } => {
                let inner = base.anchor();
                inner.iter().zip(shift).map(|(a, b)| a + b).collect()
            }
            _ => vec![0.0; self.dim()],
        }
    }

    /// The body with all translations stripped.
    pub fn centered(&self) -> &Body {
        match self {
            Body::Translate { base, .. } => base.centered(),
            _ => self,
        }
    }

    /// Checks that the body may be fed to the capacity solver for `idx`.
    pub fn check_admissible(&self, idx: CoisoIndex) -> Result<()> {
        if self.n() != idx.n() {
            return Err(Error::DimensionMismatch {
                expected: idx.dim(),
                got: self.dim(),
            });
        }
        let anchor = self.anchor();
        let off: f64 = anchor
            .iter()
            .enumerate()
            .filter(|(i, _)| !idx.slot_in(Subspace::Rnk, *i))
            .map(|(_, s)| s * s)
            .sum::<f64>()
            .sqrt();
        if off > 1e-12 {
            return Err(Error::InvalidBody(format!(
                "translation leaves R^{{{},{}}} by {off:.3e}; only shifts inside it are supported",
                idx.n(),
                idx.k()
            )));
        }
        Ok(())
    }

    /// Minkowski gauge `j_D(z)`.
    pub fn gauge(&self, z: &[f64]) -> f64 {
        match self {
            Body::Ball { r, .. } => norm(z) / r,
            Body::Ellipsoid { q, .. } => quad_form(q, z).max(0.0).sqrt(),
            Body::LpBall { p, radii, n } => lp_norm(z, |i| radii[i % n], *p),
            Body::Product {
                factors,
                offsets,
                n,
            } => factors
                .iter()
                .zip(offsets)
                .map(|(f, &o)| f.gauge(&gather(z, *n, o, f.n())))
                .fold(0.0, f64::max),
            Body::Translate { base, shift } => {
                let y: Vec<f64> = z.iter().zip(shift).map(|(a, b)| a - b).collect();
                base.gauge(&y)
            }
        }
    }

    /// `H = j_D^2`.
    pub fn hamiltonian(&self, z: &[f64]) -> f64 {
        let j = self.gauge(z);
        j * j
    }

    pub fn grad_hamiltonian(&self, z: &[f64]) -> (PhasePoint, Smoothness) {
        let mut out = vec![0.0; z.len()];
        let s = self.grad_hamiltonian_into(z, &mut out);
        (PhasePoint::new(out).expect("even dimension"), s)
    }

    pub(crate) fn grad_hamiltonian_into(&self, z: &[f64], out: &mut [f64]) -> Smoothness {
        match self {
            Body::Ball { r, .. } => {
                let c = 2.0 / (r * r);
                for (o, x) in out.iter_mut().zip(z) {
                    *o = c * x;
                }
                Smoothness::Smooth
            }
            Body::Ellipsoid { q, .. } => {
                mat_vec_into(q, z, out);
                out.iter_mut().for_each(|o| *o *= 2.0);
                Smoothness::Smooth
            }
            Body::LpBall { p, radii, n } => {
                let j = lp_norm(z, |i| radii[i % n], *p);
                if j == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return Smoothness::Smooth;
                }
                for (i, o) in out.iter_mut().enumerate() {
                    let rho = radii[i % n];
                    let u = z[i] / rho;
                    *o = 2.0 * j * u.signum() * (u.abs() / j).powf(p - 1.0) / rho;
                }
                Smoothness::Smooth
            }
            Body::Product {
                factors,
                offsets,
                n,
            } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                let parts: Vec<(f64, Vec<f64>)> = factors
                    .iter()
                    .zip(offsets)
                    .map(|(f, &o)| {
                        let zi = gather(z, *n, o, f.n());
                        (f.hamiltonian(&zi), zi)
                    })
                    .collect();
                let (best, hmax) =
                    parts
                        .iter()
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |acc, (i, (h, _))| {
                            if *h > acc.1 {
                                (i, *h)
                            } else {
                                acc
                            }
                        });
                let ties = parts
                    .iter()
                    .filter(|(h, _)| (hmax - h) <= 1e-12 * hmax.max(f64::MIN_POSITIVE))
                    .count();
                let f = &factors[best];
                let mut g = vec![0.0; f.dim()];
                let inner = f.grad_hamiltonian_into(&parts[best].1, &mut g);
                scatter(&g, out, *n, offsets[best], f.n());
                if ties > 1 {
                    Smoothness::Selected
                } else {
                    inner
                }
            }
            Body::Translate { base, shift } => {
                let y: Vec<f64> = z.iter().zip(shift).map(|(a, b)| a - b).collect();
                base.grad_hamiltonian_into(&y, out)
            }
        }
    }

    /// Support function `h_D(w) = sup_{z in D} <z, w>`.
    pub fn support(&self, w: &[f64]) -> f64 {
        match self {
            Body::Ball { r, .. } => r * norm(w),
            Body::Ellipsoid { q_inv, .. } => quad_form(q_inv, w).max(0.0).sqrt(),
            Body::LpBall { p, radii, n } => {
                let conj = p / (p - 1.0);
                lp_norm(w, |i| 1.0 / radii[i % n], conj)
            }
            Body::Product {
                factors,
                offsets,
                n,
            } => factors
                .iter()
                .zip(offsets)
                .map(|(f, &o)| f.support(&gather(w, *n, o, f.n())))
                .sum(),
            Body::Translate { base, shift } => base.support(w) + dot(shift, w),
        }
    }

    pub fn grad_support(&self, w: &[f64]) -> (PhasePoint, Smoothness) {
        let mut out = vec![0.0; w.len()];
        let s = self.grad_support_into(w, &mut out);
        (PhasePoint::new(out).expect("even dimension"), s)
    }

    /// `h_D(w)` and its gradient in one pass.
    fn support_with_grad(&self, w: &[f64], out: &mut [f64]) -> (f64, Smoothness) {
        match self {
            Body::Product {
                factors,
                offsets,
                n,
            } => {
                let mut s = Smoothness::Smooth;
                let mut h = 0.0;
                for (f, &o) in factors.iter().zip(offsets) {
                    let wi = gather(w, *n, o, f.n());
                    let mut g = vec![0.0; f.dim()];
                    let (hi, si) = f.support_with_grad(&wi, &mut g);
                    h += hi;
                    s = s.and(si);
                    scatter(&g, out, *n, o, f.n());
                }
                (h, s)
            }
            _ => {
                let s = self.grad_support_into(w, out);
                (self.support(w), s)
            }
        }
    }

    /// Gradient of the support function. At `w = 0` the selection is the
    /// limit along the positive axis of the last `q` coordinate.
    pub(crate) fn grad_support_into(&self, w: &[f64], out: &mut [f64]) -> Smoothness {
        if !matches!(self, Body::Product { .. } | Body::Translate { .. }) && norm(w) == 0.0 {
            let mut e = vec![0.0; w.len()];
            e[self.n() - 1] = 1.0;
            self.grad_support_into(&e, out);
            return Smoothness::Selected;
        }
        match self {
            Body::Ball { r, .. } => {
                let c = r / norm(w);
                for (o, x) in out.iter_mut().zip(w) {
                    *o = c * x;
                }
                Smoothness::Smooth
            }
            Body::Ellipsoid { q_inv, .. } => {
                mat_vec_into(q_inv, w, out);
                let h = dot(out, w).max(0.0).sqrt();
                out.iter_mut().for_each(|o| *o /= h);
                Smoothness::Smooth
            }
            Body::LpBall { p, radii, n } => {
                let conj = p / (p - 1.0);
                let h = lp_norm(w, |i| 1.0 / radii[i % n], conj);
                for (i, o) in out.iter_mut().enumerate() {
                    let rho = radii[i % n];
                    let y = w[i] * rho;
                    *o = rho * y.signum() * (y.abs() / h).powf(conj - 1.0);
                }
                Smoothness::Smooth
            }
            Body::Product {
                factors,
                offsets,
                n,
            } => {
                let mut s = Smoothness::Smooth;
                for (f, &o) in factors.iter().zip(offsets) {
                    let wi = gather(w, *n, o, f.n());
                    let mut g = vec![0.0; f.dim()];
                    s = s.and(f.grad_support_into(&wi, &mut g));
                    scatter(&g, out, *n, o, f.n());
                }
                s
            }
            Body::Translate { base, shift } => {
                let s = base.grad_support_into(w, out);
                for (o, x) in out.iter_mut().zip(shift) {
                    *o += x;
                }
                s
            }
        }
    }

    /// Legendre transform `H*(w) = sup_z (<z, w> - H(z))`.
    pub fn legendre_gauge_sq(&self, w: &[f64]) -> f64 {
        match self {
            Body::Ball { r, .. } => r * r * dot(w, w) / 4.0,
            Body::Ellipsoid { q_inv, .. } => quad_form(q_inv, w) / 4.0,
            Body::Translate { base, shift } => base.legendre_gauge_sq(w) + dot(shift, w),
            _ => {
                let h = self.support(w);
                h * h / 4.0
            }
        }
    }

    pub fn grad_legendre(&self, w: &[f64]) -> (PhasePoint, Smoothness) {
        let mut out = vec![0.0; w.len()];
        let (_, s) = self.legendre_with_grad(w, &mut out);
        (PhasePoint::new(out).expect("even dimension"), s)
    }

    /// `H*(w)` together with its gradient written into `grad`.
    pub(crate) fn legendre_with_grad(&self, w: &[f64], grad: &mut [f64]) -> (f64, Smoothness) {
        match self {
            Body::Ball { r, .. } => {
                let c = r * r / 2.0;
                for (g, x) in grad.iter_mut().zip(w) {
                    *g = c * x;
                }
                (r * r * dot(w, w) / 4.0, Smoothness::Smooth)
            }
            Body::Ellipsoid { q_inv, .. } => {
                mat_vec_into(q_inv, w, grad);
                let val = dot(grad, w) / 4.0;
                grad.iter_mut().for_each(|g| *g /= 2.0);
                (val, Smoothness::Smooth)
            }
            Body::Translate { base, shift } => {
                let (v, s) = base.legendre_with_grad(w, grad);
                for (g, x) in grad.iter_mut().zip(shift) {
                    *g += x;
                }
                (v + dot(shift, w), s)
            }
            _ => {
                let (h, s) = self.support_with_grad(w, grad);
                grad.iter_mut().for_each(|g| *g *= h / 2.0);
                (h * h / 4.0, s)
            }
        }
    }

    /// Distance of `v` from the normal cone of `D` at the boundary point `x`,
    /// relative to `|v|`. Values near zero mean `v` is an outward normal.
    pub fn normal_cone_residual(&self, x: &[f64], v: &[f64]) -> f64 {
        let vn = norm(v);
        if vn == 0.0 {
            return 0.0;
        }
        match self {
            Body::Product {
                factors,
                offsets,
                n,
            } => {
                let gauges: Vec<f64> = factors
                    .iter()
                    .zip(offsets)
                    .map(|(f, &o)| f.gauge(&gather(x, *n, o, f.n())))
                    .collect();
                let top = gauges.iter().copied().fold(0.0, f64::max);
                let mut defect = 0.0;
                for ((f, &o), g) in factors.iter().zip(offsets).zip(&gauges) {
                    let vi = gather(v, *n, o, f.n());
                    if top - g <= 1e-6 * top {
                        let xi = gather(x, *n, o, f.n());
                        let ri = f.normal_cone_residual(&xi, &vi) * norm(&vi);
                        defect += ri * ri;
                    } else {
                        defect += dot(&vi, &vi);
                    }
                }
                defect.sqrt() / vn
            }
            Body::Translate { base, shift } => {
                let y: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
                base.normal_cone_residual(&y, v)
            }
            _ => {
                let mut g = vec![0.0; x.len()];
                self.grad_hamiltonian_into(x, &mut g);
                let gg = dot(&g, &g);
                let lambda = (dot(v, &g) / gg).max(0.0);
                let r: f64 = v
                    .iter()
                    .zip(&g)
                    .map(|(a, b)| (a - lambda * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r / vn
            }
        }
    }

    /// Sampled constants of the two-sided quadratic bounds, before inflation.
    pub fn dual_estimate_raw(&self) -> Result<DualEstimate> {
        let body = self.centered();
        let d = body.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d0a1);
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(4096 + 2 * d);
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = s;
                dirs.push(e);
            }
        }
        for _ in 0..4096 {
            let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let l = norm(&u);
            u.iter_mut().for_each(|x| *x /= l);
            dirs.push(u);
        }
        let (mut r1, mut r2) = (1.0f64, 1.0f64);
        for u in &dirs {
            let h = body.hamiltonian(u);
            let hs = body.legendre_gauge_sq(u);
            if !(h.is_finite() && h > 0.0 && hs.is_finite() && hs > 0.0) {
                return Err(Error::InvalidBody(
                    "body has empty interior or is unbounded along a sampled direction".into(),
                ));
            }
            r1 = r1.max(h).max(1.0 / h);
            r2 = r2.max(hs).max(1.0 / hs);
        }
        Ok(DualEstimate { r1, r2 })
    }

    /// Dual-estimate constants inflated by [`DUAL_ESTIMATE_INFLATION`].
    pub fn dual_estimate(&self) -> Result<DualEstimate> {
        let raw = self.dual_estimate_raw()?;
        Ok(DualEstimate {
            r1: raw.r1 * DUAL_ESTIMATE_INFLATION,
            r2: raw.r2 * DUAL_ESTIMATE_INFLATION,
        })
    }

    /// Per-plane radii when the centered body is a ball or an axis-aligned ellipsoid.
    pub fn plane_radii(&self) -> Option<Vec<f64>> {
        match self {
            Body::Ball { n, r } => Some(vec![*r; *n]),
            Body::Ellipsoid { radii, .. } => radii.clone(),
            _ => None,
        }
    }
}

fn quad_form(m: &DMatrix<f64>, z: &[f64]) -> f64 {
    let d = z.len();
    let mut s = 0.0;
    for r in 0..d {
        let mut row = 0.0;
        for c in 0..d {
            row += m[(r, c)] * z[c];
        }
        s += z[r] * row;
    }
    s
}

fn mat_vec_into(m: &DMatrix<f64>, z: &[f64], out: &mut [f64]) {
    let d = z.len();
    for (r, o) in out.iter_mut().enumerate().take(d) {
        *o = (0..d).map(|c| m[(r, c)] * z[c]).sum();
    }
}

/// `(sum_i |z_i * scale(i)^{-1}|^p)^{1/p}`, computed without overflow.
fn lp_norm(z: &[f64], radius: impl Fn(usize) -> f64, p: f64) -> f64 {
    let u = |i: usize| (z[i] / radius(i)).abs();
    let m = (0..z.len()).map(u).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * (0..z.len())
        .map(|i| (u(i) / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Extracts the `(q, p)` block of a factor with half-dimension `m` at offset `o`.
pub(crate) fn gather(z: &[f64], n: usize, o: usize, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m);
    out.extend_from_slice(&z[o..o + m]);
    out.extend_from_slice(&z[n + o..n + o + m]);
    out
}

pub(crate) fn scatter(src: &[f64], z: &mut [f64], n: usize, o: usize, m: usize) {
    z[o..o + m].copy_from_slice(&src[..m]);
    z[n + o..n + o + m].copy_from_slice(&src[m..]);
}
