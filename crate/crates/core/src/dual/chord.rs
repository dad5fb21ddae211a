//! Leafwise chords recovered from dual minimizers, and an independent checker.

use serde::{Deserialize, Serialize};

use super::{CapacityEstimate, NODES_PER_MODE};
use crate::body::Body;
use crate::error::{Error, Result};
use crate::fourier::FourierLoop;
use crate::symplectic::{apply_j_into, dot, leaf_residual, norm, CoisoIndex, PhasePoint};

/// Certification thresholds used by [`reconstruct_chord`].
pub const ODE_TOL: f64 = 1e-6;
pub const BOUNDARY_TOL: f64 = 1e-8;
pub const GAUGE_TOL: f64 = 1e-6;

/// Step of the central differences taken on the continuous reconstruction.
const FD_STEP: f64 = 1e-3;

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordSample {
    pub t: f64,
    pub x: PhasePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub n: usize,
    pub k: usize,
    /// Period `T = 1` samples on a uniform grid.
    pub samples: Vec<ChordSample>,
    pub action: f64,
    /// `max |x' - c J grad H(x)| / max |x'|` with `c` the capacity estimate.
    pub ode_residual: f64,
    pub boundary_residual: f64,
    pub gauge_residual: f64,
    pub certified: bool,
}

impl Chord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chord serializes")
    }

    /// Samples as CSV with columns `t, q1..qn, p1..pn`.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.n {
            out.push_str(&format!(",q{i}"));
        }
        for i in 1..=self.n {
            out.push_str(&format!(",p{i}"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{:.11e}", s.t));
            for x in s.x.iter() {
                out.push_str(&format!(",{x:.11e}"));
            }
            out.push('\n');
        }
        out
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Chord {
        let mut out = self.clone();
        out.samples = self
            .samples
            .iter()
            .rev()
            .map(|s| ChordSample {
                t: 1.0 - s.t,
                x: s.x.clone(),
            })
            .collect();
        out.action = -self.action;
        out.certified = false;
        out
    }
}

fn minus_j(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    apply_j_into(v, &mut out);
    out.iter_mut().for_each(|x| *x = -*x);
    out
}

struct Reconstruction<'a> {
    loop_: &'a FourierLoop,
    body: &'a Body,
    anchor: Vec<f64>,
    mu: f64,
}

impl Reconstruction<'_> {
    fn unscaled(&self, t: f64) -> Vec<f64> {
        let v = minus_j(&self.loop_.velocity(t));
        self.body.centered().grad_legendre(&v).0.into_vec()
    }

    fn point(&self, t: f64) -> Vec<f64> {
        let y = self.unscaled(t);
        y.iter()
            .zip(&self.anchor)
            .map(|(a, s)| self.mu * a + s)
            .collect()
    }

    fn velocity(&self, t: f64) -> Vec<f64> {
        let h = FD_STEP;
        let p2 = self.point(t + 2.0 * h);
        let p1 = self.point(t + h);
        let m1 = self.point(t - h);
        let m2 = self.point(t - 2.0 * h);
        (0..p1.len())
            .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
            .collect()
    }
}

/// Recovers the leafwise chord `x = mu * grad H*(-J w') + anchor` from a dual minimizer.
pub fn reconstruct_chord(
    estimate: &CapacityEstimate,
    body: &Body,
    idx: CoisoIndex,
) -> Result<Chord> {
    let w = &estimate.minimizer;
    if w.idx() != idx {
        return Err(Error::InvalidParameter(format!(
            "minimizer was computed for (n, k) = ({}, {})",
            w.idx().n(),
            w.idx().k()
        )));
    }
    body.check_admissible(idx)?;
    let rho = estimate.value;
    let intervals = NODES_PER_MODE * w.modes();
    let h = 1.0 / intervals as f64;

    let mut rec = Reconstruction {
        loop_: w,
        body,
        anchor: body.anchor(),
        mu: 1.0,
    };
    let centered = body.centered();
    let mut mean = 0.0;
    for j in 0..=intervals {
        let wt = if j == 0 || j == intervals { 0.5 * h } else { h };
        mean += wt * centered.gauge(&rec.unscaled(j as f64 * h));
    }
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::Solver("minimizer has degenerate velocity".into()));
    }
    rec.mu = 1.0 / mean;

    let mut samples = Vec::with_capacity(intervals + 1);
    let (mut ode, mut vmax, mut gauge_res) = (0.0f64, 0.0f64, 0.0f64);
    let mut jg = vec![0.0; idx.dim()];
    for j in 0..=intervals {
        let t = j as f64 * h;
        let x = rec.point(t);
        let xd = rec.velocity(t);
        let (g, _) = body.grad_hamiltonian(&x);
        apply_j_into(&g, &mut jg);
        let defect: f64 = xd
            .iter()
            .zip(&jg)
            .map(|(a, b)| (a - rho * b).powi(2))
            .sum::<f64>()
            .sqrt();
        ode = ode.max(defect);
        vmax = vmax.max(norm(&xd));
        gauge_res = gauge_res.max((body.gauge(&x) - 1.0).abs());
        samples.push(ChordSample {
            t,
            x: PhasePoint::new(x)?,
        });
    }
    let ode_residual = if vmax > 0.0 {
        ode / vmax
    } else {
        f64::INFINITY
    };
    let boundary_residual = leaf_residual(&samples[0].x, &samples[intervals].x, idx);

    let mut action = 0.0;
    for j in 0..intervals {
        let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
        for (node, wt) in GAUSS4 {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * node;
            let x = rec.point(t);
            let xd = rec.velocity(t);
            action += 0.5 * (b - a) * wt * 0.5 * dot(&minus_j(&xd), &x);
        }
    }

    let certified = ode_residual <= ODE_TOL
        && boundary_residual <= BOUNDARY_TOL
        && gauge_res <= GAUGE_TOL
        && action > 0.0
        && (action - rho).abs() <= 2.0 * estimate.grad_tol;

    Ok(Chord {
        n: idx.n(),
        k: idx.k(),
        samples,
        action,
        ode_residual,
        boundary_residual,
        gauge_residual: gauge_res,
        certified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Allowed `|gauge(x) - 1|`.
    pub gauge: f64,
    /// Allowed angle (radians, small-angle) between `-J x'` and the normal cone.
    pub angle: f64,
    pub boundary: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            gauge: 1e-6,
            angle: 1e-4,
            boundary: 1e-8,
        }
    }
}

/// Clause-by-clause result of [`verify_chord`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordReport {
    pub on_boundary: bool,
    pub characteristic: bool,
    pub orientation: bool,
    pub boundary: bool,
    pub gauge_defect: f64,
    pub cone_residual: f64,
    pub action: f64,
    pub boundary_defect: f64,
}

impl ChordReport {
    pub fn passed(&self) -> bool {
        self.on_boundary && self.characteristic && self.orientation && self.boundary
    }
}

/// Fourth-order differences on a uniform grid.
fn sample_velocities(xs: &[&[f64]], h: f64) -> Vec<Vec<f64>> {
    let len = xs.len();
    let d = xs[0].len();
    let comb = |c: [f64; 5], base: usize, sign: f64, dir: isize| -> Vec<f64> {
        (0..d)
            .map(|i| {
                let s: f64 = (0..5)
                    .map(|t| c[t] * xs[(base as isize + dir * t as isize) as usize][i])
                    .sum();
                sign * s / (12.0 * h)
            })
            .collect()
    };
    (0..len)
        .map(|j| {
            if j >= 2 && j + 2 < len {
                comb([1.0, -8.0, 0.0, 8.0, -1.0], j - 2, 1.0, 1)
            } else if j == 0 {
                comb([-25.0, 48.0, -36.0, 16.0, -3.0], 0, 1.0, 1)
            } else if j == 1 {
                comb([-3.0, -10.0, 18.0, -6.0, 1.0], 0, 1.0, 1)
            } else if j == len - 1 {
                comb([-25.0, 48.0, -36.0, 16.0, -3.0], len - 1, -1.0, -1)
            } else {
                comb([-3.0, -10.0, 18.0, -6.0, 1.0], len - 1, -1.0, -1)
            }
        })
        .collect()
}

/// Re-checks the chord conditions on the sample grid alone.
pub fn verify_chord(
    chord: &Chord,
    body: &Body,
    idx: CoisoIndex,
    tols: &VerifyTolerances,
) -> Result<ChordReport> {
    let len = chord.samples.len();
    if len < 5 {
        return Err(Error::InvalidParameter(
            "a chord needs at least 5 samples".into(),
        ));
    }
    if chord.samples.iter().any(|s| s.x.len() != idx.dim()) || body.n() != idx.n() {
        return Err(Error::DimensionMismatch {
            expected: idx.dim(),
            got: chord.samples[0].x.len(),
        });
    }
    let t0 = chord.samples[0].t;
    let h = (chord.samples[len - 1].t - t0) / (len - 1) as f64;
    let uniform = chord
        .samples
        .iter()
        .enumerate()
        .all(|(j, s)| (s.t - (t0 + j as f64 * h)).abs() <= 1e-9 * (1.0 + s.t.abs()));
    if !uniform || h == 0.0 {
        return Err(Error::InvalidParameter(
            "chord samples must be uniformly spaced in t".into(),
        ));
    }
    let xs: Vec<&[f64]> = chord.samples.iter().map(|s| s.x.as_slice()).collect();
    let vel = sample_velocities(&xs, h);

    let gauge_defect = xs
        .iter()
        .map(|x| (body.gauge(x) - 1.0).abs())
        .fold(0.0, f64::max);
    let cone_residual = xs
        .iter()
        .zip(&vel)
        .map(|(x, v)| body.normal_cone_residual(x, &minus_j(v)))
        .fold(0.0, f64::max);
    let integrand: Vec<f64> = xs
        .iter()
        .zip(&vel)
        .map(|(x, v)| 0.5 * dot(&minus_j(v), x))
        .collect();
    let action = if (len - 1).is_multiple_of(2) {
        let inner: f64 = integrand[1..len - 1]
            .iter()
            .enumerate()
            .map(|(j, f)| if j % 2 == 0 { 4.0 * f } else { 2.0 * f })
            .sum();
        h / 3.0 * (integrand[0] + inner + integrand[len - 1])
    } else {
        h * (integrand.iter().sum::<f64>() - 0.5 * (integrand[0] + integrand[len - 1]))
    };
    let boundary_defect = leaf_residual(xs[0], xs[len - 1], idx);

    Ok(ChordReport {
        on_boundary: gauge_defect <= tols.gauge,
        characteristic: cone_residual <= tols.angle,
        orientation: action > 0.0,
        boundary: boundary_defect <= tols.boundary,
        gauge_defect,
        cone_residual,
        action,
        boundary_defect,
    })
}
