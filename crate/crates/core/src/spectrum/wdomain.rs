//! Smoothed `W`-shaped planar domains.
//!
//! `W(1, N)` is the box `[-N, N] x [-N, 0]` with the upper unit half-disc on
//! top. The smoothed domain replaces the half-disc by the region under a cap
//! `y = g(x)` that follows the circle up to `|x| = 1 - delta1` and then blends
//! into the axis at `|x| = 1 + delta2`, and rounds the four box corners by the
//! arcs `h(t) = (eps/2)(1 - 2t/eps)^2`, `0 <= t <= eps/2`.
//!
//! Its boundary meets the `q` axis in two flat pieces, so it has exactly two
//! leafwise chords: the cap and the bottom of the box.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::planar::{Line, Parametric, PlanarCurve, Segment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WDomain {
    /// Half-width and depth `N` of the box.
    pub n_box: f64,
    pub eps: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Quintic Hermite basis on `[0, 1]` matching value, slope and curvature at 0
/// and vanishing to second order at 1, with its first two derivatives.
fn hermite(s: f64) -> [[f64; 3]; 3] {
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
    [
        [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
            -60.0 * s + 180.0 * s2 - 120.0 * s3,
        ],
        [
            s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            -36.0 * s + 96.0 * s2 - 60.0 * s3,
        ],
        [
            0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
            0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
            0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
        ],
    ]
}

fn circle(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

/// `int sqrt(1 - x^2) dx`.
fn circle_primitive(x: f64) -> f64 {
    0.5 * (x * circle(x) + x.clamp(-1.0, 1.0).asin())
}

impl WDomain {
    /// Parameters with the default blend widths `delta1 = eps/10`, `delta2 = eps/5`.
    pub fn new(n_box: f64, eps: f64) -> Result<Self> {
        Self::with_blend(n_box, eps, eps / 10.0, eps / 5.0)
    }

    pub fn with_blend(n_box: f64, eps: f64, delta1: f64, delta2: f64) -> Result<Self> {
        let w = Self {
            n_box,
            eps,
            delta1,
            delta2,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if !(self.n_box.is_finite() && self.n_box > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "N must exceed 2, got {}",
                self.n_box
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 0.01) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1/100], got {}",
                self.eps
            )));
        }
        if !(self.delta1 > 0.0 && self.delta1 < 0.5 && self.delta2 > 0.0 && self.delta2 < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "blend widths must lie in (0, 1/2), got {} and {}",
                self.delta1, self.delta2
            )));
        }
        // the cap must stay above the circle, decrease, and add less than eps/2 of area;
        // the slope is checked up to the rounding noise of the blend near its end
        let (x0, x1) = (1.0 - self.delta1, 1.0 + self.delta2);
        let slope_tol = 1e-10;
        for j in 0..=2000 {
            let x = x0 + (x1 - x0) * j as f64 / 2000.0;
            let (g, dg) = (self.cap(x), self.cap_slope(x));
            if g < circle(x) - 1e-14 || dg > slope_tol || g < -1e-14 {
                return Err(Error::InvalidParameter(format!(
                    "blend widths {} / {} give a cap that is not a decreasing majorant of the circle near x = {x:.6}",
                    self.delta1, self.delta2
                )));
            }
        }
        let surplus = self.cap_surplus();
        if !(surplus > 0.0 && surplus < self.eps / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "cap adds area {surplus:.3e}, outside (0, eps/2)"
            )));
        }
        Ok(())
    }

    fn blend_data(&self) -> (f64, f64, [f64; 3]) {
        let x0 = 1.0 - self.delta1;
        let len = self.delta1 + self.delta2;
        let f0 = circle(x0);
        let f1 = -x0 / f0;
        let f2 = -1.0 / (f0 * f0 * f0);
        (x0, len, [f0, f1 * len, f2 * len * len])
    }

    /// The cap profile `g` (even in `x`).
    pub fn cap(&self, x: f64) -> f64 {
        let x = x.abs();
        let (x0, len, c) = self.blend_data();
        if x <= x0 {
            circle(x)
        } else if x >= x0 + len {
            0.0
        } else {
            let h = hermite((x - x0) / len);
            c[0] * h[0][0] + c[1] * h[1][0] + c[2] * h[2][0]
        }
    }

    pub fn cap_slope(&self, x: f64) -> f64 {
        let sg = x.signum();
        let x = x.abs();
        let (x0, len, c) = self.blend_data();
        let d = if x <= x0 {
            -x / circle(x)
        } else if x >= x0 + len {
            0.0
        } else {
            let h = hermite((x - x0) / len);
            (c[0] * h[0][1] + c[1] * h[1][1] + c[2] * h[2][1]) / len
        };
        sg * d
    }

    /// `Area(W_g) - Area(W)`, in closed form.
    pub fn cap_surplus(&self) -> f64 {
        let (x0, len, c) = self.blend_data();
        let blend = len * (c[0] / 2.0 + c[1] / 10.0 + c[2] / 120.0);
        let arc = circle_primitive(1.0) - circle_primitive(x0);
        2.0 * (blend - arc)
    }

    /// Area cut off by one rounded corner, `eps^2 / 12`.
    pub fn corner_area(&self) -> f64 {
        self.eps * self.eps / 12.0
    }

    /// Action of the chord over the cap.
    pub fn cap_action(&self) -> f64 {
        PI / 2.0 + self.cap_surplus()
    }

    /// Action of the chord around the box.
    pub fn bottom_action(&self) -> f64 {
        2.0 * self.n_box * self.n_box - 4.0 * self.corner_area()
    }

    /// Area of the smoothed domain with rounded corners.
    pub fn area(&self) -> f64 {
        PI / 2.0 + 2.0 * self.n_box * self.n_box + self.cap_surplus() - 4.0 * self.corner_area()
    }

    fn corner(
        &self,
        origin: [f64; 2],
        along: [f64; 2],
        inward: [f64; 2],
        reverse: bool,
    ) -> Arc<dyn Segment> {
        let e = self.eps;
        let map = move |t: f64| {
            let h = 0.5 * e * (1.0 - 2.0 * t / e).powi(2);
            [
                origin[0] + t * along[0] + h * inward[0],
                origin[1] + t * along[1] + h * inward[1],
            ]
        };
        let dmap = move |t: f64| {
            let dh = -2.0 * (1.0 - 2.0 * t / e);
            [along[0] + dh * inward[0], along[1] + dh * inward[1]]
        };
        let (t0, t1) = if reverse {
            (0.5 * e, 0.0)
        } else {
            (0.0, 0.5 * e)
        };
        Arc::new(Parametric::new(Arc::new(map), Arc::new(dmap), t0, t1))
    }

    /// Counter-clockwise boundary curve.
    pub fn curve(&self) -> Result<PlanarCurve> {
        let (n, e) = (self.n_box, self.eps);
        let half = 0.5 * e;
        let x1 = 1.0 + self.delta2;
        let w = *self;
        let line = |a: [f64; 2], b: [f64; 2]| Arc::new(Line { a, b }) as Arc<dyn Segment>;
        // corner arcs run from the horizontal side (t = 0) to the vertical side (t = eps/2)
        let segs: Vec<Arc<dyn Segment>> = vec![
            line([-n + half, -n], [n - half, -n]),
            self.corner([n, -n], [0.0, 1.0], [-1.0, 0.0], false),
            line([n, -n + half], [n, -half]),
            self.corner([n, 0.0], [0.0, -1.0], [-1.0, 0.0], true),
            line([n - half, 0.0], [x1, 0.0]),
            Arc::new(Parametric::graph(
                move |x| w.cap(x),
                move |x| w.cap_slope(x),
                x1,
                -x1,
            )),
            line([-x1, 0.0], [-n + half, 0.0]),
            self.corner([-n, 0.0], [0.0, -1.0], [1.0, 0.0], false),
            line([-n, -half], [-n, -n + half]),
            self.corner([-n, -n], [0.0, 1.0], [1.0, 0.0], true),
        ];
        PlanarCurve::new(segs)
    }
}

/// Boundary of the smoothed domain `W_{g,eps}(1, N)`.
pub fn w_domain_curve(n_box: f64, eps: f64, delta1: f64, delta2: f64) -> Result<PlanarCurve> {
    WDomain::with_blend(n_box, eps, delta1, delta2)?.curve()
}
