//! Closed planar curves and the actions of their arcs over the `q` axis.
//!
//! For `n = 1, k = 0` the leafwise chords on a star-shaped curve are its arcs
//! between consecutive meetings with the `q` axis. Traversed clockwise, such an
//! arc has action equal to the area it encloses together with the closing axis
//! segment, which itself carries zero action.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::{Spectrum, SpectrumEntry};
use crate::error::{Error, Result};

/// A smooth piece of a planar curve, parameterized over `[0, 1]`.
pub trait Segment: Send + Sync + fmt::Debug {
    fn point(&self, s: f64) -> [f64; 2];
    fn deriv(&self, s: f64) -> [f64; 2];
    /// Samples needed to resolve sign changes of `p` along the segment.
    fn sample_hint(&self) -> usize {
        256
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment for Line {
    fn point(&self, s: f64) -> [f64; 2] {
        [
            self.a[0] + s * (self.b[0] - self.a[0]),
            self.a[1] + s * (self.b[1] - self.a[1]),
        ]
    }

    fn deriv(&self, _s: f64) -> [f64; 2] {
        [self.b[0] - self.a[0], self.b[1] - self.a[1]]
    }

    fn sample_hint(&self) -> usize {
        1
    }
}

/// Arc of the circle `center + radius (cos t, sin t)` for `t` from `theta0` to `theta1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleArc {
    pub center: [f64; 2],
    pub radius: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl Segment for CircleArc {
    fn point(&self, s: f64) -> [f64; 2] {
        let t = self.theta0 + s * (self.theta1 - self.theta0);
        [
            self.center[0] + self.radius * t.cos(),
            self.center[1] + self.radius * t.sin(),
        ]
    }

    fn deriv(&self, s: f64) -> [f64; 2] {
        let t = self.theta0 + s * (self.theta1 - self.theta0);
        let w = self.theta1 - self.theta0;
        [-self.radius * w * t.sin(), self.radius * w * t.cos()]
    }
}

type CurveFn = Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>;

/// A segment given by closures over the parameter interval `[t0, t1]`.
#[derive(Clone)]
pub struct Parametric {
    point: CurveFn,
    deriv: CurveFn,
    t0: f64,
    t1: f64,
}

impl fmt::Debug for Parametric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Parametric")
            .field("t0", &self.t0)
            .field("t1", &self.t1)
            .finish_non_exhaustive()
    }
}

impl Parametric {
    pub fn new(point: CurveFn, deriv: CurveFn, t0: f64, t1: f64) -> Self {
        Self {
            point,
            deriv,
            t0,
            t1,
        }
    }

    /// Derivative taken by fourth-order central differences.
    pub fn with_numeric_deriv(point: CurveFn, t0: f64, t1: f64) -> Self {
        let p = point.clone();
        let deriv: CurveFn = Arc::new(move |t| {
            let h = 1e-4 * (1.0 + t.abs());
            let (a, b, c, d) = (p(t + 2.0 * h), p(t + h), p(t - h), p(t - 2.0 * h));
            [
                (-a[0] + 8.0 * b[0] - 8.0 * c[0] + d[0]) / (12.0 * h),
                (-a[1] + 8.0 * b[1] - 8.0 * c[1] + d[1]) / (12.0 * h),
            ]
        });
        Self::new(point, deriv, t0, t1)
    }

    /// The graph `y = f(x)` traversed from `x0` to `x1`.
    pub fn graph(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x0: f64,
        x1: f64,
    ) -> Self {
        Self::new(
            Arc::new(move |x| [x, f(x)]),
            Arc::new(move |x| [1.0, df(x)]),
            x0,
            x1,
        )
    }
}

impl Segment for Parametric {
    fn point(&self, s: f64) -> [f64; 2] {
        (self.point)(self.t0 + s * (self.t1 - self.t0))
    }

    fn deriv(&self, s: f64) -> [f64; 2] {
        let d = (self.deriv)(self.t0 + s * (self.t1 - self.t0));
        let w = self.t1 - self.t0;
        [d[0] * w, d[1] * w]
    }
}

/// A closed counter-clockwise curve made of consecutive segments.
#[derive(Debug, Clone)]
pub struct PlanarCurve {
    segments: Vec<Arc<dyn Segment>>,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // split first so that periodic integrands are not mistaken for flat ones
    let pieces = 8;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            rec(f, x0, x1, f0, fm, f1, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Parameter position `u` in `[0, segments)`: segment `floor(u)`, local `fract(u)`.
#[derive(Debug, Clone, Copy)]
struct Event {
    lo: f64,
    hi: f64,
}

impl PlanarCurve {
    pub fn new(segments: Vec<Arc<dyn Segment>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter(
                "curve needs at least one segment".into(),
            ));
        }
        let scale = segments
            .iter()
            .map(|s| {
                let p = s.point(0.0);
                p[0].abs().max(p[1].abs())
            })
            .fold(1.0, f64::max);
        for i in 0..segments.len() {
            let end = segments[i].point(1.0);
            let next = segments[(i + 1) % segments.len()].point(0.0);
            if dist(end, next) > 1e-9 * scale {
                return Err(Error::InvalidParameter(format!(
                    "segment {i} ends at ({:.6}, {:.6}) but the next starts at ({:.6}, {:.6})",
                    end[0], end[1], next[0], next[1]
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn circle(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {r}"
            )));
        }
        Self::new(vec![Arc::new(CircleArc {
            center: [0.0, 0.0],
            radius: r,
            theta0: 0.0,
            theta1: 2.0 * PI,
        })])
    }

    /// Closed polygon through `points`.
    pub fn polyline(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter(
                "polyline needs at least 3 points".into(),
            ));
        }
        let segs: Vec<Arc<dyn Segment>> = (0..points.len())
            .map(|i| {
                Arc::new(Line {
                    a: points[i],
                    b: points[(i + 1) % points.len()],
                }) as Arc<dyn Segment>
            })
            .collect();
        Self::new(segs)
    }

    /// The star-shaped curve `r(theta) (cos theta, sin theta)`.
    pub fn radial(r: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let point: CurveFn = Arc::new(move |t| {
            let rr = r(t);
            [rr * t.cos(), rr * t.sin()]
        });
        for j in 0..64 {
            let t = j as f64 * PI / 32.0;
            let p = point(t);
            if !(p[0].is_finite() && p[1].is_finite()) || dist(p, [0.0, 0.0]) <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "radius function is not positive at {t}"
                )));
            }
        }
        Self::new(vec![Arc::new(Parametric::with_numeric_deriv(
            point,
            0.0,
            2.0 * PI,
        ))])
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    fn split(&self, u: f64) -> (usize, f64) {
        let n = self.segments.len() as f64;
        let u = u.rem_euclid(n);
        let i = (u.floor() as usize).min(self.segments.len() - 1);
        (i, u - i as f64)
    }

    /// Point at global parameter `u`, taken modulo the segment count.
    pub fn point(&self, u: f64) -> [f64; 2] {
        let (i, s) = self.split(u);
        self.segments[i].point(s)
    }

    /// Points along the curve, `per_segment` per piece (one per line).
    pub fn sample(&self, per_segment: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for seg in &self.segments {
            let m = if seg.sample_hint() == 1 {
                1
            } else {
                per_segment.max(1)
            };
            for j in 0..m {
                out.push(seg.point(j as f64 / m as f64));
            }
        }
        out
    }

    /// Polygonal approximation with `per_segment` vertices per smooth piece.
    pub fn resampled(&self, per_segment: usize) -> Result<Self> {
        Self::polyline(&self.sample(per_segment))
    }

    pub fn to_csv(&self, per_segment: usize) -> String {
        let mut out = String::from("q,p\n");
        for p in self.sample(per_segment) {
            out.push_str(&format!("{:.12e},{:.12e}\n", p[0], p[1]));
        }
        out
    }

    /// `1/2 int (q p' - p q')` over `[ua, ub]` in global parameter, `ua <= ub`.
    fn green(&self, ua: f64, ub: f64) -> f64 {
        let mut total = 0.0;
        let mut u = ua;
        while u < ub - 1e-15 {
            let seg_end = u.floor() + 1.0;
            let stop = seg_end.min(ub);
            let (i, s0) = self.split(u);
            let s1 = s0 + (stop - u);
            let seg = &self.segments[i];
            let f = |s: f64| {
                let p = seg.point(s);
                let d = seg.deriv(s);
                0.5 * cross(p, d)
            };
            total += if seg.sample_hint() == 1 {
                (s1 - s0) * f(0.5 * (s0 + s1))
            } else {
                adaptive_simpson(&f, s0, s1, 1e-13)
            };
            u = stop;
        }
        total
    }

    /// Enclosed area.
    pub fn area(&self) -> f64 {
        self.green(0.0, self.segments.len() as f64)
    }

    /// Winding number about the origin, from sampled polar angles.
    pub fn winding_number(&self) -> i64 {
        let pts = self.sample(512);
        let mut total = 0.0;
        for i in 0..pts.len() {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            total += cross(a, b).atan2(a[0] * b[0] + a[1] * b[1]);
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// Ray test: every ray from the origin at the `rays` angles `(j + 1/2) 2 pi / rays`
    /// meets the curve exactly once.
    pub fn is_star_shaped(&self, rays: usize) -> bool {
        let pts = self.sample(512);
        (0..rays).all(|j| {
            let theta = (j as f64 + 0.5) * 2.0 * PI / rays as f64;
            let d = [theta.cos(), theta.sin()];
            let hits = (0..pts.len())
                .filter(|&i| {
                    let (p, q) = (pts[i], pts[(i + 1) % pts.len()]);
                    let e = [q[0] - p[0], q[1] - p[1]];
                    let denom = cross(d, e);
                    if denom == 0.0 {
                        return false;
                    }
                    let t = cross(p, e) / denom;
                    let lambda = cross(p, d) / denom;
                    t > 0.0 && (0.0..1.0).contains(&lambda)
                })
                .count();
            hits == 1
        })
    }

    /// Meetings with the `q` axis: maximal runs of samples with `|p| <= tol`
    /// and bisected sign changes, in cyclic order.
    fn axis_events(&self, tol: f64) -> Result<Vec<Event>> {
        let mut us = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let m = seg.sample_hint().max(1);
            for j in 0..m {
                us.push(i as f64 + j as f64 / m as f64);
            }
        }
        let sign = |u: f64| {
            let p = self.point(u)[1];
            if p.abs() <= tol {
                0
            } else if p > 0.0 {
                1
            } else {
                -1
            }
        };
        let signs: Vec<i32> = us.iter().map(|&u| sign(u)).collect();
        let len = us.len();
        let Some(start) = signs.iter().position(|s| *s != 0) else {
            return Err(Error::InvalidParameter("curve lies on the q axis".into()));
        };
        let total = self.segments.len() as f64;
        // unwrap positions so that the scan starting at `start` is increasing
        let at = |j: usize| -> (f64, i32) {
            let idx = (start + j) % len;
            let u = if start + j >= len {
                us[idx] + total
            } else {
                us[idx]
            };
            (u, signs[idx])
        };
        let mut events = Vec::new();
        let mut j = 0;
        while j < len {
            let (u0, s0) = at(j);
            let (u1, s1) = at(j + 1);
            if s1 == 0 {
                let mut e = j + 1;
                while at(e).1 == 0 {
                    e += 1;
                }
                let (_, after) = at(e);
                if after == s0 {
                    let q = self.point(at(j + 1).0)[0];
                    return Err(Error::TangentialCrossing { q });
                }
                events.push(Event {
                    lo: at(j + 1).0,
                    hi: at(e - 1).0,
                });
                j = e;
                continue;
            }
            if s1 != s0 {
                let (mut a, mut b) = (u0, u1);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if (self.point(m)[1] > 0.0) == (s0 > 0) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let m = 0.5 * (a + b);
                events.push(Event { lo: m, hi: m });
            }
            j += 1;
        }
        Ok(events)
    }
}

/// Positive actions up to `bound` of the arcs cut out by the `q` axis.
pub fn planar_chord_actions(curve: &PlanarCurve, bound: f64) -> Result<Spectrum> {
    if !(bound > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound must be positive, got {bound}"
        )));
    }
    let scale = curve
        .sample(64)
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max);
    let events = curve.axis_events(1e-12 * scale)?;
    if events.len() < 2 {
        return Ok(Spectrum::default());
    }
    let mut entries = Vec::new();
    for i in 0..events.len() {
        let from = events[i].hi;
        let mut to = events[(i + 1) % events.len()].lo;
        if i + 1 == events.len() {
            to += curve.segment_count() as f64;
        }
        let action = curve.green(from, to);
        if action > 0.0 && action <= bound {
            let (a, b) = (curve.point(from)[0], curve.point(to)[0]);
            entries.push(SpectrumEntry {
                action,
                label: format!("arc q={b:.6} -> q={a:.6}"),
                multiplicity: 1,
            });
        }
    }
    Ok(Spectrum::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_has_two_half_discs() {
        let c = PlanarCurve::circle(1.0).unwrap();
        let s = planar_chord_actions(&c, 10.0).unwrap();
        assert_eq!(s.len(), 2);
        for a in s.actions() {
            assert!((a - PI / 2.0).abs() < 1e-10, "{a}");
        }
    }

    #[test]
    fn square_polyline() {
        let sq = PlanarCurve::polyline(&[
            [1.0, 0.0],
            [1.0, 1.0],
            [-1.0, 1.0],
            [-1.0, -2.0],
            [1.0, -2.0],
        ])
        .unwrap();
        let s = planar_chord_actions(&sq, 10.0).unwrap();
        let a = s.actions();
        assert_eq!(a.len(), 2);
        assert!(
            (a[0] - 2.0).abs() < 1e-12 && (a[1] - 4.0).abs() < 1e-12,
            "{a:?}"
        );
        assert!((sq.area() - 6.0).abs() < 1e-12);
        assert!(sq.is_star_shaped(360));
    }

    #[test]
    fn tangency_is_reported() {
        let c = PlanarCurve::new(vec![Arc::new(CircleArc {
            center: [0.0, 1.0],
            radius: 1.0,
            theta0: -PI / 2.0,
            theta1: 1.5 * PI,
        })])
        .unwrap();
        assert!(matches!(
            planar_chord_actions(&c, 10.0),
            Err(Error::TangentialCrossing { .. })
        ));
    }

    #[test]
    fn discontinuous_curve_rejected() {
        let segs: Vec<Arc<dyn Segment>> = vec![Arc::new(Line {
            a: [0.0, 0.0],
            b: [1.0, 0.0],
        })];
        assert!(PlanarCurve::new(segs).is_err());
    }
}
