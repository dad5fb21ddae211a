//! Truncated Fourier model of the loop space with leafwise boundary conditions.
//!
//! A loop on `[0, 1]` is
//!
//! ```text
//! x(t) = sum_{|m| <= M} exp(m pi t J) a_m + sum_{|m| <= M} exp(2 m pi t J) b_m,
//!        a_m in V0,  b_m in V1,
//! ```
//!
//! with `exp(theta J) = cos(theta) I + sin(theta) J`. Every such loop starts and
//! ends in `R^{n,k}` with `x(1) - x(0) in V0`. The half-norm weights are `|m|`
//! on the `a` modes and `|2m|` on the `b` modes, and the action is
//! `(pi / 2) * sum_m m (|a_m|^2 + 2 |b_m|^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{apply_j_into, CoisoIndex, PhasePoint};

/// Default truncation order.
pub const DEFAULT_MODES: usize = 24;

/// A loop stored through its `V0` and `V1` coordinates only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LoopJson", into = "LoopJson")]
pub struct FourierLoop {
    idx: CoisoIndex,
    modes: usize,
    /// `a[m + M]` holds the `V0` coordinates `q_{k+1}..q_n` of `a_m`.
    a: Vec<Vec<f64>>,
    /// `b[m + M]` holds the `V1` coordinates `q_1..q_k, p_1..p_k` of `b_m`.
    b: Vec<Vec<f64>>,
}

/// Planar rotation `exp(theta J)` applied to a full phase vector.
pub fn rotate(theta: f64, x: &[f64]) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let mut jx = vec![0.0; x.len()];
    apply_j_into(x, &mut jx);
    x.iter().zip(&jx).map(|(a, b)| c * a + s * b).collect()
}

impl FourierLoop {
    pub fn zeros(idx: CoisoIndex, modes: usize) -> Self {
        let len = 2 * modes + 1;
        Self {
            idx,
            modes,
            a: vec![vec![0.0; idx.dim_v0()]; len],
            b: vec![vec![0.0; idx.dim_v1()]; len],
        }
    }

    pub fn idx(&self) -> CoisoIndex {
        self.idx
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    fn slot(&self, m: i64) -> Result<usize> {
        let mm = self.modes as i64;
        if m < -mm || m > mm {
            return Err(Error::InvalidParameter(format!(
                "mode {m} outside truncation order {mm}"
            )));
        }
        Ok((m + mm) as usize)
    }

    /// Sets `a_m`; `v` must lie in `V0`.
    pub fn set_a(&mut self, m: i64, v: &[f64]) -> Result<()> {
        let s = self.slot(m)?;
        self.a[s] = self.compress(v, true)?;
        Ok(())
    }

    /// Sets `b_m`; `v` must lie in `V1`.
    pub fn set_b(&mut self, m: i64, v: &[f64]) -> Result<()> {
        let s = self.slot(m)?;
        self.b[s] = self.compress(v, false)?;
        Ok(())
    }

    pub fn a(&self, m: i64) -> PhasePoint {
        let s = self.slot(m).expect("mode in range");
        self.expand(&self.a[s], true)
    }

    pub fn b(&self, m: i64) -> PhasePoint {
        let s = self.slot(m).expect("mode in range");
        self.expand(&self.b[s], false)
    }

    fn compress(&self, v: &[f64], is_a: bool) -> Result<Vec<f64>> {
        let idx = self.idx;
        if v.len() != idx.dim() {
            return Err(Error::DimensionMismatch {
                expected: idx.dim(),
                got: v.len(),
            });
        }
        let slots: Vec<usize> = if is_a {
            idx.v0_slots().collect()
        } else {
            idx.v1_slots().collect()
        };
        let stray = v
            .iter()
            .enumerate()
            .filter(|(i, _)| !slots.contains(i))
            .map(|(_, x)| x.abs())
            .fold(0.0, f64::max);
        if stray > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{} coefficient has a component of size {stray:.3e} outside {}",
                if is_a { "a" } else { "b" },
                if is_a { "V0" } else { "V1" }
            )));
        }
        Ok(slots.iter().map(|&i| v[i]).collect())
    }

    fn expand(&self, c: &[f64], is_a: bool) -> PhasePoint {
        let mut out = PhasePoint::zeros(self.idx.n());
        if is_a {
            for (x, i) in c.iter().zip(self.idx.v0_slots()) {
                out[i] = *x;
            }
        } else {
            for (x, i) in c.iter().zip(self.idx.v1_slots()) {
                out[i] = *x;
            }
        }
        out
    }

    fn mode_range(&self) -> impl Iterator<Item = i64> {
        let mm = self.modes as i64;
        -mm..=mm
    }

    /// `x(t)`.
    pub fn evaluate(&self, t: f64) -> PhasePoint {
        let mut out = vec![0.0; self.idx.dim()];
        for m in self.mode_range() {
            let s = (m + self.modes as i64) as usize;
            if self.a[s].iter().any(|x| *x != 0.0) {
                let r = rotate(m as f64 * PI * t, &self.a(m));
                out.iter_mut().zip(&r).for_each(|(o, x)| *o += x);
            }
            if self.b[s].iter().any(|x| *x != 0.0) {
                let r = rotate(2.0 * m as f64 * PI * t, &self.b(m));
                out.iter_mut().zip(&r).for_each(|(o, x)| *o += x);
            }
        }
        PhasePoint::new(out).expect("even dimension")
    }

    /// `dx/dt`, differentiated term by term.
    pub fn velocity(&self, t: f64) -> PhasePoint {
        let mut out = vec![0.0; self.idx.dim()];
        let mut j = vec![0.0; self.idx.dim()];
        for m in self.mode_range() {
            let s = (m + self.modes as i64) as usize;
            for (freq, coeffs, is_a) in [
                (m as f64 * PI, &self.a[s], true),
                (2.0 * m as f64 * PI, &self.b[s], false),
            ] {
                if freq == 0.0 || coeffs.iter().all(|x| *x == 0.0) {
                    continue;
                }
                let r = rotate(freq * t, &self.expand(coeffs, is_a));
                apply_j_into(&r, &mut j);
                out.iter_mut().zip(&j).for_each(|(o, x)| *o += freq * x);
            }
        }
        PhasePoint::new(out).expect("even dimension")
    }

    /// Closed-form action `(pi/2) sum_m m (|a_m|^2 + 2 |b_m|^2)`.
    pub fn action(&self) -> f64 {
        let (plus, _, minus) = self.h_half_split_sq();
        0.5 * (plus - minus)
    }

    fn h_half_split_sq(&self) -> (f64, f64, f64) {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let (mut plus, mut minus) = (0.0, 0.0);
        for m in self.mode_range() {
            if m == 0 {
                continue;
            }
            let s = (m + self.modes as i64) as usize;
            let w = PI * m.unsigned_abs() as f64 * (sq(&self.a[s]) + 2.0 * sq(&self.b[s]));
            if m > 0 {
                plus += w;
            } else {
                minus += w;
            }
        }
        let s0 = self.modes;
        (plus, sq(&self.a[s0]) + sq(&self.b[s0]), minus)
    }

    /// Norms of the projections onto `E+`, `E0` and `E-`.
    pub fn h_half_split(&self) -> (f64, f64, f64) {
        let (p, z, m) = self.h_half_split_sq();
        (p.sqrt(), z.sqrt(), m.sqrt())
    }

    /// Drops the constant part `a_0 + b_0`.
    pub fn zero_mean_gauge(&self) -> Self {
        let mut out = self.clone();
        let s0 = self.modes;
        out.a[s0].iter_mut().for_each(|x| *x = 0.0);
        out.b[s0].iter_mut().for_each(|x| *x = 0.0);
        out
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for v in out.a.iter_mut().chain(out.b.iter_mut()) {
            v.iter_mut().for_each(|x| *x *= lambda);
        }
        out
    }

    /// Number of entries of [`Self::coeffs`].
    pub fn coeff_len(idx: CoisoIndex, modes: usize) -> usize {
        2 * modes * (idx.dim_v0() + idx.dim_v1())
    }

    /// Flattened non-constant coefficients: for `m = -M..=M`, `m != 0`, the
    /// `a_m` block followed by the `b_m` block.
    pub fn coeffs(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::coeff_len(self.idx, self.modes));
        for m in self.mode_range() {
            if m == 0 {
                continue;
            }
            let s = (m + self.modes as i64) as usize;
            out.extend_from_slice(&self.a[s]);
            out.extend_from_slice(&self.b[s]);
        }
        out
    }

    /// Inverse of [`Self::coeffs`] with zero constant part.
    pub fn from_coeffs(idx: CoisoIndex, modes: usize, c: &[f64]) -> Result<Self> {
        let want = Self::coeff_len(idx, modes);
        if c.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                got: c.len(),
            });
        }
        let mut out = Self::zeros(idx, modes);
        let (da, db) = (idx.dim_v0(), idx.dim_v1());
        let mut pos = 0;
        for m in -(modes as i64)..=(modes as i64) {
            if m == 0 {
                continue;
            }
            let s = (m + modes as i64) as usize;
            out.a[s].copy_from_slice(&c[pos..pos + da]);
            pos += da;
            out.b[s].copy_from_slice(&c[pos..pos + db]);
            pos += db;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("loop serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Wire format: full phase vectors for every mode `-M..=M`.
#[derive(Serialize, Deserialize)]
struct LoopJson {
    n: usize,
    k: usize,
    modes: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl From<FourierLoop> for LoopJson {
    fn from(l: FourierLoop) -> Self {
        let range: Vec<i64> = l.mode_range().collect();
        LoopJson {
            n: l.idx.n(),
            k: l.idx.k(),
            modes: l.modes,
            a: range.iter().map(|&m| l.a(m).into_vec()).collect(),
            b: range.iter().map(|&m| l.b(m).into_vec()).collect(),
        }
    }
}

impl TryFrom<LoopJson> for FourierLoop {
    type Error = Error;

    fn try_from(j: LoopJson) -> Result<Self> {
        let idx = CoisoIndex::new(j.n, j.k)?;
        let len = 2 * j.modes + 1;
        if j.a.len() != len || j.b.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: j.a.len().min(j.b.len()),
            });
        }
        let mut out = FourierLoop::zeros(idx, j.modes);
        for (i, m) in (-(j.modes as i64)..=(j.modes as i64)).enumerate() {
            out.set_a(m, &j.a[i])?;
            out.set_b(m, &j.b[i])?;
        }
        Ok(out)
    }
}
