//! Chords found by integrating the characteristic flow `z' = J grad H(z)`.

use serde::{Deserialize, Serialize};

use super::{check_radii, Spectrum, SpectrumEntry};
use crate::body::Body;
use crate::error::{Error, Result};
use crate::symplectic::{apply_j_into, dist_to_rnk, leaf_residual, CoisoIndex, PhasePoint};

/// Largest accepted endpoint defect of a shot chord.
pub const SHOOTING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotChord {
    /// Return time, equal to the action since `H = 1` along the orbit.
    pub action: f64,
    pub residual: f64,
    pub end: PhasePoint,
}

fn field(body: &Body, z: &[f64], out: &mut [f64]) {
    let mut g = vec![0.0; z.len()];
    body.grad_hamiltonian_into(z, &mut g);
    apply_j_into(&g, out);
}

fn rk4(body: &Body, z: &[f64], h: f64) -> Vec<f64> {
    let d = z.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    field(body, z, &mut k1);
    let y: Vec<f64> = (0..d).map(|i| z[i] + 0.5 * h * k1[i]).collect();
    field(body, &y, &mut k2);
    let y: Vec<f64> = (0..d).map(|i| z[i] + 0.5 * h * k2[i]).collect();
    field(body, &y, &mut k3);
    let y: Vec<f64> = (0..d).map(|i| z[i] + h * k3[i]).collect();
    field(body, &y, &mut k4);
    (0..d)
        .map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Flows `z` forward by `t` in steps no longer than `dt`.
fn flow(body: &Body, z: &[f64], t: f64, dt: f64) -> Vec<f64> {
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut y = z.to_vec();
    for _ in 0..steps {
        y = rk4(body, &y, h);
    }
    y
}

/// All return times up to `bound` at which the orbit through `start` meets the
/// leaf of `start` again, refined by golden-section search.
pub fn shoot_chords(
    body: &Body,
    idx: CoisoIndex,
    start: &[f64],
    bound: f64,
    dt: f64,
) -> Result<Vec<ShotChord>> {
    if start.len() != idx.dim() || body.n() != idx.n() {
        return Err(Error::DimensionMismatch {
            expected: idx.dim(),
            got: start.len(),
        });
    }
    if dist_to_rnk(start, idx) > 1e-12 {
        return Err(Error::InvalidParameter(
            "start point must lie in R^{n,k}".into(),
        ));
    }
    let h0 = body.hamiltonian(start);
    if (h0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "start point must lie on the boundary, gauge^2 = {h0}"
        )));
    }
    if !(dt > 0.0 && bound > 0.0) {
        return Err(Error::InvalidParameter(
            "step and bound must be positive".into(),
        ));
    }
    let res = |z: &[f64]| leaf_residual(start, z, idx);
    let steps = (bound / dt).ceil() as usize + 1;
    let mut states = vec![start.to_vec()];
    for _ in 0..steps {
        let next = rk4(body, states.last().expect("nonempty"), dt);
        states.push(next);
    }
    let r: Vec<f64> = states.iter().map(|z| res(z)).collect();
    let mut out = Vec::new();
    for j in 2..states.len() - 1 {
        if !(r[j] < r[j - 1] && r[j] <= r[j + 1]) {
            continue;
        }
        // golden-section search for the minimum on [t_{j-1}, t_{j+1}]
        let base = &states[j - 1];
        let at = |s: f64| flow(body, base, s, dt);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (0.0, 2.0 * dt);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (res(&at(c)), res(&at(d)));
        while b - a > 1e-13 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = res(&at(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = res(&at(d));
            }
        }
        let s = 0.5 * (a + b);
        let end = at(s);
        let residual = res(&end);
        let t = (j - 1) as f64 * dt + s;
        if residual <= SHOOTING_TOL && t <= bound {
            out.push(ShotChord {
                action: t * h0,
                residual,
                end: PhasePoint::new(end)?,
            });
        }
    }
    Ok(out)
}

/// Shoots from the vertex `r_i e_{q_i}` of every plane of a diagonal ellipsoid.
pub fn shoot_ellipsoid_spectrum(
    radii: &[f64],
    idx: CoisoIndex,
    bound: f64,
    dt: f64,
) -> Result<Spectrum> {
    check_radii(radii, idx)?;
    let body = Body::ellipsoid(radii)?;
    let mut entries = Vec::new();
    for (i, r) in radii.iter().enumerate() {
        let mut z = vec![0.0; idx.dim()];
        z[i] = *r;
        for shot in shoot_chords(&body, idx, &z, bound, dt)? {
            entries.push(SpectrumEntry {
                action: shot.action,
                label: format!("plane {} shot, residual {:.1e}", i + 1, shot.residual),
                multiplicity: 1,
            });
        }
    }
    Ok(Spectrum::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_returns() {
        let ball = Body::ball(1, 1.0).unwrap();
        let half = shoot_chords(
            &ball,
            CoisoIndex::new(1, 0).unwrap(),
            &[1.0, 0.0],
            4.0,
            1e-3,
        )
        .unwrap();
        let t: Vec<f64> = half.iter().map(|s| s.action).collect();
        assert_eq!(t.len(), 2);
        assert!((t[0] - PI / 2.0).abs() < 1e-8 && (t[1] - PI).abs() < 1e-8);
        let full = shoot_chords(
            &ball,
            CoisoIndex::new(1, 1).unwrap(),
            &[1.0, 0.0],
            4.0,
            1e-3,
        )
        .unwrap();
        assert_eq!(full.len(), 1);
        assert!((full[0].action - PI).abs() < 1e-8);
    }

    #[test]
    fn start_must_be_admissible() {
        let ball = Body::ball(1, 1.0).unwrap();
        let idx = CoisoIndex::new(1, 0).unwrap();
        assert!(shoot_chords(&ball, idx, &[0.0, 1.0], 4.0, 1e-3).is_err());
        assert!(shoot_chords(&ball, idx, &[0.5, 0.0], 4.0, 1e-3).is_err());
    }
}
