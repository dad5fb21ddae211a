//! Closed-form and semi-analytic chord spectra.

mod planar;
mod shooting;
mod wdomain;

pub use planar::{planar_chord_actions, CircleArc, Line, Parametric, PlanarCurve, Segment};
pub use shooting::{shoot_chords, shoot_ellipsoid_spectrum, ShotChord};
pub use wdomain::{w_domain_curve, WDomain};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::CoisoIndex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub action: f64,
    pub label: String,
    /// Number of geometrically distinct chords expected with this label.
    pub multiplicity: usize,
}

/// Positive chord actions, sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Sorts the entries and drops non-positive actions.
    pub fn new(mut entries: Vec<SpectrumEntry>) -> Self {
        entries.retain(|e| e.action > 0.0 && e.action.is_finite());
        entries.sort_by(|a, b| a.action.total_cmp(&b.action));
        Self { entries }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn actions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.action).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.entries.first().map(|e| e.action)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }

    /// CSV with columns `action,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("action,label\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{:.11e},\"{}\"\n",
                e.action,
                e.label.replace('"', "'")
            ));
        }
        out
    }
}

fn check_radii(radii: &[f64], idx: CoisoIndex) -> Result<()> {
    if radii.len() != idx.n() {
        return Err(Error::DimensionMismatch {
            expected: idx.n(),
            got: radii.len(),
        });
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidBody(format!(
            "radius must be positive, got {r}"
        )));
    }
    Ok(())
}

/// Planar chord actions of the ellipsoid with per-plane radii, up to `bound`.
///
/// Planes `i <= k` carry closed orbits of action `m pi r_i^2`; planes `i > k`
/// carry half-turns from the `q_i` axis back to it, of action `m pi r_i^2 / 2`.
pub fn ellipsoid_spectrum(radii: &[f64], idx: CoisoIndex, bound: f64) -> Result<Spectrum> {
    check_radii(radii, idx)?;
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound must be positive, got {bound}"
        )));
    }
    let mut entries = Vec::new();
    for (i, r) in radii.iter().enumerate() {
        let full = i < idx.k();
        let unit = if full { PI * r * r } else { PI * r * r / 2.0 };
        let mut m = 1usize;
        while m as f64 * unit <= bound * (1.0 + 1e-12) {
            entries.push(SpectrumEntry {
                action: m as f64 * unit,
                label: format!(
                    "plane {} {} x{m}",
                    i + 1,
                    if full { "full turn" } else { "half turn" }
                ),
                multiplicity: if full { 1 } else { 2 },
            });
            m += 1;
        }
    }
    Ok(Spectrum::new(entries))
}

/// `min(min_{i<=k} pi r_i^2, min_{i>k} pi r_i^2 / 2)`.
pub fn ellipsoid_min_action(radii: &[f64], idx: CoisoIndex) -> Result<f64> {
    check_radii(radii, idx)?;
    Ok(radii
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if i < idx.k() {
                PI * r * r
            } else {
                PI * r * r / 2.0
            }
        })
        .fold(f64::INFINITY, f64::min))
}
