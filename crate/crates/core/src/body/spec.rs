//! JSON description of convex bodies.
//!
//! ```json
//! {"type": "ball", "r": 1.0}
//! {"type": "ball", "r": 1.0, "n": 2}
//! {"type": "ellipsoid", "radii": [1.0, 2.0]}
//! {"type": "ellipsoid", "q": [[...], ...]}
//! {"type": "lp_ball", "p": 4, "radii": [1.0, 1.0]}
//! {"type": "product", "factors": [{"type": "ball", "r": 1.0}, {"type": "ball", "r": 1.2}]}
//! {"type": "translate", "shift": [0.5, 0.0, 0.0, 0.0], "base": {"type": "ball", "r": 1.0}}
//! ```
//!
//! Ellipsoid and lp radii are given per symplectic plane `(q_i, p_i)`, so a
//! radii list of length `n` describes a body in `R^{2n}`. A ball without an
//! explicit `n` takes the dimension of its context: the session dimension at
//! the top level, a disc (`n = 1`) inside a product.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Body;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Ball {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Ellipsoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radii: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<Vec<f64>>>,
    },
    LpBall {
        p: f64,
        radii: Vec<f64>,
    },
    Product {
        factors: Vec<BodySpec>,
    },
    Translate {
        shift: Vec<f64>,
        base: Box<BodySpec>,
    },
}

impl BodySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidBody(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("body spec serializes")
    }

    /// Half-dimension fixed by the description itself, if any.
    pub fn intrinsic_n(&self) -> Option<usize> {
        match self {
            BodySpec::Ball { n, .. } => *n,
            BodySpec::Ellipsoid { radii, q } => match (radii, q) {
                (Some(r), _) => Some(r.len()),
                (None, Some(q)) => Some(q.len() / 2),
                _ => None,
            },
            BodySpec::LpBall { radii, .. } => Some(radii.len()),
            BodySpec::Product { factors } => {
                Some(factors.iter().map(|f| f.intrinsic_n().unwrap_or(1)).sum())
            }
            BodySpec::Translate { shift, base } => base.intrinsic_n().or(Some(shift.len() / 2)),
        }
    }

    /// Builds a body in `R^{2n}`.
    pub fn build(&self, n: usize) -> Result<Body> {
        if let Some(m) = self.intrinsic_n() {
            if m != n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: 2 * m,
                });
            }
        }
        self.build_inner(n)
    }

    /// Builds a body using only the description's own dimension.
    pub fn build_standalone(&self) -> Result<Body> {
        let n = self
            .intrinsic_n()
            .ok_or_else(|| Error::InvalidBody("ball without an explicit dimension \"n\"".into()))?;
        self.build_inner(n)
    }

    fn build_inner(&self, n: usize) -> Result<Body> {
        match self {
            BodySpec::Ball { r, .. } => Body::ball(n, *r),
            BodySpec::Ellipsoid { radii, q } => match (radii, q) {
                (Some(r), None) => Body::ellipsoid(r),
                (None, Some(rows)) => {
                    let d = rows.len();
                    if rows.iter().any(|row| row.len() != d) {
                        return Err(Error::InvalidBody("ellipsoid matrix must be square".into()));
                    }
                    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                    Body::ellipsoid_matrix(DMatrix::from_row_slice(d, d, &flat))
                }
                _ => Err(Error::InvalidBody(
                    "ellipsoid needs exactly one of \"radii\" or \"q\"".into(),
                )),
            },
            BodySpec::LpBall { p, radii } => Body::lp_ball(*p, radii),
            BodySpec::Product { factors } => {
                let built = factors
                    .iter()
                    .map(|f| f.build_inner(f.intrinsic_n().unwrap_or(1)))
                    .collect::<Result<Vec<_>>>()?;
                Body::product(built)
            }
            BodySpec::Translate { shift, base } => Body::translate(base.build_inner(n)?, shift),
        }
    }
}
