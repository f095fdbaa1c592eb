//! The unit flat torus `R^2 / Z^2`: points, distance, ball areas and sampling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Injectivity radius of the unit square torus.
pub const INJECTIVITY_RADIUS: f64 = 0.5;
/// Area constant: `area(B(p, r)) = KAPPA * r^2` below the injectivity radius.
pub const KAPPA: f64 = PI;
/// Total area of the torus.
pub const TOTAL_AREA: f64 = 1.0;

/// Reduce a real coordinate into `[0, 1)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    // x.floor() can round so that r == 1.0 for tiny negative x
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed minimal representative of a coordinate difference, in `[-1/2, 1/2]`.
#[inline]
pub fn wrap_delta(d: f64) -> f64 {
    d - d.round()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

impl From<[f64; 2]> for TorusPoint {
    fn from(v: [f64; 2]) -> Self {
        TorusPoint::new(v[0], v[1])
    }
}

impl From<TorusPoint> for [f64; 2] {
    fn from(p: TorusPoint) -> Self {
        [p.x, p.y]
    }
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x: wrap(x), y: wrap(y) }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Translate by a vector in the universal cover.
    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    /// Minimal-image displacement `q - self`, components in `[-1/2, 1/2]`.
    pub fn delta_to(&self, q: &TorusPoint) -> (f64, f64) {
        (wrap_delta(q.x - self.x), wrap_delta(q.y - self.y))
    }

    pub fn distance(&self, q: &TorusPoint) -> f64 {
        torus_distance(self, q)
    }
}

/// Flat distance: the minimum Euclidean length over the 9 integer translates
/// of the difference vector.
pub fn torus_distance(p: &TorusPoint, q: &TorusPoint) -> f64 {
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let ex = dx + i as f64;
            let ey = dy + j as f64;
            let d2 = ex * ex + ey * ey;
            if d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt()
}

/// Area of a metric ball of radius `r <= 1/2`.
pub fn ball_area(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {r} is negative")));
    }
    if r > INJECTIVITY_RADIUS {
        return Err(Error::OutOfInjectivityRadius(r));
    }
    Ok(KAPPA * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// The `m x m` lattice `{(i/m, j/m)}`.
    Grid(usize),
    /// Uniform random points from a seeded generator.
    Random { count: usize, seed: u64 },
    /// Lattice cells of size `1/m`, one uniform point per cell.
    JitteredGrid { m: usize, seed: u64 },
}

pub fn sample_points(mode: SampleMode) -> Result<Vec<TorusPoint>> {
    match mode {
        SampleMode::Grid(m) => {
            if m == 0 {
                return Err(Error::EmptyRequest);
            }
            let step = 1.0 / m as f64;
            Ok((0..m)
                .flat_map(|i| (0..m).map(move |j| TorusPoint::new(i as f64 * step, j as f64 * step)))
                .collect())
        }
        SampleMode::Random { count, seed } => {
            if count == 0 {
                return Err(Error::EmptyRequest);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| TorusPoint::new(rng.gen::<f64>(), rng.gen::<f64>()))
                .collect())
        }
        SampleMode::JitteredGrid { m, seed } => {
            if m == 0 {
                return Err(Error::EmptyRequest);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let step = 1.0 / m as f64;
            let mut out = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    let u: f64 = rng.gen();
                    let v: f64 = rng.gen();
                    out.push(TorusPoint::new((i as f64 + u) * step, (j as f64 + v) * step));
                }
            }
            Ok(out)
        }
    }
}

/// Midpoint-rule nodes: cell centers of the `m x m` lattice.
pub fn midpoint_nodes(m: usize) -> Result<Vec<TorusPoint>> {
    if m == 0 {
        return Err(Error::EmptyRequest);
    }
    let step = 1.0 / m as f64;
    Ok((0..m)
        .flat_map(|i| {
            (0..m).map(move |j| TorusPoint::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step))
        })
        .collect())
}
