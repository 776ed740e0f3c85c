//! Minimum enclosing circle.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Circle, Point2};

/// Default relative inflation applied to the minimum enclosing circle.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Plain center/radius pair; unlike [`Circle`] it allows radius 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    fn covers(&self, p: Point2) -> bool {
        p.distance(self.center) <= self.radius * (1.0 + 1e-12) + 1e-12
    }

    fn diametral(a: Point2, b: Point2) -> Disc {
        Disc {
            center: a.lerp(b, 0.5),
            radius: 0.5 * a.distance(b),
        }
    }

    /// Circle through `a`, `b`, `c`; for (near-)collinear triples, the
    /// diameter disc of the farthest pair.
    fn through_three(a: Point2, b: Point2, c: Point2) -> Disc {
        let (ab, ac) = (b - a, c - a);
        let d = 2.0 * ab.cross(ac);
        let scale = ab.norm_sq().max(ac.norm_sq());
        if d.abs() > 1e-14 * scale {
            let (l1, l2) = (ab.norm_sq(), ac.norm_sq());
            let off = Point2::new(ac.y * l1 - ab.y * l2, ab.x * l2 - ac.x * l1) * (1.0 / d);
            return Disc {
                center: a + off,
                radius: off.norm(),
            };
        }
        [
            Disc::diametral(a, b),
            Disc::diametral(a, c),
            Disc::diametral(b, c),
        ]
        .into_iter()
        .max_by(|x, y| x.radius.total_cmp(&y.radius))
        .expect("three candidates")
    }
}

/// Smallest disc containing every point, by randomized incremental
/// construction on a fixed shuffle.
pub fn minimum_enclosing_disc(points: &[Point2]) -> Option<Disc> {
    let mut p = points.to_vec();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed_c1c1e));
    let first = *p.first()?;
    let mut d = Disc {
        center: first,
        radius: 0.0,
    };
    for i in 1..p.len() {
        if d.covers(p[i]) {
            continue;
        }
        d = Disc {
            center: p[i],
            radius: 0.0,
        };
        for j in 0..i {
            if d.covers(p[j]) {
                continue;
            }
            d = Disc::diametral(p[i], p[j]);
            for k in 0..j {
                if !d.covers(p[k]) {
                    d = Disc::through_three(p[i], p[j], p[k]);
                }
            }
        }
    }
    Some(d)
}

/// Minimum enclosing circle inflated by `(1 + margin)`, so every input point
/// is strictly interior.
pub fn enclosing_circle(points: &[Point2], margin: f64) -> Result<Circle> {
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::param(
            "margin",
            format!("must be positive, got {margin}"),
        ));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let d = minimum_enclosing_disc(points).ok_or(Error::TooFewAgents {
        required: 1,
        got: 0,
    })?;
    Circle::new(d.center, d.radius * (1.0 + margin))
}
