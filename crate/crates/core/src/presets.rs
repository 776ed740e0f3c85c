//! Built-in agent configurations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Circle, Point2};

/// Circle used with the nested-hexagon configuration.
pub const HEXAGON_CIRCLE_RADIUS: f64 = 9.4;

/// Rejections allowed before a packing is declared infeasible.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// `count` points equally spaced by arc length along a regular hexagon of
/// side `side` about the origin, starting at its rightmost vertex and going
/// counterclockwise.
pub fn hexagon_perimeter(side: f64, count: usize) -> Vec<Point2> {
    let vertex = |k: usize| Point2::unit(k as f64 * std::f64::consts::FRAC_PI_3) * side;
    let step = 6.0 * side / count as f64;
    (0..count)
        .map(|i| {
            let s = i as f64 * step / side;
            let edge = (s.floor() as usize).min(5);
            vertex(edge).lerp(vertex((edge + 1) % 6), s - edge as f64)
        })
        .collect()
}

/// 54 agents: 24 on each of two nested hexagons (sides 8 and 6) and 6 on a
/// horizontal segment through the center, with the circle they form on.
pub fn hexagon_example() -> (Vec<Point2>, Circle) {
    let mut p = hexagon_perimeter(8.0, 24);
    p.extend(hexagon_perimeter(6.0, 24));
    p.extend((0..6).map(|k| Point2::new(-2.9 + k as f64 * 5.8 / 5.0, 0.0)));
    let circle = Circle::new(Point2::ORIGIN, HEXAGON_CIRCLE_RADIUS).expect("positive radius");
    (p, circle)
}

/// Where random agents are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Disc of the given radius about the origin.
    #[default]
    Disc,
    /// Axis-aligned square of half-width equal to the radius.
    Square,
}

fn draw<R: Rng>(region: Region, r: f64, rng: &mut R) -> Point2 {
    match region {
        Region::Disc => {
            let rho = r * rng.random::<f64>().sqrt();
            Point2::unit(rng.random_range(0.0..std::f64::consts::TAU)) * rho
        }
        Region::Square => Point2::new(rng.random_range(-r..r), rng.random_range(-r..r)),
    }
}

/// `n` uniform points in `region`, pairwise at least `min_separation` apart.
///
/// Each point is redrawn until it clears all earlier ones.
pub fn random_positions<R: Rng>(
    n: usize,
    radius: f64,
    min_separation: f64,
    region: Region,
    rng: &mut R,
) -> Result<Vec<Point2>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::param(
            "r_c",
            format!("must be positive, got {radius}"),
        ));
    }
    if !(min_separation.is_finite() && min_separation >= 0.0) {
        return Err(Error::param(
            "min_separation",
            format!("must be non-negative, got {min_separation}"),
        ));
    }
    let cell = min_separation.max(radius * 1e-3);
    let mut grid = std::collections::HashMap::<(i64, i64), Vec<Point2>>::new();
    let key = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut out = Vec::with_capacity(n);
    let mut rejections = 0;
    while out.len() < n {
        let p = draw(region, radius, rng);
        let (kx, ky) = key(p);
        let clear = (kx - 1..=kx + 1).all(|x| {
            (ky - 1..=ky + 1).all(|y| {
                grid.get(&(x, y))
                    .is_none_or(|v| v.iter().all(|q| q.distance(p) >= min_separation && *q != p))
            })
        });
        if clear {
            grid.entry((kx, ky)).or_default().push(p);
            out.push(p);
        } else {
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                return Err(Error::PackingInfeasible {
                    n,
                    min_separation,
                    attempts: rejections,
                });
            }
        }
    }
    Ok(out)
}
