//! Finite balls of Z^d with their boundary sphere grounded.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{effective_resistance, ConductanceNetwork, NetworkError};

pub const DEFAULT_BALL_NODE_CAP: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallNorm {
    #[default]
    Euclidean,
    /// `|x|_1 <= r`, the "square" picture in two dimensions.
    Manhattan,
}

/// `G(r)` with all of `dG(r)` merged into a single ground node.
#[derive(Debug, Clone)]
pub struct LatticeBall {
    pub dimension: usize,
    pub radius: u32,
    pub network: ConductanceNetwork,
    pub origin: usize,
    pub ground: usize,
    /// Lattice points of the ball (interior and boundary).
    pub n_points: usize,
    /// Points of `dG(r)`: those with a nearest neighbour outside the ball.
    pub n_boundary: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyaPoint {
    pub radius: u32,
    pub r_eff: f64,
    pub p_esc: f64,
}

pub fn lattice_ball(d: usize, r: u32, conductance: f64, norm: BallNorm) -> Result<LatticeBall, NetworkError> {
    lattice_ball_with_cap(d, r, conductance, norm, DEFAULT_BALL_NODE_CAP)
}

pub fn lattice_ball_with_cap(
    d: usize,
    r: u32,
    conductance: f64,
    norm: BallNorm,
    cap: usize,
) -> Result<LatticeBall, NetworkError> {
    if !(1..=3).contains(&d) {
        return Err(NetworkError::BadDimension(d));
    }
    if r < 1 {
        return Err(NetworkError::BadRadius);
    }
    let ri = r as i64;
    let inside = |p: [i64; 3]| match norm {
        BallNorm::Euclidean => p.iter().map(|c| c * c).sum::<i64>() <= ri * ri,
        BallNorm::Manhattan => p.iter().map(|c| c.abs()).sum::<i64>() <= ri,
    };
    let span = |k: usize| if k < d { -ri..=ri } else { 0..=0 };

    let mut points = Vec::new();
    for x in span(0) {
        for y in span(1) {
            for z in span(2) {
                let p = [x, y, z];
                if inside(p) {
                    points.push(p);
                    if points.len() > cap {
                        return Err(NetworkError::BallTooLarge { cap });
                    }
                }
            }
        }
    }
    let steps: Vec<[i64; 3]> = (0..d)
        .flat_map(|k| {
            [1i64, -1].into_iter().map(move |s| {
                let mut e = [0i64; 3];
                e[k] = s;
                e
            })
        })
        .collect();
    let add = |p: [i64; 3], e: [i64; 3]| [p[0] + e[0], p[1] + e[1], p[2] + e[2]];
    let on_boundary = |p: [i64; 3]| steps.iter().any(|&e| !inside(add(p, e)));

    // Interior points get their own nodes; every boundary point maps to ground.
    let mut index = HashMap::with_capacity(points.len());
    let mut n_interior = 0;
    let mut n_boundary = 0;
    for &p in &points {
        if on_boundary(p) {
            n_boundary += 1;
        } else {
            index.insert(p, n_interior);
            n_interior += 1;
        }
    }
    let ground = n_interior;
    let node = |p: [i64; 3]| index.get(&p).copied().unwrap_or(ground);

    let mut edges = Vec::new();
    for &p in &points {
        for k in 0..d {
            let mut e = [0i64; 3];
            e[k] = 1;
            let q = add(p, e);
            if !inside(q) {
                continue;
            }
            let (a, b) = (node(p), node(q));
            if a != b {
                edges.push((a, b, conductance));
            }
        }
    }
    let network = ConductanceNetwork::new(n_interior + 1, edges)?;
    let origin = index[&[0, 0, 0]];
    Ok(LatticeBall { dimension: d, radius: r, network, origin, ground, n_points: points.len(), n_boundary })
}

impl LatticeBall {
    /// Effective resistance from the origin to the grounded sphere.
    pub fn resistance(&self) -> Result<f64, NetworkError> {
        effective_resistance(&self.network, self.origin, self.ground)
    }
}

/// `p_esc(r) = 1 / (2 d R_eff(r))` for each radius, by exact solves.
pub fn polya_escape_series(d: usize, radii: &[u32], norm: BallNorm) -> Result<Vec<PolyaPoint>, NetworkError> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NetworkError::RadiiNotIncreasing);
    }
    radii
        .iter()
        .map(|&r| {
            let ball = lattice_ball(d, r, 1.0, norm)?;
            let r_eff = ball.resistance()?;
            Ok(PolyaPoint { radius: r, r_eff, p_esc: 1.0 / (2.0 * d as f64 * r_eff) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_ball() {
        let ball = lattice_ball(1, 4, 1.0, BallNorm::Euclidean).unwrap();
        assert_eq!(ball.n_points, 9);
        assert_eq!(ball.n_boundary, 2);
        assert!((ball.resistance().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_balls() {
        let two = lattice_ball(2, 1, 1.0, BallNorm::Euclidean).unwrap();
        assert_eq!(two.n_points, 5);
        assert!((two.resistance().unwrap() - 0.25).abs() < 1e-12);
        let three = lattice_ball(3, 1, 1.0, BallNorm::Euclidean).unwrap();
        assert!((three.resistance().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_series_is_harmonic() {
        let s = polya_escape_series(1, &[1, 2, 3, 4], BallNorm::Euclidean).unwrap();
        for (pt, r) in s.iter().zip(1..) {
            assert!((pt.p_esc - 1.0 / r as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn manhattan_ball_is_smaller() {
        let e = lattice_ball(2, 5, 1.0, BallNorm::Euclidean).unwrap();
        let m = lattice_ball(2, 5, 1.0, BallNorm::Manhattan).unwrap();
        assert!(m.n_points < e.n_points);
        assert!(m.resistance().unwrap() < e.resistance().unwrap());
    }

    #[test]
    fn errors() {
        assert_eq!(lattice_ball(4, 2, 1.0, BallNorm::Euclidean).unwrap_err(), NetworkError::BadDimension(4));
        assert_eq!(lattice_ball(2, 0, 1.0, BallNorm::Euclidean).unwrap_err(), NetworkError::BadRadius);
        assert_eq!(
            lattice_ball_with_cap(3, 10, 1.0, BallNorm::Euclidean, 100).unwrap_err(),
            NetworkError::BallTooLarge { cap: 100 }
        );
        assert_eq!(
            polya_escape_series(2, &[3, 2], BallNorm::Euclidean).unwrap_err(),
            NetworkError::RadiiNotIncreasing
        );
    }
}
