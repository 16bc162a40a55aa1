//! Minimal enclosing circles of planar point sets, with a certified bracket
//! for the radius.
//!
//! Minimizing `max |xₙ − cₙ|` over `x ∈ ℂ` is exactly the smallest circle
//! containing the points `cₙ`. The incremental algorithm returns the circle
//! and the two or three points that determine it; the smallest circle of
//! that support set is a lower bound for the full set, and the farthest
//! point from the returned center is an upper bound.

use crate::interval::CertifiedInterval;
use crate::scalar::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingCircle {
    pub center: C64,
    pub radius: CertifiedInterval,
    /// Indices of the points on the boundary that fix the circle.
    pub support: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Disk {
    c: C64,
    r: f64,
}

impl Disk {
    fn contains(&self, p: C64) -> bool {
        (p - self.c).norm() <= self.r * (1.0 + 1e-14) + 1e-300
    }
}

fn diametral(a: C64, b: C64) -> Disk {
    let c = (a + b) * 0.5;
    Disk { c, r: (a - b).norm() * 0.5 }
}

fn circumcircle(a: C64, b: C64, c: C64) -> Option<Disk> {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d == 0.0 {
        return None;
    }
    let (bb, cc) = (b.norm_sqr(), c.norm_sqr());
    let u = C64::new((c.im * bb - b.im * cc) / d, (b.re * cc - c.re * bb) / d);
    Some(Disk { c: u + a, r: u.norm() })
}

/// Radius of the smallest circle through a support set of at most three points.
fn support_radius(pts: &[C64]) -> f64 {
    match pts {
        [] | [_] => 0.0,
        [a, b] => (a - b).norm() * 0.5,
        [a, b, c] => {
            let sides = [(b - c).norm_sqr(), (a - c).norm_sqr(), (a - b).norm_sqr()];
            let longest = sides.iter().cloned().fold(0.0, f64::max);
            let rest: f64 = sides.iter().sum::<f64>() - longest;
            if longest >= rest {
                // right or obtuse: the longest side is a diameter
                longest.sqrt() * 0.5
            } else {
                circumcircle(*a, *b, *c).map_or(longest.sqrt() * 0.5, |d| d.r)
            }
        }
        _ => unreachable!("support sets have at most three points"),
    }
}

pub fn enclosing_circle(points: &[C64]) -> EnclosingCircle {
    assert!(!points.is_empty(), "enclosing circle of an empty set");
    let mut disk = Disk { c: points[0], r: 0.0 };
    let mut support = vec![0];
    for i in 1..points.len() {
        if disk.contains(points[i]) {
            continue;
        }
        disk = Disk { c: points[i], r: 0.0 };
        support = vec![i];
        for j in 0..i {
            if disk.contains(points[j]) {
                continue;
            }
            disk = diametral(points[i], points[j]);
            support = vec![i, j];
            for k in 0..j {
                if disk.contains(points[k]) {
                    continue;
                }
                match circumcircle(points[i], points[j], points[k]) {
                    Some(d) => {
                        disk = d;
                        support = vec![i, j, k];
                    }
                    None => {
                        // collinear: the two farthest apart span the circle
                        let trio = [i, j, k];
                        let (p, q) = [(0, 1), (0, 2), (1, 2)]
                            .into_iter()
                            .max_by(|x, y| {
                                let dx = (points[trio[x.0]] - points[trio[x.1]]).norm();
                                let dy = (points[trio[y.0]] - points[trio[y.1]]).norm();
                                dx.total_cmp(&dy)
                            })
                            .unwrap();
                        disk = diametral(points[trio[p]], points[trio[q]]);
                        support = vec![trio[p], trio[q]];
                    }
                }
            }
        }
    }
    let upper = points.iter().map(|p| (p - disk.c).norm()).fold(0.0, f64::max);
    let pts: Vec<C64> = support.iter().map(|&k| points[k]).collect();
    let lower = support_radius(&pts).min(upper);
    EnclosingCircle { center: disk.c, radius: CertifiedInterval::new(lower, upper), support }
}
