//! Planar geometry of the network: the circular coverage region, the energy
//! harvesting and guard zones, and Poisson sampling of node locations.
//!
//! Everything lives in a disk of radius `coverage_radius` centred on the
//! primary transmitter at the origin. The primary receiver sits on the
//! positive y axis at distance `pr_distance`.

use crate::error::{require, require_non_negative, require_positive, Result};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// A point in the plane, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist_sq(&self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: Point2) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Disk-world layout: coverage radius, receiver offset and the two zone radii.
/// All lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    /// Radius of the coverage disk centred on the primary transmitter.
    pub coverage_radius: f64,
    /// Distance from the primary transmitter to its receiver.
    pub pr_distance: f64,
    /// Radius of the energy harvesting zone around the transmitter.
    pub eh_radius: f64,
    /// Radius of the guard zone around the receiver.
    pub gz_radius: f64,
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        require_positive("coverage_radius", self.coverage_radius)?;
        require_non_negative("pr_distance", self.pr_distance)?;
        require(
            self.pr_distance <= self.coverage_radius,
            "pr_distance",
            self.pr_distance,
            "<= coverage_radius",
        )?;
        require_non_negative("eh_radius", self.eh_radius)?;
        require(
            self.eh_radius <= self.coverage_radius,
            "eh_radius",
            self.eh_radius,
            "<= coverage_radius",
        )?;
        require_non_negative("gz_radius", self.gz_radius)?;
        Ok(())
    }

    /// Location of the primary receiver.
    pub fn pr_position(&self) -> Point2 {
        Point2::new(0.0, self.pr_distance)
    }
}

/// Probability that a node placed uniformly in the coverage disk falls inside
/// the harvesting zone: the area ratio `(r_eh / R)^2`.
pub fn eh_zone_probability(r_eh: f64, coverage_radius: f64) -> Result<f64> {
    require_positive("coverage_radius", coverage_radius)?;
    require_non_negative("r_eh", r_eh)?;
    require(r_eh <= coverage_radius, "r_eh", r_eh, "<= coverage_radius")?;
    let q = r_eh / coverage_radius;
    Ok(q * q)
}

/// Probability that a node placed uniformly in the coverage disk falls inside
/// the guard zone of radius `r_gz` around the receiver at distance `d_p` from
/// the centre.
///
/// When the guard disk lies entirely inside the coverage disk this is the
/// plain area ratio; once it pokes over the rim the overlap is a circular
/// lens, evaluated from the two wedge angles `phi` (at the receiver) and
/// `phi'` (at the centre) minus twice the triangle they share. Containment
/// and disjoint configurations clamp to 1 and 0.
pub fn gz_zone_probability(r_gz: f64, coverage_radius: f64, d_p: f64) -> Result<f64> {
    let r = coverage_radius;
    require_positive("coverage_radius", r)?;
    require_non_negative("r_gz", r_gz)?;
    require_non_negative("d_p", d_p)?;

    if r_gz >= r + d_p {
        // Guard disk swallows the whole coverage disk.
        return Ok(1.0);
    }
    if d_p >= r + r_gz {
        // Disjoint disks.
        return Ok(0.0);
    }
    if r_gz + d_p <= r {
        // Guard disk fully inside coverage.
        let q = r_gz / r;
        return Ok(q * q);
    }

    // Partial overlap. Arguments are clamped against round-off at tangency.
    let clamp = |v: f64| v.clamp(-1.0, 1.0);
    let phi = clamp((d_p * d_p + r_gz * r_gz - r * r) / (2.0 * d_p * r_gz)).acos();
    let phi_prime = clamp((r * r + d_p * d_p - r_gz * r_gz) / (2.0 * d_p * r)).acos();
    let frac = phi * r_gz * r_gz / (std::f64::consts::PI * r * r)
        + phi_prime / std::f64::consts::PI
        - d_p / (std::f64::consts::PI * r) * phi_prime.sin();
    Ok(frac.clamp(0.0, 1.0))
}

/// Mean distance from the disk centre to a uniformly placed node: `2R/3`.
///
/// Used as the plug-in transmitter-to-victim distance when averaging the
/// primary's interference over secondary receiver locations.
pub fn mean_center_distance(coverage_radius: f64) -> Result<f64> {
    require_positive("coverage_radius", coverage_radius)?;
    Ok(2.0 * coverage_radius / 3.0)
}

/// Uniform sample from the disk of radius `radius` centred at the origin,
/// by rejection from the bounding square (expected 4/pi iterations).
#[inline]
pub fn sample_uniform_disk<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Point2 {
    let r_sq = radius * radius;
    loop {
        let x = rng.random_range(-radius..=radius);
        let y = rng.random_range(-radius..=radius);
        if x * x + y * y <= r_sq {
            return Point2::new(x, y);
        }
    }
}

/// Draw one realization of a homogeneous Poisson process of the given
/// intensity (nodes per square metre) on the disk: a Poisson count with mean
/// `intensity * pi * R^2`, each point placed uniformly.
pub fn sample_ppp<R: Rng + ?Sized>(
    rng: &mut R,
    intensity: f64,
    coverage_radius: f64,
) -> Result<Vec<Point2>> {
    require_positive("coverage_radius", coverage_radius)?;
    require_non_negative("intensity", intensity)?;
    let mean = intensity * std::f64::consts::PI * coverage_radius * coverage_radius;
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let n = Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as usize;
    Ok((0..n)
        .map(|_| sample_uniform_disk(rng, coverage_radius))
        .collect())
}
