//! UAV point-process sampling and the distance distributions of both
//! association strategies.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Horizontal position in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Point2 {
            x: radius * angle.cos(),
            y: radius * angle.sin(),
        }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn offset(self, by: Point2) -> Point2 {
        Point2::new(self.x + by.x, self.y + by.y)
    }
}

/// Uniform point in a disc of the given radius centred at the origin.
pub fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2 {
    let r = radius * rng.random::<f64>().sqrt();
    Point2::polar(r, uniform_angle(rng))
}

pub fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    2.0 * PI * rng.random::<f64>()
}

/// Homogeneous Poisson point process of the given density on a disc
/// centred at the origin.
pub fn sample_hppp_disc<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Vec<Point2> {
    let mean = density * PI * radius * radius;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = match Poisson::new(mean) {
        Ok(p) => p.sample(rng) as usize,
        Err(_) => return Vec::new(),
    };
    (0..count).map(|_| uniform_in_disc(radius, rng)).collect()
}

/// Density of the horizontal distance to the nearest point of an HPPP,
/// `2πλ r e^{−πλr²}`.
pub fn nearest_distance_pdf(density: f64, r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * density * r * (-PI * density * r * r).exp()
}

pub fn nearest_distance_cdf(density: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-PI * density * r * r).exp_m1()
}

/// Inverse-CDF draw of the nearest-point distance: `sqrt(−ln u / (πλ))`.
pub fn nearest_distance_sample<R: Rng + ?Sized>(density: f64, rng: &mut R) -> f64 {
    // 1 − U lies in (0, 1], so the log is finite.
    let u = 1.0 - rng.random::<f64>();
    (-u.ln() / (PI * density)).sqrt()
}

/// Near-user horizontal distance density given neighbour distance `R`:
/// `32 r / R²` on `[0, R/4]`.
pub fn near_user_pdf(r: f64, big_r: f64) -> f64 {
    if (0.0..=big_r / 4.0).contains(&r) {
        32.0 * r / (big_r * big_r)
    } else {
        0.0
    }
}

/// Far-user horizontal distance density given neighbour distance `R`:
/// `32 r / (3R²)` on `[R/4, R/2]`.
pub fn far_user_pdf(r: f64, big_r: f64) -> f64 {
    if (big_r / 4.0..=big_r / 2.0).contains(&r) {
        32.0 * r / (3.0 * big_r * big_r)
    } else {
        0.0
    }
}

/// Near-user radius for a uniform variate `u ∈ [0, 1]`: the CDF is
/// `16 r² / R²`.
pub fn near_user_quantile(u: f64, big_r: f64) -> f64 {
    0.25 * big_r * u.sqrt()
}

/// Far-user radius for `u ∈ [0, 1]`: the CDF is `(16 r²/R² − 1) / 3`.
pub fn far_user_quantile(u: f64, big_r: f64) -> f64 {
    0.25 * big_r * (1.0 + 3.0 * u).sqrt()
}

pub fn sample_near_user<R: Rng + ?Sized>(big_r: f64, rng: &mut R) -> f64 {
    near_user_quantile(rng.random::<f64>(), big_r)
}

pub fn sample_far_user<R: Rng + ?Sized>(big_r: f64, rng: &mut R) -> f64 {
    far_user_quantile(rng.random::<f64>(), big_r)
}

/// One realisation of the UAV layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub uav_horiz_positions: Vec<Point2>,
    /// Index of the UAV serving the pair; `None` when the disc came out empty.
    pub serving_index: Option<usize>,
    pub realization_seed: u64,
}

impl Scene {
    /// User-centric layout: typical user at the origin, served by the UAV
    /// with the smallest horizontal distance to it.
    pub fn user_centric<R: Rng + ?Sized>(density: f64, disc_radius: f64, seed: u64, rng: &mut R) -> Scene {
        let uavs = sample_hppp_disc(density, disc_radius, rng);
        let serving_index = uavs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i);
        Scene {
            uav_horiz_positions: uavs,
            serving_index,
            realization_seed: seed,
        }
    }

    /// User-centric layout with the serving distance pinned to `r`: the
    /// serving UAV sits at distance `r` from the origin and every other
    /// UAV is drawn from the field outside that disc.
    pub fn user_centric_pinned<R: Rng + ?Sized>(
        density: f64,
        disc_radius: f64,
        r: f64,
        seed: u64,
        rng: &mut R,
    ) -> Scene {
        let serving = Point2::polar(r, uniform_angle(rng));
        let mut uavs = vec![serving];
        uavs.extend(
            sample_hppp_disc(density, disc_radius, rng)
                .into_iter()
                .filter(|p| p.norm() > r),
        );
        Scene {
            uav_horiz_positions: uavs,
            serving_index: Some(0),
            realization_seed: seed,
        }
    }

    /// UAV-centric layout: the serving UAV sits at the origin (index 0)
    /// and the rest of the layer is an independent HPPP.
    pub fn uav_centric<R: Rng + ?Sized>(density: f64, disc_radius: f64, seed: u64, rng: &mut R) -> Scene {
        let mut uavs = vec![Point2::ORIGIN];
        uavs.extend(sample_hppp_disc(density, disc_radius, rng));
        Scene {
            uav_horiz_positions: uavs,
            serving_index: Some(0),
            realization_seed: seed,
        }
    }

    /// UAV-centric layout with the nearest neighbour pinned at distance `big_r`.
    pub fn uav_centric_pinned<R: Rng + ?Sized>(
        density: f64,
        disc_radius: f64,
        big_r: f64,
        seed: u64,
        rng: &mut R,
    ) -> Scene {
        let mut uavs = vec![Point2::ORIGIN, Point2::polar(big_r, uniform_angle(rng))];
        uavs.extend(
            sample_hppp_disc(density, disc_radius, rng)
                .into_iter()
                .filter(|p| p.norm() > big_r),
        );
        Scene {
            uav_horiz_positions: uavs,
            serving_index: Some(0),
            realization_seed: seed,
        }
    }

    pub fn serving_position(&self) -> Option<Point2> {
        self.serving_index.map(|i| self.uav_horiz_positions[i])
    }

    /// Horizontal distance from the serving UAV to the closest other UAV.
    pub fn nearest_other_distance(&self) -> Option<f64> {
        let s = self.serving_index?;
        let here = self.uav_horiz_positions[s];
        self.uav_horiz_positions
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != s)
            .map(|(_, p)| p.dist(here))
            .min_by(f64::total_cmp)
    }
}
