use std::f64::consts::PI;

/// A point in pixel coordinates, `x` to the right and `y` down.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point::new(self.x * factor, self.y * factor)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Undirected orientation of the segment `a → b`, in `[0, π)`.
pub fn segment_angle(a: &Point, b: &Point) -> f64 {
    let t = (b.y - a.y).atan2(b.x - a.x).rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Acute difference between two undirected orientations, in `[0, π/2]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Distance from `p` to the line `{x : ⟨x, (sin ρ, −cos ρ)⟩ = δ}`.
pub fn point_line_distance(p: &Point, rho: f64, delta: f64) -> f64 {
    let (sin, cos) = rho.sin_cos();
    (p.x * sin - p.y * cos - delta).abs()
}
