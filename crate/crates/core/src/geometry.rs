use crate::error::{check, Result};

/// A location in the sensor field, in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Axis-aligned deployment rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        check(
            max.x > min.x && min.x.is_finite() && max.x.is_finite(),
            "bounds.width",
            max.x - min.x,
            "> 0",
        )?;
        check(
            max.y > min.y && min.y.is_finite() && max.y.is_finite(),
            "bounds.height",
            max.y - min.y,
            "> 0",
        )?;
        Ok(Bounds { min, max })
    }

    /// Square field `[0, side] x [0, side]`.
    pub fn square(side: f64) -> Result<Self> {
        Bounds::new(Point::new(0.0, 0.0), Point::new(side, side))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}
