//! Small planar vector type and the axis-aligned box domain.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Clockwise quarter turn.
    pub fn rot_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    /// Counter-clockwise quarter turn.
    pub fn rot_ccw(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

/// Signed doubled area of the triangle (a, b, c); positive when counter-clockwise.
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wall {
    Left,
    Right,
    Bottom,
    Top,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Left, Wall::Right, Wall::Bottom, Wall::Top];

    pub fn index(self) -> usize {
        match self {
            Wall::Left => 0,
            Wall::Right => 1,
            Wall::Bottom => 2,
            Wall::Top => 3,
        }
    }

    pub fn outward_normal(self) -> Vec2 {
        match self {
            Wall::Left => Vec2::new(-1.0, 0.0),
            Wall::Right => Vec2::new(1.0, 0.0),
            Wall::Bottom => Vec2::new(0.0, -1.0),
            Wall::Top => Vec2::new(0.0, 1.0),
        }
    }

    /// Tangent of the counter-clockwise perimeter walk.
    pub fn ccw_tangent(self) -> Vec2 {
        self.outward_normal().rot_ccw()
    }

    pub fn name(self) -> &'static str {
        match self {
            Wall::Left => "left",
            Wall::Right => "right",
            Wall::Bottom => "bottom",
            Wall::Top => "top",
        }
    }
}

/// Wall condition: no-slip walls carry homogeneous Dirichlet data, free-slip
/// walls only constrain the normal velocity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallKind {
    NoSlip,
    FreeSlip,
}

impl WallKind {
    pub fn keyword(self) -> &'static str {
        match self {
            WallKind::NoSlip => "noslip",
            WallKind::FreeSlip => "freeslip",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "noslip" => Some(WallKind::NoSlip),
            "freeslip" => Some(WallKind::FreeSlip),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub min: Vec2,
    pub max: Vec2,
    /// Indexed by [`Wall::index`].
    pub walls: [WallKind; 4],
}

impl Domain {
    pub fn new(min: Vec2, max: Vec2, walls: [WallKind; 4]) -> Self {
        Self { min, max, walls }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn kind(&self, w: Wall) -> WallKind {
        self.walls[w.index()]
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    /// Walls that `p` lies on within `tol`.
    pub fn walls_at(&self, p: Vec2, tol: f64) -> Vec<Wall> {
        let mut out = Vec::new();
        if (p.x - self.min.x).abs() <= tol {
            out.push(Wall::Left);
        }
        if (p.x - self.max.x).abs() <= tol {
            out.push(Wall::Right);
        }
        if (p.y - self.min.y).abs() <= tol {
            out.push(Wall::Bottom);
        }
        if (p.y - self.max.y).abs() <= tol {
            out.push(Wall::Top);
        }
        out
    }

    /// Moves `p` exactly onto wall `w`.
    pub fn snap_to(&self, p: Vec2, w: Wall) -> Vec2 {
        match w {
            Wall::Left => Vec2::new(self.min.x, p.y),
            Wall::Right => Vec2::new(self.max.x, p.y),
            Wall::Bottom => Vec2::new(p.x, self.min.y),
            Wall::Top => Vec2::new(p.x, self.max.y),
        }
    }

    /// Arclength parameter of a boundary point along the counter-clockwise
    /// walk that starts at the lower-left corner.
    pub fn perimeter_param(&self, p: Vec2, w: Wall) -> f64 {
        let (wd, ht) = (self.width(), self.height());
        match w {
            Wall::Bottom => p.x - self.min.x,
            Wall::Right => wd + (p.y - self.min.y),
            Wall::Top => wd + ht + (self.max.x - p.x),
            Wall::Left => 2.0 * wd + ht + (self.max.y - p.y),
        }
    }

    /// Point on the boundary at perimeter parameter `s` (taken modulo the perimeter).
    pub fn perimeter_point(&self, s: f64) -> Vec2 {
        let (wd, ht) = (self.width(), self.height());
        let s = s.rem_euclid(self.perimeter());
        if s <= wd {
            Vec2::new(self.min.x + s, self.min.y)
        } else if s <= wd + ht {
            Vec2::new(self.max.x, self.min.y + (s - wd))
        } else if s <= 2.0 * wd + ht {
            Vec2::new(self.max.x - (s - wd - ht), self.max.y)
        } else {
            Vec2::new(self.min.x, self.max.y - (s - 2.0 * wd - ht))
        }
    }

    /// Perimeter parameters of the four corners, starting at the lower left.
    pub fn corner_params(&self) -> [f64; 4] {
        let (wd, ht) = (self.width(), self.height());
        [0.0, wd, wd + ht, 2.0 * wd + ht]
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}
