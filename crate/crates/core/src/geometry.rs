//! Node identities and positions on the normalized unit map.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Identifier of an agent or target, unique within one world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

/// A point in the plane. World positions are kept inside `[0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Position<T> {
    pub fn new(x: T, y: T) -> Self {
        Position { x, y }
    }

    /// Builds a position from `f64` coordinates.
    pub fn from_f64(x: f64, y: f64) -> Self {
        Position { x: T::lit(x), y: T::lit(y) }
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Clamps both coordinates to `[0, 1]`.
    pub fn clamp_unit(self) -> Self {
        Position { x: self.x.max(T::zero()).min(T::one()), y: self.y.max(T::zero()).min(T::one()) }
    }

    pub fn in_unit_square(&self) -> bool {
        let (zero, one) = (T::zero(), T::one());
        self.x >= zero && self.x <= one && self.y >= zero && self.y <= one
    }

    /// Arithmetic mean of a non-empty set of points; `None` when empty.
    pub fn centroid<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Position<T>>,
    {
        let mut sx = T::zero();
        let mut sy = T::zero();
        let mut n = 0usize;
        for p in points {
            sx = sx + p.x;
            sy = sy + p.y;
            n += 1;
        }
        if n == 0 {
            return None;
        }
        let n = T::from_usize(n)?;
        Some(Position { x: sx / n, y: sy / n })
    }

    pub fn to_f64(self) -> Position<f64> {
        Position { x: self.x.as_f64(), y: self.y.as_f64() }
    }
}
