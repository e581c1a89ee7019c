//! Random-walk mobility with reflecting boundaries.
//!
//! Each UE keeps a constant speed and walks straight for an epoch, then
//! draws a fresh heading uniformly on [0, 2π). Walls of the bounding box
//! (and, for confined FUEs, the building's exterior) reflect the walker
//! specularly.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::scenario::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityState {
    pub position: Point,
    pub speed_kmh: f64,
    pub heading_rad: f64,
    pub epoch_remaining_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeedClass {
    Low,
    Medium,
    High,
}

/// Classifies a speed against the `[low, high]` medium band; both ends of
/// the band count as medium.
pub fn speed_class(speed_kmh: f64, low_kmh: f64, high_kmh: f64) -> SpeedClass {
    if speed_kmh < low_kmh {
        SpeedClass::Low
    } else if speed_kmh <= high_kmh {
        SpeedClass::Medium
    } else {
        SpeedClass::High
    }
}

pub fn velocity_mps(speed_kmh: f64, heading_rad: f64) -> (f64, f64) {
    let v = speed_kmh / 3.6;
    (v * heading_rad.cos(), v * heading_rad.sin())
}

/// Whether the UE's current velocity has a positive component toward
/// `target`. A stationary UE is heading nowhere.
pub fn heading_toward(state: &MobilityState, target: Point) -> bool {
    moving_toward(
        velocity_mps(state.speed_kmh, state.heading_rad),
        state.position,
        target,
    )
}

/// [`heading_toward`] with a precomputed velocity vector.
pub fn moving_toward(velocity: (f64, f64), from: Point, target: Point) -> bool {
    velocity.0 * (target.x - from.x) + velocity.1 * (target.y - from.y) > 0.0
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Folds a coordinate back into `[lo, hi]`, returning whether an odd number
/// of reflections (a net direction flip) occurred.
fn reflect_axis(mut v: f64, lo: f64, hi: f64) -> (f64, bool) {
    let mut flipped = false;
    if hi <= lo {
        return (lo, false);
    }
    loop {
        if v > hi {
            v = 2.0 * hi - v;
            flipped = !flipped;
        } else if v < lo {
            v = 2.0 * lo - v;
            flipped = !flipped;
        } else {
            return (v, flipped);
        }
    }
}

/// Moves `from` by `(dx, dy)` inside `rect`, reflecting off its sides.
/// Returns the new position and heading.
pub fn reflect_move(from: Point, heading_rad: f64, distance: f64, rect: &Rect) -> (Point, f64) {
    let (dx, dy) = (distance * heading_rad.cos(), distance * heading_rad.sin());
    let (x, flip_x) = reflect_axis(from.x + dx, rect.min.x, rect.max.x);
    let (y, flip_y) = reflect_axis(from.y + dy, rect.min.y, rect.max.y);
    let mut heading = heading_rad;
    if flip_x {
        heading = PI - heading;
    }
    if flip_y {
        heading = -heading;
    }
    (Point::new(x, y), wrap_angle(heading))
}

/// Boundaries a walker is kept within.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arena {
    pub bounds: Rect,
    /// Extra confinement rectangle (the building, for confined FUEs).
    pub confine: Option<Rect>,
    pub epoch_s: f64,
}

impl Arena {
    fn rect(&self) -> Rect {
        self.confine.unwrap_or(self.bounds)
    }
}

/// Advances one walker by `dt` seconds.
pub fn step(state: &MobilityState, dt: f64, arena: &Arena, rng: &mut impl Rng) -> MobilityState {
    let distance = state.speed_kmh / 3.6 * dt;
    let (position, heading) = if distance > 0.0 {
        reflect_move(state.position, state.heading_rad, distance, &arena.rect())
    } else {
        (state.position, state.heading_rad)
    };
    let mut next = MobilityState {
        position,
        heading_rad: heading,
        epoch_remaining_s: state.epoch_remaining_s - dt,
        ..*state
    };
    if next.epoch_remaining_s <= 1e-9 {
        next.heading_rad = rng.gen_range(0.0..TAU);
        next.epoch_remaining_s = arena.epoch_s;
    }
    next
}
