//! Network layout and UE population.
//!
//! One macro cell sits at the origin. The apartment building is a
//! `grid_rows × grid_cols` block of square apartments whose near edge lies
//! `enb_fap_distance_m` from the macro along +x, centred on the x axis. Each
//! apartment hosts `faps_per_apartment` closed-access FAPs and each FAP has
//! `csg_users_per_fap` resident users (FUEs). Macro users (MUEs) start in the
//! outdoor ring of width `area_margin_m` around the building.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;

use crate::config::SimConfig;
use crate::error::Result;
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId(pub u32);

impl CellId {
    pub const MACRO: CellId = CellId(0);
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UeId(pub u32);

impl fmt::Display for UeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_strict(&self, p: Point) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn expanded(&self, margin: f64) -> Rect {
        Rect {
            min: Point::new(self.min.x - margin, self.min.y - margin),
            max: Point::new(self.max.x + margin, self.max.y + margin),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Macro,
    Femto,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Access {
    Open,
    ClosedCsg(BTreeSet<UeId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub position: Point,
    pub tx_power_dbm: f64,
    pub access: Access,
    pub capacity_ues: u32,
}

impl Cell {
    pub fn admits(&self, ue: UeId) -> bool {
        match &self.access {
            Access::Open => true,
            Access::ClosedCsg(members) => members.contains(&ue),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Traffic {
    RealTimeVoip,
    RealTimeVideo,
    NonRealTime,
}

impl Traffic {
    pub fn is_real_time(self) -> bool {
        !matches!(self, Traffic::NonRealTime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UeClass {
    /// Resident CSG user of a FAP.
    Fue,
    /// Macro user starting outdoors.
    Mue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ue {
    pub id: UeId,
    pub class: UeClass,
    pub position: Point,
    pub speed_kmh: f64,
    pub heading_rad: f64,
    pub traffic: Traffic,
    pub whitelist: BTreeSet<CellId>,
    pub required_rate_bps: f64,
}

/// Apartment grid geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Building {
    pub origin: Point,
    pub rows: u32,
    pub cols: u32,
    pub side_m: f64,
}

impl Building {
    pub fn footprint(&self) -> Rect {
        Rect {
            min: self.origin,
            max: Point::new(
                self.origin.x + self.cols as f64 * self.side_m,
                self.origin.y + self.rows as f64 * self.side_m,
            ),
        }
    }

    pub fn apartment(&self, row: u32, col: u32) -> Rect {
        let min = Point::new(
            self.origin.x + col as f64 * self.side_m,
            self.origin.y + row as f64 * self.side_m,
        );
        Rect {
            min,
            max: Point::new(min.x + self.side_m, min.y + self.side_m),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.footprint().contains_strict(p)
    }

    /// Number of wall segments (interior and exterior) crossed by the
    /// straight path `from → to`. Touching a wall at an endpoint does not
    /// count as a crossing.
    pub fn wall_count(&self, from: Point, to: Point) -> u32 {
        if let (Some(a), Some(b)) = (self.cell_index(from), self.cell_index(to)) {
            // Both ends strictly inside apartments: the building is convex,
            // so every grid line between them is crossed exactly once.
            return a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
        }
        let fp = self.footprint();
        let mut count = 0;
        // Only grid lines between the endpoints can be crossed; the index
        // window is padded by one and the exact test decides.
        let (lo, hi) = self.line_window(from.x, to.x, self.origin.x, self.cols);
        for i in lo..=hi {
            let x = self.origin.x + i as f64 * self.side_m;
            if crosses_vertical(from, to, x, fp.min.y, fp.max.y) {
                count += 1;
            }
        }
        let (lo, hi) = self.line_window(from.y, to.y, self.origin.y, self.rows);
        for j in lo..=hi {
            let y = self.origin.y + j as f64 * self.side_m;
            if crosses_vertical(
                Point::new(from.y, from.x),
                Point::new(to.y, to.x),
                y,
                fp.min.x,
                fp.max.x,
            ) {
                count += 1;
            }
        }
        count
    }

    /// (column, row) of the apartment strictly containing `p`, or `None`
    /// outside the building or on a wall line.
    fn cell_index(&self, p: Point) -> Option<(u32, u32)> {
        let fx = (p.x - self.origin.x) / self.side_m;
        let fy = (p.y - self.origin.y) / self.side_m;
        if !(fx > 0.0 && fy > 0.0) {
            return None;
        }
        // Truncation is floor for positive values and avoids a libm call.
        let (cx, cy) = (fx as u32, fy as u32);
        let off_lines = fx > cx as f64 && fy > cy as f64;
        (off_lines && cx < self.cols && cy < self.rows).then_some((cx, cy))
    }

    fn line_window(&self, a: f64, b: f64, origin: f64, lines: u32) -> (u32, u32) {
        // Saturating casts clamp negatives to 0.
        let lo = ((a.min(b) - origin) / self.side_m) as u32;
        let hi = ((a.max(b) - origin) / self.side_m) as u32;
        (lo.saturating_sub(1).min(lines), hi.saturating_add(2).min(lines))
    }
}

/// Does segment `a → b` cross the vertical segment `x = xv, y ∈ [ylo, yhi]`?
fn crosses_vertical(a: Point, b: Point, xv: f64, ylo: f64, yhi: f64) -> bool {
    let da = a.x - xv;
    let db = b.x - xv;
    if da * db >= 0.0 {
        return false;
    }
    let t = da / (da - db);
    let y = a.y + t * (b.y - a.y);
    y >= ylo && y <= yhi
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SimConfig,
    pub cells: Vec<Cell>,
    pub ues: Vec<Ue>,
    pub building: Building,
    /// Mobility bounding box: the building footprint grown by `area_margin_m`.
    pub bounds: Rect,
}

impl Scenario {
    pub fn macro_cell(&self) -> &Cell {
        &self.cells[0]
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.0 as usize]
    }

    pub fn femtos(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.kind == CellKind::Femto)
    }

    pub fn fap_count(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn wall_count(&self, from: Point, to: Point) -> u32 {
        self.building.wall_count(from, to)
    }

    pub fn is_indoor(&self, p: Point) -> bool {
        self.building.contains(p)
    }
}

fn uniform_in(rng: &mut impl Rng, rect: &Rect) -> Point {
    Point::new(
        rng.gen_range(rect.min.x..rect.max.x),
        rng.gen_range(rect.min.y..rect.max.y),
    )
}

/// Builds the layout and UE population. Pure in `config`, including its seed.
pub fn build_scenario(config: &SimConfig) -> Result<Scenario> {
    config.ensure_valid()?;

    let side = config.apartment_side_m;
    let building = Building {
        origin: Point::new(
            config.enb_fap_distance_m,
            -(config.grid_rows as f64) * side / 2.0,
        ),
        rows: config.grid_rows,
        cols: config.grid_cols,
        side_m: side,
    };
    let footprint = building.footprint();
    let bounds = footprint.expanded(config.area_margin_m);

    let mut cells = vec![Cell {
        id: CellId::MACRO,
        kind: CellKind::Macro,
        position: Point::new(0.0, 0.0),
        tx_power_dbm: config.macro_tx_dbm,
        access: Access::Open,
        capacity_ues: u32::MAX,
    }];
    let mut fap_apartments = Vec::new();
    let per_apt = config.faps_per_apartment;
    for row in 0..config.grid_rows {
        for col in 0..config.grid_cols {
            let apt = building.apartment(row, col);
            for k in 0..per_apt {
                let x = apt.min.x + side * (k + 1) as f64 / (per_apt + 1) as f64;
                let y = (apt.min.y + apt.max.y) / 2.0;
                cells.push(Cell {
                    id: CellId(cells.len() as u32),
                    kind: CellKind::Femto,
                    position: Point::new(x, y),
                    tx_power_dbm: config.fap_tx_dbm,
                    access: Access::ClosedCsg(BTreeSet::new()),
                    capacity_ues: config.fap_capacity(),
                });
                fap_apartments.push(apt);
            }
        }
    }

    let mut placement = rng::stream(config.seed, Purpose::Placement, 0);
    let mut traffic_rng = rng::stream(config.seed, Purpose::Traffic, 0);
    let mut ues: Vec<Ue> = Vec::new();

    let mut push_ue = |ues: &mut Vec<Ue>,
                       class: UeClass,
                       position: Point,
                       speed_kmh: f64,
                       heading_rad: f64,
                       whitelist: BTreeSet<CellId>| {
        let idx = ues.len();
        let non_real_time = config.non_real_time_fraction > 0.0
            && traffic_rng.gen::<f64>() < config.non_real_time_fraction;
        let traffic = if non_real_time {
            Traffic::NonRealTime
        } else if idx.is_multiple_of(2) {
            Traffic::RealTimeVoip
        } else {
            Traffic::RealTimeVideo
        };
        let required_rate_bps = match traffic {
            Traffic::RealTimeVoip => config.voip_rate_bps,
            // Best-effort data is sized like a video flow.
            Traffic::RealTimeVideo | Traffic::NonRealTime => config.video_rate_bps,
        };
        ues.push(Ue {
            id: UeId(idx as u32),
            class,
            position,
            speed_kmh,
            heading_rad,
            traffic,
            whitelist,
            required_rate_bps,
        });
    };

    for (fap_idx, apt) in fap_apartments.iter().enumerate() {
        let fap = CellId(fap_idx as u32 + 1);
        for _ in 0..config.csg_users_per_fap {
            let position = uniform_in(&mut placement, apt);
            let heading = placement.gen_range(0.0..TAU);
            push_ue(
                &mut ues,
                UeClass::Fue,
                position,
                config.fue_speed_kmh,
                heading,
                BTreeSet::from([fap]),
            );
        }
    }

    let fap_count = fap_apartments.len();
    for m in 0..config.mue_count as usize {
        let position = loop {
            let p = uniform_in(&mut placement, &bounds);
            if !footprint.contains(p) {
                break p;
            }
        };
        let heading = placement.gen_range(0.0..TAU);
        let whitelist: BTreeSet<CellId> = sample(
            &mut placement,
            fap_count,
            config.mue_whitelist_size as usize,
        )
        .into_iter()
        .map(|i| CellId(i as u32 + 1))
        .collect();
        let speed = config.mue_speeds_kmh[m % config.mue_speeds_kmh.len()];
        push_ue(&mut ues, UeClass::Mue, position, speed, heading, whitelist);
    }

    for ue in &ues {
        for fap in &ue.whitelist {
            if let Access::ClosedCsg(members) = &mut cells[fap.0 as usize].access {
                members.insert(ue.id);
            }
        }
    }
    // "auto" capacity: room for every CSG member, residents and visitors.
    if config.fap_capacity_ues.is_none() {
        for cell in &mut cells {
            if let Access::ClosedCsg(members) = &cell.access {
                cell.capacity_ues = members.len() as u32;
            }
        }
    }

    Ok(Scenario {
        config: config.clone(),
        cells,
        ues,
        building,
        bounds,
    })
}
