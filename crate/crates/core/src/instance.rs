//! Benchmark instance definitions: the naming grammar, obstacle predicates,
//! velocity field and elevation landscapes, and their materialization as a
//! lattice world.
//!
//! An instance is fully described by a name such as
//! `ASLETISMAC_CH_X10_Y10_P1_K2_BF`: obstacle layout, grid size, elevation
//! landscape, neighbourhood order and whether backtracking moves are allowed.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Mandatory prefix of every instance name.
pub const NAME_PREFIX: &str = "ASLETISMAC";

/// Default lake radius as a fraction of the grid's x size.
pub const DEFAULT_LAKE_RADIUS_RATIO: f64 = 0.25;

/// Speed assigned to highway cells, km/h.
pub const VELOCITY_HIGHWAY: f64 = 130.0;
/// Speed assigned to country-road cells, km/h.
pub const VELOCITY_COUNTRY: f64 = 100.0;
/// Speed assigned to city-street cells, km/h.
pub const VELOCITY_CITY: f64 = 50.0;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("malformed instance name: {0}")]
    MalformedName(String),
    #[error("cell ({x}, {y}) outside {size_x}x{size_y} grid")]
    OutOfBounds { x: u32, y: u32, size_x: u32, size_y: u32 },
}

/// Obstacle layout of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObstacleKind {
    /// `NO`: fully passable grid.
    Open,
    /// `CH`: every second cell blocked in both axes (block-like city layout).
    Checkerboard,
    /// `LA`: one impassable disk in the middle of the map.
    Lake,
}

impl ObstacleKind {
    pub const ALL: [ObstacleKind; 3] = [
        ObstacleKind::Open,
        ObstacleKind::Checkerboard,
        ObstacleKind::Lake,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ObstacleKind::Open => "NO",
            ObstacleKind::Checkerboard => "CH",
            ObstacleKind::Lake => "LA",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "NO" => Some(ObstacleKind::Open),
            "CH" => Some(ObstacleKind::Checkerboard),
            "LA" => Some(ObstacleKind::Lake),
            _ => None,
        }
    }
}

/// Elevation landscape of an instance.
///
/// `Peaks` is the classic multi-modal peaks surface; `HillsN` sums the first
/// `N` of three unit-height-5 Gaussian hills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElevationKind {
    /// `PM`: peaks surface.
    Peaks,
    /// `P1`: single Gaussian hill.
    Hills1,
    /// `P2`: two Gaussian hills.
    Hills2,
    /// `P3`: three Gaussian hills.
    Hills3,
}

impl ElevationKind {
    pub const ALL: [ElevationKind; 4] = [
        ElevationKind::Peaks,
        ElevationKind::Hills1,
        ElevationKind::Hills2,
        ElevationKind::Hills3,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ElevationKind::Peaks => "PM",
            ElevationKind::Hills1 => "P1",
            ElevationKind::Hills2 => "P2",
            ElevationKind::Hills3 => "P3",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "PM" => Some(ElevationKind::Peaks),
            "P1" => Some(ElevationKind::Hills1),
            "P2" => Some(ElevationKind::Hills2),
            "P3" => Some(ElevationKind::Hills3),
            _ => None,
        }
    }
}

/// Neighbourhood order: `K2` moves to the 4 cardinal neighbours, `K3` adds
/// the diagonals (8 neighbours).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighbourhood {
    K2,
    K3,
}

impl Neighbourhood {
    pub const ALL: [Neighbourhood; 2] = [Neighbourhood::K2, Neighbourhood::K3];

    pub fn k(self) -> u8 {
        match self {
            Neighbourhood::K2 => 2,
            Neighbourhood::K3 => 3,
        }
    }
}

/// Parsed benchmark instance description.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub obstacle: ObstacleKind,
    pub size_x: u32,
    pub size_y: u32,
    pub elevation: ElevationKind,
    pub neighbourhood: Neighbourhood,
    pub backtracking: bool,
    /// Lake radius as a fraction of `size_x`. Not part of the name; defaults
    /// to 0.25 and is ignored unless `obstacle` is [`ObstacleKind::Lake`].
    pub lake_radius_ratio: f64,
}

impl InstanceSpec {
    /// Parses a canonical instance name,
    /// e.g. `ASLETISMAC_CH_X10_Y10_P1_K2_BF`.
    pub fn parse(name: &str) -> Result<Self, InstanceError> {
        let malformed = |why: &str| InstanceError::MalformedName(format!("{name}: {why}"));
        let parts: Vec<&str> = name.split('_').collect();
        if parts.len() != 7 {
            return Err(malformed("expected 7 '_'-separated segments"));
        }
        if parts[0] != NAME_PREFIX {
            return Err(malformed("name must start with ASLETISMAC"));
        }
        let obstacle =
            ObstacleKind::from_tag(parts[1]).ok_or_else(|| malformed("unknown obstacle tag"))?;
        let size_x = parse_size(parts[2], 'X').ok_or_else(|| malformed("bad X size segment"))?;
        let size_y = parse_size(parts[3], 'Y').ok_or_else(|| malformed("bad Y size segment"))?;
        let elevation =
            ElevationKind::from_tag(parts[4]).ok_or_else(|| malformed("unknown elevation tag"))?;
        let neighbourhood = match parts[5] {
            "K2" => Neighbourhood::K2,
            "K3" => Neighbourhood::K3,
            _ => return Err(malformed("neighbourhood must be K2 or K3")),
        };
        let backtracking = match parts[6] {
            "BT" => true,
            "BF" => false,
            _ => return Err(malformed("backtracking segment must be BT or BF")),
        };
        Ok(InstanceSpec {
            obstacle,
            size_x,
            size_y,
            elevation,
            neighbourhood,
            backtracking,
            lake_radius_ratio: DEFAULT_LAKE_RADIUS_RATIO,
        })
    }

    /// Canonical name of this instance; inverse of [`InstanceSpec::parse`].
    pub fn name(&self) -> String {
        format!(
            "{}_{}_X{}_Y{}_{}_K{}_B{}",
            NAME_PREFIX,
            self.obstacle.tag(),
            self.size_x,
            self.size_y,
            self.elevation.tag(),
            self.neighbourhood.k(),
            if self.backtracking { "T" } else { "F" },
        )
    }

    pub fn start(&self) -> (u32, u32) {
        (0, 0)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.size_x - 1, self.size_y - 1)
    }

    fn check_bounds(&self, x: u32, y: u32) -> Result<(), InstanceError> {
        if x >= self.size_x || y >= self.size_y {
            return Err(InstanceError::OutOfBounds {
                x,
                y,
                size_x: self.size_x,
                size_y: self.size_y,
            });
        }
        Ok(())
    }

    /// Whether the cell is impassable. Start and end cells are never
    /// obstacles, whatever the layout says.
    pub fn is_obstacle(&self, x: u32, y: u32) -> Result<bool, InstanceError> {
        self.check_bounds(x, y)?;
        if (x, y) == self.start() || (x, y) == self.end() {
            return Ok(false);
        }
        Ok(match self.obstacle {
            ObstacleKind::Open => false,
            ObstacleKind::Checkerboard => x % 2 == 1 && y % 2 == 1,
            ObstacleKind::Lake => {
                let cx = f64::from(self.size_x) / 2.0;
                let cy = f64::from(self.size_y) / 2.0;
                let r = self.lake_radius_ratio * f64::from(self.size_x);
                let dx = f64::from(x) - cx;
                let dy = f64::from(y) - cy;
                dx * dx + dy * dy < r * r
            }
        })
    }

    /// Maximum velocity of the cell in km/h; 0 marks an obstacle.
    ///
    /// Road tiers follow the street field `w(x, y) = max(sin x, cos y)` over
    /// the raw integer cell coordinates in radians: highway above 0.9, city
    /// below -0.4, country roads in between.
    pub fn velocity_at(&self, x: u32, y: u32) -> Result<f64, InstanceError> {
        if self.is_obstacle(x, y)? {
            return Ok(0.0);
        }
        let w = f64::from(x).sin().max(f64::from(y).cos());
        Ok(if w > 0.9 {
            VELOCITY_HIGHWAY
        } else if w < -0.4 {
            VELOCITY_CITY
        } else {
            VELOCITY_COUNTRY
        })
    }

    /// Elevation of the cell.
    ///
    /// Cell coordinates are mapped affinely onto `[-3, 3]` per axis, where
    /// the landscape functions are defined.
    pub fn elevation_at(&self, x: u32, y: u32) -> Result<f64, InstanceError> {
        self.check_bounds(x, y)?;
        let u = hill_coord(x, self.size_x);
        let v = hill_coord(y, self.size_y);
        Ok(self.elevation.sample(u, v))
    }

    /// Materializes the velocity and elevation fields over the whole grid.
    pub fn build_world(&self) -> LatticeWorld {
        let mut velocity = Grid::filled(self.size_x, self.size_y, 0.0);
        let mut elevation = Grid::filled(self.size_x, self.size_y, 0.0);
        for y in 0..self.size_y {
            for x in 0..self.size_x {
                // In bounds by construction.
                velocity.set(x, y, self.velocity_at(x, y).unwrap());
                elevation.set(x, y, self.elevation_at(x, y).unwrap());
            }
        }
        LatticeWorld {
            spec: self.clone(),
            velocity,
            elevation,
            start: self.start(),
            end: self.end(),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InstanceSpec::parse(s)
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses a size segment like `X10`. Leading zeros are rejected so that
/// parse/format round-trips exactly; sizes below 2 are rejected.
fn parse_size(segment: &str, axis: char) -> Option<u32> {
    let digits = segment.strip_prefix(axis)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u32 = digits.parse().ok()?;
    if n < 2 {
        return None;
    }
    Some(n)
}

/// Affine map of cell index `i` in `[0, size-1]` onto `[-3, 3]`.
fn hill_coord(i: u32, size: u32) -> f64 {
    6.0 * f64::from(i) / f64::from(size - 1) - 3.0
}

impl ElevationKind {
    /// Evaluates the landscape at a point of the `[-3, 3]^2` hill domain.
    pub fn sample(self, u: f64, v: f64) -> f64 {
        match self {
            ElevationKind::Peaks => peaks(u, v),
            ElevationKind::Hills1 => hill(u, v, -1.5, -1.5),
            ElevationKind::Hills2 => hill(u, v, -1.5, -1.5) + hill(u, v, 1.5, 1.5),
            ElevationKind::Hills3 => {
                hill(u, v, -1.5, -1.5) + hill(u, v, 1.5, 1.5) + hill(u, v, 1.5, -1.5)
            }
        }
    }
}

/// The multi-modal peaks surface.
fn peaks(x: f64, y: f64) -> f64 {
    3.0 * (1.0 - x).powi(2) * (-x * x - (y + 1.0).powi(2)).exp()
        - 10.0 * (-x * x - y * y).exp() * (-x.powi(3) + x / 5.0 - y.powi(5))
        - (1.0 / 3.0) * (-(x + 1.0).powi(2) - y * y).exp()
}

/// Gaussian hill of height 5 centred at `(cx, cy)`.
fn hill(x: f64, y: f64, cx: f64, cy: f64) -> f64 {
    5.0 * (-(x - cx).powi(2) - (y - cy).powi(2)).exp()
}

/// Dense row-major scalar field over the grid (row index is `y`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    size_x: u32,
    size_y: u32,
    #[serde(rename = "values")]
    data: Vec<f64>,
}

impl Grid {
    fn filled(size_x: u32, size_y: u32, value: f64) -> Self {
        Grid {
            size_x,
            size_y,
            data: vec![value; size_x as usize * size_y as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        debug_assert!(x < self.size_x && y < self.size_y);
        self.data[y as usize * self.size_x as usize + x as usize]
    }

    fn set(&mut self, x: u32, y: u32, value: f64) {
        self.data[y as usize * self.size_x as usize + x as usize] = value;
    }

    /// Row-major values, row index `y`.
    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// A fully materialized instance: per-cell velocity and elevation plus the
/// corner-to-corner routing task.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWorld {
    pub spec: InstanceSpec,
    pub velocity: Grid,
    pub elevation: Grid,
    pub start: (u32, u32),
    pub end: (u32, u32),
}

impl LatticeWorld {
    pub fn size_x(&self) -> u32 {
        self.spec.size_x
    }

    pub fn size_y(&self) -> u32 {
        self.spec.size_y
    }

    pub fn is_obstacle(&self, x: u32, y: u32) -> bool {
        self.velocity.get(x, y) == 0.0
    }

    pub fn obstacle_count(&self) -> usize {
        self.velocity.values().iter().filter(|&&v| v == 0.0).count()
    }

    /// Debug/plotting export: `{"spec": name, "velocity": [...], "elevation": [...]}`
    /// with both fields as row-major arrays (row index `y`).
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct WorldDoc<'a> {
            spec: String,
            velocity: &'a [f64],
            elevation: &'a [f64],
        }
        serde_json::to_string(&WorldDoc {
            spec: self.spec.name(),
            velocity: self.velocity.values(),
            elevation: self.elevation.values(),
        })
        .expect("world serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str) -> InstanceSpec {
        InstanceSpec::parse(name).unwrap()
    }

    #[test]
    fn parses_checkerboard_example() {
        let s = spec("ASLETISMAC_CH_X10_Y10_P1_K2_BF");
        assert_eq!(s.obstacle, ObstacleKind::Checkerboard);
        assert_eq!((s.size_x, s.size_y), (10, 10));
        assert_eq!(s.elevation, ElevationKind::Hills1);
        assert_eq!(s.neighbourhood, Neighbourhood::K2);
        assert!(!s.backtracking);
    }

    #[test]
    fn parses_open_k3_example() {
        let s = spec("ASLETISMAC_NO_X14_Y14_PM_K3_BF");
        assert_eq!(s.obstacle, ObstacleKind::Open);
        assert_eq!((s.size_x, s.size_y), (14, 14));
        assert_eq!(s.elevation, ElevationKind::Peaks);
        assert_eq!(s.neighbourhood, Neighbourhood::K3);
        assert!(!s.backtracking);
    }

    #[test]
    fn rejects_malformed_names() {
        for bad in [
            "ASLETISMAC_XX_X10_Y10_P1_K2_BF",
            "WRONG_NO_X10_Y10_P1_K2_BF",
            "ASLETISMAC_NO_X10_Y10_P1_K2",
            "ASLETISMAC_NO_X10_Y10_P1_K2_BF_EXTRA",
            "ASLETISMAC_NO_Xten_Y10_P1_K2_BF",
            "ASLETISMAC_NO_X1_Y10_P1_K2_BF",
            "ASLETISMAC_NO_X010_Y10_P1_K2_BF",
            "ASLETISMAC_NO_X10_Y10_PX_K3_BF",
            "ASLETISMAC_NO_X10_Y10_P1_K4_BF",
            "ASLETISMAC_NO_X10_Y10_P1_K2_BX",
            "",
        ] {
            assert!(
                matches!(InstanceSpec::parse(bad), Err(InstanceError::MalformedName(_))),
                "{bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn formats_names() {
        assert_eq!(
            spec("ASLETISMAC_NO_X14_Y14_PM_K3_BF").name(),
            "ASLETISMAC_NO_X14_Y14_PM_K3_BF"
        );
        let s = InstanceSpec {
            obstacle: ObstacleKind::Lake,
            size_x: 8,
            size_y: 8,
            elevation: ElevationKind::Hills2,
            neighbourhood: Neighbourhood::K2,
            backtracking: true,
            lake_radius_ratio: DEFAULT_LAKE_RADIUS_RATIO,
        };
        assert_eq!(s.name(), "ASLETISMAC_LA_X8_Y8_P2_K2_BT");
    }

    #[test]
    fn name_round_trips_over_the_full_grammar() {
        for obstacle in ObstacleKind::ALL {
            for elevation in ElevationKind::ALL {
                for neighbourhood in Neighbourhood::ALL {
                    for backtracking in [false, true] {
                        let name = format!(
                            "{}_{}_X10_Y10_{}_K{}_B{}",
                            NAME_PREFIX,
                            obstacle.tag(),
                            elevation.tag(),
                            neighbourhood.k(),
                            if backtracking { "T" } else { "F" }
                        );
                        assert_eq!(spec(&name).name(), name);
                    }
                }
            }
        }
    }

    #[test]
    fn checkerboard_obstacles_block_odd_cells() {
        let s = spec("ASLETISMAC_CH_X6_Y6_PM_K2_BF");
        assert!(s.is_obstacle(1, 1).unwrap());
        assert!(!s.is_obstacle(0, 1).unwrap());
        assert!(!s.is_obstacle(2, 4).unwrap());
        // Full 6x6 pattern: odd-odd blocks with the end corner exempted.
        let mut blocked = Vec::new();
        for y in 0..6 {
            for x in 0..6 {
                if s.is_obstacle(x, y).unwrap() {
                    blocked.push((x, y));
                }
            }
        }
        assert_eq!(
            blocked,
            [(1, 1), (3, 1), (5, 1), (1, 3), (3, 3), (5, 3), (1, 5), (3, 5)]
        );
    }

    #[test]
    fn lake_is_the_open_disk() {
        let mut s = spec("ASLETISMAC_LA_X20_Y20_PM_K2_BF");
        assert!(s.is_obstacle(10, 10).unwrap(), "circle centre is blocked");
        // Exactly the cells strictly inside the radius-5 circle at (10, 10).
        for y in 0..20 {
            for x in 0..20 {
                if (x, y) == (0, 0) || (x, y) == (19, 19) {
                    continue;
                }
                let dx = f64::from(x) - 10.0;
                let dy = f64::from(y) - 10.0;
                let inside = dx * dx + dy * dy < 25.0;
                assert_eq!(s.is_obstacle(x, y).unwrap(), inside, "cell ({x}, {y})");
            }
        }
        // The ratio is adjustable.
        s.lake_radius_ratio = 0.0;
        assert!(!s.is_obstacle(10, 10).unwrap());
    }

    #[test]
    fn start_and_end_are_always_passable() {
        for obstacle in ObstacleKind::ALL {
            let mut s = spec("ASLETISMAC_NO_X9_Y9_PM_K2_BF");
            s.obstacle = obstacle;
            s.lake_radius_ratio = 10.0; // would cover everything
            assert!(!s.is_obstacle(0, 0).unwrap());
            assert!(!s.is_obstacle(8, 8).unwrap());
        }
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        let s = spec("ASLETISMAC_NO_X5_Y7_PM_K2_BF");
        assert!(matches!(
            s.is_obstacle(5, 0),
            Err(InstanceError::OutOfBounds { .. })
        ));
        assert!(matches!(
            s.velocity_at(0, 7),
            Err(InstanceError::OutOfBounds { .. })
        ));
        assert!(matches!(
            s.elevation_at(9, 9),
            Err(InstanceError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn velocity_tiers_follow_the_street_field() {
        let s = spec("ASLETISMAC_NO_X10_Y10_PM_K2_BF");
        // w(0,0) = max(sin 0, cos 0) = 1 > 0.9
        assert_eq!(s.velocity_at(0, 0).unwrap(), VELOCITY_HIGHWAY);
        // w(4,2) = max(sin 4, cos 2) = max(-0.7568..., -0.4161...) < -0.4
        assert!(f64::sin(4.0) < -0.4 && f64::cos(2.0) < -0.4);
        assert_eq!(s.velocity_at(4, 2).unwrap(), VELOCITY_CITY);
        // Obstacles override every tier.
        let ch = spec("ASLETISMAC_CH_X10_Y10_PM_K2_BF");
        assert_eq!(ch.velocity_at(1, 1).unwrap(), 0.0);
    }

    #[test]
    fn velocity_codomain_is_the_four_tiers() {
        for name in [
            "ASLETISMAC_NO_X13_Y7_PM_K2_BF",
            "ASLETISMAC_CH_X12_Y12_P2_K3_BT",
            "ASLETISMAC_LA_X16_Y16_P3_K3_BF",
        ] {
            let world = spec(name).build_world();
            for &v in world.velocity.values() {
                assert!(
                    v == 0.0 || v == VELOCITY_CITY || v == VELOCITY_COUNTRY || v == VELOCITY_HIGHWAY,
                    "unexpected velocity {v}"
                );
            }
        }
    }

    #[test]
    fn peaks_value_at_grid_centre() {
        // Odd-sized grid: the centre cell maps to (0, 0) where the peaks
        // surface evaluates to (8/3)e^{-1}.
        let s = spec("ASLETISMAC_NO_X11_Y11_PM_K2_BF");
        let expected = (8.0 / 3.0) * (-1.0f64).exp();
        assert!((s.elevation_at(5, 5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.9810).abs() < 1e-4);
    }

    #[test]
    fn first_hill_peaks_at_five() {
        // On a 5x5 grid, cell (1, 1) maps exactly to (-1.5, -1.5).
        let s = spec("ASLETISMAC_NO_X5_Y5_P1_K2_BF");
        assert!((s.elevation_at(1, 1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn elevation_kinds_are_additive() {
        let base = spec("ASLETISMAC_NO_X9_Y8_P1_K2_BF");
        for y in 0..8 {
            for x in 0..9 {
                let u = hill_coord(x, 9);
                let v = hill_coord(y, 8);
                let p1 = ElevationKind::Hills1.sample(u, v);
                let p2 = ElevationKind::Hills2.sample(u, v);
                let p3 = ElevationKind::Hills3.sample(u, v);
                assert!((p2 - p1 - hill(u, v, 1.5, 1.5)).abs() < 1e-12);
                assert!((p3 - p2 - hill(u, v, 1.5, -1.5)).abs() < 1e-12);
                assert_eq!(base.elevation_at(x, y).unwrap(), p1);
            }
        }
    }

    #[test]
    fn build_world_counts_obstacles() {
        assert_eq!(spec("ASLETISMAC_NO_X10_Y10_PM_K2_BF").build_world().obstacle_count(), 0);
        // 5x5 odd-odd cells minus the exempted end corner (9, 9).
        assert_eq!(spec("ASLETISMAC_CH_X10_Y10_PM_K2_BF").build_world().obstacle_count(), 24);
    }

    #[test]
    fn build_world_is_deterministic() {
        let s = spec("ASLETISMAC_LA_X12_Y9_P3_K3_BT");
        assert_eq!(s.build_world(), s.build_world());
    }

    #[test]
    fn elevation_changes_are_lipschitz_bounded() {
        // Independent bound: sample the landscape's axis slopes on a fine
        // mesh of the (-3, 3) domain, then check that neighbouring grid
        // cells never differ by more than slope * cell width (plus margin).
        for kind in ElevationKind::ALL {
            let steps = 1200;
            let mesh = 6.0 / steps as f64;
            let mut max_slope = 0.0f64;
            for i in 0..steps {
                for j in 0..=steps {
                    let (a, b) = (-3.0 + i as f64 * mesh, -3.0 + (i + 1) as f64 * mesh);
                    let c = -3.0 + j as f64 * mesh;
                    let du = (kind.sample(b, c) - kind.sample(a, c)).abs() / mesh;
                    let dv = (kind.sample(c, b) - kind.sample(c, a)).abs() / mesh;
                    max_slope = max_slope.max(du).max(dv);
                }
            }
            let mut s = spec("ASLETISMAC_NO_X15_Y15_PM_K2_BF");
            s.elevation = kind;
            let world = s.build_world();
            let cell_width = 6.0 / 14.0;
            let bound = max_slope * cell_width * 1.1;
            for y in 0..15 {
                for x in 0..15 {
                    if x < 14 {
                        let dx = (world.elevation.get(x + 1, y) - world.elevation.get(x, y)).abs();
                        assert!(dx <= bound, "{kind:?} x-jump at ({x}, {y})");
                    }
                    if y < 14 {
                        let dy = (world.elevation.get(x, y + 1) - world.elevation.get(x, y)).abs();
                        assert!(dy <= bound, "{kind:?} y-jump at ({x}, {y})");
                    }
                }
            }
        }
    }

    #[test]
    fn world_json_has_row_major_fields() {
        let world = spec("ASLETISMAC_NO_X3_Y2_PM_K2_BF").build_world();
        let doc: serde_json::Value = serde_json::from_str(&world.to_json_string()).unwrap();
        assert_eq!(doc["spec"], "ASLETISMAC_NO_X3_Y2_PM_K2_BF");
        assert_eq!(doc["velocity"].as_array().unwrap().len(), 6);
        assert_eq!(doc["elevation"].as_array().unwrap().len(), 6);
        let v00 = doc["velocity"][0].as_f64().unwrap();
        assert_eq!(v00, world.velocity.get(0, 0));
        let v10 = doc["velocity"][1].as_f64().unwrap();
        assert_eq!(v10, world.velocity.get(1, 0));
    }
}
