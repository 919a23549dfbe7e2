//! Piecewise-linear mobility. Both models move a node along straight legs at
//! a constant per-leg speed; they differ in how the next target is chosen.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domain::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }

    fn lerp(self, other: Point, f: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * f, self.y + (other.y - self.y) * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityModel {
    RandomWaypoint,
    /// `g x g` intersections on a regular street grid covering the area.
    StreetGrid { grid: usize },
    Static,
}

impl MobilityModel {
    pub fn label(self) -> &'static str {
        match self {
            Self::RandomWaypoint => "rwp",
            Self::StreetGrid { .. } => "street",
            Self::Static => "static",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub model: MobilityModel,
    pub width: f64,
    pub height: f64,
    pub speed_min: f64,
    pub speed_max: f64,
}

/// One node's motion state.
#[derive(Debug, Clone)]
pub struct Mover {
    params: MobilityParams,
    from: Point,
    to: Point,
    speed: f64,
    leg_start: SimTime,
    leg_end: SimTime,
    now: SimTime,
    /// Current grid cell index for the street model.
    at: (usize, usize),
    heading: (usize, usize),
    rng: ChaCha8Rng,
}

impl Mover {
    pub fn new(params: MobilityParams, mut rng: ChaCha8Rng) -> Self {
        let (start, at) = match params.model {
            MobilityModel::StreetGrid { grid } => {
                let g = grid.max(2);
                let at = (rng.random_range(0..g), rng.random_range(0..g));
                (grid_point(&params, g, at), at)
            }
            _ => (uniform_point(&params, &mut rng), (0, 0)),
        };
        let mut m = Self {
            params,
            from: start,
            to: start,
            speed: 0.0,
            leg_start: 0.0,
            leg_end: 0.0,
            now: 0.0,
            at,
            heading: at,
            rng,
        };
        m.next_leg(0.0);
        m
    }

    /// A node pinned at `p`.
    pub fn fixed(p: Point, rng: ChaCha8Rng) -> Self {
        let params = MobilityParams {
            model: MobilityModel::Static,
            width: p.x.max(1.0),
            height: p.y.max(1.0),
            speed_min: 0.0,
            speed_max: 0.0,
        };
        Self {
            params,
            from: p,
            to: p,
            speed: 0.0,
            leg_start: 0.0,
            leg_end: f64::INFINITY,
            now: 0.0,
            at: (0, 0),
            heading: (0, 0),
            rng,
        }
    }

    fn next_leg(&mut self, t: SimTime) {
        self.from = self.to;
        self.leg_start = t;
        match self.params.model {
            MobilityModel::Static => {
                self.leg_end = f64::INFINITY;
                return;
            }
            MobilityModel::RandomWaypoint => {
                self.to = uniform_point(&self.params, &mut self.rng);
            }
            MobilityModel::StreetGrid { grid } => {
                let g = grid.max(2);
                self.at = self.heading;
                let (i, j) = self.at;
                let mut options = Vec::with_capacity(4);
                if i > 0 {
                    options.push((i - 1, j));
                }
                if i + 1 < g {
                    options.push((i + 1, j));
                }
                if j > 0 {
                    options.push((i, j - 1));
                }
                if j + 1 < g {
                    options.push((i, j + 1));
                }
                self.heading = options[self.rng.random_range(0..options.len())];
                self.to = grid_point(&self.params, g, self.heading);
            }
        }
        let lo = self.params.speed_min;
        let hi = self.params.speed_max.max(lo);
        self.speed = if hi > lo { self.rng.random_range(lo..=hi) } else { lo };
        let d = self.from.distance(self.to);
        self.leg_end = if self.speed > 0.0 {
            t + d / self.speed
        } else {
            f64::INFINITY
        };
    }

    /// Advances the motion to time `t` (never backwards).
    pub fn advance_to(&mut self, t: SimTime) {
        if t <= self.now {
            return;
        }
        while self.leg_end <= t {
            let end = self.leg_end;
            self.next_leg(end);
        }
        self.now = t;
    }

    pub fn step(&mut self, dt: SimTime) {
        self.advance_to(self.now + dt);
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn position(&self) -> Point {
        if !self.leg_end.is_finite() || self.leg_end <= self.leg_start {
            return if self.leg_end.is_finite() { self.to } else { self.from };
        }
        let f = ((self.now - self.leg_start) / (self.leg_end - self.leg_start)).clamp(0.0, 1.0);
        self.from.lerp(self.to, f)
    }

    pub fn waypoint(&self) -> Point {
        self.to
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn leg_end(&self) -> SimTime {
        self.leg_end
    }
}

fn uniform_point(p: &MobilityParams, rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.random_range(0.0..=p.width), rng.random_range(0.0..=p.height))
}

fn grid_point(p: &MobilityParams, g: usize, (i, j): (usize, usize)) -> Point {
    let step_x = p.width / (g - 1) as f64;
    let step_y = p.height / (g - 1) as f64;
    Point::new(i as f64 * step_x, j as f64 * step_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn params(model: MobilityModel) -> MobilityParams {
        MobilityParams {
            model,
            width: 500.0,
            height: 500.0,
            speed_min: 1.0,
            speed_max: 20.0,
        }
    }

    #[test]
    fn zero_step_keeps_position() {
        let mut m = Mover::new(params(MobilityModel::RandomWaypoint), ChaCha8Rng::seed_from_u64(1));
        m.advance_to(3.0);
        let p = m.position();
        m.step(0.0);
        assert_eq!(m.position(), p);
    }

    #[test]
    fn displacement_is_speed_times_dt_within_leg() {
        let mut m = Mover::new(params(MobilityModel::RandomWaypoint), ChaCha8Rng::seed_from_u64(2));
        let start = m.position();
        let v = m.speed();
        let dt = (m.leg_end() / 2.0).min(1.0);
        m.step(dt);
        let moved = start.distance(m.position());
        assert!((moved - v * dt).abs() < 1e-9 * (1.0 + v * dt), "{moved} vs {}", v * dt);
    }

    #[test]
    fn street_nodes_stay_on_streets() {
        let mut m = Mover::new(params(MobilityModel::StreetGrid { grid: 6 }), ChaCha8Rng::seed_from_u64(3));
        let step = 100.0;
        for k in 1..2000 {
            m.advance_to(k as f64 * 0.7);
            let p = m.position();
            let on_x = (p.x / step - (p.x / step).round()).abs() < 1e-6;
            let on_y = (p.y / step - (p.y / step).round()).abs() < 1e-6;
            assert!(on_x || on_y, "{p:?} off grid");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn rwp_stays_in_bounds(seed in any::<u64>()) {
            let mut m = Mover::new(params(MobilityModel::RandomWaypoint), ChaCha8Rng::seed_from_u64(seed));
            for k in 1..=100_000u32 {
                m.step(0.5);
                if k % 97 == 0 {
                    let p = m.position();
                    prop_assert!((0.0..=500.0).contains(&p.x) && (0.0..=500.0).contains(&p.y));
                }
            }
        }
    }
}
