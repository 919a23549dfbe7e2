use crate::domain::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RadioMode {
    Sleep,
    Idle,
    Sense,
    Receive,
    Transmit,
}

impl RadioMode {
    pub const ALL: [RadioMode; 5] = [
        RadioMode::Sleep,
        RadioMode::Idle,
        RadioMode::Sense,
        RadioMode::Receive,
        RadioMode::Transmit,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            RadioMode::Sleep => "sleep",
            RadioMode::Idle => "idle",
            RadioMode::Sense => "sense",
            RadioMode::Receive => "receive",
            RadioMode::Transmit => "transmit",
        }
    }
}

/// Radio power draw per mode, watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub transmit: f64,
    pub receive: f64,
    pub idle: f64,
    pub sleep: f64,
    pub sense: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            transmit: 1.4,
            receive: 1.0,
            idle: 0.83,
            sleep: 0.13,
            sense: 1.0,
        }
    }
}

impl PowerProfile {
    pub fn power(&self, mode: RadioMode) -> f64 {
        match mode {
            RadioMode::Sleep => self.sleep,
            RadioMode::Idle => self.idle,
            RadioMode::Sense => self.sense,
            RadioMode::Receive => self.receive,
            RadioMode::Transmit => self.transmit,
        }
    }
}

/// Per-node account of time and energy spent in each radio mode.
///
/// Activity intervals are booked ahead of time and settled lazily. Where
/// bookings overlap the higher mode wins (transmit over receive over
/// sense); uncovered time is charged to the background mode, idle unless
/// the node sleeps.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    profile: PowerProfile,
    background: RadioMode,
    duration: [f64; 5],
    energy: [f64; 5],
    settled: SimTime,
    booked: Vec<(SimTime, SimTime, RadioMode)>,
}

impl EnergyLedger {
    pub fn new(profile: PowerProfile) -> Self {
        Self {
            profile,
            background: RadioMode::Idle,
            duration: [0.0; 5],
            energy: [0.0; 5],
            settled: 0.0,
            booked: Vec::new(),
        }
    }

    pub fn profile(&self) -> &PowerProfile {
        &self.profile
    }

    pub fn set_background(&mut self, now: SimTime, mode: RadioMode) {
        self.settle(now);
        self.background = mode;
    }

    /// Books `mode` for `[start, end)`. Intervals before the settled point
    /// are clipped.
    pub fn book(&mut self, start: SimTime, end: SimTime, mode: RadioMode) {
        let start = start.max(self.settled);
        if end > start {
            self.booked.push((start, end, mode));
        }
    }

    fn charge(&mut self, mode: RadioMode, dt: f64) {
        if dt > 0.0 {
            self.duration[mode.index()] += dt;
            self.energy[mode.index()] += dt * self.profile.power(mode);
        }
    }

    /// Accounts all time up to `t`.
    pub fn settle(&mut self, t: SimTime) {
        if t <= self.settled {
            return;
        }
        let mut cuts: Vec<SimTime> = vec![self.settled, t];
        for &(s, e, _) in &self.booked {
            if s < t {
                cuts.push(s);
                cuts.push(e.min(t));
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid_active = self
                .booked
                .iter()
                .filter(|&&(s, e, _)| s <= a && e >= b)
                .map(|&(_, _, m)| m)
                .max();
            let mode = mid_active.unwrap_or(self.background);
            self.charge(mode, b - a);
        }
        self.booked.retain(|&(_, e, _)| e > t);
        for b in &mut self.booked {
            b.0 = b.0.max(t);
        }
        self.settled = t;
    }

    pub fn settled_to(&self) -> SimTime {
        self.settled
    }

    pub fn duration(&self, mode: RadioMode) -> f64 {
        self.duration[mode.index()]
    }

    pub fn energy(&self, mode: RadioMode) -> f64 {
        self.energy[mode.index()]
    }

    pub fn total_duration(&self) -> f64 {
        self.duration.iter().sum()
    }

    pub fn total_energy(&self) -> f64 {
        self.energy.iter().sum()
    }

    /// `sum(duration x power)` recomputed from the mode durations.
    pub fn recomputed_energy(&self) -> f64 {
        RadioMode::ALL
            .iter()
            .map(|&m| self.duration(m) * self.profile.power(m))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_fills_gaps() {
        let mut l = EnergyLedger::new(PowerProfile::default());
        l.book(1.0, 2.0, RadioMode::Transmit);
        l.settle(10.0);
        assert_eq!(l.duration(RadioMode::Transmit), 1.0);
        assert_eq!(l.duration(RadioMode::Idle), 9.0);
        assert_eq!(l.total_duration(), 10.0);
        assert!((l.total_energy() - (1.4 + 9.0 * 0.83)).abs() < 1e-12);
    }

    #[test]
    fn overlap_charged_to_higher_mode() {
        let mut l = EnergyLedger::new(PowerProfile::default());
        l.book(0.0, 3.0, RadioMode::Receive);
        l.book(1.0, 2.0, RadioMode::Transmit);
        l.book(2.5, 4.0, RadioMode::Sense);
        l.settle(5.0);
        assert_eq!(l.duration(RadioMode::Transmit), 1.0);
        assert_eq!(l.duration(RadioMode::Receive), 2.0);
        assert_eq!(l.duration(RadioMode::Sense), 1.0);
        assert_eq!(l.duration(RadioMode::Idle), 1.0);
    }

    #[test]
    fn bookings_span_settle_points() {
        let mut l = EnergyLedger::new(PowerProfile::default());
        l.book(1.0, 3.0, RadioMode::Receive);
        l.settle(2.0);
        assert_eq!(l.duration(RadioMode::Receive), 1.0);
        l.settle(4.0);
        assert_eq!(l.duration(RadioMode::Receive), 2.0);
        assert_eq!(l.total_duration(), 4.0);
    }

    #[test]
    fn sleeping_background() {
        let mut l = EnergyLedger::new(PowerProfile::default());
        l.set_background(2.0, RadioMode::Sleep);
        l.settle(4.0);
        assert_eq!(l.duration(RadioMode::Idle), 2.0);
        assert_eq!(l.duration(RadioMode::Sleep), 2.0);
    }
}
