use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::WalkError;
use crate::env::{EnvError, Environment1D};
use crate::rng::{rng_from_seed, SimRng};

/// Nearest-neighbour walker on an environment's threshold table.
pub(crate) struct Walker<'e> {
    thresholds: &'e [u64],
    idx: usize,
    origin: i64,
    pub(crate) rng: SimRng,
}

impl<'e> Walker<'e> {
    pub(crate) fn new(env: &'e Environment1D, start: i64, rng: SimRng) -> Result<Self, WalkError> {
        env.window().check(start)?;
        Ok(Walker { thresholds: env.thresholds(), idx: env.index(start), origin: env.window().min, rng })
    }

    #[inline]
    pub(crate) fn position(&self) -> i64 {
        self.origin + self.idx as i64
    }

    /// One jump; `false` if it would leave the window (the walker stays put).
    #[inline]
    pub(crate) fn step(&mut self) -> bool {
        if self.rng.next_u64() < self.thresholds[self.idx] {
            if self.idx + 1 == self.thresholds.len() {
                return false;
            }
            self.idx += 1;
        } else {
            if self.idx == 0 {
                return false;
            }
            self.idx -= 1;
        }
        true
    }

    /// Forces the walker to `x` (used to condition on a first jump).
    pub(crate) fn place(&mut self, x: i64) {
        self.idx = (x - self.origin) as usize;
    }

    /// `n` steps, or the step index at which the window was left.
    #[inline]
    pub(crate) fn run(&mut self, n: u64) -> Result<(), u64> {
        for t in 0..n {
            if !self.step() {
                return Err(t + 1);
            }
        }
        Ok(())
    }
}

/// A walk path: `positions[t] = X_t`, `t = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: i64,
    pub positions: Vec<i64>,
    pub env_seed: Option<u64>,
    pub walk_seed: u64,
}

impl Trajectory {
    pub fn horizon(&self) -> u64 {
        self.positions.len() as u64 - 1
    }

    pub fn final_position(&self) -> i64 {
        *self.positions.last().expect("trajectory holds X_0")
    }

    pub fn has_unit_increments(&self) -> bool {
        self.positions.windows(2).all(|w| (w[1] - w[0]).abs() == 1)
    }
}

/// Visit counts `xi(x, n) = #{t in [0, n] : X_t = x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeTable {
    pub horizon: u64,
    pub counts: BTreeMap<i64, u64>,
}

impl LocalTimeTable {
    pub fn count(&self, x: i64) -> u64 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Most visited site (leftmost on ties) and its count.
    pub fn argmax(&self) -> (i64, u64) {
        let mut best = (0, 0);
        for (&x, &c) in &self.counts {
            if c > best.1 {
                best = (x, c);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Passage {
    Hit(u64),
    NotHit,
}

/// `T_target = inf { t >= 1 : X_t = target }`, or `NotHit` within the step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageRecord {
    pub target: i64,
    pub time: Passage,
}

/// Quenched trajectory: from `x`, jump to `x + 1` with probability `p_x`.
pub fn simulate_quenched(
    env: &Environment1D,
    start: i64,
    n_steps: u64,
    walk_seed: u64,
) -> Result<Trajectory, WalkError> {
    let mut walker = Walker::new(env, start, rng_from_seed(walk_seed))?;
    let mut positions = Vec::with_capacity(n_steps as usize + 1);
    positions.push(start);
    for t in 0..n_steps {
        if !walker.step() {
            return Err(WalkError::WindowExit { window: env.window(), step: t + 1 });
        }
        positions.push(walker.position());
    }
    Ok(Trajectory { start, positions, env_seed: env.seed(), walk_seed })
}

pub fn local_time(traj: &Trajectory) -> LocalTimeTable {
    let mut counts = BTreeMap::new();
    for &x in &traj.positions {
        *counts.entry(x).or_insert(0) += 1;
    }
    LocalTimeTable { horizon: traj.horizon(), counts }
}

/// Local time of a fresh quenched walk without storing its path.
pub fn simulate_local_time(
    env: &Environment1D,
    start: i64,
    n_steps: u64,
    walk_seed: u64,
) -> Result<LocalTimeTable, WalkError> {
    let mut walker = Walker::new(env, start, rng_from_seed(walk_seed))?;
    let mut dense = vec![0u64; env.window().len()];
    let base = env.window().min;
    dense[(start - base) as usize] += 1;
    for t in 0..n_steps {
        if !walker.step() {
            return Err(WalkError::WindowExit { window: env.window(), step: t + 1 });
        }
        dense[(walker.position() - base) as usize] += 1;
    }
    let counts = dense
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (base + i as i64, c))
        .collect();
    Ok(LocalTimeTable { horizon: n_steps, counts })
}

pub fn first_passage(
    env: &Environment1D,
    start: i64,
    target: i64,
    max_steps: u64,
    walk_seed: u64,
) -> Result<PassageRecord, WalkError> {
    env.window().check(target).map_err(|e| match e {
        EnvError::OutsideWindow { .. } => WalkError::BadTarget { k: target, reason: "outside the window" },
        other => other.into(),
    })?;
    let mut walker = Walker::new(env, start, rng_from_seed(walk_seed))?;
    for t in 1..=max_steps {
        if !walker.step() {
            return Err(WalkError::WindowExit { window: env.window(), step: t });
        }
        if walker.position() == target {
            return Ok(PassageRecord { target, time: Passage::Hit(t) });
        }
    }
    Ok(PassageRecord { target, time: Passage::NotHit })
}
