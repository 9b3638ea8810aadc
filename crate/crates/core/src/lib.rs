//! Scheduling unit-task DAGs on asymmetric multiprocessors.
//!
//! The crate works on an exact-rational model: every time, speed, work and
//! energy figure is a [`Rational`]. It provides
//!
//! * [`remnants`]: a non-preemptive round-based scheduler for chains on one fast
//!   and `m - 1` slow processors, within `1/s` of optimal;
//! * [`lprelax`]: an LP relaxation over fast/slow speed assignments, randomized
//!   rounding and speed-based list scheduling;
//! * [`save_energy`]: a preemptive post-processor that moves work onto slower
//!   processors without increasing the makespan;
//! * [`bounds`] and [`oracle`]: closed-form lower bounds, an exact
//!   branch-and-bound optimum, an exact minimum-energy oracle and the
//!   symmetric-to-asymmetric schedule transformation.

pub mod bounds;
pub mod harness;
pub mod lprelax;
pub mod oracle;
pub mod power;
pub mod rational;
pub mod remnants;
pub mod save_energy;
pub mod schedule;
pub mod simplex;
pub mod taskmodel;

pub use rational::{rat, Rational};
pub use schedule::{Schedule, Segment};
pub use taskmodel::{ChainSet, EnergyParams, Instance, MachineConfig, TaskGraph, TaskId, TwoSpeedView};
