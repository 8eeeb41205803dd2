//! Random source abstraction.
//!
//! Every randomized operation in this crate draws through [`RandomSource`]
//! rather than a concrete generator. That keeps runs reproducible from a
//! single seed and lets scenario tests script the exact draw sequence.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

/// The three primitive draws used by walk sampling and index maintenance.
///
/// Contract shared by all implementations: `uniform_index(n)` with `n <= 1`
/// returns 0 *without consuming randomness*, so forced steps (single
/// out-neighbor, single active edge) do not disturb the draw stream.
pub trait RandomSource {
    /// Uniform index in `0..n`. `n` must be at least 1.
    fn uniform_index(&mut self, n: usize) -> usize;

    /// True with probability `p` (walk stop decisions, workload coin flips).
    fn chance(&mut self, p: f64) -> bool;

    /// A draw from Binomial(n, p).
    fn binomial(&mut self, n: u64, p: f64) -> u64;
}

/// Seedable, splittable source backed by ChaCha12.
///
/// Streams derived via [`ChaChaSource::split`] are statistically independent,
/// so one CLI seed can drive the dataset shuffle, the index build and the
/// update stream without draw-order coupling between them.
#[derive(Debug, Clone)]
pub struct ChaChaSource {
    rng: ChaCha12Rng,
}

impl ChaChaSource {
    pub fn seed_from(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Derive an independent stream of the same seed.
    pub fn split(&self, stream: u64) -> Self {
        let mut rng = self.rng.clone();
        rng.set_stream(stream);
        rng.set_word_pos(0u128);
        Self { rng }
    }
}

impl RandomSource for ChaChaSource {
    fn uniform_index(&mut self, n: usize) -> usize {
        debug_assert!(n >= 1, "uniform_index over empty range");
        if n <= 1 {
            return 0;
        }
        self.rng.random_range(0..n)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p)
            .expect("valid binomial parameters")
            .sample(&mut self.rng)
    }
}

/// One pre-recorded draw for [`ScriptedSource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    /// Expected answer to `uniform_index(n)` with `n >= 2`.
    Index(usize),
    /// Expected answer to `chance(..)`.
    Chance(bool),
    /// Expected answer to `binomial(..)`.
    Binomial(u64),
}

/// Replays a fixed sequence of draws; panics on any mismatch between the
/// requested draw kind and the scripted one.
///
/// Used by scenario tests that must steer walk sampling onto exact paths.
/// Note `uniform_index(1)` never consumes a draw (see [`RandomSource`]).
#[derive(Debug, Default)]
pub struct ScriptedSource {
    queue: VecDeque<Draw>,
    consumed: usize,
}

impl ScriptedSource {
    pub fn new(draws: impl IntoIterator<Item = Draw>) -> Self {
        Self {
            queue: draws.into_iter().collect(),
            consumed: 0,
        }
    }

    /// Number of draws consumed so far; diagnostics for failing scripts.
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn is_exhausted(&self) -> bool {
        self.queue.is_empty()
    }

    fn next(&mut self, what: &str) -> Draw {
        let draw = self
            .queue
            .pop_front()
            .unwrap_or_else(|| panic!("script exhausted at draw {} ({what})", self.consumed));
        self.consumed += 1;
        draw
    }
}

impl RandomSource for ScriptedSource {
    fn uniform_index(&mut self, n: usize) -> usize {
        debug_assert!(n >= 1, "uniform_index over empty range");
        if n <= 1 {
            return 0;
        }
        match self.next("uniform_index") {
            Draw::Index(i) => {
                assert!(
                    i < n,
                    "scripted index {i} out of range 0..{n} at draw {}",
                    self.consumed
                );
                i
            }
            other => panic!(
                "expected Index draw, script has {other:?} at draw {}",
                self.consumed
            ),
        }
    }

    fn chance(&mut self, _p: f64) -> bool {
        match self.next("chance") {
            Draw::Chance(b) => b,
            other => panic!(
                "expected Chance draw, script has {other:?} at draw {}",
                self.consumed
            ),
        }
    }

    fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        match self.next("binomial") {
            Draw::Binomial(k) => {
                assert!(
                    k <= n,
                    "scripted binomial {k} exceeds n={n} at draw {}",
                    self.consumed
                );
                k
            }
            other => {
                panic!(
                    "expected Binomial draw, script has {other:?} at draw {}",
                    self.consumed
                )
            }
        }
    }
}
