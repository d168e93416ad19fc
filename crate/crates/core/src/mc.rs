//! Monte Carlo adaptive concatenation.
//!
//! Each sample follows one syndrome path through the whole concatenation
//! tree: a node draws a conditional channel for each of its children, runs
//! the level map on them and picks a syndrome with its probability. The root
//! channel, optimized, gives one entropy sample.
//!
//! Samples are split into a fixed number of streams. Stream `s` draws from
//! ChaCha8 seeded with `seed` on stream `s`, so results depend on the seed,
//! the sample count and the stream count, never on the thread count.

use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{exact_level, ExactOptions};
use crate::channel::{entropy, PauliProbVec};
use crate::ensemble::{canonicalize, ChannelEnsemble, DEFAULT_DEDUP_TOLERANCE};
use crate::error::{QecError, Result};
use crate::level::LevelMap;

pub const DEFAULT_STREAMS: usize = 16;
pub const DEFAULT_MEMO_CAPACITY: usize = 1 << 14;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: u64,
    pub seed: u64,
    pub streams: usize,
    /// Cached level-map results per level and stream.
    pub memo_capacity: usize,
    pub dedup_tolerance: f64,
}

impl McOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        McOptions {
            samples,
            seed,
            streams: DEFAULT_STREAMS,
            memo_capacity: DEFAULT_MEMO_CAPACITY,
            dedup_tolerance: DEFAULT_DEDUP_TOLERANCE,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean_entropy: f64,
    /// One standard error of `mean_entropy`.
    pub std_error: f64,
    pub samples: u64,
    /// Mean of `1 - max_sigma p_sigma` over the sampled root channels.
    pub mean_infidelity: f64,
    pub seed: u64,
}

type Key = Vec<[u64; 4]>;

/// Syndrome distribution of one node: cumulative weights and the
/// conditional channels, unnormalized except at the bottom level.
struct Node {
    cumulative: Vec<f64>,
    channels: Vec<PauliProbVec>,
}

impl Node {
    fn pick(&self, rng: &mut ChaCha8Rng) -> &PauliProbVec {
        let total = *self.cumulative.last().expect("non-empty node");
        let u = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        &self.channels[i.min(self.channels.len() - 1)]
    }

    /// Draws a syndrome and returns its canonicalized conditional channel.
    fn sample(&self, rng: &mut ChaCha8Rng, tol: f64) -> PauliProbVec {
        let q = self.pick(rng);
        canonicalize(&q.scaled(1.0 / q.weight()), tol).1
    }
}

struct Sampler<'a> {
    map: &'a LevelMap,
    bottom: Node,
    memo: Vec<HashMap<Key, Rc<Node>>>,
    capacity: usize,
    tol: f64,
    quasi: Vec<PauliProbVec>,
    scratch: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(map: &'a LevelMap, bottom: &ChannelEnsemble, levels: usize, opts: &McOptions) -> Self {
        let mut cumulative = Vec::with_capacity(bottom.len());
        let mut acc = 0.0;
        for e in bottom.entries() {
            acc += e.weight;
            cumulative.push(acc);
        }
        let channels = bottom.entries().iter().map(|e| e.channel).collect();
        Sampler {
            map,
            bottom: Node { cumulative, channels },
            memo: (0..levels).map(|_| HashMap::new()).collect(),
            capacity: opts.memo_capacity,
            tol: opts.dedup_tolerance,
            quasi: vec![PauliProbVec([0.0; 4]); map.num_syndromes()],
            scratch: Vec::new(),
        }
    }

    fn node(&mut self, level: usize, children: &[PauliProbVec]) -> Rc<Node> {
        let key: Key = children.iter().map(|c| c.0.map(f64::to_bits)).collect();
        if let Some(n) = self.memo[level].get(&key) {
            return n.clone();
        }
        self.map.coset_quasi_into(children, &mut self.quasi, &mut self.scratch);
        let mut cumulative = Vec::new();
        let mut channels = Vec::new();
        let mut acc = 0.0;
        for q in &self.quasi {
            let w = q.weight();
            if w > 0.0 {
                acc += w;
                cumulative.push(acc);
                channels.push(*q);
            }
        }
        let node = Rc::new(Node { cumulative, channels });
        if self.memo[level].len() < self.capacity {
            self.memo[level].insert(key, node.clone());
        }
        node
    }

    /// Conditional channel seen at the output of one block of `level`.
    fn draw(&mut self, level: usize, rng: &mut ChaCha8Rng) -> PauliProbVec {
        if level == 1 {
            return *self.bottom.pick(rng);
        }
        let children: Vec<PauliProbVec> = (0..self.map.code().n()).map(|_| self.draw(level - 1, rng)).collect();
        self.node(level - 1, &children).sample(rng, self.tol)
    }
}

#[derive(Copy, Clone, Default)]
struct Sums {
    n: u64,
    h: f64,
    h2: f64,
    infidelity: f64,
}

/// Monte Carlo estimate of the logical entropy after `levels` levels of
/// adaptive concatenation with `base` on every physical qubit.
pub fn mc_concatenate(map: &LevelMap, base: &PauliProbVec, levels: usize, opts: &McOptions) -> Result<McEstimate> {
    if levels == 0 {
        return Err(QecError::InvalidArgument("Monte Carlo needs at least one level".into()));
    }
    if opts.samples == 0 {
        return Err(QecError::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    if opts.streams == 0 {
        return Err(QecError::InvalidArgument("Monte Carlo needs at least one stream".into()));
    }
    let exact = ExactOptions { dedup_tolerance: opts.dedup_tolerance, ..ExactOptions::default() };
    let leaf = ChannelEnsemble::singleton(*base)?;
    let bottom = exact_level(map, &vec![&leaf; map.code().n()], &exact)?;

    let streams = opts.streams as u64;
    let per = opts.samples / streams;
    let extra = opts.samples % streams;
    let parts: Vec<Sums> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let count = per + u64::from(s < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(s);
            let mut sampler = Sampler::new(map, &bottom, levels, opts);
            let mut sums = Sums::default();
            for _ in 0..count {
                let c = sampler.draw(levels, &mut rng);
                let h = entropy(&c).expect("normalized channel");
                sums.n += 1;
                sums.h += h;
                sums.h2 += h * h;
                sums.infidelity += c.infidelity();
            }
            sums
        })
        .collect();

    let mut t = Sums::default();
    for p in parts {
        t.n += p.n;
        t.h += p.h;
        t.h2 += p.h2;
        t.infidelity += p.infidelity;
    }
    let n = t.n as f64;
    let mean = t.h / n;
    let var = if t.n > 1 { ((t.h2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(McEstimate {
        mean_entropy: mean,
        std_error: (var / n).sqrt(),
        samples: t.n,
        mean_infidelity: t.infidelity / n,
        seed: opts.seed,
    })
}
