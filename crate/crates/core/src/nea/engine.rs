//! Minibatch NEG training loop shared by every trainer.

use std::sync::atomic::{AtomicU64, Ordering};

use super::neg::{draw_negatives, neg_step, NegScratch, NoiseTable, RowStore};
use super::TrainConfig;
use crate::matrix::Matrix;
use crate::sampling::{derived_rng, SeededRng};

/// One positive pair for a link: move `input` of the link's parent matrix
/// toward `output` of its child matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Update {
    pub link: usize,
    pub input: usize,
    pub output: usize,
}

/// Simulates training pairs. One call is one draw from the mimicked model
/// and may yield one update per link.
pub(crate) trait PairSource: Sync {
    fn draw(&self, rng: &mut SeededRng, out: &mut Vec<Update>);
}

pub(crate) struct LinkSlots {
    pub input_slot: usize,
    pub output_slot: usize,
    pub noise: NoiseTable,
}

pub(crate) struct Params {
    pub inputs: Vec<Matrix>,
    pub outputs: Vec<Matrix>,
}

/// Running NEG loss: each entry is the mean of `-objective` per pair over
/// the preceding `interval` minibatches.
#[derive(Debug, Clone, PartialEq)]
pub struct LossLog {
    pub interval: u64,
    pub entries: Vec<(u64, f64)>,
}

impl LossLog {
    fn from_objectives(objectives: &[f64], interval: u64) -> Self {
        let entries = objectives
            .chunks(interval as usize)
            .enumerate()
            .map(|(i, block)| {
                let end = i as u64 * interval + block.len() as u64;
                (end, -block.iter().sum::<f64>() / block.len() as f64)
            })
            .collect();
        LossLog { interval, entries }
    }

    /// CSV with header `minibatch,running_objective`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("minibatch,running_objective\n");
        for (t, v) in &self.entries {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }

    /// Least-squares slope of loss against minibatch index over the last
    /// half of the entries, or `None` with fewer than two points there.
    pub fn second_half_slope(&self) -> Option<f64> {
        let tail = &self.entries[self.entries.len() / 2..];
        if tail.len() < 2 {
            return None;
        }
        let n = tail.len() as f64;
        let mx = tail.iter().map(|(t, _)| *t as f64).sum::<f64>() / n;
        let my = tail.iter().map(|(_, v)| v).sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (t, v) in tail {
            let dx = *t as f64 - mx;
            sxy += dx * (v - my);
            sxx += dx * dx;
        }
        Some(sxy / sxx)
    }
}

fn run_minibatch<I: RowStore, O: RowStore>(
    stores: &mut dyn FnMut(usize) -> (I, O),
    links: &[LinkSlots],
    updates: &[Update],
    config: &TrainConfig,
    lr: f64,
    rng: &mut SeededRng,
    negatives: &mut Vec<usize>,
    scratch: &mut NegScratch,
) -> f64 {
    let mut total = 0.0;
    for u in updates {
        let link = &links[u.link];
        draw_negatives(
            &link.noise,
            u.output,
            config.negatives,
            config.reject_positive_negatives,
            rng,
            negatives,
        );
        let (mut inp, mut out) = stores(u.link);
        total += neg_step(&mut inp, u.input, &mut out, u.output, negatives, lr, scratch);
    }
    total / updates.len().max(1) as f64
}

pub(crate) fn train<S: PairSource>(
    params: &mut Params,
    links: &[LinkSlots],
    source: &S,
    config: &TrainConfig,
    seed: u64,
) -> LossLog {
    if config.workers > 1 {
        return train_hogwild(params, links, source, config, seed);
    }
    let mut rng = derived_rng(seed, 1);
    let mut objectives = Vec::with_capacity(config.minibatches as usize);
    let mut updates = Vec::new();
    let mut negatives = Vec::with_capacity(config.negatives);
    let mut scratch = NegScratch::default();
    for t in 0..config.minibatches {
        updates.clear();
        for _ in 0..config.batch_size {
            source.draw(&mut rng, &mut updates);
        }
        let lr = config.learning_rate_at(t);
        let mut total = 0.0;
        for u in &updates {
            let link = &links[u.link];
            draw_negatives(
                &link.noise,
                u.output,
                config.negatives,
                config.reject_positive_negatives,
                &mut rng,
                &mut negatives,
            );
            let inp = &mut params.inputs[link.input_slot];
            let out = &mut params.outputs[link.output_slot];
            total += neg_step(inp, u.input, out, u.output, &negatives, lr, &mut scratch);
        }
        objectives.push(total / updates.len().max(1) as f64);
    }
    LossLog::from_objectives(&objectives, config.log_interval)
}

/// Matrix of `f64` bit patterns that workers read and write without locks.
/// Concurrent read-modify-write may lose updates; that is the contract.
struct SharedMatrix {
    cols: usize,
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_matrix(m: &Matrix) -> Self {
        SharedMatrix {
            cols: m.cols(),
            data: m.as_slice().iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
        }
    }

    fn to_matrix(&self) -> Matrix {
        let rows = if self.cols == 0 { 0 } else { self.data.len() / self.cols };
        let data = self
            .data
            .iter()
            .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
            .collect();
        Matrix::from_vec(rows, self.cols, data).expect("sized")
    }
}

#[derive(Clone, Copy)]
struct SharedRows<'a>(&'a SharedMatrix);

impl RowStore for SharedRows<'_> {
    fn dim(&self) -> usize {
        self.0.cols
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        let base = row * self.0.cols;
        for (o, a) in out.iter_mut().zip(&self.0.data[base..base + self.0.cols]) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add_row(&mut self, row: usize, delta: &[f64], scale: f64) {
        let base = row * self.0.cols;
        for (a, d) in self.0.data[base..base + self.0.cols].iter().zip(delta) {
            let v = f64::from_bits(a.load(Ordering::Relaxed)) + scale * d;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

fn train_hogwild<S: PairSource>(
    params: &mut Params,
    links: &[LinkSlots],
    source: &S,
    config: &TrainConfig,
    seed: u64,
) -> LossLog {
    let inputs: Vec<SharedMatrix> = params.inputs.iter().map(SharedMatrix::from_matrix).collect();
    let outputs: Vec<SharedMatrix> = params.outputs.iter().map(SharedMatrix::from_matrix).collect();
    let objectives: Vec<AtomicU64> = (0..config.minibatches).map(|_| AtomicU64::new(0)).collect();
    let next = AtomicU64::new(0);

    std::thread::scope(|scope| {
        for worker in 0..config.workers {
            let (inputs, outputs, objectives, next) = (&inputs, &outputs, &objectives, &next);
            scope.spawn(move || {
                let mut rng = derived_rng(seed, 1 + worker as u64);
                let mut updates = Vec::new();
                let mut negatives = Vec::new();
                let mut scratch = NegScratch::default();
                let mut stores = |link: usize| {
                    let l = &links[link];
                    (SharedRows(&inputs[l.input_slot]), SharedRows(&outputs[l.output_slot]))
                };
                loop {
                    let t = next.fetch_add(1, Ordering::Relaxed);
                    if t >= config.minibatches {
                        break;
                    }
                    updates.clear();
                    for _ in 0..config.batch_size {
                        source.draw(&mut rng, &mut updates);
                    }
                    let obj = run_minibatch(
                        &mut stores,
                        links,
                        &updates,
                        config,
                        config.learning_rate_at(t),
                        &mut rng,
                        &mut negatives,
                        &mut scratch,
                    );
                    objectives[t as usize].store(obj.to_bits(), Ordering::Relaxed);
                }
            });
        }
    });

    params.inputs = inputs.iter().map(SharedMatrix::to_matrix).collect();
    params.outputs = outputs.iter().map(SharedMatrix::to_matrix).collect();
    let objectives: Vec<f64> = objectives
        .iter()
        .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
        .collect();
    LossLog::from_objectives(&objectives, config.log_interval)
}
