use super::embedding::{init_input, softmax_rows};
use super::engine::{self, LinkSlots, LossLog, PairSource, Params, Update};
use super::neg::NoiseTable;
use super::TrainConfig;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::{derived_rng, AliasTable, SeededRng};
use crate::topic_models::FactorizedModel;

/// Ancestral sampler for a [`FactorizedModel`]: one draw fixes every
/// variable and yields one `(parent, child)` update per link.
pub struct ChainSampler {
    root: AliasTable,
    /// `(parent, child, per-parent-value tables)` in ancestral order.
    links: Vec<(usize, usize, Vec<AliasTable>)>,
    num_vars: usize,
}

impl ChainSampler {
    pub fn new(model: &FactorizedModel) -> Result<Self> {
        let links = model
            .links()
            .iter()
            .map(|l| {
                let rows = l.table.iter_rows().map(AliasTable::new).collect::<Result<_>>()?;
                Ok((l.parent, l.child, rows))
            })
            .collect::<Result<_>>()?;
        Ok(ChainSampler {
            root: AliasTable::new(model.root())?,
            links,
            num_vars: model.variables().len(),
        })
    }

    /// Fills `values` with one joint draw, indexed by variable.
    pub fn sample(&self, rng: &mut SeededRng, values: &mut Vec<usize>) {
        values.clear();
        values.resize(self.num_vars, 0);
        values[0] = self.root.sample(rng);
        for (parent, child, rows) in &self.links {
            values[*child] = rows[values[*parent]].sample(rng);
        }
    }
}

impl PairSource for ChainSampler {
    fn draw(&self, rng: &mut SeededRng, out: &mut Vec<Update>) {
        let mut values = [0usize; 8];
        let mut heap;
        let values: &mut [usize] = if self.num_vars <= values.len() {
            &mut values[..self.num_vars]
        } else {
            heap = vec![0; self.num_vars];
            &mut heap
        };
        values[0] = self.root.sample(rng);
        for (i, (parent, child, rows)) in self.links.iter().enumerate() {
            let v = rows[values[*parent]].sample(rng);
            values[*child] = v;
            out.push(Update {
                link: i,
                input: values[*parent],
                output: v,
            });
        }
    }
}

/// Embeddings for every variable of a factorized model. A variable has an
/// input matrix when it is some link's parent and an output matrix when it
/// is a child; variables in both roles have both.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralEmbeddings {
    pub names: Vec<String>,
    pub inputs: Vec<Option<Matrix>>,
    pub outputs: Vec<Option<Matrix>>,
}

impl GeneralEmbeddings {
    pub fn input(&self, name: &str) -> Option<&Matrix> {
        let i = self.names.iter().position(|n| n == name)?;
        self.inputs[i].as_ref()
    }

    pub fn output(&self, name: &str) -> Option<&Matrix> {
        let i = self.names.iter().position(|n| n == name)?;
        self.outputs[i].as_ref()
    }

    /// Smoothed `P(child | parent)` for each link of `model`, in link order.
    pub fn smoothed(&self, model: &FactorizedModel) -> Result<Vec<Matrix>> {
        model
            .links()
            .iter()
            .map(|l| match (&self.inputs[l.parent], &self.outputs[l.child]) {
                (Some(i), Some(o)) => softmax_rows(i, o),
                _ => Err(Error::data(format!(
                    "no embeddings for link {} -> {}",
                    self.names[l.parent], self.names[l.child]
                ))),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct NeaGeneralOutput {
    pub embeddings: GeneralEmbeddings,
    /// One smoothed table per link, in the model's link order.
    pub smoothed: Vec<Matrix>,
    pub loss: LossLog,
}

/// Trains one embedding pair per link by simulating the whole chain each
/// draw. Noise for a link is the child's marginal raised to the configured
/// exponent.
pub fn train_nea_general(
    model: &FactorizedModel,
    config: &TrainConfig,
    seed: u64,
) -> Result<NeaGeneralOutput> {
    config.validate()?;
    let vars = model.variables();
    if model.links().is_empty() {
        return Err(Error::data("factorized model has no links to train"));
    }
    let sampler = ChainSampler::new(model)?;
    let marginals = model.marginals();

    let mut init_rng = derived_rng(seed, 0);
    let mut input_slot = vec![None; vars.len()];
    let mut output_slot = vec![None; vars.len()];
    let mut params = Params {
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    let mut links = Vec::with_capacity(model.links().len());
    for l in model.links() {
        let i = *input_slot[l.parent].get_or_insert_with(|| {
            params
                .inputs
                .push(init_input(vars[l.parent].cardinality, config.dim, &mut init_rng));
            params.inputs.len() - 1
        });
        let o = *output_slot[l.child].get_or_insert_with(|| {
            params.outputs.push(Matrix::zeros(vars[l.child].cardinality, config.dim));
            params.outputs.len() - 1
        });
        links.push(LinkSlots {
            input_slot: i,
            output_slot: o,
            noise: NoiseTable::from_marginal(&marginals[l.child], config.noise_exponent)?,
        });
    }

    let loss = engine::train(&mut params, &links, &sampler, config, seed);

    let mut inputs: Vec<Option<Matrix>> = params.inputs.into_iter().map(Some).collect();
    let mut outputs: Vec<Option<Matrix>> = params.outputs.into_iter().map(Some).collect();
    let embeddings = GeneralEmbeddings {
        names: vars.iter().map(|v| v.name.clone()).collect(),
        inputs: input_slot.iter().map(|s| s.and_then(|s| inputs[s].take())).collect(),
        outputs: output_slot.iter().map(|s| s.and_then(|s| outputs[s].take())).collect(),
    };
    let smoothed = embeddings.smoothed(model)?;
    Ok(NeaGeneralOutput {
        embeddings,
        smoothed,
        loss,
    })
}
