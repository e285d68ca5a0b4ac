use super::data::{Dataset, OwnedBatch};
use super::Network;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::vector::{check_dims, ParamVector};

/// A network's training loss on a stream of mini-batches.
///
/// Samples are reshuffled at the start of every epoch from the dataset's
/// shuffle seed, so two runs over the same dataset see the same batches in
/// the same order. Before the first call to [`Objective::next_batch`] the
/// objective sits on the first batch of epoch 0.
#[derive(Debug, Clone)]
pub struct BatchedLoss<'a> {
    net: &'a Network,
    data: &'a Dataset,
    order: Vec<usize>,
    epoch: u64,
    batch_index: usize,
    started: bool,
    batch: OwnedBatch,
}

impl<'a> BatchedLoss<'a> {
    pub fn new(net: &'a Network, data: &'a Dataset) -> Result<Self> {
        if net.input_dim() != data.input_dim() {
            return Err(Error::DimensionMismatch { expected: net.input_dim(), got: data.input_dim() });
        }
        let order = data.epoch_order(0);
        let batch = data.gather(&order[..data.batch_size().min(data.len())]);
        Ok(Self { net, data, order, epoch: 0, batch_index: 0, started: false, batch })
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn batch_index(&self) -> usize {
        self.batch_index
    }

    pub fn steps_per_epoch(&self) -> usize {
        self.data.batches_per_epoch()
    }

    /// Sample indices of the current batch.
    pub fn current_indices(&self) -> &[usize] {
        let bs = self.data.batch_size();
        let start = self.batch_index * bs;
        &self.order[start..(start + bs).min(self.order.len())]
    }

    fn load_current(&mut self) {
        self.batch = self.data.gather(self.current_indices());
    }
}

impl Network {
    pub fn as_objective<'a>(&'a self, data: &'a Dataset) -> Result<BatchedLoss<'a>> {
        BatchedLoss::new(self, data)
    }
}

impl Objective for BatchedLoss<'_> {
    fn dim(&self) -> usize {
        self.net.params().dim()
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        check_dims(self.dim(), theta.dim())?;
        self.net.loss_at(theta.as_slice(), &self.batch.view())
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        self.eval_grad(theta).map(|(_, g)| g)
    }

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        check_dims(self.dim(), theta.dim())?;
        self.net.loss_and_grad_at(theta.as_slice(), &self.batch.view())
    }

    fn next_batch(&mut self) {
        if !self.started {
            self.started = true;
            return;
        }
        self.batch_index += 1;
        if self.batch_index >= self.data.batches_per_epoch() {
            self.batch_index = 0;
            self.epoch += 1;
            self.order = self.data.epoch_order(self.epoch);
        }
        self.load_current();
    }
}
