use ndarray::{Array1, Array2};
use rand::seq::index;
use rand::Rng;

pub const DEFAULT_CAPACITY: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    /// Unit-scale action, `a / stride`.
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Column-stacked minibatch.
#[derive(Debug, Clone)]
pub struct Batch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
    pub dones: Array1<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn from_transitions(items: &[&Transition]) -> Self {
        let sd = items[0].state.len();
        let ad = items[0].action.len();
        let n = items.len();
        Self {
            states: Array2::from_shape_fn((n, sd), |(r, c)| items[r].state[c]),
            actions: Array2::from_shape_fn((n, ad), |(r, c)| items[r].action[c]),
            rewards: items.iter().map(|t| t.reward).collect(),
            next_states: Array2::from_shape_fn((n, sd), |(r, c)| items[r].next_state[c]),
            dones: items.iter().map(|t| if t.done { 1.0 } else { 0.0 }).collect(),
        }
    }
}

/// FIFO ring buffer.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    next: usize,
    inserted: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            items: Vec::new(),
            next: 0,
            inserted: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
        self.inserted += 1;
    }

    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.items.get(i)
    }

    /// Distinct indices, uniform over stored transitions.
    pub fn sample_indices<R: Rng>(&self, batch: usize, rng: &mut R) -> Option<Vec<usize>> {
        if batch == 0 || batch > self.items.len() {
            return None;
        }
        Some(index::sample(rng, self.items.len(), batch).into_vec())
    }

    pub fn sample<R: Rng>(&self, batch: usize, rng: &mut R) -> Option<Batch> {
        let idx = self.sample_indices(batch, rng)?;
        let refs: Vec<&Transition> = idx.iter().map(|&i| &self.items[i]).collect();
        Some(Batch::from_transitions(&refs))
    }
}
