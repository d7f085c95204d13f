//! Shared fixtures for the criterion benches.

use den_core::den::{flatten_coords, DenModel};
use den_core::elf::{build_targets, ElfState};
use den_core::graph::{generate_instance, GeneratorConfig};
use den_core::nn::{AdamW, AdamWConfig, Mode};
use den_core::trainer::initial_embedding;
use den_core::{check_embedding, DomainParams, Embedding, Graph, Initializer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A gate-accepted instance with its scaled starting layout.
pub struct Fixture {
    pub graph: Graph,
    pub coords: Vec<[f64; 2]>,
    pub start: Embedding,
    pub params: DomainParams,
}

impl Fixture {
    pub fn new(n: usize, dim: usize, seed: u64) -> Self {
        let inst = generate_instance(&GeneratorConfig::for_size(n, seed)).expect("instance");
        let params = DomainParams::default();
        let start = initial_embedding(&inst.graph, Some(&inst.coords), &params, Initializer::Scaling, dim, seed)
            .expect("start");
        Self {
            graph: inst.graph,
            coords: inst.coords,
            start,
            params,
        }
    }
}

/// Everything one learning-phase epoch touches.
pub struct EpochState<'a> {
    fixture: &'a Fixture,
    input: Vec<f64>,
    model: DenModel,
    optimizer: AdamW,
    targets: ElfState,
    rng: ChaCha8Rng,
}

impl<'a> EpochState<'a> {
    pub fn new(fixture: &'a Fixture) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let dim = fixture.start.dim();
        let model = DenModel::build(fixture.graph.n(), dim, fixture.params.l, 0.3, &mut rng).expect("model");
        Self {
            input: flatten_coords(&fixture.start),
            model,
            optimizer: AdamW::new(AdamWConfig::new(1e-3)),
            targets: build_targets(&fixture.graph, &fixture.params, fixture.params.epsilon).expect("targets"),
            rng,
            fixture,
        }
    }

    /// Training step plus inference step and feasibility check; returns feasibility.
    pub fn step(&mut self) -> bool {
        let train = self.model.forward(&self.input, Mode::Training, &mut self.rng).unwrap();
        let (_, grad) = self.targets.evaluate(&train.v).unwrap();
        let grads = self.model.network().backward(&train.cache, &grad).unwrap();
        self.optimizer.step(self.model.network_mut(), &grads).unwrap();
        let inference = self.model.forward(&self.input, Mode::Inference, &mut self.rng).unwrap();
        check_embedding(&self.fixture.graph, &inference.coords, &self.fixture.params)
            .unwrap()
            .feasible
    }
}
