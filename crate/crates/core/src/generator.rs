//! Synthetic layered workflows.
//!
//! Vertices are split into `k` stages: users first, purposes last,
//! algorithms in between. Edges only join consecutive stages, so every
//! user-to-purpose path has exactly `k - 1` edges.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;
use crate::graph::{ConstraintSet, Edge, VertexId, VertexKind, Workflow};
use crate::scalar::Scalar;

/// Stage fractions for five stages: half users, a quarter first-level
/// algorithms, then 10%, 10% and 5% purposes.
pub const NON_UNIFORM: [f64; 5] = [0.5, 0.25, 0.1, 0.1, 0.05];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Uniform,
    NonUniform,
    Custom(Vec<f64>),
}

impl Distribution {
    pub fn fractions(&self, stages: usize) -> Result<Vec<f64>, GeneratorError> {
        let xs = match self {
            Distribution::Uniform => vec![1.0 / stages as f64; stages],
            Distribution::NonUniform if stages == NON_UNIFORM.len() => NON_UNIFORM.to_vec(),
            Distribution::NonUniform => return Err(GeneratorError::NonUniformStages),
            Distribution::Custom(xs) => xs.clone(),
        };
        if xs.len() != stages {
            return Err(GeneratorError::DistributionLength { got: xs.len(), stages });
        }
        let sum: f64 = xs.iter().sum();
        if xs.iter().any(|x| !x.is_finite() || *x < 0.0) || (sum - 1.0).abs() > 1e-6 {
            return Err(GeneratorError::DistributionSum(format!("{sum}")));
        }
        Ok(xs)
    }

    pub fn label(&self) -> String {
        match self {
            Distribution::Uniform => "U".into(),
            Distribution::NonUniform => "NU".into(),
            Distribution::Custom(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
                parts.join("/")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_vertices: usize,
    pub n_constraints: usize,
    /// Number of stages `k`.
    pub path_length: usize,
    pub distribution: Distribution,
    /// Minimum fraction of possible edges present between consecutive stages.
    pub min_density: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Vertices per stage. Each count is rounded down and the leftover goes
    /// to the stage with the largest fraction (earliest on ties).
    pub fn stage_sizes(&self) -> Result<Vec<usize>, GeneratorError> {
        if self.path_length < 2 {
            return Err(GeneratorError::TooFewStages(self.path_length));
        }
        let xs = self.distribution.fractions(self.path_length)?;
        let mut sizes: Vec<usize> = xs
            .iter()
            .map(|x| (self.n_vertices as f64 * x + 1e-9).floor() as usize)
            .collect();
        let leftover = self.n_vertices.saturating_sub(sizes.iter().sum());
        let largest = (0..xs.len())
            .fold(0, |best, i| if xs[i] > xs[best] { i } else { best });
        sizes[largest] += leftover;
        if let Some(stage) = sizes.iter().position(|&s| s == 0) {
            return Err(GeneratorError::EmptyStage { stage });
        }
        Ok(sizes)
    }

    pub fn validate(&self) -> Result<Vec<usize>, GeneratorError> {
        if !(0.0..=1.0).contains(&self.min_density) {
            return Err(GeneratorError::Density(format!("{}", self.min_density)));
        }
        if self.n_constraints == 0 {
            return Err(GeneratorError::NoConstraints);
        }
        let sizes = self.stage_sizes()?;
        let available = sizes[0] * sizes[sizes.len() - 1];
        if self.n_constraints > available {
            return Err(GeneratorError::TooManyConstraints {
                requested: self.n_constraints,
                available,
            });
        }
        Ok(sizes)
    }
}

/// Builds a workflow and `n_constraints` distinct connected
/// `(user, purpose)` pairs. All base valuations and purpose weights are 1.
pub fn generate<S: Scalar>(config: &GeneratorConfig) -> Result<(Workflow<S>, ConstraintSet), GeneratorError> {
    let sizes = config.validate()?;
    let k = sizes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut graph = Workflow::new();
    let mut stages: Vec<Vec<VertexId>> = Vec::with_capacity(k);
    let mut next = 0u32;
    for (i, &size) in sizes.iter().enumerate() {
        let kind = match i {
            0 => VertexKind::UserData,
            _ if i == k - 1 => VertexKind::Purpose,
            _ => VertexKind::Algorithm,
        };
        let ids: Vec<VertexId> = (next..next + size as u32).map(VertexId).collect();
        for &v in &ids {
            graph.add_vertex(v, kind).expect("fresh id");
            if kind == VertexKind::Purpose {
                graph.set_purpose_weight(v, S::one());
            }
        }
        next += size as u32;
        stages.push(ids);
    }

    let link = |graph: &mut Workflow<S>, a: VertexId, b: VertexId| {
        if !graph.has_edge(Edge { src: a, dst: b }) {
            graph.add_edge(a, b).expect("consecutive stages");
        }
    };

    for i in 0..k - 1 {
        for &v in &stages[i] {
            if graph.out_degree(v) == 0 {
                let w = *stages[i + 1].choose(&mut rng).expect("non-empty stage");
                link(&mut graph, v, w);
            }
        }
    }
    for i in 1..k {
        for &w in &stages[i] {
            if graph.in_degree(w) == 0 {
                let v = *stages[i - 1].choose(&mut rng).expect("non-empty stage");
                link(&mut graph, v, w);
            }
        }
    }

    if config.min_density > 0.0 {
        for i in 0..k - 1 {
            let possible = stages[i].len() * stages[i + 1].len();
            let target = (config.min_density * possible as f64 - 1e-9).ceil() as usize;
            let mut missing: Vec<(VertexId, VertexId)> = stages[i]
                .iter()
                .flat_map(|&a| stages[i + 1].iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| !graph.has_edge(Edge { src: a, dst: b }))
                .collect();
            let present = possible - missing.len();
            if present < target {
                missing.shuffle(&mut rng);
                for &(a, b) in &missing[..target - present] {
                    link(&mut graph, a, b);
                }
            }
        }
    }

    let users = &stages[0];
    let purposes = &stages[k - 1];
    let mut pool = connected_pairs(&graph, users, purposes);
    while pool.len() < config.n_constraints {
        let open: Vec<(VertexId, VertexId)> = users
            .iter()
            .flat_map(|&u| purposes.iter().map(move |&p| (u, p)))
            .filter(|pair| !pool.contains(pair))
            .collect();
        let (u, p) = open[rng.gen_range(0..open.len())];
        let mut at = u;
        for stage in &stages[1..k - 1] {
            let w = *stage.choose(&mut rng).expect("non-empty stage");
            link(&mut graph, at, w);
            at = w;
        }
        link(&mut graph, at, p);
        pool = connected_pairs(&graph, users, purposes);
    }

    let mut pool: Vec<(VertexId, VertexId)> = pool.into_iter().collect();
    pool.shuffle(&mut rng);
    pool.truncate(config.n_constraints);
    let constraints = ConstraintSet::from_pairs(pool).expect("distinct pairs");
    Ok((graph, constraints))
}

fn connected_pairs<S: Scalar>(
    graph: &Workflow<S>,
    users: &[VertexId],
    purposes: &[VertexId],
) -> BTreeSet<(VertexId, VertexId)> {
    let targets: BTreeSet<VertexId> = purposes.iter().copied().collect();
    users
        .iter()
        .flat_map(|&u| {
            graph
                .descendants(u)
                .into_iter()
                .filter(|v| targets.contains(v))
                .map(move |p| (u, p))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// One parameter point of a dataset sweep, without the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetPoint {
    pub n_vertices: usize,
    pub n_constraints: usize,
    pub path_length: usize,
    pub distribution: Distribution,
    pub min_density: f64,
}

impl PresetPoint {
    pub fn config(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_vertices: self.n_vertices,
            n_constraints: self.n_constraints,
            path_length: self.path_length,
            distribution: self.distribution.clone(),
            min_density: self.min_density,
            seed,
        }
    }
}

/// A named benchmark dataset and its sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetPreset {
    pub name: String,
    pub description: String,
    pub points: Vec<PresetPoint>,
}

pub const PRESET_NAMES: [&str; 5] = ["1a", "1b", "1c", "2", "3"];

/// Vertex counts of dataset 2, linear in the number of stages from 150 at
/// `k = 3` to 5000 at `k = 50`.
pub fn dataset2_vertices(stages: usize) -> usize {
    let t = (stages.saturating_sub(3)) as f64 / 47.0;
    (150.0 + t * (5000.0 - 150.0)).round() as usize
}

pub fn preset(name: &str) -> Result<DatasetPreset, GeneratorError> {
    let point = |n_vertices, n_constraints, path_length, distribution: Distribution, min_density| PresetPoint {
        n_vertices,
        n_constraints,
        path_length,
        distribution,
        min_density,
    };
    let (description, points): (&str, Vec<PresetPoint>) = match name {
        "1a" => (
            "|N| 1-50, |V| 100, k 5, NU, d 0",
            (1..=50).map(|n| point(100, n, 5, Distribution::NonUniform, 0.0)).collect(),
        ),
        "1b" => (
            "|N| 1-50, |V| 1000, k 5, NU, d 0",
            (1..=50).map(|n| point(1000, n, 5, Distribution::NonUniform, 0.0)).collect(),
        ),
        "1c" => (
            "|N| 1-50, |V| 100, k 5, U, d 0.2",
            (1..=50).map(|n| point(100, n, 5, Distribution::Uniform, 0.2)).collect(),
        ),
        "2" => (
            "|N| 10, |V| 150-5000, k 3-50, U, d 0",
            (3..=50)
                .map(|k| point(dataset2_vertices(k), 10, k, Distribution::Uniform, 0.0))
                .collect(),
        ),
        "3" => (
            "|N| 5, |V| 100-10000, k 5, NU, d 0",
            [100, 200, 500, 1000, 2000, 5000, 10000]
                .into_iter()
                .map(|v| point(v, 5, 5, Distribution::NonUniform, 0.0))
                .collect(),
        ),
        other => return Err(GeneratorError::UnknownPreset(other.to_string())),
    };
    Ok(DatasetPreset {
        name: name.to_string(),
        description: description.to_string(),
        points,
    })
}
