use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal, Uniform};
use serde_json::{json, Map};

use super::{resolve_qoi, sample_moments, UqError, UqResult};
use crate::distribution::Distribution;
use crate::engine::{EngineError, ScalarProgram};
use crate::graph::Graph;

enum Sampler {
    Normal(Normal<f64>),
    Uniform(Uniform<f64>),
}

impl Sampler {
    fn new(d: &Distribution) -> Self {
        match *d {
            Distribution::Normal { mean, stddev } => {
                Self::Normal(Normal::new(mean, stddev).expect("validated distribution"))
            }
            Distribution::Uniform { lower, upper } => {
                Self::Uniform(Uniform::new(lower, upper).expect("validated distribution"))
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Normal(n) => n.sample(rng),
            Self::Uniform(u) => u.sample(rng),
        }
    }
}

/// `n` i.i.d. points; coordinates are drawn point by point, axes in order.
pub fn sample_inputs<R: Rng>(dists: &[Distribution], n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let samplers: Vec<Sampler> = dists.iter().map(Sampler::new).collect();
    (0..n)
        .map(|_| samplers.iter().map(|s| s.draw(rng)).collect())
        .collect()
}

/// Sample mean and standard deviation of output `qoi` (default: the first
/// declared output) over `n` seeded samples.
pub fn monte_carlo(graph: &Graph, qoi: Option<&str>, n: usize, seed: u64) -> Result<UqResult, UqError> {
    if n < 2 {
        return Err(UqError::TooFewSamples(n));
    }
    let name = resolve_qoi(graph, qoi)?;
    let prog = ScalarProgram::compile(graph).map_err(UqError::Engine)?;
    let slot = prog.output_var(prog.output_index(&name).expect("resolved output"));
    let samplers: Vec<Sampler> = graph.distributions().iter().map(Sampler::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = prog.scratch();
    let mut point = vec![0.0; samplers.len()];
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        for (x, s) in point.iter_mut().zip(&samplers) {
            *x = s.draw(&mut rng);
        }
        if let Err(e) = prog.run(&mut scratch, &point, i) {
            return Err(UqError::Engine(EngineError::Domain(e)));
        }
        values.push(scratch[slot]);
    }
    let (mean, stddev) = sample_moments(&values);
    let mut details = Map::new();
    details.insert("output".into(), json!(name));
    details.insert("seed".into(), json!(seed));
    details.insert("standard_error".into(), json!(stddev / (n as f64).sqrt()));
    details.insert("total_scalar_evals".into(), json!(n * graph.elementary_op_count()));
    Ok(UqResult {
        method: "mc".into(),
        mean,
        stddev,
        n_model_points: n,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    #[test]
    fn constant_output() {
        let g = parse_model("input u ~ Normal(0,1)\nparam c = 3\noutput f = c").unwrap();
        let r = monte_carlo(&g, None, 100, 1).unwrap();
        assert_eq!((r.mean, r.stddev), (3.0, 0.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = parse_model("input u ~ Normal(0,1)\ninput v ~ Uniform(0,1)\noutput f = u * v").unwrap();
        let a = monte_carlo(&g, None, 1000, 42).unwrap();
        let b = monte_carlo(&g, None, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_ne!(monte_carlo(&g, None, 1000, 43).unwrap().mean, a.mean);
    }

    #[test]
    fn too_few_samples_and_bad_output() {
        let g = parse_model("input u ~ Normal(0,1)\noutput f = u").unwrap();
        assert_eq!(monte_carlo(&g, None, 1, 0), Err(UqError::TooFewSamples(1)));
        assert!(matches!(monte_carlo(&g, Some("g"), 10, 0), Err(UqError::UnknownOutput(_))));
    }

    #[test]
    fn domain_error_records_sample() {
        let g = parse_model("input u ~ Normal(0,1)\noutput f = log(u)").unwrap();
        match monte_carlo(&g, None, 100, 5) {
            Err(UqError::Engine(EngineError::Domain(e))) => assert!(e.index < 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_samples_stay_in_range() {
        let d = [Distribution::uniform(2.0, 3.0).unwrap()];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = sample_inputs(&d, 500, &mut rng);
        assert!(pts.iter().all(|p| (2.0..3.0).contains(&p[0])));
    }
}
