#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mapsep::io::{generate, RunConfig};
use mapsep::{Crp, Dataset, ModelKind, ModelSpec, NormalModel};

pub struct Instance {
    pub name: String,
    pub spec: ModelSpec,
    pub model: NormalModel,
    pub alpha: f64,
    pub prior: Crp,
    pub data: Dataset,
}

impl Instance {
    pub fn new(name: impl Into<String>, spec: ModelSpec, alpha: f64, data: Dataset) -> Self {
        Instance {
            name: name.into(),
            model: spec.build().expect("valid spec"),
            spec,
            alpha,
            prior: Crp::new(alpha).expect("valid alpha"),
            data,
        }
    }
}

pub const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Random hyperparameters in a range where clusters are usually visible.
pub fn random_spec<R: Rng>(kind: ModelKind, d: usize, rng: &mut R) -> ModelSpec {
    let sigma0 = rng.random_range(0.2..1.5);
    let psi0 = rng.random_range(2.0..25.0);
    let strength = d as f64 + rng.random_range(0.5..6.0);
    ModelSpec::isotropic(kind, d, sigma0, psi0, strength)
}

/// `count` datasets drawn from the generative model itself.
pub fn generated_corpus(kind: ModelKind, count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.random_range(4..=9);
            let d = rng.random_range(1..=2);
            let alpha = ALPHAS[i % 3];
            let spec = random_spec(kind, d, &mut rng);
            let mut cfg = RunConfig::new(spec.clone());
            cfg.alpha = alpha;
            let g = generate(&cfg, n, rng.random()).expect("generation succeeds");
            Instance::new(format!("{kind}-gen-{i}"), spec, alpha, g.data)
        })
        .collect()
}

fn ds(rows: Vec<Vec<f64>>) -> Dataset {
    Dataset::new(rows).expect("distinct rows")
}

fn circle(n: usize, r: f64, cx: f64, cy: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64 + 0.1;
            vec![cx + r * t.cos(), cy + r * t.sin()]
        })
        .collect()
}

/// Hand-made datasets that stress ties, scale, degeneracy and geometry.
pub fn adversarial_datasets() -> Vec<(&'static str, Dataset)> {
    let line = |xs: &[f64]| ds(xs.iter().map(|&x| vec![x]).collect());
    let mut nested = circle(6, 4.0, 0.0, 0.0);
    nested.extend([vec![0.05, 0.0], vec![-0.05, 0.02], vec![0.0, -0.04]]);
    vec![
        ("symmetric", line(&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])),
        ("evenly-spaced", line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])),
        ("near-duplicates", line(&[0.0, 1e-9, 5.0, 5.0 + 1e-9, 5.0 + 2e-9])),
        ("outliers", line(&[-0.2, -0.1, 0.0, 0.1, 0.2, 0.3, -40.0, 55.0])),
        ("big-offset", line(&[1e6, 1e6 + 0.5, 1e6 + 1.0, 1e6 + 9.0, 1e6 + 9.5])),
        ("tiny-scale", line(&[0.0, 1e-4, 2e-4, 3e-4, 1.0e-3])),
        ("two-pairs", line(&[0.0, 0.1, 10.0, 10.1])),
        (
            "collinear-2d",
            ds([0.0, 0.5, 1.0, 6.0, 6.5, 7.0, 20.0].iter().map(|&t| vec![t, 2.0 * t]).collect()),
        ),
        ("circle-2d", ds(circle(8, 3.0, 0.0, 0.0))),
        ("ring-and-core-2d", ds(nested)),
        (
            "grid-2d",
            ds((0..9).map(|i| vec![(i % 3) as f64 * 4.0, (i / 3) as f64 * 4.0]).collect()),
        ),
        (
            "anisotropic-2d",
            ds(vec![
                vec![0.0, 0.0],
                vec![5.0, 0.1],
                vec![10.0, -0.1],
                vec![0.0, 3.0],
                vec![5.0, 3.1],
                vec![10.0, 2.9],
            ]),
        ),
    ]
}

/// Every adversarial dataset under unit-scale hyperparameters and each alpha.
pub fn adversarial_corpus(kind: ModelKind) -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, data) in adversarial_datasets() {
        let d = data.dim();
        let spec = ModelSpec::isotropic(kind, d, 1.0, 10.0, d as f64 + 2.0);
        for alpha in ALPHAS {
            out.push(Instance::new(format!("{kind}-{name}-a{alpha}"), spec.clone(), alpha, data.clone()));
        }
    }
    out
}

/// Generated plus adversarial instances for one model.
pub fn full_corpus(kind: ModelKind, generated: usize, seed: u64) -> Vec<Instance> {
    let mut v = generated_corpus(kind, generated, seed);
    v.extend(adversarial_corpus(kind));
    v
}

/// A random cluster of `size` one-dimensional points in `[-5, 5]`.
pub fn random_cluster<R: Rng>(size: usize, rng: &mut R) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::with_capacity(size);
    while pts.len() < size {
        let x = rng.random_range(-5.0..5.0);
        if !pts.contains(&x) {
            pts.push(x);
        }
    }
    pts
}
