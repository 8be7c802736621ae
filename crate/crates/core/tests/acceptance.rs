//! Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{full_corpus, generated_corpus, random_cluster, random_spec, Instance, ALPHAS};
use mapsep::expfam::{log_marginal, Dataset, ExpFamilyModel};
use mapsep::io::{generate, RunConfig};
use mapsep::oracle::{
    brute_force_best_split, check_fixtures, convexity_probe, quadrature_log_marginal, random_admissible,
    GoldenFixtures, QuadratureSpec,
};
use mapsep::partition::enumerate_partitions;
use mapsep::prior::{crp_log_eppf, eppf_total_mass};
use mapsep::search::{
    best_split, exhaustive_map, local_search, split_objective, ScoredPartition, DEFAULT_BUDGET,
};
use mapsep::separability::{
    certify_partition, certify_t_linear, proportionality_residual, statistic_vectors, CertificateTable,
    DecodedSurface, MARGIN_THRESHOLD,
};
use mapsep::{Crp, ModelKind, ModelSpec, NormalModel};

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Exhaustive MAP and its certificates for one instance.
struct Solved {
    instance: Instance,
    map: ScoredPartition,
    table: CertificateTable,
}

fn solve_corpus(kind: ModelKind, seed: u64) -> Vec<Solved> {
    full_corpus(kind, 200, seed)
        .into_par_iter()
        .map(|instance| {
            let report = exhaustive_map(&instance.model, &instance.prior, &instance.data).expect("exhaustive search");
            let table = certify_partition(&instance.model, &instance.data, &report.best.partition).expect("certify");
            Solved {
                instance,
                map: report.best,
                table,
            }
        })
        .collect()
}

fn criterion_1(corpora: &[(ModelKind, Vec<Solved>)], seconds: f64) -> Outcome {
    let mut detail = Vec::new();
    let mut falsified = Vec::new();
    let mut ok = true;
    for (kind, solved) in corpora {
        let mut pairs = 0;
        let mut min_margin = f64::INFINITY;
        for s in solved {
            for p in &s.table.pairs {
                pairs += 1;
                min_margin = min_margin.min(p.margin);
                if !p.separable || !(p.margin > MARGIN_THRESHOLD) {
                    falsified.push(format!("{} pair {:?}", s.instance.name, p.pair));
                }
            }
        }
        ok &= solved.len() >= 200;
        detail.push(format!("{kind}: {} instances, {pairs} pairs, min margin {min_margin:.2e}", solved.len()));
    }
    ok &= falsified.is_empty() && seconds < 600.0;
    detail.push(format!("falsifications {}", falsified.len()));
    if !falsified.is_empty() {
        detail.push(format!("first: {}", falsified[0]));
    }
    detail.push(format!("{seconds:.1}s"));
    Outcome {
        id: 1,
        title: "every MAP block pair is T-linearly separable",
        pass: ok,
        detail: detail.join("; "),
    }
}

fn criterion_2() -> Outcome {
    let qspec = QuadratureSpec::default();
    let mut worst: Vec<String> = Vec::new();
    let mut ok = true;
    for (m, kind) in ModelKind::ALL.into_iter().enumerate() {
        let results: Vec<f64> = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * m as u64 + i);
                let spec = random_spec(kind, 1, &mut rng);
                let pts = random_cluster(1 + (i as usize % 5), &mut rng);
                let oracle = quadrature_log_marginal(&spec, &pts, &qspec).expect("oracle converges").value;
                let data = Dataset::new(pts.iter().map(|&x| vec![x]).collect()).unwrap();
                let idx: Vec<usize> = (0..pts.len()).collect();
                let closed = log_marginal(&spec.build().unwrap(), &idx, &data).unwrap();
                (closed - oracle).abs() / oracle.abs()
            })
            .collect();
        let max = results.iter().copied().fold(0.0, f64::max);
        ok &= max < 1e-6;
        worst.push(format!("{kind} max rel err {max:.1e}"));
    }
    let unit = |kind| ModelSpec::isotropic(kind, 1, 1.0, 1.0, 1.0).build().unwrap();
    let origin = Dataset::new(vec![vec![0.0]]).unwrap();
    let goldens = [
        (ModelKind::Fixed, -1.265512),
        (ModelKind::Nig, 0.375f64.ln()),
        (ModelKind::Niw, -0.79815),
    ];
    for (kind, target) in goldens {
        let v = log_marginal(&unit(kind), &[0], &origin).unwrap();
        ok &= (v - target).abs() < 1e-5;
        worst.push(format!("{kind} golden {v:.6}"));
    }
    let fixtures = check_fixtures(&GoldenFixtures::bundled().unwrap()).unwrap();
    let passing = fixtures.iter().filter(|c| c.pass).count();
    ok &= passing == fixtures.len();
    worst.push(format!("fixtures {passing}/{}", fixtures.len()));
    Outcome {
        id: 2,
        title: "closed-form marginals match quadrature",
        pass: ok,
        detail: worst.join("; "),
    }
}

fn sequential_seating_log(alpha: f64, labels: &[usize]) -> f64 {
    let mut sizes: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for (i, &l) in labels.iter().enumerate() {
        let denom = i as f64 + alpha;
        if l == sizes.len() {
            total += (alpha / denom).ln();
            sizes.push(1);
        } else {
            total += (sizes[l] as f64 / denom).ln();
            sizes[l] += 1;
        }
    }
    total
}

fn criterion_3() -> Outcome {
    let mut worst_mass = 0.0f64;
    let mut worst_seq = 0.0f64;
    for alpha in ALPHAS {
        let crp = Crp::new(alpha).unwrap();
        for n in 1..=8 {
            worst_mass = worst_mass.max((eppf_total_mass(&crp, n).unwrap() - 1.0).abs());
        }
        for n in 1..=6 {
            for p in enumerate_partitions(n, 12).unwrap() {
                let direct = crp_log_eppf(alpha, &p.sizes()).unwrap();
                worst_seq = worst_seq.max((direct - sequential_seating_log(alpha, p.assignment())).abs());
            }
        }
    }
    Outcome {
        id: 3,
        title: "CRP normalization and sequential seating",
        pass: worst_mass <= 1e-10 && worst_seq <= 1e-12,
        detail: format!("max |mass − 1| {worst_mass:.1e}; max seating gap {worst_seq:.1e}"),
    }
}

fn criterion_4(corpora: &[(ModelKind, Vec<Solved>)]) -> Outcome {
    // (a) and (b): random split instances
    let results: Vec<(bool, bool)> = (0..600u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(40_000 + i);
            let kind = ModelKind::ALL[i as usize % 3];
            let d = rng.random_range(1..=2);
            let size = rng.random_range(2..=10);
            let spec = random_spec(kind, d, &mut rng);
            let mut cfg = RunConfig::new(spec.clone());
            cfg.alpha = 1.0;
            let data = generate(&cfg, size, rng.random()).unwrap().data;
            let model = spec.build().unwrap();
            let universe: Vec<usize> = (0..size).collect();
            let k = rng.random_range(1..size);
            let fast = best_split(&model, &universe, k, &data).unwrap();
            let slow = brute_force_best_split(|a, b| split_objective(&model, &data, a, b), &universe, k).unwrap();
            let agree = fast.subset == slow.subset && fast.objective == slow.objective;
            let tx = statistic_vectors(&model, &data, &slow.subset);
            let complement: Vec<usize> = universe.iter().copied().filter(|j| !slow.subset.contains(j)).collect();
            let ty = statistic_vectors(&model, &data, &complement);
            let separable = certify_t_linear(&tx, &ty).unwrap().is_separable();
            (agree, separable)
        })
        .collect();
    let agree = results.iter().filter(|r| r.0).count();
    let separable = results.iter().filter(|r| r.1).count();

    // (c): MAP block pairs are optimal among equal-size splits of their union
    let mut pairs = 0;
    let mut violations = 0;
    for (_, solved) in corpora {
        for s in solved {
            let blocks = s.map.partition.blocks();
            for i in 0..blocks.len() {
                for j in i + 1..blocks.len() {
                    pairs += 1;
                    let mut union = blocks[i].clone();
                    union.extend(&blocks[j]);
                    let best = best_split(&s.instance.model, &union, blocks[i].len(), &s.instance.data).unwrap();
                    let own = split_objective(&s.instance.model, &s.instance.data, &blocks[i], &blocks[j]).unwrap();
                    if best.objective > own + 1e-9 {
                        violations += 1;
                    }
                }
            }
        }
    }
    Outcome {
        id: 4,
        title: "split oracle agreement, separable optimal splits, pairwise-split optimality",
        pass: agree == results.len() && separable == results.len() && results.len() >= 500 && violations == 0,
        detail: format!(
            "agree {agree}/{n}; separable {separable}/{n}; MAP pairs optimal {}/{pairs}",
            pairs - violations,
            n = results.len()
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (m, kind) in ModelKind::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + m as u64);
        let mut min_slack = f64::INFINITY;
        for i in 0..1000 {
            let d = 1 + i % 3;
            let model = ModelSpec::isotropic(kind, d, 1.0, 1.0, d as f64 + 1.0).build().unwrap();
            let p1 = random_admissible(&model, &mut rng).unwrap();
            let p2 = random_admissible(&model, &mut rng).unwrap();
            let slack = convexity_probe(|p| model.log_partition(p), &p1, &p2, 0.5).unwrap();
            min_slack = min_slack.min(slack);
        }
        ok &= min_slack > 1e-12;
        detail.push(format!("{kind} min slack {min_slack:.2e}"));
    }
    Outcome {
        id: 5,
        title: "midpoint convexity of the log-partition",
        pass: ok,
        detail: detail.join("; "),
    }
}

fn criterion_6() -> Outcome {
    let clusters = [
        Dataset::new(vec![vec![0.3], vec![-0.5], vec![1.2]]).unwrap(),
        Dataset::new(vec![vec![0.3, 1.0], vec![-0.5, 0.2], vec![1.2, -0.7], vec![2.0, 0.4]]).unwrap(),
    ];
    let (sigma, psi) = (0.8, 3.0);
    let mut ok = true;
    let mut detail = Vec::new();
    for data in &clusters {
        let d = data.dim();
        let idx: Vec<usize> = (0..data.n()).collect();
        let fixed = log_marginal(&ModelSpec::isotropic(ModelKind::Fixed, d, sigma, psi, 1.0).build().unwrap(), &idx, data)
            .unwrap();
        for kind in [ModelKind::Nig, ModelKind::Niw] {
            let gaps: Vec<f64> = [1e2, 1e4, 1e6]
                .iter()
                .map(|&s| {
                    let m = ModelSpec::isotropic(kind, d, sigma, psi, s).build().unwrap();
                    (log_marginal(&m, &idx, data).unwrap() - fixed).abs()
                })
                .collect();
            ok &= gaps[2] < 1e-3 && gaps[0] > gaps[1] && gaps[1] > gaps[2];
            detail.push(format!("{kind} d={d} gaps {:.1e} {:.1e} {:.1e}", gaps[0], gaps[1], gaps[2]));
        }
    }
    Outcome {
        id: 6,
        title: "NIG and NIW approach the fixed-covariance model",
        pass: ok,
        detail: detail.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let instances: Vec<Instance> = generated_corpus(ModelKind::Niw, 8, 70)
        .into_iter()
        .chain(generated_corpus(ModelKind::Fixed, 6, 71))
        .chain(generated_corpus(ModelKind::Nig, 6, 72))
        .collect();
    let results: Vec<(usize, f64)> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let base = exhaustive_map(&inst.model, &inst.prior, &inst.data).unwrap().best;
            let mut rng = ChaCha8Rng::seed_from_u64(7_000 + i as u64);
            let mut failures = 0;
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let mut perm: Vec<usize> = (0..inst.data.n()).collect();
                perm.shuffle(&mut rng);
                let data = inst.data.permuted(&perm).unwrap();
                let got = exhaustive_map(&inst.model, &inst.prior, &data).unwrap().best;
                let expected = base.partition.permuted(&perm).unwrap();
                let gap = (got.log_post - base.log_post).abs();
                worst = worst.max(gap);
                let tied = got.tie_set.as_ref().is_some_and(|t| t.contains(&expected));
                if (got.partition != expected && !tied) || gap > 1e-12 {
                    failures += 1;
                }
            }
            (failures, worst)
        })
        .collect();
    let failures: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Outcome {
        id: 7,
        title: "exhaustive MAP is permutation-equivariant",
        pass: failures == 0,
        detail: format!(
            "{} instances x 50 permutations; mismatches {failures}; max score gap {worst:.1e}",
            instances.len()
        ),
    }
}

fn criterion_8(corpora: &[(ModelKind, Vec<Solved>)]) -> Outcome {
    let mut total = 0;
    let mut matched = 0;
    let mut above = 0;
    let mut detail = Vec::new();
    for (kind, solved) in corpora {
        let res: Vec<(bool, bool)> = solved
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let r = local_search(&s.instance.model, &s.instance.prior, &s.instance.data, i as u64, DEFAULT_BUDGET)
                    .unwrap();
                (r.best.log_post > s.map.log_post, r.best.partition == s.map.partition)
            })
            .collect();
        let m = res.iter().filter(|r| r.1).count();
        above += res.iter().filter(|r| r.0).count();
        matched += m;
        total += res.len();
        detail.push(format!("{kind} match {m}/{}", res.len()));
    }
    detail.push(format!("overall match rate {:.3}", matched as f64 / total as f64));
    detail.push(format!("local above exhaustive {above}"));
    Outcome {
        id: 8,
        title: "local search never beats exhaustive",
        pass: above == 0,
        detail: detail.join("; "),
    }
}

fn criterion_9(corpora: &[(ModelKind, Vec<Solved>)]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (kind, solved) in corpora {
        let mut surfaces = 0;
        let mut wrong_kind = 0;
        let mut replay_fail = 0;
        let mut worst_replay = 0.0f64;
        let mut worst_residual = 0.0f64;
        for s in solved {
            let model = &s.instance.model;
            let data = &s.instance.data;
            let blocks = s.map.partition.blocks();
            for p in &s.table.pairs {
                let (Some(cert), Some(surface)) = (p.certificate(), p.surface.as_ref()) else {
                    continue;
                };
                surfaces += 1;
                for (block, sign) in [(&blocks[p.pair[0]], 1.0), (&blocks[p.pair[1]], -1.0)] {
                    for &i in block.iter() {
                        let x = data.point(i);
                        let t = model.suff_stat(x);
                        let scale = 1.0 + cert.b.abs() + cert.a.iter().zip(&t).map(|(a, v)| (a * v).abs()).sum::<f64>();
                        let gap = (surface.eval(x) - cert.eval(&t)).abs() / scale;
                        worst_replay = worst_replay.max(gap);
                        if gap > 1e-10 || !(sign * surface.eval(x) > 0.0) {
                            replay_fail += 1;
                        }
                    }
                }
                match (model, surface) {
                    (NormalModel::Fixed(_), DecodedSurface::Hyperplane { .. }) => {}
                    (NormalModel::Niw(_), DecodedSurface::Quadric { .. }) => {}
                    (NormalModel::Nig(m), DecodedSurface::Quadric { .. }) => {
                        let r = proportionality_residual(&surface.matrix().unwrap(), m.sigma_inv());
                        worst_residual = worst_residual.max(r);
                        if r >= 1e-9 {
                            wrong_kind += 1;
                        }
                    }
                    (NormalModel::Nig(_), DecodedSurface::Hyperplane { .. }) => {}
                    _ => wrong_kind += 1,
                }
            }
        }
        ok &= wrong_kind == 0 && replay_fail == 0;
        let mut line = format!(
            "{kind}: {surfaces} surfaces, replay gap {worst_replay:.1e}, replay failures {replay_fail}, wrong type {wrong_kind}"
        );
        if *kind == ModelKind::Nig {
            line.push_str(&format!(", max residual {worst_residual:.1e}"));
        }
        detail.push(line);
    }
    Outcome {
        id: 9,
        title: "decoded surfaces replay certificates with the expected geometry",
        pass: ok,
        detail: detail.join("; "),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpora: Vec<(ModelKind, Vec<Solved>)> = ModelKind::ALL
        .into_iter()
        .enumerate()
        .map(|(m, kind)| (kind, solve_corpus(kind, 100 + m as u64)))
        .collect();
    let c1_seconds = start.elapsed().as_secs_f64();

    let outcomes = [
        criterion_1(&corpora, c1_seconds),
        criterion_2(),
        criterion_3(),
        criterion_4(&corpora),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(&corpora),
        criterion_9(&corpora),
    ];
    for o in &outcomes {
        println!(
            "criterion {} {}: {} ({})",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
