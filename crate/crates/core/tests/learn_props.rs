mod common;

use bitdist::bits::BitString;
use bitdist::dist::{ExplicitDistribution, MassFunction};
use bitdist::info::{entropy, kl};
use bitdist::learn::{
    fit, gradient, loss, mdl_select, optimal_model, Family, LogitModel, TrainConfig, TrainMode, TrainingData,
};
use bitdist::prg::{PrgFamily, PrgSpec};
use bitdist::repr::{to_explicit, TablePredictor};
use common::{brute_log_odds, brute_markov_optimum, random_distribution, ProbOf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model<R: Rng>(rng: &mut R, n: usize, family: Family, b: f64) -> LogitModel {
    let theta = (0..family.num_cells(n)).map(|_| rng.random_range(-b..b)).collect();
    LogitModel::with_theta(n, family, b, theta).unwrap()
}

fn families() -> [Family; 4] {
    [
        Family::FullPrefix,
        Family::Markov { order: 0 },
        Family::Markov { order: 1 },
        Family::Markov { order: 3 },
    ]
}

/// Central differences of the loss, one logit at a time.
fn numeric_gradient(model: &LogitModel, data: &TrainingData, h: f64) -> Vec<f64> {
    let theta = model.theta().to_vec();
    (0..theta.len())
        .map(|c| {
            let shifted = |delta: f64| {
                let mut t = theta.clone();
                t[c] += delta;
                let m = LogitModel::with_theta(model.n(), model.family(), model.bound() + 1.0, t).unwrap();
                loss(&m, data).unwrap()
            };
            (shifted(h) - shifted(-h)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut instances = 0;
    for n in [2usize, 4, 6, 8] {
        for family in families() {
            let model = random_model(&mut rng, n, family, 3.0);
            let sparse = rng.random();
            let d = random_distribution(&mut rng, n, 30, sparse);
            let samples: Vec<BitString> =
                (0..7).map(|_| BitString::from_rank(rng.random_range(0..1u64 << n), n).unwrap()).collect();
            for data in [TrainingData::Exact(&d), TrainingData::Samples(&samples)] {
                let g = gradient(&model, &data).unwrap();
                let fd = numeric_gradient(&model, &data, 1e-4);
                for (a, b) in g.iter().zip(&fd) {
                    let err = (a - b).abs();
                    assert!(err <= 1e-8 || err <= 1e-5 * a.abs().max(b.abs()), "{family} n={n}: {a} vs {b}");
                }
                instances += 1;
            }
        }
    }
    assert!(instances >= 20);
}

#[test]
fn gradient_vanishes_at_the_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for family in families() {
        let model = random_model(&mut rng, 6, family, 4.0);
        let d = to_explicit(&model, 52).unwrap();
        let g = gradient(&model, &TrainingData::Exact(&d)).unwrap();
        assert!(g.iter().all(|v| v.abs() <= 1e-9), "{family}: {g:?}");
        let l = loss(&model, &TrainingData::Exact(&d)).unwrap();
        assert!((l - entropy(&d)).abs() <= 1e-9);
    }
}

#[test]
fn loss_decomposes_into_entropy_plus_kl() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let model = random_model(&mut rng, 8, Family::Markov { order: 2 }, 6.0);
        let d = random_distribution(&mut rng, 8, 40, false);
        let l = loss(&model, &TrainingData::Exact(&d)).unwrap();
        let k = kl(&d, &model.pmf().unwrap()).unwrap();
        assert!((l - (entropy(&d) + k)).abs() <= 1e-9, "{l} vs {}", entropy(&d) + k);
    }
}

#[test]
fn full_prefix_fit_reaches_conditional_log_odds() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 6;
    let table: Vec<f64> = (0..63).map(|_| rng.random_range(0.2..0.8)).collect();
    let d = to_explicit(&TablePredictor::new(n, table).unwrap(), 40).unwrap();
    let cfg = TrainConfig {
        learning_rate: 8.0,
        steps: 40_000,
        ..TrainConfig::default()
    };
    let out = fit(&LogitModel::new(n, Family::FullPrefix, 8.0).unwrap(), &TrainingData::Exact(&d), &cfg).unwrap();
    for len in 0..n {
        for v in 0..1usize << len {
            let cell = (1 << len) - 1 + v;
            let expected = brute_log_odds(&d, v, len);
            assert!((out.model.theta()[cell] - expected).abs() <= 1e-3, "cell {cell}");
        }
    }
    // descent is monotone at this rate
    let rises = out.trace.windows(2).filter(|w| w[1] > w[0] + 1e-15).count();
    assert!(rises * 100 <= out.trace.len(), "{rises} rises");
}

#[test]
fn markov_two_on_linear_prg_matches_brute_optimum() {
    let d = PrgSpec::new(PrgFamily::Linear, 6, 12, 7).unwrap().build().unwrap().image_distribution().unwrap();
    let family = Family::Markov { order: 2 };
    let out = fit(&LogitModel::new(12, family, 8.0).unwrap(), &TrainingData::Exact(&d), &TrainConfig::default()).unwrap();
    let best = brute_markov_optimum(&d, 2, 8.0);
    let last = *out.trace.last().unwrap();
    assert!(last - best <= 0.1 && last >= best - 1e-9, "{last} vs {best}");
    let closed = optimal_model(12, family, 8.0, &TrainingData::Exact(&d)).unwrap();
    assert!((loss(&closed, &TrainingData::Exact(&d)).unwrap() - best).abs() <= 1e-9);
}

#[test]
fn trained_models_respect_the_mass_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (n, b) in [(6usize, 2.0), (10, 4.0), (12, 8.0)] {
        let x = BitString::from_rank(rng.random_range(0..1u64 << n), n).unwrap();
        let point = ExplicitDistribution::point(&x, 20).unwrap();
        for family in [Family::FullPrefix, Family::Markov { order: 2 }] {
            let out = fit(&LogitModel::new(n, family, b).unwrap(), &TrainingData::Exact(&point), &TrainConfig {
                bound: b,
                ..TrainConfig::default()
            })
            .unwrap();
            let floor = (1.0 + b.exp2()).powi(-(n as i32));
            let pmf = out.model.pmf().unwrap();
            let min = (0..pmf.size()).map(|r| pmf.prob(r)).fold(f64::INFINITY, f64::min);
            assert!(min >= floor * (1.0 - 1e-12), "{family} n={n} B={b}: {min} < {floor}");
            assert!(out.model.theta().iter().all(|t| t.abs() <= b));
        }
    }
}

#[test]
fn uniform_data_stays_uniform_for_every_family() {
    let u = ExplicitDistribution::uniform(8, 8).unwrap();
    for family in families() {
        let out = fit(&LogitModel::new(8, family, 8.0).unwrap(), &TrainingData::Exact(&u), &TrainConfig::default()).unwrap();
        assert!(out.model.theta().iter().all(|t| t.abs() < 1e-12));
        assert!((out.trace.last().unwrap() - 8.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_mode_is_deterministic_and_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let d = random_distribution(&mut rng, 5, 30, false);
    let cfg = TrainConfig {
        mode: TrainMode::Sampled,
        learning_rate: 1.0,
        steps: 2000,
        batch: 128,
        rng_seed: 4,
        bound: 8.0,
    };
    let init = LogitModel::new(5, Family::Markov { order: 1 }, 8.0).unwrap();
    let a = fit(&init, &TrainingData::Exact(&d), &cfg).unwrap();
    let b = fit(&init, &TrainingData::Exact(&d), &cfg).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.trace, b.trace);
    let best = brute_markov_optimum(&d, 1, 8.0);
    assert!(loss(&a.model, &TrainingData::Exact(&d)).unwrap() - best < 0.05);
}

fn draw<R: Rng>(rng: &mut R, d: &ExplicitDistribution, m: usize) -> Vec<BitString> {
    let cum: Vec<f64> = (0..d.size())
        .scan(0.0, |acc, r| {
            *acc += d.prob_of(r);
            Some(*acc)
        })
        .collect();
    (0..m)
        .map(|_| {
            let u: f64 = rng.random();
            let r = cum.partition_point(|&c| c <= u).min(d.size() - 1);
            BitString::from_rank(r as u64, d.n()).unwrap()
        })
        .collect()
}

#[test]
fn mdl_prefers_the_smallest_adequate_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let menu = [Family::Markov { order: 0 }, Family::Markov { order: 2 }, Family::FullPrefix];
    let cfg = TrainConfig::default();

    let u = ExplicitDistribution::uniform(6, 6).unwrap();
    let samples = draw(&mut rng, &u, 10_000);
    let sel = mdl_select(&menu, &samples, 16.0, &cfg).unwrap();
    assert_eq!(sel.best.family(), Family::Markov { order: 0 });
    assert_eq!(sel.table.len(), 3);
    assert!(sel.table.iter().all(|s| s.score >= 0.0 && s.model_bits == s.parameters as f64 * 16.0));

    let x: BitString = "101100".parse().unwrap();
    let samples = vec![x; 10_000];
    let sel = mdl_select(&menu, &samples, 16.0, &cfg).unwrap();
    let best = sel.table.iter().min_by(|a, b| a.score.total_cmp(&b.score)).unwrap();
    assert!(best.cross_entropy_bits < 0.1, "{best:?}");

    let one = draw(&mut rng, &u, 1);
    let sel = mdl_select(&menu, &one, 16.0, &cfg).unwrap();
    assert_eq!(sel.best.family(), Family::Markov { order: 0 });
}

#[test]
fn mdl_ties_go_to_fewer_parameters() {
    // with zero bits per parameter and uniform data every family scores n
    let u = ExplicitDistribution::uniform(4, 4).unwrap();
    let samples: Vec<BitString> = (0..16).map(|r| BitString::from_rank(r, 4).unwrap()).collect();
    let menu = [Family::FullPrefix, Family::Markov { order: 1 }, Family::Markov { order: 0 }];
    let sel = mdl_select(&menu, &samples, 0.0, &TrainConfig::default()).unwrap();
    assert!(sel.table.iter().all(|s| s.score == 4.0));
    assert_eq!(sel.best.family(), Family::Markov { order: 0 });
    assert_eq!(u.n(), 4);
}
