use evidential_magdm::divergence::{LogBase, WeightVector};
use evidential_magdm::linguistic::{bpa_tensor, membership_matrix, DecisionMatrix, LinguisticConfig};
use evidential_magdm::pipeline::*;
use evidential_magdm::recruitment as rc;
use evidential_magdm::{Error, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_panel(rng: &mut ChaCha8Rng, k: usize, p: usize, q: usize, spread: f64) -> Vec<DecisionMatrix> {
    let truth: Vec<f64> = (0..p * q).map(|_| rng.gen_range(50.0..100.0)).collect();
    let noise = Normal::new(0.0, spread).unwrap();
    (0..k)
        .map(|e| {
            let v: Vec<f64> = truth.iter().map(|t| t + noise.sample(rng)).collect();
            expert(&format!("e{e}"), p, q, v)
        })
        .collect()
}

fn expert(id: &str, p: usize, q: usize, v: Vec<f64>) -> DecisionMatrix {
    DecisionMatrix::with_default_labels(id, Matrix::from_row_major(p, q, v).unwrap()).unwrap()
}

#[test]
fn owa_belief_matches_hand_dot_product() {
    let ms = rc::decision_matrices().unwrap();
    let b = bpa_tensor(&membership_matrix(&ms[0], &LinguisticConfig::default()).unwrap());
    let w = OwaWeights {
        scheme: OwaScheme::LinearDescending,
        values: vec![0.4, 0.3, 0.2, 0.1, 0.0],
    };
    let bel = ordered_weighted_belief(&b, &w).unwrap();
    let mut row = b.cell(0, 0).to_vec();
    row.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let oracle = 0.4 * row[0] + 0.3 * row[1] + 0.2 * row[2] + 0.1 * row[3];
    assert!((bel[(0, 0)] - oracle).abs() < 1e-15);
    let printed = [0.0952, 0.0759, 0.0513, 0.0408, 0.0351];
    let printed_dot: f64 = printed.iter().zip(&w.values).map(|(m, w)| m * w).sum();
    assert!((printed_dot - 0.07519).abs() < 1e-12);
    assert!((bel[(0, 0)] - printed_dot).abs() < 1e-4);

    let uniform = owa_weights(5, OwaScheme::Uniform).unwrap();
    let mean = ordered_weighted_belief(&b, &uniform).unwrap();
    assert!((mean[(3, 1)] - b.cell(3, 1).iter().sum::<f64>() / 5.0).abs() < 1e-15);
    let max = OwaWeights {
        scheme: OwaScheme::Uniform,
        values: vec![1.0, 0.0, 0.0, 0.0, 0.0],
    };
    let top = ordered_weighted_belief(&b, &max).unwrap();
    assert_eq!(top[(5, 0)], b.cell(5, 0).iter().copied().fold(0.0, f64::max));
}

#[test]
fn plausibilities_sum_to_one_per_cell() {
    let report = run(&rc::decision_matrices().unwrap(), &PipelineConfig::default()).unwrap();
    let pls = &report.assessment.plausibilities;
    for i in 0..17 {
        for j in 0..2 {
            let s: f64 = pls.iter().map(|m| m[(i, j)]).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn wpbl_rows_sum_to_one() {
    let report = run(&rc::decision_matrices().unwrap(), &PipelineConfig::default()).unwrap();
    for w in &report.assessment.wpbl {
        for i in 0..w.rows() {
            assert!((w.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn divergence_matrix_is_symmetric_with_zero_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for axis in [WpblAxis::Attributes, WpblAxis::Alternatives] {
        let cfg = PipelineConfig {
            wpbl_axis: axis,
            ..Default::default()
        };
        let a = assess_experts(&random_panel(&mut rng, 5, 9, 3, 4.0), &cfg).unwrap();
        let d = &a.divergence.aggregate;
        for i in 0..5 {
            assert_eq!(d[(i, i)], 0.0);
            for j in 0..5 {
                assert_eq!(d[(i, j)], d[(j, i)]);
                assert!(d[(i, j)] >= 0.0);
            }
        }
        assert!((a.weights.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn conventions_do_not_change_weights() {
    let ms = rc::decision_matrices().unwrap();
    let base = assess_experts(&ms, &PipelineConfig::default()).unwrap();
    let literal = assess_experts(
        &ms,
        &PipelineConfig {
            pair_aggregation: PairAggregation::Sum,
            expert_averaging: ExpertAveraging::Sum,
            ..Default::default()
        },
    )
    .unwrap();
    for (a, b) in base.weights.weights.iter().zip(&literal.weights.weights) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn identical_experts() {
    let m = rc::decision_matrices().unwrap().remove(0);
    let mut twin = m.clone();
    twin = DecisionMatrix::new("twin", twin.alternatives().to_vec(), twin.attributes().to_vec(), twin.values().clone()).unwrap();
    let pair = [m.clone(), twin];
    assert_eq!(
        run(&pair, &PipelineConfig::default()).unwrap_err(),
        Error::ZeroAverageDivergence { expert: 0 }
    );
    let cfg = PipelineConfig {
        zero_divergence: ZeroDivergencePolicy::Concentrate,
        ..Default::default()
    };
    let r = run(&pair, &cfg).unwrap();
    assert_eq!(r.assessment.weights.weights, vec![0.5, 0.5]);
}

#[test]
fn single_expert_is_rejected() {
    let ms = rc::decision_matrices().unwrap();
    let err = run(&ms[..1], &PipelineConfig::default()).unwrap_err();
    assert_eq!(err, Error::TooFewExperts(1));
    assert!(err.to_string().contains("MAGDM requires ≥ 2 experts"));
}

#[test]
fn one_changed_alternative_stands_out() {
    // two experts agree everywhere except alternative 3; column extremes stay put
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (p, q) = (8, 2);
    let mut base: Vec<f64> = (0..p * q).map(|_| rng.gen_range(60.0..90.0)).collect();
    base[..q].fill(50.0);
    base[q..2 * q].fill(100.0);
    let mut other = base.clone();
    other[3 * q] += 6.0;
    other[3 * q + 1] -= 5.0;
    let ms = [expert("a", p, q, base), expert("b", p, q, other)];
    for axis in [WpblAxis::Attributes, WpblAxis::Alternatives] {
        let cfg = PipelineConfig {
            wpbl_axis: axis,
            zero_divergence: ZeroDivergencePolicy::Concentrate,
            ..Default::default()
        };
        let a = assess_experts(&ms, &cfg).unwrap();
        let col = a.divergence.pairwise.column(0);
        let top = (0..p).max_by(|&x, &y| col[x].total_cmp(&col[y])).unwrap();
        assert_eq!(top, 3, "{axis:?}: {col:?}");
        assert!(col.iter().enumerate().all(|(i, &v)| i == 3 || v < col[3]));
        if axis == WpblAxis::Attributes {
            let (wa, wb) = (&a.wpbl[0], &a.wpbl[1]);
            for i in 0..p {
                assert!((col[i] - brute_js(wa.row(i), wb.row(i))).abs() < 1e-15);
            }
        }
    }
}

fn brute_js(a: &[f64], b: &[f64]) -> f64 {
    let half = |x: f64, m: f64| if x > 0.0 { 0.5 * x * (x / m).log2() } else { 0.0 };
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let m = 0.5 * (x + y);
            half(x, m) + half(y, m)
        })
        .sum()
}

#[test]
fn candidate_twelve_first_pair() {
    let a = assess_experts(&rc::decision_matrices().unwrap(), &PipelineConfig::default()).unwrap();
    let ours = a.divergence.pairwise[(11, 0)];
    println!("candidate 12, (u1,u2): computed {ours:.4}, published {:.4}", rc::PAIR_DIVERGENCE[11][0]);
    assert!((ours - rc::PAIR_DIVERGENCE[11][0]).abs() <= 5e-4);
}

#[test]
fn identical_experts_have_zero_pair_divergence() {
    let m = rc::decision_matrices().unwrap().remove(1);
    let cfg = PipelineConfig::default();
    let bel = ordered_weighted_belief(
        &bpa_tensor(&membership_matrix(&m, &cfg.linguistic).unwrap()),
        &owa_weights(5, cfg.owa).unwrap(),
    )
    .unwrap();
    let pls = ordered_weighted_plausibility(&[bel.clone(), bel.clone()]).unwrap();
    let w = expert_wpbl(&bel, &pls[0], WpblAxis::Attributes, 0).unwrap();
    let d = pairwise_divergence(&w, &w, WpblAxis::Attributes, &WeightVector::uniform(2), LogBase::Two).unwrap();
    assert!(d.iter().all(|&v| v == 0.0));
}

/// P(X ≥ x) for X ~ Binomial(n, ½).
fn binomial_upper_tail(n: u64, x: u64) -> f64 {
    let mut ln_c = 0.0f64;
    let mut tail = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= x {
            tail += (ln_c - n as f64 * std::f64::consts::LN_2).exp();
        }
    }
    tail
}

#[test]
fn more_disagreement_never_raises_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let extra = Normal::new(0.0, 8.0).unwrap();
    let cfg = PipelineConfig::default();
    let trials = 200;
    let mut lowered = 0;
    for _ in 0..trials {
        let mut ms = random_panel(&mut rng, 4, 12, 3, 3.0);
        let before = assess_experts(&ms, &cfg).unwrap().weights.weights[0];
        let noisy: Vec<f64> = ms[0].values().as_slice().iter().map(|v| v + extra.sample(&mut rng)).collect();
        ms[0] = expert("e0", 12, 3, noisy);
        let after = assess_experts(&ms, &cfg).unwrap().weights.weights[0];
        if after < before {
            lowered += 1;
        }
    }
    let p_value = binomial_upper_tail(trials, lowered);
    assert!(p_value < 0.01, "weight lowered in {lowered}/{trials} trials, p = {p_value:.3e}");
}

#[test]
fn reports_are_deterministic() {
    let ms = rc::decision_matrices().unwrap();
    let a = serde_json::to_string(&run(&ms, &PipelineConfig::default()).unwrap()).unwrap();
    let b = serde_json::to_string(&run(&ms, &PipelineConfig::default()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mismatched_experts_are_rejected() {
    let mut ms = rc::decision_matrices().unwrap();
    ms[2] = expert("u3", 3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert!(matches!(run(&ms, &PipelineConfig::default()), Err(Error::ShapeMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weights_ignore_scaling_of_the_divergence_matrix(
        upper in prop::collection::vec(1e-5f64..1.0, 6),
        lambda in 1e-3f64..1e3,
    ) {
        let mut d = Matrix::zeros(4, 4);
        for (c, (a, b)) in expert_pairs(4).into_iter().enumerate() {
            d[(a, b)] = upper[c];
            d[(b, a)] = upper[c];
        }
        let w = expert_weights(&d, ExpertAveraging::DivideByK, ZeroDivergencePolicy::Error).unwrap();
        let ws = expert_weights(&d.scale(lambda), ExpertAveraging::DivideByK, ZeroDivergencePolicy::Error).unwrap();
        for (x, y) in w.weights.iter().zip(&ws.weights) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert_eq!(w.order(), ws.order());
        // supports run opposite to averages
        for i in 0..4 {
            for j in 0..4 {
                if w.averages[i] < w.averages[j] {
                    prop_assert!(w.supports[i] > w.supports[j]);
                }
            }
        }
    }

    #[test]
    fn ranking_ignores_positive_scaling(
        v in prop::collection::vec(0.0f64..1.0, 12),
        lambda in 1e-3f64..1e3,
    ) {
        let m = Matrix::from_row_major(6, 2, v).unwrap();
        prop_assume!(m.as_slice().iter().any(|&x| x > 0.0));
        let a = rank(&m).unwrap();
        let b = rank(&m.scale(lambda)).unwrap();
        prop_assert_eq!(a.order, b.order);
    }
}
