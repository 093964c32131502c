mod oracle;

use std::collections::BTreeSet;

use dtfsel_core::features::{FeatureVector, LabeledFeatureSet, LabeledRow, FEATURE_COUNT};
use dtfsel_core::rng;
use dtfsel_core::selection::{
    build_profile, quota, sample_fewshot, select, standardize, Method, ProfileParams,
    SelectionParams,
};
use proptest::prelude::*;
use rand::Rng;

fn to_set(rows: &[oracle::Row]) -> LabeledFeatureSet {
    LabeledFeatureSet::new(
        rows.iter()
            .map(|r| LabeledRow {
                id: r.id.clone(),
                domain: r.domain.clone(),
                label: r.label,
                features: FeatureVector(r.x),
                degenerate: BTreeSet::new(),
            })
            .collect(),
    )
    .unwrap()
}

/// Reference and candidate rows with 3 labels and 4 domains. Answer length
/// lives on a much larger scale than the ratios, as in real data.
fn instance(seed: u64, n_ref: usize, n_cand: usize) -> (Vec<oracle::Row>, Vec<oracle::Row>) {
    let mut rng = rng::from_seed(seed);
    let mut make = |prefix: &str, n: usize, shift: f64| -> Vec<oracle::Row> {
        (0..n)
            .map(|i| {
                let label = (i % 3) as u8;
                let mut x = [0.0; FEATURE_COUNT];
                for (j, v) in x.iter_mut().enumerate() {
                    *v = if j == 5 {
                        rng.random_range(1.0..80.0_f64).round()
                    } else {
                        rng.random_range(0.0..1.0) + 0.1 * label as f64 + shift
                    };
                }
                oracle::Row {
                    id: format!("{prefix}{:03}", rng.random_range(0..1000) * 1000 + i),
                    domain: ["bio", "chem", "hist", "phys"][rng.random_range(0..4)].into(),
                    label,
                    x,
                }
            })
            .collect()
    };
    let reference = make("r", n_ref, 0.0);
    let cand = make("c", n_cand, 0.05);
    (reference, cand)
}

fn params(method: Method, pct: usize, standardized: bool) -> SelectionParams {
    SelectionParams {
        fraction: pct as f64 / 100.0,
        standardized,
        ..SelectionParams::for_method(method, 7)
    }
}

#[test]
fn all_methods_match_brute_force() {
    for case in 0..12u64 {
        let (reference, cand) = instance(case, 10 + (case as usize * 7) % 41, 20 + case as usize * 13);
        let pct = [5, 10, 25, 50][case as usize % 4];
        let standardized = case % 3 != 0;
        let mut pp = ProfileParams::new(case);
        pp.include_full = true;
        let profile = build_profile(&to_set(&reference), &pp).unwrap();
        let cset = to_set(&cand);

        let got = select(Method::LabelMean, &profile, &cset, params(Method::LabelMean, pct, standardized))
            .unwrap();
        let (scores, ids) = oracle::method1(&reference, &cand, standardized, pct);
        assert_eq!(got.scores.iter().map(|s| s.score).collect::<Vec<_>>(), scores);
        assert_eq!(got.selected_ids, ids);

        let centers: Vec<[f64; FEATURE_COUNT]> =
            profile.representatives.iter().map(|r| r.center.0).collect();
        assert_eq!(centers.len(), 8);
        let p2 = params(Method::NearestRepresentative, pct, standardized);
        let got = select(Method::NearestRepresentative, &profile, &cset, p2).unwrap();
        let (scores, ids) = oracle::method2(&reference, &centers, &cand, standardized, pct);
        assert_eq!(got.scores.iter().map(|s| s.score).collect::<Vec<_>>(), scores);
        assert_eq!(got.selected_ids, ids);

        for include_self in [false, true] {
            let p3 = SelectionParams {
                include_self,
                ..params(Method::ReferenceRank, pct, standardized)
            };
            let got = select(Method::ReferenceRank, &profile, &cset, p3).unwrap();
            let (scores, ids) = oracle::method3(&reference, &cand, standardized, 5, include_self, pct);
            assert_eq!(got.scores.iter().map(|s| s.score).collect::<Vec<_>>(), scores);
            assert_eq!(got.selected_ids, ids);
        }
    }
}

#[test]
fn standardize_matches_two_pass_oracle() {
    let (reference, cand) = instance(42, 37, 55);
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(1)).unwrap();
    let (m, s) = oracle::moments(&reference);
    let z = standardize(&to_set(&cand), &profile);
    for (row, c) in z.rows.iter().zip(&cand) {
        let want = oracle::zscore(&c.x, &m, &s);
        for (got, want) in row.features.0.iter().zip(want) {
            assert!((got - want).abs() < 1e-10);
        }
    }
    // the reference against itself: mean 0, population std 1
    let zr = standardize(&to_set(&reference), &profile);
    let back: Vec<oracle::Row> = zr
        .rows
        .iter()
        .map(|r| oracle::Row {
            id: r.id.clone(),
            domain: r.domain.clone(),
            label: r.label,
            x: r.features.0,
        })
        .collect();
    let (m, s) = oracle::moments(&back);
    for j in 0..FEATURE_COUNT {
        assert!(m[j].abs() < 1e-10 && (s[j] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn constant_component_standardizes_to_zero() {
    let (mut reference, cand) = instance(5, 20, 10);
    reference.iter_mut().for_each(|r| r.x[3] = 0.25);
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(1)).unwrap();
    assert_eq!(profile.feature_stds.0[3], 0.0);
    let z = standardize(&to_set(&cand), &profile);
    assert!(z.rows.iter().all(|r| r.features.0[3] == 0.0));
}

#[test]
fn method1_exact_mean_is_selected_and_full_fraction_takes_all() {
    let (reference, mut cand) = instance(9, 30, 40);
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(2)).unwrap();
    cand[17].x = profile.label_means[&cand[17].label].0;
    let got = select(Method::LabelMean, &profile, &to_set(&cand), params(Method::LabelMean, 5, true))
        .unwrap();
    assert_eq!(got.scores[17].score, 0.0);
    assert_eq!(got.selected_ids[0], cand[17].id);

    let all = select(Method::LabelMean, &profile, &to_set(&cand), params(Method::LabelMean, 100, true))
        .unwrap();
    assert_eq!(all.selected_ids.len(), cand.len());
}

#[test]
fn method2_quota_is_per_domain() {
    let (reference, mut cand) = instance(11, 30, 80);
    for (i, c) in cand.iter_mut().enumerate() {
        c.domain = if i < 40 { "a".into() } else { "b".into() };
    }
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(3)).unwrap();
    let got = select(
        Method::NearestRepresentative,
        &profile,
        &to_set(&cand),
        params(Method::NearestRepresentative, 5, true),
    )
    .unwrap();
    let in_a = got.selected_ids.iter().filter(|id| cand[..40].iter().any(|c| &c.id == *id)).count();
    assert_eq!((in_a, got.selected_ids.len()), (2, 4));
}

#[test]
fn method2_candidate_on_a_representative_scores_zero() {
    let (reference, mut cand) = instance(12, 30, 10);
    let mut pp = ProfileParams::new(4);
    pp.standardize = false;
    let profile = build_profile(&to_set(&reference), &pp).unwrap();
    cand[3].x = profile.representatives[5].center.0;
    let got = select(
        Method::NearestRepresentative,
        &profile,
        &to_set(&cand),
        params(Method::NearestRepresentative, 5, false),
    )
    .unwrap();
    assert_eq!(got.scores[3].score, 0.0);
}

#[test]
fn method3_single_candidate_scores_mean_of_first_indices() {
    let (reference, cand) = instance(13, 12, 1);
    let mut pp = ProfileParams::new(5);
    pp.include_full = true;
    let profile = build_profile(&to_set(&reference), &pp).unwrap();
    let got = select(Method::ReferenceRank, &profile, &to_set(&cand), params(Method::ReferenceRank, 5, true))
        .unwrap();
    assert_eq!(got.scores[0].score, 2.0);
}

#[test]
fn method3_requires_full_matrix_and_enough_rows() {
    let (reference, cand) = instance(14, 12, 5);
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(5)).unwrap();
    let p = params(Method::ReferenceRank, 5, true);
    assert!(select(Method::ReferenceRank, &profile, &to_set(&cand), p).is_err());
    let mut pp = ProfileParams::new(5);
    pp.include_full = true;
    let profile = build_profile(&to_set(&reference), &pp).unwrap();
    let p = SelectionParams { m: 13, ..p };
    assert!(select(Method::ReferenceRank, &profile, &to_set(&cand), p).is_err());
}

#[test]
fn fewshot_per_domain_counts() {
    let (reference, cand) = instance(15, 30, 120);
    let profile = build_profile(&to_set(&reference), &ProfileParams::new(6)).unwrap();
    let sel = select(
        Method::NearestRepresentative,
        &profile,
        &to_set(&cand),
        params(Method::NearestRepresentative, 10, true),
    )
    .unwrap();
    let picks = sample_fewshot(&sel, 2, 99).unwrap();
    let domains: BTreeSet<&str> = cand.iter().map(|c| c.domain.as_str()).collect();
    assert_eq!(picks.len(), 2 * domains.len());
    assert_eq!(picks, sample_fewshot(&sel, 2, 99).unwrap());
    assert!(picks.iter().all(|p| sel.selected_ids.contains(p)));
    // a domain with a single selected id returns it
    let one = sample_fewshot(&sel, 1, 3).unwrap();
    assert_eq!(one.len(), domains.len());
}

#[test]
fn quota_matches_integer_arithmetic() {
    for n in 0..500 {
        for pct in [1, 5, 10, 33, 50, 100] {
            assert_eq!(quota(n, pct as f64 / 100.0), oracle::quota_pct(n, pct), "n={n} pct={pct}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn method1_standardized_is_scale_invariant(seed in 0u64..1000, col in 0usize..18, c in 0.01f64..100.0) {
        let (reference, cand) = instance(seed, 25, 60);
        let scaled = |rows: &[oracle::Row]| -> Vec<oracle::Row> {
            rows.iter().map(|r| { let mut r = r.clone(); r.x[col] *= c; r }).collect()
        };
        let run = |reference: &[oracle::Row], cand: &[oracle::Row]| {
            let profile = build_profile(&to_set(reference), &ProfileParams::new(1)).unwrap();
            select(Method::LabelMean, &profile, &to_set(cand), params(Method::LabelMean, 5, true))
                .unwrap()
                .selected_ids
        };
        prop_assert_eq!(run(&reference, &cand), run(&scaled(&reference), &scaled(&cand)));
    }

    #[test]
    fn method3_scores_are_bounded(seed in 0u64..1000, n_ref in 5usize..30, n_cand in 1usize..40) {
        let (reference, cand) = instance(seed, n_ref, n_cand);
        let mut pp = ProfileParams::new(seed);
        pp.k = 3;
        pp.include_full = true;
        let profile = build_profile(&to_set(&reference), &pp).unwrap();
        let p = SelectionParams { k: 3, ..params(Method::ReferenceRank, 5, true) };
        let got = select(Method::ReferenceRank, &profile, &to_set(&cand), p).unwrap();
        let combined = n_ref + n_cand - 1;
        for s in &got.scores {
            prop_assert!(s.score >= 2.0 && s.score <= (combined - 1) as f64);
        }
    }

    #[test]
    fn quota_per_group_holds(seed in 0u64..1000, pct in 1usize..=100, n_cand in 1usize..120) {
        let (reference, cand) = instance(seed, 20, n_cand);
        let profile = build_profile(&to_set(&reference), &ProfileParams::new(seed)).unwrap();
        let got = select(Method::LabelMean, &profile, &to_set(&cand), params(Method::LabelMean, pct, true))
            .unwrap();
        for label in 0..3u8 {
            let size = cand.iter().filter(|c| c.label == label).count();
            let picked = got.selected_ids.iter()
                .filter(|id| cand.iter().any(|c| &c.id == *id && c.label == label))
                .count();
            prop_assert_eq!(picked, oracle::quota_pct(size, pct));
        }
    }
}
