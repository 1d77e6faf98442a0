use occelm_core::dataset::{occ_split, train_target_count, SplitPlan, ZScoreStats};
use occelm_core::metrics::{aggregate, measures, ConfusionCounts};
use occelm_core::modelsel::error_threshold;
use occelm_core::threshold::{relative_error, thr1_fit, thr2_fit, thr3_decide};
use occelm_core::{Dataset, Label, Matrix};
use proptest::prelude::*;

fn errors() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..100.0f64, 2..60)
}

proptest! {
    #[test]
    fn thr1_is_an_order_statistic(e in errors(), frac in 0.0..0.5f64, scale in 0.01..100.0f64) {
        let t = thr1_fit(&e, frac).unwrap();
        prop_assert!(e.contains(&t));
        let scaled: Vec<f64> = e.iter().map(|v| v * scale).collect();
        prop_assert!((thr1_fit(&scaled, frac).unwrap() - t * scale).abs() <= 1e-12 * (1.0 + t * scale));
        let mut rev = e.clone();
        rev.reverse();
        prop_assert_eq!(thr1_fit(&rev, frac).unwrap(), t);
    }

    #[test]
    fn thr2_shifts_with_errors(e in errors(), shift in -50.0..50.0f64) {
        let t = thr2_fit(&e).unwrap();
        let moved: Vec<f64> = e.iter().map(|v| v + shift).collect();
        prop_assert!((thr2_fit(&moved).unwrap() - (t + shift)).abs() < 1e-9);
    }

    #[test]
    fn thr3_is_scale_free(
        pairs in prop::collection::vec((0.1..10.0f64, 0.1..10.0f64), 1..30),
        scale in 0.001..1000.0f64,
    ) {
        let (a, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let d = thr3_decide(&a, &p, 0.5, 0.1).unwrap();
        let sa: Vec<f64> = a.iter().map(|v| v * scale).collect();
        let sp: Vec<f64> = p.iter().map(|v| v * scale).collect();
        let ds = thr3_decide(&sa, &sp, 0.5, 0.1).unwrap();
        prop_assert_eq!(d.is_target, ds.is_target);
        for (x, y) in a.iter().zip(&p) {
            let r = relative_error(*x, *y);
            prop_assert!((r - relative_error(x * scale, y * scale)).abs() < 1e-12);
        }
    }

    #[test]
    fn error_threshold_is_monotone(f in 0.01..0.49f64, s in 0.0..5.0f64, m in 1usize..1000) {
        let base = error_threshold(f, s, m);
        prop_assert!(base >= f);
        prop_assert!(error_threshold(f, s + 0.5, m) >= base);
        prop_assert!(error_threshold(f, s, m + 1) <= base);
        prop_assert!(error_threshold((f + 0.01).min(0.5), s, m) >= base);
    }

    #[test]
    fn auc_is_balanced_accuracy(tp in 0usize..500, fp in 0usize..500, tn in 0usize..500, fn_ in 0usize..500) {
        let r = measures(&ConfusionCounts { tp, fp, tn, fn_ });
        let expected = (r.recall + r.specificity) / 2.0;
        if expected.is_nan() {
            prop_assert!(r.auc.is_nan());
        } else {
            prop_assert!((r.auc - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_ignores_run_order(counts in prop::collection::vec((1usize..50, 0usize..50, 1usize..50, 0usize..50), 2..10)) {
        let runs: Vec<_> = counts
            .iter()
            .map(|&(tp, fp, tn, fn_)| measures(&ConfusionCounts { tp, fp, tn, fn_ }))
            .collect();
        let a = aggregate(&runs).unwrap();
        let mut rev = runs.clone();
        rev.reverse();
        let b = aggregate(&rev).unwrap();
        prop_assert!((a.auc - b.auc).abs() < 1e-9);
        prop_assert!((a.std_auc - b.std_auc).abs() < 1e-9);
        prop_assert!((a.f1 - b.f1).abs() < 1e-9);
    }

    #[test]
    fn zscore_centres_and_scales(rows in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 3), 3..40)) {
        let x = Matrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
        let stats = ZScoreStats::fit(&x).unwrap();
        let z = stats.apply(&x).unwrap();
        for j in 0..3 {
            let col = z.col_to_vec(j);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            prop_assert!(var.abs() < 1e-9 || (var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn split_sizes(targets in 2usize..200, outliers in 1usize..100, seed in any::<u64>(), run in 0usize..5) {
        let n = targets + outliers;
        let x = Matrix::from_fn(n, 1, |i, _| i as f64);
        let labels = (0..n).map(|i| if i % 3 == 0 && i / 3 < outliers { Label::Outlier } else { Label::Target });
        let labels: Vec<Label> = labels.collect();
        let t = labels.iter().filter(|l| **l == Label::Target).count();
        prop_assume!(t >= 2 && t < n);
        let data = Dataset::new(x, Some(labels)).unwrap();
        let (train, test) = occ_split(&data, &SplitPlan::new(5, seed), run).unwrap();
        let k = train_target_count(t, 0.5);
        prop_assert_eq!(train.sample_count(), k);
        prop_assert_eq!(test.sample_count(), n - k);
        prop_assert_eq!(test.count(Label::Target), t - k);
        prop_assert!(train.labels().is_none());
        // train and test rows are disjoint and cover everything
        let mut ids: Vec<i64> = train.samples().col_to_vec(0).into_iter().chain(test.samples().col_to_vec(0)).map(|v| v as i64).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..n as i64).collect::<Vec<_>>());
    }
}
