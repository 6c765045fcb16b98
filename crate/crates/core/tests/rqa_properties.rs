use proptest::prelude::*;
use quann_core::field::MeanFieldObserver;
use quann_core::model::{build_qrnn_map, QrnnParams};
use quann_core::rqa::{
    diagonal_profile, diagonal_profiles, full_recurrence_line_gaps, recurrence_stats,
    render_recurrence_plot, GrayImage, RecurrenceConfig,
};
use quann_core::trajectory::{run_trajectory, Trajectory};
use quann_core::StateVector;

/// Explicit T x T recurrence matrix.
fn recurrence_matrix(traj: &Trajectory, radius: f64) -> Vec<Vec<bool>> {
    let t = traj.len();
    (0..t)
        .map(|i| {
            (0..t)
                .map(|j| {
                    let d: f64 = traj
                        .point(i)
                        .iter()
                        .zip(traj.point(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    d <= radius
                })
                .collect()
        })
        .collect()
}

/// Per-offset counts read off the lower sub-diagonals of the explicit matrix.
fn brute_counts(m: &[Vec<bool>]) -> Vec<usize> {
    let t = m.len();
    (1..t).map(|d| (0..t - d).filter(|&i| m[i + d][i]).count()).collect()
}

fn trajectory_strategy() -> impl Strategy<Value = Trajectory> {
    (2usize..=200, 1usize..=3).prop_flat_map(|(len, dim)| {
        // coarse grid so exact ties at the radius actually happen
        prop::collection::vec(prop::collection::vec(0u8..8, dim), len).prop_map(move |pts| {
            let pts: Vec<Vec<f64>> = pts
                .into_iter()
                .map(|p| p.into_iter().map(|x| x as f64 * 0.125).collect())
                .collect();
            Trajectory::from_points(dim, &pts).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn streaming_profile_equals_matrix_reduction(traj in trajectory_strategy(), radius in 0.0f64..0.6) {
        let m = recurrence_matrix(&traj, radius);
        let cfg = RecurrenceConfig::new(radius).unwrap();
        let profile = diagonal_profile(&traj, &cfg).unwrap();
        let expected = brute_counts(&m);
        for (d, &c) in expected.iter().enumerate() {
            prop_assert_eq!(profile.count(d + 1), c);
        }

        // same counts when the radius is one of several served in a single pass
        let radii = [RecurrenceConfig::new(0.3).unwrap(), cfg, RecurrenceConfig::new(0.0).unwrap()];
        let many = diagonal_profiles(&traj, &radii).unwrap();
        prop_assert_eq!(&many[1], &profile);
        for (p, r) in many.iter().zip(&radii) {
            prop_assert_eq!(p, &diagonal_profile(&traj, r).unwrap());
        }

        // and the plot is the matrix itself
        let img = render_recurrence_plot(&traj, &cfg, 0..traj.len()).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, &black) in row.iter().enumerate() {
                let want = if black { GrayImage::BLACK } else { GrayImage::WHITE };
                prop_assert_eq!(img.pixel(j, i), want);
            }
        }
    }

    #[test]
    fn counts_grow_with_radius(traj in trajectory_strategy(), a in 0.0f64..0.6, b in 0.0f64..0.6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let pl = diagonal_profile(&traj, &RecurrenceConfig::new(lo).unwrap()).unwrap();
        let ph = diagonal_profile(&traj, &RecurrenceConfig::new(hi).unwrap()).unwrap();
        for d in 1..traj.len() {
            prop_assert!(pl.count(d) <= ph.count(d));
        }
        prop_assert!(
            recurrence_stats(&pl).recurrence_probability <= recurrence_stats(&ph).recurrence_probability
        );
    }

    #[test]
    fn plots_are_symmetric(traj in trajectory_strategy(), radius in 0.0f64..0.6) {
        let img = render_recurrence_plot(&traj, &RecurrenceConfig::new(radius).unwrap(), 0..traj.len()).unwrap();
        let n = img.width();
        for i in 0..n {
            prop_assert_eq!(img.pixel(i, i), GrayImage::BLACK);
            for j in 0..n {
                prop_assert_eq!(img.pixel(i, j), img.pixel(j, i));
            }
        }
    }

    #[test]
    fn periodic_series_have_full_lines_at_multiples(q in 1usize..12, reps in 3usize..15) {
        // distinct points within a period, repeated exactly
        let pts: Vec<[f64; 2]> = (0..q * reps).map(|t| [(t % q) as f64, ((t % q) * (t % q)) as f64]).collect();
        let traj = Trajectory::from_points(2, &pts).unwrap();
        let profile = diagonal_profile(&traj, &RecurrenceConfig::new(0.0).unwrap()).unwrap();
        let expected: Vec<usize> = (1..traj.len()).filter(|d| d % q == 0).collect();
        prop_assert_eq!(profile.full_lines(), expected.clone());

        let stats = recurrence_stats(&profile);
        prop_assert_eq!(stats.mean_recurrence_strength, Some(1.0));
        prop_assert_eq!(stats.conditional_full_recurrence_probability, Some(1.0));

        let gaps = full_recurrence_line_gaps(&profile);
        if expected.len() >= 2 {
            prop_assert_eq!(gaps.frequency(q), expected.len() - 1);
            prop_assert_eq!(gaps.bins.len(), 1);
        } else {
            prop_assert!(gaps.is_empty());
        }
    }
}

#[test]
fn three_cycle_mean_field_has_period_three_lines() {
    let f = build_qrnn_map(QrnnParams::new(1.0).unwrap()).unwrap();
    let v0 = StateVector::normalized(
        [0.3, 0.5, -0.2, 0.7].iter().map(|&x| quann_core::Complex64::new(x, 0.1)).collect(),
    )
    .unwrap();
    let mut obs = MeanFieldObserver::new(2);
    run_trajectory(&f, &v0, 0, 300, &mut [&mut obs]).unwrap();
    let profile = diagonal_profile(obs.trajectory(), &RecurrenceConfig::new(1e-9).unwrap()).unwrap();
    let lines = profile.full_lines();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|d| d % 3 == 0));
    assert_eq!(lines[0], 3);
}
