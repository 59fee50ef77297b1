use concurrence::complex::{build_filtered_complex, loglinear_interaction, Simplex};
use concurrence::nullmodel::planted_hole;
use concurrence::persistence::compute_persistence;
use concurrence::BinaryMatrix;
use proptest::prelude::*;

fn binary_matrix() -> impl Strategy<Value = BinaryMatrix> {
    (1usize..=6, 1usize..=12).prop_flat_map(|(v, n)| {
        proptest::collection::vec(proptest::collection::vec(0u8..=1, v), n).prop_map(move |rows| {
            BinaryMatrix::new((0..v).map(|i| format!("v{i}")).collect(), rows).unwrap()
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn components(bm: &BinaryMatrix) -> usize {
    let v = bm.n_vars();
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for o in 0..bm.n_obs() {
        let active = bm.active_set(o);
        for w in active.windows(2) {
            let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
            parent[a] = b;
        }
    }
    let present: Vec<usize> = (0..v).filter(|&j| bm.column_sum(j) > 0).collect();
    let mut roots: Vec<usize> = present.iter().map(|&j| find(&mut parent, j)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_are_monotone_under_inclusion(bm in binary_matrix()) {
        let fc = build_filtered_complex(&bm, 3).unwrap();
        for (s, c) in fc.iter() {
            for face in s.facets().filter(|f| !f.is_empty()) {
                prop_assert!(fc.count(&face).unwrap() >= c);
            }
        }
    }

    #[test]
    fn frames_are_nested_complexes(bm in binary_matrix()) {
        let fc = build_filtered_complex(&bm, 3).unwrap();
        for f in 1..=fc.max_level() {
            for s in fc.frame(f + 1) {
                prop_assert!(fc.in_frame(s, f));
            }
            for s in fc.frame(f) {
                for face in s.facets().filter(|x| !x.is_empty()) {
                    prop_assert!(fc.in_frame(&face, f));
                }
            }
        }
    }

    #[test]
    fn cap_does_not_change_lower_diagram(bm in binary_matrix(), k in 0usize..3) {
        let low = build_filtered_complex(&bm, k).unwrap();
        let high = build_filtered_complex(&bm, k + 2).unwrap();
        for (s, c) in low.iter() {
            prop_assert_eq!(high.count(s), Some(c));
        }
        let a = compute_persistence(&low, k).unwrap();
        let b = compute_persistence(&high, k + 2).unwrap();
        for d in 0..=k {
            prop_assert_eq!(a.birth_death(d), b.birth_death(d));
        }
    }

    #[test]
    fn reordering_observations_and_variables_preserves_diagram(
        (bm, rows, cols) in binary_matrix().prop_flat_map(|bm| {
            let (n, v) = (bm.n_obs(), bm.n_vars());
            (Just(bm), permutation(n), permutation(v))
        })
    ) {
        let shuffled = bm.select_rows(&rows).select_columns(&cols);
        let a = compute_persistence(&build_filtered_complex(&bm, 2).unwrap(), 2).unwrap();
        let b = compute_persistence(&build_filtered_complex(&shuffled, 2).unwrap(), 2).unwrap();
        for d in 0..=2 {
            prop_assert_eq!(a.birth_death(d), b.birth_death(d));
        }
    }

    #[test]
    fn duplicating_observations_scales_levels(bm in binary_matrix(), k in 2usize..4) {
        let rows: Vec<usize> = (0..bm.n_obs()).flat_map(|o| std::iter::repeat(o).take(k)).collect();
        let dup = bm.select_rows(&rows);
        let a = compute_persistence(&build_filtered_complex(&bm, 2).unwrap(), 2).unwrap();
        let b = compute_persistence(&build_filtered_complex(&dup, 2).unwrap(), 2).unwrap();
        for d in 0..=2 {
            let scaled: Vec<(usize, usize)> = a.birth_death(d).iter().map(|&(x, y)| (x * k, y * k)).collect();
            prop_assert_eq!(b.birth_death(d), scaled);
        }
    }

    #[test]
    fn essential_dimension_zero_classes_count_components(bm in binary_matrix()) {
        let diagram = compute_persistence(&build_filtered_complex(&bm, 1).unwrap(), 1).unwrap();
        let essential = diagram.in_dim(0).filter(|p| p.death == 0).count();
        prop_assert_eq!(essential, components(&bm));
    }

    #[test]
    fn loglinear_is_permutation_invariant(
        (bm, subset) in binary_matrix()
            .prop_filter("needs two variables", |bm| bm.n_vars() >= 2)
            .prop_flat_map(|bm| {
                let v = bm.n_vars();
                (Just(bm), permutation(v).prop_map(|p| p[..2.max(p.len() / 2)].to_vec()))
            }),
    ) {
        let a = loglinear_interaction(&bm, &subset, 0.5).unwrap();
        let mut rev = subset.clone();
        rev.reverse();
        let b = loglinear_interaction(&bm, &rev, 0.5).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn planted_hole_always_has_a_class(d in 1usize..=3, extra in 0usize..4, noise in 0usize..20, seed in any::<u64>()) {
        let bm = planted_hole(d, d + 2 + extra, noise, seed).unwrap();
        let diagram = compute_persistence(&build_filtered_complex(&bm, d).unwrap(), d).unwrap();
        prop_assert!(diagram.in_dim(d).count() >= 1);
        let shell = Simplex::new(0..(d as u32 + 2));
        let fc = build_filtered_complex(&bm, d).unwrap();
        let short = concurrence::localization::enumerate_short_cycles(&fc, 1, d).unwrap();
        prop_assert!(short.contains(&shell));
    }
}

#[test]
fn planted_shell_is_the_narrow_class() {
    for d in 1..=3 {
        let bm = planted_hole(d, d + 4, 30, 5).unwrap();
        let fc = build_filtered_complex(&bm, d).unwrap();
        let classes = concurrence::localization::narrow_classes(&fc, 1, d).unwrap();
        let shell = Simplex::new(0..(d as u32 + 2));
        assert!(classes.iter().any(|c| c.short_cycles.contains(&shell)), "d {d}");
    }
}
