use proptest::prelude::*;
use pyrorisk::fusion::*;

#[test]
fn binary_grid_is_monotone() {
    let cfg = FusionConfig::default();
    for base in 0..=5u8 {
        let levels: Vec<u8> = (0..=100)
            .map(|i| fuse_binary(base, i as f64 / 100.0, &cfg).unwrap().level)
            .collect();
        assert_eq!(levels[0], base);
        assert_eq!(levels[100], 0);
        assert!(levels.windows(2).all(|w| w[1] <= w[0]));
        assert!(levels.iter().all(|&l| l <= base));
    }
}

#[test]
fn severity_grid_is_monotone() {
    for base in 0..=5u8 {
        let levels: Vec<u8> = (0..=5).map(|s| fuse_severity(base, s).unwrap().level).collect();
        assert_eq!(levels[0], base);
        assert_eq!(levels[5], 0);
        assert!(levels.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn fwi_sweep_reaches_every_class() {
    let cfg = FusionConfig::default();
    let classes: Vec<u8> = (0..=1000).map(|i| fwi_to_danger(i as f64 * 0.1, &cfg).unwrap()).collect();
    assert!(classes.windows(2).all(|w| w[1] >= w[0]));
    for c in 0..=5 {
        assert!(classes.contains(&c));
    }
}

proptest! {
    #[test]
    fn never_exceeds_base(base in 0u8..=5, p in 0.0f64..=1.0, gamma in 0.05f64..8.0, tau in 0.0f64..=1.0) {
        let cfg = FusionConfig { gamma, tau, ..FusionConfig::default() };
        let d = fuse_binary(base, p, &cfg).unwrap();
        prop_assert!(d.level <= d.base_level);
        let q = (p + 0.1).min(1.0);
        if p >= tau {
            prop_assert!(fuse_binary(base, q, &cfg).unwrap().level <= d.level);
        }
    }

    #[test]
    fn map_cardinality(cells in prop::collection::vec((0usize..10, 0usize..10, 0.0f64..=1.0), 0..50), fwi in 0.0f64..80.0) {
        let map = assess_cells(&cells, fwi, &FusionConfig::default()).unwrap();
        prop_assert_eq!(map.cells.len(), cells.len());
        prop_assert_eq!(map.histogram().iter().sum::<usize>(), cells.len());
        prop_assert!(map.cells.iter().all(|c| c.level <= map.base_level));
    }
}
