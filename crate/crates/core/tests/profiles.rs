mod common;

use common::*;
use proptest::prelude::*;
use treeprofiles::imagery::{MultibandImage, RasterImage};
use treeprofiles::profiles::{
    build_ap, build_extended, build_fp, build_profiles, filter_tree, map_retained, read_profile_stack,
    reconstruct, write_profile_stack, ColumnContent, FilterSpec, Polarity, ProfileMode, ProfileRequest,
    Rule, TreeFamily,
};
use treeprofiles::{build_max_tree, build_min_tree, compute_attributes, Attribute, Connectivity, Feature};

fn to_raster(values: &[f64], like: &RasterImage) -> RasterImage {
    let v = values.iter().map(|&x| x as u16).collect();
    RasterImage::new(like.width(), like.height(), like.levels(), v).unwrap()
}

fn ascending(raw: Vec<f64>) -> Vec<f64> {
    let mut t = raw;
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn thinning_below_and_thickening_above(
        image in image_strategy(16, 8),
        t in 1.0..30.0f64,
        moment in 0.05..0.6f64,
    ) {
        let x: Vec<f64> = image.values().iter().map(|&v| f64::from(v)).collect();
        let max = build_max_tree(&image, Connectivity::C4);
        let min = build_min_tree(&image, Connectivity::C4);
        let (ta, tb) = (compute_attributes(&max, &image).unwrap(), compute_attributes(&min, &image).unwrap());
        for (attr, thr, rule) in [(Attribute::Area, t, Rule::Min), (Attribute::MomentOfInertia, moment, Rule::Direct)] {
            let thin = reconstruct(&max, &ta, &filter_tree(&max, &ta, attr, thr, rule)).values;
            let thick = reconstruct(&min, &tb, &filter_tree(&min, &tb, attr, thr, rule)).values;
            for p in 0..x.len() {
                prop_assert!(thin[p] <= x[p]);
                prop_assert!(thick[p] >= x[p]);
            }
        }
    }

    #[test]
    fn area_thinnings_are_ordered_and_absorb(image in image_strategy(16, 8), a in 1.0..20.0f64, b in 1.0..20.0f64) {
        let (t1, t2) = (a.min(b), a.max(b));
        let max = build_max_tree(&image, Connectivity::C4);
        let table = compute_attributes(&max, &image).unwrap();
        let g1 = reconstruct(&max, &table, &filter_tree(&max, &table, Attribute::Area, t1, Rule::Min)).values;
        let g2 = reconstruct(&max, &table, &filter_tree(&max, &table, Attribute::Area, t2, Rule::Min)).values;
        for p in 0..g1.len() {
            prop_assert!(g2[p] <= g1[p]);
        }
        // filtering the coarser result again at the finer threshold changes nothing,
        // and the finer result filtered at the coarser one gives the coarser one
        let once = to_raster(&g1, &image);
        let tree = build_max_tree(&once, Connectivity::C4);
        let tt = compute_attributes(&tree, &once).unwrap();
        let again = reconstruct(&tree, &tt, &filter_tree(&tree, &tt, Attribute::Area, t2, Rule::Min)).values;
        prop_assert_eq!(again, g2.clone());
        let coarse = to_raster(&g2, &image);
        let tree = build_max_tree(&coarse, Connectivity::C4);
        let tt = compute_attributes(&tree, &coarse).unwrap();
        let same = reconstruct(&tree, &tt, &filter_tree(&tree, &tt, Attribute::Area, t1, Rule::Min)).values;
        prop_assert_eq!(same, g2);
    }

    #[test]
    fn fp_and_ap_share_the_filtered_partition(image in image_strategy(16, 8), t in 1.0..30.0f64) {
        for family in TreeFamily::ALL {
            let spec = FilterSpec::new(Attribute::Area, vec![t], Rule::Min).unwrap();
            let h = treeprofiles::profiles::Hierarchy::build(&image, family, Connectivity::C4).unwrap();
            for (tree, table) in h.trees() {
                let mask = filter_tree(tree, table, spec.attribute, t, spec.rule);
                let by_level = map_retained(tree, &mask, |n| tree.levels()[n]);
                let ap = reconstruct(tree, table, &mask);
                if tree.kind().is_partition() {
                    // partitions restore the rounded component mean instead
                    let by_mean = map_retained(tree, &mask, |n| {
                        let r = &table.records()[n];
                        ((2 * r.gray_sum + r.area) / (2 * r.area)) as f64
                    });
                    prop_assert_eq!(ap.values, by_mean.values);
                } else {
                    prop_assert_eq!(ap.values, by_level.values);
                }
                let area = map_retained(tree, &mask, |n| table.records()[n].area as f64);
                let fp = treeprofiles::profiles::feature_map(tree, &mask, table, Feature::Area);
                prop_assert_eq!(fp.values, area.values);
            }
        }
    }

    #[test]
    fn profile_dims(
        image in image_strategy(10, 6),
        raw in proptest::collection::vec(1.0..60.0f64, 1..5),
        n_features in 1usize..3,
    ) {
        let thresholds = ascending(raw);
        let k = thresholds.len();
        let features = [Feature::StdDev, Feature::Area][..n_features].to_vec();
        for family in TreeFamily::ALL {
            for attribute in [Attribute::Area, Attribute::MomentOfInertia] {
                let spec = FilterSpec::with_default_rule(attribute, thresholds.clone()).unwrap();
                let single = if family == TreeFamily::ComponentPair { 2 * k + 1 } else { k + 1 };
                let ap = build_ap(&image, family, &spec).unwrap();
                prop_assert_eq!(ap.dim(), single);
                let fp = build_fp(&image, family, &spec, &features).unwrap();
                prop_assert_eq!(fp.dim(), n_features * single);
                prop_assert_eq!(fp.layout().len(), fp.dim());
            }
        }
    }

    #[test]
    fn tos_profile_is_self_dual(image in image_strategy(12, 8), raw in proptest::collection::vec(1.0..40.0f64, 1..4)) {
        let spec = FilterSpec::new(Attribute::Area, ascending(raw), Rule::Min).unwrap();
        let ap = build_ap(&image, TreeFamily::TreeOfShapes, &spec).unwrap();
        let dual = build_ap(&image.complement(), TreeFamily::TreeOfShapes, &spec).unwrap();
        let top = f64::from(image.levels() - 1);
        for (a, b) in ap.data().iter().zip(dual.data()) {
            prop_assert_eq!(*a, top - b);
        }
    }
}

#[test]
fn fp_keeps_the_image_in_the_center() {
    let image = RasterImage::from_values(4, 1, vec![0, 5, 5, 1]).unwrap();
    let spec = FilterSpec::new(Attribute::Area, vec![2.0, 3.0], Rule::Min).unwrap();
    let fp = build_fp(&image, TreeFamily::ComponentPair, &spec, &[Feature::StdDev, Feature::Area]).unwrap();
    assert_eq!(fp.dim(), 10);
    for (block, feature) in [(0usize, Feature::StdDev), (5, Feature::Area)] {
        let center = &fp.layout()[block + 2];
        assert_eq!(center.polarity, Polarity::Original);
        assert_eq!(center.content, ColumnContent::Gray);
        assert_eq!(fp.column(block + 2), vec![0.0, 5.0, 5.0, 1.0]);
        assert_eq!(fp.layout()[block].content, ColumnContent::Feature(feature));
    }
    // area of the containing max-tree component after thinning at 2, then 3
    assert_eq!(fp.column(5 + 3), vec![4.0, 2.0, 2.0, 3.0]);
    assert_eq!(fp.column(5 + 4), vec![4.0, 3.0, 3.0, 3.0]);
}

#[test]
fn several_specs_concatenate_blocks() {
    let image = RasterImage::from_values(3, 3, vec![0, 1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
    let request = ProfileRequest::new(
        TreeFamily::Alpha,
        ProfileMode::Ap,
        vec![
            FilterSpec::new(Attribute::Area, vec![2.0, 4.0, 8.0], Rule::Min).unwrap(),
            FilterSpec::new(Attribute::MomentOfInertia, vec![0.2, 0.3], Rule::Direct).unwrap(),
        ],
    );
    assert_eq!(request.dim(), 4 + 3);
    assert_eq!(build_profiles(&image, &request).unwrap().dim(), 7);
}

#[test]
fn extended_profile_stacks_bands() {
    let (w, h) = (6, 5);
    let values: Vec<f64> = (0..3 * w * h).map(|i| ((i * 37) % 23) as f64 + (i / (w * h)) as f64).collect();
    let image = MultibandImage::new(w, h, 3, values).unwrap();
    let spec = FilterSpec::new(Attribute::Area, vec![2.0, 6.0], Rule::Min).unwrap();
    let request = ProfileRequest::new(TreeFamily::ComponentPair, ProfileMode::Ap, vec![spec]);
    let stack = build_extended(&image, 2, 256, &request).unwrap();
    assert_eq!(stack.dim(), 2 * 5);
    assert_eq!(stack.layout()[5].band, 1);
}

#[test]
fn stack_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let image = RasterImage::from_values(3, 2, vec![0, 1, 2, 2, 1, 0]).unwrap();
    let spec = FilterSpec::new(Attribute::Area, vec![2.0], Rule::Min).unwrap();
    let stack = build_fp(&image, TreeFamily::Omega, &spec, &[Feature::StdDev]).unwrap();
    let path = dir.path().join("stack");
    write_profile_stack(&path, &stack).unwrap();
    let back = read_profile_stack(&path).unwrap();
    assert_eq!(back.layout(), stack.layout());
    for (a, b) in back.data().iter().zip(stack.data()) {
        assert_eq!(*a, f64::from(*b as f32));
    }
}
