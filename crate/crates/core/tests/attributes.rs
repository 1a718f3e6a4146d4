mod common;

use common::*;
use proptest::prelude::*;
use treeprofiles::{
    build_alpha_tree, build_max_tree, build_min_tree, build_omega_tree, build_tree_of_shapes,
    compute_attributes, Attribute, Connectivity, RasterImage, Tree,
};

fn all_trees(image: &RasterImage) -> Vec<Tree> {
    let alpha = build_alpha_tree(image, Connectivity::C4);
    let omega = build_omega_tree(&alpha, image).unwrap();
    vec![
        build_max_tree(image, Connectivity::C4),
        build_min_tree(image, Connectivity::C8),
        build_tree_of_shapes(image),
        alpha,
        omega,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn table_matches_recomputation(image in image_strategy(16, 12)) {
        for tree in all_trees(&image) {
            let table = compute_attributes(&tree, &image).unwrap();
            for i in 0..tree.node_count() {
                let node = tree.node(i).unwrap();
                let r = recompute(&tree, &image, node);
                let rec = table.get(node).unwrap();
                prop_assert_eq!(rec.area, r.area);
                prop_assert_eq!((rec.gray_min, rec.gray_max), (r.min, r.max));
                prop_assert!(close(rec.moment_of_inertia(), r.inertia, 1e-9));
                prop_assert!(close(rec.mean(), r.mean, 1e-12));
                prop_assert!(close(rec.std_dev(), r.std_dev, 1e-9));
            }
        }
    }

    #[test]
    fn area_strictly_increases_toward_root(image in image_strategy(16, 8)) {
        for tree in all_trees(&image) {
            let table = compute_attributes(&tree, &image).unwrap();
            for i in 1..tree.node_count() {
                let p = tree.parents()[i] as usize;
                prop_assert!(table.records()[i].area < table.records()[p].area);
            }
        }
    }
}

#[test]
fn domino_and_bar_inertia() {
    let domino = RasterImage::from_values(2, 1, vec![1, 1]).unwrap();
    let t = build_max_tree(&domino, Connectivity::C4);
    let table = compute_attributes(&t, &domino).unwrap();
    assert_eq!(table.moment_of_inertia(t.root()).unwrap(), 0.125);

    let bar = RasterImage::from_values(3, 1, vec![0, 0, 0]).unwrap();
    let t = build_max_tree(&bar, Connectivity::C4);
    let table = compute_attributes(&t, &bar).unwrap();
    assert!((table.moment_of_inertia(t.root()).unwrap() - 2.0 / 9.0).abs() < 1e-15);
}

#[test]
fn inertia_is_not_increasing() {
    // an elongated bar inside a compact square: the child has the larger
    // moment of inertia (2/9 against 12/81)
    #[rustfmt::skip]
    let image = RasterImage::from_values(3, 3, vec![
        0, 0, 0,
        1, 1, 1,
        0, 0, 0,
    ]).unwrap();
    let t = build_max_tree(&image, Connectivity::C4);
    let table = compute_attributes(&t, &image).unwrap();
    let child = t.smallest_node(1, 1).unwrap();
    let root = t.root();
    assert_eq!(t.parent(child), root);
    assert!(table.moment_of_inertia(child).unwrap() > table.moment_of_inertia(root).unwrap());
    assert!(!Attribute::MomentOfInertia.is_increasing());
    assert!(Attribute::Area.is_increasing());
}

#[test]
fn std_dev_two_pass_agreement() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let image = random_image(&mut rng, 20, 65535);
        let t = build_max_tree(&image, Connectivity::C4);
        let table = compute_attributes(&t, &image).unwrap();
        let r = recompute(&t, &image, t.root());
        assert!(close(table.std_dev(t.root()).unwrap(), r.std_dev, 1e-9));
    }
}
