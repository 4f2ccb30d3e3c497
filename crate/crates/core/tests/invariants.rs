use std::collections::BTreeSet;
use std::f64::consts::PI;

use ssproj_core::examples::{build_example, example_metadata, ExampleId};
use ssproj_core::exec::Execution;
use ssproj_core::ifs::{similarity_dimension, Ifs};
use ssproj_core::scalar::Scalar;
use ssproj_core::scan::{scan_enumerate, solve_candidates, ScanParams, Shortcut};

fn homothety_examples() -> Vec<Ifs> {
    [ExampleId::SierpinskiEquilateral, ExampleId::SierpinskiRight, ExampleId::FourCorner, ExampleId::RhombusSquare]
        .map(build_example)
        .to_vec()
}

#[test]
fn excluded_and_undecided_cover_all_angles() {
    for id in ExampleId::ALL {
        let r = scan_enumerate(&build_example(id), &ScanParams::default(), Execution::Parallel).unwrap();
        let undecided: f64 = r.undecided.iter().map(|u| u.hi_rad - u.lo_rad).sum();
        assert!((undecided - r.residue_rad).abs() < 1e-12, "{id}");
        if r.shortcut == Shortcut::CollinearSegment {
            continue;
        }
        let total = r.excluded_measure() + undecided;
        assert!((total - PI).abs() < 1e-9, "{id}: {total}");
        let mut arcs: Vec<(f64, f64)> = r.excluded.iter().map(|a| (a.lo_rad, a.hi_rad)).collect();
        arcs.extend(r.undecided.iter().map(|u| (u.lo_rad, u.hi_rad)));
        arcs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(arcs.windows(2).all(|w| w[0].1 <= w[1].0 + 1e-15), "{id}: overlapping arcs");
    }
}

#[test]
fn scan_agrees_with_candidates() {
    for ifs in homothety_examples() {
        let r = scan_enumerate(&ifs, &ScanParams::default(), Execution::Parallel).unwrap();
        let found: BTreeSet<String> = r.certified.iter().map(|c| c.t.clone()).collect();
        let candidates: BTreeSet<String> = solve_candidates(&ifs, 12).unwrap().iter().map(|d| d.to_string()).collect();
        assert_eq!(found, candidates, "{}", ifs.name());
    }
}

#[test]
fn counts_and_lengths_match_metadata() {
    for id in ExampleId::ALL {
        let meta = example_metadata(id);
        let r = scan_enumerate(&build_example(id), &ScanParams::default(), Execution::Parallel).unwrap();
        if let Some(n) = meta.ip_count {
            assert_eq!(r.certified.len(), n, "{id}");
        }
        for (t, l2) in meta.slopes.iter().zip(&meta.lengths_sq) {
            let c = r.certified.iter().find(|c| c.t == *t).unwrap_or_else(|| panic!("{id}: {t}"));
            assert_eq!(&c.length_sq, l2, "{id}: {t}");
        }
    }
}

#[test]
fn built_in_dimensions_are_one() {
    for id in [ExampleId::SierpinskiRight, ExampleId::FourCorner, ExampleId::RhombusSquare, ExampleId::Segment] {
        assert_eq!(similarity_dimension(&build_example(id), 1e-12), Scalar::int(1), "{id}");
    }
    let d = similarity_dimension(&build_example(ExampleId::SierpinskiEquilateral), 1e-12);
    assert!((d.to_f64() - 1.0).abs() < 1e-12);
}
