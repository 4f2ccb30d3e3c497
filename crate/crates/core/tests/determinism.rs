use ssproj_core::examples::{build_example, ExampleId};
use ssproj_core::exec::Execution;
use ssproj_core::ifs::{certify_ssc, cylinder_cover, DEFAULT_COVER_BUDGET};
use ssproj_core::render::{render_angle_diagram, sample_points};
use ssproj_core::scan::{scan_enumerate, ScanParams};
use ssproj_core::witness::{audit_every_line, check_every_line_witness, ConvexPolygon};

#[test]
fn scans_identical_across_execution_modes() {
    for id in ExampleId::ALL {
        let ifs = build_example(id);
        let p = ScanParams::default();
        let a = scan_enumerate(&ifs, &p, Execution::Sequential).unwrap();
        let b = scan_enumerate(&ifs, &p, Execution::Parallel).unwrap();
        let c = scan_enumerate(&ifs, &p, Execution::Parallel).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{id}");
        assert_eq!(b, c, "{id}");
        assert_eq!(render_angle_diagram(&a), render_angle_diagram(&b));
    }
}

#[test]
fn covers_and_separation_identical_across_modes() {
    for id in [ExampleId::FourCorner, ExampleId::SierpinskiRight, ExampleId::RhombusSquare] {
        let ifs = build_example(id);
        let a = cylinder_cover(&ifs, 4, DEFAULT_COVER_BUDGET, Execution::Sequential).unwrap();
        let b = cylinder_cover(&ifs, 4, DEFAULT_COVER_BUDGET, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(certify_ssc(&ifs, 6, Execution::Sequential), certify_ssc(&ifs, 6, Execution::Parallel));
    }
}

#[test]
fn seeded_outputs_repeat() {
    let ifs = build_example(ExampleId::SierpinskiEquilateral);
    assert_eq!(sample_points(&ifs, 12, 500, 42), sample_points(&ifs, 12, 500, 42));

    let rhombus = build_example(ExampleId::RhombusSquare);
    let f = ConvexPolygon::unit_square();
    let v = check_every_line_witness(&f, &rhombus).unwrap();
    assert_eq!(audit_every_line(&f, &rhombus, &v, 300, 9), audit_every_line(&f, &rhombus, &v, 300, 9));
}
