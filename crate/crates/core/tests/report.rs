use endokit_core::endoscopy::{enumerate_elliptic, triple_from_element, EndoTriple};
use endokit_core::groups;
use endokit_core::kottwitz::{m_sum, kottwitz_set, KotCtx};
use endokit_core::lattice::{lat_vec, TorsionVec};
use endokit_core::report::*;
use std::sync::Arc;

#[test]
fn class_id_is_an_isomorphism_invariant() {
    let g = Arc::new(groups::gl(4));
    // the same block class named by two conjugate elements
    let t1 = triple_from_element(
        &g,
        TorsionVec::from_pairs(&[(1, 2), (1, 2), (0, 1), (0, 1)]),
        vec![],
    )
    .unwrap();
    let t2 = triple_from_element(
        &g,
        TorsionVec::from_pairs(&[(0, 1), (1, 2), (0, 1), (1, 2)]),
        vec![],
    )
    .unwrap();
    assert_eq!(class_id(&t1), class_id(&t2));
}

#[test]
fn class_ids_separate_distinct_classes() {
    let g = Arc::new(groups::sl(2));
    let classes = enumerate_elliptic(&g, 4);
    let ids: std::collections::BTreeSet<String> =
        classes.iter().map(|t| class_id(t).0).collect();
    assert_eq!(ids.len(), classes.len(), "distinct classes get distinct ids");
}

#[test]
fn class_id_golden_values_are_stable() {
    let g = Arc::new(groups::gl(2));
    let trivial = EndoTriple::trivial(&g);
    // frozen: any change to the canonical record is a format break
    assert_eq!(
        class_id(&trivial).0,
        "00aeb14f482bd5ebc0846f0b37aa9de2c1e26f983d75e26be4d6c5b0acf82423"
    );
}

#[test]
fn tsv_rendering_is_tab_separated_with_header() {
    let mut r = Report::new(&["b", "a"]);
    r.push(vec!["x".into(), "1".into()]);
    r.push(vec!["y".into(), "2".into()]);
    assert_eq!(r.to_tsv(), "b\ta\nx\t1\ny\t2\n");
}

#[test]
fn json_rendering_sorts_keys_and_escapes() {
    let mut r = Report::new(&["b", "a"]);
    r.push(vec!["x\t\"q\"".into(), "1".into()]);
    assert_eq!(r.to_json(), "[{\"a\":\"1\",\"b\":\"x\\t\\\"q\\\"\"}]\n");
}

#[test]
fn render_rejects_unknown_formats() {
    let r = Report::new(&["a"]);
    assert!(r.render("tsv").is_ok());
    assert!(r.render("json").is_ok());
    assert_eq!(r.render("csv").unwrap_err(), ReportError::UnknownFormat("csv".into()));
}

#[test]
fn sum_report_round_trip_gl2() {
    let g = Arc::new(groups::gl(2));
    let ctx = KotCtx::new(g.clone());
    let trivial = EndoTriple::trivial(&g);
    let mu = lat_vec(&[1, 0]);
    let basic = kottwitz_set(&g, &mu).remove(0);
    let m = m_sum(&ctx, &trivial, &basic, &mu).unwrap();
    let rep = sum_report(&m);
    let tsv = rep.to_tsv();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "class\tlevi\tmu\tcoeff");
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().skip(1).any(|l| l.ends_with("\t-1")));
    assert!(lines.iter().skip(1).any(|l| l.ends_with("\t1")));
    let json = rep.to_json();
    assert!(json.starts_with("[{") && json.ends_with("}]\n"));
    assert!(!json.contains('.'), "no floats in JSON output");
}
