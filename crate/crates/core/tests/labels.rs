mod support;

use lft_core::{Objective, ObjectiveCriteria};

#[test]
fn printed_labels_are_reproduced() {
    let rows = support::tables::rows();
    assert_eq!(rows.len(), 44);
    let mismatches: Vec<String> = rows
        .iter()
        .filter(|r| ObjectiveCriteria::new(r.objective).label_values(r.sea, r.secondary) != r.label)
        .map(|r| format!("{} no {}", r.objective, r.no))
        .collect();
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn every_objective_is_covered() {
    let rows = support::tables::rows();
    for o in Objective::ALL {
        assert!(rows.iter().any(|r| r.objective == o));
    }
}

#[test]
fn efficiency_designs_lie_inside_their_rules() {
    for r in support::tables::for_objective(Objective::Efficiency) {
        assert!(r.parsed_rule().contains(&r.design), "no {} outside {}", r.no, r.rule);
        r.design.validate().unwrap();
    }
}
