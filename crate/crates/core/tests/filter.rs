mod common;

use std::collections::BTreeSet;

use argforge::filter::{accept, profile, FilterCriteria};
use argforge::resolve::{build_type_table, Allowlist};
use argforge::syntax::ast::PrimType;
use common::{checks, parsed_corpus};

#[test]
fn accepted_subset_matches_hand_labels() {
    if let Err(e) = checks::filter_oracle() {
        panic!("{e}");
    }
}

#[test]
fn widening_the_chosen_set_only_adds_files() {
    let allow = Allowlist::jdk_default();
    let narrow: BTreeSet<PrimType> = [PrimType::Int, PrimType::Double].into_iter().collect();
    let wide: BTreeSet<PrimType> = PrimType::ALL.into_iter().collect();
    let criteria = FilterCriteria {
        min_if_on_chosen_primitive: 1,
        ..FilterCriteria::default()
    };
    let mut gained = 0;
    for (_, unit) in parsed_corpus() {
        let Ok(table) = build_type_table(&unit, &allow) else { continue };
        let a = accept(&profile(&unit, &narrow, &table), &criteria);
        let b = accept(&profile(&unit, &wide, &table), &criteria);
        assert!(!a || b);
        gained += usize::from(b && !a);
    }
    // byte, short, char, long, float and boolean-only fixtures join
    assert!(gained >= 5, "{gained}");
}
