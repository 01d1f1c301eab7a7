use chatelet::twoadic::verify::{check_tables, random_tuples};

#[test]
fn deciders_match_search() {
    let report = check_tables(&random_tuples(11, 20_000, 1000), 20).unwrap();
    assert!(
        report.clean(),
        "{} inconclusive, {} disagreements, first: {:?}",
        report.inconclusive,
        report.disagreements.len(),
        report.disagreements.first()
    );
}
