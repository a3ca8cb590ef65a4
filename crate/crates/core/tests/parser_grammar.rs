mod common;

use common::grammar::{cases, check};
use policy_mcdm::io::fixtures;
use policy_mcdm::scoring::parse_rating;

#[test]
fn grammar_suite() {
    let all = cases();
    assert!(all.len() >= 50, "suite has {} cases", all.len());
    let failures: Vec<String> = all.iter().filter_map(|c| check(c).err()).collect();
    assert!(failures.is_empty(), "{} failing cases:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn recorded_replies() {
    assert_eq!(parse_rating(fixtures::LEAF_BLOWER_ADAPTATION_REPLY, 1.0, 10.0).value(), Some(6.0));
    assert_eq!(parse_rating(fixtures::LEAF_BLOWER_MITIGATION_REPLY, 1.0, 10.0).value(), Some(4.5));
}

#[test]
fn every_in_scale_fraction_round_trips() {
    for k in 1..=10 {
        assert_eq!(parse_rating(&format!("Rating: {k}/10"), 1.0, 10.0).value(), Some(k as f64));
    }
}
