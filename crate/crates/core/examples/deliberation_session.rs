// A deliberation session without HTTP: edit cells and weights, watch the
// rank deltas, export and replay the edit log.

use std::collections::BTreeMap;

use policy_mcdm::analysis::WeightSpec;
use policy_mcdm::io::fixtures;
use policy_mcdm::model::AlternativeId;
use policy_mcdm::rules::RuleParams;
use policy_mcdm::session::{Session, View};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let table = fixtures::informed_assessment();
    let mut session = Session::new(table.clone(), WeightSpec::Equal, RuleParams::default())?;
    let view = View::default();

    let first = session.edit_cell(AlternativeId(0), "Q5", 5.0, "ana", &view)?;
    println!("Q5 raised: {} rule positions moved", first.deltas.len());
    let second = session.edit_cell(AlternativeId(0), "Q6", 5.0, "ana", &view)?;
    for d in second.deltas.iter().filter(|d| d.rule == "maximin") {
        println!("maximin, policy {}: rank {} -> {} (raw {} -> {})", d.alternative_id, d.rank_before, d.rank_after, d.raw_before, d.raw_after);
    }

    let weights: BTreeMap<String, f64> = table.criteria().iter().map(|c| (c.id.clone(), if c.id == "Q1" { 3.0 } else { 1.0 })).collect();
    let third = session.edit_weights(WeightSpec::ById(weights), "ben", &view)?;
    println!("health weighted x3: {} weighted-rule positions moved", third.deltas.len());

    let ranking = fixtures::ids(&fixtures::GPT_TOPSIS_ORDER);
    let c = session.compare("borda", &ranking)?;
    println!("session borda vs gpt topsis: tau-b {:.4}", c.kendall_tau);

    let export = session.export()?;
    println!("export holds {:?} and {} edits", export.files.keys().collect::<Vec<_>>(), export.edit_log.len());
    let (replayed, _) = Session::replay(&table, &WeightSpec::Equal, &export.edit_log)?;
    println!("replayed table matches: {}", replayed.rows() == session.table().rows());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
