// Fill a 13 x 11 table from a scripted provider, archive the transcripts,
// then rank the result with TOPSIS on three criterion subsets.
//
// Swap `fixtures::gpt_mock_provider()` for
// `HttpChatProvider::new(LiveConfig::from_env()?)?` to query a real
// OpenAI-compatible endpoint.

use policy_mcdm::analysis::{rank_table, CriteriaSelection, RankingRequest};
use policy_mcdm::io::fixtures;
use policy_mcdm::model::AlternativeId;
use policy_mcdm::rules::RuleId;
use policy_mcdm::scoring::{score_table, RetryPolicy, ScoreOptions, TranscriptArchive};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = fixtures::seed_catalog();
    let policies: Vec<_> = fixtures::GPT_TOPSIS_ORDER
        .iter()
        .map(|&id| catalog.alternative(AlternativeId(id)).cloned().ok_or("policy missing from catalog"))
        .collect::<Result<_, _>>()?;

    let provider = fixtures::gpt_mock_provider();
    let dir = tempfile::tempdir()?;
    let mut archive = TranscriptArchive::open(dir.path().join("transcripts.ndjson"))?;
    let mut options = ScoreOptions::default();
    options.cell.retry = RetryPolicy::immediate(3);
    let run = score_table(&provider, &fixtures::canonical_template(), &policies, &catalog.criteria, &options, &mut archive)?;
    println!("{} transcripts archived, {} provider calls", archive.len(), provider.calls());

    let leaf = run.transcript(10, 1);
    println!("policy {} / {}: {:?} via {:?}", leaf.alternative_id, leaf.criterion_id, leaf.parsed_rating, leaf.parse_rule);

    let table = run.table().ok_or("run is incomplete")??;
    for selection in [CriteriaSelection::All, CriteriaSelection::Qol, CriteriaSelection::Ma] {
        let request = RankingRequest { criteria: selection.clone(), rules: vec![RuleId::Topsis], ..Default::default() };
        let r = rank_table(&table, &request)?;
        let order: Vec<String> = r.evaluation.results[0]
            .ranks
            .preference_order()
            .iter()
            .map(|&i| table.alternatives()[i].id.to_string())
            .collect();
        println!("topsis over {selection:<3}: {}", order.join(" "));
    }

    let resumed = score_table(&provider, &fixtures::canonical_template(), &policies, &catalog.criteria, &options, &mut archive)?;
    println!("second run: {} cache hits", resumed.cache_hits);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
