// Rank the bundled informed assessment table with all nine rules and
// aggregate the result.

use policy_mcdm::analysis::{rank_table, RankingRequest};
use policy_mcdm::io::{fixtures, format_atable};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let table = fixtures::informed_assessment();
    let rankings = rank_table(&table, &RankingRequest::default())?;

    println!("{} policies, criteria {}", table.m(), rankings.criteria.join(" "));
    for result in &rankings.evaluation.results {
        let top: Vec<String> = result.ranks.preference_order()[..5]
            .iter()
            .map(|&i| table.alternatives()[i].id.to_string())
            .collect();
        println!("{:<15} top five: {}", result.rule.name(), top.join(" "));
    }
    println!();
    print!("{}", format_atable(&rankings.aggregate));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
