// Aggregate a published E table, then compare two orderings over the
// alternatives they share.

use policy_mcdm::aggregation::{aggregate, compare_rankings};
use policy_mcdm::io::fixtures;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let etable = fixtures::informed_assessment_etable();
    let a = aggregate(&etable);
    for row in a.rows.iter().take(5) {
        println!("{:>3} {:<45} borda {:>7.2}  median {:>5.2}", row.id, row.name, row.borda, row.simple_median);
    }

    let gpt = fixtures::ids(&fixtures::GPT_TOPSIS_ORDER);
    let informed = fixtures::ids(&fixtures::INFORMED_TOPSIS_COMMON_ORDER);
    let c = compare_rankings(&gpt, &informed)?;
    println!();
    println!("{} shared policies", c.common_ids.len());
    println!("kendall tau-b {:.4}, spearman rho {:.4}", c.kendall_tau, c.spearman_rho);
    for t in c.top_k_overlap.iter().take(4) {
        println!("top-{}: {}/{}", t.k, t.shared, t.k);
    }
    let moved: Vec<String> = c.rank_deltas.iter().filter(|d| d.delta != 0).map(|d| format!("{}:{:+}", d.id, d.delta)).collect();
    println!("moved: {}", moved.join(" "));

    let borda_vs_gpt = compare_rankings(&a.order(), &gpt)?;
    println!("borda vs gpt topsis: tau-b {:.4} over {}", borda_vs_gpt.kendall_tau, borda_vs_gpt.common_ids.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
