// The individual rules on a small hand-made table, including parameters
// and cost criteria.

use policy_mcdm::model::{AcsTable, Alternative, Criterion, Direction, Provenance, WeightVector};
use policy_mcdm::rules::{
    hurwicz, maximin, minimax_regret, promethee2_with, saw_with, topsis, PreferenceFunction, SawNormalization,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let criteria = vec![
        Criterion::new("benefit", "Community benefit", 0.0, 10.0),
        Criterion::new("equity", "Equity", 0.0, 10.0),
        Criterion::new("cost", "Net cost", 0.0, 10.0).with_direction(Direction::Cost),
    ];
    let alternatives = vec![
        Alternative::new(1, "Bike lanes"),
        Alternative::new(2, "Heat pump rebates"),
        Alternative::new(3, "Shade trees"),
        Alternative::new(4, "Composting"),
    ];
    let scores = vec![
        vec![8.0, 6.0, 4.0],
        vec![6.0, 4.0, 7.0],
        vec![7.0, 8.0, 2.0],
        vec![3.0, 5.0, 1.0],
    ];
    let table = AcsTable::new(alternatives, criteria, scores, Provenance::File)?;
    let weights = WeightVector::new(vec![2.0, 1.0, 1.0])?;

    let show = |label: &str, raw: &[f64], ranks: &[f64]| {
        let cells: Vec<String> = raw.iter().zip(ranks).map(|(v, r)| format!("{v:>6.3} ({r})")).collect();
        println!("{label:<22} {}", cells.join("  "));
    };
    let r = maximin(&table)?;
    show("maximin", &r.raw_values, r.ranks.as_slice());
    let r = minimax_regret(&table)?;
    show("minimax regret", &r.raw_values, r.ranks.as_slice());
    for alpha in [0.0, 0.3, 1.0] {
        let r = hurwicz(&table, alpha)?;
        show(&format!("hurwicz alpha={alpha}"), &r.raw_values, r.ranks.as_slice());
    }
    let r = saw_with(&table, &weights, SawNormalization::MinMax)?;
    show("saw (min-max)", &r.raw_values, r.ranks.as_slice());
    let r = promethee2_with(&table, &weights, PreferenceFunction::Linear { indifference: 0.5, preference: 3.0 })?;
    show("promethee linear", &r.raw_values, r.ranks.as_slice());
    let r = topsis(&table, &weights)?;
    show("topsis", &r.raw_values, r.ranks.as_slice());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
