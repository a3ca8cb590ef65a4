// What the rating parser makes of free-text model replies.

use policy_mcdm::io::fixtures;
use policy_mcdm::scoring::{parse_rating, parse_rating_with, RangePolicy};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let replies = [
        fixtures::LEAF_BLOWER_ADAPTATION_REPLY,
        fixtures::LEAF_BLOWER_MITIGATION_REPLY,
        "Initially 4/10, but on reflection 6/10.",
        "I'd rate it 7-8.",
        "I would rate it a 9.",
        "Rating: 12/10",
        "Hard to say without more data.",
    ];
    for text in replies {
        let head: String = text.lines().next().unwrap_or("").chars().take(50).collect();
        println!("{:<52} -> {:?}", head, parse_rating(text, 1.0, 10.0));
    }
    let lower = parse_rating_with("It could be rated at 4 to 5.", 1.0, 10.0, RangePolicy::Lower);
    println!("lower end of a range -> {lower:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
