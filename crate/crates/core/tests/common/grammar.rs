//! Reply texts with the rating the parser must find, or must refuse to find.

use policy_mcdm::io::fixtures;
use policy_mcdm::scoring::{parse_rating_with, ParseRule, ParsedRating, RangePolicy, UnparsedReason};

#[derive(Debug, Clone, Copy)]
pub enum Want {
    Rated(f64, ParseRule),
    NoMatch,
    OutOfScale(f64),
}

use ParseRule::*;
use Want::*;

pub struct Case {
    pub text: &'static str,
    pub scale: (f64, f64),
    pub policy: RangePolicy,
    pub want: Want,
}

const TEN: (f64, f64) = (1.0, 10.0);
const FIVE: (f64, f64) = (0.0, 5.0);

fn case(text: &'static str, want: Want) -> Case {
    Case { text, scale: TEN, policy: RangePolicy::Midpoint, want }
}

pub fn cases() -> Vec<Case> {
    let mut v = vec![
        // explicit fractions
        case("Rating: 6/10", Rated(6.0, R1Fraction)),
        case("I give it 7 out of 10.", Rated(7.0, R1Fraction)),
        case("Score: 8.5/10", Rated(8.5, R1Fraction)),
        case("7/10", Rated(7.0, R1Fraction)),
        case("Overall I'd say 3 / 10.", Rated(3.0, R1Fraction)),
        case("**Rating: 9/10**", Rated(9.0, R1Fraction)),
        case("Initially I thought 4/10, but on reflection, 6/10.", Rated(6.0, R1Fraction)),
        case("It scores 5/5 on feasibility but overall 7/10.", Rated(7.0, R1Fraction)),
        case("Rating: 2 out of 10", Rated(2.0, R1Fraction)),
        case("1/10", Rated(1.0, R1Fraction)),
        case("10/10, an outstanding policy.", Rated(10.0, R1Fraction)),
        case("Rating: 11/10", OutOfScale(11.0)),
        case("Rating: 0/10", OutOfScale(0.0)),
        Case { text: "Rating: 4/5", scale: FIVE, policy: RangePolicy::Midpoint, want: Rated(4.0, R1Fraction) },
        Case { text: "Rating: 0/5", scale: FIVE, policy: RangePolicy::Midpoint, want: Rated(0.0, R1Fraction) },
        // labels
        case("Rating: 8", Rated(8.0, R1Label)),
        case("Final rating: 7.5", Rated(7.5, R1Label)),
        case("Score = 6", Rated(6.0, R1Label)),
        case("**Rating:** 5", Rated(5.0, R1Label)),
        case("Overall score: 4", Rated(4.0, R1Label)),
        case("Rating: 3. After more thought. Rating: 5.", Rated(5.0, R1Label)),
        case("Rating: 6 (on a 1-10 scale)", Rated(6.0, R1Label)),
        case("Rating: 12", OutOfScale(12.0)),
        // ranges
        case("It could be rated at 4 to 5.", Rated(4.5, R2Range)),
        case("I would give it a score of 6-7.", Rated(6.5, R2Range)),
        case("A rating between 5 and 6 seems fair.", Rated(5.5, R2Range)),
        case("I'd rate it 7–8.", Rated(7.5, R2Range)),
        case("Rated 3 to 4 out of 10", Rated(3.5, R2Range)),
        case("Rating: 6-7/10", Rated(6.5, R2Range)),
        case("The score falls between 4 and 6.", Rated(5.0, R2Range)),
        case("between 2 and 3 out of 10", Rated(2.5, R2Range)),
        case("Rated 8 to 12 depending on enforcement.", OutOfScale(12.0)),
        Case { text: "It could be rated at 4 to 5.", scale: TEN, policy: RangePolicy::Lower, want: Rated(4.0, R2Range) },
        Case { text: "It could be rated at 4 to 5.", scale: TEN, policy: RangePolicy::Upper, want: Rated(5.0, R2Range) },
        // rating phrases
        case("I would rate it a 7.", Rated(7.0, R3Rated)),
        case("This policy is rated at 3.", Rated(3.0, R3Rated)),
        case("Overall, I'd give it 8.", Rated(8.0, R3Rated)),
        case("It scored 6 overall.", Rated(6.0, R3Rated)),
        case("Rated 2 at first, but rated 5 after considering equity.", Rated(5.0, R3Rated)),
        case("I would assign it a 9", Rated(9.0, R3Rated)),
        case("I rate this policy as 4.5", Rated(4.5, R3Rated)),
        case("On a scale of 1 to 10 I would rate it a 7.", Rated(7.0, R3Rated)),
        case("I would rate it a 15.", OutOfScale(15.0)),
        // nothing to find
        case("This policy is promising.", NoMatch),
        case("", NoMatch),
        case("On a 1 to 10 scale, this is hard to judge.", NoMatch),
        case("The program served 1200 households in 2019.", NoMatch),
        case("Emissions fell 10-15% between 2010 and 2020.", NoMatch),
        case("It reduces costs by 3/4 of the baseline.", NoMatch),
        case("Rating: N/A", NoMatch),
        case("I cannot rate this policy without more information.", NoMatch),
        case("Rating: 7/5", NoMatch),
    ];
    v.push(case(fixtures::LEAF_BLOWER_ADAPTATION_REPLY, Rated(6.0, R1Fraction)));
    v.push(case(fixtures::LEAF_BLOWER_MITIGATION_REPLY, Rated(4.5, R2Range)));
    v
}

pub fn check(c: &Case) -> Result<(), String> {
    let got = parse_rating_with(c.text, c.scale.0, c.scale.1, c.policy);
    if let Some(v) = got.value() {
        if v < c.scale.0 || v > c.scale.1 {
            return Err(format!("{:?}: {v} escaped the scale", c.text));
        }
    }
    let ok = match (c.want, got) {
        (Rated(v, r), ParsedRating::Rated { value, rule }) => v == value && r == rule,
        (NoMatch, ParsedRating::Unparsed(UnparsedReason::NoMatch)) => true,
        (OutOfScale(v), ParsedRating::Unparsed(UnparsedReason::OutOfScale { value, .. })) => v == value,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{:?}: wanted {:?}, got {got:?}", c.text, c.want))
    }
}

