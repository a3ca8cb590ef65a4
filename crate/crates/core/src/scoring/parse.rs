//! Extraction of a numeric rating from free-text model responses.
//!
//! Rules, highest priority first:
//!
//! - **R1** an explicit fraction or label: `Rating: 6/10`, `7 out of 10`,
//!   `Score: 8`. The denominator must equal the scale maximum.
//! - **R2** a range in a rating context: `could be rated at 4 to 5`,
//!   `a score of 6-7`, `between 5 and 6`. Collapsed by [`RangePolicy`].
//! - **R3** a bare rating phrase: `rated at 7`, `I would rate it a 3`.
//!
//! Within the highest rule that fires, the last statement in the text wins.
//! A winning value outside the scale yields [`ParsedRating::Unparsed`]; it is
//! never clamped.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseRule {
    R1Fraction,
    R1Label,
    R2Range,
    R3Rated,
}

impl ParseRule {
    fn priority(self) -> u8 {
        match self {
            ParseRule::R1Fraction | ParseRule::R1Label => 1,
            ParseRule::R2Range => 2,
            ParseRule::R3Rated => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum UnparsedReason {
    NoMatch,
    OutOfScale { value: f64, rule: ParseRule },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ParsedRating {
    Rated { value: f64, rule: ParseRule },
    Unparsed(UnparsedReason),
}

impl ParsedRating {
    pub fn value(&self) -> Option<f64> {
        match self {
            ParsedRating::Rated { value, .. } => Some(*value),
            ParsedRating::Unparsed(_) => None,
        }
    }
}

/// How a stated range collapses to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePolicy {
    #[default]
    Midpoint,
    Lower,
    Upper,
}

impl RangePolicy {
    fn collapse(self, lo: f64, hi: f64) -> f64 {
        match self {
            RangePolicy::Midpoint => (lo + hi) / 2.0,
            RangePolicy::Lower => lo,
            RangePolicy::Upper => hi,
        }
    }
}

const NUM: &str = r"(\d+(?:\.\d+)?)";

static FRACTION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i){NUM}\s*(?:/|\bout\s+of\b)\s*{NUM}")).unwrap());
static LABEL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)\b(?:final\s+|overall\s+)?(?:rating|score)\s*(?:\*\*)?\s*[:=]\s*(?:\*\*)?\s*{NUM}"
    ))
    .unwrap()
});
static RANGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i){NUM}\s*(?:\bto\b|-|–|—)\s*{NUM}")).unwrap());
static BETWEEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)\bbetween\s+{NUM}\s+and\s+{NUM}")).unwrap());
static RATED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)\b(?:rated|rate\s+it|rate\s+this(?:\s+policy)?|rating\s+of|score\s+of|scored|scores|give\s+it|giving\s+it|assign\s+it)\s+(?:at\s+|as\s+|an?\s+|around\s+|about\s+)?{NUM}"
    ))
    .unwrap()
});
static RATING_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:rat(?:e|ed|ing)|scor(?:e|ed|ing)|give|giving|assign|grade)\b").unwrap());
// Text right after a number that makes it part of a range, fraction or
// scale description rather than a verdict.
static CONTINUES: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(?:/|out\s+of\b|to\s+\d|-\s*\d|–\s*\d|—\s*\d|\.\d)").unwrap());
static SCALE_AFTER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(?:-?\s*point\s+)?(?:scale|point\s+scale)\b").unwrap());
static SCALE_BEFORE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bscale\s+(?:of\s+|from\s+)?$").unwrap());
static RANGE_BEFORE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:\d\s*(?:\bto|-|–|—)|\bbetween\s+\d+(?:\.\d+)?\s+and)\s*$").unwrap());
static DENOMINATOR_AFTER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)^\s*(?:/|\bout\s+of\b)\s*{NUM}")).unwrap());

#[derive(Debug, Clone, Copy)]
struct Candidate {
    pos: usize,
    value: f64,
    rule: ParseRule,
    /// A range endpoint outside the scale, which spoils the whole range.
    out_of_scale: Option<f64>,
}

fn num(text: &str) -> f64 {
    text.parse().expect("regex only captures decimal numbers")
}

/// The part of `text[..end]` that belongs to the current sentence.
fn sentence_prefix(text: &str, end: usize) -> &str {
    let before = &text[..end];
    let mut start = 0;
    for (i, ch) in before.char_indices() {
        let next = before[i + ch.len_utf8()..].chars().next();
        let boundary = ch == '\n' || (matches!(ch, '.' | '!' | '?') && next.is_none_or(char::is_whitespace));
        if boundary {
            start = i + ch.len_utf8();
        }
    }
    &before[start..]
}

fn preceded_by_digit(text: &str, pos: usize) -> bool {
    text[..pos].chars().next_back().is_some_and(|c| c.is_ascii_digit() || c == '.')
}

fn candidates(text: &str, min: f64, max: f64, range_policy: RangePolicy) -> Vec<Candidate> {
    let mut out = Vec::new();
    let denominator_ok = |d: &str| num(d) == max;

    for c in FRACTION.captures_iter(text) {
        let m = c.get(0).unwrap();
        if preceded_by_digit(text, m.start()) || RANGE_BEFORE.is_match(&text[..m.start()]) {
            continue;
        }
        if denominator_ok(&c[2]) {
            out.push(Candidate { pos: m.start(), value: num(&c[1]), rule: ParseRule::R1Fraction, out_of_scale: None });
        }
    }
    for c in LABEL.captures_iter(text) {
        let n = c.get(1).unwrap();
        let after = &text[n.end()..];
        if CONTINUES.is_match(after) || SCALE_AFTER.is_match(after) {
            continue;
        }
        out.push(Candidate { pos: c.get(0).unwrap().start(), value: num(n.as_str()), rule: ParseRule::R1Label, out_of_scale: None });
    }

    let mut push_range = |start: usize, end: usize, lo: &str, hi: &str| {
        let (lo, hi) = (num(lo), num(hi));
        if lo > hi {
            return;
        }
        let after = &text[end..];
        if SCALE_AFTER.is_match(after) || SCALE_BEFORE.is_match(&text[..start]) {
            return;
        }
        if let Some(d) = DENOMINATOR_AFTER.captures(after) {
            if !denominator_ok(&d[1]) {
                return;
            }
        } else if !RATING_WORD.is_match(sentence_prefix(text, start)) {
            return;
        }
        let out_of_scale = [lo, hi].into_iter().find(|v| *v < min || *v > max);
        out.push(Candidate { pos: start, value: range_policy.collapse(lo, hi), rule: ParseRule::R2Range, out_of_scale });
    };
    for c in RANGE.captures_iter(text) {
        let m = c.get(0).unwrap();
        if preceded_by_digit(text, m.start()) {
            continue;
        }
        push_range(m.start(), m.end(), &c[1], &c[2]);
    }
    for c in BETWEEN.captures_iter(text) {
        let m = c.get(0).unwrap();
        push_range(m.start(), m.end(), &c[1], &c[2]);
    }

    for c in RATED.captures_iter(text) {
        let n = c.get(1).unwrap();
        let after = &text[n.end()..];
        if CONTINUES.is_match(after) || SCALE_AFTER.is_match(after) {
            continue;
        }
        out.push(Candidate { pos: c.get(0).unwrap().start(), value: num(n.as_str()), rule: ParseRule::R3Rated, out_of_scale: None });
    }
    out
}

/// Parses with the midpoint range policy.
pub fn parse_rating(response: &str, scale_min: f64, scale_max: f64) -> ParsedRating {
    parse_rating_with(response, scale_min, scale_max, RangePolicy::Midpoint)
}

pub fn parse_rating_with(response: &str, scale_min: f64, scale_max: f64, range_policy: RangePolicy) -> ParsedRating {
    let found = candidates(response, scale_min, scale_max, range_policy);
    let Some(best) = found.iter().map(|c| c.rule.priority()).min() else {
        return ParsedRating::Unparsed(UnparsedReason::NoMatch);
    };
    let chosen = found
        .iter()
        .filter(|c| c.rule.priority() == best)
        .max_by_key(|c| c.pos)
        .copied()
        .expect("at least one candidate at the best priority");
    if let Some(value) = chosen.out_of_scale {
        return ParsedRating::Unparsed(UnparsedReason::OutOfScale { value, rule: chosen.rule });
    }
    if chosen.value >= scale_min && chosen.value <= scale_max {
        ParsedRating::Rated { value: chosen.value, rule: chosen.rule }
    } else {
        ParsedRating::Unparsed(UnparsedReason::OutOfScale { value: chosen.value, rule: chosen.rule })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rated(text: &str) -> Option<f64> {
        parse_rating(text, 1.0, 10.0).value()
    }

    #[test]
    fn fraction_label() {
        assert_eq!(parse_rating("Rating: 8/10", 1.0, 10.0), ParsedRating::Rated { value: 8.0, rule: ParseRule::R1Fraction });
    }

    #[test]
    fn plain_prose_is_unparsed() {
        assert_eq!(parse_rating("This policy is promising.", 1.0, 10.0), ParsedRating::Unparsed(UnparsedReason::NoMatch));
    }

    #[test]
    fn scale_description_is_not_a_range() {
        assert_eq!(rated("On a 1 to 10 scale, this is hard to judge."), None);
        assert_eq!(rated("On a scale of 1 to 10 I would rate it a 7."), Some(7.0));
    }

    #[test]
    fn range_policies() {
        let text = "It could be rated at 4 to 5.";
        assert_eq!(parse_rating_with(text, 1.0, 10.0, RangePolicy::Lower).value(), Some(4.0));
        assert_eq!(parse_rating_with(text, 1.0, 10.0, RangePolicy::Upper).value(), Some(5.0));
    }

    #[test]
    fn out_of_scale_never_clamps() {
        assert_eq!(
            parse_rating("Rating: 12", 1.0, 10.0),
            ParsedRating::Unparsed(UnparsedReason::OutOfScale { value: 12.0, rule: ParseRule::R1Label })
        );
    }

    #[test]
    fn sentence_prefix_ignores_decimals() {
        let t = "It scored well. Overall 4.5 to 5 is fair";
        assert_eq!(sentence_prefix(t, t.find("4.5").unwrap()), " Overall ");
    }
}
