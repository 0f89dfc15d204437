//! Interest measures for sequential rules.
//!
//! Probabilities are relative frequencies over sequences:
//! `P(X) = |X| / n`, `P(Y) = |Y| / n` and `P(XY) = |X -> Y| / n`.
//! The Klosgen measure, `sqrt(P(XY)) * (conf - P(Y))`, is the default arc
//! weight of the movement graph. Entropy-based measures use base-2 logarithms
//! with the convention `0 * log(0) = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::SequentialRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Support,
    Confidence,
    Lift,
    AddedValue,
    Klosgen,
    CertaintyFactor,
    JMeasure,
    ConditionalEntropy,
}

impl Measure {
    pub const ALL: [Measure; 8] = [
        Measure::Klosgen,
        Measure::Support,
        Measure::Confidence,
        Measure::Lift,
        Measure::AddedValue,
        Measure::CertaintyFactor,
        Measure::JMeasure,
        Measure::ConditionalEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Support => "support",
            Measure::Confidence => "confidence",
            Measure::Lift => "lift",
            Measure::AddedValue => "added_value",
            Measure::Klosgen => "klosgen",
            Measure::CertaintyFactor => "certainty_factor",
            Measure::JMeasure => "j_measure",
            Measure::ConditionalEntropy => "conditional_entropy",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "support" | "supp" => Measure::Support,
            "confidence" | "conf" => Measure::Confidence,
            "lift" => Measure::Lift,
            "added_value" | "av" => Measure::AddedValue,
            "klosgen" | "kl" => Measure::Klosgen,
            "certainty_factor" | "cf" => Measure::CertaintyFactor,
            "j_measure" | "j" => Measure::JMeasure,
            "conditional_entropy" | "ce" => Measure::ConditionalEntropy,
            _ => return Err(Error::UnknownMeasure(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub support_rel: f64,
    pub support_count: u64,
    pub confidence: f64,
    pub lift: f64,
    pub added_value: f64,
    pub klosgen: f64,
    pub certainty_factor: f64,
    /// Bits. Unbounded (infinite) when every sequence contains `Y` but the
    /// rule's confidence is below one.
    pub j_measure: f64,
    pub conditional_entropy: f64,
}

impl MeasureVector {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Support => self.support_rel,
            Measure::Confidence => self.confidence,
            Measure::Lift => self.lift,
            Measure::AddedValue => self.added_value,
            Measure::Klosgen => self.klosgen,
            Measure::CertaintyFactor => self.certainty_factor,
            Measure::JMeasure => self.j_measure,
            Measure::ConditionalEntropy => self.conditional_entropy,
        }
    }
}

/// `p * log2(q)` with `0 * log2(anything) = 0`.
fn xlog2(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * q.log2()
    }
}

/// Computes all measures from a rule's counts. The rule must satisfy
/// [`SequentialRule::is_consistent`].
pub fn compute_measures(rule: &SequentialRule) -> MeasureVector {
    debug_assert!(rule.is_consistent(), "inconsistent rule {rule:?}");
    let n = rule.n_sequences as f64;
    let p_x = rule.antecedent_count as f64 / n;
    let p_y = rule.consequent_count as f64 / n;
    let p_xy = rule.rule_count as f64 / n;

    let confidence = rule.rule_count as f64 / rule.antecedent_count as f64;
    let added_value = confidence - p_y;
    let klosgen = p_xy.sqrt() * added_value;
    let lift = confidence / p_y;

    let certainty_factor = if added_value >= 0.0 {
        if p_y < 1.0 {
            added_value / (1.0 - p_y)
        } else {
            0.0
        }
    } else {
        added_value / p_y
    };

    let miss = p_x - p_xy;
    let j_measure = xlog2(p_xy, confidence / p_y)
        + if miss == 0.0 {
            0.0
        } else {
            miss * ((1.0 - confidence) / (1.0 - p_y)).log2()
        };

    let conditional_entropy = -(xlog2(confidence, confidence) + xlog2(1.0 - confidence, 1.0 - confidence));

    MeasureVector {
        support_rel: p_xy,
        support_count: rule.rule_count,
        confidence,
        lift,
        added_value,
        klosgen,
        certainty_factor,
        j_measure,
        conditional_entropy,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredRule {
    pub rule: SequentialRule,
    pub measures: MeasureVector,
}

pub fn measure_rules(rules: &[SequentialRule]) -> Vec<MeasuredRule> {
    rules
        .iter()
        .map(|rule| MeasuredRule {
            rule: rule.clone(),
            measures: compute_measures(rule),
        })
        .collect()
}

fn rank_key(m: &MeasuredRule, by: Measure) -> f64 {
    match by {
        // counts order exactly; the relative value can tie after rounding
        Measure::Support => m.measures.support_count as f64,
        other => m.measures.get(other),
    }
}

/// The `k` highest-ranked rules under `by`, descending, ties broken by
/// `(antecedent, consequent)` ascending.
pub fn measure_table(rules: &[MeasuredRule], by: Measure, k: usize) -> Vec<MeasuredRule> {
    let mut ranked: Vec<&MeasuredRule> = rules.iter().collect();
    ranked.sort_by(|a, b| {
        rank_key(b, by)
            .partial_cmp(&rank_key(a, by))
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.rule.antecedent.cmp(&b.rule.antecedent))
            .then_with(|| a.rule.consequent.cmp(&b.rule.consequent))
    });
    ranked.into_iter().take(k).cloned().collect()
}

/// Same as [`measure_table`] with the measure given by name.
pub fn measure_table_by_name(rules: &[MeasuredRule], by: &str, k: usize) -> Result<Vec<MeasuredRule>> {
    Ok(measure_table(rules, by.parse()?, k))
}

pub const MEASURES_HEADER: [&str; 10] = [
    "X",
    "Y",
    "klosgen",
    "support",
    "support_count",
    "confidence",
    "lift",
    "certainty_factor",
    "j_measure",
    "conditional_entropy",
];

/// Measures CSV with six decimals. Also carries `added_value` as the last column.
pub fn write_measures_csv<W: Write>(rows: &[MeasuredRule], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = MEASURES_HEADER.to_vec();
    header.push("added_value");
    w.write_record(&header)?;
    for row in rows {
        let m = &row.measures;
        w.write_record([
            row.rule.antecedent.clone(),
            row.rule.consequent.clone(),
            format!("{:.6}", m.klosgen),
            format!("{:.6}", m.support_rel),
            m.support_count.to_string(),
            format!("{:.6}", m.confidence),
            format!("{:.6}", m.lift),
            format!("{:.6}", m.certainty_factor),
            format!("{:.6}", m.j_measure),
            format!("{:.6}", m.conditional_entropy),
            format!("{:.6}", m.added_value),
        ])?;
    }
    w.flush()?;
    Ok(())
}
