use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

/// Inference rules of the restricted recognizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Lexical,
    FootAxiom,
    Substitution,
    Binary,
    Unary,
    WrapLd,
    WrapRd,
    WrapRu,
    WrapLu,
    WrapNil,
    LeftAdjoin,
    RightAdjoin,
    NilAdjoin,
    WrapAdjoin,
}

impl RuleId {
    pub const ALL: [RuleId; 14] = [
        RuleId::Lexical,
        RuleId::FootAxiom,
        RuleId::Substitution,
        RuleId::Binary,
        RuleId::Unary,
        RuleId::WrapLd,
        RuleId::WrapRd,
        RuleId::WrapRu,
        RuleId::WrapLu,
        RuleId::WrapNil,
        RuleId::LeftAdjoin,
        RuleId::RightAdjoin,
        RuleId::NilAdjoin,
        RuleId::WrapAdjoin,
    ];

    /// Short identifier: step number and rule letter.
    pub fn code(self) -> &'static str {
        match self {
            RuleId::Lexical => "1a",
            RuleId::FootAxiom => "1b",
            RuleId::Substitution => "1c",
            RuleId::Binary => "1d",
            RuleId::Unary => "1e",
            RuleId::WrapLd => "2a",
            RuleId::WrapRd => "2b",
            RuleId::WrapRu => "2c",
            RuleId::WrapLu => "2d",
            RuleId::WrapNil => "2e",
            RuleId::LeftAdjoin => "3a",
            RuleId::RightAdjoin => "3b",
            RuleId::NilAdjoin => "3c",
            RuleId::WrapAdjoin => "3d",
        }
    }
}

/// Counters collected during one recognition run. Rule applications count
/// successful antecedent combinations, so they are independent of agenda
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecognitionStats {
    pub items_by_kind: BTreeMap<String, u64>,
    pub rule_applications: BTreeMap<String, u64>,
    pub wall_time: Duration,
    pub accepted: bool,
}

impl RecognitionStats {
    pub fn total_items(&self) -> u64 {
        self.items_by_kind.values().sum()
    }

    pub fn total_rule_applications(&self) -> u64 {
        self.rule_applications.values().sum()
    }
}

impl fmt::Display for RecognitionStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "items: {}", self.total_items())?;
        for (k, v) in &self.items_by_kind {
            writeln!(f, "  {k}: {v}")?;
        }
        writeln!(f, "rule applications: {}", self.total_rule_applications())?;
        for (k, v) in &self.rule_applications {
            writeln!(f, "  {k}: {v}")?;
        }
        write!(f, "wall time: {} us", self.wall_time.as_micros())
    }
}
