use std::collections::BTreeMap;
use std::fmt;

use super::classify::{compute_spine, wrapping_eligible, TreeClass};
use super::{Grammar, NodeId, NodeRole, TreeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// At most one spine node of a wrapping tree admits wrapping trees.
    SingleWrappingNode,
    /// Spines of left and right trees admit no wrapping tree.
    NoWrappingOnSideSpine,
    /// Spines of left (right) trees admit every matching right (left) tree, and nil.
    OppositeSideUnconstrained,
    /// A node that admits no tree and does not allow nil can never be completed.
    DeadNode,
    /// A foot node admits a wrapping tree (unsupported by the restricted engine).
    WrappingAtFoot,
    /// The two readings of the side-tree condition disagree on this node.
    AmbiguousSideConstraint,
    /// A node admits some but not all left/right trees of its label. The
    /// restricted engine only finds derivations in which stacked left and
    /// right trees can be reordered freely, which this can prevent.
    SideTreesConstrained,
    /// An obligatory spine node of a wrapping tree admits left or right
    /// trees. Each half of the split tree inherits the obligation, so a
    /// single side-tree adjunction no longer satisfies it.
    ObligatorySplitNode,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::SingleWrappingNode => "1",
            Condition::NoWrappingOnSideSpine => "2a",
            Condition::OppositeSideUnconstrained => "2b",
            Condition::DeadNode => "dead-node",
            Condition::WrappingAtFoot => "foot-wrapping",
            Condition::AmbiguousSideConstraint => "2b-reading",
            Condition::SideTreesConstrained => "side-closure",
            Condition::ObligatorySplitNode => "obligatory-split",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub tree: String,
    pub node: NodeId,
    pub condition: Condition,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "violation",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{kind}: condition {}: tree {} node {}: {}",
            self.condition, self.tree, self.node, self.message
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        match v.severity {
            Severity::Error => self.violations.push(v),
            Severity::Warning => self.warnings.push(v),
        }
    }
}

/// Checks the wrapping restriction. Violations are reported, never raised.
pub fn validate_restriction(grammar: &Grammar) -> ValidationReport {
    let classes = grammar.classes();
    let mut report = ValidationReport::default();
    let name = |t: TreeId| grammar.tree(t).name.clone();

    for t in grammar.tree_ids() {
        let tree = grammar.tree(t);
        for (i, node) in tree.nodes.iter().enumerate() {
            if node.hosts_adjunction() && node.adj.allowed.is_empty() && !node.adj.allows_nil {
                report.push(Violation {
                    tree: tree.name.clone(),
                    node: NodeId(i),
                    condition: Condition::DeadNode,
                    severity: Severity::Error,
                    message: "no tree may adjoin and adjunction is obligatory".into(),
                });
            }
            if node.hosts_adjunction() {
                let sides: Vec<TreeId> = classes
                    .iter()
                    .filter(|(o, c)| **c != TreeClass::Wrapping && grammar.tree(**o).root_label() == node.label)
                    .map(|(o, _)| *o)
                    .collect();
                let admitted = sides.iter().filter(|o| node.adj.allowed.contains(o)).count();
                if admitted > 0 && admitted < sides.len() {
                    let missing: Vec<String> = sides
                        .iter()
                        .filter(|o| !node.adj.allowed.contains(o))
                        .map(|&o| name(o))
                        .collect();
                    report.push(Violation {
                        tree: tree.name.clone(),
                        node: NodeId(i),
                        condition: Condition::SideTreesConstrained,
                        severity: Severity::Warning,
                        message: format!(
                            "admits some left/right trees but not {}; derivations stacking them may be missed",
                            missing.join(", ")
                        ),
                    });
                }
            }
            if node.role == NodeRole::Foot && admits(&node.adj.allowed, &classes, TreeClass::Wrapping) {
                report.push(Violation {
                    tree: tree.name.clone(),
                    node: NodeId(i),
                    condition: Condition::WrappingAtFoot,
                    severity: Severity::Warning,
                    message: "foot node admits a wrapping tree".into(),
                });
            }
        }
    }

    for (&t, &class) in &classes {
        let tree = grammar.tree(t);
        let spine = compute_spine(tree).expect("auxiliary tree");
        match class {
            TreeClass::Wrapping => {
                for &n in &spine {
                    let node = tree.node(n);
                    let sided = admits(&node.adj.allowed, &classes, TreeClass::Left)
                        || admits(&node.adj.allowed, &classes, TreeClass::Right);
                    if !node.adj.allows_nil && sided {
                        report.push(Violation {
                            tree: tree.name.clone(),
                            node: n,
                            condition: Condition::ObligatorySplitNode,
                            severity: Severity::Warning,
                            message: "obligatory spine node admits left/right trees; derivations satisfying it with one of them may be missed".into(),
                        });
                    }
                }
                let eligible = wrapping_eligible(&classes, tree).expect("auxiliary tree");
                if eligible.len() > 1 {
                    for &n in &eligible {
                        report.push(Violation {
                            tree: tree.name.clone(),
                            node: n,
                            condition: Condition::SingleWrappingNode,
                            severity: Severity::Error,
                            message: format!("one of {} spine nodes admitting wrapping trees", eligible.len()),
                        });
                    }
                }
            }
            TreeClass::Left | TreeClass::Right => {
                let opposite = if class == TreeClass::Left {
                    TreeClass::Right
                } else {
                    TreeClass::Left
                };
                let required: Vec<TreeId> = classes
                    .iter()
                    .filter(|(o, c)| **c == opposite && grammar.tree(**o).root_label() == tree.root_label())
                    .map(|(o, _)| *o)
                    .collect();
                for &n in &spine {
                    let node = tree.node(n);
                    if admits(&node.adj.allowed, &classes, TreeClass::Wrapping) {
                        report.push(Violation {
                            tree: tree.name.clone(),
                            node: n,
                            condition: Condition::NoWrappingOnSideSpine,
                            severity: Severity::Error,
                            message: "spine node of a left/right tree admits a wrapping tree".into(),
                        });
                    }
                    let missing: Vec<String> = required
                        .iter()
                        .filter(|o| !node.adj.allowed.contains(o))
                        .map(|&o| name(o))
                        .collect();
                    let complete = missing.is_empty() && node.adj.allows_nil;
                    if !complete {
                        let mut what = Vec::new();
                        if !missing.is_empty() {
                            what.push(format!("missing {}", missing.join(", ")));
                        }
                        if !node.adj.allows_nil {
                            what.push("nil not allowed".to_string());
                        }
                        report.push(Violation {
                            tree: tree.name.clone(),
                            node: n,
                            condition: Condition::OppositeSideUnconstrained,
                            severity: Severity::Error,
                            message: format!("constrains opposite-side trees: {}", what.join("; ")),
                        });
                    }
                    let mentions_opposite = node.adj.allowed.iter().any(|o| classes.get(o) == Some(&opposite));
                    let silent = !node.explicit_adj || !mentions_opposite;
                    if node.explicit_adj && complete != silent {
                        report.push(Violation {
                            tree: tree.name.clone(),
                            node: n,
                            condition: Condition::AmbiguousSideConstraint,
                            severity: Severity::Warning,
                            message:
                                "explicit clause is read differently by the two readings of the side-tree condition"
                                    .into(),
                        });
                    }
                }
            }
        }
    }
    report
}

fn admits(
    allowed: &std::collections::BTreeSet<TreeId>,
    classes: &BTreeMap<TreeId, TreeClass>,
    class: TreeClass,
) -> bool {
    allowed.iter().any(|t| classes.get(t) == Some(&class))
}
