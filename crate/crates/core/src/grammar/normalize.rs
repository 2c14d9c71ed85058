//! Rewrites a grammar into the shape the recognizer expects: binary trees, and
//! in every wrapping tree a designated wrapping node strictly between root and
//! foot.

use super::classify::{classify_tree, compute_spine, wrapping_eligible, TreeClass};
use super::validate::Condition;
use super::{AdjConstraint, ElementaryTree, Grammar, GrammarError, NodeId, NodeRole, TreeNode};

/// Returns a grammar generating the same strings in which every node has at
/// most two children and every wrapping tree has an internal wrapping node.
/// Applying it twice gives the same result as applying it once.
pub fn normalize(grammar: &Grammar) -> Result<Grammar, GrammarError> {
    check_no_epsilon(grammar)?;
    let classes = grammar.classes();
    let mut out = grammar.clone();
    for tree in &mut out.trees {
        binarize(tree);
        let wrapping = tree.is_auxiliary() && classify_tree(tree)? == TreeClass::Wrapping;
        if wrapping {
            let eligible = match wrapping_eligible(&classes, tree)?.as_slice() {
                [] => None,
                [w] => Some(*w),
                many => {
                    return Err(GrammarError::RestrictionViolation {
                        tree: tree.name.clone(),
                        condition: Condition::SingleWrappingNode,
                        message: format!("{} spine nodes admit wrapping trees", many.len()),
                    })
                }
            };
            designate_wrapping_node(tree, eligible);
        }
    }
    Ok(out)
}

/// Only the binarization half of [`normalize`]; works on any grammar,
/// restricted or not.
pub fn binarize_grammar(grammar: &Grammar) -> Result<Grammar, GrammarError> {
    check_no_epsilon(grammar)?;
    let mut out = grammar.clone();
    for tree in &mut out.trees {
        binarize(tree);
    }
    Ok(out)
}

fn check_no_epsilon(grammar: &Grammar) -> Result<(), GrammarError> {
    for tree in &grammar.trees {
        for (i, node) in tree.nodes.iter().enumerate() {
            if node.role == NodeRole::Terminal && (node.label.is_empty() || node.label == "ε") {
                return Err(GrammarError::EpsilonLeaf {
                    tree: tree.name.clone(),
                    node: NodeId(i),
                });
            }
        }
    }
    Ok(())
}

fn synthetic(label: &str, children: Vec<NodeId>, role: NodeRole) -> TreeNode {
    TreeNode {
        label: label.to_string(),
        role,
        children,
        adj: AdjConstraint::null(),
        subst: Default::default(),
        explicit_adj: true,
        synthetic: true,
    }
}

fn push(tree: &mut ElementaryTree, node: TreeNode) -> NodeId {
    tree.nodes.push(node);
    NodeId(tree.nodes.len() - 1)
}

/// Folds a run of siblings into a right-branching chain of synthetic nodes.
fn fold(tree: &mut ElementaryTree, label: &str, mut kids: Vec<NodeId>) -> NodeId {
    if kids.len() == 1 {
        return kids[0];
    }
    let first = kids.remove(0);
    let rest = fold(tree, label, kids);
    push(tree, synthetic(label, vec![first, rest], NodeRole::Internal))
}

fn binarize(tree: &mut ElementaryTree) {
    let spine = if tree.is_auxiliary() {
        compute_spine(tree).expect("auxiliary tree")
    } else {
        Vec::new()
    };
    let original = tree.nodes.len();
    for i in 0..original {
        let kids = tree.nodes[i].children.clone();
        if kids.len() <= 2 {
            continue;
        }
        let label = tree.nodes[i].label.clone();
        let on_spine = kids.iter().position(|c| spine.contains(c));
        let new_kids = match on_spine {
            None => {
                let rest = fold(tree, &label, kids[1..].to_vec());
                vec![kids[0], rest]
            }
            Some(m) => {
                // keep material on the same side of the spine it started on
                let left = (m > 0).then(|| fold(tree, &label, kids[..m].to_vec()));
                let right = (m + 1 < kids.len()).then(|| fold(tree, &label, kids[m + 1..].to_vec()));
                match (left, right) {
                    (Some(l), Some(r)) => {
                        let x = push(tree, synthetic(&label, vec![kids[m], r], NodeRole::Internal));
                        vec![l, x]
                    }
                    (Some(l), None) => vec![l, kids[m]],
                    (None, Some(r)) => vec![kids[m], r],
                    (None, None) => unreachable!("more than two children"),
                }
            }
        };
        tree.nodes[i].children = new_kids;
    }
    if tree.nodes.len() > original {
        tree.renumber_from(NodeId(0));
    }
}

fn designate_wrapping_node(tree: &mut ElementaryTree, eligible: Option<NodeId>) {
    let foot = tree.foot.expect("auxiliary tree");
    let spine = compute_spine(tree).expect("auxiliary tree");
    // an earlier pass already placed a wrapping node; keep it
    if let Some(w) = tree.wrap_node {
        let internal = w != tree.root() && w != foot && spine.contains(&w);
        if internal && eligible.is_none_or(|e| e == w) {
            return;
        }
    }
    let parents = tree.parents();
    match eligible {
        None => {
            let label = tree.node(foot).label.clone();
            let parent = parents[foot.0].expect("foot is not the root");
            let x = push(tree, synthetic(&label, vec![foot], NodeRole::Internal));
            replace_child(tree, parent, foot, x);
            tree.wrap_node = Some(x);
            tree.renumber_from(NodeId(0));
        }
        Some(w) if w == tree.root() => {
            let label = tree.root_label().to_string();
            let x = push(tree, synthetic(&label, vec![w], NodeRole::Internal));
            tree.wrap_node = Some(w);
            tree.renumber_from(x);
        }
        Some(w) if w == foot => {
            let label = tree.node(foot).label.clone();
            let f = push(tree, synthetic(&label, Vec::new(), NodeRole::Foot));
            let old = &mut tree.nodes[w.0];
            old.role = NodeRole::Internal;
            old.children = vec![f];
            tree.foot = Some(f);
            tree.wrap_node = Some(w);
            tree.renumber_from(NodeId(0));
        }
        Some(w) => tree.wrap_node = Some(w),
    }
}

fn replace_child(tree: &mut ElementaryTree, parent: NodeId, old: NodeId, new: NodeId) {
    for c in &mut tree.nodes[parent.0].children {
        if *c == old {
            *c = new;
        }
    }
}
