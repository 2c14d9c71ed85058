use std::collections::BTreeMap;

use super::validate::Condition;
use super::{ElementaryTree, Grammar, GrammarError, NodeId, TreeId};

/// Shape class of an auxiliary tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeClass {
    /// Foot is the rightmost leaf; material only to the left of it.
    Left,
    /// Foot is the leftmost leaf; material only to the right of it.
    Right,
    Wrapping,
}

/// Root-to-foot path, both ends included.
pub fn compute_spine(tree: &ElementaryTree) -> Result<Vec<NodeId>, GrammarError> {
    let foot = tree.foot.ok_or_else(|| GrammarError::NotAuxiliary(tree.name.clone()))?;
    let parents = tree.parents();
    let mut path = vec![foot];
    let mut cur = foot;
    while let Some(p) = parents[cur.0] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    Ok(path)
}

pub fn classify_tree(tree: &ElementaryTree) -> Result<TreeClass, GrammarError> {
    let spine = compute_spine(tree)?;
    let foot = tree.foot.expect("spine exists");
    let leaves = tree.leaves();
    let short_spine = spine.len() == 2;
    Ok(if short_spine && leaves.first() == Some(&foot) {
        TreeClass::Right
    } else if short_spine && leaves.last() == Some(&foot) {
        TreeClass::Left
    } else {
        TreeClass::Wrapping
    })
}

impl Grammar {
    /// Class of every auxiliary tree.
    pub fn classes(&self) -> BTreeMap<TreeId, TreeClass> {
        self.auxiliaries()
            .map(|t| (t, classify_tree(self.tree(t)).expect("auxiliary tree")))
            .collect()
    }
}

/// Spine nodes of `tree` whose adjunction set names at least one wrapping tree.
pub(crate) fn wrapping_eligible(
    classes: &BTreeMap<TreeId, TreeClass>,
    tree: &ElementaryTree,
) -> Result<Vec<NodeId>, GrammarError> {
    Ok(compute_spine(tree)?
        .into_iter()
        .filter(|&n| {
            tree.node(n)
                .adj
                .allowed
                .iter()
                .any(|t| classes.get(t) == Some(&TreeClass::Wrapping))
        })
        .collect())
}

/// The unique spine node of a wrapping tree that admits wrapping adjunction.
///
/// Returns `Ok(None)` if no spine node admits a wrapping tree and a
/// restriction violation if more than one does.
pub fn find_wrapping_node(grammar: &Grammar, tree: TreeId) -> Result<Option<NodeId>, GrammarError> {
    let classes = grammar.classes();
    let t = grammar.tree(tree);
    let eligible = wrapping_eligible(&classes, t)?;
    match eligible.as_slice() {
        [] => Ok(None),
        [w] => Ok(Some(*w)),
        many => Err(GrammarError::RestrictionViolation {
            tree: t.name.clone(),
            condition: Condition::SingleWrappingNode,
            message: format!(
                "{} spine nodes admit wrapping trees: {}",
                many.len(),
                many.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
            ),
        }),
    }
}
