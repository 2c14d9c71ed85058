//! Splitting of wrapping trees into four one-sided halves.
//!
//! Every auxiliary tree of the transformed set has its foot at the leftmost or
//! rightmost leaf, so two input positions suffice to describe any of its
//! subtrees. A wrapping tree `β` with wrapping node `w` becomes
//!
//! * `LU`, `RU`: the part of `β` above `w`, restricted to the left (right) of
//!   the spine, with `w` as foot;
//! * `LD`, `RD`: the subtree at `w`, restricted the same way, with the
//!   original foot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::grammar::{
    compute_spine, normalize, tree_to_json, validate_restriction, AdjConstraint, ElementaryTree, Grammar, GrammarError,
    NodeId, NodeRole, TreeClass, TreeId, TreeKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitKind {
    L,
    R,
    LU,
    RU,
    LD,
    RD,
}

impl SplitKind {
    pub fn side(self) -> Side {
        match self {
            SplitKind::L | SplitKind::LU | SplitKind::LD => Side::Left,
            SplitKind::R | SplitKind::RU | SplitKind::RD => Side::Right,
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Side of the spine on which a split tree carries its material.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTree {
    pub source: TreeId,
    pub kind: SplitKind,
    /// Own preorder numbering; named `<source>.<kind>`.
    pub tree: ElementaryTree,
    /// Node of the source tree each local node was copied from.
    pub origin: Vec<NodeId>,
    pub side: Side,
}

/// What may adjoin at the wrapping node of a wrapping tree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WrapEntry {
    pub allowed: BTreeSet<TreeId>,
    pub allows_nil: bool,
}

/// An adjunction constraint with its tree names grouped by tree class.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PartitionedAdj {
    pub left: BTreeSet<TreeId>,
    pub right: BTreeSet<TreeId>,
    pub wrapping: BTreeSet<TreeId>,
    pub nil: bool,
}

/// A tree the recognizer walks: an initial tree, or a tree of the transformed
/// auxiliary set (index into [`TransformedGrammar::split_trees`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Host {
    Initial(TreeId),
    Split(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedGrammar {
    pub base: Grammar,
    pub classes: BTreeMap<TreeId, TreeClass>,
    pub split_trees: Vec<SplitTree>,
    pub wrap_table: BTreeMap<TreeId, WrapEntry>,
    /// Effective constraint per host node, indexed by the host's local node id.
    pub adj_map: BTreeMap<Host, Vec<PartitionedAdj>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("{tree}: grammar is not normalized: {message}")]
    NotNormalized { tree: String, message: String },
    #[error("grammar violates the wrapping restriction: {0}")]
    Restriction(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

impl TransformedGrammar {
    pub fn split_index(&self, source: TreeId, kind: SplitKind) -> Option<usize> {
        self.split_trees
            .iter()
            .position(|s| s.source == source && s.kind == kind)
    }

    pub fn split(&self, source: TreeId, kind: SplitKind) -> Option<&SplitTree> {
        self.split_index(source, kind).map(|i| &self.split_trees[i])
    }

    /// Initial trees first, then the transformed auxiliary set.
    pub fn hosts(&self) -> Vec<Host> {
        self.base
            .initials()
            .map(Host::Initial)
            .chain((0..self.split_trees.len()).map(Host::Split))
            .collect()
    }

    pub fn host_tree(&self, host: Host) -> &ElementaryTree {
        match host {
            Host::Initial(t) => self.base.tree(t),
            Host::Split(i) => &self.split_trees[i].tree,
        }
    }

    pub fn wrapping_trees(&self) -> impl Iterator<Item = TreeId> + '_ {
        self.wrap_table.keys().copied()
    }

    /// Transformed grammar in file form, with a `wrap_table` section. Left and
    /// right trees are referenced as `<name>.L` / `<name>.R`, wrapping trees by
    /// their source name.
    pub fn to_json(&self) -> String {
        let name = |t: TreeId| {
            let base = &self.base.tree(t).name;
            match self.classes.get(&t) {
                Some(TreeClass::Left) => format!("{base}.L"),
                Some(TreeClass::Right) => format!("{base}.R"),
                _ => base.clone(),
            }
        };
        let trees: Vec<serde_json::Value> = self
            .hosts()
            .into_iter()
            .map(|h| tree_to_json(self.host_tree(h), &name))
            .collect();
        let wrap: serde_json::Map<String, serde_json::Value> = self
            .wrap_table
            .iter()
            .map(|(t, e)| {
                let allowed: Vec<String> = e.allowed.iter().map(|&b| name(b)).collect();
                (name(*t), serde_json::json!({ "allowed": allowed, "nil": e.allows_nil }))
            })
            .collect();
        let doc = serde_json::json!({
            "start": self.base.start,
            "trees": trees,
            "wrap_table": wrap,
        });
        serde_json::to_string_pretty(&doc).expect("json")
    }
}

fn extract(
    src: &ElementaryTree,
    name: String,
    root: NodeId,
    stop: Option<NodeId>,
    side: Side,
    spine: &[NodeId],
) -> (ElementaryTree, Vec<NodeId>) {
    let mut tree = ElementaryTree {
        name,
        kind: TreeKind::Auxiliary,
        nodes: Vec::new(),
        foot: None,
        wrap_node: None,
    };
    let mut origin = Vec::new();
    walk(src, root, stop, side, spine, &mut tree, &mut origin);
    (tree, origin)
}

fn walk(
    src: &ElementaryTree,
    n: NodeId,
    stop: Option<NodeId>,
    side: Side,
    spine: &[NodeId],
    out: &mut ElementaryTree,
    origin: &mut Vec<NodeId>,
) -> NodeId {
    let id = NodeId(out.nodes.len());
    let mut node = src.node(n).clone();
    node.children.clear();
    out.nodes.push(node);
    origin.push(n);
    if stop == Some(n) {
        out.nodes[id.0].role = NodeRole::Foot;
        out.foot = Some(id);
        return id;
    }
    if src.foot == Some(n) {
        out.foot = Some(id);
    }
    let kids = &src.node(n).children;
    let kept = match kids.iter().position(|c| spine.contains(c)) {
        Some(m) => match side {
            Side::Left => &kids[..=m],
            Side::Right => &kids[m..],
        },
        None => &kids[..],
    };
    for &c in kept {
        let cid = walk(src, c, stop, side, spine, out, origin);
        out.nodes[id.0].children.push(cid);
    }
    id
}

/// Splits a normalized wrapping tree at `wrap`. Returns `[LU, RU, LD, RD]`
/// carrying the constraints of the source unchanged.
pub fn split_wrapping_tree(
    source: TreeId,
    tree: &ElementaryTree,
    wrap: NodeId,
) -> Result<[SplitTree; 4], TransformError> {
    let bad = |message: &str| TransformError::NotNormalized {
        tree: tree.name.clone(),
        message: message.to_string(),
    };
    let spine = compute_spine(tree).map_err(|e| bad(&e.to_string()))?;
    let foot = tree.foot.expect("spine exists");
    if wrap == tree.root() || wrap == foot || !spine.contains(&wrap) {
        return Err(bad("wrapping node must be an internal spine node"));
    }
    let make = |kind: SplitKind, root: NodeId, stop: Option<NodeId>| {
        let (t, origin) = extract(tree, format!("{}.{kind}", tree.name), root, stop, kind.side(), &spine);
        SplitTree {
            source,
            kind,
            tree: t,
            origin,
            side: kind.side(),
        }
    };
    Ok([
        make(SplitKind::LU, tree.root(), Some(wrap)),
        make(SplitKind::RU, tree.root(), Some(wrap)),
        make(SplitKind::LD, wrap, None),
        make(SplitKind::RD, wrap, None),
    ])
}

/// Builds the transformed tree set and its constraint tables.
pub fn build_transformed_grammar(grammar: &Grammar) -> Result<TransformedGrammar, TransformError> {
    let report = validate_restriction(grammar);
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(TransformError::Restriction(msgs.join("; ")));
    }
    for tree in &grammar.trees {
        if tree.nodes.iter().any(|n| n.children.len() > 2) {
            return Err(TransformError::NotNormalized {
                tree: tree.name.clone(),
                message: "node with more than two children".into(),
            });
        }
    }
    let classes = grammar.classes();
    let mut split_trees = Vec::new();
    let mut wrap_table = BTreeMap::new();
    for (&t, &class) in &classes {
        let tree = grammar.tree(t);
        match class {
            TreeClass::Left | TreeClass::Right => {
                let kind = if class == TreeClass::Left {
                    SplitKind::L
                } else {
                    SplitKind::R
                };
                let mut copy = tree.clone();
                copy.name = format!("{}.{kind}", tree.name);
                split_trees.push(SplitTree {
                    source: t,
                    kind,
                    origin: (0..tree.nodes.len()).map(NodeId).collect(),
                    tree: copy,
                    side: kind.side(),
                });
            }
            TreeClass::Wrapping => {
                let w = tree.wrap_node.ok_or_else(|| TransformError::NotNormalized {
                    tree: tree.name.clone(),
                    message: "wrapping tree without a designated wrapping node".into(),
                })?;
                split_trees.extend(split_wrapping_tree(t, tree, w)?);
                let adj = &tree.node(w).adj;
                wrap_table.insert(
                    t,
                    WrapEntry {
                        allowed: adj
                            .allowed
                            .iter()
                            .copied()
                            .filter(|b| classes[b] == TreeClass::Wrapping)
                            .collect(),
                        allows_nil: adj.allows_nil,
                    },
                );
            }
        }
    }

    for split in &mut split_trees {
        let keep = match split.side {
            Side::Left => TreeClass::Left,
            Side::Right => TreeClass::Right,
        };
        for n in compute_spine(&split.tree).expect("split trees are auxiliary") {
            let node = &mut split.tree.nodes[n.0];
            node.adj.allowed.retain(|b| classes[b] == keep);
            node.explicit_adj = true;
        }
        if matches!(split.kind, SplitKind::LU | SplitKind::RU) {
            let f = split.tree.foot.expect("foot");
            split.tree.nodes[f.0].adj = AdjConstraint::null();
        }
    }

    let partition = |tree: &ElementaryTree| -> Vec<PartitionedAdj> {
        tree.nodes
            .iter()
            .map(|n| {
                let mut p = PartitionedAdj {
                    nil: n.adj.allows_nil,
                    ..Default::default()
                };
                for &b in &n.adj.allowed {
                    match classes[&b] {
                        TreeClass::Left => p.left.insert(b),
                        TreeClass::Right => p.right.insert(b),
                        TreeClass::Wrapping => p.wrapping.insert(b),
                    };
                }
                p
            })
            .collect()
    };
    let mut adj_map = BTreeMap::new();
    for t in grammar.initials() {
        adj_map.insert(Host::Initial(t), partition(grammar.tree(t)));
    }
    for (i, s) in split_trees.iter().enumerate() {
        adj_map.insert(Host::Split(i), partition(&s.tree));
    }

    Ok(TransformedGrammar {
        base: grammar.clone(),
        classes,
        split_trees,
        wrap_table,
        adj_map,
    })
}

/// Normalizes `grammar` and builds its transformed tree set.
pub fn prepare(grammar: &Grammar) -> Result<TransformedGrammar, TransformError> {
    let report = validate_restriction(grammar);
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(TransformError::Restriction(msgs.join("; ")));
    }
    build_transformed_grammar(&normalize(grammar)?)
}

/// Lexical leaves (terminals and substitution slots) as source node ids.
fn lexical_leaves(split: &SplitTree) -> Vec<NodeId> {
    split
        .tree
        .leaves()
        .into_iter()
        .filter(|&l| split.tree.node(l).role != NodeRole::Foot)
        .map(|l| split.origin[l.0])
        .collect()
}

fn part(parts: &[SplitTree], kind: SplitKind) -> &SplitTree {
    parts.iter().find(|p| p.kind == kind).expect("all four parts present")
}

/// `LU ++ LD` yields the lexical leaves of `source` left of its foot, and
/// `RD ++ RU` those right of it.
pub fn yield_partition_holds(source: &ElementaryTree, parts: &[SplitTree]) -> bool {
    let foot = source.foot.expect("auxiliary");
    let leaves = source.leaves();
    let at = leaves.iter().position(|&l| l == foot).expect("foot is a leaf");
    let lexical = |ls: &[NodeId]| -> Vec<NodeId> {
        ls.iter()
            .copied()
            .filter(|&l| source.node(l).role != NodeRole::Foot)
            .collect()
    };
    let left = lexical(&leaves[..at]);
    let right = lexical(&leaves[at + 1..]);
    let cat = |a: SplitKind, b: SplitKind| {
        let mut v = lexical_leaves(part(parts, a));
        v.extend(lexical_leaves(part(parts, b)));
        v
    };
    cat(SplitKind::LU, SplitKind::LD) == left && cat(SplitKind::RD, SplitKind::RU) == right
}

/// Every node off the spine lands in exactly one part; spine nodes below
/// (above) the wrapping node land in both lower (upper) parts.
pub fn node_conservation_holds(source: &ElementaryTree, parts: &[SplitTree]) -> bool {
    let Some(w) = source.wrap_node else {
        return false;
    };
    let spine = compute_spine(source).expect("auxiliary");
    let at = spine.iter().position(|&n| n == w).expect("wrap on spine");
    let upper: BTreeSet<NodeId> = spine[..=at].iter().copied().collect();
    let lower: BTreeSet<NodeId> = spine[at..].iter().copied().collect();
    let kinds = [SplitKind::LU, SplitKind::RU, SplitKind::LD, SplitKind::RD];
    let mut seen: BTreeMap<NodeId, BTreeSet<SplitKind>> = BTreeMap::new();
    for k in kinds {
        let p = part(parts, k);
        if p.origin.iter().collect::<BTreeSet<_>>().len() != p.origin.len() {
            return false;
        }
        for &o in &p.origin {
            seen.entry(o).or_default().insert(k);
        }
    }
    (0..source.nodes.len()).map(NodeId).all(|n| {
        let got = seen.get(&n).cloned().unwrap_or_default();
        let mut want = BTreeSet::new();
        if upper.contains(&n) {
            want.extend([SplitKind::LU, SplitKind::RU]);
        }
        if lower.contains(&n) {
            want.extend([SplitKind::LD, SplitKind::RD]);
        }
        if want.is_empty() {
            got.len() == 1
        } else {
            got == want
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{normalize, parse_grammar};

    fn g1() -> Grammar {
        let text = r#"{ "start": "S", "trees": [
          { "name": "alpha", "kind": "initial", "root": { "label": "S", "adj": { "allowed": [], "nil": true }, "children": [
              { "label": "a", "terminal": true },
              { "label": "S", "adj": { "allowed": ["beta"], "nil": true }, "children": [
                  { "label": "b", "terminal": true }, { "label": "c", "terminal": true } ] },
              { "label": "d", "terminal": true } ] } },
          { "name": "beta", "kind": "auxiliary", "root": { "label": "S", "adj": { "allowed": [], "nil": true }, "children": [
              { "label": "a", "terminal": true },
              { "label": "S", "adj": { "allowed": ["beta"], "nil": true }, "children": [
                  { "label": "b", "terminal": true },
                  { "label": "S", "foot": true, "adj": { "allowed": [], "nil": true } },
                  { "label": "c", "terminal": true } ] },
              { "label": "d", "terminal": true } ] } } ] }"#;
        parse_grammar(text).unwrap()
    }

    fn labels(t: &ElementaryTree) -> String {
        fn go(t: &ElementaryTree, n: NodeId, out: &mut String) {
            let node = t.node(n);
            out.push_str(&node.label);
            if node.role == NodeRole::Foot {
                out.push('*');
            }
            if !node.children.is_empty() {
                out.push('(');
                for (i, &c) in node.children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    go(t, c, out);
                }
                out.push(')');
            }
        }
        let mut s = String::new();
        go(t, t.root(), &mut s);
        s
    }

    #[test]
    fn split_of_unbinarized_tree() {
        // S(a, S'(b, S*, c), d) split at S'
        let g = g1();
        let beta = g.tree(TreeId(1));
        let parts = split_wrapping_tree(TreeId(1), beta, NodeId(2)).unwrap();
        let shapes: Vec<String> = parts.iter().map(|p| labels(&p.tree)).collect();
        assert_eq!(shapes, ["S(a S*)", "S(S* d)", "S(b S*)", "S(S* c)"]);
        assert_eq!(parts[0].origin, [NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(parts[0].tree.foot, Some(NodeId(2)));
        assert!(yield_partition_holds(beta, &parts));
        let mut marked = beta.clone();
        marked.wrap_node = Some(NodeId(2));
        assert!(node_conservation_holds(&marked, &parts));
    }

    #[test]
    fn g1_transformed() {
        let n = normalize(&g1()).unwrap();
        let tg = build_transformed_grammar(&n).unwrap();
        assert_eq!(tg.split_trees.len(), 4);
        let entry = &tg.wrap_table[&TreeId(1)];
        assert_eq!(entry.allowed.iter().collect::<Vec<_>>(), [&TreeId(1)]);
        assert!(entry.allows_nil);
        let lu = tg.split(TreeId(1), SplitKind::LU).unwrap();
        let f = lu.tree.foot.unwrap();
        assert!(lu.tree.node(f).adj.is_null());
        let beta = tg.base.tree(TreeId(1));
        let parts: Vec<SplitTree> = tg.split_trees.clone();
        assert!(yield_partition_holds(beta, &parts));
        assert!(node_conservation_holds(beta, &parts));
        // no wrapping names survive on any split spine
        for s in &tg.split_trees {
            let adj = &tg.adj_map[&Host::Split(tg.split_index(s.source, s.kind).unwrap())];
            for n in compute_spine(&s.tree).unwrap() {
                assert!(adj[n.0].wrapping.is_empty());
            }
        }
    }

    #[test]
    fn left_right_only_grammar_is_copied() {
        let text = r#"{ "start": "S", "trees": [
          { "name": "alpha", "kind": "initial", "root": { "label": "S", "children": [ { "label": "s", "terminal": true } ] } },
          { "name": "l", "kind": "auxiliary", "root": { "label": "S", "children": [ { "label": "x", "terminal": true }, { "label": "S", "foot": true } ] } },
          { "name": "r", "kind": "auxiliary", "root": { "label": "S", "children": [ { "label": "S", "foot": true }, { "label": "y", "terminal": true } ] } } ] }"#;
        let tg = build_transformed_grammar(&parse_grammar(text).unwrap()).unwrap();
        let names: Vec<&str> = tg.split_trees.iter().map(|s| s.tree.name.as_str()).collect();
        assert_eq!(names, ["l.L", "r.R"]);
        assert!(tg.wrap_table.is_empty());
        // the initial root keeps both sides
        let root = &tg.adj_map[&Host::Initial(TreeId(0))][0];
        assert_eq!((root.left.len(), root.right.len(), root.nil), (1, 1, true));
        // spines are one-sided
        let l = &tg.adj_map[&Host::Split(0)][0];
        assert!(l.right.is_empty() && l.left.len() == 1);
        let dump = tg.to_json();
        assert!(dump.contains("\"l.L\"") && dump.contains("\"wrap_table\""));
    }

    #[test]
    fn all_material_below_wrapping_node() {
        let text = r#"{ "start": "S", "trees": [
          { "name": "alpha", "kind": "initial", "root": { "label": "S", "children": [ { "label": "s", "terminal": true } ] } },
          { "name": "w", "kind": "auxiliary", "root": { "label": "S", "adj": { "allowed": [], "nil": true }, "children": [
              { "label": "S", "adj": { "allowed": ["w"], "nil": true }, "children": [
                  { "label": "a", "terminal": true }, { "label": "S", "foot": true, "adj": { "allowed": [], "nil": true } },
                  { "label": "b", "terminal": true } ] } ] } } ] }"#;
        let g = normalize(&parse_grammar(text).unwrap()).unwrap();
        let tg = build_transformed_grammar(&g).unwrap();
        let lu = tg.split(TreeId(1), SplitKind::LU).unwrap();
        assert!(lu.tree.terminal_yield().is_empty());
        assert_eq!(labels(&lu.tree), "S(S*)");
        assert_eq!(labels(&tg.split(TreeId(1), SplitKind::LD).unwrap().tree), "S(a S(S*))");
    }

    #[test]
    fn non_spine_constraints_untouched() {
        let text = r#"{ "start": "S", "trees": [
          { "name": "alpha", "kind": "initial", "root": { "label": "S", "children": [ { "label": "s", "terminal": true } ] } },
          { "name": "l", "kind": "auxiliary", "root": { "label": "S", "adj": { "allowed": ["l"], "nil": true }, "children": [
              { "label": "x", "terminal": true }, { "label": "S", "foot": true, "adj": { "allowed": ["l"], "nil": true } } ] } },
          { "name": "w", "kind": "auxiliary", "root": { "label": "S", "adj": { "allowed": [], "nil": true }, "children": [
              { "label": "S", "children": [ { "label": "e", "terminal": true } ] },
              { "label": "S", "adj": { "allowed": [], "nil": true }, "children": [
                  { "label": "a", "terminal": true }, { "label": "S", "foot": true, "adj": { "allowed": [], "nil": true } },
                  { "label": "b", "terminal": true } ] } ] } } ] }"#;
        let g = normalize(&parse_grammar(text).unwrap()).unwrap();
        let tg = build_transformed_grammar(&g).unwrap();
        let i = tg.split_index(TreeId(2), SplitKind::LU).unwrap();
        let lu = &tg.split_trees[i];
        // the S(e) node sits off the spine and keeps its default constraint
        let n = (0..lu.tree.nodes.len())
            .find(|&k| lu.tree.nodes[k].children.len() == 1 && lu.tree.node(lu.tree.nodes[k].children[0]).label == "e")
            .unwrap();
        let adj = &tg.adj_map[&Host::Split(i)][n];
        assert_eq!(adj.left.len(), 1);
        assert_eq!(adj.wrapping.len(), 1);
    }

    #[test]
    fn deterministic() {
        let n = normalize(&g1()).unwrap();
        assert_eq!(build_transformed_grammar(&n), build_transformed_grammar(&n));
    }
}
