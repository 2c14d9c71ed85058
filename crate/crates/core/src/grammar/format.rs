//! JSON grammar file format.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{AdjConstraint, ElementaryTree, Grammar, GrammarError, NodeId, NodeRole, TreeId, TreeKind, TreeNode};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrammar {
    start: String,
    trees: Vec<RawTree>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTree {
    name: String,
    kind: RawKind,
    root: RawNode,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Initial,
    Auxiliary,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    label: String,
    #[serde(default, skip_serializing_if = "is_false")]
    terminal: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    foot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subst: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    adj: Option<RawAdj>,
    #[serde(default, skip_serializing_if = "is_false")]
    synthetic: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    wrap: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<RawNode>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdj {
    allowed: Vec<String>,
    nil: bool,
}

/// Node collected during flattening, names still unresolved.
struct Pending {
    path: String,
    subst: Vec<String>,
    adj: Option<RawAdj>,
    wrap: bool,
}

/// Parses a grammar file. Cross-references are resolved and the structural
/// invariants of elementary trees are checked; the wrapping restriction is not
/// (see [`super::validate_restriction`]).
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let raw: RawGrammar = serde_json::from_str(text).map_err(|e| GrammarError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut names: HashMap<String, TreeId> = HashMap::new();
    for (i, t) in raw.trees.iter().enumerate() {
        if names.insert(t.name.clone(), TreeId(i)).is_some() {
            return Err(GrammarError::DuplicateName(t.name.clone()));
        }
    }

    let mut trees = Vec::with_capacity(raw.trees.len());
    let mut pending: Vec<Vec<Pending>> = Vec::with_capacity(raw.trees.len());
    for rt in raw.trees {
        let kind = match rt.kind {
            RawKind::Initial => TreeKind::Initial,
            RawKind::Auxiliary => TreeKind::Auxiliary,
        };
        let mut nodes = Vec::new();
        let mut extra = Vec::new();
        flatten(&rt.name, kind, rt.root, "root".to_string(), &mut nodes, &mut extra)?;
        let feet: Vec<NodeId> = (0..nodes.len())
            .map(NodeId)
            .filter(|id| nodes[id.0].role == NodeRole::Foot)
            .collect();
        let foot = match (kind, feet.as_slice()) {
            (TreeKind::Initial, []) => None,
            (TreeKind::Initial, _) => {
                return Err(GrammarError::FootCount {
                    tree: rt.name,
                    message: "initial tree contains a foot node".into(),
                })
            }
            (TreeKind::Auxiliary, [f]) => Some(*f),
            (TreeKind::Auxiliary, _) => {
                return Err(GrammarError::FootCount {
                    tree: rt.name,
                    message: format!("auxiliary tree has {} foot nodes, expected 1", feet.len()),
                })
            }
        };
        if let Some(f) = foot {
            if nodes[f.0].label != nodes[0].label {
                return Err(GrammarError::FootRootMismatch {
                    tree: rt.name,
                    root: nodes[0].label.clone(),
                    foot: nodes[f.0].label.clone(),
                });
            }
        }
        let wraps: Vec<usize> = (0..extra.len()).filter(|&i| extra[i].wrap).collect();
        let wrap_node = match wraps.as_slice() {
            [] => None,
            [w] if kind == TreeKind::Auxiliary => Some(NodeId(*w)),
            _ => {
                return Err(GrammarError::Malformed {
                    tree: rt.name,
                    path: extra[wraps[0]].path.clone(),
                    message: "misplaced wrap marker".into(),
                })
            }
        };
        trees.push(ElementaryTree {
            name: rt.name,
            kind,
            nodes,
            foot,
            wrap_node,
        });
        pending.push(extra);
    }

    let mut terminals = BTreeSet::new();
    let mut nonterminals = BTreeSet::new();
    for node in trees.iter().flat_map(|t| t.nodes.iter()) {
        if node.role == NodeRole::Terminal {
            terminals.insert(node.label.clone());
        } else {
            nonterminals.insert(node.label.clone());
        }
    }
    if let Some(clash) = terminals.intersection(&nonterminals).next() {
        return Err(GrammarError::AlphabetClash(clash.clone()));
    }

    // resolve names now that every root label is known
    let root_labels: Vec<String> = trees.iter().map(|t| t.root_label().to_string()).collect();
    let kinds: Vec<TreeKind> = trees.iter().map(|t| t.kind).collect();
    for (ti, tree) in trees.iter_mut().enumerate() {
        for (ni, extra) in pending[ti].iter_mut().enumerate() {
            let node = &mut tree.nodes[ni];
            let resolve = |name: &str| {
                names.get(name).copied().ok_or_else(|| GrammarError::UnresolvedName {
                    tree: tree.name.clone(),
                    name: name.to_string(),
                })
            };
            for name in &extra.subst {
                let target = resolve(name)?;
                if kinds[target.0] != TreeKind::Initial {
                    return Err(GrammarError::Malformed {
                        tree: tree.name.clone(),
                        path: extra.path.clone(),
                        message: format!("`{name}` is not an initial tree"),
                    });
                }
                check_label(&tree.name, NodeId(ni), &node.label, name, &root_labels[target.0])?;
                node.subst.insert(target);
            }
            if let Some(adj) = extra.adj.take() {
                let mut allowed = BTreeSet::new();
                for name in &adj.allowed {
                    let target = resolve(name)?;
                    if kinds[target.0] != TreeKind::Auxiliary {
                        return Err(GrammarError::Malformed {
                            tree: tree.name.clone(),
                            path: extra.path.clone(),
                            message: format!("`{name}` is not an auxiliary tree"),
                        });
                    }
                    check_label(&tree.name, NodeId(ni), &node.label, name, &root_labels[target.0])?;
                    allowed.insert(target);
                }
                node.adj = AdjConstraint {
                    allowed,
                    allows_nil: adj.nil,
                };
                node.explicit_adj = true;
            } else if node.hosts_adjunction() {
                node.adj = AdjConstraint {
                    allowed: (0..root_labels.len())
                        .filter(|&t| kinds[t] == TreeKind::Auxiliary && root_labels[t] == node.label)
                        .map(TreeId)
                        .collect(),
                    allows_nil: true,
                };
            }
        }
    }

    for tree in &trees {
        if tree.is_auxiliary()
            && !tree
                .nodes
                .iter()
                .any(|n| matches!(n.role, NodeRole::Terminal | NodeRole::Substitution))
        {
            return Err(GrammarError::EmptyAuxiliary(tree.name.clone()));
        }
    }
    if !trees
        .iter()
        .any(|t| t.kind == TreeKind::Initial && t.root_label() == raw.start)
    {
        return Err(GrammarError::NoStartTree(raw.start));
    }

    Ok(Grammar {
        start: raw.start,
        trees,
        nonterminals,
        terminals,
    })
}

fn check_label(tree: &str, node: NodeId, expected: &str, target: &str, found: &str) -> Result<(), GrammarError> {
    if expected == found {
        Ok(())
    } else {
        Err(GrammarError::LabelMismatch {
            tree: tree.to_string(),
            node,
            target: target.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

fn flatten(
    tree: &str,
    kind: TreeKind,
    raw: RawNode,
    path: String,
    nodes: &mut Vec<TreeNode>,
    extra: &mut Vec<Pending>,
) -> Result<NodeId, GrammarError> {
    let malformed = |message: &str| GrammarError::Malformed {
        tree: tree.to_string(),
        path: path.clone(),
        message: message.to_string(),
    };
    let flags = usize::from(raw.terminal) + usize::from(raw.foot) + usize::from(raw.subst.is_some());
    if flags > 1 {
        return Err(malformed("node is marked with more than one of terminal/foot/subst"));
    }
    let role = if raw.terminal {
        NodeRole::Terminal
    } else if raw.foot {
        NodeRole::Foot
    } else if raw.subst.is_some() {
        NodeRole::Substitution
    } else {
        NodeRole::Internal
    };
    match role {
        NodeRole::Internal if raw.children.is_empty() => return Err(malformed("internal node without children")),
        NodeRole::Terminal | NodeRole::Foot | NodeRole::Substitution if !raw.children.is_empty() => {
            return Err(malformed("leaf node with children"))
        }
        NodeRole::Foot if kind == TreeKind::Initial => {
            return Err(GrammarError::FootCount {
                tree: tree.to_string(),
                message: "initial tree contains a foot node".into(),
            })
        }
        NodeRole::Terminal | NodeRole::Substitution if raw.adj.is_some() => {
            return Err(malformed("adjunction constraint on a terminal or substitution node"))
        }
        NodeRole::Substitution if raw.subst.as_ref().is_some_and(|s| s.is_empty()) => {
            return Err(malformed("empty substitution set"))
        }
        _ => {}
    }
    let id = NodeId(nodes.len());
    nodes.push(TreeNode {
        label: raw.label,
        role,
        children: Vec::new(),
        adj: AdjConstraint::null(),
        subst: BTreeSet::new(),
        explicit_adj: false,
        synthetic: raw.synthetic,
    });
    extra.push(Pending {
        path: path.clone(),
        subst: raw.subst.unwrap_or_default(),
        adj: raw.adj,
        wrap: raw.wrap,
    });
    let mut children = Vec::with_capacity(raw.children.len());
    for (i, child) in raw.children.into_iter().enumerate() {
        children.push(flatten(tree, kind, child, format!("{path}/{i}"), nodes, extra)?);
    }
    nodes[id.0].children = children;
    Ok(id)
}

/// Writes a grammar in the file format accepted by [`parse_grammar`].
/// Adjunction clauses are written only where the source had one.
pub fn serialize_grammar(grammar: &Grammar) -> String {
    let raw = RawGrammar {
        start: grammar.start.clone(),
        trees: grammar
            .trees
            .iter()
            .map(|t| RawTree {
                name: t.name.clone(),
                kind: match t.kind {
                    TreeKind::Initial => RawKind::Initial,
                    TreeKind::Auxiliary => RawKind::Auxiliary,
                },
                root: raw_node(&|id| grammar.tree(id).name.clone(), t, t.root()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("grammar serialization cannot fail")
}

/// Tree in file form, with tree references rendered by `name`. Used for dumps
/// of tree sets that are not themselves a parseable grammar.
pub(crate) fn tree_to_json(tree: &ElementaryTree, name: &dyn Fn(TreeId) -> String) -> serde_json::Value {
    let kind = match tree.kind {
        TreeKind::Initial => RawKind::Initial,
        TreeKind::Auxiliary => RawKind::Auxiliary,
    };
    serde_json::to_value(RawTree {
        name: tree.name.clone(),
        kind,
        root: raw_node(name, tree, tree.root()),
    })
    .expect("tree serialization cannot fail")
}

fn raw_node(name: &dyn Fn(TreeId) -> String, tree: &ElementaryTree, id: NodeId) -> RawNode {
    let node = tree.node(id);
    let names = |set: &BTreeSet<TreeId>| -> Vec<String> { set.iter().map(|t| name(*t)).collect() };
    RawNode {
        label: node.label.clone(),
        terminal: node.role == NodeRole::Terminal,
        foot: node.role == NodeRole::Foot,
        subst: (node.role == NodeRole::Substitution).then(|| names(&node.subst)),
        adj: node.explicit_adj.then(|| RawAdj {
            allowed: names(&node.adj.allowed),
            nil: node.adj.allows_nil,
        }),
        synthetic: node.synthetic,
        wrap: tree.wrap_node == Some(id),
        children: node.children.iter().map(|&c| raw_node(name, tree, c)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "start": "S", "trees": [
        { "name": "alpha", "kind": "initial",
          "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } } ] }"#;

    #[test]
    fn minimal_grammar() {
        let g = parse_grammar(MINIMAL).unwrap();
        assert_eq!(g.initials().count(), 1);
        assert_eq!(g.auxiliaries().count(), 0);
        assert_eq!(g.terminals.iter().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_grammar("{ \"start\": \"S\",\n  \"trees\": [ }").unwrap_err();
        match err {
            GrammarError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn foot_root_mismatch() {
        let text = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } },
            { "name": "beta", "kind": "auxiliary",
              "root": { "label": "S", "children": [
                 { "label": "b", "terminal": true }, { "label": "A", "foot": true } ] } } ] }"#;
        assert!(matches!(
            parse_grammar(text),
            Err(GrammarError::FootRootMismatch { .. })
        ));
    }

    #[test]
    fn unresolved_and_duplicate_names() {
        let unresolved = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "adj": { "allowed": ["nope"], "nil": true },
                        "children": [ { "label": "a", "terminal": true } ] } } ] }"#;
        assert!(matches!(
            parse_grammar(unresolved),
            Err(GrammarError::UnresolvedName { .. })
        ));
        let duplicate = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } },
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "b", "terminal": true } ] } } ] }"#;
        assert_eq!(
            parse_grammar(duplicate),
            Err(GrammarError::DuplicateName("alpha".into()))
        );
    }

    #[test]
    fn foot_count_violations() {
        let two_feet = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } },
            { "name": "beta", "kind": "auxiliary",
              "root": { "label": "S", "children": [
                 { "label": "S", "foot": true }, { "label": "b", "terminal": true },
                 { "label": "S", "foot": true } ] } } ] }"#;
        assert!(matches!(parse_grammar(two_feet), Err(GrammarError::FootCount { .. })));
        let initial_foot = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [
                 { "label": "a", "terminal": true }, { "label": "S", "foot": true } ] } } ] }"#;
        assert!(matches!(
            parse_grammar(initial_foot),
            Err(GrammarError::FootCount { .. })
        ));
    }

    #[test]
    fn default_adjunction_covers_matching_auxiliaries() {
        let text = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "s", "terminal": true } ] } },
            { "name": "left", "kind": "auxiliary",
              "root": { "label": "S", "children": [
                 { "label": "l", "terminal": true }, { "label": "S", "foot": true } ] } },
            { "name": "other", "kind": "auxiliary",
              "root": { "label": "T", "children": [
                 { "label": "t", "terminal": true }, { "label": "T", "foot": true } ] } } ] }"#;
        let g = parse_grammar(text).unwrap();
        let root = g.tree(TreeId(0)).node(NodeId(0));
        assert_eq!(root.adj.allowed.iter().collect::<Vec<_>>(), [&TreeId(1)]);
        assert!(root.adj.allows_nil);
        assert!(!root.explicit_adj);
    }

    #[test]
    fn alphabet_clash_and_start() {
        let clash = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "S", "terminal": true } ] } } ] }"#;
        assert!(matches!(parse_grammar(clash), Err(GrammarError::AlphabetClash(_))));
        let no_start = r#"{ "start": "T", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } } ] }"#;
        assert!(matches!(parse_grammar(no_start), Err(GrammarError::NoStartTree(_))));
    }

    #[test]
    fn lexically_empty_auxiliary_is_rejected() {
        let text = r#"{ "start": "S", "trees": [
            { "name": "alpha", "kind": "initial",
              "root": { "label": "S", "children": [ { "label": "a", "terminal": true } ] } },
            { "name": "beta", "kind": "auxiliary",
              "root": { "label": "S", "children": [ { "label": "S", "foot": true } ] } } ] }"#;
        assert!(matches!(parse_grammar(text), Err(GrammarError::EmptyAuxiliary(_))));
    }
}
