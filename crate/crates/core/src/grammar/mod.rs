//! Tree Adjoining Grammar object model.
//!
//! A [`Grammar`] owns a flat list of elementary trees. Every tree stores its
//! nodes in preorder, so the root is always node 0 and a tree serializes and
//! re-parses to the same node numbering.

mod classify;
mod format;
mod normalize;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use classify::{classify_tree, compute_spine, find_wrapping_node, TreeClass};
pub(crate) use format::tree_to_json;
pub use format::{parse_grammar, serialize_grammar};
pub use normalize::{binarize_grammar, normalize};
pub use validate::{validate_restriction, Condition, Severity, ValidationReport, Violation};

use thiserror::Error;

/// Index of an elementary tree inside its grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeId(pub usize);

/// Index of a node inside its elementary tree (preorder position).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// Grammar-wide node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub tree: TreeId,
    pub node: NodeId,
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Internal,
    Terminal,
    Foot,
    Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Initial,
    Auxiliary,
}

/// Selective adjunction constraint: which auxiliary trees may adjoin at a node,
/// and whether adjunction there is optional.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AdjConstraint {
    pub allowed: BTreeSet<TreeId>,
    pub allows_nil: bool,
}

impl AdjConstraint {
    /// No adjunction possible, none required.
    pub fn null() -> Self {
        AdjConstraint {
            allowed: BTreeSet::new(),
            allows_nil: true,
        }
    }

    pub fn is_null(&self) -> bool {
        self.allowed.is_empty() && self.allows_nil
    }

    /// `|Adj(N)|`: allowed trees plus one for nil.
    pub fn size(&self) -> usize {
        self.allowed.len() + usize::from(self.allows_nil)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: String,
    pub role: NodeRole,
    pub children: Vec<NodeId>,
    pub adj: AdjConstraint,
    /// Initial trees that may be substituted here; empty unless `role` is
    /// [`NodeRole::Substitution`].
    pub subst: BTreeSet<TreeId>,
    /// Whether `adj` came from an explicit clause in the grammar file.
    pub explicit_adj: bool,
    /// Inserted by normalization.
    pub synthetic: bool,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Nodes at which adjunction is meaningful.
    pub fn hosts_adjunction(&self) -> bool {
        matches!(self.role, NodeRole::Internal | NodeRole::Foot)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryTree {
    pub name: String,
    pub kind: TreeKind,
    /// Preorder node table; the root is `NodeId(0)`.
    pub nodes: Vec<TreeNode>,
    pub foot: Option<NodeId>,
    /// Wrapping node designated by normalization (wrapping trees only).
    pub wrap_node: Option<NodeId>,
}

impl ElementaryTree {
    pub const ROOT: NodeId = NodeId(0);

    pub fn root(&self) -> NodeId {
        Self::ROOT
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn root_label(&self) -> &str {
        &self.nodes[0].label
    }

    pub fn is_auxiliary(&self) -> bool {
        self.kind == TreeKind::Auxiliary
    }

    /// Parent table, `None` for the root.
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parents = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parents[c.0] = Some(NodeId(i));
            }
        }
        parents
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<NodeId> {
        // preorder visits leaves in left-to-right order
        (0..self.nodes.len())
            .map(NodeId)
            .filter(|&id| self.node(id).is_leaf())
            .collect()
    }

    /// Terminal labels from left to right, foot and substitution slots skipped.
    pub fn terminal_yield(&self) -> Vec<&str> {
        self.leaves()
            .into_iter()
            .filter(|&id| self.node(id).role == NodeRole::Terminal)
            .map(|id| self.node(id).label.as_str())
            .collect()
    }

    /// Rebuilds the node table in preorder starting at `root`, dropping
    /// unreachable nodes. Returns the old-to-new id mapping.
    pub(crate) fn renumber_from(&mut self, root: NodeId) -> BTreeMap<NodeId, NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            order.push(id);
            for &c in self.nodes[id.0].children.iter().rev() {
                stack.push(c);
            }
        }
        let map: BTreeMap<NodeId, NodeId> = order.iter().enumerate().map(|(new, &old)| (old, NodeId(new))).collect();
        let nodes = order
            .iter()
            .map(|old| {
                let mut n = self.nodes[old.0].clone();
                for c in &mut n.children {
                    *c = map[c];
                }
                n
            })
            .collect();
        self.nodes = nodes;
        self.foot = self.foot.and_then(|f| map.get(&f).copied());
        self.wrap_node = self.wrap_node.and_then(|w| map.get(&w).copied());
        map
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub start: String,
    pub trees: Vec<ElementaryTree>,
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
}

impl Grammar {
    pub fn tree(&self, id: TreeId) -> &ElementaryTree {
        &self.trees[id.0]
    }

    pub fn node(&self, r: NodeRef) -> &TreeNode {
        self.trees[r.tree.0].node(r.node)
    }

    pub fn tree_ids(&self) -> impl Iterator<Item = TreeId> + '_ {
        (0..self.trees.len()).map(TreeId)
    }

    pub fn initials(&self) -> impl Iterator<Item = TreeId> + '_ {
        self.tree_ids().filter(|&t| self.tree(t).kind == TreeKind::Initial)
    }

    pub fn auxiliaries(&self) -> impl Iterator<Item = TreeId> + '_ {
        self.tree_ids().filter(|&t| self.tree(t).kind == TreeKind::Auxiliary)
    }

    pub fn tree_by_name(&self, name: &str) -> Option<TreeId> {
        self.trees.iter().position(|t| t.name == name).map(TreeId)
    }

    /// `|G| = Σ_N (1 + |Adj(N)|)` over every node of every elementary tree.
    pub fn size(&self) -> GrammarSize {
        let value = self
            .trees
            .iter()
            .flat_map(|t| t.nodes.iter())
            .map(|n| 1 + n.adj.size())
            .sum();
        GrammarSize(value)
    }

    /// Drops the nodes normalization introduced, splicing their children back
    /// into place. The result is what the grammar file looked like before
    /// normalization.
    pub fn strip_synthetic(&self) -> Grammar {
        let mut g = self.clone();
        for tree in &mut g.trees {
            strip_tree(tree);
        }
        g
    }
}

fn strip_tree(tree: &mut ElementaryTree) {
    // synthetic root above the real root
    let mut root = NodeId(0);
    while tree.nodes[root.0].synthetic && tree.nodes[root.0].children.len() == 1 {
        root = tree.nodes[root.0].children[0];
    }
    // synthetic foot below a node that used to be the foot
    if let Some(f) = tree.foot {
        if tree.nodes[f.0].synthetic {
            let parents = tree.parents();
            if let Some(p) = parents[f.0] {
                let pn = &mut tree.nodes[p.0];
                if pn.children.len() == 1 {
                    pn.children.clear();
                    pn.role = NodeRole::Foot;
                    tree.foot = Some(p);
                }
            }
        }
    }
    fn splice(nodes: &[TreeNode], id: NodeId, out: &mut Vec<NodeId>) {
        if nodes[id.0].synthetic && !nodes[id.0].is_leaf() {
            for &c in &nodes[id.0].children {
                splice(nodes, c, out);
            }
        } else {
            out.push(id);
        }
    }
    for i in 0..tree.nodes.len() {
        let mut kids = Vec::new();
        for &c in &tree.nodes[i].children {
            splice(&tree.nodes, c, &mut kids);
        }
        tree.nodes[i].children = kids;
    }
    tree.wrap_node = None;
    tree.renumber_from(root);
}

/// Grammar size as used for the grammar-dependent running-time factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrammarSize(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{tree}: malformed node {path}: {message}")]
    Malformed {
        tree: String,
        path: String,
        message: String,
    },
    #[error("unresolved tree name `{name}` referenced from {tree}")]
    UnresolvedName { tree: String, name: String },
    #[error("duplicate tree name `{0}`")]
    DuplicateName(String),
    #[error("{tree}: {message}")]
    FootCount { tree: String, message: String },
    #[error("{tree}: foot/root label mismatch (root `{root}`, foot `{foot}`)")]
    FootRootMismatch { tree: String, root: String, foot: String },
    #[error("{tree} {node}: `{target}` cannot be used here, root label `{found}` differs from `{expected}`")]
    LabelMismatch {
        tree: String,
        node: NodeId,
        target: String,
        expected: String,
        found: String,
    },
    #[error("symbol `{0}` is used both as a terminal and as a nonterminal")]
    AlphabetClash(String),
    #[error("no initial tree is rooted in the start symbol `{0}`")]
    NoStartTree(String),
    #[error("auxiliary tree {0} has no lexical material besides its foot")]
    EmptyAuxiliary(String),
    #[error("{tree} {node}: leaf labeled by the empty string")]
    EpsilonLeaf { tree: String, node: NodeId },
    #[error("{tree}: {message} (condition {condition})")]
    RestrictionViolation {
        tree: String,
        condition: Condition,
        message: String,
    },
    #[error("{0} is not an auxiliary tree")]
    NotAuxiliary(String),
}
