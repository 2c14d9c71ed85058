//! Brute-force oracle: closes the set of partial derived trees under single
//! substitutions and adjunctions and collects the yields of the complete ones.
//!
//! A partial derived tree is kept as its frontier with brackets around the
//! nodes that may still take an adjunction. Nodes that can neither take an
//! adjunction nor require one leave no trace. Two derived trees with the same
//! bracketed frontier have the same futures, so deduplicating on it loses no
//! yield.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::grammar::{Grammar, NodeId, NodeRole, TreeId, TreeNode};

use super::OracleError;

/// Longest yield [`enumerate_yields`] will look for.
pub const MAX_ENUM_LEN: usize = 16;
/// Default bound on the number of distinct partial trees visited.
pub const DEFAULT_FRONTIER_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sym {
    Term(u16),
    /// Substitution node awaiting an initial tree.
    Slot(u32),
    /// Start of the subtree of an adjunction site.
    Open(u32),
    Close,
    /// Where the excised subtree goes in an auxiliary tree's template.
    Hole,
}

struct Site {
    allowed: Vec<TreeId>,
    nil: bool,
    subst: Vec<TreeId>,
}

struct Enumerator {
    sites: Vec<Site>,
    templates: Vec<Vec<Sym>>,
    starts: Vec<TreeId>,
    terminals: Vec<String>,
}

impl Enumerator {
    fn new(g: &Grammar) -> Self {
        let terminals: Vec<String> = g.terminals.iter().cloned().collect();
        let mut sites = Vec::new();
        let mut templates = Vec::new();
        for tree in &g.trees {
            let base = sites.len() as u32;
            for node in &tree.nodes {
                sites.push(Site {
                    allowed: node.adj.allowed.iter().copied().collect(),
                    nil: node.adj.allows_nil,
                    subst: node.subst.iter().copied().collect(),
                });
            }
            let mut out = Vec::new();
            emit(&tree.nodes, base, NodeId(0), &terminals, &mut out);
            templates.push(out);
        }
        let starts = g.initials().filter(|&t| g.tree(t).root_label() == g.start).collect();
        Enumerator {
            sites,
            templates,
            starts,
            terminals,
        }
    }

    fn size(s: &[Sym]) -> usize {
        s.iter().filter(|x| matches!(x, Sym::Term(_) | Sym::Slot(_))).count()
    }

    fn complete(&self, s: &[Sym]) -> bool {
        s.iter().all(|x| match x {
            Sym::Slot(_) => false,
            Sym::Open(g) => self.sites[*g as usize].nil,
            _ => true,
        })
    }

    fn successors(&self, s: &[Sym], out: &mut Vec<Vec<Sym>>) {
        for (k, sym) in s.iter().enumerate() {
            match *sym {
                Sym::Slot(g) => {
                    for a in &self.sites[g as usize].subst {
                        let mut next = Vec::with_capacity(s.len() + self.templates[a.0].len());
                        next.extend_from_slice(&s[..k]);
                        next.extend_from_slice(&self.templates[a.0]);
                        next.extend_from_slice(&s[k + 1..]);
                        out.push(next);
                    }
                }
                Sym::Open(g) => {
                    let allowed = &self.sites[g as usize].allowed;
                    if allowed.is_empty() {
                        continue;
                    }
                    let e = matching_close(s, k);
                    for b in allowed {
                        let mut next = Vec::with_capacity(s.len() + self.templates[b.0].len());
                        next.extend_from_slice(&s[..k]);
                        for t in &self.templates[b.0] {
                            if *t == Sym::Hole {
                                next.extend_from_slice(&s[k + 1..e]);
                            } else {
                                next.push(*t);
                            }
                        }
                        next.extend_from_slice(&s[e + 1..]);
                        out.push(next);
                    }
                }
                _ => {}
            }
        }
    }

    fn run(&self, max_len: usize, cap: usize) -> Result<BTreeSet<Vec<String>>, OracleError> {
        let mut yields = BTreeSet::new();
        if max_len == 0 {
            return Ok(yields);
        }
        let mut seen: HashSet<Vec<Sym>> = HashSet::new();
        let mut queue = VecDeque::new();
        for a in &self.starts {
            let t = self.templates[a.0].clone();
            if Self::size(&t) <= max_len && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
        let mut next = Vec::new();
        while let Some(s) = queue.pop_front() {
            if self.complete(&s) {
                yields.insert(
                    s.iter()
                        .filter_map(|x| match x {
                            Sym::Term(t) => Some(self.terminals[*t as usize].clone()),
                            _ => None,
                        })
                        .collect(),
                );
            }
            self.successors(&s, &mut next);
            for t in next.drain(..) {
                if Self::size(&t) <= max_len && !seen.contains(&t) {
                    if seen.len() >= cap {
                        return Err(OracleError::BudgetExceeded { cap });
                    }
                    seen.insert(t.clone());
                    queue.push_back(t);
                }
            }
        }
        Ok(yields)
    }
}

fn emit(nodes: &[TreeNode], base: u32, id: NodeId, terminals: &[String], out: &mut Vec<Sym>) {
    let node = &nodes[id.0];
    let site = base + id.0 as u32;
    match node.role {
        NodeRole::Terminal => {
            let t = terminals.binary_search(&node.label).expect("terminal in alphabet");
            out.push(Sym::Term(t as u16));
        }
        NodeRole::Substitution => out.push(Sym::Slot(site)),
        NodeRole::Foot | NodeRole::Internal => {
            let bracket = !node.adj.is_null();
            if bracket {
                out.push(Sym::Open(site));
            }
            if node.role == NodeRole::Foot {
                out.push(Sym::Hole);
            }
            for &c in &node.children {
                emit(nodes, base, c, terminals, out);
            }
            if bracket {
                out.push(Sym::Close);
            }
        }
    }
}

fn matching_close(s: &[Sym], open: usize) -> usize {
    let mut depth = 0usize;
    for (k, x) in s.iter().enumerate().skip(open) {
        match x {
            Sym::Open(_) => depth += 1,
            Sym::Close => {
                depth -= 1;
                if depth == 0 {
                    return k;
                }
            }
            _ => {}
        }
    }
    unreachable!("brackets are balanced")
}

/// All yields of complete derived trees with at most `max_len` tokens.
pub fn enumerate_yields(grammar: &Grammar, max_len: usize) -> Result<BTreeSet<Vec<String>>, OracleError> {
    enumerate_yields_with_cap(grammar, max_len, DEFAULT_FRONTIER_CAP)
}

/// [`enumerate_yields`] with an explicit bound on visited partial trees.
pub fn enumerate_yields_with_cap(
    grammar: &Grammar,
    max_len: usize,
    cap: usize,
) -> Result<BTreeSet<Vec<String>>, OracleError> {
    if max_len > MAX_ENUM_LEN {
        return Err(OracleError::MaxLen(max_len));
    }
    Enumerator::new(grammar).run(max_len, cap)
}
