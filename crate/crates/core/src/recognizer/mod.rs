//! Tabular recognizer for the restricted class, working on the transformed
//! grammar.
//!
//! Node items carry two input positions; the only four-position items are
//! those recording the adjunction of a wrapping tree at a wrapping node. That
//! is what brings the worst case down from `n^6` to `n^5`.

mod chart;
mod stats;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use thiserror::Error;

use crate::grammar::{compute_spine, NodeId, NodeRole};
use crate::transform::{Host, SplitKind, TransformedGrammar};

pub use chart::{Chart, Discipline, Item, NodeItem, State, WrapItem, WrapTag};
pub use stats::{RecognitionStats, RuleId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("input of {0} tokens is too long")]
    TooLong(usize),
}

#[derive(Clone, Debug, Default)]
struct CNode {
    parent: Option<u32>,
    /// Children of the parent are `[self, other]` (true) or `[other, self]`.
    is_left: bool,
    children: Vec<u32>,
    /// Node lies on the spine of an auxiliary tree, so its items may be empty.
    dominates_foot: bool,
    hosts: bool,
    /// Roots of the left/right trees that may adjoin here.
    left: Vec<u32>,
    right: Vec<u32>,
    /// Wrapping trees (by wrap index) that may adjoin here.
    wrapping: Vec<u32>,
    nil: bool,
    /// Set on roots of left/right trees: nodes admitting that tree.
    left_hosts: Vec<u32>,
    right_hosts: Vec<u32>,
    /// Set on roots of initial trees: substitution nodes accepting the tree.
    subst_into: Vec<u32>,
    /// Set on the roots of the four halves of a wrapping tree.
    wrap_role: Option<(u32, SplitKind)>,
}

#[derive(Clone, Debug, Default)]
struct CWrap {
    lu: u32,
    ru: u32,
    ld: u32,
    rd: u32,
    /// Wrapping trees that may adjoin at this tree's wrapping node.
    allowed: Vec<u32>,
    nil: bool,
    /// Wrapping trees whose wrapping node admits this tree.
    users: Vec<u32>,
    /// Nodes outside wrapping nodes that admit this tree.
    hosts: Vec<u32>,
}

/// Compiled form of a transformed grammar, reusable across inputs.
#[derive(Clone, Debug)]
pub struct Recognizer<'g> {
    tg: &'g TransformedGrammar,
    nodes: Vec<CNode>,
    refs: Vec<(Host, NodeId)>,
    wraps: Vec<CWrap>,
    symbols: HashMap<String, u32>,
    terminals: Vec<Vec<u32>>,
    feet: Vec<u32>,
    accept_roots: Vec<u32>,
}

/// Result of one run, with the final chart kept for inspection.
#[derive(Debug)]
pub struct Outcome {
    pub accepted: bool,
    pub stats: RecognitionStats,
    pub chart: Chart,
}

impl<'g> Recognizer<'g> {
    pub fn new(tg: &'g TransformedGrammar) -> Self {
        let hosts = tg.hosts();
        let mut base: BTreeMap<Host, u32> = BTreeMap::new();
        let mut refs = Vec::new();
        for &h in &hosts {
            base.insert(h, refs.len() as u32);
            for n in 0..tg.host_tree(h).nodes.len() {
                refs.push((h, NodeId(n)));
            }
        }
        let cid = |h: Host, n: NodeId| base[&h] + n.0 as u32;
        let mut nodes = vec![CNode::default(); refs.len()];

        let mut side_root = BTreeMap::new();
        let wrap_ids: BTreeMap<_, u32> = tg.wrapping_trees().enumerate().map(|(i, t)| (t, i as u32)).collect();
        let mut wraps = vec![CWrap::default(); wrap_ids.len()];
        for (i, s) in tg.split_trees.iter().enumerate() {
            let root = cid(Host::Split(i), NodeId(0));
            match s.kind {
                SplitKind::L | SplitKind::R => {
                    side_root.insert(s.source, root);
                }
                kind => {
                    let w = wrap_ids[&s.source];
                    nodes[root as usize].wrap_role = Some((w, kind));
                    let slot = match kind {
                        SplitKind::LU => &mut wraps[w as usize].lu,
                        SplitKind::RU => &mut wraps[w as usize].ru,
                        SplitKind::LD => &mut wraps[w as usize].ld,
                        _ => &mut wraps[w as usize].rd,
                    };
                    *slot = root;
                }
            }
            for n in compute_spine(&s.tree).expect("split trees are auxiliary") {
                nodes[cid(Host::Split(i), n) as usize].dominates_foot = true;
            }
        }
        for (t, e) in &tg.wrap_table {
            let w = wrap_ids[t];
            wraps[w as usize].nil = e.allows_nil;
            for b in &e.allowed {
                let b = wrap_ids[b];
                wraps[w as usize].allowed.push(b);
                wraps[b as usize].users.push(w);
            }
        }

        let mut symbols = HashMap::new();
        for (k, t) in tg.base.terminals.iter().enumerate() {
            symbols.insert(t.clone(), k as u32);
        }
        let mut terminals = vec![Vec::new(); symbols.len()];
        let mut feet = Vec::new();
        let mut accept_roots = Vec::new();
        for &h in &hosts {
            let tree = tg.host_tree(h);
            let adj = &tg.adj_map[&h];
            if let Host::Initial(_) = h {
                if tree.root_label() == tg.base.start {
                    accept_roots.push(cid(h, NodeId(0)));
                }
            }
            for (n, node) in tree.nodes.iter().enumerate() {
                let c = cid(h, NodeId(n));
                for (k, &child) in node.children.iter().enumerate() {
                    let cc = cid(h, child) as usize;
                    nodes[cc].parent = Some(c);
                    nodes[cc].is_left = k == 0;
                }
                let cn = &mut nodes[c as usize];
                cn.children = node.children.iter().map(|&k| cid(h, k)).collect();
                match node.role {
                    NodeRole::Terminal => terminals[symbols[&node.label] as usize].push(c),
                    NodeRole::Foot if matches!(h, Host::Split(_)) => feet.push(c),
                    _ => {}
                }
                if !node.hosts_adjunction() {
                    continue;
                }
                cn.hosts = true;
                let a = &adj[n];
                cn.nil = a.nil;
                cn.left = a.left.iter().map(|b| side_root[b]).collect();
                cn.right = a.right.iter().map(|b| side_root[b]).collect();
                cn.wrapping = a.wrapping.iter().map(|b| wrap_ids[b]).collect();
            }
        }
        for c in 0..nodes.len() {
            let (left, right, wrapping) = (nodes[c].left.clone(), nodes[c].right.clone(), nodes[c].wrapping.clone());
            for r in left {
                nodes[r as usize].left_hosts.push(c as u32);
            }
            for r in right {
                nodes[r as usize].right_hosts.push(c as u32);
            }
            for w in wrapping {
                wraps[w as usize].hosts.push(c as u32);
            }
        }
        for &h in &hosts {
            for (n, node) in tg.host_tree(h).nodes.iter().enumerate() {
                for &alpha in &node.subst {
                    let root = cid(Host::Initial(alpha), NodeId(0));
                    nodes[root as usize].subst_into.push(cid(h, NodeId(n)));
                }
            }
        }
        Recognizer {
            tg,
            nodes,
            refs,
            wraps,
            symbols,
            terminals,
            feet,
            accept_roots,
        }
    }

    pub fn grammar(&self) -> &TransformedGrammar {
        self.tg
    }

    /// Tree and node a compiled node index stands for.
    pub fn node_ref(&self, node: u32) -> (Host, NodeId) {
        self.refs[node as usize]
    }

    pub fn node_id(&self, host: Host, node: NodeId) -> Option<u32> {
        self.refs.iter().position(|&r| r == (host, node)).map(|c| c as u32)
    }

    fn symbolize<S: AsRef<str>>(&self, input: &[S]) -> Result<Vec<u32>, RecognizeError> {
        if input.len() >= u16::MAX as usize {
            return Err(RecognizeError::TooLong(input.len()));
        }
        input
            .iter()
            .enumerate()
            .map(|(k, t)| {
                self.symbols
                    .get(t.as_ref())
                    .copied()
                    .ok_or_else(|| RecognizeError::UnknownToken {
                        token: t.as_ref().to_string(),
                        position: k + 1,
                    })
            })
            .collect()
    }

    pub fn run<S: AsRef<str>>(&self, input: &[S], discipline: Discipline) -> Result<Outcome, RecognizeError> {
        let started = Instant::now();
        let syms = self.symbolize(input)?;
        let n = syms.len() as u16;
        let track = self
            .nodes
            .iter()
            .map(|c| matches!(c.wrap_role, Some((_, SplitKind::LD | SplitKind::RD))))
            .collect();
        let mut run = Run {
            chart: Chart::new(discipline, track),
            counts: [0; 14],
            out: Vec::new(),
        };
        // no ε leaves, so nothing derives the empty string
        if n > 0 {
            self.seed_axioms(&mut run, &syms);
            while let Some(item) = run.chart.pop() {
                match item {
                    Item::Node(x) => {
                        self.step1(&mut run, x);
                        self.step2_node(&mut run, x);
                        self.step3_node(&mut run, x);
                    }
                    Item::Wrap(w) => self.on_wrap(&mut run, w),
                }
                run.flush(self);
            }
        }
        let accepted = n > 0
            && self.accept_roots.iter().any(|&r| {
                run.chart.is_processed(&Item::Node(NodeItem {
                    node: r,
                    state: State::T,
                    i: 0,
                    j: n,
                }))
            });
        let mut stats = RecognitionStats {
            accepted,
            ..Default::default()
        };
        for (r, &c) in RuleId::ALL.iter().zip(&run.counts) {
            stats.rule_applications.insert(r.code().to_string(), c);
        }
        const KINDS: [&str; 7] = [
            "node-B",
            "node-M",
            "node-T",
            "wrap-LD",
            "wrap-RD",
            "wrap-RU",
            "wrap-Full",
        ];
        let mut by_kind = [0u64; 7];
        for item in run.chart.items() {
            let k = match item {
                Item::Node(x) => x.state as usize,
                Item::Wrap(w) => 3 + w.tag as usize,
            };
            by_kind[k] += 1;
        }
        for (name, c) in KINDS.iter().zip(by_kind) {
            if c > 0 {
                stats.items_by_kind.insert(name.to_string(), c);
            }
        }
        stats.wall_time = started.elapsed();
        Ok(Outcome {
            accepted,
            stats,
            chart: run.chart,
        })
    }

    fn seed_axioms(&self, run: &mut Run, syms: &[u32]) {
        for (k, &s) in syms.iter().enumerate() {
            for &leaf in &self.terminals[s as usize] {
                run.emit(RuleId::Lexical, node(leaf, State::T, k as u16, k as u16 + 1));
            }
        }
        for &f in &self.feet {
            for i in 0..=syms.len() as u16 {
                run.emit(RuleId::FootAxiom, node(f, State::B, i, i));
            }
        }
        run.flush(self);
    }

    /// Substitution and bottom-up combination of children.
    fn step1(&self, run: &mut Run, x: NodeItem) {
        if x.state != State::T {
            return;
        }
        let c = &self.nodes[x.node as usize];
        for &s in &c.subst_into {
            run.emit(RuleId::Substitution, node(s, State::T, x.i, x.j));
        }
        let Some(p) = c.parent else { return };
        let parent = &self.nodes[p as usize];
        if parent.children.len() == 1 {
            run.emit(RuleId::Unary, node(p, State::B, x.i, x.j));
        } else if c.is_left {
            for &e in run.chart.ends(parent.children[1], State::T, x.j) {
                run.out.push((Some(RuleId::Binary), node(p, State::B, x.i, e)));
            }
        } else {
            for &s in run.chart.starts(parent.children[0], State::T, x.i) {
                run.out.push((Some(RuleId::Binary), node(p, State::B, s, x.j)));
            }
        }
    }

    /// Wrapping adjunction at wrapping nodes, triggered by a half-tree root.
    fn step2_node(&self, run: &mut Run, x: NodeItem) {
        let Some((w, kind)) = self.nodes[x.node as usize].wrap_role else {
            return;
        };
        let wr = &self.wraps[w as usize];
        let chart = &run.chart;
        let out = &mut run.out;
        match (kind, x.state) {
            (SplitKind::LD, State::B) => {
                // ⟨R_LD^B, k, p⟩ + ⟨β', i, k, q, j⟩
                let (k, p) = (x.i, x.j);
                for &b in &wr.allowed {
                    for &[i, _, q, j] in chart.wraps_at(b, WrapTag::Full, k) {
                        if p < q {
                            out.push((Some(RuleId::WrapLd), wrap(w, WrapTag::LD, i, p, q, j)));
                        }
                    }
                }
            }
            (SplitKind::RD, State::B) => {
                // ⟨R_RD^B, q, k⟩ + ⟨[β,LD], i, p, k, j⟩
                let (q, k) = (x.i, x.j);
                for &[i, p, _, j] in chart.wraps_at(w, WrapTag::LD, k) {
                    if p < q {
                        out.push((Some(RuleId::WrapRd), wrap(w, WrapTag::RD, i, p, q, j)));
                    }
                }
            }
            (SplitKind::RU, State::T) => {
                // ⟨R_RU^T, k, j⟩ + ⟨[β,RD], i, p, q, k⟩
                let (k, j) = (x.i, x.j);
                for &[i, p, q, _] in chart.wraps_at(w, WrapTag::RD, k) {
                    out.push((Some(RuleId::WrapRu), wrap(w, WrapTag::RU, i, p, q, j)));
                }
            }
            (SplitKind::LU, State::T) => {
                // ⟨R_LU^T, i, k⟩ + ⟨[β,RU], k, p, q, j⟩
                let (i, k) = (x.i, x.j);
                for &[_, p, q, j] in chart.wraps_at(w, WrapTag::RU, k) {
                    out.push((Some(RuleId::WrapLu), wrap(w, WrapTag::Full, i, p, q, j)));
                }
            }
            (SplitKind::LD, State::T) if wr.nil => {
                let (i, p) = (x.i, x.j);
                for &(q, j) in chart.t_spans(wr.rd) {
                    if p < q {
                        out.push((Some(RuleId::WrapNil), wrap(w, WrapTag::RD, i, p, q, j)));
                    }
                }
            }
            (SplitKind::RD, State::T) if wr.nil => {
                let (q, j) = (x.i, x.j);
                for &(i, p) in chart.t_spans(wr.ld) {
                    if p < q {
                        out.push((Some(RuleId::WrapNil), wrap(w, WrapTag::RD, i, p, q, j)));
                    }
                }
            }
            _ => {}
        }
    }

    /// Left, right, nil and wrapping adjunction at ordinary nodes.
    fn step3_node(&self, run: &mut Run, x: NodeItem) {
        let c = &self.nodes[x.node as usize];
        let chart = &run.chart;
        let out = &mut run.out;
        match x.state {
            State::B if c.hosts => {
                for &l in &c.left {
                    for &i in chart.starts(l, State::T, x.i) {
                        out.push((Some(RuleId::LeftAdjoin), node(x.node, State::M, i, x.j)));
                        out.push((None, node(x.node, State::T, i, x.j)));
                    }
                }
                for &r in &c.right {
                    for &j in chart.ends(r, State::T, x.j) {
                        out.push((Some(RuleId::RightAdjoin), node(x.node, State::T, x.i, j)));
                    }
                }
                if c.nil {
                    out.push((Some(RuleId::NilAdjoin), node(x.node, State::T, x.i, x.j)));
                }
                for &w in &c.wrapping {
                    for &(i, j) in chart.wraps_around(w, x.i, x.j) {
                        assert!(x.i < x.j, "wrapping adjunction over an empty foot span");
                        out.push((Some(RuleId::WrapAdjoin), node(x.node, State::T, i, j)));
                    }
                }
            }
            State::M => {
                for &r in &c.right {
                    for &j in chart.ends(r, State::T, x.j) {
                        out.push((Some(RuleId::RightAdjoin), node(x.node, State::T, x.i, j)));
                    }
                }
            }
            State::T => {
                // x is the root of a left or right tree
                for &h in &c.left_hosts {
                    for &j in chart.ends(h, State::B, x.j) {
                        out.push((Some(RuleId::LeftAdjoin), node(h, State::M, x.i, j)));
                        out.push((None, node(h, State::T, x.i, j)));
                    }
                }
                for &h in &c.right_hosts {
                    for st in [State::B, State::M] {
                        for &i in chart.starts(h, st, x.i) {
                            out.push((Some(RuleId::RightAdjoin), node(h, State::T, i, x.j)));
                        }
                    }
                }
            }
            _ => {}
        }
    }

    fn on_wrap(&self, run: &mut Run, x: WrapItem) {
        let wr = &self.wraps[x.tree as usize];
        let chart = &run.chart;
        let out = &mut run.out;
        match x.tag {
            WrapTag::Full => {
                for &h in &wr.hosts {
                    let host = node(h, State::B, x.p, x.q);
                    if chart.is_processed(&host) {
                        out.push((Some(RuleId::WrapAdjoin), node(h, State::T, x.i, x.j)));
                    }
                }
                for &b in &wr.users {
                    let ld = self.wraps[b as usize].ld;
                    for &p in chart.ends(ld, State::B, x.p) {
                        if p < x.q {
                            out.push((Some(RuleId::WrapLd), wrap(b, WrapTag::LD, x.i, p, x.q, x.j)));
                        }
                    }
                }
            }
            WrapTag::LD => {
                for &q in chart.starts(wr.rd, State::B, x.q) {
                    if x.p < q {
                        out.push((Some(RuleId::WrapRd), wrap(x.tree, WrapTag::RD, x.i, x.p, q, x.j)));
                    }
                }
            }
            WrapTag::RD => {
                for &j in chart.ends(wr.ru, State::T, x.j) {
                    out.push((Some(RuleId::WrapRu), wrap(x.tree, WrapTag::RU, x.i, x.p, x.q, j)));
                }
            }
            WrapTag::RU => {
                for &i in chart.starts(wr.lu, State::T, x.i) {
                    out.push((Some(RuleId::WrapLu), wrap(x.tree, WrapTag::Full, i, x.p, x.q, x.j)));
                }
            }
        }
    }

    fn check(&self, item: &Item) {
        match *item {
            Item::Node(x) => {
                assert!(x.i <= x.j, "node item with i > j: {x:?}");
                assert!(
                    x.i < x.j || self.nodes[x.node as usize].dominates_foot,
                    "empty item for a node without foot: {x:?}"
                );
            }
            Item::Wrap(w) => assert!(w.i <= w.p && w.p < w.q && w.q <= w.j, "wrap item out of order: {w:?}"),
        }
    }
}

struct Run {
    chart: Chart,
    counts: [u64; 14],
    /// Conclusions with the rule that produced them; `None` marks the second
    /// conclusion of a rule that has two.
    out: Vec<(Option<RuleId>, Item)>,
}

impl Run {
    fn emit(&mut self, rule: RuleId, item: Item) {
        self.out.push((Some(rule), item));
    }

    fn flush(&mut self, r: &Recognizer) {
        for (rule, item) in self.out.drain(..) {
            r.check(&item);
            if let Some(rule) = rule {
                self.counts[rule as usize] += 1;
            }
            self.chart.add(item);
        }
    }
}

fn node(node: u32, state: State, i: u16, j: u16) -> Item {
    Item::Node(NodeItem { node, state, i, j })
}

fn wrap(tree: u32, tag: WrapTag, i: u16, p: u16, q: u16, j: u16) -> Item {
    Item::Wrap(WrapItem { tree, tag, i, p, q, j })
}

/// Runs the recognizer to fixpoint. Accepts iff an initial tree rooted in the
/// start symbol spans the whole input.
pub fn recognize<S: AsRef<str>>(
    tg: &TransformedGrammar,
    input: &[S],
) -> Result<(bool, RecognitionStats), RecognizeError> {
    let out = Recognizer::new(tg).run(input, Discipline::Fifo)?;
    Ok((out.accepted, out.stats))
}

/// Whether FIFO and LIFO agendas close to the same item set.
pub fn closure_order_independent<S: AsRef<str>>(tg: &TransformedGrammar, input: &[S]) -> Result<bool, RecognizeError> {
    let r = Recognizer::new(tg);
    let a = r.run(input, Discipline::Fifo)?;
    let b = r.run(input, Discipline::Lifo)?;
    Ok(a.chart.len() == b.chart.len() && a.chart.items().all(|i| b.chart.contains(i)))
}

#[cfg(test)]
mod tests;
