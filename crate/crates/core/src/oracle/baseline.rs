//! Dense CKY-style recognizer for unrestricted TAG. Nodes that dominate a foot
//! carry four positions `(i, p, q, j)`, everything else two. Adjunction
//! combines `⟨β, i, i′, j′, j⟩` with `⟨N^B, i′, p, q, j′⟩`, six free
//! positions, so time grows with `n^6`.

use std::collections::HashMap;
use std::time::Instant;

use crate::grammar::{binarize_grammar, compute_spine, Grammar, NodeId, NodeRole, TreeKind};
use crate::recognizer::RecognitionStats;

use super::OracleError;

/// Longest input accepted; four-position tables are `(n+1)^4` bits.
pub const MAX_LEN: usize = 128;

#[derive(Clone, Debug)]
enum Shape {
    Terminal(u16),
    Foot,
    Subst(Vec<u32>),
    Unary(u32),
    Binary(u32, u32),
}

#[derive(Clone, Debug)]
struct BNode {
    shape: Shape,
    quad: bool,
    nil: bool,
    /// Roots of the auxiliary trees allowed to adjoin here.
    adjoin: Vec<u32>,
    /// Fewest terminals in any derivation below this node: total for
    /// two-position nodes, left and right of the foot for the others.
    min: u16,
    min_l: u16,
    min_r: u16,
}

impl BNode {
    fn hosts(&self) -> bool {
        matches!(self.shape, Shape::Foot | Shape::Unary(_) | Shape::Binary(..))
    }
}

const RULES: [&str; 6] = ["lexical", "foot", "substitution", "combine", "nil", "adjoin"];
const LEXICAL: usize = 0;
const FOOT: usize = 1;
const SUBST: usize = 2;
const COMBINE: usize = 3;
const NIL: usize = 4;
const ADJOIN: usize = 5;

/// Compiled baseline, reusable across inputs.
#[derive(Clone, Debug)]
pub struct Baseline {
    nodes: Vec<BNode>,
    /// Strongly connected groups of same-level dependencies, in evaluation
    /// order; `true` marks groups that must be swept to a fixpoint.
    order: Vec<(Vec<u32>, bool)>,
    accept_roots: Vec<u32>,
    terminals: HashMap<String, u16>,
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    #[inline]
    fn get(&self, k: usize) -> bool {
        self.0[k >> 6] >> (k & 63) & 1 == 1
    }
    #[inline]
    fn set(&mut self, k: usize) -> bool {
        let w = &mut self.0[k >> 6];
        let bit = 1u64 << (k & 63);
        let new = *w & bit == 0;
        *w |= bit;
        new
    }
    fn count(&self) -> u64 {
        self.0.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

struct Tables {
    m: usize,
    b: Vec<Bits>,
    t: Vec<Bits>,
    counts: [u64; 6],
}

impl Tables {
    #[inline]
    fn q(&self, i: usize, p: usize, q: usize, j: usize) -> usize {
        ((i * self.m + p) * self.m + q) * self.m + j
    }
    #[inline]
    fn d(&self, i: usize, j: usize) -> usize {
        i * self.m + j
    }
}

impl Baseline {
    pub fn new(grammar: &Grammar) -> Result<Self, OracleError> {
        let g = binarize_grammar(grammar)?;
        let terminals: HashMap<String, u16> = g
            .terminals
            .iter()
            .enumerate()
            .map(|(k, t)| (t.clone(), k as u16))
            .collect();
        let mut base = Vec::with_capacity(g.trees.len());
        let mut total = 0u32;
        for t in &g.trees {
            base.push(total);
            total += t.nodes.len() as u32;
        }
        let mut nodes = Vec::with_capacity(total as usize);
        let mut accept_roots = Vec::new();
        for (ti, t) in g.trees.iter().enumerate() {
            let spine = if t.is_auxiliary() {
                compute_spine(t)?
            } else {
                Vec::new()
            };
            let id = |n: NodeId| base[ti] + n.0 as u32;
            if t.kind == TreeKind::Initial && t.root_label() == g.start {
                accept_roots.push(base[ti]);
            }
            for (ni, node) in t.nodes.iter().enumerate() {
                let shape = match (node.role, node.children.as_slice()) {
                    (NodeRole::Terminal, _) => Shape::Terminal(terminals[&node.label]),
                    (NodeRole::Foot, _) => Shape::Foot,
                    (NodeRole::Substitution, _) => Shape::Subst(node.subst.iter().map(|a| base[a.0]).collect()),
                    (NodeRole::Internal, [c]) => Shape::Unary(id(*c)),
                    (NodeRole::Internal, [l, r]) => Shape::Binary(id(*l), id(*r)),
                    (NodeRole::Internal, kids) => unreachable!("{} children after binarization", kids.len()),
                };
                nodes.push(BNode {
                    shape,
                    quad: spine.contains(&NodeId(ni)),
                    nil: node.adj.allows_nil,
                    adjoin: node.adj.allowed.iter().map(|b| base[b.0]).collect(),
                    min: 0,
                    min_l: 0,
                    min_r: 0,
                });
            }
        }
        let mut b = Baseline {
            nodes,
            order: Vec::new(),
            accept_roots,
            terminals,
        };
        b.compute_min_yields();
        b.compute_order();
        Ok(b)
    }

    fn compute_min_yields(&mut self) {
        const INF: u16 = u16::MAX / 4;
        for n in &mut self.nodes {
            n.min = INF;
        }
        // substitution makes this a fixpoint over initial trees
        loop {
            let mut changed = false;
            for v in (0..self.nodes.len()).rev() {
                let (min, l, r) = {
                    let n = &self.nodes[v];
                    let get = |c: u32| {
                        let c = &self.nodes[c as usize];
                        (c.quad, c.min, c.min_l, c.min_r)
                    };
                    match &n.shape {
                        Shape::Terminal(_) => (1, 0, 0),
                        Shape::Foot => (0, 0, 0),
                        Shape::Subst(roots) => (
                            roots.iter().map(|&r| self.nodes[r as usize].min).min().unwrap_or(INF),
                            0,
                            0,
                        ),
                        Shape::Unary(c) => {
                            let (_, m, l, r) = get(*c);
                            (m, l, r)
                        }
                        Shape::Binary(a, b) => {
                            let (qa, ma, la, ra) = get(*a);
                            let (qb, mb, lb, rb) = get(*b);
                            if qa {
                                (0, la, (ra + mb).min(INF))
                            } else if qb {
                                (0, (ma + lb).min(INF), rb)
                            } else {
                                ((ma + mb).min(INF), 0, 0)
                            }
                        }
                    }
                };
                let n = &mut self.nodes[v];
                let (min, l, r) = if n.quad { (0, l, r) } else { (min, 0, 0) };
                if (n.min, n.min_l, n.min_r) != (min, l, r) {
                    n.min = min;
                    n.min_l = l;
                    n.min_r = r;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Orders nodes so that, within one level, every item is computed after
    /// the same-level items it depends on.
    fn compute_order(&mut self) {
        let len = self.nodes.len();
        let mut succ = vec![Vec::new(); len];
        for (v, n) in self.nodes.iter().enumerate() {
            match &n.shape {
                Shape::Unary(c) => succ[*c as usize].push(v as u32),
                Shape::Binary(a, b) => {
                    succ[*a as usize].push(v as u32);
                    succ[*b as usize].push(v as u32);
                }
                Shape::Subst(roots) => {
                    for &r in roots {
                        succ[r as usize].push(v as u32);
                    }
                }
                _ => {}
            }
            // adjunction keeps the level only when the host covers no terminal
            if n.hosts() && n.quad && n.min_l == 0 && n.min_r == 0 {
                for &r in &n.adjoin {
                    succ[r as usize].push(v as u32);
                }
            }
        }
        let mut sccs = tarjan(&succ);
        sccs.reverse();
        self.order = sccs
            .into_iter()
            .map(|c| {
                let cyclic = c.len() > 1 || succ[c[0] as usize].contains(&c[0]);
                (c, cyclic)
            })
            .collect();
    }

    pub fn recognize<S: AsRef<str>>(&self, input: &[S]) -> Result<(bool, RecognitionStats), OracleError> {
        let started = Instant::now();
        let n = input.len();
        if n > MAX_LEN {
            return Err(OracleError::TooLong(n));
        }
        let syms = input
            .iter()
            .enumerate()
            .map(|(k, s)| {
                self.terminals
                    .get(s.as_ref())
                    .copied()
                    .ok_or_else(|| OracleError::UnknownToken {
                        token: s.as_ref().to_string(),
                        position: k + 1,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = n + 1;
        let size = |quad: bool| if quad { m * m * m * m } else { m * m };
        let mut tab = Tables {
            m,
            b: self.nodes.iter().map(|v| Bits::new(size(v.quad))).collect(),
            t: self.nodes.iter().map(|v| Bits::new(size(v.quad))).collect(),
            counts: [0; 6],
        };
        let mut accepted = false;
        if n > 0 {
            for c in 0..=n {
                for (group, cyclic) in &self.order {
                    loop {
                        let mut changed = false;
                        for &v in group {
                            changed |= self.eval(&mut tab, &syms, v as usize, c);
                        }
                        if !*cyclic || !changed {
                            break;
                        }
                    }
                }
            }
            accepted = self.accept_roots.iter().any(|&r| {
                let k = tab.d(0, n);
                tab.t[r as usize].get(k)
            });
        }
        let mut stats = RecognitionStats {
            accepted,
            ..Default::default()
        };
        stats
            .items_by_kind
            .insert("B".into(), tab.b.iter().map(Bits::count).sum());
        stats
            .items_by_kind
            .insert("T".into(), tab.t.iter().map(Bits::count).sum());
        for (name, c) in RULES.iter().zip(tab.counts) {
            stats.rule_applications.insert(name.to_string(), c);
        }
        stats.wall_time = started.elapsed();
        Ok((accepted, stats))
    }

    /// Fills every item of node `v` at level `c`; returns whether any was new.
    fn eval(&self, tab: &mut Tables, syms: &[u16], v: usize, c: usize) -> bool {
        let node = &self.nodes[v];
        let n = syms.len();
        let mut changed = false;
        if !node.quad {
            if c < node.min as usize || c == 0 {
                return false;
            }
            for i in 0..=n - c {
                changed |= self.eval_pair(tab, syms, v, i, i + c);
            }
            return changed;
        }
        let (ml, mr) = (node.min_l as usize, node.min_r as usize);
        if c < ml + mr {
            return false;
        }
        for a in ml..=c - mr {
            let b = c - a;
            for i in 0..=n.saturating_sub(c) {
                let p = i + a;
                for q in p..=n - b {
                    changed |= self.eval_quad(tab, v, i, p, q, q + b);
                }
            }
        }
        changed
    }

    fn eval_pair(&self, tab: &mut Tables, syms: &[u16], v: usize, i: usize, j: usize) -> bool {
        let node = &self.nodes[v];
        let k = tab.d(i, j);
        let mut changed = false;
        match &node.shape {
            Shape::Terminal(s) => {
                if j == i + 1 {
                    tab.counts[LEXICAL] += 1;
                    if syms[i] == *s {
                        changed |= tab.t[v].set(k);
                    }
                }
                return changed;
            }
            Shape::Subst(roots) => {
                for &r in roots {
                    tab.counts[SUBST] += 1;
                    if tab.t[r as usize].get(k) {
                        changed |= tab.t[v].set(k);
                    }
                }
                return changed;
            }
            Shape::Foot => unreachable!("feet carry four positions"),
            Shape::Unary(ch) => {
                tab.counts[COMBINE] += 1;
                if tab.t[*ch as usize].get(k) {
                    changed |= tab.b[v].set(k);
                }
            }
            Shape::Binary(l, r) => {
                let (l, r) = (*l as usize, *r as usize);
                let (ml, mr) = (self.nodes[l].min as usize, self.nodes[r].min as usize);
                for s in i + ml..=j.saturating_sub(mr) {
                    tab.counts[COMBINE] += 1;
                    if tab.t[l].get(tab.d(i, s)) && tab.t[r].get(tab.d(s, j)) {
                        changed |= tab.b[v].set(k);
                    }
                }
            }
        }
        if node.nil {
            tab.counts[NIL] += 1;
            if tab.b[v].get(k) {
                changed |= tab.t[v].set(k);
            }
        }
        let inner = node.min as usize;
        for &r in &node.adjoin {
            let beta = &self.nodes[r as usize];
            let (bl, br) = (beta.min_l as usize, beta.min_r as usize);
            if j < i + bl + inner + br {
                continue;
            }
            for ii in i + bl..=j - br - inner {
                for jj in ii + inner..=j - br {
                    tab.counts[ADJOIN] += 1;
                    if tab.t[r as usize].get(tab.q(i, ii, jj, j)) && tab.b[v].get(tab.d(ii, jj)) {
                        changed |= tab.t[v].set(k);
                    }
                }
            }
        }
        changed
    }

    fn eval_quad(&self, tab: &mut Tables, v: usize, i: usize, p: usize, q: usize, j: usize) -> bool {
        let node = &self.nodes[v];
        let k = tab.q(i, p, q, j);
        let mut changed = false;
        match &node.shape {
            Shape::Foot => {
                if i == p && q == j {
                    tab.counts[FOOT] += 1;
                    changed |= tab.b[v].set(k);
                }
            }
            Shape::Unary(ch) => {
                tab.counts[COMBINE] += 1;
                if tab.t[*ch as usize].get(k) {
                    changed |= tab.b[v].set(k);
                }
            }
            Shape::Binary(l, r) => {
                let (l, r) = (*l as usize, *r as usize);
                if self.nodes[l].quad {
                    let (lr, mr) = (self.nodes[l].min_r as usize, self.nodes[r].min as usize);
                    for s in q + lr..=j.saturating_sub(mr) {
                        tab.counts[COMBINE] += 1;
                        if tab.t[l].get(tab.q(i, p, q, s)) && tab.t[r].get(tab.d(s, j)) {
                            changed |= tab.b[v].set(k);
                        }
                    }
                } else {
                    let (ml, rl) = (self.nodes[l].min as usize, self.nodes[r].min_l as usize);
                    for s in i + ml..=p.saturating_sub(rl) {
                        tab.counts[COMBINE] += 1;
                        if tab.t[l].get(tab.d(i, s)) && tab.t[r].get(tab.q(s, p, q, j)) {
                            changed |= tab.b[v].set(k);
                        }
                    }
                }
            }
            Shape::Terminal(_) | Shape::Subst(_) => unreachable!("leaves off the spine"),
        }
        if node.nil {
            tab.counts[NIL] += 1;
            if tab.b[v].get(k) {
                changed |= tab.t[v].set(k);
            }
        }
        let (nl, nr) = (node.min_l as usize, node.min_r as usize);
        for &r in &node.adjoin {
            let beta = &self.nodes[r as usize];
            let (bl, br) = (beta.min_l as usize, beta.min_r as usize);
            if p < i + bl + nl || j < q + nr + br {
                continue;
            }
            for ii in i + bl..=p - nl {
                for jj in q + nr..=j - br {
                    tab.counts[ADJOIN] += 1;
                    if tab.t[r as usize].get(tab.q(i, ii, jj, j)) && tab.b[v].get(tab.q(ii, p, q, jj)) {
                        changed |= tab.t[v].set(k);
                    }
                }
            }
        }
        changed
    }
}

/// Strongly connected components, sinks first.
fn tarjan(succ: &[Vec<u32>]) -> Vec<Vec<u32>> {
    struct St<'a> {
        succ: &'a [Vec<u32>],
        index: Vec<Option<u32>>,
        low: Vec<u32>,
        on: Vec<bool>,
        stack: Vec<u32>,
        next: u32,
        out: Vec<Vec<u32>>,
    }
    fn visit(s: &mut St, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v as u32);
        s.on[v] = true;
        for k in 0..s.succ[v].len() {
            let w = s.succ[v][k] as usize;
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("on stack") as usize;
                s.on[w] = false;
                comp.push(w as u32);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let n = succ.len();
    let mut s = St {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

/// One-shot form of [`Baseline::recognize`].
pub fn baseline_recognize<S: AsRef<str>>(
    grammar: &Grammar,
    input: &[S],
) -> Result<(bool, RecognitionStats), OracleError> {
    Baseline::new(grammar)?.recognize(input)
}
