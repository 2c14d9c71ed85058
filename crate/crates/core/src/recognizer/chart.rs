use std::collections::VecDeque;

use rustc_hash::FxHashMap as HashMap;

/// Adjunction state of a node item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    /// Children combined, adjunction not yet processed.
    B,
    /// Only left adjunction processed.
    M,
    /// Fully processed.
    T,
}

/// `⟨N^X, i, j⟩`; `node` is a compiled node index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeItem {
    pub node: u32,
    pub state: State,
    pub i: u16,
    pub j: u16,
}

/// Stage of a wrapping adjunction in progress, or a finished wrapping tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WrapTag {
    LD,
    RD,
    RU,
    Full,
}

/// `⟨tag, i, p, q, j⟩` for wrapping tree number `tree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WrapItem {
    pub tree: u32,
    pub tag: WrapTag,
    pub i: u16,
    pub p: u16,
    pub q: u16,
    pub j: u16,
}

impl WrapItem {
    /// The position each stage is looked up by when it is the older partner.
    fn key_pos(&self) -> u16 {
        match self.tag {
            WrapTag::Full => self.p,
            WrapTag::LD => self.q,
            WrapTag::RD => self.j,
            WrapTag::RU => self.i,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Node(NodeItem),
    Wrap(WrapItem),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Discipline {
    #[default]
    Fifo,
    Lifo,
}

/// Closed set, worklist and partner indexes. Only processed items are
/// indexed, so each antecedent pair is combined exactly once: when the later
/// of the two is processed.
#[derive(Debug)]
pub struct Chart {
    /// Value is whether the item has been processed.
    closed: HashMap<Item, bool>,
    agenda: VecDeque<Item>,
    discipline: Discipline,
    by_start: HashMap<(u32, State, u16), Vec<u16>>,
    by_end: HashMap<(u32, State, u16), Vec<u16>>,
    spans: HashMap<u32, Vec<(u16, u16)>>,
    track_spans: Vec<bool>,
    wrap_by_pos: HashMap<(u32, WrapTag, u16), Vec<[u16; 4]>>,
    wrap_by_gap: HashMap<(u32, u16, u16), Vec<(u16, u16)>>,
}

const EMPTY_POS: &[u16] = &[];

impl Chart {
    /// `track_spans[n]` asks for a full list of processed T spans of node `n`.
    pub fn new(discipline: Discipline, track_spans: Vec<bool>) -> Self {
        Chart {
            closed: HashMap::default(),
            agenda: VecDeque::new(),
            discipline,
            by_start: HashMap::default(),
            by_end: HashMap::default(),
            spans: HashMap::default(),
            track_spans,
            wrap_by_pos: HashMap::default(),
            wrap_by_gap: HashMap::default(),
        }
    }

    /// Adds an item unless already present; returns whether it was new.
    pub fn add(&mut self, item: Item) -> bool {
        if self.closed.contains_key(&item) {
            return false;
        }
        self.closed.insert(item, false);
        self.agenda.push_back(item);
        true
    }

    /// Next unprocessed item, now marked processed and indexed.
    pub fn pop(&mut self) -> Option<Item> {
        let item = match self.discipline {
            Discipline::Fifo => self.agenda.pop_front(),
            Discipline::Lifo => self.agenda.pop_back(),
        }?;
        self.closed.insert(item, true);
        match item {
            Item::Node(n) => {
                self.by_start.entry((n.node, n.state, n.i)).or_default().push(n.j);
                self.by_end.entry((n.node, n.state, n.j)).or_default().push(n.i);
                if n.state == State::T && self.track_spans[n.node as usize] {
                    self.spans.entry(n.node).or_default().push((n.i, n.j));
                }
            }
            Item::Wrap(w) => {
                self.wrap_by_pos
                    .entry((w.tree, w.tag, w.key_pos()))
                    .or_default()
                    .push([w.i, w.p, w.q, w.j]);
                if w.tag == WrapTag::Full {
                    self.wrap_by_gap.entry((w.tree, w.p, w.q)).or_default().push((w.i, w.j));
                }
            }
        }
        Some(item)
    }

    pub fn is_processed(&self, item: &Item) -> bool {
        self.closed.get(item) == Some(&true)
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.closed.contains_key(item)
    }

    /// Ends of processed items `⟨node^state, start, ·⟩`.
    pub fn ends(&self, node: u32, state: State, start: u16) -> &[u16] {
        self.by_start
            .get(&(node, state, start))
            .map_or(EMPTY_POS, Vec::as_slice)
    }

    /// Starts of processed items `⟨node^state, ·, end⟩`.
    pub fn starts(&self, node: u32, state: State, end: u16) -> &[u16] {
        self.by_end.get(&(node, state, end)).map_or(EMPTY_POS, Vec::as_slice)
    }

    /// Every processed T span of a tracked node.
    pub fn t_spans(&self, node: u32) -> &[(u16, u16)] {
        self.spans.get(&node).map_or(&[], Vec::as_slice)
    }

    /// Processed wrap items of `tag` whose lookup position equals `pos`
    /// (`p` for finished trees, `q` for LD, `j` for RD, `i` for RU).
    pub fn wraps_at(&self, tree: u32, tag: WrapTag, pos: u16) -> &[[u16; 4]] {
        self.wrap_by_pos.get(&(tree, tag, pos)).map_or(&[], Vec::as_slice)
    }

    /// Outer spans of processed finished wrapping items with foot span `(p, q)`.
    pub fn wraps_around(&self, tree: u32, p: u16, q: u16) -> &[(u16, u16)] {
        self.wrap_by_gap.get(&(tree, p, q)).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.closed.keys()
    }
}
