//! Random grammar generator shared by the integration tests.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Left,
    Right,
    Wrap,
}

struct Gen {
    rng: StdRng,
    lefts: Vec<String>,
    rights: Vec<String>,
    wraps: Vec<String>,
    subst: bool,
    /// Constraints drawn with no regard for the restriction.
    noisy: bool,
}

const TERMS: [&str; 3] = ["a", "b", "c"];

impl Gen {
    fn all(&self) -> Vec<String> {
        [&self.lefts[..], &self.rights[..], &self.wraps[..]].concat()
    }

    fn subset(&mut self, from: &[String], p: f64) -> Vec<String> {
        from.iter().filter(|_| self.rng.gen_bool(p)).cloned().collect()
    }

    fn adj(allowed: Vec<String>, nil: bool) -> Value {
        json!({ "allowed": allowed, "nil": nil })
    }

    /// Left and right trees: all of them or none, unless noisy.
    fn sides(&mut self) -> Vec<String> {
        let side = [&self.lefts[..], &self.rights[..]].concat();
        if self.noisy {
            self.subset(&side, 0.5)
        } else if self.rng.gen_bool(0.6) {
            side
        } else {
            Vec::new()
        }
    }

    /// Constraint for a node off every spine.
    fn ordinary(&mut self) -> Value {
        if self.rng.gen_bool(0.2) {
            return Value::Null;
        }
        let mut allowed = self.sides();
        let wraps = self.wraps.clone();
        if self.noisy {
            allowed.extend(self.subset(&wraps, 0.5));
        } else if let Some(w) = wraps.choose(&mut self.rng) {
            // at most one wrapping tree per node keeps the languages small
            if self.rng.gen_bool(0.5) {
                allowed.push(w.clone());
            }
        }
        let nil = allowed.is_empty() || self.rng.gen_bool(0.9);
        Self::adj(allowed, nil)
    }

    fn side_spine(&mut self) -> Value {
        if self.noisy {
            return self.ordinary();
        }
        let all = [&self.lefts[..], &self.rights[..]].concat();
        Self::adj(all, true)
    }

    fn wrap_spine(&mut self, eligible: bool) -> Value {
        if self.noisy {
            return self.ordinary();
        }
        let mut allowed = self.sides();
        if eligible {
            let w = self.wraps.clone();
            let mut picked = self.subset(&w, 0.6);
            if picked.is_empty() {
                picked.push(w.choose(&mut self.rng).expect("wrapping trees").clone());
            }
            allowed.extend(picked);
        }
        let nil = allowed.is_empty() || self.rng.gen_bool(0.9);
        Self::adj(allowed, nil)
    }

    fn with_adj(mut node: Value, adj: Value) -> Value {
        if !adj.is_null() {
            node["adj"] = adj;
        }
        node
    }

    fn subtree(&mut self, depth: usize) -> Value {
        if self.subst && self.rng.gen_bool(0.1) {
            return json!({ "label": "A", "subst": ["np"] });
        }
        if depth == 0 || self.rng.gen_bool(0.6) {
            return json!({ "label": TERMS.choose(&mut self.rng).unwrap(), "terminal": true });
        }
        let k = self.rng.gen_range(1..=2);
        let kids: Vec<Value> = (0..k).map(|_| self.subtree(depth - 1)).collect();
        let adj = self.ordinary();
        Self::with_adj(json!({ "label": "S", "children": kids }), adj)
    }

    fn siblings(&mut self, k: usize) -> Vec<Value> {
        (0..k).map(|_| self.subtree(1)).collect()
    }

    fn aux(&mut self, name: &str, class: Class) -> Value {
        let root = match class {
            Class::Left | Class::Right => {
                let k = self.rng.gen_range(1..=2);
                let foot_adj = self.side_spine();
                let foot = Self::with_adj(json!({ "label": "S", "foot": true }), foot_adj);
                let mut kids = self.siblings(k);
                if class == Class::Left {
                    kids.push(foot);
                } else {
                    kids.insert(0, foot);
                }
                let adj = self.side_spine();
                Self::with_adj(json!({ "label": "S", "children": kids }), adj)
            }
            Class::Wrap => {
                let depth = self.rng.gen_range(1..=3);
                // spine positions 0 (foot) ..= depth (root)
                let eligible = self.rng.gen_range(0..=depth + 1);
                let mut sides: Vec<(usize, usize)> = (0..depth)
                    .map(|_| (self.rng.gen_range(0..=1), self.rng.gen_range(0..=1)))
                    .collect();
                if sides.iter().all(|s| s.0 == 0) {
                    sides[0].0 = 1;
                }
                if sides.iter().all(|s| s.1 == 0) {
                    sides[depth - 1].1 = 1;
                }
                let foot_adj = self.wrap_spine(eligible == 0);
                let mut node = Self::with_adj(json!({ "label": "S", "foot": true }), foot_adj);
                for (lvl, (l, r)) in sides.into_iter().enumerate() {
                    let mut kids = self.siblings(l);
                    kids.push(node);
                    kids.extend(self.siblings(r));
                    let adj = self.wrap_spine(eligible == lvl + 1);
                    node = Self::with_adj(json!({ "label": "S", "children": kids }), adj);
                }
                node
            }
        };
        json!({ "name": name, "kind": "auxiliary", "root": root })
    }
}

/// A small grammar over `{a, b, c}` with one to three auxiliary trees. Most
/// draws satisfy the wrapping restriction; about one in ten does not try to.
pub fn random_grammar(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_aux = rng.gen_range(1..=3);
    let classes: Vec<Class> = (0..n_aux)
        .map(|_| match rng.gen_range(0..3) {
            0 => Class::Left,
            1 => Class::Right,
            _ => Class::Wrap,
        })
        .collect();
    let names: Vec<String> = (0..n_aux).map(|k| format!("t{k}")).collect();
    let pick = |c: Class| -> Vec<String> {
        names
            .iter()
            .zip(&classes)
            .filter(|(_, k)| **k == c)
            .map(|(n, _)| n.clone())
            .collect()
    };
    let subst = rng.gen_bool(0.3);
    let noisy = rng.gen_bool(0.1);
    let mut g = Gen {
        rng,
        lefts: pick(Class::Left),
        rights: pick(Class::Right),
        wraps: pick(Class::Wrap),
        subst,
        noisy,
    };
    let mut trees = Vec::new();
    let n_init = g.rng.gen_range(1..=2);
    for k in 0..n_init {
        let width = g.rng.gen_range(1..=3);
        let kids: Vec<Value> = (0..width).map(|_| g.subtree(1)).collect();
        let adj = g.ordinary();
        let root = Gen::with_adj(json!({ "label": "S", "children": kids }), adj);
        trees.push(json!({ "name": format!("i{k}"), "kind": "initial", "root": root }));
    }
    if subst {
        trees.push(json!({ "name": "np", "kind": "initial",
            "root": { "label": "A", "children": [ { "label": "c", "terminal": true } ] } }));
    }
    for (name, class) in names.iter().zip(&classes) {
        trees.push(g.aux(name, *class));
    }
    json!({ "start": "S", "trees": trees }).to_string()
}
