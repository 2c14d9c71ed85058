use super::*;
use crate::fixtures;
use crate::grammar::{NodeRole, TreeId};
use crate::transform::prepare;

fn tg(text: &str) -> TransformedGrammar {
    prepare(&fixtures::load(text)).unwrap()
}

fn chars(s: &str) -> Vec<String> {
    s.chars().map(String::from).collect()
}

fn accepts(tg: &TransformedGrammar, s: &str) -> bool {
    recognize(tg, &chars(s)).unwrap().0
}

#[test]
fn g1_membership() {
    let g = tg(fixtures::G1);
    assert!(accepts(&g, "abcd"));
    assert!(accepts(&g, "aabbccdd"));
    assert!(accepts(&g, "aaabbbcccddd"));
    assert!(!accepts(&g, "aabbcdd"));
    assert!(!accepts(&g, "abcda"));
    assert!(!accepts(&g, "abcdabcd"));
    assert!(!accepts(&g, ""));
}

/// Compiled id of the node in `host` whose children are the terminals `kids`.
fn node_over(r: &Recognizer, host: Host, kids: &[&str]) -> u32 {
    let t = r.grammar().host_tree(host);
    let n = (0..t.nodes.len())
        .find(|&n| {
            let c = &t.nodes[n].children;
            c.len() == kids.len()
                && c.iter()
                    .zip(kids)
                    .all(|(k, l)| t.node(*k).role == NodeRole::Terminal && t.node(*k).label == *l)
        })
        .expect("node present");
    r.node_id(host, NodeId(n)).unwrap()
}

#[test]
fn g1_wrapping_trace() {
    let g = tg(fixtures::G1);
    let r = Recognizer::new(&g);
    let out = r.run(&chars("aabbccdd"), Discipline::Fifo).unwrap();
    assert!(out.accepted);
    let has = |i: Item| out.chart.contains(&i);
    let w = |tag, i, p, q, j| {
        Item::Wrap(WrapItem {
            tree: 0,
            tag,
            i,
            p,
            q,
            j,
        })
    };
    // LD over the inner b, RD over the outer c, joined without adjunction at w
    assert!(has(w(WrapTag::RD, 2, 3, 5, 6)));
    assert!(!has(w(WrapTag::RD, 2, 4, 4, 6)));
    assert!(has(w(WrapTag::RU, 2, 3, 5, 7)));
    assert!(has(w(WrapTag::Full, 1, 3, 5, 7)));
    let s1 = node_over(&r, Host::Initial(TreeId(0)), &["b", "c"]);
    let item = |state, i, j| Item::Node(NodeItem { node: s1, state, i, j });
    assert!(has(item(State::B, 3, 5)));
    assert!(has(item(State::T, 1, 7)));
    for rule in ["2c", "2d", "2e", "3c", "3d"] {
        assert!(out.stats.rule_applications[rule] > 0, "rule {rule} never fired");
    }
    // a second level of nesting goes through the wrapping node of beta
    let out = r.run(&chars("aaabbbcccddd"), Discipline::Fifo).unwrap();
    assert!(out.accepted);
    assert!(out.stats.rule_applications["2a"] > 0);
    assert!(out.stats.rule_applications["2b"] > 0);
}

#[test]
fn g1_step1_on_base_string() {
    let g = tg(fixtures::G1);
    let r = Recognizer::new(&g);
    let out = r.run(&chars("abcd"), Discipline::Fifo).unwrap();
    let s1 = node_over(&r, Host::Initial(TreeId(0)), &["b", "c"]);
    assert!(out.chart.contains(&Item::Node(NodeItem {
        node: s1,
        state: State::B,
        i: 1,
        j: 3
    })));
}

#[test]
fn g2_left_then_right() {
    let g = tg(fixtures::G2);
    let out = Recognizer::new(&g).run(&chars("ℓℓsr"), Discipline::Fifo).unwrap();
    assert!(out.accepted);
    assert!(out.stats.rule_applications["3a"] > 0);
    assert!(out.stats.rule_applications["3b"] > 0);
    assert!(!accepts(&g, "ℓrs"));
    assert!(!accepts(&g, "sℓ"));
}

#[test]
fn g5_uses_every_rule() {
    let g = tg(fixtures::G5);
    let r = Recognizer::new(&g);
    let mut seen = BTreeMap::new();
    for s in [
        "n v",
        "q n adv v pp e",
        "x y n v z u",
        "x x y y n v z z u u",
        "q x y q n v e z u",
        "x y q n v z u e",
    ] {
        let words: Vec<&str> = s.split(' ').collect();
        let out = r.run(&words, Discipline::Fifo).unwrap();
        assert!(out.accepted, "{s}");
        for (k, v) in out.stats.rule_applications {
            *seen.entry(k).or_insert(0) += v;
        }
    }
    for rule in RuleId::ALL {
        assert!(seen[rule.code()] > 0, "rule {} never fired", rule.code());
    }
}

#[test]
fn foot_axioms_per_tree_and_position() {
    let text = r#"{ "start": "S", "trees": [
        { "name": "alpha", "kind": "initial", "root": { "label": "S", "children": [ { "label": "s", "terminal": true } ] } },
        { "name": "l", "kind": "auxiliary", "root": { "label": "S", "children": [
            { "label": "x", "terminal": true }, { "label": "S", "foot": true } ] } } ] }"#;
    let g = tg(text);
    let (_, stats) = recognize(&g, &chars("xxs")).unwrap();
    assert_eq!(stats.rule_applications["1b"], 4);
    let (ok, _) = recognize(&g, &chars("xxs")).unwrap();
    assert!(ok);
}

#[test]
fn unknown_token() {
    let g = tg(fixtures::G1);
    assert_eq!(
        recognize(&g, &chars("abzd")).unwrap_err(),
        RecognizeError::UnknownToken {
            token: "z".into(),
            position: 3
        }
    );
}

#[test]
fn stats_cover_the_chart() {
    let g = tg(fixtures::G1);
    let out = Recognizer::new(&g).run(&chars("aabbccdd"), Discipline::Lifo).unwrap();
    assert_eq!(out.stats.total_items(), out.chart.len() as u64);
    assert!(out.stats.accepted);
}

#[test]
fn order_independence() {
    let g1 = tg(fixtures::G1);
    assert!(closure_order_independent(&g1, &chars("abcd")).unwrap());
    assert!(closure_order_independent(&g1, &chars("aabbccdd")).unwrap());
    let g2 = tg(fixtures::G2);
    assert!(closure_order_independent(&g2, &chars("ℓsrr")).unwrap());
}

#[test]
fn counts_do_not_depend_on_order() {
    let g = tg(fixtures::G5);
    let words: Vec<&str> = "q x y n adv v z u e".split(' ').collect();
    let r = Recognizer::new(&g);
    let a = r.run(&words, Discipline::Fifo).unwrap();
    let b = r.run(&words, Discipline::Lifo).unwrap();
    assert_eq!(a.stats.rule_applications, b.stats.rule_applications);
}
