//! Rendering and re-parsing preserves problems; parsing never panics.

mod common;

use lff_core::corpus::Corpus;
use lff_core::{check, parse_problem, render_problem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_round_trip(text: &str) {
    let p = parse_problem(text).unwrap();
    let once = render_problem(&p);
    let q = parse_problem(&once).unwrap_or_else(|e| panic!("rendering does not parse: {e:?}\n{once}"));
    assert_eq!(
        q.constraints.iter().map(|c| &c.formula).collect::<Vec<_>>(),
        p.constraints.iter().map(|c| &c.formula).collect::<Vec<_>>(),
        "{once}"
    );
    assert_eq!(render_problem(&q), once);
    assert_eq!(check(&p, text).is_ok(), check(&q, &once).is_ok(), "{once}");
}

#[test]
fn generated_problems_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x707);
    for _ in 0..300 {
        let (text, _) = common::tiny_problem(&mut rng, &common::Shape { max_symbols: 3, max_constraints: 4, depth: 4 });
        assert_round_trip(&text);
    }
}

#[test]
fn corpus_round_trips() {
    for p in Corpus::builtin().list(None) {
        assert_round_trip(&p.encoding);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,200}") {
        let _ = parse_problem(&s);
    }

    #[test]
    fn mangled_problems_never_panic(cut in 0usize..400, junk in "[a-z(),.:&|~ ]{0,12}") {
        let text = Corpus::builtin().get("logic-games").unwrap().encoding.clone();
        let mut cut = cut.min(text.len());
        while !text.is_char_boundary(cut) {
            cut -= 1;
        }
        let mangled = format!("{}{junk}{}", &text[..cut], &text[cut..]);
        if let Ok(p) = parse_problem(&mangled) {
            let _ = check(&p, &mangled);
        }
    }
}
