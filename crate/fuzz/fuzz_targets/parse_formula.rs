#![no_main]

use libfuzzer_sys::fuzz_target;

const CONTEXT: &str = "Sorts:\n person.\n animal.\n n int: 1 .. 3.\n c enum: red, blue.\nVocabulary:\n predicate { had(person, animal). lamb(animal). q. }\n function { hue(animal): c. f(n): n. }\n name Mary: person.\nConstraints:\n";

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let context = lff_core::parse_problem(CONTEXT).unwrap();
        let _ = lff_core::parser::parse_formula(text, &context);
    }
});
