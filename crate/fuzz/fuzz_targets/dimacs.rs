#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cnf) = lff_sat::parse_dimacs(text) {
            let again = lff_sat::parse_dimacs(&lff_sat::write_dimacs(&cnf, |_| None)).expect("written DIMACS parses");
            assert_eq!(again, cnf);
        }
    }
});
