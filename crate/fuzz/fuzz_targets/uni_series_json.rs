#![no_main]

use drsn::io::{parse_uni_series, uni_series_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(series) = parse_uni_series(s) {
            let again = parse_uni_series(&uni_series_to_json(&series)).expect("rendered series parses");
            assert_eq!(again, series);
        }
    }
});
