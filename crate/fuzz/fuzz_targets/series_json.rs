#![no_main]

use drsn::io::{parse_series, series_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(series) = parse_series(s) {
            let again = parse_series(&series_to_json(&series)).expect("rendered series parses");
            assert_eq!(again, series);
        }
    }
});
