#![no_main]

use drsn::io::{parse_complex_list, parse_real_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_complex_list(s);
        let _ = parse_real_list(s, 6);
    }
});
