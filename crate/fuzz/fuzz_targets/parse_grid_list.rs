#![no_main]

use inexact_experiments::config::{parse_list, parse_number};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_number(text);
        if let Ok(values) = parse_list(text) {
            assert!(!values.is_empty());
        }
    }
});
