#![no_main]

use inexact_experiments::report::parse_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(parsed) = parse_csv(text) {
            assert!(parsed.rows.iter().all(|r| r.len() == parsed.columns.len()));
        }
    }
});
