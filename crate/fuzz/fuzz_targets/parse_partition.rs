//! Partition-list parser must be total, and accepted lists must round-trip
//! through their labels.

#![no_main]

use hyperquasi::indexing::{parse_partition_list, Partition};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(parts) = parse_partition_list(text) else { return };
    let labels: Vec<String> = parts.iter().map(Partition::label).collect();
    let back = parse_partition_list(&labels.join(",")).expect("labels must parse");
    assert_eq!(parts, back);
});
