//! Binary dump decoder must be total; the format is canonical, so any
//! accepted input re-encodes to the identical bytes.

#![no_main]

use hyperquasi::multilinear::{read_multimap_dump, write_multimap_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(map) = read_multimap_dump(data) else { return };
    assert_eq!(write_multimap_dump(&map), data);
});
