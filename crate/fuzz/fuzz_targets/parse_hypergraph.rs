//! Text-format parser must be total, and accepted inputs must normalize to
//! a fixpoint: write(read(x)) parses back to the same hypergraph.

#![no_main]

use hyperquasi::hypergraph::{read_hypergraph, write_hypergraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(h) = read_hypergraph(text) else { return };
    let rendered = write_hypergraph(&h);
    let back = read_hypergraph(&rendered).expect("rendered output must parse");
    assert_eq!(h.n(), back.n());
    assert_eq!(h.k(), back.k());
    assert_eq!(h.edges(), back.edges());
    assert_eq!(rendered, write_hypergraph(&back));
});
