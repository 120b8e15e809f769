//! Randomized structural properties: codec inverses, format roundtrips,
//! generator coupling, and contraction oracles.

use hyperquasi::hypergraph::{generate, read_hypergraph, write_hypergraph, GenSpec, Hypergraph};
use hyperquasi::indexing::{gamma_apply, parse_partition, IndexCodec};
use hyperquasi::multilinear::{
    kron, read_multimap_dump, star_product, write_multimap_dump, MultiForm, MultiMap,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn codec_decode_inverts_encode(base in 2usize..6, arity in 1usize..6, seed in any::<u64>()) {
        let codec = IndexCodec::new(base, arity).unwrap();
        let flat = (seed as usize) % codec.len();
        let digits = codec.decode(flat).unwrap();
        prop_assert_eq!(digits.len(), arity);
        prop_assert!(digits.iter().all(|&d| d < base));
        prop_assert_eq!(codec.encode(&digits).unwrap(), flat);
    }

    #[test]
    fn gamma_is_an_involution(s in 0usize..4, base in 2usize..4, seed in any::<usize>()) {
        let dim = base.pow(1 << s);
        let x = seed % dim;
        let once = gamma_apply(s, base, x).unwrap();
        prop_assert!(once < dim);
        prop_assert_eq!(gamma_apply(s, base, once).unwrap(), x);
    }

    #[test]
    fn hypergraph_text_roundtrip(
        n in 1usize..7,
        k in 2usize..5,
        raw in prop::collection::vec(prop::collection::vec(0u32..7, 2..5), 0..12),
    ) {
        let edges: Vec<Vec<u32>> = raw
            .into_iter()
            .map(|mut e| {
                e.resize(k, 0);
                for v in &mut e {
                    *v %= n as u32;
                }
                e
            })
            .collect();
        let h = Hypergraph::new(n, k, edges).unwrap();
        let back = read_hypergraph(&write_hypergraph(&h)).unwrap();
        prop_assert_eq!(h.n(), back.n());
        prop_assert_eq!(h.k(), back.k());
        prop_assert_eq!(h.edges(), back.edges());
    }

    #[test]
    fn hypergraph_parser_total_on_arbitrary_text(text in ".{0,200}") {
        let _ = read_hypergraph(&text);
    }

    #[test]
    fn dump_roundtrip(
        dims in prop::collection::vec(1usize..4, 1..4),
        seed in any::<u64>(),
    ) {
        let len: usize = dims.iter().product();
        let values: Vec<f64> = (0..len)
            .map(|i| ((seed ^ i as u64) % 1000) as f64 / 7.0 - 50.0)
            .collect();
        let map = MultiMap::from_values(dims, values, false).unwrap();
        let back = read_multimap_dump(&write_multimap_dump(&map)).unwrap();
        prop_assert_eq!(map.mode_dims(), back.mode_dims());
        prop_assert_eq!(map.values(), back.values());
    }

    #[test]
    fn dump_decoder_total_on_arbitrary_bytes(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = read_multimap_dump(&bytes);
    }

    #[test]
    fn partition_parse_inverts_label(k in 2usize..8, pick in any::<usize>()) {
        let all = hyperquasi::indexing::proper_partitions(k);
        let pi = &all[pick % all.len()];
        prop_assert_eq!(&parse_partition(&pi.label()).unwrap(), pi);
    }

    #[test]
    fn partition_parser_total_on_arbitrary_text(text in ".{0,40}") {
        let _ = hyperquasi::indexing::parse_partition_list(&text);
    }

    #[test]
    fn generator_is_deterministic_and_monotone_in_p(
        n in 2usize..8,
        k in 2usize..4,
        seed in any::<u64>(),
        p_lo in 0.0f64..1.0,
        bump in 0.0f64..0.5,
        allow_loops in any::<bool>(),
    ) {
        let p_hi = (p_lo + bump).min(1.0);
        // Loop-free needs n >= k for any admissible edge to exist.
        let allow_loops = allow_loops || n < k;
        let spec = GenSpec { n, k, p: p_lo, seed, allow_loops, bias: None };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        let wider = generate(&GenSpec { p: p_hi, ..spec }).unwrap();
        // Same seed draws the same uniform per admissible set, so raising p
        // only adds edges.
        for e in a.edges() {
            prop_assert!(wider.edges().binary_search(e).is_ok());
        }
    }

    #[test]
    fn star_product_matches_contraction_oracle(
        d1 in 1usize..4,
        d2 in 1usize..4,
        seed in any::<u64>(),
    ) {
        let len = d1 * d2;
        let vals = |salt: u64| -> Vec<f64> {
            (0..len).map(|i| ((seed ^ salt ^ i as u64) % 17) as f64 - 8.0).collect()
        };
        let phi = MultiMap::from_values(vec![d1, d2], vals(1), false).unwrap();
        let psi = MultiMap::from_values(vec![d1, d2], vals(2), false).unwrap();
        let star = star_product(&phi, &psi).unwrap();
        let x: Vec<f64> = (0..d1).map(|i| i as f64 / 3.0 - 0.5).collect();
        let y: Vec<f64> = (0..d1).map(|i| 1.0 - i as f64 / 4.0).collect();
        let joint = kron(&x, &y);
        let lhs = star.eval(&[&joint]).unwrap();
        let mut rhs = 0.0;
        for j in 0..d2 {
            let mut e = vec![0.0; d2];
            e[j] = 1.0;
            rhs += phi.eval(&[&x, &e]).unwrap() * psi.eval(&[&y, &e]).unwrap();
        }
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }
}
