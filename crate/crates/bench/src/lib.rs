//! Criterion benchmarks live under benches/; see `cargo bench -p addrmap-bench`.
