//! Criterion benchmarks for grid construction, operator assembly, NLP
//! evaluation and small end-to-end solves. Run with `cargo bench -p dopic-bench`.
