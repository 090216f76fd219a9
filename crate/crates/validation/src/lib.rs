//! Holds the `acceptance` test target only; run it with
//! `cargo test -p afrecur-validation --test acceptance`.
