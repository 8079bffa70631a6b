//! Brute-force references (placeholder while the module is built).
