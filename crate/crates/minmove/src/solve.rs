//! Minimum Move optimization (placeholder while the module is built).
