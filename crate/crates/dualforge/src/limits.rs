/// Resource bounds for the search routines. Exceeding a bound is a distinct
/// error, never silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Maximum universe size of a direct power (and of any single lifted
    /// operation table).
    pub max_power_elems: usize,
    /// Maximum number of closed sets visited while enumerating subuniverses.
    pub max_closed_sets: usize,
    /// Maximum number of nodes expanded by a homomorphism search.
    pub max_search_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_power_elems: 1_000_000,
            max_closed_sets: 100_000,
            max_search_nodes: 100_000_000,
        }
    }
}

/// Branching order used by the backtracking searches. Canonical output must
/// not depend on it; the alternate order exists so tests can prove that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    Forward,
    Reverse,
}

impl SearchOrder {
    pub fn from_seed(seed: u64) -> Self {
        if seed % 2 == 0 {
            SearchOrder::Forward
        } else {
            SearchOrder::Reverse
        }
    }
}

/// Bundled search configuration threaded through the engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchCfg {
    pub limits: Limits,
    pub order: SearchOrder,
}

impl SearchCfg {
    pub fn with_order(order: SearchOrder) -> Self {
        SearchCfg { limits: Limits::default(), order }
    }
}
