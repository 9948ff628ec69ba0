use std::sync::RwLock;

/// Capacity limits for the dense exact representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest variable set a dense joint distribution may span (2^n entries).
    pub max_joint_variables: usize,
    /// Largest cutset for which a cutset Markov chain is built.
    pub max_cutset_size: usize,
    /// Largest graph for cutset enumeration.
    pub max_enumeration_nodes: usize,
    /// Largest GBN for exhaustive d-separation/independence sweeps.
    pub max_independence_variables: usize,
    /// Largest graph accepted by the path-enumeration d-separation oracle.
    pub max_path_oracle_nodes: usize,
    /// Largest GBN for which the dense (Cpt)/(wCpt) systems are built.
    pub max_constraint_variables: usize,
}

const DEFAULT_LIMITS: Limits = Limits {
    max_joint_variables: 20,
    max_cutset_size: 16,
    max_enumeration_nodes: 20,
    max_independence_variables: 8,
    max_path_oracle_nodes: 7,
    max_constraint_variables: 12,
};

impl Default for Limits {
    fn default() -> Self {
        DEFAULT_LIMITS
    }
}

static LIMITS: RwLock<Limits> = RwLock::new(DEFAULT_LIMITS);

/// The process-wide limits currently in force.
pub fn limits() -> Limits {
    *LIMITS.read().unwrap_or_else(|e| e.into_inner())
}

/// Replaces the process-wide limits.
pub fn set_limits(new: Limits) {
    *LIMITS.write().unwrap_or_else(|e| e.into_inner()) = new;
}

pub(crate) fn check(what: &'static str, requested: usize, limit: usize) -> crate::Result<()> {
    if requested > limit {
        Err(crate::Error::Capacity {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
