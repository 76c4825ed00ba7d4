use crate::error::{LabError, Result};

/// Size limits for exhaustive work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on p^n for point tables and transforms.
    pub max_points: u64,
    /// Upper bound on |G(n, k)| for enumerations.
    pub max_subspaces: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_points: 100_000,
            max_subspaces: 200_000,
        }
    }
}

impl Budget {
    pub fn check_points(&self, needed: u64) -> Result<()> {
        if needed > self.max_points {
            return Err(LabError::BudgetExceeded {
                what: "point",
                needed: needed as u128,
                limit: self.max_points as u128,
            });
        }
        Ok(())
    }

    pub fn check_subspaces(&self, needed: u64) -> Result<()> {
        if needed > self.max_subspaces {
            return Err(LabError::BudgetExceeded {
                what: "subspace enumeration",
                needed: needed as u128,
                limit: self.max_subspaces as u128,
            });
        }
        Ok(())
    }
}
