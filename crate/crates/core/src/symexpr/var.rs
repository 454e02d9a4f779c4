use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Role of a symbol inside a control problem. The ordering of the variants
/// fixes the canonical variable ordering used by the term order: states
/// first, then momenta, controls, control velocities and free parameters,
/// each group alphabetical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    State,
    Momentum,
    Control,
    ControlVelocity,
    Parameter,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VarKind::State => "state",
            VarKind::Momentum => "momentum",
            VarKind::Control => "control",
            VarKind::ControlVelocity => "control-velocity",
            VarKind::Parameter => "parameter",
        };
        f.write_str(s)
    }
}

/// A named symbol with an immutable kind. Cloning is cheap; the name is
/// shared. Two variables are the same symbol iff kind and name agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    kind: VarKind,
    name: Arc<str>,
}

impl Var {
    pub fn new(kind: VarKind, name: &str) -> Self {
        Var {
            kind,
            name: Arc::from(name),
        }
    }

    pub fn state(name: &str) -> Self {
        Var::new(VarKind::State, name)
    }

    pub fn momentum(name: &str) -> Self {
        Var::new(VarKind::Momentum, name)
    }

    pub fn control(name: &str) -> Self {
        Var::new(VarKind::Control, name)
    }

    pub fn control_velocity(name: &str) -> Self {
        Var::new(VarKind::ControlVelocity, name)
    }

    pub fn parameter(name: &str) -> Self {
        Var::new(VarKind::Parameter, name)
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_kind_then_name() {
        let x = Var::state("x");
        let vx = Var::state("v_x");
        let px = Var::momentum("p_x");
        let u = Var::control("u1");
        assert!(vx < x, "alphabetical inside a kind");
        assert!(x < px, "states before momenta");
        assert!(px < u, "momenta before controls");
    }
}
