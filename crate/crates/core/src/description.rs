//! JSON state descriptions accepted by the command line.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::symstate::{
    dicke_state, ghz_state, noisy_mixture, product_state, w_state, BlochDirection, SymmetricState,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateDescription {
    Ghz {
        n_qubits: usize,
    },
    W {
        n_qubits: usize,
    },
    Dicke {
        n_qubits: usize,
        p: usize,
    },
    Product {
        n_qubits: usize,
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
    /// `(1−x)/(N+1) P_N + x |base⟩⟨base|`; `x` may be left out when the
    /// description is used as a one-parameter family.
    Noisy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        base: Box<StateDescription>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_qubits: Option<usize>,
    },
}

impl StateDescription {
    pub fn n_qubits(&self) -> usize {
        match self {
            StateDescription::Ghz { n_qubits }
            | StateDescription::W { n_qubits }
            | StateDescription::Dicke { n_qubits, .. }
            | StateDescription::Product { n_qubits, .. } => *n_qubits,
            StateDescription::Noisy { base, .. } => base.n_qubits(),
        }
    }

    pub fn build(&self) -> Result<SymmetricState> {
        match self {
            StateDescription::Noisy { x: None, .. } => {
                domain("noisy state needs a mixing parameter \"x\"")
            }
            _ => self.build_at(None),
        }
    }

    /// Builds the state, substituting `x_override` for the mixing parameter
    /// of the outermost noisy layer.
    pub fn build_at(&self, x_override: Option<f64>) -> Result<SymmetricState> {
        match self {
            StateDescription::Ghz { n_qubits } => ghz_state(*n_qubits),
            StateDescription::W { n_qubits } => w_state(*n_qubits),
            StateDescription::Dicke { n_qubits, p } => dicke_state(*n_qubits, *p),
            StateDescription::Product {
                n_qubits,
                theta,
                phi,
            } => product_state(*n_qubits, BlochDirection::new(*theta, *phi)?),
            StateDescription::Noisy { x, base, n_qubits } => {
                if let Some(n) = n_qubits {
                    if *n != base.n_qubits() {
                        return domain(format!(
                            "noisy n_qubits = {n} disagrees with base ({})",
                            base.n_qubits()
                        ));
                    }
                }
                let Some(x) = x_override.or(*x) else {
                    return domain("noisy state needs a mixing parameter \"x\"");
                };
                noisy_mixture(&base.build()?, x)
            }
        }
    }

    /// True when the description has a noisy layer whose `x` can be scanned.
    pub fn is_family(&self) -> bool {
        matches!(self, StateDescription::Noisy { .. })
    }

    /// Same description with the mixing parameter removed.
    pub fn as_family(&self) -> StateDescription {
        match self {
            StateDescription::Noisy { base, n_qubits, .. } => StateDescription::Noisy {
                x: None,
                base: base.clone(),
                n_qubits: *n_qubits,
            },
            other => other.clone(),
        }
    }
}
