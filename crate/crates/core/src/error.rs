use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: operands live in Q(sqrt(-{left})) and Q(sqrt(-{right}))")]
    RingMismatch { left: u64, right: u64 },

    #[error("invalid modulus: zero")]
    InvalidModulus,

    #[error("invalid D = {d}: {reason}")]
    InvalidD { d: u64, reason: &'static str },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precision exhausted while certifying {quantity} at {bits} bits")]
    Precision { quantity: String, bits: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a solution: {0}")]
    NotASolution(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("contract violated: {0}")]
    Contract(String),

    // a would-be counterexample to the theory; never expected
    #[error("mathematical anomaly: {0}")]
    Anomaly(String),
}

impl Error {
    pub fn precision(quantity: impl Into<String>, bits: u32) -> Self {
        Error::Precision {
            quantity: quantity.into(),
            bits,
        }
    }

    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision { .. })
    }

    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::RingMismatch { .. }
                | Error::InvalidModulus
                | Error::InvalidD { .. }
                | Error::InvalidElement(_)
                | Error::Parse(_)
                | Error::Domain(_)
                | Error::NotASolution(_)
                | Error::Inapplicable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
