use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }

    pub fn infeasibility(&self) -> Option<&Infeasibility> {
        match self {
            Error::Infeasible(inf) => Some(inf),
            _ => None,
        }
    }
}

/// Which problem constraint could not be met.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// `tau - cDK/f_min <= 0`: even at `f_min` the compute work overruns the frame.
    ComputeOverrunsFrame { lower_bound: f64 },
    /// `tau - cDK/f_max >= tau` cannot happen for positive work, but an
    /// inverted window (`f_min > f_max`) lands here.
    EmptyWindow { lower: f64, upper: f64 },
    /// The IRL budget cannot cover the energy demand; `deficit` in joules.
    EnergyDeficit { deficit: f64 },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::ComputeOverrunsFrame { lower_bound } => write!(
                f,
                "CPU frequency floor violated: transmission window lower bound tau - cDK/f_min = {lower_bound} <= 0"
            ),
            Infeasibility::EmptyWindow { lower, upper } => write!(
                f,
                "transmission window is empty: [{lower}, {upper}]"
            ),
            Infeasibility::EnergyDeficit { deficit } => write!(
                f,
                "energy constraint violated at the IRL power budget: {deficit} J short"
            ),
        }
    }
}
