use std::fmt;
use std::str::FromStr;

/// Nominal step size of the splitting scheme; `Infinite` drops every `1/τ` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Finite(f64),
    Infinite,
}

impl Tau {
    pub fn finite(tau: f64) -> Result<Self, String> {
        if tau.is_finite() && tau > 0.0 {
            Ok(Tau::Finite(tau))
        } else if tau == f64::INFINITY {
            Ok(Tau::Infinite)
        } else {
            Err(format!("step size must be positive, got {tau}"))
        }
    }

    /// `1/τ`, zero for the infinite step.
    pub fn recip(self) -> f64 {
        match self {
            Tau::Finite(t) => 1.0 / t,
            Tau::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Tau::Infinite)
    }

    pub fn value(self) -> f64 {
        match self {
            Tau::Finite(t) => t,
            Tau::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Tau::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| format!("invalid step size '{s}'"))?;
                Tau::finite(v)
            }
        }
    }
}
