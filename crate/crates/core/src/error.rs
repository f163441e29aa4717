use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point ({x}, {y}): imaginary part must be positive and finite")]
    InvalidPoint { x: f64, y: f64 },

    #[error("invalid geodesic polar coordinates (r = {r}, phi = {phi})")]
    InvalidPolar { r: f64, phi: f64 },

    #[error("matrix [[{a}, {b}], [{c}, {d}]] does not have determinant 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },

    #[error("angle toward a point coinciding with the observation point is undefined")]
    DegenerateAngle,

    #[error("invalid congruence level {0}")]
    InvalidLevel(u64),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("element budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("matrix entries overflow the compact orbit storage")]
    EntryOverflow,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for errors caused by invalid caller input rather than resource limits.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidPoint { .. }
                | Error::InvalidPolar { .. }
                | Error::NotUnimodular { .. }
                | Error::InvalidLevel(_)
                | Error::InvalidQuery(_)
                | Error::Domain(_)
        )
    }
}
