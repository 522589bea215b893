use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A subgroup named in a characteristic failure, by its sorted element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupLabel {
    pub context: String,
    pub order: usize,
    pub elements: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),

    #[error("matrix is singular")]
    Singular,

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("complex is not a tree")]
    NotATree,

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("subcomplex is not convex")]
    NotConvex,

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("invalid level family: {0}")]
    InvalidLevelFamily(String),

    #[error(
        "bad characteristic {characteristic}: |U| = {} is not invertible ({})",
        subgroup.order,
        subgroup.context
    )]
    BadCharacteristic {
        characteristic: u64,
        subgroup: SubgroupLabel,
    },

    #[error("vertex idempotents do not commute on cell {0}")]
    NonCommutingOnCell(usize),

    #[error("idempotent system is inconsistent: {0}")]
    InconsistentSystem(String),

    #[error("composite idempotents are not increasing at level {0}")]
    NotIncreasing(usize),

    #[error("top level is not exhaustive")]
    NotExhaustive,

    #[error("block function is not fixed by the subgroup")]
    NotFixed,

    #[error("local map is not equivariant for the cell stabilizer of {0}")]
    NotLocallyEquivariant(usize),

    #[error("invalid extension: {0}")]
    InvalidExtension(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn bad_characteristic(
        characteristic: u64,
        context: impl Into<String>,
        elements: &[usize],
    ) -> Self {
        Error::BadCharacteristic {
            characteristic,
            subgroup: SubgroupLabel {
                context: context.into(),
                order: elements.len(),
                elements: elements.to_vec(),
            },
        }
    }
}
