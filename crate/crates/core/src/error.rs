use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set must have at least two elements, got {0}")]
    GroundSetTooSmall(usize),
    #[error("element {element} appears in more than one block")]
    Overlap { element: usize },
    #[error("blocks do not cover the ground set: element {element} is missing")]
    Coverage { element: usize },
    #[error("element {element} is outside the ground set of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("empty block")]
    EmptyBlock,
    #[error("partitions live on ground sets of different sizes ({0} vs {1})")]
    AxisMismatch(usize, usize),
    #[error("block subfamily must be proper and nonempty")]
    NotProperSubfamily,
    #[error("partitions are not independent")]
    NotIndependent,
    #[error("axis {axis}: partitions {first} and {second} are not independent")]
    Independence { axis: usize, first: usize, second: usize },
    #[error("axis {axis}: partition {index} duplicates an earlier partition")]
    Duplicate { axis: usize, index: usize },
    #[error("axis {axis}: split must be a proper nonempty subset")]
    ImproperSplit { axis: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("families or boxes belong to different systems")]
    SystemMismatch,
    #[error("box has {got} factors, system has {expected} axes")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate box in family")]
    DuplicateBox,
    #[error("family is empty")]
    EmptyFamily,
    #[error("family does not satisfy Keller's condition")]
    NotKeller,
    #[error("partition {partition} on axis {axis} is the trivial partition")]
    TrivialPartition { axis: usize, partition: usize },
    #[error("family is not a pile laminated by partition {partition} on axis {axis}")]
    NotPile { axis: usize, partition: usize },
    #[error("partition {partition} on axis {axis} is not hidden")]
    NotHidden { axis: usize, partition: usize },
    #[error("family is not a partition of the whole space")]
    NotPartitionOfX,
    #[error("line-induced partition on axis {axis} is not a member of the family (completeness violated)")]
    Completeness { axis: usize },
    #[error("ill-formed multipile tree: {0}")]
    IllFormedTree(String),
    #[error("sibling subtrees share hidden partition {partition} on axis {axis}")]
    Disjointness { axis: usize, partition: usize },
    #[error("invalid axis ordering")]
    InvalidOrdering,
    #[error("family is not a partition: measure sum is {measure_sum}")]
    NotPartition { measure_sum: String },
    #[error("box is improper")]
    ImproperBox,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid torus: {0}")]
    InvalidTorus(String),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("torus is not uniform (m = {0:?})")]
    NonUniformTorus(Vec<usize>),
    #[error("recipe error: {0}")]
    Recipe(String),
    #[error("search space of {cells} cells exceeds the budget of {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}
