use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("non-propositional likelihood argument at {pos}")]
    NonPropositionalLikelihood { pos: usize },
    #[error("unbound proposition `{0}`")]
    UnboundProposition(String),
    #[error("formula `{0}` is not propositional")]
    NotPropositional(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("message syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("likelihood atom `{0}` evaluated on a non-probabilistic structure")]
    NotProbabilistic(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("likelihood atom present in `{0}`; use the probabilistic decision procedure")]
    LikelihoodPresent(String),
    #[error("unsupported class for this procedure: {0}")]
    UnsupportedClass(String),
    #[error("search bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImplicitError {
    #[error("refinement is not monotone: world `{0}` becomes possible")]
    NonMonotone(String),
    #[error("invalid number {0}: primality worlds need integers >= 2")]
    InvalidNumber(u64),
    #[error("at least one number is required")]
    NoNumbers,
    #[error("conclusion vocabulary overlaps antecedents: {0}")]
    VocabularyOverlap(String),
    #[error("rule file line {line}: {message}")]
    RuleSyntax { line: usize, message: String },
}
