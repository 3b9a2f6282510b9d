//! Error classes for the circuit description language and the driver.

use std::fmt;

/// Classified program errors. Parse classes come from the reader; semantic
/// classes from validation against the declared layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// No `rail` directive before the first dependent directive.
    MissingLayout,
    /// Malformed line, token, or number.
    Syntax,
    /// A keyword the grammar does not know.
    UnknownDirective,
    /// A time-bin, loop, or mode index outside the declared layout.
    IndexRange,
    /// The same directive given twice for one target.
    DuplicateDirective,
    /// A time-bin without exactly one preparation and one measurement.
    ScheduleIncomplete,
    /// A value outside its legal domain (arity < 2, zero amplitude, ...).
    InvalidValue,
    /// Feed-forward rules that do not split the run into two stages.
    FeedForwardOrder,
    /// More than one coherent preparation (single-laser builds only).
    MultiCoherent,
}

impl ErrorClass {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorClass::MissingLayout => "MISSING_LAYOUT",
            ErrorClass::Syntax => "SYNTAX",
            ErrorClass::UnknownDirective => "UNKNOWN_DIRECTIVE",
            ErrorClass::IndexRange => "INDEX_RANGE",
            ErrorClass::DuplicateDirective => "DUPLICATE_DIRECTIVE",
            ErrorClass::ScheduleIncomplete => "SCHEDULE_INCOMPLETE",
            ErrorClass::InvalidValue => "INVALID_VALUE",
            ErrorClass::FeedForwardOrder => "FEEDFORWARD_ORDER",
            ErrorClass::MultiCoherent => "MULTI_COHERENT",
        }
    }

    /// True for errors the reader finds before the program makes sense.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            ErrorClass::MissingLayout | ErrorClass::Syntax | ErrorClass::UnknownDirective
        )
    }
}

/// A classified error with its position, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramError {
    pub class: ErrorClass,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ProgramError {
    pub fn at(class: ErrorClass, line: usize, column: usize, message: impl Into<String>) -> Self {
        ProgramError { class, line: Some(line), column: Some(column), message: message.into() }
    }

    pub fn global(class: ErrorClass, message: impl Into<String>) -> Self {
        ProgramError { class, line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{}: line {l}, column {c}: {}", self.class.name(), self.message),
            _ => write!(f, "{}: {}", self.class.name(), self.message),
        }
    }
}

impl std::error::Error for ProgramError {}
