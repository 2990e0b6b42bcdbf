//! Source positions for diagnostics.

use std::fmt;

/// Index into the driver's file table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileId(pub u32);

impl FileId {
    pub const SYNTH: FileId = FileId(u32::MAX);
}

/// A half-open region of source text, 1-based lines and columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub file: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: FileId, start: (u32, u32), end: (u32, u32)) -> Span {
        debug_assert!(start <= end, "span start must not follow its end");
        Span {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Span for terms the kernel manufactures itself (no source text).
    pub fn synth() -> Span {
        Span {
            file: FileId::SYNTH,
            start_line: 0,
            start_col: 0,
            end_line: 0,
            end_col: 0,
        }
    }

    pub fn is_synth(&self) -> bool {
        self.file == FileId::SYNTH
    }

    /// Smallest span covering both `self` and `other`.
    pub fn merge(self, other: Span) -> Span {
        if self.is_synth() {
            return other;
        }
        if other.is_synth() || self.file != other.file {
            return self;
        }
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span::new(self.file, start, end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_synth() {
            write!(f, "<kernel>")
        } else {
            write!(f, "{}:{}", self.start_line, self.start_col)
        }
    }
}
