//! Loading a `.chor` file: parse, then type-check `main` against its
//! declared type.

use std::path::Path;

use qc_core::chor::ChorType;
use qc_core::statics::{chor_ty_equiv, type_of, undeclared_locations};

use crate::diag::Diagnostic;
use crate::parser::{parse_file, SourceFile};

/// A parsed and well-typed program.
#[derive(Clone, Debug)]
pub struct Program {
    pub file: SourceFile,
    pub ty: ChorType,
}

impl Program {
    pub fn locations(&self) -> Vec<&str> {
        self.file.locations.iter().map(|s| s.as_str()).collect()
    }
}

pub fn check_source(text: &str) -> Result<Program, Vec<Diagnostic>> {
    let file = parse_file(text).map_err(|d| vec![d])?;
    let span = file.main_span;
    let undeclared = undeclared_locations(&file.main, file.locations.iter().map(|s| s.as_str()));
    if !undeclared.is_empty() {
        return Err(undeclared
            .into_iter()
            .map(|l| Diagnostic::error(span, "undeclared-location", format!("`{l}` is not a declared location")))
            .collect());
    }
    let ty = match type_of(&file.table, &file.main) {
        Ok(t) => t,
        Err(e) => return Err(vec![Diagnostic::error(span, "typing", e.to_string())]),
    };
    if let Some(want) = &file.declared {
        if !chor_ty_equiv(want, &ty) {
            return Err(vec![Diagnostic::error(
                span,
                "declared-type",
                format!("`main` has type {ty}, but is declared as {want}"),
            )]);
        }
    }
    Ok(Program { file, ty })
}

/// Errors from reading a file, rendered against the file name.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{}", render(.path, .diagnostics))]
    Invalid { path: String, diagnostics: Vec<Diagnostic> },
}

fn render(path: &str, ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| format!("{path}:{d}")).collect::<Vec<_>>().join("\n")
}

pub fn load(path: &Path) -> Result<Program, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    check_source(&text).map_err(|diagnostics| LoadError::Invalid { path: shown, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn located_int() {
        let p = check_source(
            "locations A, B\nmain : int @ B = let {A, B}.alpha :: loc := {A, B}.repr(A) in let B.x : int := alpha.(1 + 1) ~> B in B.x",
        )
        .unwrap();
        assert_eq!(p.ty.to_string(), "int @ {B}");
    }

    #[test]
    fn escaping_location_is_a_typing_error() {
        let ds = check_source("locations A\nmain = let A.alpha :: loc := A.repr(A) in alpha.(1 + 1)").unwrap_err();
        assert_eq!(ds[0].rule, "typing");
        assert_eq!((ds[0].span.line, ds[0].span.col), (2, 8));
    }

    #[test]
    fn declared_type_mismatch() {
        let ds = check_source("locations A, B\nmain : int @ B = A.1").unwrap_err();
        assert_eq!(ds[0].rule, "declared-type");
    }
}
