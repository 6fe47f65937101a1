//! Line-oriented circuit description language.
//!
//! ```text
//! line      := statement? comment?
//! comment   := '#' anything
//! statement := 'INPUT' beam
//!            | 'VACUUM' beam
//!            | 'BS' beam [',' beam] '->' beam ',' beam ['r=' expr] ['t=' expr]
//!            | 'MIRROR' beam
//!            | 'PHASE' beam expr
//!            | 'DETECT' beam ('before' | 'after')
//! beam      := [A-Za-z_][A-Za-z0-9_]*
//! expr      := arithmetic over numbers, pi, phi with + - * / and parentheses
//! ```
//!
//! Splitter outputs are listed reflected first, transmitted second. With two
//! inputs the first output carries `r·in1 + t·in2`. `r=`/`t=` override the
//! reflection and transmission phases and must not contain spaces; they are
//! checked at `phi = 0`.
//!
//! Routing rules: exactly one `INPUT`; a splitter consumes its inputs and
//! creates fresh beams, so routing is acyclic; a second splitter input is
//! either a beam produced upstream or one declared with `VACUUM`; the two
//! inputs of a splitter must arrive from perpendicular directions.

use std::collections::{BTreeMap, BTreeSet};

use super::element::{OpticalElement, SplitterConvention};
use super::expr::Expr;
use super::OpticsError;

pub const STANDARD_MZI: &str = "\
# Mach-Zehnder interferometer, 45-degree elements in the xy-plane
INPUT in
BS in -> beta,alpha
MIRROR alpha
MIRROR beta
PHASE beta phi
BS alpha,beta -> c,d
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    BeforeSecondSplitter,
    AfterSecondSplitter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    pub beam: String,
    pub placement: Placement,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementLine {
    pub element: OpticalElement,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDescription {
    pub input: String,
    pub vacuum: Vec<String>,
    pub elements: Vec<ElementLine>,
    pub detectors: Vec<Detector>,
}

impl CircuitDescription {
    pub fn standard() -> Self {
        parse_circuit(STANDARD_MZI).expect("built-in circuit parses")
    }

    /// Same elements and routing as [`STANDARD_MZI`], ignoring detectors.
    pub fn is_standard(&self) -> bool {
        let std = Self::standard();
        self.input == std.input
            && self.elements.len() == std.elements.len()
            && self.elements.iter().zip(&std.elements).all(|(a, b)| a.element == b.element)
    }

    pub fn splitter_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e.element, OpticalElement::BeamSplitter { .. })).count()
    }

    pub fn which_path(&self) -> bool {
        self.detectors.iter().any(|d| d.placement == Placement::BeforeSecondSplitter)
    }
}

struct Cursor<'a> {
    line_no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, column_offset: usize, message: impl Into<String>) -> OpticsError {
        OpticsError::Parse { line: self.line_no, column: column_offset + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, usize), OpticsError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.err(start, format!("expected {what}")));
        }
        self.pos += len;
        Ok((&rest[..len], start))
    }

    fn punct(&mut self, p: &str) -> Result<(), OpticsError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(p) {
            self.pos += p.len();
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected `{p}`")))
        }
    }

    fn try_punct(&mut self, p: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(p) {
            self.pos += p.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self, text_end: usize) -> Result<Expr, OpticsError> {
        self.skip_ws();
        let start = self.pos;
        let e = Expr::parse(&self.text[start..text_end]).map_err(|(off, msg)| self.err(start + off, msg))?;
        self.pos = text_end;
        Ok(e)
    }

    fn finish(&mut self) -> Result<(), OpticsError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(self.pos, "unexpected trailing text"))
        }
    }
}

enum Statement {
    Input(String),
    Vacuum(String),
    Element(OpticalElement),
    Detect(String, Placement),
}

fn parse_line(cur: &mut Cursor) -> Result<Option<(Statement, usize)>, OpticsError> {
    if cur.at_end() {
        return Ok(None);
    }
    let (kw, kw_col) = cur.word("a keyword")?;
    let stmt = match kw {
        "INPUT" => Statement::Input(cur.word("a beam name")?.0.to_string()),
        "VACUUM" => Statement::Vacuum(cur.word("a beam name")?.0.to_string()),
        "MIRROR" => Statement::Element(OpticalElement::Mirror { beam: cur.word("a beam name")?.0.to_string() }),
        "PHASE" => {
            let beam = cur.word("a beam name")?.0.to_string();
            if cur.at_end() {
                return Err(cur.err(cur.pos, "expected a phase expression"));
            }
            let phase = cur.expr(cur.text.len())?;
            Statement::Element(OpticalElement::PhaseShifter { beam, phase })
        }
        "DETECT" => {
            let beam = cur.word("a beam name")?.0.to_string();
            let (p, col) = cur.word("`before` or `after`")?;
            let placement = match p {
                "before" => Placement::BeforeSecondSplitter,
                "after" => Placement::AfterSecondSplitter,
                _ => return Err(cur.err(col, "expected `before` or `after`")),
            };
            Statement::Detect(beam, placement)
        }
        "BS" => {
            let in1 = cur.word("an input beam")?.0.to_string();
            let in2 = if cur.try_punct(",") { Some(cur.word("a second input beam")?.0.to_string()) } else { None };
            cur.punct("->")?;
            let reflected = cur.word("the reflected output beam")?.0.to_string();
            cur.punct(",")?;
            let transmitted = cur.word("the transmitted output beam")?.0.to_string();
            let mut convention = SplitterConvention::default();
            while !cur.at_end() {
                let start = cur.pos;
                let end = cur.text[start..].find([' ', '\t']).map_or(cur.text.len(), |i| start + i);
                if cur.try_punct("r=") {
                    convention.reflection = cur.expr(end)?;
                } else if cur.try_punct("t=") {
                    convention.transmission = cur.expr(end)?;
                } else {
                    return Err(cur.err(start, "expected `r=<expr>` or `t=<expr>`"));
                }
            }
            Statement::Element(OpticalElement::BeamSplitter {
                inputs: (in1, in2),
                reflected,
                transmitted,
                convention,
            })
        }
        other => return Err(cur.err(kw_col, format!("unknown statement `{other}`"))),
    };
    cur.finish()?;
    Ok(Some((stmt, kw_col)))
}

#[derive(Clone, Copy)]
struct BeamInfo {
    live: bool,
    /// Parity of reflections since the input; `None` for vacuum ports.
    turned: Option<bool>,
}

/// Parse and validate a circuit.
pub fn parse_circuit(text: &str) -> Result<CircuitDescription, OpticsError> {
    let mut input: Option<String> = None;
    let mut vacuum = Vec::new();
    let mut elements = Vec::new();
    let mut detectors = Vec::new();
    let mut beams: BTreeMap<String, BeamInfo> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor { line_no, text: body, pos: 0 };
        let Some((stmt, col)) = parse_line(&mut cur)? else { continue };
        let invalid = |message: String| OpticsError::Validation { line: line_no, element: raw.trim().to_string(), message };
        let fresh = |name: &str, seen: &BTreeSet<String>| -> Result<(), OpticsError> {
            if seen.contains(name) {
                Err(invalid(format!("beam `{name}` is already defined")))
            } else {
                Ok(())
            }
        };
        match stmt {
            Statement::Input(name) => {
                if input.is_some() {
                    return Err(OpticsError::Parse { line: line_no, column: col + 1, message: "second INPUT".into() });
                }
                fresh(&name, &seen)?;
                seen.insert(name.clone());
                beams.insert(name.clone(), BeamInfo { live: true, turned: Some(false) });
                input = Some(name);
            }
            Statement::Vacuum(name) => {
                fresh(&name, &seen)?;
                seen.insert(name.clone());
                beams.insert(name.clone(), BeamInfo { live: true, turned: None });
                vacuum.push(name);
            }
            Statement::Detect(beam, placement) => detectors.push(Detector { beam, placement, line: line_no }),
            Statement::Element(element) => {
                let live = |name: &str| -> Result<BeamInfo, OpticsError> {
                    match beams.get(name) {
                        Some(info) if info.live => Ok(*info),
                        Some(_) => Err(invalid(format!("beam `{name}` was already consumed by a splitter"))),
                        None => Err(invalid(format!("beam `{name}` is undeclared; declare it with INPUT or VACUUM"))),
                    }
                };
                match &element {
                    OpticalElement::Mirror { beam } => {
                        let mut info = live(beam)?;
                        info.turned = info.turned.map(|t| !t);
                        beams.insert(beam.clone(), info);
                    }
                    OpticalElement::PhaseShifter { beam, .. } => {
                        live(beam)?;
                    }
                    OpticalElement::BeamSplitter { inputs, reflected, transmitted, convention } => {
                        if !convention.is_unitary(0.0) {
                            return Err(invalid("splitter phases violate cos(r - t) = 0, the element is not unitary".into()));
                        }
                        if !convention.is_standard(0.0) {
                            return Err(invalid("only the r = pi/2, t = 0 splitter convention is supported".into()));
                        }
                        let a = live(&inputs.0)?;
                        let b = match &inputs.1 {
                            Some(name) if name == &inputs.0 => {
                                return Err(invalid("splitter inputs must be distinct".into()));
                            }
                            Some(name) => Some(live(name)?),
                            None => None,
                        };
                        // the transmitted output keeps the direction of in1
                        let turned = match (a.turned, b.and_then(|b| b.turned)) {
                            (Some(x), Some(y)) if x == y => {
                                return Err(invalid("splitter inputs must arrive from perpendicular directions".into()));
                            }
                            (Some(x), _) => Some(x),
                            (None, Some(y)) => Some(!y),
                            (None, None) => None,
                        };
                        if turned.is_none() {
                            return Err(invalid("splitter has only vacuum inputs".into()));
                        }
                        if reflected == transmitted {
                            return Err(invalid("splitter outputs must be distinct".into()));
                        }
                        fresh(reflected, &seen)?;
                        fresh(transmitted, &seen)?;
                        for name in std::iter::once(&inputs.0).chain(inputs.1.iter()) {
                            beams.insert(name.clone(), BeamInfo { live: false, turned: None });
                        }
                        seen.insert(reflected.clone());
                        seen.insert(transmitted.clone());
                        beams.insert(reflected.clone(), BeamInfo { live: true, turned: turned.map(|t| !t) });
                        beams.insert(transmitted.clone(), BeamInfo { live: true, turned });
                    }
                }
                elements.push(ElementLine { element, line: line_no });
            }
        }
    }

    let input = input.ok_or(OpticsError::Parse { line: text.lines().count().max(1), column: 1, message: "circuit has no INPUT".into() })?;
    for d in &detectors {
        if !seen.contains(&d.beam) {
            return Err(OpticsError::Validation {
                line: d.line,
                element: format!("DETECT {}", d.beam),
                message: format!("detector watches unknown beam `{}`", d.beam),
            });
        }
    }
    Ok(CircuitDescription { input, vacuum, elements, detectors })
}
