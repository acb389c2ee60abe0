//! Line-oriented text format for LDP cases.
//!
//! ```text
//! ldpcase 1
//! # kind consistent-witness
//! m 3
//! n 2
//! G
//! -8.9205098152160640e1 0.0000000000000000e0
//! ...                                          (m rows of n values)
//! h
//! -1.2073434072952070e4
//! ...                                          (m rows of one value)
//! witness
//! 1.3534100912500408e2 0.0000000000000000e0    (optional, n values)
//! ```
//!
//! Values are written as decimals with 17 significant digits, which is
//! enough for every finite double to survive a round trip bit-exactly.
//! C99 hex float literals (`0x1.8p3`) are also accepted on input; they
//! must be exactly representable, otherwise the parse reports an error
//! instead of rounding a second time.

use ldp::dense::Vector;
use ldp::solver::LdpProblem;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A parsed case file: the problem, an optional witness, and any
/// `# key value` metadata in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFile {
    pub problem: LdpProblem,
    pub witness: Option<Vector>,
    pub metadata: Vec<(String, String)>,
}

/// 17 significant digits: the shortest count that round-trips every double.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parse one numeric token, accepting decimal and hex float forms.
pub fn parse_value(token: &str) -> Result<f64, String> {
    let body = token.strip_prefix(['+', '-']).unwrap_or(token);
    let parsed = if body.starts_with("0x") || body.starts_with("0X") {
        hexf_parse::parse_hexf64(token, false).map_err(|e| e.to_string())
    } else {
        token
            .parse::<f64>()
            .map_err(|_| format!("invalid number {token:?}"))
    }?;
    if !parsed.is_finite() {
        return Err(format!("non-finite value {token:?}"));
    }
    Ok(parsed)
}

pub fn serialize(
    problem: &LdpProblem,
    witness: Option<&Vector>,
    metadata: &[(String, String)],
) -> String {
    let mut out = String::from("ldpcase 1\n");
    for (key, value) in metadata {
        out.push_str(&format!("# {key} {value}\n"));
    }
    out.push_str(&format!("m {}\n", problem.m()));
    out.push_str(&format!("n {}\n", problem.n()));
    out.push_str("G\n");
    for i in 0..problem.m() {
        let row: Vec<String> = problem
            .g()
            .row(i)
            .iter()
            .map(|&v| format_value(v))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("h\n");
    for i in 0..problem.m() {
        out.push_str(&format_value(problem.h()[i]));
        out.push('\n');
    }
    if let Some(w) = witness {
        out.push_str("witness\n");
        let row: Vec<String> = w.iter().map(|&v| format_value(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Cursor over non-blank lines that collects metadata comments wherever
/// they appear.
struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    metadata: Vec<(String, String)>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
            metadata: Vec::new(),
            last_line: 0,
        }
    }

    /// The next content line as (1-based number, text), skipping blanks
    /// and absorbing `#` comments.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.iter.by_ref() {
            let line_no = idx + 1;
            self.last_line = line_no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                if !key.is_empty() {
                    self.metadata
                        .push((key.to_string(), value.trim().to_string()));
                }
                continue;
            }
            return Some((line_no, line));
        }
        None
    }

    fn expect_content(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next_content().ok_or_else(|| {
            ParseError::new(
                self.last_line + 1,
                format!("expected {what}, found end of file"),
            )
        })
    }
}

fn parse_values_line(line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != expected {
        return Err(ParseError::new(
            line_no,
            format!("expected {expected} value(s), found {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| parse_value(t).map_err(|msg| ParseError::new(line_no, msg)))
        .collect()
}

fn parse_count(line_no: usize, line: &str, name: &str) -> Result<usize, ParseError> {
    let rest = line
        .strip_prefix(name)
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| ParseError::new(line_no, format!("expected `{name} <count>`")))?;
    let value: usize = rest
        .trim()
        .parse()
        .map_err(|_| ParseError::new(line_no, format!("invalid {name} count {:?}", rest.trim())))?;
    if value == 0 {
        return Err(ParseError::new(
            line_no,
            format!("{name} must be at least 1"),
        ));
    }
    Ok(value)
}

pub fn parse(text: &str) -> Result<CaseFile, ParseError> {
    let mut lines = Lines::new(text);

    let (line_no, header) = lines.expect_content("header `ldpcase 1`")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["ldpcase", "1"] {
        return Err(ParseError::new(line_no, "expected header `ldpcase 1`"));
    }

    let (line_no, m_line) = lines.expect_content("`m <count>`")?;
    let m = parse_count(line_no, m_line, "m")?;
    let (line_no, n_line) = lines.expect_content("`n <count>`")?;
    let n = parse_count(line_no, n_line, "n")?;

    let (line_no, g_header) = lines.expect_content("`G`")?;
    if g_header != "G" {
        return Err(ParseError::new(line_no, "expected section marker `G`"));
    }
    let mut g_data = Vec::with_capacity(m * n);
    for _ in 0..m {
        let (line_no, row) = lines.expect_content("a G row")?;
        g_data.extend(parse_values_line(line_no, row, n)?);
    }

    let (line_no, h_header) = lines.expect_content("`h`")?;
    if h_header != "h" {
        return Err(ParseError::new(line_no, "expected section marker `h`"));
    }
    let mut h_data = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, row) = lines.expect_content("an h value")?;
        h_data.push(parse_values_line(line_no, row, 1)?[0]);
    }

    let mut witness = None;
    if let Some((line_no, marker)) = lines.next_content() {
        if marker != "witness" {
            return Err(ParseError::new(
                line_no,
                format!("unexpected content {marker:?}"),
            ));
        }
        let (line_no, row) = lines.expect_content("a witness row")?;
        witness = Some(Vector::new(parse_values_line(line_no, row, n)?).expect("validated length"));
        if let Some((line_no, extra)) = lines.next_content() {
            return Err(ParseError::new(
                line_no,
                format!("unexpected content {extra:?}"),
            ));
        }
    }

    let g = ldp::dense::Matrix::new(m, n, g_data).expect("validated dimensions");
    let problem = LdpProblem::new(g, Vector::new(h_data).expect("validated length"))
        .expect("validated dimensions");
    Ok(CaseFile {
        problem,
        witness,
        metadata: lines.metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ldp::dense::Matrix;

    fn sample_problem() -> LdpProblem {
        LdpProblem::new(
            Matrix::from_rows(&[vec![1.5, -2.25], vec![0.1, 1.0e-300], vec![-0.0, 3.0]]).unwrap(),
            Vector::new(vec![1.0 / 3.0, f64::MAX, f64::MIN_POSITIVE]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact_for_awkward_values() {
        let problem = sample_problem();
        let witness = Vector::new(vec![5.0e-324, -0.0]).unwrap();
        let text = serialize(&problem, Some(&witness), &[]);
        let parsed = parse(&text).unwrap();
        for i in 0..problem.m() {
            assert_eq!(parsed.problem.h()[i].to_bits(), problem.h()[i].to_bits());
            for j in 0..problem.n() {
                assert_eq!(
                    parsed.problem.g().get(i, j).to_bits(),
                    problem.g().get(i, j).to_bits()
                );
            }
        }
        let w = parsed.witness.unwrap();
        assert_eq!(w[0].to_bits(), 5.0e-324f64.to_bits());
        assert_eq!(w[1].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn metadata_survives_and_is_collected() {
        let problem = sample_problem();
        let meta = vec![
            ("kind".to_string(), "consistent-witness".to_string()),
            ("seed".to_string(), "42".to_string()),
        ];
        let text = serialize(&problem, None, &meta);
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed.metadata, meta);
        assert!(parsed.witness.is_none());
    }

    #[test]
    fn hex_floats_are_accepted_exactly() {
        let text = "ldpcase 1\nm 1\nn 2\nG\n0x1.8p3 -0x1p-1074\nh\n0x10p0\n";
        let parsed = parse(text).unwrap();
        assert_eq!(*parsed.problem.g().get(0, 0), 12.0);
        assert_eq!(
            parsed.problem.g().get(0, 1).to_bits(),
            (-5.0e-324f64).to_bits()
        );
        assert_eq!(parsed.problem.h()[0], 16.0);
    }

    #[test]
    fn inexact_hex_is_rejected_with_the_line() {
        let text = "ldpcase 1\nm 1\nn 1\nG\n0x1.00000000000000001p0\nh\n1.0\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.msg.contains("exactly"), "msg: {}", err.msg);
    }

    #[test]
    fn truncation_and_garbage_report_line_numbers() {
        let err = parse("ldpcase 1\nm 2\nn 1\nG\n1.0\n").unwrap_err();
        assert_eq!(err.line, 6);
        assert!(err.msg.contains("end of file"));

        let err = parse("ldpcase 2\n").unwrap_err();
        assert_eq!(err.line, 1);

        let err = parse("ldpcase 1\nm 1\nn 1\nG\n1.0\nh\n2.0\nsurprise\n").unwrap_err();
        assert_eq!(err.line, 8);

        let err = parse("ldpcase 1\nm 1\nn 1\nG\ninf\nh\n1.0\n").unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.msg.contains("non-finite"));
    }

    #[test]
    fn zero_and_negative_counts_are_rejected() {
        let err = parse("ldpcase 1\nm 0\nn 1\nG\nh\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse("ldpcase 1\nm 1\nn -3\nG\n1.0\nh\n1.0\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn wrong_value_count_is_rejected() {
        let err = parse("ldpcase 1\nm 1\nn 2\nG\n1.0\nh\n1.0\n").unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.msg.contains("expected 2"));
    }
}
