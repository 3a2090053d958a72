//! Strictly binary Newick input and output.
//!
//! ```text
//! Tree    := Subtree ";"
//! Subtree := Leaf | "(" Subtree "," Subtree ")" [label]
//! Leaf    := [label]
//! ```
//!
//! Labels are `[A-Za-z0-9_]+`. A branch length `:number` may follow any
//! subtree and is discarded, as are internal labels. Whitespace is allowed
//! between tokens.

use std::io::BufRead;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, OrderedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("newick parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewickDocument {
    pub text: String,
    pub parsed: OrderedTree,
    /// Leaf labels from left to right; `None` when no leaf is labelled,
    /// otherwise unlabelled leaves appear as empty strings.
    pub leaf_names: Option<Vec<String>>,
}

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn label(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && is_label_byte(self.bytes[self.pos]) {
            self.pos += 1;
        }
        (self.pos > start)
            .then(|| std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii label"))
    }

    fn branch_length(&mut self) -> std::result::Result<(), ParseError> {
        if self.peek() != Some(b':') {
            return Ok(());
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && matches!(
                self.bytes[self.pos],
                b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E'
            )
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii number");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(()),
            _ => Err(ParseError {
                offset: start,
                message: "expected a branch length after ':'".into(),
            }),
        }
    }
}

pub fn parse_newick(text: &str) -> std::result::Result<NewickDocument, ParseError> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    if cur.peek().is_none() {
        return Err(cur.error("empty input"));
    }
    let mut names: Vec<String> = Vec::new();
    let mut any_name = false;
    // children collected so far for each open parenthesis, with its offset
    let mut open: Vec<(usize, Vec<OrderedTree>)> = Vec::new();

    let root = 'outer: loop {
        // descend to the next leaf
        while cur.peek() == Some(b'(') {
            open.push((cur.pos, Vec::with_capacity(2)));
            cur.pos += 1;
        }
        let name = cur.label().map(str::to_owned);
        any_name |= name.is_some();
        names.push(name.unwrap_or_default());
        cur.branch_length()?;
        let mut node = OrderedTree::Leaf;

        // climb while parentheses close
        loop {
            let Some((_, children)) = open.last_mut() else {
                break 'outer node;
            };
            children.push(node);
            match cur.peek() {
                Some(b',') if children.len() == 1 => {
                    cur.pos += 1;
                    continue 'outer;
                }
                Some(b',') => {
                    return Err(cur.error("expected ')': only binary nodes are supported"))
                }
                Some(b')') if children.len() == 2 => {
                    cur.pos += 1;
                    let (_, mut children) = open.pop().expect("open node");
                    let right = children.pop().expect("two children");
                    let left = children.pop().expect("two children");
                    node = OrderedTree::join(left, right);
                    cur.label();
                    cur.branch_length()?;
                }
                Some(b')') => return Err(cur.error("expected ',': a node needs two children")),
                Some(b';') => {
                    let (at, _) = open[open.len() - 1];
                    return Err(cur.error(format!("expected ')' to close the '(' at byte {at}")));
                }
                Some(_) => return Err(cur.error("expected ',' or ')'")),
                None => {
                    let (at, _) = open[open.len() - 1];
                    return Err(ParseError {
                        offset: at,
                        message: "unbalanced '(': expected ')' before end of input".into(),
                    });
                }
            }
        }
    };

    match cur.peek() {
        Some(b';') => cur.pos += 1,
        None => return Err(cur.error("missing ';' at end of tree")),
        Some(b')') => return Err(cur.error("unbalanced ')'")),
        Some(_) => return Err(cur.error("expected ';'")),
    }
    if cur.peek().is_some() {
        return Err(cur.error("unexpected text after ';'"));
    }
    Ok(NewickDocument {
        text: text.to_owned(),
        parsed: root,
        leaf_names: any_name.then_some(names),
    })
}

/// Render `t` with the given leaf names (left to right), or `x1..xn`.
pub fn to_newick<S: AsRef<str>>(t: &OrderedTree, names: Option<&[S]>) -> Result<String> {
    let n = t.size();
    let labels: Vec<String> = match names {
        Some(names) => {
            if names.len() != n {
                return Err(Error::NameCountMismatch {
                    expected: n,
                    got: names.len(),
                });
            }
            for name in names {
                if !name.as_ref().bytes().all(is_label_byte) {
                    return Err(Error::InvalidParameter(format!(
                        "leaf name {:?} is not alphanumeric/underscore",
                        name.as_ref()
                    )));
                }
            }
            names.iter().map(|s| s.as_ref().to_owned()).collect()
        }
        None => (1..=n).map(|i| format!("x{i}")).collect(),
    };

    enum Step<'a> {
        Visit(&'a OrderedTree),
        Text(&'static str),
    }
    let mut out = String::with_capacity(8 * n);
    let mut leaves = labels.iter();
    let mut stack = vec![Step::Text(";"), Step::Visit(t)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Text(s) => out.push_str(s),
            Step::Visit(node) => match node.children() {
                None => out.push_str(leaves.next().expect("one name per leaf")),
                Some((l, r)) => {
                    out.push('(');
                    stack.extend([
                        Step::Text(")"),
                        Step::Visit(r),
                        Step::Text(","),
                        Step::Visit(l),
                    ]);
                }
            },
        }
    }
    Ok(out)
}

/// One tree per non-blank line: `(line number, parse result)`, 1-based.
pub fn read_newick_lines<R: BufRead>(
    reader: R,
) -> std::io::Result<Vec<(usize, std::result::Result<NewickDocument, ParseError>)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, parse_newick(&line)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_ordered;
    use num_rational::BigRational;
    use num_traits::One;

    fn names(doc: &NewickDocument) -> Vec<&str> {
        doc.leaf_names
            .as_ref()
            .unwrap()
            .iter()
            .map(String::as_str)
            .collect()
    }

    #[test]
    fn small_documents() {
        let doc = parse_newick("(a,b);").unwrap();
        assert_eq!(doc.parsed, OrderedTree::cherry());
        assert_eq!(names(&doc), ["a", "b"]);

        let doc = parse_newick("((a,b),(c,d));").unwrap();
        assert_eq!(doc.parsed, OrderedTree::complete(2));
        assert_eq!(doc.parsed.gamma(), 2);

        let doc = parse_newick("((((a,b),c),d),e);").unwrap();
        assert_eq!(doc.parsed, OrderedTree::left_comb(5));
        assert_eq!(doc.parsed.gamma(), 5);
        assert_eq!(doc.parsed.colless_index().unwrap(), BigRational::one());
    }

    #[test]
    fn lengths_labels_and_whitespace() {
        let doc = parse_newick(" ( a:0.1 , ( b:2 ,c:1e-3 )inner:0.5 )root:0 ;\n").unwrap();
        assert_eq!(doc.parsed.to_string(), "(*,(*,*))");
        assert_eq!(names(&doc), ["a", "b", "c"]);
        let doc = parse_newick("((,),);").unwrap();
        assert_eq!(doc.parsed.size(), 3);
        assert_eq!(doc.leaf_names, None);
        let doc = parse_newick("(a,);").unwrap();
        assert_eq!(names(&doc), ["a", ""]);
        assert_eq!(parse_newick("x;").unwrap().parsed, OrderedTree::Leaf);
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("", 0),
            ("   ", 3),
            ("(a,b)", 5),
            ("(a,b,c);", 4),
            ("(a);", 2),
            ("((a,b);", 6),
            ("((a,b),c", 0),
            ("(a,b));", 5),
            ("(a,b);x", 6),
            ("(a,b:);", 5),
            ("(a-b,c);", 2),
        ];
        for (text, offset) in cases {
            let err = parse_newick(text).unwrap_err();
            assert_eq!(err.offset, offset, "{text:?}: {err}");
        }
    }

    #[test]
    fn serialization() {
        assert_eq!(
            to_newick::<&str>(&OrderedTree::cherry(), None).unwrap(),
            "(x1,x2);"
        );
        let comb = OrderedTree::left_comb(3);
        assert_eq!(
            to_newick(&comb, Some(&["a", "b", "c"])).unwrap(),
            "((a,b),c);"
        );
        assert_eq!(
            to_newick(&comb.mirror(), Some(&["a", "b", "c"])).unwrap(),
            "(a,(b,c));"
        );
        assert_eq!(
            to_newick(&comb, Some(&["a", "b"])),
            Err(Error::NameCountMismatch {
                expected: 3,
                got: 2
            })
        );
        assert!(matches!(
            to_newick(&comb, Some(&["a", "b c", "d"])),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn round_trip_all_size_six() {
        let mut count = 0;
        for t in enumerate_ordered(6).unwrap() {
            let text = to_newick::<&str>(&t, None).unwrap();
            let doc = parse_newick(&text).unwrap();
            assert_eq!(doc.parsed, t);
            assert_eq!(names(&doc), ["x1", "x2", "x3", "x4", "x5", "x6"]);
            count += 1;
        }
        assert_eq!(count, 42);
    }

    #[test]
    fn line_reader() {
        let input = "(a,b);\n\n((a,b),c);\n(a,b\n";
        let docs = read_newick_lines(input.as_bytes()).unwrap();
        let lines: Vec<usize> = docs.iter().map(|(l, _)| *l).collect();
        assert_eq!(lines, [1, 3, 4]);
        assert!(docs[0].1.is_ok() && docs[1].1.is_ok() && docs[2].1.is_err());
    }
}
