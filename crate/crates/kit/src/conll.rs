//! CoNLL-2012 column files.
//!
//! Two layouts are read:
//!
//! * the full CoNLL-2012 layout: doc-id, part, token index, word, POS,
//!   parse bit, predicate lemma, frameset, word sense, speaker, named
//!   entity, one argument column per predicate, coreference last;
//! * a minimal five-column layout for hand-written fixtures: doc-id, token
//!   index, word, `POS[/ROLE...]`, coreference. Role tags are `SBJ`, `OBJ`,
//!   `OTH` (grammatical) and `ARG0`, `ARG1`, `ARGM-*`... (semantic), e.g.
//!   `PRP/SBJ/ARG0`.
//!
//! Sentences end at blank lines or when the token index restarts at 0.
//! Documents are delimited by `#begin document` / `#end document`; rows
//! outside such a block form implicit documents keyed by their doc-id.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use centering_core::{ArgSpan, Document, EntityId, Grammatical, MentionSpan, Semantic, Sentence, Token};

pub const MINIMAL_COLUMNS: usize = 5;
/// Columns of a full row without predicate-argument columns.
pub const FULL_BASE_COLUMNS: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ConllError {
    pub line: usize,
    pub kind: ErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ErrorKind {
    #[error("{0}")]
    Io(String),
    #[error("unsupported column count {0} (expected 5, or 12 and more)")]
    ColumnCount(usize),
    #[error("ragged rows: {got} columns where the sentence has {expected}")]
    Ragged { expected: usize, got: usize },
    #[error("token index {got} where {expected} was expected")]
    TokenIndex { expected: usize, got: String },
    #[error("malformed coreference entry `{0}`")]
    MalformedCoref(String),
    #[error("chain id `{0}` is not an integer")]
    ChainId(String),
    #[error("chain {0} closed without being opened")]
    CloseWithoutOpen(u64),
    #[error("chain {0} opened again while still open")]
    Reopened(u64),
    #[error("chain {0} still open at document end")]
    UnclosedAtDocumentEnd(u64),
    #[error("malformed argument column entry `{0}`")]
    MalformedArgs(String),
    #[error("unknown role tag `{0}`")]
    RoleTag(String),
    #[error("`#begin document` inside an open document")]
    NestedDocument,
    #[error("`#end document` without an open document")]
    StrayEnd,
    #[error("{0}")]
    Invalid(String),
}

fn err(line: usize, kind: ErrorKind) -> ConllError {
    ConllError { line, kind }
}

/// Reads every document of a CoNLL stream.
pub fn parse_conll<R: BufRead>(reader: R) -> Result<Vec<Document>, ConllError> {
    let mut parser = Parser::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| err(i + 1, ErrorKind::Io(e.to_string())))?;
        parser.line(i + 1, &line)?;
    }
    parser.finish()
}

pub fn parse_conll_str(text: &str) -> Result<Vec<Document>, ConllError> {
    parse_conll(text.as_bytes())
}

#[derive(Debug)]
struct Row {
    line: usize,
    cols: Vec<String>,
}

#[derive(Debug, Default)]
struct DocBuilder {
    doc_id: String,
    part: u32,
    explicit: bool,
    columns: Option<usize>,
    sentences: Vec<Sentence>,
    mentions: Vec<MentionSpan>,
    /// Open brackets per chain id: (sentence, start token).
    open: HashMap<u64, (usize, usize)>,
}

#[derive(Debug, Default)]
struct Parser {
    docs: Vec<Document>,
    doc: Option<DocBuilder>,
    rows: Vec<Row>,
    last_line: usize,
}

impl Parser {
    fn line(&mut self, no: usize, raw: &str) -> Result<(), ConllError> {
        self.last_line = no;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("#begin document") {
            self.flush_sentence()?;
            match &self.doc {
                Some(d) if d.explicit => return Err(err(no, ErrorKind::NestedDocument)),
                Some(_) => self.finish_doc(no)?,
                None => {}
            }
            let (doc_id, part) = parse_begin(rest);
            self.doc = Some(DocBuilder { doc_id, part, explicit: true, ..DocBuilder::default() });
            return Ok(());
        }
        if line.starts_with("#end document") {
            self.flush_sentence()?;
            if self.doc.as_ref().is_none_or(|d| !d.explicit) {
                return Err(err(no, ErrorKind::StrayEnd));
            }
            return self.finish_doc(no);
        }
        if line.starts_with('#') {
            return Ok(());
        }
        if line.is_empty() {
            return self.flush_sentence();
        }
        let cols: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        let n = cols.len();
        if n != MINIMAL_COLUMNS && n < FULL_BASE_COLUMNS {
            return Err(err(no, ErrorKind::ColumnCount(n)));
        }
        // implicit documents switch on the doc-id column
        let switch = match &self.doc {
            None => true,
            Some(d) => !d.explicit && d.doc_id != cols[0],
        };
        if switch {
            self.flush_sentence()?;
            if self.doc.is_some() {
                self.finish_doc(no)?;
            }
            let part = if n == MINIMAL_COLUMNS { 0 } else { cols[1].parse().unwrap_or(0) };
            self.doc = Some(DocBuilder { doc_id: cols[0].clone(), part, ..DocBuilder::default() });
        }
        let index_col = if n == MINIMAL_COLUMNS { 1 } else { 2 };
        if cols[index_col] == "0" && !self.rows.is_empty() {
            self.flush_sentence()?;
        }
        let doc = self.doc.as_mut().expect("document opened above");
        match doc.columns {
            Some(c) if (c == MINIMAL_COLUMNS) != (n == MINIMAL_COLUMNS) => {
                return Err(err(no, ErrorKind::Ragged { expected: c, got: n }))
            }
            _ => doc.columns = Some(n),
        }
        if let Some(first) = self.rows.first() {
            if first.cols.len() != n {
                return Err(err(no, ErrorKind::Ragged { expected: first.cols.len(), got: n }));
            }
        }
        let expected = self.rows.len();
        if cols[index_col].parse::<usize>().ok() != Some(expected) {
            return Err(err(no, ErrorKind::TokenIndex { expected, got: cols[index_col].clone() }));
        }
        self.rows.push(Row { line: no, cols });
        Ok(())
    }

    fn flush_sentence(&mut self) -> Result<(), ConllError> {
        if self.rows.is_empty() {
            return Ok(());
        }
        let rows = std::mem::take(&mut self.rows);
        let doc = self.doc.as_mut().expect("rows imply an open document");
        let s_idx = doc.sentences.len();
        let minimal = rows[0].cols.len() == MINIMAL_COLUMNS;
        let mut tokens = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            tokens.push(if minimal { minimal_token(i, row)? } else { full_token(i, row) });
            let coref = row.cols.last().expect("non-empty row");
            read_coref(coref, row.line, s_idx, i, &mut doc.open, &mut doc.mentions)?;
        }
        let mut sentence = Sentence::new(tokens);
        if !minimal {
            read_args(&rows, &mut sentence)?;
        }
        doc.sentences.push(sentence);
        Ok(())
    }

    fn finish_doc(&mut self, line: usize) -> Result<(), ConllError> {
        let Some(doc) = self.doc.take() else {
            return Ok(());
        };
        if let Some(id) = doc.open.keys().min() {
            return Err(err(line, ErrorKind::UnclosedAtDocumentEnd(*id)));
        }
        let built = Document::new(doc.doc_id, doc.part, doc.sentences, doc.mentions)
            .map_err(|e| err(line, ErrorKind::Invalid(e.to_string())))?;
        self.docs.push(built);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<Document>, ConllError> {
        let line = self.last_line;
        self.flush_sentence()?;
        self.finish_doc(line)?;
        Ok(self.docs)
    }
}

/// `(bc/cctv/00/cctv_0001); part 000` or a bare id.
fn parse_begin(rest: &str) -> (String, u32) {
    let rest = rest.trim();
    let (id_part, part) = match rest.split_once(';') {
        Some((id, tail)) => {
            let part = tail.trim().trim_start_matches("part").trim().parse().unwrap_or(0);
            (id, part)
        }
        None => (rest, 0),
    };
    let id = id_part.trim().trim_start_matches('(').trim_end_matches(')').to_owned();
    (id, part)
}

fn dash_empty(s: &str) -> String {
    if s == "-" {
        String::new()
    } else {
        s.to_owned()
    }
}

fn full_token(i: usize, row: &Row) -> Token {
    let c = &row.cols;
    let mut t = Token::new(i, c[3].as_str(), c[4].as_str());
    t.parse_bit = c[5].clone();
    t.speaker = dash_empty(&c[9]);
    t.extra = vec![c[6].clone(), c[7].clone(), c[8].clone(), c[10].clone()];
    t
}

fn minimal_token(i: usize, row: &Row) -> Result<Token, ConllError> {
    let c = &row.cols;
    let mut tags = c[3].split('/');
    let pos = tags.next().unwrap_or_default();
    let mut t = Token::new(i, c[2].as_str(), pos);
    for tag in tags {
        match tag {
            "SBJ" => t.role_hint = Some(Grammatical::Subject),
            "OBJ" => t.role_hint = Some(Grammatical::Object),
            "OTH" => t.role_hint = Some(Grammatical::Other),
            "ARG0" => t.semantic_hint = Some(Semantic::Agent),
            "ARG1" => t.semantic_hint = Some(Semantic::Patient),
            a if a.starts_with("ARG") => t.semantic_hint = Some(Semantic::Other),
            other => return Err(err(row.line, ErrorKind::RoleTag(other.to_owned()))),
        }
    }
    Ok(t)
}

fn chain_id(s: &str, line: usize) -> Result<u64, ConllError> {
    s.parse().map_err(|_| err(line, ErrorKind::ChainId(s.to_owned())))
}

fn read_coref(
    cell: &str,
    line: usize,
    sentence: usize,
    token: usize,
    open: &mut HashMap<u64, (usize, usize)>,
    out: &mut Vec<MentionSpan>,
) -> Result<(), ConllError> {
    if cell == "-" || cell == "_" {
        return Ok(());
    }
    for entry in cell.split('|') {
        let opens = entry.starts_with('(');
        let closes = entry.ends_with(')');
        let body = entry.trim_start_matches('(').trim_end_matches(')');
        if body.is_empty() || !(opens || closes) || entry.len() - body.len() != usize::from(opens) + usize::from(closes) {
            return Err(err(line, ErrorKind::MalformedCoref(entry.to_owned())));
        }
        let id = chain_id(body, line)?;
        match (opens, closes) {
            (true, true) => out.push(MentionSpan { sentence, start: token, end: token, chain: EntityId(id) }),
            (true, false) => {
                if open.insert(id, (sentence, token)).is_some() {
                    return Err(err(line, ErrorKind::Reopened(id)));
                }
            }
            (false, true) => {
                let (s, start) = open.remove(&id).ok_or_else(|| err(line, ErrorKind::CloseWithoutOpen(id)))?;
                if s == sentence {
                    out.push(MentionSpan { sentence, start, end: token, chain: EntityId(id) });
                } else {
                    log::warn!("line {line}: mention of chain {id} crosses a sentence boundary; dropped");
                }
            }
            (false, false) => unreachable!(),
        }
    }
    Ok(())
}

/// Predicate-argument spans from the argument columns of one sentence.
fn read_args(rows: &[Row], sentence: &mut Sentence) -> Result<(), ConllError> {
    let n_cols = rows[0].cols.len();
    let preds = n_cols - FULL_BASE_COLUMNS;
    sentence.predicates = preds;
    for k in 0..preds {
        let col = 11 + k;
        let mut spans: Vec<(String, usize, usize)> = Vec::new();
        let mut open: Option<(String, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            let cell = row.cols[col].as_str();
            let malformed = || err(row.line, ErrorKind::MalformedArgs(cell.to_owned()));
            let star = cell.find('*').ok_or_else(malformed)?;
            let (head, tail) = (&cell[..star], &cell[star + 1..]);
            if let Some(label) = head.strip_prefix('(') {
                if label.is_empty() || label.contains(['(', ')']) || open.is_some() {
                    return Err(malformed());
                }
                open = Some((label.to_owned(), i));
            } else if !head.is_empty() {
                return Err(malformed());
            }
            match tail {
                "" => {}
                ")" => {
                    let (label, start) = open.take().ok_or_else(malformed)?;
                    spans.push((label, start, i));
                }
                _ => return Err(malformed()),
            }
        }
        if open.is_some() {
            return Err(err(rows[rows.len() - 1].line, ErrorKind::MalformedArgs(format!("unclosed argument in column {}", col + 1))));
        }
        let predicate = spans.iter().find(|s| s.0 == "V").map_or(k, |s| s.1);
        for (label, start, end) in spans {
            for t in &mut sentence.tokens[start..=end] {
                t.srl_args.push((predicate, label.clone()));
            }
            sentence.args.push(ArgSpan { predicate, label, start, end });
        }
    }
    Ok(())
}

/// Coreference cell for every token of one sentence. Closing entries come
/// first, then single-token mentions, then opening entries.
pub fn coref_column(sentence_len: usize, mentions: &[MentionSpan]) -> Vec<String> {
    let mut closes: Vec<Vec<u64>> = vec![Vec::new(); sentence_len];
    let mut singles: Vec<Vec<u64>> = vec![Vec::new(); sentence_len];
    let mut opens: Vec<Vec<(usize, u64)>> = vec![Vec::new(); sentence_len];
    for m in mentions {
        if m.start == m.end {
            singles[m.start].push(m.chain.0);
        } else {
            // longer spans open first so nesting reads outside-in
            opens[m.start].push((m.end, m.chain.0));
            closes[m.end].push(m.chain.0);
        }
    }
    (0..sentence_len)
        .map(|i| {
            let mut parts: Vec<String> = closes[i].iter().map(|id| format!("{id})")).collect();
            parts.extend(singles[i].iter().map(|id| format!("({id})")));
            opens[i].sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            parts.extend(opens[i].iter().map(|(_, id)| format!("({id}")));
            if parts.is_empty() {
                "-".to_owned()
            } else {
                parts.join("|")
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Minimal,
    Full,
}

fn role_tags(t: &Token) -> String {
    let mut s = t.pos.clone();
    match t.role_hint {
        Some(Grammatical::Subject) => s.push_str("/SBJ"),
        Some(Grammatical::Object) => s.push_str("/OBJ"),
        Some(Grammatical::Other) => s.push_str("/OTH"),
        None => {}
    }
    match t.semantic_hint {
        Some(Semantic::Agent) => s.push_str("/ARG0"),
        Some(Semantic::Patient) => s.push_str("/ARG1"),
        Some(Semantic::Other) => s.push_str("/ARGM"),
        None => {}
    }
    s
}

fn arg_cells(sentence: &Sentence) -> Vec<Vec<String>> {
    let mut preds: Vec<usize> = sentence.args.iter().map(|a| a.predicate).collect();
    preds.sort();
    preds.dedup();
    while preds.len() < sentence.predicates {
        preds.push(usize::MAX);
    }
    preds
        .iter()
        .map(|&p| {
            let mut cells = vec!["*".to_owned(); sentence.len()];
            for a in sentence.args.iter().filter(|a| a.predicate == p) {
                cells[a.start] = format!("({}{}", a.label, cells[a.start]);
                cells[a.end].push(')');
            }
            cells
        })
        .collect()
}

/// Writes documents back out under their own mentions.
pub fn write_documents(docs: &[Document], layout: Layout) -> String {
    let mut out = String::new();
    for doc in docs {
        match layout {
            Layout::Minimal => writeln!(out, "#begin document {}", doc.doc_id),
            Layout::Full => writeln!(out, "#begin document ({}); part {:03}", doc.doc_id, doc.part),
        }
        .expect("writing to a String");
        for (s_idx, sentence) in doc.sentences.iter().enumerate() {
            let ms: Vec<MentionSpan> = doc.mentions.iter().filter(|m| m.sentence == s_idx).copied().collect();
            let coref = coref_column(sentence.len(), &ms);
            let args = arg_cells(sentence);
            for (i, t) in sentence.tokens.iter().enumerate() {
                let row = match layout {
                    Layout::Minimal => format!("{} {} {} {} {}", doc.doc_id, i, t.surface, role_tags(t), coref[i]),
                    Layout::Full => {
                        let extra = |k: usize| t.extra.get(k).map_or("-", String::as_str);
                        let speaker = if t.speaker.is_empty() { "-" } else { t.speaker.as_str() };
                        let mut row = format!(
                            "{} {} {} {} {} {} {} {} {} {} {}",
                            doc.doc_id,
                            doc.part,
                            i,
                            t.surface,
                            t.pos,
                            t.parse_bit,
                            extra(0),
                            extra(1),
                            extra(2),
                            speaker,
                            t.extra.get(3).map_or("*", String::as_str)
                        );
                        for col in &args {
                            row.push(' ');
                            row.push_str(&col[i]);
                        }
                        row.push(' ');
                        row.push_str(&coref[i]);
                        row
                    }
                };
                out.push_str(&row);
                out.push('\n');
            }
            out.push('\n');
        }
        out.push_str("#end document\n");
    }
    out
}
