//! Line-oriented model files: every line is `key value value ...`, values
//! separated by single spaces. Floats use the shortest decimal form that
//! parses back to the same bits.

use std::fmt::{Display, Write as _};
use std::str::FromStr;

use crate::dataset::{FeatureId, TrafficClass};
use crate::error::{Error, Result};

pub(crate) const MAGIC: &str = "mibids-model";
pub(crate) const VERSION: u32 = 1;

#[derive(Default)]
pub(crate) struct Writer {
    out: String,
}

impl Writer {
    pub fn new() -> Writer {
        Writer::default()
    }

    pub fn line<T: Display>(&mut self, key: &str, values: impl IntoIterator<Item = T>) {
        self.out.push_str(key);
        for v in values {
            let _ = write!(self.out, " {v}");
        }
        self.out.push('\n');
    }

    pub fn floats<'a>(&mut self, key: &str, values: impl IntoIterator<Item = &'a f64>) {
        self.out.push_str(key);
        for v in values {
            let _ = write!(self.out, " {v:?}");
        }
        self.out.push('\n');
    }

    pub fn classes(&mut self, classes: &[TrafficClass]) {
        self.line("classes", classes.iter().map(|c| c.as_str()));
    }

    pub fn schema(&mut self, schema: &[FeatureId]) {
        self.line("schema", schema.iter().map(|f| f.index()));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub(crate) struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

impl<'a> Reader<'a> {
    pub fn new(text: &'a str) -> Reader<'a> {
        Reader {
            lines: text.lines().enumerate(),
        }
    }

    /// Values of the next line, which must start with `key`.
    pub fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let (no, line) = self
            .lines
            .next()
            .ok_or_else(|| format_err(format!("unexpected end of file, wanted `{key}`")))?;
        let mut parts = line.split(' ');
        match parts.next() {
            Some(k) if k == key => Ok(parts.collect()),
            other => Err(format_err(format!(
                "line {}: expected `{key}`, found `{}`",
                no + 1,
                other.unwrap_or("")
            ))),
        }
    }

    pub fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Vec<T>> {
        self.expect(key)?
            .into_iter()
            .map(|v| v.parse().map_err(|_| format_err(format!("`{key}`: bad value `{v}`"))))
            .collect()
    }

    pub fn single<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let mut v = self.parsed(key)?;
        if v.len() != 1 {
            return Err(format_err(format!("`{key}` expects one value")));
        }
        Ok(v.pop().unwrap())
    }

    pub fn floats(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = self.parsed(key)?;
        if v.len() != len {
            return Err(format_err(format!("`{key}` expects {len} values, got {}", v.len())));
        }
        Ok(v)
    }

    pub fn classes(&mut self) -> Result<Vec<TrafficClass>> {
        self.expect("classes")?
            .into_iter()
            .map(|c| c.parse().map_err(|_| format_err(format!("bad class `{c}`"))))
            .collect()
    }

    pub fn schema(&mut self) -> Result<Vec<FeatureId>> {
        self.parsed::<usize>("schema")?
            .into_iter()
            .map(FeatureId::new)
            .collect()
    }

    pub fn header(&mut self) -> Result<String> {
        let v = self.expect(MAGIC)?;
        match v.as_slice() {
            [ver] if ver.parse::<u32>().ok() == Some(VERSION) => {}
            _ => return Err(format_err("unsupported model version")),
        }
        let kind = self.expect("kind")?;
        kind.first()
            .map(|s| s.to_string())
            .ok_or_else(|| format_err("missing kind"))
    }

    pub fn end(&mut self) -> Result<()> {
        self.expect("end")?;
        Ok(())
    }
}

pub(crate) fn header(w: &mut Writer, kind: &str) {
    w.line(MAGIC, [VERSION]);
    w.line("kind", [kind]);
}
