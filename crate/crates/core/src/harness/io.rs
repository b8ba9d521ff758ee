//! Sample files: a header line `# pathguess-sample v1 n=<n>` followed by one
//! decimal symbol id per line.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{Sample, Symbol};

pub const SAMPLE_HEADER: &str = "# pathguess-sample v1";

pub fn write_sample<W: Write>(mut out: W, sample: &Sample) -> Result<()> {
    writeln!(out, "{SAMPLE_HEADER} n={}", sample.len())?;
    for s in sample.symbols() {
        writeln!(out, "{}", s.0)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a sample. Ids may be separated by any whitespace; lines starting
/// with `#` are comments, except that a versioned header fixes the expected
/// length.
pub fn read_sample<R: BufRead>(input: R) -> Result<Sample> {
    let mut declared: Option<usize> = None;
    let mut symbols = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(SAMPLE_HEADER) {
            let n = rest
                .trim()
                .strip_prefix("n=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: malformed sample header", lineno + 1)))?;
            declared = Some(n);
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        for tok in trimmed.split_whitespace() {
            let id: u32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a symbol id", lineno + 1)))?;
            symbols.push(Symbol(id));
        }
    }
    if let Some(n) = declared {
        if n != symbols.len() {
            return Err(Error::Parse(format!("header declares n={n} but the file holds {} symbols", symbols.len())));
        }
    }
    Sample::new(symbols)
}

pub fn load_sample(path: &Path) -> Result<Sample> {
    read_sample(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn save_sample(path: &Path, sample: &Sample) -> Result<()> {
    write_sample(std::io::BufWriter::new(std::fs::File::create(path)?), sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = Sample::from_ids(&[0, 2, 1, 1]).unwrap();
        let mut buf = Vec::new();
        write_sample(&mut buf, &s).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# pathguess-sample v1 n=4\n0\n2\n1\n1\n");
        assert_eq!(read_sample(&buf[..]).unwrap(), s);
    }

    #[test]
    fn free_form_and_errors() {
        assert_eq!(read_sample(&b"0 1\n# note\n1\t0\n"[..]).unwrap(), Sample::from_ids(&[0, 1, 1, 0]).unwrap());
        assert!(matches!(read_sample(&b"0 x\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_sample(&b"# pathguess-sample v1 n=3\n0\n"[..]), Err(Error::Parse(_))));
    }
}
