//! Plain-text code files.
//!
//! ```text
//! n k m tau_default seed_rng
//! <2(n+m) rows of 2(n+m) bits: the seed map, row-major on (x | z) coordinates>
//! <gate list, one per line: `H a`, `S a`, `CNOT c t`>
//! ```
//!
//! When a gate list is present it must reproduce the matrix.

use std::fmt::Write as _;
use std::path::Path;

use crate::code::{CodeParams, ConvolutionalCode};
use crate::error::{Error, Result};
use crate::symplectic::{CliffordCircuit, Gate, SymplecticMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFile {
    pub params: CodeParams,
    pub tau_default: usize,
    pub seed_rng: u64,
    pub seed_map: SymplecticMap,
    pub gates: Vec<Gate>,
}

impl CodeFile {
    pub fn generate(params: CodeParams, tau_default: usize, seed_rng: u64, depth: Option<usize>) -> Result<Self> {
        let (code, circuit) = ConvolutionalCode::random(params, tau_default, seed_rng, depth)?;
        Ok(CodeFile {
            params,
            tau_default,
            seed_rng,
            seed_map: code.seed().clone(),
            gates: circuit.gates,
        })
    }

    pub fn code(&self, tau: Option<usize>) -> Result<ConvolutionalCode> {
        ConvolutionalCode::new(self.params, self.seed_map.clone(), tau.unwrap_or(self.tau_default))
    }

    pub fn to_text(&self) -> String {
        let CodeParams { n, k, m } = self.params;
        let mut out = format!("{n} {k} {m} {} {}\n", self.tau_default, self.seed_rng);
        for row in self.seed_map.rows() {
            out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
            out.push('\n');
        }
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(hline, "header must be `n k m tau_default seed_rng`"));
        }
        let int = |i: usize| -> Result<u64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(hline, format!("header field {} is not an integer", i + 1)))
        };
        let params = CodeParams::new(int(0)? as usize, int(1)? as usize, int(2)? as usize)?;
        let tau_default = int(3)? as usize;
        if tau_default < 1 {
            return Err(Error::parse(hline, "tau_default must be at least 1"));
        }
        let seed_rng = int(4)?;

        let dim = 2 * params.seed_wires();
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line, row) = lines
                .next()
                .ok_or_else(|| Error::parse(hline, format!("expected {dim} matrix rows")))?;
            if row.len() != dim {
                return Err(Error::parse(line, format!("matrix row must have {dim} bits")));
            }
            let bits = row
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::parse(line, format!("invalid bit {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(bits);
        }
        let seed_map = SymplecticMap::from_rows(&rows)?;

        let mut gates = Vec::new();
        for (line, g) in lines {
            let gate: Gate = g.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
            gates.push(gate);
        }
        if !gates.is_empty() {
            let circuit = CliffordCircuit::new(params.seed_wires(), gates.clone())?;
            if circuit.to_map() != seed_map {
                return Err(Error::parse(hline, "gate list does not reproduce the seed matrix"));
            }
        }
        Ok(CodeFile {
            params,
            tau_default,
            seed_rng,
            seed_map,
            gates,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        CodeFile::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = CodeFile::generate(CodeParams::new(4, 1, 1).unwrap(), 600, 7, None).unwrap();
        assert_eq!(f.gates.len(), 250);
        let text = f.to_text();
        assert!(text.starts_with("4 1 1 600 7\n"));
        assert_eq!(CodeFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = CodeParams::new(3, 1, 1).unwrap();
        let a = CodeFile::generate(p, 10, 3, None).unwrap();
        let b = CodeFile::generate(p, 10, 3, None).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn rejects_inconsistent_files() {
        let f = CodeFile::generate(CodeParams::new(2, 1, 1).unwrap(), 4, 1, Some(12)).unwrap();
        let text = f.to_text();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // Corrupt one gate so it no longer matches the matrix.
        let last = lines.len() - 1;
        lines[last] = if lines[last] == "H 0" { "H 1".into() } else { "H 0".into() };
        assert!(CodeFile::parse(&lines.join("\n")).is_err());
        assert!(CodeFile::parse("2 1 1 4\n").is_err());
        assert!(CodeFile::parse("2 1 1 4 1\n101010\n").is_err());
        // Matrix only, no gates, is accepted.
        let matrix_only: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        assert_eq!(CodeFile::parse(&matrix_only).unwrap().seed_map, f.seed_map);
    }
}
