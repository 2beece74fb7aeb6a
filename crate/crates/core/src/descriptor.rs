//! Text descriptors for groups:
//!
//! ```text
//! group := "cyclic:" n | "sym:" k | "q8" | "ut:" p ":" m | "ut:" p ":" l ":" m
//!        | "wreath:" group ":" group | "product:" group "x" group
//! ```
//!
//! `ut:p:m` means ℓ = p + 1. Descriptors nest, e.g.
//! `wreath:product:cyclic:2xcyclic:2:sym:3`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::{Cyclic, DirectProduct, GroupRef, Quaternion, Symmetric};
use crate::unitri::{UnitriGroup, UtParams};
use crate::wreath::WreathProduct;

pub fn parse_group(text: &str) -> Result<GroupRef> {
    let mut parser = Parser { src: text.trim().as_bytes(), pos: 0 };
    let g = parser.group()?;
    if parser.pos != parser.src.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(g)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: format!("group descriptor: {msg}") }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn name(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_lowercase()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "group descriptor: expected a number".into() })
    }

    fn arg(&mut self) -> Result<u64> {
        self.expect(b':')?;
        self.number()
    }

    fn small(&self, n: u64) -> Result<u32> {
        u32::try_from(n).map_err(|_| self.error("number too large"))
    }

    fn group(&mut self) -> Result<GroupRef> {
        let start = self.pos;
        let name = self.name().to_string();
        Ok(match name.as_str() {
            "cyclic" => {
                let n = self.arg()?;
                Arc::new(Cyclic::new(self.small(n)?)?)
            }
            "sym" => Arc::new(Symmetric::new(self.arg()? as usize)?),
            "q" => {
                self.expect(b'8')?;
                Arc::new(Quaternion)
            }
            "ut" => {
                let p = self.arg()?;
                let second = self.arg()?;
                let params = if self.peek() == Some(b':') && self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
                {
                    let m = self.arg()?;
                    UtParams::new(self.small(p)?, second as usize, m as usize)?
                } else {
                    UtParams::lemma(self.small(p)?, second as usize)?
                };
                Arc::new(UnitriGroup::new(params))
            }
            "wreath" => {
                self.expect(b':')?;
                let base = self.group()?;
                self.expect(b':')?;
                let top = self.group()?;
                Arc::new(WreathProduct::new(base, top)?)
            }
            "product" => {
                self.expect(b':')?;
                let left = self.group()?;
                self.expect(b'x')?;
                let right = self.group()?;
                Arc::new(DirectProduct::new(left, right))
            }
            _ => return Err(Error::Parse { pos: start, msg: format!("group descriptor: unknown group '{name}'") }),
        })
    }
}
