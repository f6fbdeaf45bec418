//! Recursive-descent parsers for the textual forms accepted on the command
//! line: set expressions, map expressions, ε-schedules and checkpoint
//! schedules.
//!
//! ```text
//! expr  := all | empty | evens | odds | squares | ap(int,int)
//!        | union(expr,expr) | inter(expr,expr) | diff(expr,expr)
//!        | window(expr,int,int)
//! mexpr := id | dilate(int) | interleave3 | blockperm(int,…) | finperm(int,…)
//!        | compose(mexpr,mexpr)
//! eps   := geo(a,r)                  ε_k = a·r^k
//! ckpt  := geo(theta,n0) | list(int,…)
//! ```

use crate::error::{Error, Result};
use crate::intertwiner::EpsilonSchedule;
use crate::maps::InjectiveMap;
use crate::rational::parse_rational;
use crate::set_algebra::{CheckpointSchedule, IntSet};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => self.error(format!("expected `{c}`, found `{found}`")),
            None => self.error(format!("expected `{c}`, found end of input")),
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return match self.peek() {
                Some(c) => self.error(format!("expected identifier, found `{c}`")),
                None => self.error("expected identifier, found end of input"),
            };
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    /// A raw numeric token: digits, sign, `.`, `/`.
    fn number_token(&mut self) -> Result<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | '/')))
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return self.error("expected a number");
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn signed_int(&mut self) -> Result<(usize, i128)> {
        let (start, tok) = self.number_token()?;
        match tok.parse::<i128>() {
            Ok(v) => Ok((start, v)),
            Err(_) => Err(Error::Syntax {
                pos: start,
                msg: format!("`{tok}` is not an integer"),
            }),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        let (start, v) = self.signed_int()?;
        u64::try_from(v).map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("expected a non-negative integer, found {v}"),
        })
    }

    fn uint_list(&mut self) -> Result<Vec<u64>> {
        let mut out = vec![self.uint()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.uint()?);
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.error(format!("unexpected trailing input starting at `{c}`")),
        }
    }

    fn set_expr(&mut self) -> Result<IntSet> {
        let (at, name) = self.ident()?;
        match name {
            "all" => Ok(IntSet::all()),
            "empty" => Ok(IntSet::empty()),
            "evens" => Ok(IntSet::evens()),
            "odds" => Ok(IntSet::odds()),
            "squares" => Ok(IntSet::squares()),
            "ap" => {
                self.expect('(')?;
                let (a_pos, a) = self.signed_int()?;
                self.expect(',')?;
                let (m_pos, m) = self.signed_int()?;
                self.expect(')')?;
                if a < 0 {
                    return Err(Error::Syntax {
                        pos: a_pos,
                        msg: format!("ap residue must be ≥ 0, got {a}"),
                    });
                }
                if m < 1 {
                    return Err(Error::Syntax {
                        pos: m_pos,
                        msg: format!("ap modulus must be ≥ 1, got {m}"),
                    });
                }
                let (a, m) = (a as u64, m as u64);
                IntSet::progression(a, m)
            }
            "union" | "inter" | "diff" => {
                self.expect('(')?;
                let left = self.set_expr()?;
                self.expect(',')?;
                let right = self.set_expr()?;
                self.expect(')')?;
                Ok(match name {
                    "union" => left.union(&right),
                    "inter" => left.intersect(&right),
                    _ => left.difference(&right),
                })
            }
            "window" => {
                self.expect('(')?;
                let inner = self.set_expr()?;
                self.expect(',')?;
                let lo = self.uint()?;
                self.expect(',')?;
                let hi = self.uint()?;
                self.expect(')')?;
                inner.window(lo, Some(hi))
            }
            _ => Err(Error::UnknownIdentifier {
                pos: at,
                name: name.to_string(),
            }),
        }
    }

    fn map_expr(&mut self) -> Result<InjectiveMap> {
        let (at, name) = self.ident()?;
        match name {
            "id" => Ok(InjectiveMap::identity()),
            "interleave3" => Ok(InjectiveMap::interleave3()),
            "dilate" => {
                self.expect('(')?;
                let m = self.uint()?;
                self.expect(')')?;
                InjectiveMap::dilate(m)
            }
            "blockperm" | "finperm" => {
                self.expect('(')?;
                let list = self.uint_list()?;
                self.expect(')')?;
                if name == "blockperm" {
                    InjectiveMap::block_permutation(list)
                } else {
                    InjectiveMap::finite_permutation(list)
                }
            }
            "compose" => {
                self.expect('(')?;
                let outer = self.map_expr()?;
                self.expect(',')?;
                let inner = self.map_expr()?;
                self.expect(')')?;
                Ok(InjectiveMap::compose(&outer, &inner))
            }
            _ => Err(Error::UnknownIdentifier {
                pos: at,
                name: name.to_string(),
            }),
        }
    }
}

/// Parses a set expression. The resulting set is labelled with the input text, trimmed.
pub fn parse_set_expr(text: &str) -> Result<IntSet> {
    let mut p = Parser::new(text);
    let set = p.set_expr()?;
    p.finish()?;
    Ok(set.relabel(text.trim()))
}

pub fn parse_map_expr(text: &str) -> Result<InjectiveMap> {
    let mut p = Parser::new(text);
    let map = p.map_expr()?;
    p.finish()?;
    Ok(map)
}

/// `geo(a,r)`: `ε_k = a·r^k`.
pub fn parse_epsilon_schedule(text: &str) -> Result<EpsilonSchedule> {
    let mut p = Parser::new(text);
    let (at, name) = p.ident()?;
    if name != "geo" {
        return Err(Error::UnknownIdentifier {
            pos: at,
            name: name.to_string(),
        });
    }
    p.expect('(')?;
    let (_, a) = p.number_token()?;
    p.expect(',')?;
    let (_, r) = p.number_token()?;
    p.expect(')')?;
    p.finish()?;
    EpsilonSchedule::geometric(parse_rational(a)?, parse_rational(r)?)
}

/// `geo(theta,n0)` or `list(n1,n2,…)`.
pub fn parse_checkpoint_schedule(text: &str) -> Result<CheckpointSchedule> {
    let mut p = Parser::new(text);
    let (at, name) = p.ident()?;
    let schedule = match name {
        "geo" => {
            p.expect('(')?;
            let (tpos, theta) = p.number_token()?;
            let theta: f64 = theta.parse().map_err(|_| Error::Syntax {
                pos: tpos,
                msg: format!("`{theta}` is not a number"),
            })?;
            p.expect(',')?;
            let start = p.uint()?;
            p.expect(')')?;
            CheckpointSchedule::geometric(theta, start)?
        }
        "list" => {
            p.expect('(')?;
            let list = p.uint_list()?;
            p.expect(')')?;
            CheckpointSchedule::explicit(list)?
        }
        _ => {
            return Err(Error::UnknownIdentifier {
                pos: at,
                name: name.to_string(),
            })
        }
    };
    p.finish()?;
    Ok(schedule)
}
