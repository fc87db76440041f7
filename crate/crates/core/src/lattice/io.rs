use std::fmt::Write as _;

use super::Point;
use crate::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_pair(line: usize, s: &str) -> Result<Point> {
    let mut it = s.split_whitespace();
    let mut coord = || -> Result<i64> {
        it.next()
            .ok_or_else(|| Error::parse(line, "expected two integers"))?
            .parse()
            .map_err(|_| Error::parse(line, "coordinate is not an integer"))
    };
    let p = Point::new(coord()?, coord()?);
    if it.next().is_some() {
        return Err(Error::parse(line, "expected exactly two integers"));
    }
    Ok(p)
}

/// Parses lines `x y`; `#` starts a comment.
pub fn parse_points_file(text: &str) -> Result<Vec<Point>> {
    content_lines(text).map(|(i, l)| parse_pair(i, l)).collect()
}

pub fn write_points_file(points: &[Point]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
    s
}

/// Parses lines `x y -> u v`.
pub fn parse_map_file(text: &str) -> Result<Vec<(Point, Point)>> {
    content_lines(text)
        .map(|(i, l)| {
            let (a, b) = l.split_once("->").ok_or_else(|| Error::parse(i, "expected `x y -> u v`"))?;
            Ok((parse_pair(i, a)?, parse_pair(i, b)?))
        })
        .collect()
}

pub fn write_map_file(pairs: impl IntoIterator<Item = (Point, Point)>) -> String {
    let mut s = String::new();
    for (p, q) in pairs {
        let _ = writeln!(s, "{} {} -> {} {}", p.x, p.y, q.x, q.y);
    }
    s
}
