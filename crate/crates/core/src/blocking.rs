//! Blocking schemes: ordered partitions of the point index set.
//!
//! Indices inside a [`Blocking`] are 0-based linear indices (see
//! [`PointGeometry`]). Within a block they are strictly increasing. File
//! formats and [`Blocking::blocks_one_based`] use 1-based indices.

use std::fmt;
use std::path::Path;

use crate::corrmodel::PointGeometry;
use crate::error::{EssError, Result};

/// Row-wise (consecutive runs) or column-wise (strided) arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrangement {
    Row,
    Col,
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arrangement::Row => "row",
            Arrangement::Col => "col",
        })
    }
}

/// `m` blocks of size `b` on a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout1d {
    pub m: usize,
    pub b: usize,
}

impl Layout1d {
    pub fn new(n: usize, m: usize, b: usize) -> Result<Self> {
        if m == 0 || b == 0 || m * b != n {
            return Err(EssError::dims(format!("n = {n} is not m*b = {m}*{b}")));
        }
        Ok(Layout1d { m, b })
    }

    pub fn n(&self) -> usize {
        self.m * self.b
    }
}

/// `m1*m2` blocks of size `b1*b2` on an `(m1 b1) x (m2 b2)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout2d {
    pub m1: usize,
    pub b1: usize,
    pub m2: usize,
    pub b2: usize,
}

impl Layout2d {
    pub fn new(n1: usize, n2: usize, m1: usize, b1: usize, m2: usize, b2: usize) -> Result<Self> {
        Layout1d::new(n1, m1, b1)?;
        Layout1d::new(n2, m2, b2)?;
        Ok(Layout2d { m1, b1, m2, b2 })
    }

    pub fn n1(&self) -> usize {
        self.m1 * self.b1
    }

    pub fn n2(&self) -> usize {
        self.m2 * self.b2
    }

    pub fn first(&self) -> Layout1d {
        Layout1d {
            m: self.m1,
            b: self.b1,
        }
    }

    pub fn second(&self) -> Layout1d {
        Layout1d {
            m: self.m2,
            b: self.b2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockingTag {
    Rw1d(Layout1d),
    Cw1d(Layout1d),
    Mcw1d(Layout1d),
    Prw { g: usize },
    Rw1dUnequal { m: usize },
    Cw1dUnequal { m: usize },
    Rw2d(Layout2d),
    Cw2d(Layout2d),
    Custom,
}

impl fmt::Display for BlockingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockingTag::Rw1d(l) => write!(f, "rw:m={}", l.m),
            BlockingTag::Cw1d(l) => write!(f, "cw:m={}", l.m),
            BlockingTag::Mcw1d(l) => write!(f, "mcw:m={}", l.m),
            BlockingTag::Prw { g } => write!(f, "prw:g={g}"),
            BlockingTag::Rw1dUnequal { m } => write!(f, "rw:m={m}"),
            BlockingTag::Cw1dUnequal { m } => write!(f, "cw:m={m}"),
            BlockingTag::Rw2d(l) => write!(f, "rw2d:m1={},m2={}", l.m1, l.m2),
            BlockingTag::Cw2d(l) => write!(f, "cw2d:m1={},m2={}", l.m1, l.m2),
            BlockingTag::Custom => f.write_str("custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocking {
    n: usize,
    blocks: Vec<Vec<usize>>,
    tag: BlockingTag,
}

impl Blocking {
    /// Validates that `blocks` partition `0..n` into non-empty blocks and
    /// sorts each block ascending.
    pub fn from_blocks(n: usize, mut blocks: Vec<Vec<usize>>, tag: BlockingTag) -> Result<Self> {
        let mut seen = vec![false; n];
        for (u, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(EssError::InvalidBlocking(format!("block {u} is empty")));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(EssError::InvalidBlocking(format!(
                        "index {i} out of range for {n} points"
                    )));
                }
                if seen[i] {
                    return Err(EssError::InvalidBlocking(format!(
                        "index {i} appears twice"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(EssError::InvalidBlocking(format!(
                "index {missing} is not covered"
            )));
        }
        Ok(Blocking { n, blocks, tag })
    }

    pub fn custom(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_blocks(n, blocks, BlockingTag::Custom)
    }

    /// Reads a blocking file: one block per line, whitespace-separated
    /// 1-based indices. Blank lines and `#` comments are skipped.
    pub fn read_custom(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        let blocks = read_block_file(path)?;
        Self::custom(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks `m`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, u: usize) -> &[usize] {
        &self.blocks[u]
    }

    pub fn tag(&self) -> &BlockingTag {
        &self.tag
    }

    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Common block size, if all blocks have the same size.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let b = self.blocks.first()?.len();
        self.blocks.iter().all(|blk| blk.len() == b).then_some(b)
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// The equal-size 1D layout and arrangement for RW/CW blockings.
    pub fn layout_1d(&self) -> Option<(Arrangement, Layout1d)> {
        match self.tag {
            BlockingTag::Rw1d(l) => Some((Arrangement::Row, l)),
            BlockingTag::Cw1d(l) => Some((Arrangement::Col, l)),
            _ => None,
        }
    }

    pub fn layout_2d(&self) -> Option<(Arrangement, Layout2d)> {
        match self.tag {
            BlockingTag::Rw2d(l) => Some((Arrangement::Row, l)),
            BlockingTag::Cw2d(l) => Some((Arrangement::Col, l)),
            _ => None,
        }
    }
}

fn row_blocks(m: usize, b: usize) -> Vec<Vec<usize>> {
    (0..m).map(|u| (u * b..(u + 1) * b).collect()).collect()
}

fn col_blocks(m: usize, b: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|u| (0..b).map(|j| u + j * m).collect())
        .collect()
}

fn blocks_for(arr: Arrangement, l: Layout1d) -> Vec<Vec<usize>> {
    match arr {
        Arrangement::Row => row_blocks(l.m, l.b),
        Arrangement::Col => col_blocks(l.m, l.b),
    }
}

/// Consecutive runs `{(u-1)b + 1, ..., ub}`.
pub fn rw_1d(n: usize, m: usize, b: usize) -> Result<Blocking> {
    let l = Layout1d::new(n, m, b)?;
    Ok(Blocking {
        n,
        blocks: row_blocks(m, b),
        tag: BlockingTag::Rw1d(l),
    })
}

/// Strided sets `{u, u + m, ..., u + (b-1)m}`.
pub fn cw_1d(n: usize, m: usize, b: usize) -> Result<Blocking> {
    let l = Layout1d::new(n, m, b)?;
    Ok(Blocking {
        n,
        blocks: col_blocks(m, b),
        tag: BlockingTag::Cw1d(l),
    })
}

/// Columns of the `b x m` row-major array after reversing every second row.
pub fn mcw_1d(n: usize, m: usize, b: usize) -> Result<Blocking> {
    let l = Layout1d::new(n, m, b)?;
    let blocks = (0..m)
        .map(|c| {
            let mut blk: Vec<usize> = (0..b)
                .map(|r| {
                    if r % 2 == 0 {
                        r * m + c
                    } else {
                        r * m + (m - 1 - c)
                    }
                })
                .collect();
            blk.sort_unstable();
            blk
        })
        .collect();
    Ok(Blocking {
        n,
        blocks,
        tag: BlockingTag::Mcw1d(l),
    })
}

/// Perturbed row-wise pairs: `g` wrap-around pairs `{u, n+1-u}` followed by
/// consecutive pairs `{g+2u-1, g+2u}` (1-based).
pub fn prw(n: usize, g: usize) -> Result<Blocking> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(EssError::InvalidBlocking(format!(
            "PRW needs an even n, got {n}"
        )));
    }
    let m = n / 2;
    if g == 0 || g >= m {
        return Err(EssError::InvalidBlocking(format!(
            "PRW order g = {g} must satisfy 1 <= g <= m - 1 = {}",
            m.saturating_sub(1)
        )));
    }
    let mut blocks = Vec::with_capacity(m);
    for u in 0..g {
        blocks.push(vec![u, n - 1 - u]);
    }
    for u in 0..m - g {
        blocks.push(vec![g + 2 * u, g + 2 * u + 1]);
    }
    Ok(Blocking {
        n,
        blocks,
        tag: BlockingTag::Prw { g },
    })
}

fn unequal_sizes(n: usize, m: usize) -> Result<(usize, usize)> {
    if m == 0 || m > n {
        return Err(EssError::InvalidBlocking(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let b = n / m;
    Ok((b, n - m * b))
}

/// RW blocking with `f = n - m⌊n/m⌋` leading blocks of size `⌊n/m⌋ + 1`.
pub fn rw_1d_unequal(n: usize, m: usize) -> Result<Blocking> {
    let (b, f) = unequal_sizes(n, m)?;
    let mut blocks = Vec::with_capacity(m);
    let mut start = 0;
    for u in 0..m {
        let size = if u < f { b + 1 } else { b };
        blocks.push((start..start + size).collect());
        start += size;
    }
    Ok(Blocking {
        n,
        blocks,
        tag: BlockingTag::Rw1dUnequal { m },
    })
}

/// CW blocking `{u + (j-1)m}` where the first `f` blocks get one extra point.
pub fn cw_1d_unequal(n: usize, m: usize) -> Result<Blocking> {
    let (b, f) = unequal_sizes(n, m)?;
    let blocks = (0..m)
        .map(|u| {
            let size = if u < f { b + 1 } else { b };
            (0..size).map(|j| u + j * m).collect()
        })
        .collect();
    Ok(Blocking {
        n,
        blocks,
        tag: BlockingTag::Cw1dUnequal { m },
    })
}

fn product_2d(arr: Arrangement, l: Layout2d) -> Vec<Vec<usize>> {
    let n2 = l.n2();
    let first = blocks_for(arr, l.first());
    let second = blocks_for(arr, l.second());
    let mut out = Vec::with_capacity(l.m1 * l.m2);
    for b1 in &first {
        for b2 in &second {
            let mut blk = Vec::with_capacity(b1.len() * b2.len());
            for &i1 in b1 {
                for &i2 in b2 {
                    blk.push(i1 * n2 + i2);
                }
            }
            out.push(blk);
        }
    }
    out
}

/// Cartesian products of 1D row blocks, ordered `(u1, u2)` lexicographically.
pub fn rw_2d(n1: usize, n2: usize, m1: usize, b1: usize, m2: usize, b2: usize) -> Result<Blocking> {
    let l = Layout2d::new(n1, n2, m1, b1, m2, b2)?;
    Ok(Blocking {
        n: n1 * n2,
        blocks: product_2d(Arrangement::Row, l),
        tag: BlockingTag::Rw2d(l),
    })
}

/// Cartesian products of 1D column blocks, ordered `(u1, u2)` lexicographically.
pub fn cw_2d(n1: usize, n2: usize, m1: usize, b1: usize, m2: usize, b2: usize) -> Result<Blocking> {
    let l = Layout2d::new(n1, n2, m1, b1, m2, b2)?;
    Ok(Blocking {
        n: n1 * n2,
        blocks: product_2d(Arrangement::Col, l),
        tag: BlockingTag::Cw2d(l),
    })
}

pub fn equal_1d(arr: Arrangement, n: usize, m: usize, b: usize) -> Result<Blocking> {
    match arr {
        Arrangement::Row => rw_1d(n, m, b),
        Arrangement::Col => cw_1d(n, m, b),
    }
}

pub fn equal_2d(arr: Arrangement, l: Layout2d) -> Result<Blocking> {
    match arr {
        Arrangement::Row => rw_2d(l.n1(), l.n2(), l.m1, l.b1, l.m2, l.b2),
        Arrangement::Col => cw_2d(l.n1(), l.n2(), l.m1, l.b1, l.m2, l.b2),
    }
}

fn read_block_file(path: impl AsRef<Path>) -> Result<Vec<Vec<usize>>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut blocks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let block = line
            .split_whitespace()
            .map(|tok| match tok.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(EssError::Parse(format!(
                    "line {}: invalid 1-based index {tok:?}",
                    lineno + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// A blocking described independently of the point count, as given on the
/// command line. [`BlockingSpec::build`] turns it into a [`Blocking`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockingSpec {
    /// RW with `m` blocks; unequal sizes when `m` does not divide `n`.
    Rw {
        m: usize,
    },
    Cw {
        m: usize,
    },
    Mcw {
        m: usize,
    },
    Prw {
        g: usize,
    },
    Rw2d {
        m1: usize,
        m2: usize,
    },
    Cw2d {
        m1: usize,
        m2: usize,
    },
    /// 0-based blocks loaded from a file.
    Custom(Vec<Vec<usize>>),
}

impl BlockingSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, params) = spec
            .split_once(':')
            .ok_or_else(|| EssError::Parse(format!("blocking spec {spec:?} has no parameters")))?;
        let mut kv = std::collections::BTreeMap::new();
        for part in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| EssError::Parse(format!("expected key=value, got {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let int = |key: &str| -> Result<usize> {
            let v = kv
                .get(key)
                .ok_or_else(|| EssError::Parse(format!("blocking {kind:?} needs {key}=")))?;
            v.parse::<usize>().ok().filter(|&x| x > 0).ok_or_else(|| {
                EssError::Parse(format!("{key} must be a positive integer, got {v:?}"))
            })
        };
        let expect_keys = |keys: &[&str]| -> Result<()> {
            match kv.keys().find(|k| !keys.contains(&k.as_str())) {
                Some(k) => Err(EssError::Parse(format!(
                    "unknown parameter {k:?} for {kind:?}"
                ))),
                None => Ok(()),
            }
        };
        let out = match kind.trim() {
            "rw" => {
                expect_keys(&["m"])?;
                BlockingSpec::Rw { m: int("m")? }
            }
            "cw" => {
                expect_keys(&["m"])?;
                BlockingSpec::Cw { m: int("m")? }
            }
            "mcw" => {
                expect_keys(&["m"])?;
                BlockingSpec::Mcw { m: int("m")? }
            }
            "prw" => {
                expect_keys(&["g"])?;
                BlockingSpec::Prw { g: int("g")? }
            }
            "rw2d" => {
                expect_keys(&["m1", "m2"])?;
                BlockingSpec::Rw2d {
                    m1: int("m1")?,
                    m2: int("m2")?,
                }
            }
            "cw2d" => {
                expect_keys(&["m1", "m2"])?;
                BlockingSpec::Cw2d {
                    m1: int("m1")?,
                    m2: int("m2")?,
                }
            }
            "custom" => {
                expect_keys(&["file"])?;
                let file = kv
                    .get("file")
                    .ok_or_else(|| EssError::Parse("custom blocking needs file=PATH".into()))?;
                BlockingSpec::Custom(read_block_file(file)?)
            }
            other => return Err(EssError::Parse(format!("unknown blocking kind {other:?}"))),
        };
        Ok(out)
    }

    pub fn build(&self, geom: &PointGeometry) -> Result<Blocking> {
        let need_line = |what: &str| -> Result<usize> {
            match *geom {
                PointGeometry::Line(n) => Ok(n),
                _ => Err(EssError::InvalidBlocking(format!(
                    "{what} needs a 1D geometry"
                ))),
            }
        };
        let need_grid = |what: &str| -> Result<(usize, usize)> {
            match *geom {
                PointGeometry::Grid { n1, n2 } => Ok((n1, n2)),
                _ => Err(EssError::InvalidBlocking(format!("{what} needs a 2D grid"))),
            }
        };
        match self {
            BlockingSpec::Rw { m } => {
                let n = need_line("rw")?;
                if *m > 0 && n % m == 0 {
                    rw_1d(n, *m, n / m)
                } else {
                    rw_1d_unequal(n, *m)
                }
            }
            BlockingSpec::Cw { m } => {
                let n = need_line("cw")?;
                if *m > 0 && n % m == 0 {
                    cw_1d(n, *m, n / m)
                } else {
                    cw_1d_unequal(n, *m)
                }
            }
            BlockingSpec::Mcw { m } => {
                let n = need_line("mcw")?;
                if *m == 0 || n % m != 0 {
                    return Err(EssError::dims(format!(
                        "mcw needs m | n, got n = {n}, m = {m}"
                    )));
                }
                mcw_1d(n, *m, n / m)
            }
            BlockingSpec::Prw { g } => prw(need_line("prw")?, *g),
            BlockingSpec::Rw2d { m1, m2 } | BlockingSpec::Cw2d { m1, m2 } => {
                let (n1, n2) = need_grid("2D blocking")?;
                if n1 % m1 != 0 || n2 % m2 != 0 {
                    return Err(EssError::dims(format!(
                        "grid {n1}x{n2} is not divisible into {m1}x{m2} blocks"
                    )));
                }
                let (b1, b2) = (n1 / m1, n2 / m2);
                if matches!(self, BlockingSpec::Rw2d { .. }) {
                    rw_2d(n1, n2, *m1, b1, *m2, b2)
                } else {
                    cw_2d(n1, n2, *m1, b1, *m2, b2)
                }
            }
            BlockingSpec::Custom(blocks) => Blocking::custom(geom.len(), blocks.clone()),
        }
    }
}

impl fmt::Display for BlockingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockingSpec::Rw { m } => write!(f, "rw:m={m}"),
            BlockingSpec::Cw { m } => write!(f, "cw:m={m}"),
            BlockingSpec::Mcw { m } => write!(f, "mcw:m={m}"),
            BlockingSpec::Prw { g } => write!(f, "prw:g={g}"),
            BlockingSpec::Rw2d { m1, m2 } => write!(f, "rw2d:m1={m1},m2={m2}"),
            BlockingSpec::Cw2d { m1, m2 } => write!(f, "cw2d:m1={m1},m2={m2}"),
            BlockingSpec::Custom(_) => f.write_str("custom"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(b: &Blocking) -> Vec<Vec<usize>> {
        b.blocks_one_based()
    }

    #[test]
    fn rw_examples() {
        assert_eq!(
            one_based(&rw_1d(15, 3, 5).unwrap()),
            vec![
                vec![1, 2, 3, 4, 5],
                vec![6, 7, 8, 9, 10],
                vec![11, 12, 13, 14, 15]
            ]
        );
        assert_eq!(
            one_based(&rw_1d(7, 1, 7).unwrap()),
            vec![(1..=7).collect::<Vec<_>>()]
        );
        assert_eq!(
            one_based(&rw_1d(6, 3, 2).unwrap()),
            vec![vec![1, 2], vec![3, 4], vec![5, 6]]
        );
        assert!(rw_1d(15, 4, 4).is_err());
    }

    #[test]
    fn cw_examples() {
        assert_eq!(
            one_based(&cw_1d(15, 3, 5).unwrap()),
            vec![
                vec![1, 4, 7, 10, 13],
                vec![2, 5, 8, 11, 14],
                vec![3, 6, 9, 12, 15]
            ]
        );
        assert_eq!(
            one_based(&cw_1d(4, 4, 1).unwrap()),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(
            one_based(&cw_1d(6, 3, 2).unwrap()),
            vec![vec![1, 4], vec![2, 5], vec![3, 6]]
        );
    }

    #[test]
    fn mcw_examples() {
        assert_eq!(
            one_based(&mcw_1d(15, 3, 5).unwrap()),
            vec![
                vec![1, 6, 7, 12, 13],
                vec![2, 5, 8, 11, 14],
                vec![3, 4, 9, 10, 15]
            ]
        );
        assert_eq!(
            mcw_1d(5, 5, 1).unwrap().blocks(),
            cw_1d(5, 5, 1).unwrap().blocks()
        );
        assert_eq!(one_based(&mcw_1d(4, 1, 4).unwrap()), vec![vec![1, 2, 3, 4]]);
    }

    #[test]
    fn prw_examples() {
        assert_eq!(
            one_based(&prw(12, 2).unwrap()),
            vec![
                vec![1, 12],
                vec![2, 11],
                vec![3, 4],
                vec![5, 6],
                vec![7, 8],
                vec![9, 10]
            ]
        );
        assert_eq!(
            one_based(&prw(12, 1).unwrap()),
            vec![
                vec![1, 12],
                vec![2, 3],
                vec![4, 5],
                vec![6, 7],
                vec![8, 9],
                vec![10, 11]
            ]
        );
        assert_eq!(
            one_based(&prw(8, 3).unwrap()),
            vec![vec![1, 8], vec![2, 7], vec![3, 6], vec![4, 5]]
        );
        assert!(prw(11, 2).is_err());
        assert!(prw(12, 6).is_err());
        assert!(prw(12, 0).is_err());
    }

    #[test]
    fn unequal_examples() {
        assert_eq!(
            one_based(&rw_1d_unequal(17, 3).unwrap()),
            vec![
                (1..=6).collect::<Vec<_>>(),
                (7..=12).collect::<Vec<_>>(),
                (13..=17).collect::<Vec<_>>()
            ]
        );
        assert_eq!(
            one_based(&cw_1d_unequal(17, 3).unwrap()),
            vec![
                vec![1, 4, 7, 10, 13, 16],
                vec![2, 5, 8, 11, 14, 17],
                vec![3, 6, 9, 12, 15]
            ]
        );
        assert_eq!(
            cw_1d_unequal(15, 3).unwrap().blocks(),
            cw_1d(15, 3, 5).unwrap().blocks()
        );
        assert!(rw_1d_unequal(5, 6).is_err());
    }

    fn pairs(geom_n2: usize, blk: &[usize]) -> Vec<usize> {
        blk.iter()
            .map(|i| (i / geom_n2 + 1) * 10 + (i % geom_n2 + 1))
            .collect()
    }

    #[test]
    fn two_d_examples() {
        let cw = cw_2d(8, 6, 2, 4, 2, 3).unwrap();
        assert_eq!(cw.len(), 4);
        assert_eq!(
            pairs(6, cw.block(0)),
            vec![11, 13, 15, 31, 33, 35, 51, 53, 55, 71, 73, 75]
        );
        assert_eq!(
            pairs(6, cw.block(3)),
            vec![22, 24, 26, 42, 44, 46, 62, 64, 66, 82, 84, 86]
        );
        let rw = rw_2d(8, 6, 2, 4, 2, 3).unwrap();
        assert_eq!(
            pairs(6, rw.block(0)),
            vec![11, 12, 13, 21, 22, 23, 31, 32, 33, 41, 42, 43]
        );
        assert_eq!(
            pairs(6, rw.block(1)),
            vec![14, 15, 16, 24, 25, 26, 34, 35, 36, 44, 45, 46]
        );
        let single = rw_2d(4, 3, 1, 4, 1, 3).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.block(0).len(), 12);
        assert!(rw_2d(8, 6, 3, 3, 2, 3).is_err());
    }

    #[test]
    fn custom_validation() {
        assert!(Blocking::custom(4, vec![vec![0, 1], vec![2, 3]]).is_ok());
        assert!(Blocking::custom(4, vec![vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(Blocking::custom(4, vec![vec![0, 1], vec![2]]).is_err());
        assert!(Blocking::custom(4, vec![vec![0, 1, 2, 3], vec![]]).is_err());
        let b = Blocking::custom(4, vec![vec![3, 0], vec![2, 1]]).unwrap();
        assert_eq!(b.blocks(), &[vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn spec_parse_and_build() {
        let line = PointGeometry::Line(17);
        let b = BlockingSpec::parse("rw:m=3").unwrap().build(&line).unwrap();
        assert_eq!(b.tag(), &BlockingTag::Rw1dUnequal { m: 3 });
        let b = BlockingSpec::parse("cw:m=3")
            .unwrap()
            .build(&PointGeometry::Line(15))
            .unwrap();
        assert_eq!(
            b.layout_1d(),
            Some((Arrangement::Col, Layout1d { m: 3, b: 5 }))
        );
        let grid = PointGeometry::Grid { n1: 8, n2: 6 };
        let b = BlockingSpec::parse("cw2d:m1=2,m2=2")
            .unwrap()
            .build(&grid)
            .unwrap();
        assert_eq!(b, cw_2d(8, 6, 2, 4, 2, 3).unwrap());
        assert!(BlockingSpec::parse("rw:m=0").is_err());
        assert!(BlockingSpec::parse("rw:k=3").is_err());
        assert!(BlockingSpec::parse("zz:m=3").is_err());
        assert!(BlockingSpec::parse("mcw:m=4")
            .unwrap()
            .build(&line)
            .is_err());
        assert!(BlockingSpec::parse("rw2d:m1=2,m2=2")
            .unwrap()
            .build(&line)
            .is_err());
        assert_eq!(
            BlockingSpec::parse("prw:g=2").unwrap().to_string(),
            "prw:g=2"
        );
    }

    #[test]
    fn custom_file_roundtrip() {
        let dir = std::env::temp_dir().join(format!("blockess-blk-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("blocks.txt");
        std::fs::write(&path, "1 12\n2 11\n# comment\n3 4 5 6\n7 8 9 10\n").unwrap();
        let spec = BlockingSpec::parse(&format!("custom:file={}", path.display())).unwrap();
        let b = spec.build(&PointGeometry::Line(12)).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.block(0), &[0, 11]);
        assert!(spec.build(&PointGeometry::Line(13)).is_err());
    }
}
