//! Measured data files.
//!
//! ```json
//! {
//!   "class": [1, 1, 2],
//!   "pairs": [[0, 0], [0, 1], [1, 0], [1, 1]],
//!   "counts": [[[40, 10], [10, 40]], ...]
//! }
//! ```
//!
//! Each pair gets an `N_a × N_b` block, either as nested rows or flat in
//! row-major `joint_index` order. `probs` replaces `counts` for normalized
//! data; its entries may be JSON numbers or strings such as `"0.25"` and
//! `"1/4"`, all parsed exactly.

use std::fmt;
use std::marker::PhantomData;

use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;

use crate::model::parse_rational;
use crate::Rational;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFile {
    pub class: [u32; 3],
    pub pairs: Vec<[usize; 2]>,
    #[serde(default)]
    pub counts: Option<Vec<Block<Count>>>,
    #[serde(default)]
    pub probs: Option<Vec<Block<Exact>>>,
}

/// One pair's entries as written in the file.
#[derive(Debug)]
pub struct Block<T>(pub Vec<Cell<T>>);

#[derive(Debug)]
pub enum Cell<T> {
    Scalar(T),
    Row(Vec<T>),
}

/// Exact rational from a JSON number or string.
#[derive(Clone, Debug, PartialEq)]
pub struct Exact(pub Rational);

/// Nonnegative integer count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Count(pub u64);

trait FromText: Sized {
    const EXPECTING: &'static str;
    fn from_text(text: &str, quoted: bool) -> Result<Self, String>;
}

impl FromText for Exact {
    const EXPECTING: &'static str = "a probability (number, decimal string or \"n/d\")";

    fn from_text(text: &str, _quoted: bool) -> Result<Self, String> {
        parse_rational(text)
            .map(Exact)
            .map_err(|_| format!("malformed number {text:?}"))
    }
}

impl FromText for Count {
    const EXPECTING: &'static str = "a nonnegative integer count";

    fn from_text(text: &str, quoted: bool) -> Result<Self, String> {
        let bad = || format!("malformed count {text:?}: counts are nonnegative JSON integers");
        if quoted {
            return Err(bad());
        }
        let value = parse_rational(text).map_err(|_| bad())?;
        if !value.is_integer() || value.is_negative() {
            return Err(bad());
        }
        value.to_integer().to_u64().map(Count).ok_or_else(bad)
    }
}

/// Reads a scalar, keeping number text intact (numbers arrive as a map
/// under `arbitrary_precision`).
struct ScalarVisitor<T>(PhantomData<T>);

impl<'de, T: FromText> Visitor<'de> for ScalarVisitor<T> {
    type Value = T;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(T::EXPECTING)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<T, E> {
        T::from_text(v, true).map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<T, E> {
        T::from_text(&v.to_string(), false).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<T, E> {
        T::from_text(&v.to_string(), false).map_err(E::custom)
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<T, A::Error> {
        let n = serde_json::Number::deserialize(de::value::MapAccessDeserializer::new(map))?;
        T::from_text(&n.to_string(), false).map_err(de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(ScalarVisitor(PhantomData))
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(ScalarVisitor(PhantomData))
    }
}

struct CellVisitor<T>(PhantomData<T>);

impl<'de, T: FromText + Deserialize<'de>> Visitor<'de> for CellVisitor<T> {
    type Value = Cell<T>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{} or a row of them", T::EXPECTING)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Cell<T>, A::Error> {
        let mut row = Vec::new();
        while let Some(x) = seq.next_element()? {
            row.push(x);
        }
        Ok(Cell::Row(row))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Cell<T>, E> {
        ScalarVisitor(PhantomData).visit_str(v).map(Cell::Scalar)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cell<T>, E> {
        ScalarVisitor(PhantomData).visit_u64(v).map(Cell::Scalar)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cell<T>, E> {
        ScalarVisitor(PhantomData).visit_i64(v).map(Cell::Scalar)
    }

    fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Cell<T>, A::Error> {
        ScalarVisitor(PhantomData).visit_map(map).map(Cell::Scalar)
    }
}

impl<'de, T: FromText + Deserialize<'de>> Deserialize<'de> for Cell<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(CellVisitor(PhantomData))
    }
}

impl<'de, T: FromText + Deserialize<'de>> Deserialize<'de> for Block<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<Cell<T>>::deserialize(d).map(Block)
    }
}

impl<T> Block<T> {
    /// Row-major entries after checking the `rows × cols` shape.
    pub fn flatten(self, rows: usize, cols: usize) -> Result<Vec<T>, String> {
        let cells = self.0;
        if cells.iter().all(|c| matches!(c, Cell::Scalar(_))) {
            if cells.len() != rows * cols {
                return Err(format!(
                    "expected {} entries ({rows}×{cols}), found {}",
                    rows * cols,
                    cells.len()
                ));
            }
            return Ok(cells
                .into_iter()
                .map(|c| match c {
                    Cell::Scalar(x) => x,
                    Cell::Row(_) => unreachable!(),
                })
                .collect());
        }
        if cells.len() != rows {
            return Err(format!("expected {rows} rows, found {}", cells.len()));
        }
        let mut out = Vec::with_capacity(rows * cols);
        for (a, cell) in cells.into_iter().enumerate() {
            match cell {
                Cell::Row(row) if row.len() == cols => out.extend(row),
                Cell::Row(row) => {
                    return Err(format!("row {a}: expected {cols} entries, found {}", row.len()))
                }
                Cell::Scalar(_) => return Err(format!("row {a}: mixes scalars and rows")),
            }
        }
        Ok(out)
    }
}

pub fn parse_data_file(text: &str) -> Result<DataFile, serde_json::Error> {
    serde_json::from_str(text)
}
