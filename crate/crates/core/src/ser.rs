//! Serialize helpers that write exact numbers as their display strings.

use std::fmt::Display;

use serde::ser::{SerializeSeq, Serializer};

pub fn display<T: Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub fn display_vec<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn display_vec2<T: Display, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        seq.serialize_element(&row.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    }
    seq.end()
}
