use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::Value;

use crate::scalar::Scalar;

/// A value bound to a variable: a non-negative real, a list of them, or a
/// list of such lists.
#[derive(Clone, Debug)]
pub enum DataValue<F> {
    Scalar(F),
    List(Arc<Vec<F>>),
    Lists(Arc<Vec<Vec<F>>>),
}

impl<F: Scalar> DataValue<F> {
    pub fn list(values: Vec<F>) -> Self {
        DataValue::List(Arc::new(values))
    }

    pub fn lists(values: Vec<Vec<F>>) -> Self {
        DataValue::Lists(Arc::new(values))
    }

    pub fn empty_list() -> Self {
        DataValue::list(Vec::new())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DataValue::Scalar(_) => "scalar",
            DataValue::List(_) => "list",
            DataValue::Lists(_) => "list of lists",
        }
    }

    /// True when every scalar is finite and non-negative.
    pub fn is_valid(&self) -> bool {
        let ok = |x: &F| x.is_finite() && *x >= F::zero();
        match self {
            DataValue::Scalar(x) => ok(x),
            DataValue::List(xs) => xs.iter().all(ok),
            DataValue::Lists(xss) => xss.iter().flatten().all(ok),
        }
    }

    pub fn to_json(&self) -> Value {
        let num = |x: &F| {
            serde_json::Number::from_f64(x.as_f64())
                .map(Value::Number)
                .unwrap_or(Value::Null)
        };
        match self {
            DataValue::Scalar(x) => num(x),
            DataValue::List(xs) => Value::Array(xs.iter().map(num).collect()),
            DataValue::Lists(xss) => Value::Array(
                xss.iter()
                    .map(|xs| Value::Array(xs.iter().map(num).collect()))
                    .collect(),
            ),
        }
    }
}

impl<F: Scalar> PartialEq for DataValue<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (DataValue::Scalar(a), DataValue::Scalar(b)) => a == b,
            (DataValue::List(a), DataValue::List(b)) => Arc::ptr_eq(a, b) || a == b,
            (DataValue::Lists(a), DataValue::Lists(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl<F: Scalar> Eq for DataValue<F> {}

impl<F: Scalar> Hash for DataValue<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            DataValue::Scalar(x) => {
                0u8.hash(state);
                x.canonical_bits().hash(state);
            }
            DataValue::List(xs) => {
                1u8.hash(state);
                xs.len().hash(state);
                for x in xs.iter() {
                    x.canonical_bits().hash(state);
                }
            }
            DataValue::Lists(xss) => {
                2u8.hash(state);
                xss.len().hash(state);
                for xs in xss.iter() {
                    xs.len().hash(state);
                    for x in xs {
                        x.canonical_bits().hash(state);
                    }
                }
            }
        }
    }
}

fn write_list<F: Scalar>(f: &mut fmt::Formatter<'_>, xs: &[F]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

impl<F: Scalar> fmt::Display for DataValue<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Scalar(x) => write!(f, "{x}"),
            DataValue::List(xs) => write_list(f, xs),
            DataValue::Lists(xss) => {
                f.write_str("[")?;
                for (i, xs) in xss.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_list(f, xs)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl<F: Scalar> From<F> for DataValue<F> {
    fn from(x: F) -> Self {
        DataValue::Scalar(x)
    }
}

impl<F: Scalar> From<Vec<F>> for DataValue<F> {
    fn from(xs: Vec<F>) -> Self {
        DataValue::list(xs)
    }
}

impl<F: Scalar> From<Vec<Vec<F>>> for DataValue<F> {
    fn from(xss: Vec<Vec<F>>) -> Self {
        DataValue::lists(xss)
    }
}
