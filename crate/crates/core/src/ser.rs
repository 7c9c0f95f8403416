use serde::Serializer;

use crate::arith::Integer;

/// Big integers serialize as decimal strings so JSON consumers never
/// round them.
pub(crate) fn integer<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
