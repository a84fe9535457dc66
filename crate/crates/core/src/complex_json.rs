//! Complex numbers as `{"re": …, "im": …}` in JSON output.

use num_complex::Complex64 as C;
use serde::ser::SerializeStruct;
use serde::Serializer;

pub fn serialize<S: Serializer>(z: &C, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}
