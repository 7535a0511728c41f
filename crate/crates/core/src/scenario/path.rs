use serde_json::Value;

use crate::{Error, Result};

/// Replace the value at a dotted path (`noise.overlap.bsm`, `inputs.0`).
/// Every segment must already exist, so typos are rejected.
pub fn set_path(root: &mut Value, path: &str, v: Value) -> Result<()> {
    let bad = || Error::InvalidParameter(format!("unknown parameter path `{path}`"));
    let mut cur = root;
    for seg in path.split('.') {
        cur = match cur {
            Value::Object(m) => m.get_mut(seg).ok_or_else(bad)?,
            Value::Array(a) => {
                let i: usize = seg.parse().map_err(|_| bad())?;
                a.get_mut(i).ok_or_else(bad)?
            }
            _ => return Err(bad()),
        };
    }
    *cur = v;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_paths() {
        let mut v = json!({"a": {"b": [1, 2]}, "c": null});
        set_path(&mut v, "a.b.1", json!(5)).unwrap();
        set_path(&mut v, "c", json!(true)).unwrap();
        assert_eq!(v, json!({"a": {"b": [1, 5]}, "c": true}));
        assert!(set_path(&mut v, "a.x", json!(1)).is_err());
        assert!(set_path(&mut v, "a.b.7", json!(1)).is_err());
        assert!(set_path(&mut v, "c.d", json!(1)).is_err());
    }
}
