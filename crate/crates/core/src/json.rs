use serde::Serialize;

/// Compact JSON with object keys in sorted order.
pub fn to_sorted_string<T: Serialize>(value: &T) -> String {
    // serde_json's map type is ordered by key unless `preserve_order` is enabled.
    let v = serde_json::to_value(value).expect("serializable value");
    serde_json::to_string(&v).expect("serializable value")
}
