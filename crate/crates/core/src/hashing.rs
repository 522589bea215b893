use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn content_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serialisable value");
    hex::encode(Sha256::digest(&bytes))
}

/// First 16 hex digits of [`content_hash`], used as a short identifier in text formats.
pub fn short_hash<T: Serialize + ?Sized>(value: &T) -> String {
    content_hash(value)[..16].to_string()
}
