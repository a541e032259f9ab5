use alloc::format;
use alloc::string::String;

/// `base_n` for the smallest `n >= 1` not rejected by `taken`.
/// A numeric suffix already on `base` is replaced rather than extended.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let root = match base.rfind('_') {
        Some(i) if i > 0 && base[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < base.len() => {
            &base[..i]
        }
        _ => base,
    };
    (1..)
        .map(|n| format!("{root}_{n}"))
        .find(|c| !taken(c))
        .expect("unbounded supply of names")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_unused_suffix() {
        assert_eq!(fresh_name("x", |n| n == "x_1"), "x_2");
        assert_eq!(fresh_name("x_3", |_| false), "x_1");
    }
}
