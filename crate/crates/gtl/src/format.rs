/// Fixed 17-significant-digit scientific notation, so written numbers replay exactly.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, -2.5e-300, 1.0 / 3.0, 0.0, 7.0] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sig17(0.5), "5.0000000000000000e-1");
    }
}
