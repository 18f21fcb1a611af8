//! Strict `key = value` configuration files.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{PhysicalParams, Projection};

/// Recognised keys with the unit suffix each may carry.
const KEYS: [(&str, &str); 6] = [
    ("v_f_cm_s", "cm/s"),
    ("m_g", "g"),
    ("d_cm", "cm"),
    ("delta_hz", "Hz"),
    ("gamma_hz_per_g", "Hz/G"),
    ("projection", ""),
];

pub fn parse_config(path: &Path) -> Result<PhysicalParams> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// Parses configuration text. Frequencies are given in Hz (converted to rad/s); `projection`
/// defaults to spin-half.
pub fn parse_config_str(text: &str) -> Result<PhysicalParams> {
    let mut seen: HashMap<&'static str, (usize, String)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Syntax {
            line,
            message: format!("expected `key = value`, got `{body}`"),
        })?;
        let key = key.trim();
        let (name, _) = KEYS.iter().find(|(k, _)| *k == key).ok_or_else(|| Error::UnknownKey {
            key: key.to_string(),
            line,
        })?;
        if let Some((first, _)) = seen.get(name) {
            return Err(Error::DuplicateKey {
                key: key.to_string(),
                first: *first,
                second: line,
            });
        }
        seen.insert(name, (line, value.trim().to_string()));
    }
    let number = |key: &'static str| -> Result<f64> {
        let (line, value) = seen.get(key).ok_or(Error::MissingKey(key))?;
        let expected = KEYS.iter().find(|(k, _)| *k == key).map(|(_, u)| *u).unwrap_or("");
        let mut parts = value.splitn(2, char::is_whitespace);
        let num = parts.next().unwrap_or("");
        let suffix = parts.next().map(str::trim).unwrap_or("");
        if !suffix.is_empty() && suffix != expected {
            return Err(Error::BadUnitSuffix {
                key: key.to_string(),
                line: *line,
                suffix: suffix.to_string(),
                expected,
            });
        }
        num.parse::<f64>().map_err(|_| Error::Syntax {
            line: *line,
            message: format!("`{key}` needs a number, got `{num}`"),
        })
    };
    let v_f = number("v_f_cm_s")?;
    let mass = number("m_g")?;
    let d = number("d_cm")?;
    let delta_hz = number("delta_hz")?;
    let gamma = number("gamma_hz_per_g")?;
    let projection = match seen.get("projection") {
        Some((_, v)) => v.parse::<Projection>()?,
        None => Projection::SpinHalf,
    };
    PhysicalParams::new(v_f, mass, d, 2.0 * PI * delta_hz, 2.0 * PI * gamma, projection)
}

/// Config text that parses back to `params`.
pub fn render_config(params: &PhysicalParams) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "v_f_cm_s = {:e} cm/s", params.v_f);
    let _ = writeln!(s, "m_g = {:e} g", params.mass);
    let _ = writeln!(s, "d_cm = {:e} cm", params.d);
    let _ = writeln!(s, "delta_hz = {:e} Hz", params.delta / (2.0 * PI));
    let _ = writeln!(s, "gamma_hz_per_g = {:e} Hz/G", params.gamma / (2.0 * PI));
    let _ = writeln!(s, "projection = {}", params.projection);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const STANDARD: &str = "# two-level dipoles above a metal film\nv_f_cm_s = 1e8\nm_g = 9.1e-28 g\nd_cm = 0\ndelta_hz = 1.2e9 Hz\ngamma_hz_per_g = 2.8e6 Hz/G\n";

    #[test]
    fn accepts_standard_config() {
        let p = parse_config_str(STANDARD).unwrap();
        assert_eq!(p, PhysicalParams::standard());
        let back = parse_config_str(&render_config(&p)).unwrap();
        for (a, b) in [(back.v_f, p.v_f), (back.mass, p.mass), (back.delta, p.delta), (back.gamma, p.gamma)] {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn distinct_errors() {
        let neg = STANDARD.replace("delta_hz = 1.2e9 Hz", "delta_hz = -1");
        assert!(matches!(parse_config_str(&neg), Err(Error::Validation { field: "delta", .. })));
        let dup = format!("{STANDARD}d_cm = 1e-7\n");
        match parse_config_str(&dup) {
            Err(Error::DuplicateKey { first, second, .. }) => assert_eq!((first, second), (4, 7)),
            other => panic!("{other:?}"),
        }
        let unknown = format!("{STANDARD}temperature = 4\n");
        assert!(matches!(parse_config_str(&unknown), Err(Error::UnknownKey { line: 7, .. })));
        let missing = STANDARD.replace("m_g = 9.1e-28 g\n", "");
        assert!(matches!(parse_config_str(&missing), Err(Error::MissingKey("m_g"))));
        let suffix = STANDARD.replace("1e8", "1e6 m/s");
        assert!(matches!(parse_config_str(&suffix), Err(Error::BadUnitSuffix { line: 2, .. })));
        let e = parse_config(Path::new("/nonexistent/corremit.conf")).unwrap_err();
        assert!(matches!(e, Error::Unreadable { .. }));
        assert!(matches!(parse_config_str("v_f_cm_s 1e8"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn projection_key() {
        let nv = format!("{STANDARD}projection = nv-two-level\n");
        assert_eq!(parse_config_str(&nv).unwrap().projection, Projection::NvTwoLevel);
        let bad = format!("{STANDARD}projection = spin-one\n");
        assert!(parse_config_str(&bad).is_err());
    }
}
