/// `{:.16e}`, or `null` for non-finite values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// One JSON object, fields in insertion order.
#[derive(Debug, Default)]
pub struct Json {
    buf: String,
}

impl Json {
    pub fn new() -> Self {
        Json::default()
    }

    fn key(&mut self, k: &str) {
        self.buf.push(if self.buf.is_empty() { '{' } else { ',' });
        self.buf.push_str(&serde_json::to_string(k).unwrap_or_default());
        self.buf.push(':');
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str(&serde_json::to_string(v).unwrap_or_default());
        self
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.key(k);
        self.buf.push_str(&fmt_f64(v));
        self
    }

    pub fn int(&mut self, k: &str, v: i64) -> &mut Self {
        self.key(k);
        self.buf.push_str(&v.to_string());
        self
    }

    pub fn boolean(&mut self, k: &str, v: bool) -> &mut Self {
        self.key(k);
        self.buf.push_str(if v { "true" } else { "false" });
        self
    }

    pub fn null(&mut self, k: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str("null");
        self
    }

    pub fn nums(&mut self, k: &str, v: &[f64]) -> &mut Self {
        self.key(k);
        let items: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
        self.buf.push('[');
        self.buf.push_str(&items.join(","));
        self.buf.push(']');
        self
    }

    pub fn finish(&self) -> String {
        if self.buf.is_empty() {
            "{}".to_string()
        } else {
            format!("{}}}", self.buf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.125), "-1.2500000000000000e-1");
        assert_eq!(fmt_f64(f64::NAN), "null");
        assert_eq!(fmt_f64(f64::INFINITY), "null");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn objects() {
        let mut j = Json::new();
        j.str("a", "x\"y").num("b", 2.0).nums("c", &[1.0, f64::NAN]).boolean("d", true).int("e", -3).null("f");
        let s = j.finish();
        assert_eq!(s, r#"{"a":"x\"y","b":2.0000000000000000e0,"c":[1.0000000000000000e0,null],"d":true,"e":-3,"f":null}"#);
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["e"], -3);
        assert_eq!(Json::new().finish(), "{}");
    }
}
