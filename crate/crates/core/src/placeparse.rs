//! Best-effort parsing of the serialized place object attached to a tweet.
//!
//! The Place column holds either JSON (`{"place_type": "city", ...}`) or a
//! Python-style repr (`Place(place_type='city', full_name='Phoenix, AZ',
//! bounding_box=BoundingBox(coordinates=[[[-112.3, 33.2], ...]]))`). Both are
//! read by one tolerant recursive-descent parser that never fails: it keeps
//! whatever it could read before the input stopped making sense.

use serde_json::json;

use crate::corpus::strip_encoding_artifact;

const MAX_DEPTH: usize = 48;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlaceInfo {
    pub place_type: Option<String>,
    /// `(latitude, longitude)` in degrees.
    pub coordinate: Option<(f64, f64)>,
    pub city: Option<String>,
    pub state: Option<String>,
    pub country_code: Option<String>,
    pub country: Option<String>,
}

impl PlaceInfo {
    pub fn is_empty(&self) -> bool {
        self.place_type.is_none()
            && self.coordinate.is_none()
            && self.city.is_none()
            && self.state.is_none()
            && self.country_code.is_none()
            && self.country.is_none()
    }

    /// Serializes to the JSON place-object layout read by [`parse_place`].
    ///
    /// A city without a state cannot be told apart from a bare state on the
    /// way back in, since both are written as a comma-free `full_name`.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        if let Some(t) = &self.place_type {
            obj.insert("place_type".into(), json!(t));
        }
        let full_name = match (&self.city, &self.state) {
            (Some(c), Some(s)) => Some(format!("{c}, {s}")),
            (Some(c), None) => Some(c.clone()),
            (None, Some(s)) => Some(s.clone()),
            (None, None) => None,
        };
        if let Some(f) = full_name {
            obj.insert("full_name".into(), json!(f));
        }
        if let Some(cc) = &self.country_code {
            obj.insert("country_code".into(), json!(cc));
        }
        if let Some(c) = &self.country {
            obj.insert("country".into(), json!(c));
        }
        if let Some((lat, lon)) = self.coordinate {
            obj.insert(
                "bounding_box".into(),
                json!({"type": "Polygon", "coordinates": [[[lon, lat]]]}),
            );
        }
        serde_json::Value::Object(obj).to_string()
    }
}

/// Result of [`parse_place_verbose`]: the recovered fields and, when nothing
/// could be recovered, a warning describing why.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPlace {
    pub info: PlaceInfo,
    pub warning: Option<String>,
}

/// Parses a raw Place cell. Absent, empty or whitespace-only input gives
/// `None`; anything else gives a `PlaceInfo`, possibly with every field absent.
pub fn parse_place(raw: Option<&str>) -> Option<PlaceInfo> {
    parse_place_verbose(raw).map(|p| p.info)
}

pub fn parse_place_verbose(raw: Option<&str>) -> Option<ParsedPlace> {
    let raw = raw?;
    if raw.trim().is_empty() {
        return None;
    }
    let info = recover(raw)
        .or_else(|| {
            let unwrapped = strip_encoding_artifact(raw.trim());
            (unwrapped != raw.trim())
                .then(|| recover(&unwrapped))
                .flatten()
        })
        .unwrap_or_default();
    let warning = info.is_empty().then(|| {
        let preview: String = raw.chars().take(40).collect();
        format!("no place fields recovered from {preview:?}")
    });
    if let Some(w) = &warning {
        log::debug!("{w}");
    }
    Some(ParsedPlace { info, warning })
}

fn recover(raw: &str) -> Option<PlaceInfo> {
    let mut parser = Parser::new(raw);
    let mut values = Vec::new();
    while parser.pos < parser.chars.len() {
        if let Some(v) = parser.parse_value(0) {
            values.push(v);
        }
    }
    find_place_map(&Value::List(values)).map(extract)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Num(f64),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
    Bare(String),
}

impl Value {
    fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Map(entries) => entries.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(*n),
            Value::Str(s) => s.trim().parse().ok(),
            _ => None,
        }
    }
}

const PLACE_KEYS: [&str; 5] = [
    "place_type",
    "full_name",
    "country_code",
    "country",
    "bounding_box",
];

fn find_place_map(v: &Value) -> Option<&Value> {
    let mut queue = std::collections::VecDeque::from([v]);
    while let Some(cur) = queue.pop_front() {
        match cur {
            Value::Map(entries) => {
                if entries
                    .iter()
                    .any(|(k, _)| PLACE_KEYS.contains(&k.as_str()))
                {
                    return Some(cur);
                }
                queue.extend(entries.iter().map(|(_, v)| v));
            }
            Value::List(items) => queue.extend(items.iter()),
            _ => {}
        }
    }
    None
}

fn text_field(map: &Value, key: &str) -> Option<String> {
    map.get(key)
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn extract(map: &Value) -> PlaceInfo {
    let (city, state) = match text_field(map, "full_name").or_else(|| text_field(map, "name")) {
        Some(full) => match full.rsplit_once(',') {
            Some((c, s)) => (non_blank(c), non_blank(s)),
            None => (None, Some(full)),
        },
        None => (None, None),
    };
    let country_code = text_field(map, "country_code")
        .map(|c| c.to_ascii_uppercase())
        .filter(|c| c.len() == 2 && c.bytes().all(|b| b.is_ascii_uppercase()));
    PlaceInfo {
        place_type: text_field(map, "place_type").or_else(|| text_field(map, "type")),
        coordinate: point_coordinate(map).or_else(|| bbox_coordinate(map)),
        city,
        state,
        country_code,
        country: text_field(map, "country"),
    }
}

fn non_blank(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_string())
}

/// `[lon, lat]` pair to a validated `(lat, lon)`.
fn lon_lat(v: &Value) -> Option<(f64, f64)> {
    match v {
        Value::List(items) if items.len() >= 2 => {
            let lon = items[0].as_num()?;
            let lat = items[1].as_num()?;
            ((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)).then_some((lat, lon))
        }
        _ => None,
    }
}

fn point_coordinate(map: &Value) -> Option<(f64, f64)> {
    let c = map.get("coordinates")?;
    lon_lat(c).or_else(|| c.get("coordinates").and_then(lon_lat))
}

fn bbox_coordinate(map: &Value) -> Option<(f64, f64)> {
    if let Some(bb) = map.get("bounding_box") {
        let mut v = bb.get("coordinates")?;
        // Descend [[[lon, lat], ...]] to the first vertex.
        for _ in 0..4 {
            if let Some(p) = lon_lat(v) {
                return Some(p);
            }
            match v {
                Value::List(items) if !items.is_empty() => v = &items[0],
                _ => return None,
            }
        }
        return None;
    }
    // Flat [west, south, east, north] box.
    let geo = map.get("geo").unwrap_or(map);
    lon_lat(geo.get("bbox")?)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Self {
        Self {
            chars: s.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn parse_value(&mut self, depth: usize) -> Option<Value> {
        self.skip_ws();
        let c = self.peek()?;
        if depth > MAX_DEPTH {
            self.pos = self.chars.len();
            return None;
        }
        match c {
            '"' | '\'' => Some(Value::Str(self.parse_string(c))),
            '{' => {
                self.pos += 1;
                Some(Value::Map(self.parse_entries('}', ':', depth)))
            }
            '[' => {
                self.pos += 1;
                Some(Value::List(self.parse_items(']', depth)))
            }
            '(' => {
                self.pos += 1;
                Some(Value::List(self.parse_items(')', depth)))
            }
            '<' => {
                self.skip_angle();
                Some(Value::Bare(String::new()))
            }
            c if c == '-' || c == '+' || c == '.' || c.is_ascii_digit() => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_digit() || "+-.eE".contains(c))
                {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                Some(match text.parse::<f64>() {
                    Ok(n) => Value::Num(n),
                    Err(_) => Value::Bare(text),
                })
            }
            c if is_ident_char(c) => {
                let ident = self.parse_ident();
                self.skip_ws();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    Some(Value::Map(self.parse_entries(')', '=', depth)))
                } else {
                    Some(Value::Bare(ident))
                }
            }
            _ => {
                self.pos += 1;
                None
            }
        }
    }

    fn parse_ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn skip_angle(&mut self) {
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            self.pos += 1;
            match c {
                '<' => depth += 1,
                '>' => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        return;
                    }
                }
                _ => {}
            }
        }
    }

    fn parse_string(&mut self, quote: char) -> String {
        self.pos += 1;
        let mut out = String::new();
        while let Some(c) = self.peek() {
            self.pos += 1;
            if c == quote {
                return out;
            }
            if c != '\\' {
                out.push(c);
                continue;
            }
            let Some(e) = self.peek() else { break };
            self.pos += 1;
            match e {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                'b' => out.push('\u{8}'),
                'f' => out.push('\u{c}'),
                'u' => {
                    if let Some(ch) = self.parse_unicode_escape() {
                        out.push(ch);
                    }
                }
                'x' => {
                    if let Some(v) = self.hex_digits(2) {
                        out.extend(char::from_u32(v));
                    }
                }
                other => out.push(other),
            }
        }
        out
    }

    fn hex_digits(&mut self, n: usize) -> Option<u32> {
        let end = self.pos.checked_add(n)?;
        if end > self.chars.len() {
            return None;
        }
        let s: String = self.chars[self.pos..end].iter().collect();
        let v = u32::from_str_radix(&s, 16).ok()?;
        self.pos = end;
        Some(v)
    }

    fn parse_unicode_escape(&mut self) -> Option<char> {
        let hi = self.hex_digits(4)?;
        if (0xD800..0xDC00).contains(&hi)
            && self.chars.get(self.pos) == Some(&'\\')
            && self.chars.get(self.pos + 1) == Some(&'u')
        {
            let save = self.pos;
            self.pos += 2;
            if let Some(lo) = self.hex_digits(4) {
                if (0xDC00..0xE000).contains(&lo) {
                    return char::from_u32(0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00));
                }
            }
            self.pos = save;
        }
        char::from_u32(hi)
    }

    fn parse_items(&mut self, close: char, depth: usize) -> Vec<Value> {
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return items,
                Some(c) if c == close => {
                    self.pos += 1;
                    return items;
                }
                Some(',') => self.pos += 1,
                Some(_) => {
                    if let Some(v) = self.parse_value(depth + 1) {
                        items.push(v);
                    }
                }
            }
        }
    }

    /// Reads `key sep value` pairs until `close`. Keys may be quoted strings
    /// or bare identifiers.
    fn parse_entries(&mut self, close: char, sep: char, depth: usize) -> Vec<(String, Value)> {
        let mut entries = Vec::new();
        loop {
            self.skip_ws();
            let key = match self.peek() {
                None => return entries,
                Some(c) if c == close => {
                    self.pos += 1;
                    return entries;
                }
                Some(',') => {
                    self.pos += 1;
                    continue;
                }
                Some(q @ ('"' | '\'')) => self.parse_string(q),
                Some(c) if is_ident_char(c) => self.parse_ident(),
                Some(_) => {
                    // Not a key; consume a value so the loop makes progress.
                    let start = self.pos;
                    self.parse_value(depth + 1);
                    if self.pos == start {
                        self.pos += 1;
                    }
                    continue;
                }
            };
            self.skip_ws();
            if self.peek() == Some(sep) || self.peek() == Some(':') || self.peek() == Some('=') {
                self.pos += 1;
                if let Some(v) = self.parse_value(depth + 1) {
                    entries.push((key, v));
                }
            }
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}
