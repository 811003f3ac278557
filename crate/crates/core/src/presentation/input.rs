use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::math::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyCode {
    Char(char),
    Space,
    PageUp,
    PageDown,
    Home,
    End,
    Left,
    Right,
}

impl KeyCode {
    const NAMED: [(KeyCode, &'static str); 7] = [
        (KeyCode::Space, "space"),
        (KeyCode::PageUp, "page_up"),
        (KeyCode::PageDown, "page_down"),
        (KeyCode::Home, "home"),
        (KeyCode::End, "end"),
        (KeyCode::Left, "left"),
        (KeyCode::Right, "right"),
    ];
}

impl fmt::Display for KeyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyCode::Char(c) => write!(f, "{c}"),
            named => {
                let name = KeyCode::NAMED.iter().find(|(k, _)| k == named).map(|(_, n)| *n);
                f.write_str(name.unwrap_or_default())
            }
        }
    }
}

impl FromStr for KeyCode {
    type Err = String;

    /// A single character, or one of the named keys.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((k, _)) = KeyCode::NAMED.iter().find(|(_, n)| *n == s) {
            return Ok(*k);
        }
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if !c.is_whitespace() && !c.is_control() => Ok(KeyCode::Char(c)),
            _ => Err(format!("unknown key `{s}`")),
        }
    }
}

impl Serialize for KeyCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KeyCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavCommand {
    Next,
    Prev,
    Goto(usize),
    Home,
    End,
}

/// Host callbacks delegated to the presentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputEvent {
    Key(KeyCode),
    /// World coordinates.
    PointerDown(Vec2),
    PointerMove(Vec2),
    PointerUp,
    /// Host frame; `dt` is informational, stepping uses the fixed timestep.
    Tick(f64),
}
