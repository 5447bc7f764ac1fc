//! Street-address string codec. The format is dot-separated and strict:
//!
//! ```text
//! <house><block>.<region><road>.<city>.<state?><country>[.<year>]
//! 715D.NE127.Dhule.MhIn
//! ```
//!
//! Parsing accepts exactly the strings that formatting can emit; anything a
//! reformat would normalize differently is rejected.

use crate::error::{Error, Result};

/// A parsed street address.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressRecord {
    pub house_number: u64,
    /// Block letters, the 5 m distance class from the road (A-Z+).
    pub block: String,
    /// Region label, e.g. "CA" or "NE" (1-2 uppercase letters).
    pub region: String,
    /// Road number within the region; parity encodes orientation.
    pub road_number: u64,
    /// Title-case city token.
    pub city: String,
    /// Optional 2-letter title-case state code.
    pub state_code: Option<String>,
    /// 2-letter title-case country code.
    pub country_code: String,
    /// Optional 4-digit version year.
    pub version_year: Option<u16>,
}

impl AddressRecord {
    pub fn validate(&self) -> Result<()> {
        if self.block.is_empty() || !self.block.chars().all(|c| c.is_ascii_uppercase()) {
            return Err(Error::Validation(format!("bad block letters {:?}", self.block)));
        }
        if !(1..=2).contains(&self.region.len())
            || !self.region.chars().all(|c| c.is_ascii_uppercase())
        {
            return Err(Error::Validation(format!("bad region label {:?}", self.region)));
        }
        if self.road_number == 0 {
            return Err(Error::Validation("road number must be positive".into()));
        }
        if !is_title_token(&self.city) {
            return Err(Error::Validation(format!("bad city token {:?}", self.city)));
        }
        if let Some(state) = &self.state_code {
            if !is_title_pair(state) {
                return Err(Error::Validation(format!("bad state code {state:?}")));
            }
        }
        if !is_title_pair(&self.country_code) {
            return Err(Error::Validation(format!("bad country code {:?}", self.country_code)));
        }
        if let Some(year) = self.version_year {
            if !(1000..=9999).contains(&year) {
                return Err(Error::Validation(format!("version year {year} is not 4 digits")));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for AddressRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}.{}{}.{}.{}{}",
            self.house_number,
            self.block,
            self.region,
            self.road_number,
            self.city,
            self.state_code.as_deref().unwrap_or(""),
            self.country_code,
        )?;
        if let Some(year) = self.version_year {
            write!(f, ".{year}")?;
        }
        Ok(())
    }
}

fn is_title_token(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.clone().all(|c| c.is_ascii_alphabetic())
}

fn is_title_pair(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 2 && b[0].is_ascii_uppercase() && b[1].is_ascii_lowercase()
}

/// Render a record as an address string.
pub fn format(record: &AddressRecord) -> Result<String> {
    record.validate()?;
    Ok(record.to_string())
}

/// Parse an address string. Errors carry the 1-based field index; a wrong
/// field count reports field 0.
pub fn parse(s: &str) -> Result<AddressRecord> {
    let fields: Vec<&str> = s.split('.').collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(Error::AddressSyntax {
            field: 0,
            msg: format!("expected 4 or 5 dot-separated fields, got {}", fields.len()),
        });
    }

    let (house_number, block) = parse_house(fields[0])?;
    let (region, road_number) = parse_road(fields[1])?;

    let city = fields[2];
    if !is_title_token(city) {
        return Err(Error::AddressSyntax {
            field: 3,
            msg: format!("city must be a title-case alphabetic token, got {city:?}"),
        });
    }

    let geo = fields[3];
    let (state_code, country_code) = match geo.len() {
        2 if is_title_pair(geo) => (None, geo.to_string()),
        4 if is_title_pair(&geo[..2]) && is_title_pair(&geo[2..]) => {
            (Some(geo[..2].to_string()), geo[2..].to_string())
        }
        _ => {
            return Err(Error::AddressSyntax {
                field: 4,
                msg: format!("state/country must be 2 or 4 title-case letters, got {geo:?}"),
            })
        }
    };

    let version_year = match fields.get(4) {
        None => None,
        Some(year) => {
            if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) || year.starts_with('0')
            {
                return Err(Error::AddressSyntax {
                    field: 5,
                    msg: format!("version must be a 4-digit year, got {year:?}"),
                });
            }
            Some(year.parse::<u16>().expect("4 digits"))
        }
    };

    let record = AddressRecord {
        house_number,
        block,
        region,
        road_number,
        city: city.to_string(),
        state_code,
        country_code,
        version_year,
    };
    record.validate().map_err(|e| Error::AddressSyntax {
        field: 0,
        msg: e.to_string(),
    })?;
    Ok(record)
}

/// `<digits><LETTERS>` with no leading zeros (a lone "0" is fine).
fn parse_house(field: &str) -> Result<(u64, String)> {
    let digits_end = field.bytes().take_while(|b| b.is_ascii_digit()).count();
    let digits = &field[..digits_end];
    let letters = &field[digits_end..];
    if digits.is_empty() || letters.is_empty() || !letters.bytes().all(|b| b.is_ascii_uppercase()) {
        return Err(Error::AddressSyntax {
            field: 1,
            msg: format!("house field must be <digits><LETTERS>, got {field:?}"),
        });
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return Err(Error::AddressSyntax {
            field: 1,
            msg: format!("house number has leading zeros: {digits:?}"),
        });
    }
    let house = digits.parse().map_err(|_| Error::AddressSyntax {
        field: 1,
        msg: format!("house number {digits:?} out of range"),
    })?;
    Ok((house, letters.to_string()))
}

/// `<LETTERS{1,2}><digits>` with a positive, zero-free road number.
fn parse_road(field: &str) -> Result<(String, u64)> {
    let letters_end = field.bytes().take_while(|b| b.is_ascii_uppercase()).count();
    let letters = &field[..letters_end];
    let digits = &field[letters_end..];
    if !(1..=2).contains(&letters.len()) || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::AddressSyntax {
            field: 2,
            msg: format!("road field must be <LETTERS{{1,2}}><digits>, got {field:?}"),
        });
    }
    if digits.starts_with('0') {
        return Err(Error::AddressSyntax {
            field: 2,
            msg: format!("road number has a leading zero: {digits:?}"),
        });
    }
    let number = digits.parse().map_err(|_| Error::AddressSyntax {
        field: 2,
        msg: format!("road number {digits:?} out of range"),
    })?;
    Ok((letters.to_string(), number))
}
