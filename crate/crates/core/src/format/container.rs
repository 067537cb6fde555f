//! Binary container for one encoded block.
//!
//! | field             | size                                   |
//! |-------------------|----------------------------------------|
//! | magic `VLRS`      | 4 bytes                                |
//! | version           | 1 byte, currently 1                    |
//! | code hash         | 8 bytes, FNV-1a 64, big-endian         |
//! | symbol count      | unsigned LEB128                        |
//! | termination       | 1 byte: length in the low 7 bits, 0x80 set when the termination bits were stripped |
//! | payload bit count | unsigned LEB128                        |
//! | payload           | bits packed MSB first, zero padded     |
//!
//! The hash is taken over the canonical text rendering of the code.

use std::hash::Hasher;
use std::io::{Cursor, Read};

use fnv::FnvHasher;
use thiserror::Error;

use super::spec_text::render_code_spec;
use crate::bits::BitString;
use crate::codec::EncodedBlock;
use crate::model::Vlrs;

pub const MAGIC: &[u8; 4] = b"VLRS";
pub const VERSION: u8 = 1;
const STRIPPED_FLAG: u8 = 0x80;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("not a VLRS container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("container is truncated")]
    Truncated,
    #[error("malformed container: {0}")]
    Corrupt(String),
    #[error("container was written for a different code (hash {found:016x}, expected {expected:016x})")]
    HashMismatch { expected: u64, found: u64 },
    #[error("termination of {0} bits does not fit the header")]
    TerminationTooLong(usize),
}

/// A parsed container: the block plus the hash it was written with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    pub code_hash: u64,
    pub block: EncodedBlock,
}

impl Container {
    /// Fail unless the container belongs to `code`.
    pub fn check_code(&self, code: &Vlrs) -> Result<(), ContainerError> {
        let expected = spec_hash(code);
        if self.code_hash != expected {
            return Err(ContainerError::HashMismatch {
                expected,
                found: self.code_hash,
            });
        }
        Ok(())
    }
}

pub fn spec_hash(code: &Vlrs) -> u64 {
    let mut hasher = FnvHasher::default();
    hasher.write(render_code_spec(code).as_bytes());
    hasher.finish()
}

pub fn write_container(code: &Vlrs, block: &EncodedBlock) -> Result<Vec<u8>, ContainerError> {
    write_with_hash(spec_hash(code), block)
}

fn write_with_hash(hash: u64, block: &EncodedBlock) -> Result<Vec<u8>, ContainerError> {
    if block.termination_len >= STRIPPED_FLAG as usize {
        return Err(ContainerError::TerminationTooLong(block.termination_len));
    }
    let payload = block.payload.to_bytes_msb();
    let mut out = Vec::with_capacity(32 + payload.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&hash.to_be_bytes());
    leb128::write::unsigned(&mut out, block.symbol_count as u64).expect("writing to a Vec");
    let mut termination = block.termination_len as u8;
    if block.termination_stripped {
        termination |= STRIPPED_FLAG;
    }
    out.push(termination);
    leb128::write::unsigned(&mut out, block.payload.len() as u64).expect("writing to a Vec");
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn read_container(bytes: &[u8]) -> Result<Container, ContainerError> {
    let mut cursor = Cursor::new(bytes);
    let mut magic = [0u8; 4];
    read_exact(&mut cursor, &mut magic)?;
    if &magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let mut byte = [0u8; 1];
    read_exact(&mut cursor, &mut byte)?;
    if byte[0] != VERSION {
        return Err(ContainerError::UnsupportedVersion(byte[0]));
    }
    let mut hash = [0u8; 8];
    read_exact(&mut cursor, &mut hash)?;
    let symbol_count = read_varint(&mut cursor)?;
    read_exact(&mut cursor, &mut byte)?;
    let termination_len = (byte[0] & !STRIPPED_FLAG) as usize;
    let termination_stripped = byte[0] & STRIPPED_FLAG != 0;
    let bit_len = read_varint(&mut cursor)?;

    let start = cursor.position() as usize;
    let rest = &bytes[start..];
    let needed = bit_len.div_ceil(8);
    if (rest.len() as u64) < needed {
        return Err(ContainerError::Truncated);
    }
    if rest.len() as u64 > needed {
        return Err(ContainerError::Corrupt(format!(
            "{} trailing bytes after the payload",
            rest.len() as u64 - needed
        )));
    }
    let bit_len = bit_len as usize;
    if !bit_len.is_multiple_of(8) && rest[rest.len() - 1] & (0xff >> (bit_len % 8)) != 0 {
        return Err(ContainerError::Corrupt("nonzero padding bits".into()));
    }
    let payload = BitString::from_bytes_msb(rest, bit_len).expect("length checked above");
    Ok(Container {
        code_hash: u64::from_be_bytes(hash),
        block: EncodedBlock {
            payload,
            symbol_count: usize::try_from(symbol_count)
                .map_err(|_| ContainerError::Corrupt("symbol count overflows".into()))?,
            termination_len,
            termination_stripped,
        },
    })
}

fn read_exact(cursor: &mut Cursor<&[u8]>, buf: &mut [u8]) -> Result<(), ContainerError> {
    cursor.read_exact(buf).map_err(|_| ContainerError::Truncated)
}

fn read_varint(cursor: &mut Cursor<&[u8]>) -> Result<u64, ContainerError> {
    leb128::read::unsigned(cursor).map_err(|e| match e {
        leb128::read::Error::IoError(_) => ContainerError::Truncated,
        leb128::read::Error::Overflow => ContainerError::Corrupt("varint overflows 64 bits".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::format::parse_code_spec;

    fn c2() -> Vlrs {
        parse_code_spec("alphabet: a1 a2 a3\nrule: a1 0 -> 10\nrule: a1 1 -> 01\nrule: a2 - -> 00\nrule: a3 - -> 11\n")
            .unwrap()
    }

    fn block() -> EncodedBlock {
        EncodedBlock {
            payload: bs("1000011001010"),
            symbol_count: 9,
            termination_len: 1,
            termination_stripped: false,
        }
    }

    #[test]
    fn layout() {
        let bytes = write_container(&c2(), &block()).unwrap();
        assert_eq!(&bytes[..4], b"VLRS");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..13], &spec_hash(&c2()).to_be_bytes());
        assert_eq!(bytes[13], 9);
        assert_eq!(bytes[14], 1);
        assert_eq!(bytes[15], 13);
        assert_eq!(&bytes[16..], &[0b1000_0110, 0b0101_0000]);
    }

    #[test]
    fn roundtrip_and_hash_check() {
        let mut b = block();
        b.termination_stripped = true;
        let bytes = write_container(&c2(), &b).unwrap();
        let back = read_container(&bytes).unwrap();
        assert_eq!(back.block, b);
        back.check_code(&c2()).unwrap();
        let c1 = parse_code_spec("alphabet: a1 a2 a3\nrule: a1 - -> 0\nrule: a2 - -> 10\nrule: a3 - -> 11\n").unwrap();
        assert!(matches!(back.check_code(&c1), Err(ContainerError::HashMismatch { .. })));
    }

    #[test]
    fn damaged_containers() {
        let bytes = write_container(&c2(), &block()).unwrap();
        for cut in 0..bytes.len() {
            assert_eq!(read_container(&bytes[..cut]), Err(ContainerError::Truncated), "cut at {cut}");
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(read_container(&extra), Err(ContainerError::Corrupt(_))));
        let mut padded = bytes.clone();
        *padded.last_mut().unwrap() |= 1;
        assert!(matches!(read_container(&padded), Err(ContainerError::Corrupt(_))));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert_eq!(read_container(&magic), Err(ContainerError::BadMagic));
        let mut version = bytes;
        version[4] = 2;
        assert_eq!(read_container(&version), Err(ContainerError::UnsupportedVersion(2)));
    }

    #[test]
    fn long_termination_is_rejected() {
        let mut b = block();
        b.termination_len = 128;
        assert_eq!(write_container(&c2(), &b), Err(ContainerError::TerminationTooLong(128)));
    }
}
