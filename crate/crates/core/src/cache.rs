//! Versioned binary cache for Weyl atlases and cover data.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            4 bytes  "CPDW"
//! version          u32      1
//! family           u8       ASCII letter A..G
//! rank             u8
//! reserved         u16      0
//! n                u32      equals rank
//! num_pos_roots    u32      N
//! stratum_count    u32      N + 1
//! strata           for k = 0..=N:
//!   count          u64
//!   keys           count × n × i32, elements in lexicographic order
//! covers           for k = 0..=N, per element in stratum order:
//!   cover_count    u32
//!   edges          cover_count × (u32 delta, n × i8 coroot)
//!                  delta: first edge carries the absolute target
//!                  index, later edges the difference to the previous
//!                  target (targets strictly increase)
//! ```
//!
//! A read must consume the file exactly; trailing bytes, truncation, or
//! any bound violation is a format error.

use crate::error::{CoreError, Result};
use crate::rootsys::{Family, RootSystem, MAX_RANK};
use crate::weyl::{Atlas, CoverBlock, Key, Stratum};
use std::io::{Read, Write};

pub const MAGIC: [u8; 4] = *b"CPDW";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedAtlas {
    pub family: Family,
    pub rank: usize,
    pub num_positive_roots: usize,
    pub atlas: Atlas,
    pub blocks: Vec<CoverBlock>,
}

pub fn write_cache<W: Write>(
    out: &mut W,
    rs: &RootSystem,
    atlas: &Atlas,
    blocks: &[CoverBlock],
) -> Result<()> {
    let n = rs.rank();
    let num_pos = rs.num_positive_roots();
    if atlas.strata.len() != num_pos + 1 || blocks.len() != num_pos + 1 {
        return Err(CoreError::precondition(
            "cache writing needs a fully enumerated atlas with covers".to_string(),
        ));
    }
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[rs.spec.family.letter() as u8, n as u8, 0, 0])?;
    out.write_all(&(n as u32).to_le_bytes())?;
    out.write_all(&(num_pos as u32).to_le_bytes())?;
    out.write_all(&((num_pos + 1) as u32).to_le_bytes())?;

    for stratum in &atlas.strata {
        out.write_all(&(stratum.len() as u64).to_le_bytes())?;
        for key in &stratum.keys {
            for &c in key.coords(n) {
                out.write_all(&c.to_le_bytes())?;
            }
        }
    }
    for block in blocks {
        for idx in 0..block.from_count {
            let lo = block.offsets[idx] as usize;
            let hi = block.offsets[idx + 1] as usize;
            out.write_all(&((hi - lo) as u32).to_le_bytes())?;
            let mut prev = 0u32;
            for e in lo..hi {
                let target = block.targets[e];
                let delta = if e == lo { target } else { target - prev };
                prev = target;
                out.write_all(&delta.to_le_bytes())?;
                for &c in &block.coroots[e][..n] {
                    out.write_all(&[c as u8])?;
                }
            }
        }
    }
    Ok(())
}

struct Reader<R> {
    inner: R,
    offset: usize,
}

impl<R: Read> Reader<R> {
    fn bytes<const K: usize>(&mut self) -> Result<[u8; K]> {
        let mut buf = [0u8; K];
        self.inner.read_exact(&mut buf).map_err(|_| {
            CoreError::CacheFormat(format!("unexpected end of file at offset {}", self.offset))
        })?;
        self.offset += K;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes::<4>()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes::<8>()?))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.bytes::<4>()?))
    }
}

pub fn read_cache<R: Read>(input: &mut R) -> Result<CachedAtlas> {
    let mut r = Reader {
        inner: input,
        offset: 0,
    };
    if r.bytes::<4>()? != MAGIC {
        return Err(CoreError::CacheFormat("bad magic".to_string()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CoreError::CacheFormat(format!(
            "unsupported version {version}"
        )));
    }
    let [family_byte, rank_byte, r0, r1] = r.bytes::<4>()?;
    if (r0, r1) != (0, 0) {
        return Err(CoreError::CacheFormat("nonzero reserved field".to_string()));
    }
    let family: Family = (family_byte as char).to_string().parse()?;
    let rank = rank_byte as usize;
    let n = r.u32()? as usize;
    if n != rank || n == 0 || n > MAX_RANK {
        return Err(CoreError::CacheFormat(format!(
            "rank fields disagree or out of range: {rank} vs {n}"
        )));
    }
    let num_pos = r.u32()? as usize;
    let stratum_count = r.u32()? as usize;
    if stratum_count != num_pos + 1 {
        return Err(CoreError::CacheFormat(format!(
            "stratum count {stratum_count} does not match N = {num_pos}"
        )));
    }

    let mut strata = Vec::with_capacity(stratum_count);
    for k in 0..stratum_count {
        let count = r.u64()? as usize;
        if count == 0 || (k == 0 && count != 1) {
            return Err(CoreError::CacheFormat(format!(
                "implausible stratum size {count} at length {k}"
            )));
        }
        let mut keys = Vec::with_capacity(count);
        let mut prev: Option<Key> = None;
        for _ in 0..count {
            let mut key = [0i32; MAX_RANK];
            for c in key.iter_mut().take(n) {
                *c = r.i32()?;
            }
            let key = Key(key);
            if prev.is_some_and(|p| p >= key) {
                return Err(CoreError::CacheFormat(format!(
                    "stratum {k} keys are not strictly increasing"
                )));
            }
            prev = Some(key);
            keys.push(key);
        }
        strata.push(Stratum { keys });
    }

    let mut blocks = Vec::with_capacity(stratum_count);
    for k in 0..stratum_count {
        let from_count = strata[k].len();
        let to_count = if k + 1 < stratum_count {
            strata[k + 1].len()
        } else {
            0
        };
        let mut offsets = Vec::with_capacity(from_count + 1);
        offsets.push(0u32);
        let mut targets = Vec::new();
        let mut coroots = Vec::new();
        for _ in 0..from_count {
            let cover_count = r.u32()? as usize;
            if cover_count > to_count {
                return Err(CoreError::CacheFormat(format!(
                    "cover count {cover_count} exceeds stratum size {to_count}"
                )));
            }
            let mut prev = 0u32;
            for e in 0..cover_count {
                let delta = r.u32()?;
                let target = if e == 0 { delta } else { prev + delta };
                if target as usize >= to_count || (e > 0 && delta == 0) {
                    return Err(CoreError::CacheFormat(format!(
                        "cover target {target} out of bounds in stratum {k}"
                    )));
                }
                prev = target;
                targets.push(target);
                let mut coroot = [0i8; MAX_RANK];
                for c in coroot.iter_mut().take(n) {
                    *c = r.bytes::<1>()?[0] as i8;
                }
                coroots.push(coroot);
            }
            offsets.push(targets.len() as u32);
        }
        blocks.push(CoverBlock {
            from_len: k,
            from_count,
            to_count,
            offsets,
            targets,
            coroots,
        });
    }

    let mut trailing = [0u8; 1];
    if r.inner.read(&mut trailing)? != 0 {
        return Err(CoreError::CacheFormat("trailing bytes".to_string()));
    }

    Ok(CachedAtlas {
        family,
        rank,
        num_positive_roots: num_pos,
        atlas: Atlas { n, strata },
        blocks,
    })
}
