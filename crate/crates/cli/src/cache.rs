//! Binary side cache for BFS group tables, keyed by a hash of the ring
//! descriptor and epsilon. A corrupt or stale file is ignored and rebuilt.

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use sha2::{Digest, Sha256};
use starweil_core::group::{enumerate, GenToken, GroupTable};
use starweil_core::{ElemId, Mat2, StarGroup};

const MAGIC: &[u8; 6] = b"SWBFS\x01";

pub fn cache_key(descriptor_json: &str, eps: i8) -> String {
    let mut h = Sha256::new();
    h.update(descriptor_json.as_bytes());
    h.update([b':', eps as u8]);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_path(dir: &Path, descriptor_json: &str, eps: i8) -> PathBuf {
    dir.join(format!("{}.bfs", cache_key(descriptor_json, eps)))
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            bail!("truncated cache file");
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
}

pub fn store(dir: &Path, descriptor_json: &str, eps: i8, table: &GroupTable) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(64 + table.order() * 29);
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, descriptor_json.len() as u32);
    out.extend_from_slice(descriptor_json.as_bytes());
    out.push(eps as u8);
    put_u32(&mut out, table.order() as u32);
    for id in 0..table.order() as u32 {
        let g = table.element(id);
        for e in [g.a, g.b, g.c, g.d] {
            put_u32(&mut out, e.0);
        }
        match table.parent_of(id) {
            None => {
                put_u32(&mut out, 0);
                out.push(0);
                put_u32(&mut out, 0);
            }
            Some((parent, tok)) => {
                put_u32(&mut out, parent);
                let (kind, elem) = match tok {
                    GenToken::H(t) => (1u8, t.0),
                    GenToken::U(s) => (2u8, s.0),
                    GenToken::W => (3u8, 0),
                };
                out.push(kind);
                put_u32(&mut out, elem);
            }
        }
    }
    let path = cache_path(dir, descriptor_json, eps);
    let tmp = path.with_extension("bfs.tmp");
    std::fs::write(&tmp, &out)?;
    std::fs::rename(&tmp, &path)?;
    Ok(())
}

pub fn load(dir: &Path, descriptor_json: &str, eps: i8, group: &StarGroup) -> Result<GroupTable> {
    let path = cache_path(dir, descriptor_json, eps);
    let mut data = vec![];
    std::fs::File::open(&path)?.read_to_end(&mut data)?;
    let mut r = Reader { data: &data, pos: 0 };
    if r.take(6)? != MAGIC {
        bail!("bad magic");
    }
    let dlen = r.u32()? as usize;
    let stored_desc = std::str::from_utf8(r.take(dlen)?)?;
    if stored_desc != descriptor_json {
        bail!("descriptor mismatch");
    }
    if r.u8()? as i8 != eps {
        bail!("epsilon mismatch");
    }
    let order = r.u32()? as usize;
    let mut elements = Vec::with_capacity(order);
    let mut parent = Vec::with_capacity(order);
    let mut token = Vec::with_capacity(order);
    for _ in 0..order {
        let a = ElemId(r.u32()?);
        let b = ElemId(r.u32()?);
        let c = ElemId(r.u32()?);
        let d = ElemId(r.u32()?);
        elements.push(Mat2 { a, b, c, d });
        let p = r.u32()?;
        let kind = r.u8()?;
        let elem = r.u32()?;
        parent.push(p);
        token.push(match kind {
            0 => None,
            1 => Some(GenToken::H(ElemId(elem))),
            2 => Some(GenToken::U(ElemId(elem))),
            3 => Some(GenToken::W),
            other => bail!("bad token kind {other}"),
        });
    }
    Ok(GroupTable::from_parts(group, elements, parent, token)?)
}

/// Cache-aware enumeration; returns the table and whether the cache hit.
pub fn enumerate_with_cache(
    group: &StarGroup,
    max_size: usize,
    cache_dir: Option<&Path>,
) -> Result<(GroupTable, &'static str)> {
    let descriptor_json = group.ring().descriptor().to_json();
    if let Some(dir) = cache_dir {
        if let Ok(table) = load(dir, &descriptor_json, group.eps(), group) {
            return Ok((table, "hit"));
        }
        let table = enumerate(group, max_size)?;
        store(dir, &descriptor_json, group.eps(), &table)?;
        return Ok((table, "miss"));
    }
    Ok((enumerate(group, max_size)?, "disabled"))
}

