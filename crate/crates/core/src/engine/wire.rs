//! Byte layout of the shards that circulate around the ring.
//!
//! All integers are fixed-width little-endian. A payload is a header
//! `kind: u32, owner: u32, workers: u32, records: u32` followed by `records`
//! community records `id: u32, count: u32` and `count` members. Members are a
//! `u64` node id for [`KIND_COMMUNITIES`], and a `u64` node id followed by a
//! `u32` detected-community id for [`KIND_LABELLED`].

use crate::error::{Error, Result};
use crate::partition::{Community, PartitionShard};

pub const KIND_COMMUNITIES: u32 = 0;
pub const KIND_LABELLED: u32 = 1;

const HEADER_BYTES: usize = 16;

/// One hop of the ring: the forwarding worker, how many times the payload has
/// been forwarded, and the encoded shard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMessage {
    pub sender: u32,
    pub hop: u32,
    pub payload: Vec<u8>,
}

impl RingMessage {
    /// Bytes this message would occupy on a transport: sender, hop, payload.
    pub fn wire_len(&self) -> usize {
        8 + self.payload.len()
    }
}

/// A ground-truth community whose members carry their detected-community id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledCommunity {
    pub id: u32,
    pub members: Vec<(u64, u32)>,
}

/// A worker's slice of the node-to-community maps: its ground-truth
/// communities, each member tagged with its detected community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledShard {
    pub owner: usize,
    pub workers: usize,
    pub communities: Vec<LabelledCommunity>,
}

fn header(out: &mut Vec<u8>, kind: u32, owner: usize, workers: usize, records: usize) {
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&(owner as u32).to_le_bytes());
    out.extend_from_slice(&(workers as u32).to_le_bytes());
    out.extend_from_slice(&(records as u32).to_le_bytes());
}

pub fn encode_shard(shard: &PartitionShard) -> Vec<u8> {
    let body: usize = shard.communities.iter().map(|c| 8 + 8 * c.size()).sum();
    let mut out = Vec::with_capacity(HEADER_BYTES + body);
    header(
        &mut out,
        KIND_COMMUNITIES,
        shard.owner,
        shard.workers,
        shard.communities.len(),
    );
    for c in &shard.communities {
        out.extend_from_slice(&c.id.to_le_bytes());
        out.extend_from_slice(&(c.size() as u32).to_le_bytes());
        for &node in &c.members {
            out.extend_from_slice(&node.to_le_bytes());
        }
    }
    out
}

pub fn encode_labelled(shard: &LabelledShard) -> Vec<u8> {
    let body: usize = shard.communities.iter().map(|c| 8 + 12 * c.members.len()).sum();
    let mut out = Vec::with_capacity(HEADER_BYTES + body);
    header(
        &mut out,
        KIND_LABELLED,
        shard.owner,
        shard.workers,
        shard.communities.len(),
    );
    for c in &shard.communities {
        out.extend_from_slice(&c.id.to_le_bytes());
        out.extend_from_slice(&(c.members.len() as u32).to_le_bytes());
        for &(node, detected) in &c.members {
            out.extend_from_slice(&node.to_le_bytes());
            out.extend_from_slice(&detected.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Wire(format!("truncated at byte {}", self.at)))?;
        let out = &self.bytes[self.at..end];
        self.at = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(self) -> Result<()> {
        if self.at != self.bytes.len() {
            return Err(Error::Wire(format!("{} trailing bytes", self.bytes.len() - self.at)));
        }
        Ok(())
    }
}

fn read_header(r: &mut Reader<'_>, expected: u32) -> Result<(usize, usize, usize)> {
    let kind = r.u32()?;
    if kind != expected {
        return Err(Error::Wire(format!("expected payload kind {expected}, got {kind}")));
    }
    let owner = r.u32()? as usize;
    let workers = r.u32()? as usize;
    let records = r.u32()? as usize;
    if owner >= workers {
        return Err(Error::Wire(format!("owner {owner} out of range for {workers} workers")));
    }
    Ok((owner, workers, records))
}

/// The owning worker recorded in a payload header, without decoding the body.
pub fn payload_owner(bytes: &[u8]) -> Result<usize> {
    let mut r = Reader { bytes, at: 0 };
    r.take(4)?;
    Ok(r.u32()? as usize)
}

/// Fails on a length mismatch so a count can never drive a huge allocation.
fn bounded(count: usize, stride: usize, r: &Reader<'_>) -> Result<usize> {
    if count.saturating_mul(stride) > r.bytes.len() - r.at {
        return Err(Error::Wire(format!(
            "record claims {count} members past end of payload"
        )));
    }
    Ok(count)
}

pub fn decode_shard(bytes: &[u8]) -> Result<PartitionShard> {
    let mut r = Reader { bytes, at: 0 };
    let (owner, workers, records) = read_header(&mut r, KIND_COMMUNITIES)?;
    let mut communities = Vec::with_capacity(bounded(records, 8, &r)?);
    for _ in 0..records {
        let id = r.u32()?;
        let count = bounded(r.u32()? as usize, 8, &r)?;
        let members = (0..count).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        communities.push(Community { id, members });
    }
    r.finish()?;
    Ok(PartitionShard {
        owner,
        workers,
        communities,
    })
}

pub fn decode_labelled(bytes: &[u8]) -> Result<LabelledShard> {
    let mut r = Reader { bytes, at: 0 };
    let (owner, workers, records) = read_header(&mut r, KIND_LABELLED)?;
    let mut communities = Vec::with_capacity(bounded(records, 8, &r)?);
    for _ in 0..records {
        let id = r.u32()?;
        let count = bounded(r.u32()? as usize, 12, &r)?;
        let members = (0..count)
            .map(|_| Ok((r.u64()?, r.u32()?)))
            .collect::<Result<Vec<_>>>()?;
        communities.push(LabelledCommunity { id, members });
    }
    r.finish()?;
    Ok(LabelledShard {
        owner,
        workers,
        communities,
    })
}
