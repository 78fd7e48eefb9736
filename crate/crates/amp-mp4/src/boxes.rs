//! Generic ISO BMFF box tree parsing over a byte slice.

use crate::{Mp4Error, Result};

/// Box types whose payload is a sequence of child boxes.
const CONTAINER_TYPES: &[&[u8; 4]] = &[
    b"moov", b"trak", b"mdia", b"minf", b"stbl", b"moof", b"traf", b"mvex", b"edts", b"dinf",
    b"mfra", b"udta",
];

#[derive(Debug, Clone)]
pub struct BoxNode {
    pub box_type: [u8; 4],
    /// Set for `uuid` boxes.
    pub extended_type: Option<[u8; 16]>,
    /// Absolute offset of the box start within the source.
    pub start: usize,
    pub header_len: usize,
    /// Total box size including header.
    pub size: usize,
    pub children: Vec<BoxNode>,
}

impl BoxNode {
    pub fn end(&self) -> usize {
        self.start + self.size
    }

    pub fn payload_range(&self) -> std::ops::Range<usize> {
        self.start + self.header_len..self.end()
    }

    pub fn type_str(&self) -> String {
        String::from_utf8_lossy(&self.box_type).into_owned()
    }

    pub fn is_container(&self) -> bool {
        CONTAINER_TYPES.contains(&&self.box_type)
    }

    /// Depth-first search over this subtree.
    pub fn descendants(&self) -> Vec<&BoxNode> {
        let mut out = Vec::new();
        let mut stack: Vec<&BoxNode> = self.children.iter().collect();
        while let Some(node) = stack.pop() {
            stack.extend(node.children.iter());
            out.push(node);
        }
        out
    }
}

/// Parse the full tree of top-level boxes, recursing into known container
/// types. Unknown box types are preserved opaquely.
pub fn parse_boxes(bytes: &[u8]) -> Result<Vec<BoxNode>> {
    parse_run(bytes, 0, bytes.len())
}

fn parse_run(bytes: &[u8], start: usize, end: usize) -> Result<Vec<BoxNode>> {
    let mut nodes = Vec::new();
    let mut pos = start;
    while pos < end {
        let node = parse_one(bytes, pos, end)?;
        pos = node.end();
        nodes.push(node);
    }
    Ok(nodes)
}

pub(crate) fn parse_one(bytes: &[u8], start: usize, limit: usize) -> Result<BoxNode> {
    if start + 8 > limit {
        return Err(Mp4Error::parse(start, "truncated box header"));
    }
    let size32 = u32::from_be_bytes(bytes[start..start + 4].try_into().unwrap());
    let box_type: [u8; 4] = bytes[start + 4..start + 8].try_into().unwrap();
    let mut header_len = 8usize;
    let size = match size32 {
        0 => limit - start, // box extends to the end of the enclosing space
        1 => {
            if start + 16 > limit {
                return Err(Mp4Error::parse(start, "truncated largesize header"));
            }
            header_len = 16;
            let s = u64::from_be_bytes(bytes[start + 8..start + 16].try_into().unwrap());
            usize::try_from(s).map_err(|_| Mp4Error::parse(start, "largesize overflow"))?
        }
        s => s as usize,
    };
    if size < header_len {
        return Err(Mp4Error::parse(start, "box size smaller than header"));
    }
    if start + size > limit {
        return Err(Mp4Error::parse(
            start,
            format!(
                "box `{}` size {size} overruns available bytes",
                String::from_utf8_lossy(&box_type)
            ),
        ));
    }
    let mut extended_type = None;
    if &box_type == b"uuid" {
        if start + header_len + 16 > start + size {
            return Err(Mp4Error::parse(start, "uuid box too short for extended type"));
        }
        let mut ext = [0u8; 16];
        ext.copy_from_slice(&bytes[start + header_len..start + header_len + 16]);
        extended_type = Some(ext);
    }
    let mut node = BoxNode {
        box_type,
        extended_type,
        start,
        header_len,
        size,
        children: Vec::new(),
    };
    if node.is_container() {
        node.children = parse_run(bytes, start + header_len, start + size)?;
    }
    Ok(node)
}
