// SPDX-License-Identifier: Apache-2.0

//! Symbolic packet classes.
//!
//! A [`PacketClass`] describes a *set* of concrete packet headers as the
//! cartesian product of per-field sets: integer interval sets for the four
//! address/port fields and small bit sets for protocol, application class
//! and spam flag. The address space is desk-scale on purpose: every field
//! ranges over `[0, 2^16)`, which keeps the algebra exactly enumerable on
//! reduced domains while preserving the structure of real header spaces.
//!
//! The algebra is closed under intersection, difference (returned as a set
//! of pairwise-disjoint classes) and subset tests. The empty class is
//! canonical: any class with one empty field collapses to the distinguished
//! value returned by [`PacketClass::empty`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// Upper bound (inclusive) of every interval field domain.
pub const FIELD_MAX: u32 = u16::MAX as u32;

/// A normalized set of closed integer intervals over `[0, FIELD_MAX]`.
///
/// Invariant: intervals are sorted, pairwise disjoint and non-adjacent
/// (`[0,4],[5,9]` is stored as `[0,9]`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalSet {
    ivs: Vec<(u32, u32)>,
}

impl IntervalSet {
    /// The empty set.
    pub fn empty() -> Self {
        IntervalSet { ivs: Vec::new() }
    }

    /// The full field domain `[0, FIELD_MAX]`.
    pub fn full() -> Self {
        IntervalSet {
            ivs: vec![(0, FIELD_MAX)],
        }
    }

    /// A single value.
    pub fn single(v: u32) -> Self {
        debug_assert!(v <= FIELD_MAX);
        IntervalSet { ivs: vec![(v, v)] }
    }

    /// A single closed interval `[lo, hi]`; empty when `lo > hi`.
    pub fn range(lo: u32, hi: u32) -> Self {
        if lo > hi {
            return Self::empty();
        }
        debug_assert!(hi <= FIELD_MAX);
        IntervalSet { ivs: vec![(lo, hi)] }
    }

    /// Builds a normalized set from arbitrary (possibly overlapping,
    /// unsorted) closed intervals. Intervals with `lo > hi` are dropped.
    pub fn from_intervals<I: IntoIterator<Item = (u32, u32)>>(intervals: I) -> Self {
        let mut ivs: Vec<(u32, u32)> = intervals
            .into_iter()
            .filter(|&(lo, hi)| lo <= hi && lo <= FIELD_MAX)
            .map(|(lo, hi)| (lo, hi.min(FIELD_MAX)))
            .collect();
        ivs.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(ivs.len());
        for (lo, hi) in ivs {
            match out.last_mut() {
                // merge overlapping and adjacent intervals
                Some((_, phi)) if lo <= phi.saturating_add(1) => *phi = (*phi).max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { ivs: out }
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.ivs == [(0, FIELD_MAX)]
    }

    pub fn contains(&self, v: u32) -> bool {
        self.ivs.iter().any(|&(lo, hi)| lo <= v && v <= hi)
    }

    /// Number of values in the set.
    pub fn len(&self) -> u64 {
        self.ivs.iter().map(|&(lo, hi)| (hi - lo + 1) as u64).sum()
    }

    /// The normalized intervals, sorted and disjoint.
    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.ivs
    }

    /// Smallest value, if any.
    pub fn min_value(&self) -> Option<u32> {
        self.ivs.first().map(|&(lo, _)| lo)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ivs.len() && j < other.ivs.len() {
            let (alo, ahi) = self.ivs[i];
            let (blo, bhi) = other.ivs[j];
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo <= hi {
                out.push((lo, hi));
            }
            if ahi < bhi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // inputs normalized, so the result already is
        IntervalSet { ivs: out }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.ivs.iter().chain(other.ivs.iter()).copied())
    }

    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(lo, hi) in &self.ivs {
            let mut cur = lo;
            for &(blo, bhi) in &other.ivs {
                if bhi < cur {
                    continue;
                }
                if blo > hi {
                    break;
                }
                if blo > cur {
                    out.push((cur, blo - 1));
                }
                cur = bhi.saturating_add(1);
                if cur > hi {
                    break;
                }
            }
            if cur <= hi {
                out.push((cur, hi));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.subtract(other).is_empty()
    }

    /// Iterates every value, capped at `cap` (inclusive bound on values).
    pub fn iter_values_upto(&self, cap: u32) -> impl Iterator<Item = u32> + '_ {
        self.ivs
            .iter()
            .take_while(move |&&(lo, _)| lo <= cap)
            .flat_map(move |&(lo, hi)| lo..=hi.min(cap))
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return write!(f, "*");
        }
        let parts: Vec<String> = self
            .ivs
            .iter()
            .map(|&(lo, hi)| {
                if lo == hi {
                    format!("{lo}")
                } else {
                    format!("{lo}-{hi}")
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[u32; 2]> = self.ivs.iter().map(|&(lo, hi)| [lo, hi]).collect();
        pairs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let pairs: Vec<[u32; 2]> = Vec::deserialize(de)?;
        Ok(IntervalSet::from_intervals(
            pairs.into_iter().map(|[lo, hi]| (lo, hi)),
        ))
    }
}

/// Splits the full field domain into `n` contiguous, equal-width buckets.
///
/// Used for load-balancer backend assignment: bucket `i` holds every source
/// address `s` with `s * n / 2^16 == i`. The buckets partition the domain
/// exactly, so the union over all backends is always the full space.
pub fn partition_domain(n: usize) -> Vec<IntervalSet> {
    assert!(n > 0, "cannot partition into zero buckets");
    let size = (FIELD_MAX as u64) + 1;
    let n = n as u64;
    // bucket i = { v : v*n/size == i }, i.e. [ceil(i*size/n), ceil((i+1)*size/n) - 1]
    (0..n)
        .map(|i| {
            let lo = (i * size).div_ceil(n) as u32;
            let hi = (((i + 1) * size).div_ceil(n) - 1) as u32;
            IntervalSet::range(lo, hi)
        })
        .collect()
}

/// Bucket index of a source value under [`partition_domain`] with `n` buckets.
pub fn bucket_of(v: u32, n: usize) -> usize {
    ((v as u64) * n as u64 / ((FIELD_MAX as u64) + 1)) as usize
}

macro_rules! flag_enum_set {
    ($(#[$emeta:meta])* enum $name:ident, set $set:ident, [$($variant:ident = $label:literal),+ $(,)?]) => {
        $(#[$emeta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $label)] $variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            // field-less enum: the discriminant is the declaration index
            fn bit(self) -> u8 {
                1 << (self as u8)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $($name::$variant => write!(f, $label),)+
                }
            }
        }

        /// Bit set over [`
        #[doc = stringify!($name)]
        /// `].
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $set(u8);

        impl $set {
            pub const EMPTY: $set = $set(0);

            pub fn full() -> Self {
                let mut bits = 0;
                $(bits |= $name::$variant.bit();)+
                $set(bits)
            }

            pub fn single(v: $name) -> Self {
                $set(v.bit())
            }

            pub fn is_empty(&self) -> bool {
                self.0 == 0
            }

            pub fn is_full(&self) -> bool {
                *self == Self::full()
            }

            pub fn contains(self, v: $name) -> bool {
                self.0 & v.bit() != 0
            }

            pub fn intersect(self, other: Self) -> Self {
                $set(self.0 & other.0)
            }

            pub fn union(self, other: Self) -> Self {
                $set(self.0 | other.0)
            }

            pub fn subtract(self, other: Self) -> Self {
                $set(self.0 & !other.0)
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn len(self) -> u32 {
                self.0.count_ones()
            }

            pub fn iter(self) -> impl Iterator<Item = $name> {
                $name::ALL.iter().copied().filter(move |v| self.contains(*v))
            }

            pub fn min_value(self) -> Option<$name> {
                self.iter().next()
            }
        }

        impl FromIterator<$name> for $set {
            fn from_iter<I: IntoIterator<Item = $name>>(iter: I) -> Self {
                let mut s = $set::EMPTY;
                for v in iter {
                    s = s.union($set::single(v));
                }
                s
            }
        }

        impl fmt::Debug for $set {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.is_full() {
                    return write!(f, "*");
                }
                let parts: Vec<String> = self.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }

        impl Serialize for $set {
            fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                let items: Vec<$name> = self.iter().collect();
                items.serialize(ser)
            }
        }

        impl<'de> Deserialize<'de> for $set {
            fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
                let items: Vec<$name> = Vec::deserialize(de)?;
                Ok(items.into_iter().collect())
            }
        }
    };
}

flag_enum_set! {
    /// Transport protocol.
    enum Proto, set ProtoSet, [Tcp = "TCP", Udp = "UDP"]
}

flag_enum_set! {
    /// Coarse application class carried as an explicit header field so that
    /// cache and anti-spam behavior stay pure functions of the class.
    enum AppClass, set AppClassSet, [Web = "WEB", Email = "EMAIL", Other = "OTHER"]
}

flag_enum_set! {
    /// Spam classification flag, modeled as a header bit.
    enum SpamFlag, set SpamFlagSet, [Ham = "HAM", Spam = "SPAM"]
}

/// A single concrete packet header; the element type of [`PacketClass`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConcretePacket {
    pub src_ip: u32,
    pub dst_ip: u32,
    pub src_port: u32,
    pub dst_port: u32,
    pub proto: Proto,
    pub app_class: AppClass,
    pub spam_flag: SpamFlag,
}

/// A symbolic set of packet headers: the product of seven per-field sets.
///
/// Canonical form: either every field set is non-empty, or the class is the
/// distinguished empty class with every field set empty. All constructors
/// and operations preserve this.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PacketClass {
    #[serde(default = "IntervalSet::full", skip_serializing_if = "IntervalSet::is_full")]
    pub src_ip: IntervalSet,
    #[serde(default = "IntervalSet::full", skip_serializing_if = "IntervalSet::is_full")]
    pub dst_ip: IntervalSet,
    #[serde(default = "IntervalSet::full", skip_serializing_if = "IntervalSet::is_full")]
    pub src_port: IntervalSet,
    #[serde(default = "IntervalSet::full", skip_serializing_if = "IntervalSet::is_full")]
    pub dst_port: IntervalSet,
    #[serde(default = "ProtoSet::full", skip_serializing_if = "ProtoSet::is_full")]
    pub proto: ProtoSet,
    #[serde(
        default = "AppClassSet::full",
        skip_serializing_if = "AppClassSet::is_full",
        rename = "app_class"
    )]
    pub app_class: AppClassSet,
    #[serde(
        default = "SpamFlagSet::full",
        skip_serializing_if = "SpamFlagSet::is_full",
        rename = "spam_flag"
    )]
    pub spam_flag: SpamFlagSet,
}

impl Default for PacketClass {
    fn default() -> Self {
        PacketClass::full()
    }
}

impl PacketClass {
    /// The full class: every concrete packet.
    pub fn full() -> Self {
        PacketClass {
            src_ip: IntervalSet::full(),
            dst_ip: IntervalSet::full(),
            src_port: IntervalSet::full(),
            dst_port: IntervalSet::full(),
            proto: ProtoSet::full(),
            app_class: AppClassSet::full(),
            spam_flag: SpamFlagSet::full(),
        }
    }

    /// The distinguished empty class.
    pub fn empty() -> Self {
        PacketClass {
            src_ip: IntervalSet::empty(),
            dst_ip: IntervalSet::empty(),
            src_port: IntervalSet::empty(),
            dst_port: IntervalSet::empty(),
            proto: ProtoSet::EMPTY,
            app_class: AppClassSet::EMPTY,
            spam_flag: SpamFlagSet::EMPTY,
        }
    }

    /// Canonicalizing constructor: any empty field collapses to EMPTY.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        src_ip: IntervalSet,
        dst_ip: IntervalSet,
        src_port: IntervalSet,
        dst_port: IntervalSet,
        proto: ProtoSet,
        app_class: AppClassSet,
        spam_flag: SpamFlagSet,
    ) -> Self {
        let pc = PacketClass {
            src_ip,
            dst_ip,
            src_port,
            dst_port,
            proto,
            app_class,
            spam_flag,
        };
        pc.canonicalize()
    }

    fn canonicalize(self) -> Self {
        if self.src_ip.is_empty()
            || self.dst_ip.is_empty()
            || self.src_port.is_empty()
            || self.dst_port.is_empty()
            || self.proto.is_empty()
            || self.app_class.is_empty()
            || self.spam_flag.is_empty()
        {
            PacketClass::empty()
        } else {
            self
        }
    }

    pub fn is_empty(&self) -> bool {
        self.src_ip.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.src_ip.is_full()
            && self.dst_ip.is_full()
            && self.src_port.is_full()
            && self.dst_port.is_full()
            && self.proto.is_full()
            && self.app_class.is_full()
            && self.spam_flag.is_full()
    }

    /// Builder-style field restriction.
    pub fn with_src_ip(mut self, s: IntervalSet) -> Self {
        self.src_ip = s;
        self.canonicalize()
    }

    pub fn with_dst_ip(mut self, s: IntervalSet) -> Self {
        self.dst_ip = s;
        self.canonicalize()
    }

    pub fn with_src_port(mut self, s: IntervalSet) -> Self {
        self.src_port = s;
        self.canonicalize()
    }

    pub fn with_dst_port(mut self, s: IntervalSet) -> Self {
        self.dst_port = s;
        self.canonicalize()
    }

    pub fn with_proto(mut self, s: ProtoSet) -> Self {
        self.proto = s;
        self.canonicalize()
    }

    pub fn with_app_class(mut self, s: AppClassSet) -> Self {
        self.app_class = s;
        self.canonicalize()
    }

    pub fn with_spam_flag(mut self, s: SpamFlagSet) -> Self {
        self.spam_flag = s;
        self.canonicalize()
    }

    pub fn contains(&self, p: &ConcretePacket) -> bool {
        self.src_ip.contains(p.src_ip)
            && self.dst_ip.contains(p.dst_ip)
            && self.src_port.contains(p.src_port)
            && self.dst_port.contains(p.dst_port)
            && self.proto.contains(p.proto)
            && self.app_class.contains(p.app_class)
            && self.spam_flag.contains(p.spam_flag)
    }

    /// Fieldwise intersection; EMPTY iff the classes share no packet.
    pub fn intersect(&self, other: &PacketClass) -> PacketClass {
        PacketClass::new(
            self.src_ip.intersect(&other.src_ip),
            self.dst_ip.intersect(&other.dst_ip),
            self.src_port.intersect(&other.src_port),
            self.dst_port.intersect(&other.dst_port),
            self.proto.intersect(other.proto),
            self.app_class.intersect(other.app_class),
            self.spam_flag.intersect(other.spam_flag),
        )
    }

    pub fn overlaps(&self, other: &PacketClass) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Set difference `self \ other`, returned as pairwise-disjoint classes
    /// whose union is exactly the difference.
    ///
    /// Standard product-space decomposition: walk the fields in a fixed
    /// order, peeling off the part of `self` that avoids `other` in the
    /// current field while agreeing with the overlap in all earlier fields.
    pub fn subtract(&self, other: &PacketClass) -> Vec<PacketClass> {
        if self.is_empty() {
            return Vec::new();
        }
        if other.is_empty() {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut carved = self.clone(); // fields progressively restricted to the overlap

        macro_rules! peel {
            ($field:ident, $with:ident) => {
                let diff = carved.$field.subtract(&other.$field);
                let piece = carved.clone().$with(diff);
                if !piece.is_empty() {
                    out.push(piece);
                }
                let keep = carved.$field.intersect(&other.$field);
                carved = carved.$with(keep);
                if carved.is_empty() {
                    return out;
                }
            };
            (flag $field:ident, $with:ident) => {
                let diff = carved.$field.subtract(other.$field);
                let piece = carved.clone().$with(diff);
                if !piece.is_empty() {
                    out.push(piece);
                }
                let keep = carved.$field.intersect(other.$field);
                carved = carved.$with(keep);
                if carved.is_empty() {
                    return out;
                }
            };
        }

        peel!(src_ip, with_src_ip);
        peel!(dst_ip, with_dst_ip);
        peel!(src_port, with_src_port);
        peel!(dst_port, with_dst_port);
        peel!(flag proto, with_proto);
        peel!(flag app_class, with_app_class);
        peel!(flag spam_flag, with_spam_flag);
        // whatever is left of `carved` lies fully inside `other`
        out
    }

    pub fn is_subset(&self, other: &PacketClass) -> bool {
        if self.is_empty() {
            return true;
        }
        self.src_ip.is_subset(&other.src_ip)
            && self.dst_ip.is_subset(&other.dst_ip)
            && self.src_port.is_subset(&other.src_port)
            && self.dst_port.is_subset(&other.dst_port)
            && self.proto.is_subset(other.proto)
            && self.app_class.is_subset(other.app_class)
            && self.spam_flag.is_subset(other.spam_flag)
    }

    /// Number of concrete packets in the class.
    pub fn count(&self) -> u64 {
        if self.is_empty() {
            return 0;
        }
        self.src_ip.len()
            * self.dst_ip.len()
            * self.src_port.len()
            * self.dst_port.len()
            * self.proto.len() as u64
            * self.app_class.len() as u64
            * self.spam_flag.len() as u64
    }

    /// An arbitrary concrete packet from the class (the fieldwise minimum).
    pub fn sample(&self) -> Option<ConcretePacket> {
        Some(ConcretePacket {
            src_ip: self.src_ip.min_value()?,
            dst_ip: self.dst_ip.min_value()?,
            src_port: self.src_port.min_value()?,
            dst_port: self.dst_port.min_value()?,
            proto: self.proto.min_value()?,
            app_class: self.app_class.min_value()?,
            spam_flag: self.spam_flag.min_value()?,
        })
    }

    /// Union as a disjoint set of classes: `self` plus the parts of `other`
    /// outside `self`.
    pub fn union_classes(&self, other: &PacketClass) -> Vec<PacketClass> {
        let mut out = vec![self.clone()];
        out.extend(other.subtract(self));
        out.retain(|c| !c.is_empty());
        out
    }

    /// Merges two classes into one product class when possible: the inputs
    /// must agree on every field but at most one. Returns `None` when the
    /// union is not itself a product.
    pub fn try_merge(&self, other: &PacketClass) -> Option<PacketClass> {
        if self.is_subset(other) {
            return Some(other.clone());
        }
        if other.is_subset(self) {
            return Some(self.clone());
        }
        let mut differing = 0;
        if self.src_ip != other.src_ip {
            differing += 1;
        }
        if self.dst_ip != other.dst_ip {
            differing += 1;
        }
        if self.src_port != other.src_port {
            differing += 1;
        }
        if self.dst_port != other.dst_port {
            differing += 1;
        }
        if self.proto != other.proto {
            differing += 1;
        }
        if self.app_class != other.app_class {
            differing += 1;
        }
        if self.spam_flag != other.spam_flag {
            differing += 1;
        }
        if differing > 1 {
            return None;
        }
        Some(PacketClass::new(
            self.src_ip.union(&other.src_ip),
            self.dst_ip.union(&other.dst_ip),
            self.src_port.union(&other.src_port),
            self.dst_port.union(&other.dst_port),
            self.proto.union(other.proto),
            self.app_class.union(other.app_class),
            self.spam_flag.union(other.spam_flag),
        ))
    }
}

impl fmt::Debug for PacketClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "EMPTY");
        }
        if self.is_full() {
            return write!(f, "FULL");
        }
        let mut parts = Vec::new();
        if !self.src_ip.is_full() {
            parts.push(format!("src_ip={:?}", self.src_ip));
        }
        if !self.dst_ip.is_full() {
            parts.push(format!("dst_ip={:?}", self.dst_ip));
        }
        if !self.src_port.is_full() {
            parts.push(format!("src_port={:?}", self.src_port));
        }
        if !self.dst_port.is_full() {
            parts.push(format!("dst_port={:?}", self.dst_port));
        }
        if !self.proto.is_full() {
            parts.push(format!("proto={:?}", self.proto));
        }
        if !self.app_class.is_full() {
            parts.push(format!("app={:?}", self.app_class));
        }
        if !self.spam_flag.is_full() {
            parts.push(format!("spam={:?}", self.spam_flag));
        }
        write!(f, "<{}>", parts.join(" "))
    }
}
