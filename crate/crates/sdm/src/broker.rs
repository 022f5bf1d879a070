// SPDX-License-Identifier: Apache-2.0

//! Hierarchical multi-tenant message broker. Clients attach to brokers in a
//! tree; a published envelope climbs only as high as the lowest common
//! ancestor of the publisher and its in-scope subscribers, then fans out,
//! so co-located parties never load the upper tiers. Notifications travel
//! the unique tree path to their single target. Tenants are invisible to
//! each other.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scope {
    /// Stay on the sender's own broker.
    Node,
    /// May climb to the sender's regional broker.
    Region,
    /// May climb to the root.
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Publish,
    /// Point-to-point delivery to one registered client.
    Notify(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub tenant: String,
    pub from: String,
    pub topic: String,
    pub scope: Scope,
    pub kind: Kind,
    /// Serialized message body (JSON by convention).
    pub payload: String,
    /// Brokers traversed, filled in per delivered copy.
    pub hop_trace: Vec<String>,
}

impl Envelope {
    pub fn publish(
        tenant: impl Into<String>,
        from: impl Into<String>,
        topic: impl Into<String>,
        scope: Scope,
        payload: impl Into<String>,
    ) -> Self {
        Envelope {
            tenant: tenant.into(),
            from: from.into(),
            topic: topic.into(),
            scope,
            kind: Kind::Publish,
            payload: payload.into(),
            hop_trace: Vec::new(),
        }
    }

    pub fn notify(
        tenant: impl Into<String>,
        from: impl Into<String>,
        target: impl Into<String>,
        topic: impl Into<String>,
        payload: impl Into<String>,
    ) -> Self {
        Envelope {
            tenant: tenant.into(),
            from: from.into(),
            topic: topic.into(),
            scope: Scope::Global,
            kind: Kind::Notify(target.into()),
            payload: payload.into(),
            hop_trace: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BrokerError {
    #[error("client {0} is not registered")]
    UnknownClient(String),
    #[error("broker {0} does not exist")]
    UnknownBroker(String),
    #[error("client {0} is already registered on broker {1}")]
    AlreadyRegistered(String, String),
    #[error("envelope tenant {env} does not match sender tenant {sender}")]
    TenantMismatch { env: String, sender: String },
}

/// One delivered copy, for post-run locality audits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delivery {
    pub tenant: String,
    pub topic: String,
    pub from: String,
    pub to: String,
    pub hops: Vec<String>,
    /// Child-to-parent edges taken before descending; 0 means the message
    /// never left the shared broker.
    pub upward: usize,
}

#[derive(Clone, Debug)]
struct Registration {
    tenant: String,
    broker: String,
}

/// The broker tree plus client registrations, subscriptions, a delivery
/// audit log, and a dead-letter counter for undeliverable notifications.
#[derive(Clone, Debug)]
pub struct BrokerTree {
    root: String,
    parent: BTreeMap<String, String>,
    clients: BTreeMap<String, Registration>,
    subs: BTreeMap<(String, String), BTreeSet<String>>,
    pub log: Vec<Delivery>,
    pub dead_letters: u64,
}

impl BrokerTree {
    pub fn new(root: impl Into<String>) -> Self {
        BrokerTree {
            root: root.into(),
            parent: BTreeMap::new(),
            clients: BTreeMap::new(),
            subs: BTreeMap::new(),
            log: Vec::new(),
            dead_letters: 0,
        }
    }

    /// Convenience 3-level builder: root, one broker per region, one broker
    /// per leaf, e.g. `three_level("root", &[("r1", &["l1a", "l1b"])])`.
    pub fn three_level(root: &str, regions: &[(&str, &[&str])]) -> Self {
        let mut t = BrokerTree::new(root);
        for (region, leaves) in regions {
            t.add_broker(region, root).expect("fresh region id");
            for leaf in *leaves {
                t.add_broker(leaf, region).expect("fresh leaf id");
            }
        }
        t
    }

    pub fn add_broker(&mut self, id: &str, parent: &str) -> Result<(), BrokerError> {
        if parent != self.root && !self.parent.contains_key(parent) {
            return Err(BrokerError::UnknownBroker(parent.to_string()));
        }
        if id == self.root || self.parent.contains_key(id) {
            return Err(BrokerError::AlreadyRegistered(
                id.to_string(),
                parent.to_string(),
            ));
        }
        self.parent.insert(id.to_string(), parent.to_string());
        Ok(())
    }

    fn has_broker(&self, id: &str) -> bool {
        id == self.root || self.parent.contains_key(id)
    }

    pub fn tenant_of(&self, client: &str) -> Option<&str> {
        self.clients.get(client).map(|r| r.tenant.as_str())
    }

    pub fn broker_of(&self, client: &str) -> Option<&str> {
        self.clients.get(client).map(|r| r.broker.as_str())
    }

    /// Attaches a client to exactly one broker. Re-registering with the
    /// same coordinates is a no-op; moving a live client is an error.
    pub fn register(&mut self, client: &str, tenant: &str, broker: &str) -> Result<(), BrokerError> {
        if !self.has_broker(broker) {
            return Err(BrokerError::UnknownBroker(broker.to_string()));
        }
        if let Some(r) = self.clients.get(client) {
            if r.tenant == tenant && r.broker == broker {
                return Ok(());
            }
            return Err(BrokerError::AlreadyRegistered(
                client.to_string(),
                r.broker.clone(),
            ));
        }
        self.clients.insert(
            client.to_string(),
            Registration {
                tenant: tenant.to_string(),
                broker: broker.to_string(),
            },
        );
        Ok(())
    }

    pub fn unregister(&mut self, client: &str) {
        self.clients.remove(client);
        for set in self.subs.values_mut() {
            set.remove(client);
        }
        self.subs.retain(|_, set| !set.is_empty());
    }

    pub fn subscribe(&mut self, client: &str, topic: &str) -> Result<(), BrokerError> {
        let tenant = self
            .clients
            .get(client)
            .ok_or_else(|| BrokerError::UnknownClient(client.to_string()))?
            .tenant
            .clone();
        self.subs
            .entry((tenant, topic.to_string()))
            .or_default()
            .insert(client.to_string());
        Ok(())
    }

    pub fn unsubscribe(&mut self, client: &str, topic: &str) {
        if let Some(r) = self.clients.get(client) {
            let key = (r.tenant.clone(), topic.to_string());
            if let Some(set) = self.subs.get_mut(&key) {
                set.remove(client);
                if set.is_empty() {
                    self.subs.remove(&key);
                }
            }
        }
    }

    fn ancestry(&self, broker: &str) -> Vec<String> {
        let mut path = vec![broker.to_string()];
        let mut cur = broker;
        while let Some(p) = self.parent.get(cur) {
            path.push(p.clone());
            cur = p;
        }
        path
    }

    /// Unique tree path between two brokers plus the number of upward edges.
    fn tree_path(&self, from: &str, to: &str) -> (Vec<String>, usize) {
        let up = self.ancestry(from);
        let down = self.ancestry(to);
        let down_set: BTreeMap<&str, usize> =
            down.iter().enumerate().map(|(i, b)| (b.as_str(), i)).collect();
        let (lca_up_idx, lca_down_idx) = up
            .iter()
            .enumerate()
            .find_map(|(i, b)| down_set.get(b.as_str()).map(|&j| (i, j)))
            .expect("single-rooted tree always has an LCA");
        let mut path: Vec<String> = up[..=lca_up_idx].to_vec();
        path.extend(down[..lca_down_idx].iter().rev().cloned());
        (path, lca_up_idx)
    }

    /// True when `broker` lies in the subtree rooted at `ceiling`.
    fn within(&self, broker: &str, ceiling: &str) -> bool {
        self.ancestry(broker).iter().any(|b| b == ceiling)
    }

    /// Highest broker the envelope may climb to, per its declared scope.
    fn ceiling(&self, sender_broker: &str, scope: Scope) -> String {
        match scope {
            Scope::Node => sender_broker.to_string(),
            Scope::Region => self
                .parent
                .get(sender_broker)
                .cloned()
                .unwrap_or_else(|| sender_broker.to_string()),
            Scope::Global => self.root.clone(),
        }
    }

    /// Routes one envelope, returning every delivered copy with its hop
    /// trace filled in. Publishes reach all same-tenant subscribers inside
    /// the scope subtree; notifications reach their single target or are
    /// counted as dead letters.
    pub fn route(&mut self, env: &Envelope) -> Result<Vec<(String, Envelope)>, BrokerError> {
        let sender = self
            .clients
            .get(&env.from)
            .ok_or_else(|| BrokerError::UnknownClient(env.from.clone()))?;
        if sender.tenant != env.tenant {
            return Err(BrokerError::TenantMismatch {
                env: env.tenant.clone(),
                sender: sender.tenant.clone(),
            });
        }
        let sender_broker = sender.broker.clone();
        let mut out = Vec::new();
        match &env.kind {
            Kind::Notify(target) => {
                match self.clients.get(target) {
                    Some(t) if t.tenant == env.tenant => {
                        let (hops, upward) = self.tree_path(&sender_broker, &t.broker);
                        out.push(self.deliver(env, target.clone(), hops, upward));
                    }
                    // unknown or foreign target: drop, count, stay silent
                    _ => self.dead_letters += 1,
                }
            }
            Kind::Publish => {
                let ceiling = self.ceiling(&sender_broker, env.scope);
                let key = (env.tenant.clone(), env.topic.clone());
                let subscribers: Vec<String> = self
                    .subs
                    .get(&key)
                    .map(|s| s.iter().cloned().collect())
                    .unwrap_or_default();
                for client in subscribers {
                    let broker = self.clients[&client].broker.clone();
                    if !self.within(&broker, &ceiling) {
                        continue; // out of the declared scope
                    }
                    let (hops, upward) = self.tree_path(&sender_broker, &broker);
                    out.push(self.deliver(env, client, hops, upward));
                }
            }
        }
        Ok(out)
    }

    fn deliver(
        &mut self,
        env: &Envelope,
        to: String,
        hops: Vec<String>,
        upward: usize,
    ) -> (String, Envelope) {
        self.log.push(Delivery {
            tenant: env.tenant.clone(),
            topic: env.topic.clone(),
            from: env.from.clone(),
            to: to.clone(),
            hops: hops.clone(),
            upward,
        });
        let mut copy = env.clone();
        copy.hop_trace = hops;
        (to, copy)
    }
}
