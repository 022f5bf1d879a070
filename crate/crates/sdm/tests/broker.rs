// SPDX-License-Identifier: Apache-2.0

//! Routing behavior of the hierarchical broker: locality, scope ceilings,
//! LCA paths, tenant walls, notifications, and dead letters.

use sdm::{BrokerError, BrokerTree, Envelope, Scope};

/// root over two regions; region-a has two leaves, region-b one.
fn tree() -> BrokerTree {
    let mut t = BrokerTree::three_level(
        "root",
        &[
            ("region-a", &["leaf-a1", "leaf-a2"][..]),
            ("region-b", &["leaf-b1"][..]),
        ],
    );
    t.register("mon", "ops", "leaf-a1").unwrap();
    t.register("agg", "ops", "leaf-a1").unwrap();
    t.register("ctl", "ops", "leaf-a2").unwrap();
    t.register("orchestrator", "ops", "root").unwrap();
    t.register("edge", "cpe", "leaf-b1").unwrap();
    t
}

#[test]
fn co_located_publish_never_leaves_the_leaf() {
    let mut t = tree();
    t.subscribe("agg", "mf.rate.fw1").unwrap();
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Node, "{}"))
        .unwrap();
    assert_eq!(out.len(), 1);
    let (to, env) = &out[0];
    assert_eq!(to, "agg");
    assert_eq!(env.hop_trace, ["leaf-a1"]);
    assert_eq!(t.log[0].upward, 0);
}

#[test]
fn node_scope_is_a_hard_ceiling() {
    let mut t = tree();
    t.subscribe("ctl", "mf.rate.fw1").unwrap(); // other leaf, same region
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Node, "{}"))
        .unwrap();
    assert!(out.is_empty(), "node scope must not reach a sibling leaf");

    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Region, "{}"))
        .unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].1.hop_trace, ["leaf-a1", "region-a", "leaf-a2"]);
    assert!(!out[0].1.hop_trace.iter().any(|b| b == "root"));
}

#[test]
fn cross_region_publish_passes_the_common_ancestor_once() {
    let mut t = tree();
    t.register("remote", "ops", "leaf-b1").unwrap();
    t.subscribe("remote", "alarm.ops.1").unwrap();
    let out = t
        .route(&Envelope::publish("ops", "mon", "alarm.ops.1", Scope::Global, "{}"))
        .unwrap();
    assert_eq!(out.len(), 1);
    let hops = &out[0].1.hop_trace;
    assert_eq!(hops, &["leaf-a1", "region-a", "root", "region-b", "leaf-b1"]);
    assert_eq!(hops.iter().filter(|b| *b == "root").count(), 1);
    assert_eq!(t.log[0].upward, 2);
}

#[test]
fn tenants_are_walled_off() {
    let mut t = tree();
    t.subscribe("edge", "mf.rate.fw1").unwrap(); // tenant "cpe"
    t.subscribe("agg", "mf.rate.fw1").unwrap(); // tenant "ops"
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Global, "{}"))
        .unwrap();
    assert_eq!(out.len(), 1, "only the same-tenant subscriber may receive");
    assert_eq!(out[0].0, "agg");
    assert!(t.log.iter().all(|d| d.tenant == "ops"));

    // notification across the wall disappears into the dead-letter count
    let out = t
        .route(&Envelope::notify("ops", "mon", "edge", "alarm.ops.2", "{}"))
        .unwrap();
    assert!(out.is_empty());
    assert_eq!(t.dead_letters, 1);
}

#[test]
fn notify_follows_the_unique_tree_path() {
    let mut t = tree();
    let out = t
        .route(&Envelope::notify("ops", "ctl", "orchestrator", "scale", "{\"to\":3}"))
        .unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0, "orchestrator");
    assert_eq!(out[0].1.hop_trace, ["leaf-a2", "region-a", "root"]);
    assert_eq!(t.log[0].upward, 2);
}

#[test]
fn unknown_notify_target_is_counted_not_delivered() {
    let mut t = tree();
    let out = t
        .route(&Envelope::notify("ops", "ctl", "ghost", "scale", "{}"))
        .unwrap();
    assert!(out.is_empty());
    assert_eq!(t.dead_letters, 1);
    assert!(t.log.is_empty());
}

#[test]
fn senders_must_be_registered_and_honest_about_tenancy() {
    let mut t = tree();
    assert_eq!(
        t.route(&Envelope::publish("ops", "nobody", "x", Scope::Node, "{}")),
        Err(BrokerError::UnknownClient("nobody".into()))
    );
    assert!(matches!(
        t.route(&Envelope::publish("cpe", "mon", "x", Scope::Node, "{}")),
        Err(BrokerError::TenantMismatch { .. })
    ));
}

#[test]
fn every_matching_subscriber_gets_exactly_one_copy() {
    let mut t = tree();
    for c in ["mon", "agg", "ctl"] {
        t.subscribe(c, "mf.rate.fw1").unwrap();
    }
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Global, "{}"))
        .unwrap();
    let mut to: Vec<&str> = out.iter().map(|(c, _)| c.as_str()).collect();
    to.sort_unstable();
    assert_eq!(to, ["agg", "ctl", "mon"], "publisher subscribed too");
}

#[test]
fn registration_is_idempotent_but_not_movable() {
    let mut t = tree();
    assert_eq!(t.register("mon", "ops", "leaf-a1"), Ok(()));
    assert!(matches!(
        t.register("mon", "ops", "leaf-a2"),
        Err(BrokerError::AlreadyRegistered(..))
    ));
    assert!(matches!(
        t.register("new", "ops", "leaf-zz"),
        Err(BrokerError::UnknownBroker(..))
    ));
}

#[test]
fn unregistering_retires_subscriptions() {
    let mut t = tree();
    t.subscribe("agg", "mf.rate.fw1").unwrap();
    t.unregister("agg");
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Global, "{}"))
        .unwrap();
    assert!(out.is_empty());
    // and the id can re-register elsewhere afterwards
    assert_eq!(t.register("agg", "ops", "leaf-b1"), Ok(()));
}

#[test]
fn unsubscribe_stops_delivery_without_unregistering() {
    let mut t = tree();
    t.subscribe("agg", "mf.rate.fw1").unwrap();
    t.unsubscribe("agg", "mf.rate.fw1");
    let out = t
        .route(&Envelope::publish("ops", "mon", "mf.rate.fw1", Scope::Node, "{}"))
        .unwrap();
    assert!(out.is_empty());
    assert_eq!(t.register("agg", "ops", "leaf-a1"), Ok(()), "still registered");
}
