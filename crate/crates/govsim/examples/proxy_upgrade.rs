//! The upgradeable proxy pattern: immutable implementations, a proxy
//! holding storage plus a mutable implementation pointer, delegate-calls
//! running foreign logic against the proxy's own storage, and an
//! admin-gated upgrade that swaps behavior without touching state.
//!
//! Run with: cargo run --example proxy_upgrade

use std::collections::BTreeMap;

use govsim::chain::{GasGenerator, GasSeries, SimState, World};
use govsim::contracts::{BehaviorOp, Implementation};
use govsim::types::*;

fn main() -> SimResult<()> {
    let state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 30 })?);
    let mut world = World::new(state);

    // v1: a counter that increments by the given amount.
    world.register_implementation(
        &"counter-v1".into(),
        Implementation {
            name: "counter".into(),
            version: 1,
            ops: BTreeMap::from([
                ("bump".to_string(), BehaviorOp::Add { key: "count".into() }),
                ("read".to_string(), BehaviorOp::Get { key: "count".into() }),
                ("whoami".to_string(), BehaviorOp::RecordSender { key: "last-caller".into() }),
            ]),
        },
    )?;
    // v2: same interface, but reads report an off-by-1000 "migrated" view.
    world.register_implementation(
        &"counter-v2".into(),
        Implementation {
            name: "counter".into(),
            version: 2,
            ops: BTreeMap::from([
                ("bump".to_string(), BehaviorOp::Add { key: "count".into() }),
                ("read".to_string(), BehaviorOp::GetOffset { key: "count".into(), offset: 1000 }),
            ]),
        },
    )?;

    let proxy = ContractId::new("counter");
    world.create_proxy(&proxy, &"admin".into(), &"counter-v1".into())?;

    world.delegate_call(&"user-1".into(), &proxy, "bump", &["7".into()])?;
    world.delegate_call(&"user-2".into(), &proxy, "bump", &["5".into()])?;
    world.delegate_call(&"user-2".into(), &proxy, "whoami", &[])?;
    println!("v1 read: {:?}", world.delegate_call(&"user-1".into(), &proxy, "read", &[])?);
    println!("proxy storage: {:?}", world.state.registry.proxies[&proxy].storage);

    // Only the admin may upgrade.
    let err = world.set_implementation(&"user-1".into(), &proxy, &"counter-v2".into());
    println!("non-admin upgrade: {err:?}");

    world.set_implementation(&"admin".into(), &proxy, &"counter-v2".into())?;
    // Storage survived the upgrade; only the logic changed.
    println!("v2 read: {:?}", world.delegate_call(&"user-1".into(), &proxy, "read", &[])?);
    println!("storage after upgrade: {:?}", world.state.registry.proxies[&proxy].storage);
    Ok(())
}
