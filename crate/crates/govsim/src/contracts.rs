//! Contract registry and the proxy upgrade pattern.
//!
//! Implementations are immutable, pure operation tables with no owned
//! storage. A proxy owns a key-value store and a mutable implementation
//! pointer; delegate-calls run the implementation's logic against the
//! proxy's storage with the original sender visible, mirroring the
//! delegatecall environment rules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::World;
use crate::event::Event;
use crate::types::*;

/// One operation in an implementation's table. The catalog is deliberately
/// tiny: enough to observe storage-context and sender semantics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BehaviorOp {
    /// Return `storage[key]` (empty string if unset).
    Get { key: String },
    /// Return `storage[key] + offset`, parsing the value as an integer.
    GetOffset { key: String, offset: i128 },
    /// `storage[key] = args[0]`.
    Set { key: String },
    /// `storage[key] += args[0]` (integer).
    Add { key: String },
    /// Record the calling transaction's sender into `storage[key]`.
    RecordSender { key: String },
    /// Always revert; lets upgrades introduce broken behavior on purpose.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Implementation {
    pub name: String,
    pub version: u32,
    pub ops: BTreeMap<String, BehaviorOp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proxy {
    pub admin: AccountId,
    pub implementation: ContractId,
    /// Persists across implementation changes.
    pub storage: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub implementations: BTreeMap<ContractId, Implementation>,
    pub proxies: BTreeMap<ContractId, Proxy>,
}

impl Registry {
    pub fn id_taken(&self, id: &ContractId) -> bool {
        self.implementations.contains_key(id) || self.proxies.contains_key(id)
    }
}

/// Evaluate one behavior op against a storage map without mutating it.
/// Returns the call result plus the writes to perform. This is the oracle
/// side of the behavior-substitution check as well as the implementation's
/// own evaluator.
pub fn eval_behavior(
    op: &BehaviorOp,
    storage: &BTreeMap<String, String>,
    sender: &AccountId,
    args: &[String],
) -> SimResult<(Option<String>, Vec<(String, String)>)> {
    let parse = |s: &str| -> SimResult<i128> {
        s.parse().map_err(|_| SimError::revert("non-integer storage value"))
    };
    match op {
        BehaviorOp::Get { key } => {
            Ok((Some(storage.get(key).cloned().unwrap_or_default()), vec![]))
        }
        BehaviorOp::GetOffset { key, offset } => {
            let base = parse(storage.get(key).map(String::as_str).unwrap_or("0"))?;
            Ok((Some((base + offset).to_string()), vec![]))
        }
        BehaviorOp::Set { key } => {
            let value = args.first().ok_or_else(|| SimError::revert("missing argument"))?;
            Ok((None, vec![(key.clone(), value.clone())]))
        }
        BehaviorOp::Add { key } => {
            let delta = parse(args.first().ok_or_else(|| SimError::revert("missing argument"))?)?;
            let base = parse(storage.get(key).map(String::as_str).unwrap_or("0"))?;
            Ok((None, vec![(key.clone(), (base + delta).to_string())]))
        }
        BehaviorOp::RecordSender { key } => Ok((None, vec![(key.clone(), sender.0.clone())])),
        BehaviorOp::Fail => Err(SimError::revert("behavior failed")),
    }
}

impl World {
    /// Register an immutable implementation under `id`. Re-registering an
    /// existing id fails: deployed code cannot be modified.
    pub fn register_implementation(
        &mut self,
        id: &ContractId,
        implementation: Implementation,
    ) -> SimResult<ContractId> {
        if self.state.registry.id_taken(id) {
            return Err(SimError::revert("contract id already registered"));
        }
        self.commit(Event::ImplementationRegistered { id: id.clone(), implementation });
        Ok(id.clone())
    }

    pub fn create_proxy(
        &mut self,
        id: &ContractId,
        admin: &AccountId,
        implementation: &ContractId,
    ) -> SimResult<ContractId> {
        if self.state.registry.id_taken(id) {
            return Err(SimError::revert("contract id already registered"));
        }
        if !self.state.registry.implementations.contains_key(implementation) {
            return Err(SimError::Unknown { kind: "contract", name: implementation.0.clone() });
        }
        self.commit(Event::ProxyCreated {
            id: id.clone(),
            admin: admin.clone(),
            implementation: implementation.clone(),
        });
        Ok(id.clone())
    }

    /// Run `operation` of the proxy's current implementation against the
    /// proxy's storage. `sender` is the original transaction sender, not
    /// rebound to the proxy.
    pub fn delegate_call(
        &mut self,
        sender: &AccountId,
        proxy: &ContractId,
        operation: &str,
        args: &[String],
    ) -> SimResult<Option<String>> {
        let p = self.state.registry.proxies.get(proxy).ok_or(SimError::Unknown {
            kind: "contract",
            name: proxy.0.clone(),
        })?;
        let imp = self
            .state
            .registry
            .implementations
            .get(&p.implementation)
            .expect("proxy points at a registered implementation");
        let op = imp.ops.get(operation).ok_or_else(|| SimError::revert("no such function"))?;
        let (result, writes) = eval_behavior(op, &p.storage, sender, args)?;
        for (key, value) in writes {
            self.commit(Event::ProxyStorageWritten { proxy: proxy.clone(), key, value });
        }
        Ok(result)
    }

    /// Repoint the proxy; allowed only for the proxy's admin (which may
    /// itself be a governor contract executing a passed proposal).
    pub fn set_implementation(
        &mut self,
        caller: &AccountId,
        proxy: &ContractId,
        new_impl: &ContractId,
    ) -> SimResult<()> {
        if !self.state.registry.implementations.contains_key(new_impl) {
            return Err(SimError::Unknown { kind: "contract", name: new_impl.0.clone() });
        }
        let p = self.state.registry.proxies.get(proxy).ok_or(SimError::Unknown {
            kind: "contract",
            name: proxy.0.clone(),
        })?;
        if p.admin != *caller {
            return Err(SimError::revert("not admin"));
        }
        let old = p.implementation.clone();
        self.commit(Event::ImplementationSet {
            proxy: proxy.clone(),
            old,
            new: new_impl.clone(),
        });
        Ok(())
    }

    pub fn set_admin(
        &mut self,
        caller: &AccountId,
        proxy: &ContractId,
        new_admin: &AccountId,
    ) -> SimResult<()> {
        let p = self.state.registry.proxies.get(proxy).ok_or(SimError::Unknown {
            kind: "contract",
            name: proxy.0.clone(),
        })?;
        if p.admin != *caller {
            return Err(SimError::revert("not admin"));
        }
        let old = p.admin.clone();
        self.commit(Event::AdminSet { proxy: proxy.clone(), old, new: new_admin.clone() });
        Ok(())
    }

    /// Write proxy storage directly from the harness (genesis setup only).
    pub fn seed_proxy_storage(&mut self, proxy: &ContractId, key: &str, value: &str) -> SimResult<()> {
        if !self.state.registry.proxies.contains_key(proxy) {
            return Err(SimError::Unknown { kind: "contract", name: proxy.0.clone() });
        }
        self.commit(Event::ProxyStorageWritten {
            proxy: proxy.clone(),
            key: key.to_owned(),
            value: value.to_owned(),
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{GasGenerator, GasSeries, SimState};

    fn counter_impl(version: u32) -> Implementation {
        Implementation {
            name: "counter".into(),
            version,
            ops: BTreeMap::from([
                ("get".into(), BehaviorOp::Get { key: "count".into() }),
                ("add".into(), BehaviorOp::Add { key: "count".into() }),
                ("who".into(), BehaviorOp::RecordSender { key: "last".into() }),
            ]),
        }
    }

    fn world_with_proxy() -> World {
        let state = SimState::new(GasSeries::new(GasGenerator::Constant { price: 1 }).unwrap());
        let mut w = World::new(state);
        w.register_implementation(&"counter-v1".into(), counter_impl(1)).unwrap();
        w.create_proxy(&"app".into(), &"admin".into(), &"counter-v1".into()).unwrap();
        w
    }

    #[test]
    fn implementations_are_immutable() {
        let mut w = world_with_proxy();
        let err = w.register_implementation(&"counter-v1".into(), counter_impl(2)).unwrap_err();
        assert!(err.is_revert());
        // proxy ids share the namespace
        assert!(w.register_implementation(&"app".into(), counter_impl(2)).unwrap_err().is_revert());
        assert!(w.create_proxy(&"app".into(), &"admin".into(), &"counter-v1".into()).unwrap_err().is_revert());
    }

    #[test]
    fn delegate_call_runs_against_proxy_storage_with_original_sender() {
        let mut w = world_with_proxy();
        w.delegate_call(&"alice".into(), &"app".into(), "add", &["5".into()]).unwrap();
        w.delegate_call(&"alice".into(), &"app".into(), "who", &[]).unwrap();
        let result = w.delegate_call(&"bob".into(), &"app".into(), "get", &[]).unwrap();
        assert_eq!(result.as_deref(), Some("5"));
        let proxy = &w.state.registry.proxies[&ContractId::new("app")];
        assert_eq!(proxy.storage["last"], "alice");
    }

    #[test]
    fn missing_operation_reverts() {
        let mut w = world_with_proxy();
        let err = w.delegate_call(&"alice".into(), &"app".into(), "nope", &[]).unwrap_err();
        assert_eq!(err, SimError::Revert("no such function".into()));
    }

    #[test]
    fn upgrade_preserves_storage_and_swaps_behavior() {
        let mut w = world_with_proxy();
        w.delegate_call(&"alice".into(), &"app".into(), "add", &["41".into()]).unwrap();
        // v2 reads the same slot with an offset
        let mut v2 = counter_impl(2);
        v2.ops.insert("get".into(), BehaviorOp::GetOffset { key: "count".into(), offset: 1 });
        w.register_implementation(&"counter-v2".into(), v2).unwrap();
        w.set_implementation(&"admin".into(), &"app".into(), &"counter-v2".into()).unwrap();
        let result = w.delegate_call(&"bob".into(), &"app".into(), "get", &[]).unwrap();
        assert_eq!(result.as_deref(), Some("42")); // old storage, new behavior
    }

    #[test]
    fn admin_gate_on_upgrade_and_admin_change() {
        let mut w = world_with_proxy();
        assert_eq!(
            w.set_implementation(&"mallory".into(), &"app".into(), &"counter-v1".into()).unwrap_err(),
            SimError::Revert("not admin".into())
        );
        assert_eq!(
            w.set_admin(&"mallory".into(), &"app".into(), &"mallory".into()).unwrap_err(),
            SimError::Revert("not admin".into())
        );
        w.set_admin(&"admin".into(), &"app".into(), &"admin2".into()).unwrap();
        // old admin is locked out after the handover
        assert!(w.set_admin(&"admin".into(), &"app".into(), &"admin".into()).is_err());
        w.set_implementation(&"admin2".into(), &"app".into(), &"counter-v1".into()).unwrap();
    }

    #[test]
    fn unknown_implementation_rejected() {
        let mut w = world_with_proxy();
        assert!(matches!(
            w.set_implementation(&"admin".into(), &"app".into(), &"ghost".into()),
            Err(SimError::Unknown { .. })
        ));
        assert!(matches!(
            w.create_proxy(&"other".into(), &"admin".into(), &"ghost".into()),
            Err(SimError::Unknown { .. })
        ));
    }

    #[test]
    fn eval_behavior_is_a_pure_oracle_for_delegate_call() {
        let mut w = world_with_proxy();
        for (op_name, args) in [("add", vec!["7".to_string()]), ("who", vec![]), ("get", vec![])] {
            let proxy = w.state.registry.proxies[&ContractId::new("app")].clone();
            let imp = w.state.registry.implementations[&proxy.implementation].clone();
            let expected = eval_behavior(&imp.ops[op_name], &proxy.storage, &"alice".into(), &args);
            let actual = w.delegate_call(&"alice".into(), &"app".into(), op_name, &args);
            match (expected, actual) {
                (Ok((value, writes)), Ok(got)) => {
                    assert_eq!(got, value);
                    let after = &w.state.registry.proxies[&ContractId::new("app")].storage;
                    for (k, v) in writes {
                        assert_eq!(after.get(&k), Some(&v));
                    }
                }
                (Err(e1), Err(e2)) => assert_eq!(e1, e2),
                other => panic!("oracle mismatch: {other:?}"),
            }
        }
    }

    #[test]
    fn fail_op_and_bad_integer_revert() {
        let storage = BTreeMap::from([("count".into(), "abc".into())]);
        assert!(eval_behavior(&BehaviorOp::Fail, &storage, &"a".into(), &[]).unwrap_err().is_revert());
        assert!(eval_behavior(
            &BehaviorOp::Add { key: "count".into() },
            &storage,
            &"a".into(),
            &["1".into()]
        )
        .unwrap_err()
        .is_revert());
    }
}
