#pragma once

#include "adapter.hpp"
#include "bridge.hpp"
#include "chain.hpp"
#include "rng.hpp"
#include "trace.hpp"
#include "txn.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace xchain
{
    enum class LockOrderMode : std::uint8_t
    {
        Canonical,
        Declared,
    };

    struct ExecutorState
    {
        Address addr;
        /// Transaction this executor is proposing, if any.
        std::optional<TxId> activeTx;
        /// Contracts locked on behalf of each transaction, in lock order.
        std::map<TxId, std::vector<Address>> heldLocks;
    };

    enum class Phase : std::uint8_t
    {
        Locking,
        Executing,
        Unlocking,
        Done,
    };

    enum class TxStatus : std::uint8_t
    {
        Pending,
        Committed,
        Aborted,
    };

    enum class AbortReason : std::uint8_t
    {
        None,
        LockConflict,
        OpFailed,
        ExecutorBusy,
    };

    inline std::string_view to_string(Phase p)
    {
        switch (p)
        {
        case Phase::Locking:
            return "Locking";
        case Phase::Executing:
            return "Executing";
        case Phase::Unlocking:
            return "Unlocking";
        case Phase::Done:
            return "Done";
        }
        return "?";
    }

    inline std::string_view to_string(TxStatus s)
    {
        switch (s)
        {
        case TxStatus::Pending:
            return "Pending";
        case TxStatus::Committed:
            return "Committed";
        case TxStatus::Aborted:
            return "Aborted";
        }
        return "?";
    }

    inline std::string_view to_string(AbortReason r)
    {
        switch (r)
        {
        case AbortReason::None:
            return "None";
        case AbortReason::LockConflict:
            return "LockConflict";
        case AbortReason::OpFailed:
            return "OpFailed";
        case AbortReason::ExecutorBusy:
            return "ExecutorBusy";
        }
        return "?";
    }

    enum class Purpose : std::uint8_t
    {
        Lock,
        Action,
        Unlock,
    };

    struct PendingCall
    {
        Purpose purpose = Purpose::Lock;
        ChainId chain;
        ActionId action = 0;
    };

    struct ProposerState
    {
        CrossChainTransaction txn;
        Address executor;
        LayerPlan plan;
        std::map<ChainId, std::vector<Address>> scopes;
        std::vector<ChainId> lockOrder;

        Phase phase = Phase::Locking;
        std::size_t lockIdx = 0;
        /// Chains a lock request was sent to, in order; unlocks go to these in reverse.
        std::vector<ChainId> attempted;
        std::size_t round = 0;
        std::size_t roundsRun = 0;
        std::size_t outstanding = 0;
        bool roundFailed = false;
        bool failure = false;
        std::size_t unlockIdx = 0;

        TxStatus status = TxStatus::Pending;
        AbortReason reason = AbortReason::None;
        std::map<std::pair<Address, Seq>, PendingCall> pending;
    };

    struct FutureRef
    {
        Address adapter;
        Seq seq = 0;
    };

    struct World
    {
        ChainMap chains;
        std::map<BridgeId, BridgeState> bridges;
        std::map<Address, Adapter> adapters;
        std::map<Address, ExecutorState> executors;
        /// Executors whose relayed requests participant executors accept.
        std::set<Address> registeredExecutors;
        std::map<TxId, ProposerState> proposers;

        Tick clock = 0;
        Rng rng;
        Trace trace;
        MsgId nextMsgId = 1;
        std::map<ChainId, std::vector<BridgeMessage>> staged;
        std::deque<FutureRef> resolved;

        [[nodiscard]] Recorder recorder(Record tags = {}) { return Recorder{&trace, clock, std::move(tags)}; }

        Chain &chain(const ChainId &id)
        {
            const auto it = chains.find(id);
            if (it == chains.end())
                throw ValidationError("unknown chain '" + id.name + "'");
            return it->second;
        }

        [[nodiscard]] const Chain &chain(const ChainId &id) const
        {
            const auto it = chains.find(id);
            if (it == chains.end())
                throw ValidationError("unknown chain '" + id.name + "'");
            return it->second;
        }

        /// Lowest-tag bridge from src to dst.
        [[nodiscard]] std::optional<BridgeId> bridge_between(const ChainId &src, const ChainId &dst) const
        {
            for (const auto &[id, b] : bridges)
                if (id.src == src && id.dst == dst)
                    return id;
            return std::nullopt;
        }

        void emit(EventKind kind, std::optional<ChainId> chain, Record detail)
        {
            trace.append(TraceEvent{clock, kind, std::move(chain), std::move(detail)});
        }
    };

    /// Adds a chain with its executor contract.
    inline Chain &add_chain(World &w, const ChainId &id)
    {
        if (w.chains.contains(id))
            throw ValidationError("duplicate chain '" + id.name + "'");
        Chain c;
        c.id = id;
        c.executor = Address{id, "executor"};
        Contract ex;
        ex.addr = c.executor;
        ex.kind = ContractKind::Executor;
        ex.type = "executor";
        ex.owner = c.executor;
        c.contracts.emplace(ex.addr, std::move(ex));
        w.executors.emplace(c.executor, ExecutorState{c.executor, std::nullopt, {}});
        w.registeredExecutors.insert(c.executor);
        return w.chains.emplace(id, std::move(c)).first->second;
    }

    inline Adapter &ensure_adapter(World &w, const ChainId &chain, const ChainId &peer)
    {
        const Address addr = adapter_address(chain, peer);
        auto it = w.adapters.find(addr);
        if (it != w.adapters.end())
            return it->second;
        Chain &c = w.chain(chain);
        Contract k;
        k.addr = addr;
        k.kind = ContractKind::Adapter;
        k.type = "adapter";
        k.owner = addr;
        c.contracts.emplace(addr, std::move(k));
        Adapter a;
        a.addr = addr;
        a.peer = adapter_address(peer, chain);
        return w.adapters.emplace(addr, std::move(a)).first->second;
    }

    /// Adds a unidirectional bridge and wires the adapter endpoints on both sides.
    inline BridgeState &add_bridge(World &w, const BridgeId &id, const BridgePolicy &policy)
    {
        if (id.src == id.dst)
            throw ValidationError("bridge " + id.text() + " loops back to its source");
        w.chain(id.src);
        w.chain(id.dst);
        if (w.bridges.contains(id))
            throw ValidationError("duplicate bridge " + id.text());
        auto &b = w.bridges.emplace(id, BridgeState{id, policy, {}, 0, 0}).first->second;
        Adapter &out = ensure_adapter(w, id.src, id.dst);
        if (!out.outBridge || id < *out.outBridge)
            out.outBridge = id;
        Adapter &in = ensure_adapter(w, id.dst, id.src);
        if (!in.inBridge || id < *in.inBridge)
            in.inBridge = id;
        return b;
    }

    /// Records a send on the source chain; the message becomes bridge-visible when
    /// that chain's current block seals.
    inline MsgId send(World &w, const BridgeId &bridge, const Address &sender, const Payload &payload,
                      const Address &dest, const Record &tags = {})
    {
        if (!w.bridges.contains(bridge))
            throw ValidationError("unknown bridge " + bridge.text());
        if (sender.chain != bridge.src)
            throw DestChainMismatch("sender " + sender.text() + " is not on " + bridge.src.name);
        if (dest.chain != bridge.dst)
            throw DestChainMismatch("destination " + dest.text() + " is not on " + bridge.dst.name);
        const MsgId id = w.nextMsgId++;
        const std::string text = encode_payload(payload);
        Chain &src = w.chain(bridge.src);
        src.pending.push_back(ActionRecord{sender, dest, "send", {bytes(text)}, Outcome::success(Value{std::int64_t(id)}), 0});
        Record r;
        r.set("msg", id);
        r.set("bridge", bridge.text());
        r.set("sender", sender.text());
        r.set("dest", dest.text());
        r.set("payload", text);
        for (const auto &[k, v] : tags.fields())
            r.set(k, v);
        w.emit(EventKind::Send, bridge.src, std::move(r));
        w.staged[bridge.src].push_back(BridgeMessage{id, bridge, sender, dest, payload, 0});
        return id;
    }

    inline std::string hex64(std::uint64_t v)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 15; i >= 0; --i)
        {
            out[static_cast<std::size_t>(i)] = digits[v & 0xF];
            v >>= 4;
        }
        return out;
    }

    /// Seals the chain's pending block and hands its sends to their bridges with k
    /// bound to the new block index.
    inline const Block &seal(World &w, const ChainId &id)
    {
        Chain &c = w.chain(id);
        const Block &b = seal_block(c);
        std::string sends;
        auto &staged = w.staged[id];
        for (auto &m : staged)
        {
            m.originBlock = b.index;
            if (!sends.empty())
                sends.push_back(',');
            sends += std::to_string(m.msgId);
            w.bridges.at(m.bridge).enqueue(std::move(m), w.clock, w.rng);
        }
        staged.clear();
        Record r;
        r.set("block", b.index);
        r.set("hash", hex64(b.hash));
        r.set("actions", static_cast<std::uint64_t>(b.actions.size()));
        r.set("sends", sends.empty() ? std::string("-") : sends);
        w.emit(EventKind::Seal, id, std::move(r));
        return b;
    }

    using DeliveryHandler = std::function<void(World &, const BridgeMessage &)>;

    /// Delivers every due message on the bridge, emitting one Recv per delivery.
    inline std::vector<MsgId> deliver_due(World &w, const BridgeId &bridge, const DeliveryHandler &handler)
    {
        auto due = w.bridges.at(bridge).take_due(w.clock, w.rng);
        std::vector<MsgId> ids;
        for (const auto &m : due)
        {
            ids.push_back(m.msgId);
            const std::string text = encode_payload(m.payload);
            Chain &dst = w.chain(bridge.dst);
            dst.pending.push_back(ActionRecord{m.sender, m.dest, "recv", {bytes(text)}, Outcome::success(), 0});
            Record r;
            r.set("msg", m.msgId);
            r.set("bridge", bridge.text());
            r.set("k", m.originBlock);
            r.set("sender", m.sender.text());
            r.set("dest", m.dest.text());
            r.set("payload", text);
            w.emit(EventKind::Recv, bridge.dst, std::move(r));
            if (handler)
                handler(w, m);
        }
        return ids;
    }

    namespace detail
    {
        inline BridgeState &adversarial_bridge(World &w, const BridgeId &bridge)
        {
            const auto it = w.bridges.find(bridge);
            if (it == w.bridges.end())
                throw ValidationError("unknown bridge " + bridge.text());
            if (it->second.policy.mode != BridgePolicy::Mode::Adversarial)
                throw NotAdversarialBridge("bridge " + bridge.text() + " is honest");
            return it->second;
        }
    } // namespace detail

    /// Enqueues a message that has no matching send record.
    inline MsgId inject_forge(World &w, const BridgeId &bridge, const Payload &payload, const Address &dest,
                              const Address &claimedSender, std::uint64_t fakeK)
    {
        BridgeState &b = detail::adversarial_bridge(w, bridge);
        const MsgId id = w.nextMsgId++;
        Record r;
        r.set("action", "forge");
        r.set("bridge", bridge.text());
        r.set("msg", id);
        r.set("dest", dest.text());
        r.set("payload", encode_payload(payload));
        r.set("k", fakeK);
        w.emit(EventKind::Adversary, bridge.dst, std::move(r));
        b.enqueue(BridgeMessage{id, bridge, claimedSender, dest, payload, fakeK}, w.clock, w.rng);
        return id;
    }

    inline bool inject_drop(World &w, const BridgeId &bridge, MsgId msg)
    {
        BridgeState &b = detail::adversarial_bridge(w, bridge);
        const bool hit = b.drop(msg);
        Record r;
        r.set("action", "drop");
        r.set("bridge", bridge.text());
        r.set("msg", msg);
        r.set("ok", hit);
        w.emit(EventKind::Adversary, bridge.src, std::move(r));
        return hit;
    }

    inline bool inject_corrupt(World &w, const BridgeId &bridge, MsgId msg, const Payload &payload)
    {
        BridgeState &b = detail::adversarial_bridge(w, bridge);
        InFlight *f = b.find(msg);
        if (f)
            f->msg.payload = payload;
        Record r;
        r.set("action", "corrupt");
        r.set("bridge", bridge.text());
        r.set("msg", msg);
        r.set("payload", encode_payload(payload));
        r.set("ok", f != nullptr);
        w.emit(EventKind::Adversary, bridge.src, std::move(r));
        return f != nullptr;
    }
} // namespace xchain
