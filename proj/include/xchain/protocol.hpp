#pragma once

#include "comm.hpp"
#include "executor.hpp"
#include "txn.hpp"
#include "world.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace xchain
{
    namespace detail
    {
        inline Record tx_tags(const ProposerState &ps)
        {
            Record r;
            r.set("tx", ps.txn.txId);
            return r;
        }

        inline std::vector<ChainId> lock_order_for(const CrossChainTransaction &txn, LockOrderMode mode)
        {
            std::vector<ChainId> chains = txn.chains();
            if (mode == LockOrderMode::Canonical)
            {
                std::sort(chains.begin(), chains.end());
                return chains;
            }
            if (txn.lockOrder.empty())
                return chains;
            std::vector<ChainId> out;
            for (const auto &c : txn.lockOrder)
                if (std::find(chains.begin(), chains.end(), c) != chains.end() &&
                    std::find(out.begin(), out.end(), c) == out.end())
                    out.push_back(c);
            return out;
        }

        void on_result(World &w, ProposerState &ps, const PendingCall &call, const Outcome &out);

        /// Local requests go straight to the proposer's executor and resolve at once;
        /// remote ones become rcall futures on the adapter facing the target chain.
        inline void request(World &w, ProposerState &ps, const PendingCall &call, const std::string &method,
                            const ValueList &params)
        {
            const ChainId &home = ps.txn.proposer;
            if (call.chain == home)
            {
                const Outcome out =
                    dispatch_invoke(w, home, ps.executor, std::nullopt, ps.executor, method, params, w.recorder(tx_tags(ps)));
                on_result(w, ps, call, out);
                return;
            }
            const Address adapter = adapter_address(home, call.chain);
            const Address target = w.chain(call.chain).executor;
            const Seq seq = rcall(w, adapter, ps.executor, target, method, params, tx_tags(ps));
            ps.pending.emplace(std::make_pair(adapter, seq), call);
            if (call.purpose == Purpose::Action)
                ++ps.outstanding;
        }

        inline void finish(World &w, ProposerState &ps)
        {
            ps.phase = Phase::Done;
            ps.status = ps.failure ? TxStatus::Aborted : TxStatus::Committed;
            w.executors.at(ps.executor).activeTx.reset();
            Record r;
            r.set("tx", ps.txn.txId);
            r.set("outcome", std::string(to_string(ps.status)));
            if (ps.status == TxStatus::Aborted)
                r.set("reason", std::string(to_string(ps.reason)));
            r.set("rounds", static_cast<std::uint64_t>(ps.roundsRun));
            r.set("originator", ps.txn.originator.text());
            w.emit(EventKind::Outcome, ps.txn.proposer, std::move(r));
        }

        inline void next_unlock(World &w, ProposerState &ps)
        {
            if (ps.unlockIdx >= ps.attempted.size())
            {
                finish(w, ps);
                return;
            }
            const ChainId chain = ps.attempted[ps.attempted.size() - 1 - ps.unlockIdx];
            ++ps.unlockIdx;
            request(w, ps, PendingCall{Purpose::Unlock, chain, 0}, "unlock_scope",
                    {static_cast<std::int64_t>(ps.txn.txId), ps.failure});
        }

        inline void begin_unlocking(World &w, ProposerState &ps, bool failure, AbortReason reason)
        {
            ps.phase = Phase::Unlocking;
            ps.failure = failure;
            ps.reason = failure ? reason : AbortReason::None;
            ps.unlockIdx = 0;
            next_unlock(w, ps);
        }

        inline void next_lock(World &w, ProposerState &ps)
        {
            const ChainId chain = ps.lockOrder[ps.lockIdx];
            ps.attempted.push_back(chain);
            ValueList params{static_cast<std::int64_t>(ps.txn.txId)};
            for (const auto &a : ps.scopes.at(chain))
                params.push_back(bytes(a.text()));
            request(w, ps, PendingCall{Purpose::Lock, chain, 0}, "lock_scope", params);
        }

        inline void start_round(World &w, ProposerState &ps);

        inline void finish_round(World &w, ProposerState &ps)
        {
            if (ps.roundFailed)
            {
                begin_unlocking(w, ps, true, AbortReason::OpFailed);
                return;
            }
            ++ps.round;
            start_round(w, ps);
        }

        inline void start_round(World &w, ProposerState &ps)
        {
            if (ps.round >= ps.plan.layers.size())
            {
                begin_unlocking(w, ps, false, AbortReason::None);
                return;
            }
            ps.phase = Phase::Executing;
            ps.roundFailed = false;
            ps.outstanding = 0;
            ++ps.roundsRun;
            // Keeps local results from closing the round before every action is issued.
            ++ps.outstanding;
            for (ActionId id : ps.plan.layers[ps.round])
            {
                const IndexedAction &a = *ps.txn.find(id);
                ValueList params{static_cast<std::int64_t>(ps.txn.txId), static_cast<std::int64_t>(a.id),
                                 bytes(a.target.text()), bytes(a.method)};
                params.insert(params.end(), a.params.begin(), a.params.end());
                request(w, ps, PendingCall{Purpose::Action, a.chain, a.id}, "run_action", params);
            }
            if (--ps.outstanding == 0)
                finish_round(w, ps);
        }

        inline void on_result(World &w, ProposerState &ps, const PendingCall &call, const Outcome &out)
        {
            switch (call.purpose)
            {
            case Purpose::Lock:
                if (!out.ok())
                {
                    begin_unlocking(w, ps, true, AbortReason::LockConflict);
                    return;
                }
                if (++ps.lockIdx < ps.lockOrder.size())
                    next_lock(w, ps);
                else
                {
                    ps.round = 0;
                    start_round(w, ps);
                }
                return;
            case Purpose::Action:
                if (!out.ok())
                    ps.roundFailed = true;
                if (call.chain != ps.txn.proposer && --ps.outstanding == 0)
                    finish_round(w, ps);
                return;
            case Purpose::Unlock:
                next_unlock(w, ps);
                return;
            }
        }
    } // namespace detail

    /// Hands a transaction to the proposer executor on txn.proposer and starts the
    /// locking phase. A busy executor rejects the proposal with ExecutorBusy.
    inline Outcome propose(World &w, const CrossChainTransaction &txn, LockOrderMode mode = LockOrderMode::Canonical)
    {
        validate(txn, w.chains);
        if (w.proposers.contains(txn.txId))
            throw ValidationError("duplicate transaction id " + std::to_string(txn.txId));
        Chain &home = w.chain(txn.proposer);
        const Address exAddr = home.executor;
        ExecutorState &ex = w.executors.at(exAddr);

        Record tags;
        tags.set("tx", txn.txId);
        const ValueList params{static_cast<std::int64_t>(txn.txId)};
        const Outcome out =
            ex.activeTx ? Outcome::fail(Failure::ExecutorBusy) : Outcome::success(static_cast<std::int64_t>(txn.txId));
        home.pending.push_back(ActionRecord{txn.originator, exAddr, "propose", params, out, 0});
        {
            Record r;
            r.set("caller", txn.originator.text());
            r.set("target", exAddr.text());
            r.set("method", "propose");
            r.set("params", to_text(params));
            put_outcome(r, out);
            r.set("depth", 0);
            w.recorder(tags).emit(EventKind::Invoke, txn.proposer, std::move(r));
        }

        ProposerState ps;
        ps.txn = txn;
        ps.executor = exAddr;
        ps.plan = layer_partition(txn);
        for (const auto &c : txn.chains())
        {
            const auto scope = scope_union(txn, c, w.chains);
            ps.scopes.emplace(c, std::vector<Address>(scope.begin(), scope.end()));
        }
        ps.lockOrder = detail::lock_order_for(txn, mode);
        auto &stored = w.proposers.emplace(txn.txId, std::move(ps)).first->second;

        if (!out.ok())
        {
            stored.phase = Phase::Done;
            stored.status = TxStatus::Aborted;
            stored.reason = AbortReason::ExecutorBusy;
            stored.failure = true;
            Record r;
            r.set("tx", txn.txId);
            r.set("outcome", std::string(to_string(stored.status)));
            r.set("reason", std::string(to_string(stored.reason)));
            r.set("rounds", std::uint64_t{0});
            r.set("originator", txn.originator.text());
            w.emit(EventKind::Outcome, txn.proposer, std::move(r));
            return out;
        }

        ex.activeTx = txn.txId;
        stored.phase = Phase::Locking;
        if (stored.lockOrder.empty())
            detail::start_round(w, stored);
        else
            detail::next_lock(w, stored);
        return out;
    }

    /// Advances whichever proposer owns the resolved future; futures no proposer
    /// waits on are ignored.
    inline void proposer_step(World &w, const FutureRef &ref)
    {
        for (auto &[id, ps] : w.proposers)
        {
            const auto it = ps.pending.find(std::make_pair(ref.adapter, ref.seq));
            if (it == ps.pending.end())
                continue;
            const PendingCall call = it->second;
            ps.pending.erase(it);
            const Future f = query(w, ref.adapter, ref.seq);
            detail::on_result(w, ps, call, f.result);
            return;
        }
    }

    inline void drain_resolved(World &w)
    {
        while (!w.resolved.empty())
        {
            const FutureRef ref = w.resolved.front();
            w.resolved.pop_front();
            proposer_step(w, ref);
        }
    }
} // namespace xchain
