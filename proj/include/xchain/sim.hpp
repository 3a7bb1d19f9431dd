#pragma once

#include "comm.hpp"
#include "protocol.hpp"
#include "scenario.hpp"
#include "world.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace xchain
{
    struct RunOptions
    {
        std::optional<std::uint64_t> seed;
        std::optional<LockOrderMode> lockOrder;
        /// Schedules the scenario's interference calls at seeded random ticks.
        bool interference = false;
    };

    struct RunResult
    {
        Trace trace;
        ChainMap initial;
        World world;
        std::vector<CrossChainTransaction> txns;
        bool quiesced = false;
        bool drained = false;
        Tick ticks = 0;
        std::optional<std::string> fatal;
    };

    /// Engineering bound on ticks to quiescence for honest runs.
    inline Tick termination_bound(const Scenario &sc)
    {
        std::size_t layers = 0;
        for (const auto &t : sc.txns)
            layers = std::max(layers, layer_partition(t).layers.size());
        const std::uint64_t d = std::max<std::uint64_t>(sc.max_delay(), 1);
        std::uint64_t slowest = 1;
        for (const auto &c : sc.chains)
            slowest = std::max(slowest, c.sealEvery);
        return 4 * (layers + 2) * 2 * (d + 2) * slowest + sc.last_scheduled();
    }

    namespace detail
    {
        inline void adversary_step(World &w, const AdversaryAction &a)
        {
            Record tags;
            tags.set("adv", true);
            auto announce = [&](const char *action, const ChainId &chain) {
                Record r;
                r.set("action", action);
                r.set("caller", a.caller.text());
                r.set("target", a.target.text());
                if (a.kind == AdversaryAction::Kind::Call)
                    r.set("method", a.method);
                w.emit(EventKind::Adversary, chain, std::move(r));
            };
            switch (a.kind)
            {
            case AdversaryAction::Kind::Call:
                announce("call", a.target.chain);
                dispatch_invoke(w, a.target.chain, a.caller, std::nullopt, a.target, a.method, a.params,
                                w.recorder(tags));
                return;
            case AdversaryAction::Kind::Lock: {
                announce("lock", a.target.chain);
                const Recorder rec = w.recorder(tags);
                lock(w.chain(a.target.chain), a.caller, a.target, &rec);
                return;
            }
            case AdversaryAction::Kind::Unlock: {
                announce("unlock", a.target.chain);
                const Recorder rec = w.recorder(tags);
                unlock(w.chain(a.target.chain), a.caller, a.target, a.failure, &rec);
                return;
            }
            case AdversaryAction::Kind::Forge:
                inject_forge(w, a.bridge, *a.payload, a.dest, a.sender.value_or(adapter_address(a.bridge.src, a.bridge.dst)),
                             a.k);
                return;
            case AdversaryAction::Kind::Drop:
                inject_drop(w, a.bridge, a.msg);
                return;
            case AdversaryAction::Kind::Corrupt:
                inject_corrupt(w, a.bridge, a.msg, *a.payload);
                return;
            }
        }

        inline void scripted_step(World &w, const ScriptedCall &c)
        {
            switch (c.kind)
            {
            case ScriptedCall::Kind::Call:
                dispatch_invoke(w, c.target.chain, c.caller, std::nullopt, c.target, c.method, c.params, w.recorder());
                return;
            case ScriptedCall::Kind::Notify:
                notify(w, c.adapter, c.caller, c.data, c.target);
                return;
            case ScriptedCall::Kind::Anotify:
                anotify(w, c.adapter, c.caller, c.data, c.target);
                return;
            case ScriptedCall::Kind::Rcall:
                rcall(w, c.adapter, c.caller, c.target, c.method, c.params);
                return;
            case ScriptedCall::Kind::AddExecutor: {
                const Recorder rec = w.recorder();
                add_executor(w.chain(c.target.chain), c.caller, c.target, c.executor, &rec);
                return;
            }
            }
        }

        inline bool drained(const World &w)
        {
            for (const auto &[id, b] : w.bridges)
                if (!b.queue.empty())
                    return false;
            for (const auto &[id, s] : w.staged)
                if (!s.empty())
                    return false;
            return true;
        }

        inline bool quiesced(const World &w)
        {
            if (!drained(w) || !w.resolved.empty())
                return false;
            for (const auto &[addr, a] : w.adapters)
                if (!a.all_terminal())
                    return false;
            for (const auto &[id, p] : w.proposers)
                if (p.phase != Phase::Done)
                    return false;
            return true;
        }
    } // namespace detail

    /// Runs the scenario tick by tick: adversary injections, bridge deliveries,
    /// scripted calls and protocol steps, then block sealing.
    inline RunResult run(const Scenario &sc, const RunOptions &opts = {})
    {
        RunResult res;
        res.world = build_world(sc, opts.seed.value_or(sc.seed));
        World &w = res.world;
        res.initial = w.chains;
        res.txns = sc.txns;
        const LockOrderMode mode = opts.lockOrder.value_or(sc.lockOrder);

        std::vector<AdversaryAction> adversary = sc.adversary;
        if (opts.interference && !sc.interference.templates.empty())
        {
            const auto &tpl = sc.interference.templates;
            for (std::uint64_t i = 0; i < sc.interference.count; ++i)
            {
                AdversaryAction a = tpl[i % tpl.size()];
                a.tick = w.rng.below(sc.interference.window + 1);
                adversary.push_back(std::move(a));
            }
        }
        std::stable_sort(adversary.begin(), adversary.end(),
                         [](const AdversaryAction &a, const AdversaryAction &b) { return a.tick < b.tick; });
        std::vector<ScriptedCall> calls = sc.calls;
        std::stable_sort(calls.begin(), calls.end(),
                         [](const ScriptedCall &a, const ScriptedCall &b) { return a.tick < b.tick; });
        std::vector<CrossChainTransaction> txns = sc.txns;
        std::stable_sort(txns.begin(), txns.end(), [](const CrossChainTransaction &a, const CrossChainTransaction &b) {
            return a.start != b.start ? a.start < b.start : a.txId < b.txId;
        });

        Tick lastScheduled = 0;
        for (const auto &a : adversary)
            lastScheduled = std::max(lastScheduled, a.tick);
        lastScheduled = std::max(lastScheduled, sc.last_scheduled());

        std::size_t nextAdv = 0;
        std::size_t nextCall = 0;
        std::size_t nextTx = 0;
        Tick t = 0;
        try
        {
            for (;; ++t)
            {
                w.clock = t;
                for (; nextAdv < adversary.size() && adversary[nextAdv].tick == t; ++nextAdv)
                    detail::adversary_step(w, adversary[nextAdv]);
                for (const auto &[id, b] : w.bridges)
                    deliver_due(w, id, adapter_recv);
                for (; nextCall < calls.size() && calls[nextCall].tick == t; ++nextCall)
                    detail::scripted_step(w, calls[nextCall]);
                for (; nextTx < txns.size() && txns[nextTx].start == t; ++nextTx)
                    propose(w, txns[nextTx], mode);
                drain_resolved(w);
                for (const auto &[id, c] : w.chains)
                {
                    const auto cfg = std::find_if(sc.chains.begin(), sc.chains.end(),
                                                  [&](const ChainConfig &cc) { return cc.id == id; });
                    if ((t + 1) % cfg->sealEvery == 0)
                        seal(w, id);
                }
                const bool allFired = t >= lastScheduled;
                if (sc.stop == Scenario::Stop::Quiesce && allFired && detail::quiesced(w))
                {
                    res.quiesced = true;
                    break;
                }
                if (t + 1 >= sc.maxTicks)
                    break;
            }
        }
        catch (const FatalScenarioError &e)
        {
            res.fatal = e.what();
        }
        res.drained = detail::drained(w);
        res.quiesced = res.quiesced || (!res.fatal && detail::quiesced(w) && t >= lastScheduled);
        res.ticks = t + 1;
        Record r;
        r.set("quiesced", res.quiesced);
        r.set("drained", res.drained);
        r.set("ticks", res.ticks);
        if (res.fatal)
            r.set("fatal", escape(*res.fatal));
        w.emit(EventKind::End, std::nullopt, std::move(r));
        res.trace = std::move(w.trace);
        w.trace = Trace{};
        return res;
    }
} // namespace xchain
