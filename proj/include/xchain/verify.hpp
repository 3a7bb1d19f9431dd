#pragma once

#include "bridge.hpp"
#include "chain.hpp"
#include "executor.hpp"
#include "trace.hpp"
#include "txn.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace xchain
{
    struct BudgetExceeded : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct Violation
    {
        std::string property;
        std::vector<std::size_t> events;
        std::string explanation;
    };

    struct Verdict
    {
        std::string checker;
        bool pass = true;
        std::vector<Violation> violations;
        /// Serial order found by the serializability search.
        std::vector<std::string> witness;

        void add(std::string property, std::vector<std::size_t> events, std::string why)
        {
            pass = false;
            violations.push_back(Violation{std::move(property), std::move(events), std::move(why)});
        }

        [[nodiscard]] bool has(std::string_view property) const
        {
            return std::any_of(violations.begin(), violations.end(),
                               [&](const Violation &v) { return v.property == property; });
        }

        /// Same line-oriented key=value shape as the trace.
        [[nodiscard]] std::string to_lines() const
        {
            std::string out = "verdict checker=" + checker + " pass=" + (pass ? "1" : "0") +
                              " violations=" + std::to_string(violations.size());
            if (!witness.empty())
            {
                out += " witness=";
                for (std::size_t i = 0; i < witness.size(); ++i)
                    out += (i ? "," : "") + witness[i];
            }
            out.push_back('\n');
            for (const auto &v : violations)
            {
                out += "violation checker=" + checker + " property=" + v.property + " events=";
                if (v.events.empty())
                    out += "-";
                for (std::size_t i = 0; i < v.events.size(); ++i)
                    out += (i ? "," : "") + std::to_string(v.events[i]);
                out += " why=" + escape(v.explanation) + "\n";
            }
            return out;
        }
    };

    inline std::optional<TxId> tx_of(const TraceEvent &e) { return e.detail.opt_u64("tx"); }

    /// Events that change contract state: successful top-level invocations of
    /// regular contracts (including add_executor) and successful lock/unlock.
    inline bool is_mutating(const TraceEvent &e, const ChainMap &world)
    {
        if (e.kind == EventKind::Lock || e.kind == EventKind::Unlock)
            return e.detail.flag("ok");
        if (e.kind != EventKind::Invoke || !e.detail.flag("ok") || e.detail.get_or("depth", "0") != "0")
            return false;
        const Address target = parse_address(e.detail.at("target"));
        const auto cit = world.find(target.chain);
        if (cit == world.end())
            return false;
        const Contract *c = cit->second.find(target);
        return c && c->kind == ContractKind::Regular;
    }

    /// Re-executes recorded mutating events on a private copy of the chains and
    /// reports whether each one reproduces its recorded outcome.
    class Replayer
    {
    public:
        explicit Replayer(ChainMap chains) : chains_(std::move(chains))
        {
            for (auto &[id, c] : chains_)
            {
                c.ledger.clear();
                c.pending.clear();
            }
        }

        bool apply(const TraceEvent &e, std::string *why = nullptr)
        {
            const Address caller = parse_address(e.detail.at("caller"));
            const Address target = parse_address(e.detail.at("target"));
            const auto cit = chains_.find(target.chain);
            if (cit == chains_.end())
                return fail(why, "unknown chain " + target.chain.name);
            Chain &chain = cit->second;
            Outcome out;
            if (e.kind == EventKind::Lock)
                out = lock(chain, caller, target);
            else if (e.kind == EventKind::Unlock)
                out = unlock(chain, caller, target, e.detail.flag("failure"));
            else
            {
                const std::string &method = e.detail.at("method");
                const ValueList params = parse_value_list(e.detail.at("params"));
                const Contract *c = chain.find(target);
                if (method == "add_executor" && c && !c->methods.contains(method))
                {
                    const auto *b = params.size() == 1 ? as_bytes(params[0]) : nullptr;
                    if (!b)
                        return fail(why, "malformed add_executor");
                    out = add_executor(chain, caller, target, parse_address(b->data));
                }
                else
                    out = invoke(chain, caller, target, method, params);
            }
            chain.pending.clear();
            const Outcome recorded = get_outcome(e.detail);
            if (e.kind != EventKind::Invoke)
            {
                if (out.ok() != recorded.ok() || out.failure != recorded.failure)
                    return fail(why, "lock outcome differs on replay");
                return true;
            }
            if (out != recorded)
                return fail(why, "replayed " + target.text() + "." + e.detail.at("method") + " gave " +
                                     (out.ok() ? to_text(out.result) : std::string(to_string(*out.failure))) +
                                     ", trace recorded " + e.detail.get_or("result", e.detail.get_or("fail", "?")));
            return true;
        }

        [[nodiscard]] const ChainMap &chains() const noexcept { return chains_; }

        [[nodiscard]] std::string state_key() const
        {
            std::string key;
            for (const auto &[id, c] : chains_)
                for (const auto &[addr, k] : c.contracts)
                {
                    if (k.kind != ContractKind::Regular)
                        continue;
                    key += addr.text() + "=" + k.s.text();
                    if (k.locked)
                        key += "#" + k.lockedBy->text();
                    key.push_back(';');
                }
            return key;
        }

    private:
        static bool fail(std::string *why, std::string msg)
        {
            if (why)
                *why = std::move(msg);
            return false;
        }

        ChainMap chains_;
    };

    namespace detail
    {
        inline std::vector<std::uint64_t> id_list(const std::string &s)
        {
            std::vector<std::uint64_t> out;
            if (s.empty() || s == "-")
                return out;
            std::size_t start = 0;
            while (true)
            {
                const auto comma = s.find(',', start);
                out.push_back(std::stoull(s.substr(start, comma == std::string::npos ? s.npos : comma - start)));
                if (comma == std::string::npos)
                    break;
                start = comma + 1;
            }
            return out;
        }

        inline const TraceEvent *end_event(const Trace &trace)
        {
            for (auto it = trace.events().rbegin(); it != trace.events().rend(); ++it)
                if (it->kind == EventKind::End)
                    return &*it;
            return nullptr;
        }
    } // namespace detail

    /// Safety: each delivery matches a send with identical payload recorded in
    /// block k of the source chain, delivered at most once. Liveness (only when
    /// the run drained its bridges): each send is delivered.
    inline Verdict check_secure_transfer(const Trace &trace)
    {
        Verdict v;
        v.checker = "secure-transfer";
        struct SendInfo
        {
            std::size_t idx;
            ChainId chain;
            std::string bridge;
            std::string dest;
            std::string payload;
        };
        std::map<MsgId, SendInfo> sends;
        std::map<std::pair<ChainId, std::uint64_t>, std::set<MsgId>> sealed;
        std::map<MsgId, std::size_t> delivered;

        const auto &ev = trace.events();
        for (std::size_t i = 0; i < ev.size(); ++i)
        {
            const auto &e = ev[i];
            if (e.kind == EventKind::Send && e.chain)
                sends.emplace(e.detail.u64("msg"), SendInfo{i, *e.chain, e.detail.at("bridge"), e.detail.at("dest"),
                                                            e.detail.at("payload")});
            else if (e.kind == EventKind::Seal && e.chain)
            {
                auto &set = sealed[{*e.chain, e.detail.u64("block")}];
                for (auto id : detail::id_list(e.detail.get_or("sends", "-")))
                    set.insert(id);
            }
        }
        for (std::size_t i = 0; i < ev.size(); ++i)
        {
            const auto &e = ev[i];
            if (e.kind != EventKind::Recv)
                continue;
            const MsgId m = e.detail.u64("msg");
            const std::uint64_t k = e.detail.u64("k");
            const auto s = sends.find(m);
            if (s == sends.end())
            {
                v.add("SecureTransferSafety", {i}, "msg " + std::to_string(m) + " delivered without a send record");
            }
            else
            {
                const auto &si = s->second;
                const BridgeId bridge = parse_bridge_id(e.detail.at("bridge"));
                if (si.payload != e.detail.at("payload"))
                    v.add("SecureTransferSafety", {si.idx, i},
                          "msg " + std::to_string(m) + " delivered with a payload differing from its send");
                else if (si.dest != e.detail.at("dest") || si.bridge != e.detail.at("bridge"))
                    v.add("SecureTransferSafety", {si.idx, i},
                          "msg " + std::to_string(m) + " delivered to a different destination");
                else
                {
                    const auto blk = sealed.find({bridge.src, k});
                    if (blk == sealed.end() || !blk->second.contains(m))
                        v.add("SecureTransferSafety", {si.idx, i},
                              "msg " + std::to_string(m) + " claims block " + std::to_string(k) + " of " +
                                  bridge.src.name + ", which does not record its send");
                }
            }
            if (const auto d = delivered.find(m); d != delivered.end())
                v.add("ExactlyOnce", {d->second, i}, "msg " + std::to_string(m) + " delivered twice");
            else
                delivered.emplace(m, i);
        }
        const TraceEvent *end = detail::end_event(trace);
        if (end && end->detail.flag("drained"))
        {
            for (const auto &[m, si] : sends)
                if (!delivered.contains(m))
                    v.add("SecureTransferLiveness", {si.idx}, "msg " + std::to_string(m) + " was never delivered");
        }
        return v;
    }

    /// Replays the whole trace in order; any event whose recorded outcome cannot
    /// be reproduced (for instance a write that slipped past a lock) is flagged.
    inline Verdict check_guard_safety(const Trace &trace, const ChainMap &initial)
    {
        Verdict v;
        v.checker = "guard-safety";
        Replayer r(initial);
        const auto &ev = trace.events();
        for (std::size_t i = 0; i < ev.size(); ++i)
        {
            if (!is_mutating(ev[i], initial))
                continue;
            if (ev[i].kind == EventKind::Invoke)
            {
                const Address target = parse_address(ev[i].detail.at("target"));
                const Contract &c = r.chains().at(target.chain).contracts.at(target);
                if (c.locked && parse_address(ev[i].detail.at("caller")) != *c.lockedBy)
                {
                    v.add("GuardSafety", {i}, target.text() + " mutated by a caller other than its lock holder");
                    continue;
                }
            }
            std::string why;
            if (!r.apply(ev[i], &why))
                v.add("ReplayDivergence", {i}, why);
        }
        return v;
    }

    /// Per transaction and chain: the scoped state when the transaction first
    /// locked the chain (pre) and when it last unlocked it (post). Committed needs
    /// post to equal the ideal execution from pre; Aborted needs post == pre.
    inline Verdict check_all_or_nothing(const Trace &trace, const std::vector<CrossChainTransaction> &txns,
                                        const ChainMap &initial)
    {
        Verdict v;
        v.checker = "all-or-nothing";
        using Snapshot = std::map<Address, ContractState>;
        std::map<TxId, std::map<ChainId, Snapshot>> pre;
        std::map<TxId, std::map<ChainId, Snapshot>> post;
        std::map<TxId, std::size_t> outcomeIdx;
        std::map<TxId, const CrossChainTransaction *> byId;
        for (const auto &t : txns)
            byId.emplace(t.txId, &t);

        auto snapshot = [&](const Replayer &r, const CrossChainTransaction &t, const ChainId &chain) {
            Snapshot s;
            const Chain &c = r.chains().at(chain);
            for (const auto &addr : scope_union(t, chain, initial))
                if (const Contract *k = c.find(addr))
                    s.emplace(addr, k->s);
            return s;
        };

        Replayer r(initial);
        const auto &ev = trace.events();
        for (std::size_t i = 0; i < ev.size(); ++i)
        {
            const auto &e = ev[i];
            if (e.kind == EventKind::Outcome)
            {
                outcomeIdx[e.detail.u64("tx")] = i;
                continue;
            }
            if (!is_mutating(e, initial))
                continue;
            const auto tx = tx_of(e);
            const auto owner = tx ? byId.find(*tx) : byId.end();
            if (e.kind == EventKind::Lock && owner != byId.end() && !pre[*tx].contains(*e.chain))
                pre[*tx][*e.chain] = snapshot(r, *owner->second, *e.chain);
            std::string why;
            if (!r.apply(e, &why))
                v.add("ReplayDivergence", {i}, why);
            if (e.kind == EventKind::Unlock && owner != byId.end())
                post[*tx][*e.chain] = snapshot(r, *owner->second, *e.chain);
        }

        for (const auto &t : txns)
        {
            const auto oi = outcomeIdx.find(t.txId);
            if (oi == outcomeIdx.end())
            {
                v.add("MissingOutcome", {}, "tx " + std::to_string(t.txId) + " has no outcome event");
                continue;
            }
            const auto &oe = ev[oi->second];
            const std::string outcome = oe.detail.at("outcome");
            const std::string reason = oe.detail.get_or("reason", "");
            auto &tp = pre[t.txId];
            auto &tq = post[t.txId];
            const std::string who = "tx " + std::to_string(t.txId);
            for (const auto &[chain, s] : tp)
                if (!tq.contains(chain))
                    v.add("LockNotReleased", {oi->second}, who + " never unlocked " + chain.name);

            if (outcome == "Committed")
            {
                bool complete = true;
                for (const auto &c : t.chains())
                    if (!tp.contains(c) || !tq.contains(c))
                    {
                        v.add("CommittedWithoutScope", {oi->second}, who + " committed without locking " + c.name);
                        complete = false;
                    }
                if (!complete)
                    continue;
                ChainMap oracle = initial;
                for (const auto &[chain, s] : tp)
                    for (const auto &[addr, st] : s)
                    {
                        Contract &k = oracle.at(chain).contracts.at(addr);
                        k.s = st;
                        k.locked = false;
                        k.lockedBy.reset();
                        k.checkpoint.reset();
                    }
                const IdealReport ideal = ideal_execute(t, oracle);
                if (!ideal.ok)
                {
                    v.add("AllOrNothing", {oi->second},
                          who + " committed but the ideal execution fails at action " +
                              std::to_string(ideal.failure->action));
                    continue;
                }
                for (const auto &c : t.chains())
                    for (const auto &[addr, st] : tq.at(c))
                        if (oracle.at(c).contracts.at(addr).s != st)
                            v.add("AllOrNothing", {oi->second},
                                  who + " committed but " + addr.text() + " is " + st.text() + ", ideal gives " +
                                      oracle.at(c).contracts.at(addr).s.text());
            }
            else if (outcome == "Aborted")
            {
                for (const auto &[chain, s] : tp)
                {
                    const auto q = tq.find(chain);
                    if (q != tq.end() && q->second != s)
                        for (const auto &[addr, st] : s)
                            if (q->second.at(addr) != st)
                                v.add("AllOrNothing", {oi->second},
                                      who + " aborted but " + addr.text() + " moved from " + st.text() + " to " +
                                          q->second.at(addr).text());
                }
                if (reason == "OpFailed")
                {
                    bool complete = true;
                    for (const auto &c : t.chains())
                        complete = complete && tp.contains(c);
                    if (!complete)
                    {
                        v.add("AllOrNothing", {oi->second}, who + " reports OpFailed without holding every lock");
                        continue;
                    }
                    ChainMap oracle = initial;
                    for (const auto &[chain, s] : tp)
                        for (const auto &[addr, st] : s)
                        {
                            Contract &k = oracle.at(chain).contracts.at(addr);
                            k.s = st;
                            k.locked = false;
                            k.lockedBy.reset();
                            k.checkpoint.reset();
                        }
                    if (ideal_execute(t, oracle).ok)
                        v.add("AllOrNothing", {oi->second}, who + " aborted with OpFailed but the ideal execution succeeds");
                }
            }
            else
                v.add("MissingOutcome", {oi->second}, who + " has outcome '" + outcome + "'");
        }
        return v;
    }

    /// Exhaustive witness search: transactions become contiguous blocks, other
    /// mutating events are singletons. Orders respect per-actor program order on
    /// each chain and real-time order between non-overlapping units, and must
    /// replay every event's recorded outcome and end in the observed state.
    inline Verdict check_strict_serializability(const Trace &trace, const ChainMap &initial, const ChainMap &observed,
                                                std::size_t budget = 14)
    {
        Verdict v;
        v.checker = "strict-serializability";
        const auto &ev = trace.events();

        struct Unit
        {
            std::string label;
            std::vector<std::size_t> events;
            std::size_t start = 0;
            std::size_t end = 0;
            bool isTx = false;
            std::string actor;
        };

        std::vector<std::size_t> mutating;
        for (std::size_t i = 0; i < ev.size(); ++i)
            if (is_mutating(ev[i], initial))
                mutating.push_back(i);
        if (mutating.size() > budget)
            throw BudgetExceeded("trace has " + std::to_string(mutating.size()) +
                                 " state-mutating events; the serializability budget is " + std::to_string(budget));

        std::map<TxId, std::size_t> proposeIdx;
        std::map<TxId, std::size_t> doneIdx;
        for (std::size_t i = 0; i < ev.size(); ++i)
        {
            const auto &e = ev[i];
            if (e.kind == EventKind::Invoke && e.detail.get_or("method", "") == "propose" && tx_of(e) &&
                !proposeIdx.contains(*tx_of(e)))
                proposeIdx[*tx_of(e)] = i;
            else if (e.kind == EventKind::Outcome)
                doneIdx[e.detail.u64("tx")] = i;
        }

        std::vector<Unit> units;
        std::map<TxId, std::size_t> txUnit;
        for (std::size_t i : mutating)
        {
            const auto tx = tx_of(ev[i]);
            if (tx)
            {
                auto [it, fresh] = txUnit.emplace(*tx, units.size());
                if (fresh)
                {
                    Unit u;
                    u.label = "tx" + std::to_string(*tx);
                    u.isTx = true;
                    units.push_back(std::move(u));
                }
                units[it->second].events.push_back(i);
                continue;
            }
            Unit u;
            u.label = "op" + std::to_string(i);
            u.events.push_back(i);
            u.start = u.end = i;
            u.actor = ev[i].detail.at("caller") + "@" + ev[i].chain->name;
            units.push_back(std::move(u));
        }
        for (const auto &[tx, ui] : txUnit)
        {
            Unit &u = units[ui];
            const auto p = proposeIdx.find(tx);
            const auto d = doneIdx.find(tx);
            u.start = p != proposeIdx.end() ? p->second : u.events.front();
            u.end = d != doneIdx.end() ? d->second : std::numeric_limits<std::size_t>::max();
        }
        if (units.size() > 63)
            throw BudgetExceeded("too many serialization units (" + std::to_string(units.size()) + ")");

        const std::size_t n = units.size();
        std::vector<std::uint64_t> preds(n, 0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
            {
                if (a == b)
                    continue;
                const Unit &x = units[a];
                const Unit &y = units[b];
                bool before = false;
                if (!x.isTx && !y.isTx)
                    before = x.actor == y.actor && x.start < y.start;
                else
                    before = x.end < y.start;
                if (before)
                    preds[b] |= std::uint64_t{1} << a;
            }

        auto final_matches = [&](const ChainMap &replayed) {
            for (const auto &[id, c] : replayed)
            {
                const auto oc = observed.find(id);
                if (oc == observed.end())
                    return false;
                for (const auto &[addr, k] : c.contracts)
                {
                    if (k.kind != ContractKind::Regular)
                        continue;
                    const Contract *o = oc->second.find(addr);
                    if (!o || o->s != k.s)
                        return false;
                }
            }
            return true;
        };

        std::unordered_set<std::string> dead;
        std::vector<std::size_t> order;
        const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

        std::function<bool(std::uint64_t, const Replayer &)> search = [&](std::uint64_t placed, const Replayer &r) {
            if (placed == all)
                return final_matches(r.chains());
            const std::string key = std::to_string(placed) + "|" + r.state_key();
            if (dead.contains(key))
                return false;
            for (std::size_t u = 0; u < n; ++u)
            {
                const std::uint64_t bit = std::uint64_t{1} << u;
                if ((placed & bit) || (preds[u] & ~placed))
                    continue;
                Replayer next = r;
                bool ok = true;
                for (std::size_t i : units[u].events)
                    if (!next.apply(ev[i]))
                    {
                        ok = false;
                        break;
                    }
                if (!ok)
                    continue;
                order.push_back(u);
                if (search(placed | bit, next))
                    return true;
                order.pop_back();
            }
            dead.insert(key);
            return false;
        };

        if (search(0, Replayer(initial)))
        {
            for (std::size_t u : order)
                v.witness.push_back(units[u].label);
        }
        else
        {
            v.add("StrictSerializability", mutating,
                  "no serial order of " + std::to_string(n) + " units reproduces the trace under the ordering constraints");
        }
        return v;
    }

    /// Chain state obtained by replaying every mutating event of the trace in order.
    inline ChainMap replay_final(const Trace &trace, const ChainMap &initial)
    {
        Replayer r(initial);
        for (const auto &e : trace.events())
            if (is_mutating(e, initial))
                r.apply(e);
        return r.chains();
    }

    struct CheckReport
    {
        std::vector<Verdict> verdicts;
        std::optional<std::string> budgetExceeded;

        [[nodiscard]] bool pass() const
        {
            return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict &v) { return v.pass; });
        }
    };

    /// All checkers over one trace. Serializability is skipped (and noted) when the
    /// trace exceeds the search budget.
    inline CheckReport check_all(const Trace &trace, const std::vector<CrossChainTransaction> &txns,
                                 const ChainMap &initial, const ChainMap &observed, std::size_t budget = 14)
    {
        CheckReport rep;
        rep.verdicts.push_back(check_secure_transfer(trace));
        rep.verdicts.push_back(check_guard_safety(trace, initial));
        rep.verdicts.push_back(check_all_or_nothing(trace, txns, initial));
        try
        {
            rep.verdicts.push_back(check_strict_serializability(trace, initial, observed, budget));
        }
        catch (const BudgetExceeded &e)
        {
            rep.budgetExceeded = e.what();
        }
        return rep;
    }

    struct ChainMetrics
    {
        std::string role = "idle";
        std::uint64_t xcMsgs = 0;
        std::uint64_t txCount = 0;
        std::uint64_t opCost = 0;
    };

    struct TxMetrics
    {
        ChainId proposer;
        std::string outcome = "Pending";
        std::string reason;
        std::uint64_t rounds = 0;
    };

    struct MetricsReport
    {
        std::map<ChainId, ChainMetrics> perChain;
        std::map<TxId, TxMetrics> perTx;

        /// One row per chain: `<role> <xcMsgs> <txCount> <opCost> <chain>`, then
        /// one row per transaction.
        [[nodiscard]] std::string table() const
        {
            std::string out;
            for (const auto &[id, m] : perChain)
                out += m.role + " " + std::to_string(m.xcMsgs) + " " + std::to_string(m.txCount) + " " +
                       std::to_string(m.opCost) + " " + id.name + "\n";
            for (const auto &[tx, t] : perTx)
            {
                out += "tx " + std::to_string(tx) + " " + t.outcome;
                if (!t.reason.empty())
                    out += "(" + t.reason + ")";
                out += " rounds=" + std::to_string(t.rounds) + " proposer=" + t.proposer.name + "\n";
            }
            return out;
        }
    };

    /// xcMsgs: bridge sends originating on the chain. txCount: executor entry-point
    /// invocations on the chain, failed ones included. opCost: one unit per
    /// invocation, lock, unlock, send and receive on the chain.
    inline MetricsReport extract_metrics(const Trace &trace)
    {
        MetricsReport m;
        for (const auto &e : trace.events())
        {
            if (!e.chain)
                continue;
            ChainMetrics &c = m.perChain[*e.chain];
            switch (e.kind)
            {
            case EventKind::Send:
                ++c.xcMsgs;
                ++c.opCost;
                break;
            case EventKind::Recv:
            case EventKind::Lock:
            case EventKind::Unlock:
                ++c.opCost;
                break;
            case EventKind::Invoke: {
                ++c.opCost;
                const std::string &method = e.detail.at("method");
                const Address target = parse_address(e.detail.at("target"));
                if (target.local == "executor" && is_executor_entry(method))
                {
                    ++c.txCount;
                    if (method == "propose")
                    {
                        c.role = "proposer";
                        if (const auto tx = tx_of(e))
                            m.perTx[*tx].proposer = *e.chain;
                    }
                    else if (c.role == "idle")
                        c.role = "participant";
                }
                break;
            }
            case EventKind::Outcome: {
                TxMetrics &t = m.perTx[e.detail.u64("tx")];
                t.proposer = *e.chain;
                t.outcome = e.detail.at("outcome");
                t.reason = e.detail.get_or("reason", "");
                t.rounds = e.detail.u64("rounds");
                break;
            }
            default:
                break;
            }
        }
        return m;
    }
} // namespace xchain
