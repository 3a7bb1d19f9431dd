#pragma once

#include "world.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xchain
{
    struct ScopeNotLocked : FatalScenarioError
    {
        using FatalScenarioError::FatalScenarioError;
    };

    inline constexpr std::array<std::string_view, 4> kExecutorEntryPoints{"propose", "lock_scope", "run_action",
                                                                         "unlock_scope"};

    inline bool is_executor_entry(std::string_view method)
    {
        return std::find(kExecutorEntryPoints.begin(), kExecutorEntryPoints.end(), method) !=
               kExecutorEntryPoints.end();
    }

    namespace detail
    {
        inline std::optional<TxId> tx_param(const ValueList &p)
        {
            if (p.empty())
                return std::nullopt;
            const auto *i = as_int(p[0]);
            if (!i || *i < 0)
                return std::nullopt;
            return static_cast<TxId>(*i);
        }

        inline std::optional<Address> address_param(const ValueList &p, std::size_t i)
        {
            if (i >= p.size())
                return std::nullopt;
            const auto *b = as_bytes(p[i]);
            if (!b)
                return std::nullopt;
            try
            {
                return parse_address(b->data);
            }
            catch (const ParseError &)
            {
                return std::nullopt;
            }
        }

        /// Locks W in order; on the first failure releases what this call acquired.
        inline Outcome executor_lock_scope(Chain &chain, ExecutorState &ex, TxId tx, const ValueList &p,
                                           const Recorder &rec)
        {
            std::vector<Address> scope;
            for (std::size_t i = 1; i < p.size(); ++i)
            {
                const auto a = address_param(p, i);
                if (!a || a->chain != chain.id)
                    return Outcome::fail(Failure::BadParams);
                scope.push_back(*a);
            }
            std::vector<Address> acquired;
            for (const auto &w : scope)
            {
                const Outcome out = lock(chain, ex.addr, w, &rec);
                if (!out.ok())
                {
                    for (auto it = acquired.rbegin(); it != acquired.rend(); ++it)
                        unlock(chain, ex.addr, *it, true, &rec);
                    return out;
                }
                acquired.push_back(w);
            }
            auto &held = ex.heldLocks[tx];
            held.insert(held.end(), acquired.begin(), acquired.end());
            return Outcome::success(static_cast<std::int64_t>(acquired.size()));
        }

        inline Outcome executor_run_action(Chain &chain, ExecutorState &ex, TxId tx, const ValueList &p,
                                           const Recorder &rec)
        {
            const auto target = address_param(p, 2);
            const auto *method = p.size() > 3 ? as_bytes(p[3]) : nullptr;
            if (p.size() < 4 || !as_int(p[1]) || !target || !method)
                return Outcome::fail(Failure::BadParams);
            const auto held = ex.heldLocks.find(tx);
            std::set<Address> scope{*target};
            if (const Contract *c = chain.find(*target))
            {
                const auto mit = c->methods.find(method->data);
                if (mit != c->methods.end())
                    scope.insert(mit->second.declaredScope.begin(), mit->second.declaredScope.end());
            }
            for (const auto &a : scope)
            {
                const bool covered = held != ex.heldLocks.end() &&
                                     std::find(held->second.begin(), held->second.end(), a) != held->second.end();
                if (!covered)
                    throw ScopeNotLocked("ScopeNotLocked: " + ex.addr.text() + " runs tx " + std::to_string(tx) +
                                         " action on " + a.text() + " without holding its lock");
            }
            Recorder inner = rec;
            inner.tags.set("action", *as_int(p[1]));
            return invoke(chain, ex.addr, *target, method->data, ValueList(p.begin() + 4, p.end()), &inner);
        }

        inline Outcome executor_unlock_scope(Chain &chain, ExecutorState &ex, TxId tx, const ValueList &p,
                                             const Recorder &rec)
        {
            const auto *failure = p.size() == 2 ? as_bool(p[1]) : nullptr;
            if (!failure)
                return Outcome::fail(Failure::BadParams);
            const auto held = ex.heldLocks.find(tx);
            if (held == ex.heldLocks.end())
                return Outcome::success(std::int64_t{0});
            const auto locks = std::move(held->second);
            ex.heldLocks.erase(held);
            for (auto it = locks.rbegin(); it != locks.rend(); ++it)
                unlock(chain, ex.addr, *it, *failure, &rec);
            return Outcome::success(static_cast<std::int64_t>(locks.size()));
        }

        inline Outcome executor_invoke(World &w, Chain &chain, ExecutorState &ex, const Address &caller,
                                       const std::optional<Address> &origin, const std::string &method,
                                       const ValueList &params, const Recorder &rec)
        {
            const Contract *callerContract = chain.find(caller);
            const bool local = caller == ex.addr;
            const bool relayed = callerContract && callerContract->kind == ContractKind::Adapter && origin &&
                                 w.registeredExecutors.contains(*origin);
            if (!local && !relayed)
                return Outcome::fail(Failure::NotTrusted);
            if (method == "propose" || !is_executor_entry(method))
                return Outcome::fail(Failure::UnknownMethod);
            const auto tx = tx_param(params);
            if (!tx)
                return Outcome::fail(Failure::BadParams);
            Recorder inner = rec;
            inner.tags.set("tx", *tx);
            if (method == "lock_scope")
                return executor_lock_scope(chain, ex, *tx, params, inner);
            if (method == "run_action")
                return executor_run_action(chain, ex, *tx, params, inner);
            return executor_unlock_scope(chain, ex, *tx, params, inner);
        }
    } // namespace detail

    /// Routes an external invocation to a regular contract or an executor entry
    /// point. `origin` is the relayed remote caller when the call arrives through
    /// an adapter.
    inline Outcome dispatch_invoke(World &w, const ChainId &chainId, const Address &caller,
                                   const std::optional<Address> &origin, const Address &target,
                                   const std::string &method, const ValueList &params, const Recorder &rec)
    {
        Chain &chain = w.chain(chainId);
        const Contract *c = chain.find(target);
        if (!c || c->kind != ContractKind::Executor)
            return invoke(chain, caller, target, method, params, &rec);

        ExecutorState &ex = w.executors.at(target);
        Outcome out = detail::executor_invoke(w, chain, ex, caller, origin, method, params, rec);
        chain.pending.push_back(ActionRecord{caller, target, method, params, out, 0});
        Record r;
        r.set("caller", caller.text());
        r.set("target", target.text());
        r.set("method", method);
        r.set("params", to_text(params));
        put_outcome(r, out);
        r.set("depth", 0);
        if (origin)
            r.set("origin", origin->text());
        if (const auto tx = detail::tx_param(params); tx && !rec.tags.has("tx"))
            r.set("tx", *tx);
        rec.emit(EventKind::Invoke, chainId, std::move(r));
        return out;
    }
} // namespace xchain
