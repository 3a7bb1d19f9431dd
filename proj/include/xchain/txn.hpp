#pragma once

#include "chain.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace xchain
{
    using ChainMap = std::map<ChainId, Chain>;
    using ActionId = std::uint32_t;

    struct CyclicOrder : ValidationError
    {
        using ValidationError::ValidationError;
    };

    struct IndexedAction
    {
        ActionId id = 0;
        ChainId chain;
        Address target;
        std::string method;
        ValueList params;
    };

    struct CrossChainTransaction
    {
        TxId txId = 0;
        std::vector<IndexedAction> actions;
        std::vector<std::pair<ActionId, ActionId>> prec;
        Address originator;
        ChainId proposer;
        Tick start = 0;
        /// Lock order used when lockOrder=declared; chains of the actions in first
        /// appearance order when empty.
        std::vector<ChainId> lockOrder;

        [[nodiscard]] const IndexedAction *find(ActionId id) const
        {
            for (const auto &a : actions)
                if (a.id == id)
                    return &a;
            return nullptr;
        }

        [[nodiscard]] std::vector<ChainId> chains() const
        {
            std::vector<ChainId> out;
            for (const auto &a : actions)
                if (std::find(out.begin(), out.end(), a.chain) == out.end())
                    out.push_back(a.chain);
            return out;
        }
    };

    struct LayerPlan
    {
        std::vector<std::vector<ActionId>> layers;

        [[nodiscard]] std::optional<std::size_t> layer_of(ActionId id) const
        {
            for (std::size_t i = 0; i < layers.size(); ++i)
                if (std::find(layers[i].begin(), layers[i].end(), id) != layers[i].end())
                    return i;
            return std::nullopt;
        }
    };

    /// Longest-path layering via Kahn's traversal; ids ascending within a layer.
    inline LayerPlan layer_partition(const CrossChainTransaction &txn)
    {
        std::map<ActionId, std::size_t> indegree;
        std::map<ActionId, std::vector<ActionId>> succ;
        for (const auto &a : txn.actions)
            if (!indegree.emplace(a.id, 0).second)
                throw ValidationError("tx " + std::to_string(txn.txId) + ": duplicate action id " + std::to_string(a.id));
        for (const auto &[m, n] : txn.prec)
        {
            if (!indegree.contains(m) || !indegree.contains(n))
                throw ValidationError("tx " + std::to_string(txn.txId) + ": order pair (" + std::to_string(m) + "," +
                                      std::to_string(n) + ") names an unknown action");
            if (m == n)
                throw CyclicOrder("tx " + std::to_string(txn.txId) + ": action " + std::to_string(m) +
                                  " ordered before itself");
            succ[m].push_back(n);
            ++indegree[n];
        }

        std::map<ActionId, std::size_t> layer;
        std::vector<ActionId> ready;
        for (const auto &[id, d] : indegree)
            if (d == 0)
            {
                ready.push_back(id);
                layer[id] = 0;
            }
        std::size_t visited = 0;
        while (!ready.empty())
        {
            const ActionId m = ready.back();
            ready.pop_back();
            ++visited;
            for (ActionId n : succ[m])
            {
                layer[n] = std::max(layer[n], layer[m] + 1);
                if (--indegree[n] == 0)
                    ready.push_back(n);
            }
        }
        if (visited != indegree.size())
            throw CyclicOrder("tx " + std::to_string(txn.txId) + ": precedence order has a cycle");

        LayerPlan plan;
        for (const auto &[id, l] : layer)
        {
            if (plan.layers.size() <= l)
                plan.layers.resize(l + 1);
            plan.layers[l].push_back(id);
        }
        for (auto &l : plan.layers)
            std::sort(l.begin(), l.end());
        return plan;
    }

    inline std::set<Address> action_scope(const IndexedAction &a, const ChainMap &chains)
    {
        std::set<Address> scope{a.target};
        const auto cit = chains.find(a.chain);
        if (cit == chains.end())
            return scope;
        if (const Contract *c = cit->second.find(a.target))
        {
            const auto mit = c->methods.find(a.method);
            if (mit != c->methods.end())
                scope.insert(mit->second.declaredScope.begin(), mit->second.declaredScope.end());
        }
        return scope;
    }

    /// Union of declared scopes over the transaction's actions on one chain.
    inline std::set<Address> scope_union(const CrossChainTransaction &txn, const ChainId &chain, const ChainMap &chains)
    {
        std::set<Address> out;
        for (const auto &a : txn.actions)
            if (a.chain == chain)
            {
                const auto s = action_scope(a, chains);
                out.insert(s.begin(), s.end());
            }
        return out;
    }

    /// Structural validation against the world the transaction will run in.
    inline void validate(const CrossChainTransaction &txn, const ChainMap &chains)
    {
        const std::string where = "tx " + std::to_string(txn.txId);
        if (!chains.contains(txn.proposer))
            throw ValidationError(where + ": unknown proposer chain '" + txn.proposer.name + "'");
        for (const auto &a : txn.actions)
        {
            if (a.target.chain != a.chain)
                throw ValidationError(where + ": action " + std::to_string(a.id) + " target " + a.target.text() +
                                      " is not on chain " + a.chain.name);
            const auto cit = chains.find(a.chain);
            if (cit == chains.end())
                throw ValidationError(where + ": action " + std::to_string(a.id) + " names unknown chain '" +
                                      a.chain.name + "'");
            const Contract *c = cit->second.find(a.target);
            if (!c || c->kind != ContractKind::Regular)
                throw ValidationError(where + ": action " + std::to_string(a.id) + " names unknown contract " +
                                      a.target.text());
            if (!c->methods.contains(a.method))
                throw ValidationError(where + ": action " + std::to_string(a.id) + " names unknown method " +
                                      a.target.text() + "." + a.method);
        }
        for (const auto &c : txn.lockOrder)
            if (!chains.contains(c))
                throw ValidationError(where + ": lock order names unknown chain '" + c.name + "'");
        for (const auto &c : txn.chains())
            if (!txn.lockOrder.empty() && std::find(txn.lockOrder.begin(), txn.lockOrder.end(), c) == txn.lockOrder.end())
                throw ValidationError(where + ": lock order omits chain '" + c.name + "'");

        const LayerPlan plan = layer_partition(txn);
        for (const auto &layer : plan.layers)
        {
            for (std::size_t i = 0; i < layer.size(); ++i)
                for (std::size_t j = i + 1; j < layer.size(); ++j)
                {
                    const auto &a = *txn.find(layer[i]);
                    const auto &b = *txn.find(layer[j]);
                    if (a.chain != b.chain)
                        continue;
                    const auto sa = action_scope(a, chains);
                    const auto sb = action_scope(b, chains);
                    for (const auto &x : sa)
                        if (sb.contains(x))
                            throw ValidationError(where + ": actions " + std::to_string(a.id) + " and " +
                                                  std::to_string(b.id) + " share a layer and overlap on " + x.text());
                }
        }
    }

    struct WorldCheckpoint
    {
        std::map<ChainId, std::map<Address, ContractState>> perChain;

        bool operator==(const WorldCheckpoint &) const = default;
    };

    inline WorldCheckpoint take_checkpoint(const CrossChainTransaction &txn, const ChainMap &chains)
    {
        WorldCheckpoint cp;
        for (const auto &id : txn.chains())
        {
            auto &slot = cp.perChain[id];
            const Chain &chain = chains.at(id);
            for (const auto &addr : scope_union(txn, id, chains))
                if (const Contract *c = chain.find(addr))
                    slot.emplace(addr, c->s);
        }
        return cp;
    }

    inline void restore(const WorldCheckpoint &cp, ChainMap &chains)
    {
        for (const auto &[id, states] : cp.perChain)
            for (const auto &[addr, s] : states)
                chains.at(id).contracts.at(addr).s = s;
    }

    struct IdealFailure
    {
        std::size_t layer = 0;
        ActionId action = 0;
        Failure reason = Failure::BadParams;
    };

    struct IdealReport
    {
        bool ok = true;
        std::optional<IdealFailure> failure;
        std::map<ActionId, Outcome> results;
    };

    /// Sequential oracle: layers in order, ascending ids, no interference. On the
    /// first failure every participating chain's scoped state is restored.
    inline IdealReport ideal_execute(const CrossChainTransaction &txn, ChainMap &chains)
    {
        const LayerPlan plan = layer_partition(txn);
        const WorldCheckpoint cp = take_checkpoint(txn, chains);
        IdealReport report;
        for (std::size_t l = 0; l < plan.layers.size(); ++l)
        {
            for (ActionId id : plan.layers[l])
            {
                const IndexedAction &a = *txn.find(id);
                Chain &chain = chains.at(a.chain);
                Outcome out = invoke(chain, chain.executor, a.target, a.method, a.params);
                report.results.emplace(id, out);
                if (!out.ok())
                {
                    restore(cp, chains);
                    report.ok = false;
                    report.failure = IdealFailure{l, id, *out.failure};
                    return report;
                }
            }
        }
        return report;
    }
} // namespace xchain
