#pragma once

#include "chain.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace xchain
{
    /// Declarative contract description; the built-in library turns it into a Contract.
    struct ContractConfig
    {
        std::string local;
        std::string type;
        std::optional<Address> owner;
        std::map<std::string, Value> vars;
        std::optional<Address> target; // forwarder only
        std::set<Address> trusted;     // in addition to the chain executor
    };

    namespace builtin
    {
        inline std::string account_key(const std::string &acct) { return "bal/" + acct; }

        inline const std::string *text_param(const ValueList &p, std::size_t i)
        {
            if (i >= p.size())
                return nullptr;
            const auto *b = as_bytes(p[i]);
            return b ? &b->data : nullptr;
        }

        inline const std::int64_t *int_param(const ValueList &p, std::size_t i)
        {
            return i < p.size() ? as_int(p[i]) : nullptr;
        }

        inline void add_method(Contract &c, std::string name, MethodBody body, std::set<Address> extraScope = {})
        {
            extraScope.insert(c.addr);
            MethodDef def{name, std::move(body), std::move(extraScope)};
            c.methods.insert_or_assign(std::move(name), std::move(def));
        }

        inline void install_token(Contract &c)
        {
            add_method(c, "transfer", [](CallContext &ctx, const ValueList &p) {
                const auto *from = text_param(p, 0);
                const auto *to = text_param(p, 1);
                const auto *amount = int_param(p, 2);
                if (p.size() != 3 || !from || !to || !amount || *amount < 0)
                    return Outcome::fail(Failure::BadParams);
                auto &vars = ctx.state().vars;
                const auto fi = vars.find(account_key(*from));
                const auto ti = vars.find(account_key(*to));
                if (fi == vars.end() || ti == vars.end())
                    return Outcome::fail(Failure::UnknownAccount);
                const auto *fb = as_int(fi->second);
                const auto *tb = as_int(ti->second);
                if (!fb || !tb)
                    return Outcome::fail(Failure::BadParams);
                if (*fb < *amount)
                    return Outcome::fail(Failure::InsufficientFunds);
                fi->second = *fb - *amount;
                ti->second = *as_int(ti->second) + *amount;
                return Outcome::success();
            });
            add_method(c, "mint", [](CallContext &ctx, const ValueList &p) {
                const auto *acct = text_param(p, 0);
                const auto *amount = int_param(p, 1);
                if (p.size() != 2 || !acct || !amount || *amount < 0)
                    return Outcome::fail(Failure::BadParams);
                auto &slot = ctx.state().vars[account_key(*acct)];
                const auto *cur = as_int(slot);
                const std::int64_t next = (cur ? *cur : 0) + *amount;
                slot = next;
                return Outcome::success(next);
            });
            add_method(c, "balance", [](CallContext &ctx, const ValueList &p) {
                const auto *acct = text_param(p, 0);
                if (p.size() != 1 || !acct)
                    return Outcome::fail(Failure::BadParams);
                const auto &vars = ctx.state().vars;
                const auto it = vars.find(account_key(*acct));
                if (it == vars.end())
                    return Outcome::fail(Failure::UnknownAccount);
                return Outcome::success(it->second);
            });
        }

        inline void install_counter(Contract &c)
        {
            c.s.vars.try_emplace("count", std::int64_t{0});
            c.s.vars.try_emplace("last", bytes(""));
            auto bump = [](CallContext &ctx) {
                auto &count = ctx.state().vars["count"];
                const auto *cur = as_int(count);
                const std::int64_t next = (cur ? *cur : 0) + 1;
                count = next;
                return next;
            };
            add_method(c, "increment", [bump](CallContext &ctx, const ValueList &p) {
                if (!p.empty())
                    return Outcome::fail(Failure::BadParams);
                return Outcome::success(bump(ctx));
            });
            add_method(c, "notification", [bump](CallContext &ctx, const ValueList &p) {
                if (p.size() != 3 || !text_param(p, 2))
                    return Outcome::fail(Failure::BadParams);
                const std::int64_t n = bump(ctx);
                ctx.state().vars["last"] = p[2];
                return Outcome::success(n);
            });
            add_method(c, "get", [](CallContext &ctx, const ValueList &) {
                return Outcome::success(ctx.state().vars["count"]);
            });
        }

        inline void install_noop(Contract &c)
        {
            add_method(c, "noop", [](CallContext &, const ValueList &) { return Outcome::success(); });
            add_method(c, "notification", [](CallContext &, const ValueList &) { return Outcome::success(); });
        }

        inline void install_always_fail(Contract &c)
        {
            auto fail = [](CallContext &, const ValueList &) { return Outcome::fail(Failure::AlwaysFail); };
            add_method(c, "fail", fail);
            add_method(c, "notification", fail);
        }

        inline void install_forwarder(Contract &c, const Address &target)
        {
            c.s.vars.try_emplace("forwards", std::int64_t{0});
            c.s.vars.insert_or_assign("target", bytes(target.text()));
            add_method(
                c, "forward",
                [target](CallContext &ctx, const ValueList &p) {
                    const auto *method = text_param(p, 0);
                    if (!method)
                        return Outcome::fail(Failure::BadParams);
                    auto &n = ctx.state().vars["forwards"];
                    const auto *cur = as_int(n);
                    n = (cur ? *cur : 0) + 1;
                    return ctx.call(target, *method, ValueList(p.begin() + 1, p.end()));
                },
                {target});
        }
    } // namespace builtin

    inline const std::vector<std::string> &builtin_types()
    {
        static const std::vector<std::string> types{"token", "counter", "noop", "always-fail", "forwarder"};
        return types;
    }

    /// Builds a regular contract from the built-in method library.
    inline Contract make_contract(const ChainId &chain, const Address &executor, const ContractConfig &cfg)
    {
        Contract c;
        c.addr = Address{chain, cfg.local};
        c.type = cfg.type;
        c.owner = cfg.owner.value_or(Address{chain, "owner"});
        c.s.vars = cfg.vars;
        c.trustedExecutors = cfg.trusted;
        c.trustedExecutors.insert(executor);

        if (cfg.type == "token")
            builtin::install_token(c);
        else if (cfg.type == "counter")
            builtin::install_counter(c);
        else if (cfg.type == "noop")
            builtin::install_noop(c);
        else if (cfg.type == "always-fail")
            builtin::install_always_fail(c);
        else if (cfg.type == "forwarder")
        {
            if (!cfg.target)
                throw ValidationError("forwarder " + c.addr.text() + " needs a target");
            if (cfg.target->chain != chain)
                throw ValidationError("forwarder " + c.addr.text() + " targets another chain");
            builtin::install_forwarder(c, *cfg.target);
        }
        else
            throw ValidationError("unknown contract type '" + cfg.type + "' for " + c.addr.text());
        return c;
    }

    /// Token balances helper for scenario construction.
    inline std::map<std::string, Value> token_balances(const std::map<std::string, std::int64_t> &balances)
    {
        std::map<std::string, Value> vars;
        for (const auto &[acct, amount] : balances)
            vars.emplace(builtin::account_key(acct), amount);
        return vars;
    }
} // namespace xchain
