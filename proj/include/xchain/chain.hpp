#pragma once

#include "ids.hpp"
#include "trace.hpp"
#include "value.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xchain
{
    /// Raised for misconfigured scenarios or protocol bugs (scope violations,
    /// unlocked scope in executor actions). Aborts a run.
    struct FatalScenarioError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    /// Raised when a scenario references something that does not exist or breaks
    /// a structural rule.
    struct ValidationError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    enum class Failure : std::uint8_t
    {
        InsufficientFunds,
        LockedByOther,
        AlreadyLocked,
        NotTrusted,
        NotLockOwner,
        NotOwner,
        UnknownTarget,
        UnknownMethod,
        UnknownAccount,
        BadParams,
        AlwaysFail,
        ExecutorBusy,
        LockConflict,
        UnknownTx,
    };

    inline constexpr std::array<std::pair<Failure, std::string_view>, 14> kFailureNames{{
        {Failure::InsufficientFunds, "InsufficientFunds"},
        {Failure::LockedByOther, "LockedByOther"},
        {Failure::AlreadyLocked, "AlreadyLocked"},
        {Failure::NotTrusted, "NotTrusted"},
        {Failure::NotLockOwner, "NotLockOwner"},
        {Failure::NotOwner, "NotOwner"},
        {Failure::UnknownTarget, "UnknownTarget"},
        {Failure::UnknownMethod, "UnknownMethod"},
        {Failure::UnknownAccount, "UnknownAccount"},
        {Failure::BadParams, "BadParams"},
        {Failure::AlwaysFail, "AlwaysFail"},
        {Failure::ExecutorBusy, "ExecutorBusy"},
        {Failure::LockConflict, "LockConflict"},
        {Failure::UnknownTx, "UnknownTx"},
    }};

    inline std::string_view to_string(Failure f)
    {
        for (const auto &[code, name] : kFailureNames)
            if (code == f)
                return name;
        return "?";
    }

    inline std::optional<Failure> parse_failure(std::string_view name)
    {
        for (const auto &[code, n] : kFailureNames)
            if (n == name)
                return code;
        return std::nullopt;
    }

    /// Result of an invocation: a value, or a MethodFailure code.
    struct Outcome
    {
        Value result = Unit{};
        std::optional<Failure> failure;

        static Outcome success(Value v = Unit{}) { return Outcome{std::move(v), std::nullopt}; }
        static Outcome fail(Failure f) { return Outcome{Unit{}, f}; }

        [[nodiscard]] bool ok() const noexcept { return !failure.has_value(); }

        bool operator==(const Outcome &) const = default;
    };

    inline void put_outcome(Record &r, const Outcome &o)
    {
        r.set("ok", o.ok());
        if (o.ok())
            r.set("result", to_text(o.result));
        else
            r.set("fail", std::string(to_string(*o.failure)));
    }

    inline Outcome get_outcome(const Record &r)
    {
        if (r.flag("ok"))
            return Outcome::success(r.has("result") ? parse_value(r.at("result")) : Value{Unit{}});
        const auto f = parse_failure(r.get_or("fail", ""));
        if (!f)
            throw ParseError("unknown failure code '" + r.get_or("fail", "") + "'");
        return Outcome::fail(*f);
    }

    struct ContractState
    {
        std::map<std::string, Value> vars;

        bool operator==(const ContractState &) const = default;

        [[nodiscard]] std::string text() const
        {
            std::string out = "{";
            bool first = true;
            for (const auto &[k, v] : vars)
            {
                if (!first)
                    out.push_back(',');
                first = false;
                out += escape(k) + ":" + to_text(v);
            }
            out.push_back('}');
            return out;
        }
    };

    class CallContext;

    using MethodBody = std::function<Outcome(CallContext &, const ValueList &)>;

    struct MethodDef
    {
        std::string name;
        MethodBody body;
        /// Contracts the body may modify, directly or through nested calls.
        /// Always includes the defining contract.
        std::set<Address> declaredScope;
    };

    enum class ContractKind : std::uint8_t
    {
        Regular,
        Executor,
        Adapter,
    };

    struct Contract
    {
        Address addr;
        ContractKind kind = ContractKind::Regular;
        std::string type; // built-in library type, for display
        ContractState s;
        std::optional<ContractState> checkpoint;
        Address owner;
        bool locked = false;
        std::optional<Address> lockedBy;
        std::set<Address> trustedExecutors;
        std::map<std::string, MethodDef> methods;

        /// locked=false => no lockedBy/checkpoint; locked=true => lockedBy trusted and checkpoint present.
        [[nodiscard]] bool lock_metadata_consistent() const
        {
            if (!locked)
                return !lockedBy && !checkpoint;
            return lockedBy && trustedExecutors.contains(*lockedBy) && checkpoint;
        }
    };

    struct ActionRecord
    {
        Address caller;
        Address target;
        std::string method;
        ValueList params;
        Outcome outcome;
        int depth = 0;

        [[nodiscard]] std::string text() const
        {
            std::string out = caller.text() + ">" + target.text() + "." + method + to_text(params) + "=";
            out += outcome.ok() ? to_text(outcome.result) : "!" + std::string(to_string(*outcome.failure));
            if (depth)
                out += "@" + std::to_string(depth);
            return out;
        }
    };

    struct Block
    {
        std::uint64_t index = 0;
        std::vector<ActionRecord> actions;
        std::uint64_t hash = 0;

        [[nodiscard]] std::uint64_t compute_hash() const
        {
            // FNV-1a over the canonical action text.
            std::uint64_t h = 1469598103934665603ull;
            auto mix = [&h](std::string_view s) {
                for (unsigned char c : s)
                {
                    h ^= c;
                    h *= 1099511628211ull;
                }
                h ^= 0xFF;
                h *= 1099511628211ull;
            };
            mix(std::to_string(index));
            for (const auto &a : actions)
                mix(a.text());
            return h;
        }
    };

    struct Chain
    {
        ChainId id;
        std::vector<Block> ledger;
        std::vector<ActionRecord> pending;
        std::map<Address, Contract> contracts;
        Address executor;

        [[nodiscard]] Contract *find(const Address &a)
        {
            const auto it = contracts.find(a);
            return it == contracts.end() ? nullptr : &it->second;
        }
        [[nodiscard]] const Contract *find(const Address &a) const
        {
            const auto it = contracts.find(a);
            return it == contracts.end() ? nullptr : &it->second;
        }
    };

    /// Where invocation events go. A null Recorder (or null trace) records nothing,
    /// which is how the oracle and the replay checkers execute.
    struct Recorder
    {
        Trace *trace = nullptr;
        Tick tick = 0;
        Record tags;

        void emit(EventKind kind, const ChainId &chain, Record detail) const
        {
            if (!trace)
                return;
            for (const auto &[k, v] : tags.fields())
                detail.set(k, v);
            trace->append(TraceEvent{tick, kind, chain, std::move(detail)});
        }
    };

    namespace detail
    {
        using Journal = std::map<Address, ContractState>;

        Outcome invoke_at(Chain &chain, const Address &caller, const Address &target, const std::string &method,
                          const ValueList &params, const Recorder *rec, int depth, Journal &journal,
                          const std::set<Address> *allowed);
    } // namespace detail

    /// Handed to method bodies. Gives access to the executing contract's state and
    /// to synchronous nested calls on the same chain, relaying the external caller.
    class CallContext
    {
    public:
        CallContext(Chain &chain, Contract &self, const MethodDef &method, Address caller, const Recorder *rec,
                    int depth, detail::Journal &journal, const std::set<Address> &allowed)
            : chain_(chain), self_(self), method_(method), caller_(std::move(caller)), rec_(rec), depth_(depth),
              journal_(journal), allowed_(allowed)
        {
        }

        [[nodiscard]] ContractState &state() noexcept { return self_.s; }
        [[nodiscard]] const Address &caller() const noexcept { return caller_; }
        [[nodiscard]] const Address &self() const noexcept { return self_.addr; }

        Outcome call(const Address &target, const std::string &method, const ValueList &params)
        {
            if (!allowed_.contains(target))
                throw FatalScenarioError("scope violation: " + self_.addr.text() + "." + method_.name + " reached " +
                                         target.text() + " outside the declared scope");
            return detail::invoke_at(chain_, caller_, target, method, params, rec_, depth_ + 1, journal_, &allowed_);
        }

    private:
        Chain &chain_;
        Contract &self_;
        const MethodDef &method_;
        Address caller_;
        const Recorder *rec_;
        int depth_;
        detail::Journal &journal_;
        const std::set<Address> &allowed_;
    };

    namespace detail
    {
        inline Outcome invoke_at(Chain &chain, const Address &caller, const Address &target, const std::string &method,
                                 const ValueList &params, const Recorder *rec, int depth, Journal &journal,
                                 const std::set<Address> *allowed)
        {
            auto finish = [&](Outcome out) {
                chain.pending.push_back(ActionRecord{caller, target, method, params, out, depth});
                if (rec)
                {
                    Record r;
                    r.set("caller", caller.text());
                    r.set("target", target.text());
                    r.set("method", method);
                    r.set("params", to_text(params));
                    put_outcome(r, out);
                    r.set("depth", depth);
                    rec->emit(EventKind::Invoke, chain.id, std::move(r));
                }
                return out;
            };

            Contract *c = chain.find(target);
            if (!c)
                return finish(Outcome::fail(Failure::UnknownTarget));
            const auto mit = c->methods.find(method);
            if (c->kind != ContractKind::Regular || mit == c->methods.end())
                return finish(Outcome::fail(Failure::UnknownMethod));
            if (c->locked && caller != *c->lockedBy)
                return finish(Outcome::fail(Failure::LockedByOther));

            const MethodDef &def = mit->second;
            if (!allowed)
            {
                for (const auto &addr : def.declaredScope)
                    if (addr.chain != chain.id)
                        throw FatalScenarioError("declared scope of " + target.text() + "." + method +
                                                 " names a contract on another chain");
                allowed = &def.declaredScope;
            }

            Journal local;
            local.emplace(target, c->s);
            CallContext ctx(chain, *c, def, caller, rec, depth, local, *allowed);
            Outcome out = def.body(ctx, params);
            if (!out.ok())
            {
                for (auto &[addr, saved] : local)
                    chain.contracts.at(addr).s = std::move(saved);
            }
            else
            {
                for (auto &[addr, saved] : local)
                    journal.try_emplace(addr, std::move(saved));
            }
            return finish(std::move(out));
        }
    } // namespace detail

    /// Runs a guarded regular method. Guard rejections and body failures leave the
    /// state unchanged; every invocation is recorded in pending and traced once.
    inline Outcome invoke(Chain &chain, const Address &caller, const Address &target, const std::string &method,
                          const ValueList &params, const Recorder *rec = nullptr)
    {
        detail::Journal journal;
        return detail::invoke_at(chain, caller, target, method, params, rec, 0, journal, nullptr);
    }

    namespace detail
    {
        inline void record_meta(Chain &chain, EventKind kind, const Address &caller, const Address &target,
                                const std::string &method, ValueList params, const Outcome &out, const Recorder *rec,
                                Record extra = {})
        {
            chain.pending.push_back(ActionRecord{caller, target, method, params, out, 0});
            if (!rec)
                return;
            Record r;
            r.set("caller", caller.text());
            r.set("target", target.text());
            if (kind == EventKind::Invoke)
            {
                r.set("method", method);
                r.set("params", to_text(params));
            }
            for (const auto &[k, v] : extra.fields())
                r.set(k, v);
            put_outcome(r, out);
            if (kind == EventKind::Invoke)
                r.set("depth", 0);
            rec->emit(kind, chain.id, std::move(r));
        }
    } // namespace detail

    inline Outcome lock(Chain &chain, const Address &caller, const Address &target, const Recorder *rec = nullptr)
    {
        Outcome out = Outcome::success();
        Contract *c = chain.find(target);
        if (!c)
            out = Outcome::fail(Failure::UnknownTarget);
        else if (c->locked)
            out = Outcome::fail(Failure::AlreadyLocked);
        else if (!c->trustedExecutors.contains(caller))
            out = Outcome::fail(Failure::NotTrusted);
        else
        {
            c->locked = true;
            c->lockedBy = caller;
            c->checkpoint = c->s;
        }
        detail::record_meta(chain, EventKind::Lock, caller, target, "lock", {}, out, rec);
        return out;
    }

    inline Outcome unlock(Chain &chain, const Address &caller, const Address &target, bool failure,
                          const Recorder *rec = nullptr)
    {
        Outcome out = Outcome::success();
        Contract *c = chain.find(target);
        if (!c)
            out = Outcome::fail(Failure::UnknownTarget);
        else if (!c->locked || caller != *c->lockedBy)
            out = Outcome::fail(Failure::NotLockOwner);
        else
        {
            if (failure)
                c->s = *c->checkpoint;
            c->locked = false;
            c->lockedBy.reset();
            c->checkpoint.reset();
        }
        Record extra;
        extra.set("failure", failure);
        detail::record_meta(chain, EventKind::Unlock, caller, target, "unlock", {Value{failure}}, out, rec,
                            std::move(extra));
        return out;
    }

    inline Outcome add_executor(Chain &chain, const Address &caller, const Address &target, const Address &e,
                                const Recorder *rec = nullptr)
    {
        Outcome out = Outcome::success();
        Contract *c = chain.find(target);
        if (!c)
            out = Outcome::fail(Failure::UnknownTarget);
        else if (caller != c->owner)
            out = Outcome::fail(Failure::NotOwner);
        else
            c->trustedExecutors.insert(e);
        detail::record_meta(chain, EventKind::Invoke, caller, target, "add_executor", {bytes(e.text())}, out, rec);
        return out;
    }

    /// Moves pending actions into a new immutable block; empty blocks are allowed.
    inline const Block &seal_block(Chain &chain)
    {
        Block b;
        b.index = chain.ledger.size();
        b.actions = std::move(chain.pending);
        chain.pending.clear();
        b.hash = b.compute_hash();
        chain.ledger.push_back(std::move(b));
        return chain.ledger.back();
    }
} // namespace xchain
