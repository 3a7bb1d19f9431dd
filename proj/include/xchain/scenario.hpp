#pragma once

#include "methods.hpp"
#include "protocol.hpp"
#include "world.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace xchain
{
    struct ChainConfig
    {
        ChainId id;
        std::uint64_t sealEvery = 1;
        std::vector<ContractConfig> contracts;
    };

    struct BridgeConfig
    {
        BridgeId id;
        BridgePolicy policy;
    };

    /// Scripted, non-adversarial activity: user calls and adapter operations.
    struct ScriptedCall
    {
        enum class Kind : std::uint8_t
        {
            Call,
            Notify,
            Anotify,
            Rcall,
            AddExecutor,
        };

        Tick tick = 0;
        Kind kind = Kind::Call;
        Address caller;
        Address target;
        std::string method;
        ValueList params;
        Address adapter;
        Bytes data;
        Address executor;
    };

    struct AdversaryAction
    {
        enum class Kind : std::uint8_t
        {
            Call,
            Lock,
            Unlock,
            Forge,
            Drop,
            Corrupt,
        };

        Tick tick = 0;
        Kind kind = Kind::Call;
        Address caller;
        Address target;
        std::string method;
        ValueList params;
        bool failure = false;
        BridgeId bridge;
        Address dest;
        std::optional<Address> sender;
        std::optional<Payload> payload;
        std::uint64_t k = 0;
        MsgId msg = 0;
    };

    /// Randomly timed adversary calls, enabled per run.
    struct Interference
    {
        std::uint64_t count = 0;
        Tick window = 10;
        std::vector<AdversaryAction> templates;
    };

    struct Scenario
    {
        enum class Stop : std::uint8_t
        {
            Quiesce,
            MaxTicks,
        };

        std::string name;
        std::uint64_t seed = 0;
        Tick maxTicks = 500;
        Stop stop = Stop::Quiesce;
        LockOrderMode lockOrder = LockOrderMode::Canonical;
        std::vector<ChainConfig> chains;
        std::vector<BridgeConfig> bridges;
        std::vector<CrossChainTransaction> txns;
        std::vector<ScriptedCall> calls;
        std::vector<AdversaryAction> adversary;
        Interference interference;
        std::optional<std::set<Address>> registeredExecutors;

        [[nodiscard]] std::uint64_t max_delay() const
        {
            std::uint64_t d = 0;
            for (const auto &b : bridges)
                d = std::max(d, b.policy.maxDelay);
            return d;
        }

        [[nodiscard]] Tick last_scheduled() const
        {
            Tick t = 0;
            for (const auto &x : txns)
                t = std::max(t, x.start);
            for (const auto &c : calls)
                t = std::max(t, c.tick);
            for (const auto &a : adversary)
                t = std::max(t, a.tick);
            return t;
        }
    };

    /// Builds the initial world. Throws ValidationError on dangling references.
    inline World build_world(const Scenario &sc, std::uint64_t seed)
    {
        World w;
        w.rng = Rng(seed);
        for (const auto &cc : sc.chains)
        {
            Chain &chain = add_chain(w, cc.id);
            for (const auto &k : cc.contracts)
            {
                Contract c = make_contract(cc.id, chain.executor, k);
                if (chain.contracts.contains(c.addr))
                    throw ValidationError("duplicate contract " + c.addr.text());
                chain.contracts.emplace(c.addr, std::move(c));
            }
        }
        for (const auto &b : sc.bridges)
            add_bridge(w, b.id, b.policy);
        if (sc.registeredExecutors)
            w.registeredExecutors = *sc.registeredExecutors;

        auto needContract = [&](const Address &a, const std::string &what) {
            if (!w.chain(a.chain).find(a))
                throw ValidationError(what + " names unknown contract " + a.text());
        };
        auto needAdapter = [&](const Address &a, const std::string &what) {
            if (!w.adapters.contains(a))
                throw ValidationError(what + " names unknown adapter " + a.text());
        };
        auto needBridge = [&](const BridgeId &b, const std::string &what) {
            const auto it = w.bridges.find(b);
            if (it == w.bridges.end())
                throw ValidationError(what + " names unknown bridge " + b.text());
            if (it->second.policy.mode != BridgePolicy::Mode::Adversarial)
                throw NotAdversarialBridge(what + " targets honest bridge " + b.text());
        };

        std::set<TxId> ids;
        for (const auto &t : sc.txns)
        {
            if (!ids.insert(t.txId).second)
                throw ValidationError("duplicate transaction id " + std::to_string(t.txId));
            validate(t, w.chains);
        }
        for (const auto &c : sc.calls)
        {
            w.chain(c.caller.chain);
            switch (c.kind)
            {
            case ScriptedCall::Kind::Call:
            case ScriptedCall::Kind::AddExecutor:
                needContract(c.target, "call at tick " + std::to_string(c.tick));
                break;
            case ScriptedCall::Kind::Notify:
            case ScriptedCall::Kind::Anotify:
            case ScriptedCall::Kind::Rcall:
                needAdapter(c.adapter, "call at tick " + std::to_string(c.tick));
                if (c.adapter.chain != c.caller.chain)
                    throw ValidationError("call at tick " + std::to_string(c.tick) + ": adapter " + c.adapter.text() +
                                          " is not on the caller's chain");
                if (c.target.chain != w.adapters.at(c.adapter).peer.chain)
                    throw ValidationError("call at tick " + std::to_string(c.tick) + ": " + c.target.text() +
                                          " is not on the peer chain of " + c.adapter.text());
                break;
            }
        }
        std::vector<const AdversaryAction *> adv;
        for (const auto &a : sc.adversary)
            adv.push_back(&a);
        for (const auto &a : sc.interference.templates)
            adv.push_back(&a);
        for (const auto *a : adv)
        {
            const std::string what = "adversary action at tick " + std::to_string(a->tick);
            switch (a->kind)
            {
            case AdversaryAction::Kind::Call:
            case AdversaryAction::Kind::Lock:
            case AdversaryAction::Kind::Unlock:
                if (a->kind == AdversaryAction::Kind::Call && w.executors.contains(a->caller))
                    throw ValidationError(what + " impersonates executor " + a->caller.text());
                w.chain(a->target.chain);
                break;
            case AdversaryAction::Kind::Forge:
                needBridge(a->bridge, what);
                if (a->dest.chain != a->bridge.dst)
                    throw DestChainMismatch(what + ": " + a->dest.text() + " is not on " + a->bridge.dst.name);
                break;
            case AdversaryAction::Kind::Drop:
            case AdversaryAction::Kind::Corrupt:
                needBridge(a->bridge, what);
                break;
            }
        }
        return w;
    }

    namespace detail
    {
        class YamlReader
        {
        public:
            explicit YamlReader(std::string source) : source_(std::move(source)) {}

            [[noreturn]] void fail(const YAML::Node &n, const std::string &msg) const
            {
                const auto m = n.IsDefined() ? n.Mark() : YAML::Mark::null_mark();
                if (m.line >= 0)
                    throw ValidationError(source_ + ":" + std::to_string(m.line + 1) + ": " + msg);
                throw ValidationError(source_ + ": " + msg);
            }

            std::string str(const YAML::Node &n, const char *key) const
            {
                const auto v = n[key];
                if (!v || !v.IsScalar())
                    fail(n, std::string("missing or non-scalar '") + key + "'");
                return v.Scalar();
            }

            std::optional<std::string> opt_str(const YAML::Node &n, const char *key) const
            {
                const auto v = n[key];
                if (!v)
                    return std::nullopt;
                if (!v.IsScalar())
                    fail(v, std::string("'") + key + "' must be a scalar");
                return v.Scalar();
            }

            std::uint64_t u64(const YAML::Node &v) const
            {
                if (!v.IsScalar())
                    fail(v, "expected a non-negative integer");
                const auto &s = v.Scalar();
                if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
                    fail(v, "expected a non-negative integer, got '" + s + "'");
                return std::stoull(s);
            }

            std::uint64_t u64(const YAML::Node &n, const char *key, std::uint64_t fallback) const
            {
                const auto v = n[key];
                return v ? u64(v) : fallback;
            }

            bool boolean(const YAML::Node &n, const char *key, bool fallback) const
            {
                const auto v = n[key];
                if (!v)
                    return fallback;
                if (v.IsScalar() && (v.Scalar() == "true" || v.Scalar() == "false"))
                    return v.Scalar() == "true";
                fail(v, std::string("'") + key + "' must be true or false");
            }

            void check_name(const YAML::Node &n, const std::string &name, const char *what) const
            {
                if (name.empty() || name.find('/') != std::string::npos ||
                    !std::all_of(name.begin(), name.end(), [](char c) { return xchain::detail::plain_char(c); }))
                    fail(n, std::string("bad ") + what + " name '" + name + "'");
            }

            Address address(const YAML::Node &v, const std::optional<ChainId> &defaultChain = std::nullopt) const
            {
                if (!v || !v.IsScalar())
                    fail(v, "expected an address");
                const auto &s = v.Scalar();
                if (s.find('/') == std::string::npos && defaultChain)
                {
                    check_name(v, s, "contract");
                    return Address{*defaultChain, s};
                }
                try
                {
                    const Address a = parse_address(s);
                    check_name(v, a.chain.name, "chain");
                    check_name(v, a.local, "contract");
                    return a;
                }
                catch (const ParseError &e)
                {
                    fail(v, e.what());
                }
            }

            Address address(const YAML::Node &n, const char *key,
                            const std::optional<ChainId> &defaultChain = std::nullopt) const
            {
                const auto v = n[key];
                if (!v)
                    fail(n, std::string("missing '") + key + "'");
                return address(v, defaultChain);
            }

            /// Quoted scalars are bytes; plain scalars are integers, booleans,
            /// () or bytes.
            Value value(const YAML::Node &v) const
            {
                if (!v.IsScalar())
                    fail(v, "expected a scalar value");
                const auto &s = v.Scalar();
                if (v.Tag() == "!")
                    return Bytes{s};
                if (s == "true")
                    return true;
                if (s == "false")
                    return false;
                if (s == "()")
                    return Unit{};
                const bool numeric = !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) ||
                                                    (s[0] == '-' && s.size() > 1)) &&
                                     std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
                if (numeric)
                    return static_cast<std::int64_t>(std::stoll(s));
                return Bytes{s};
            }

            ValueList values(const YAML::Node &n, const char *key) const
            {
                ValueList out;
                const auto v = n[key];
                if (!v)
                    return out;
                if (!v.IsSequence())
                    fail(v, std::string("'") + key + "' must be a list");
                for (const auto &x : v)
                    out.push_back(value(x));
                return out;
            }

            BridgeId bridge(const YAML::Node &n, const char *key) const
            {
                const auto s = str(n, key);
                try
                {
                    return parse_bridge_id(s);
                }
                catch (const std::exception &e)
                {
                    fail(n[key], e.what());
                }
            }

            Payload payload(const YAML::Node &n, const char *key) const
            {
                const auto s = str(n, key);
                try
                {
                    return decode_payload(s);
                }
                catch (const std::exception &e)
                {
                    fail(n[key], e.what());
                }
            }

            ContractConfig contract(const YAML::Node &n, const ChainId &chain) const
            {
                ContractConfig c;
                c.local = str(n, "id");
                check_name(n, c.local, "contract");
                c.type = str(n, "type");
                if (std::find(builtin_types().begin(), builtin_types().end(), c.type) == builtin_types().end())
                    fail(n, "unknown contract type '" + c.type + "'");
                if (n["owner"])
                    c.owner = address(n, "owner", chain);
                if (const auto bal = n["balances"])
                {
                    if (!bal.IsMap())
                        fail(bal, "'balances' must be a map");
                    for (const auto &kv : bal)
                    {
                        const auto acct = kv.first.Scalar();
                        check_name(kv.first, acct, "account");
                        const Value amount = value(kv.second);
                        if (!as_int(amount))
                            fail(kv.second, "balance must be an integer");
                        c.vars.insert_or_assign(builtin::account_key(acct), amount);
                    }
                }
                if (const auto vars = n["vars"])
                {
                    if (!vars.IsMap())
                        fail(vars, "'vars' must be a map");
                    for (const auto &kv : vars)
                        c.vars.insert_or_assign(kv.first.Scalar(), value(kv.second));
                }
                if (n["target"])
                    c.target = address(n, "target", chain);
                if (const auto t = n["trusted"])
                {
                    if (!t.IsSequence())
                        fail(t, "'trusted' must be a list");
                    for (const auto &x : t)
                        c.trusted.insert(address(x, chain));
                }
                return c;
            }

            CrossChainTransaction txn(const YAML::Node &n) const
            {
                CrossChainTransaction t;
                t.txId = u64(n["id"] ? n["id"] : n);
                t.proposer = ChainId{str(n, "proposer")};
                t.originator = n["originator"] ? address(n, "originator", t.proposer)
                                               : Address{t.proposer, "originator"};
                t.start = u64(n, "start", 0);
                if (const auto lo = n["lock_order"])
                {
                    if (!lo.IsSequence())
                        fail(lo, "'lock_order' must be a list of chains");
                    for (const auto &c : lo)
                        t.lockOrder.push_back(ChainId{c.Scalar()});
                }
                const auto acts = n["actions"];
                if (!acts || !acts.IsSequence())
                    fail(n, "transaction needs an 'actions' list");
                for (const auto &a : acts)
                {
                    IndexedAction ia;
                    ia.id = static_cast<ActionId>(u64(a["id"] ? a["id"] : a));
                    ia.target = address(a, "target");
                    ia.chain = ia.target.chain;
                    ia.method = str(a, "method");
                    ia.params = values(a, "params");
                    t.actions.push_back(std::move(ia));
                }
                if (const auto prec = n["prec"])
                {
                    if (!prec.IsSequence())
                        fail(prec, "'prec' must be a list of [before, after] pairs");
                    for (const auto &p : prec)
                    {
                        if (!p.IsSequence() || p.size() != 2)
                            fail(p, "order pair must be [before, after]");
                        t.prec.emplace_back(static_cast<ActionId>(u64(p[0])), static_cast<ActionId>(u64(p[1])));
                    }
                }
                return t;
            }

            ScriptedCall call(const YAML::Node &n) const
            {
                ScriptedCall c;
                c.tick = u64(n, "tick", 0);
                const auto kind = opt_str(n, "kind").value_or("call");
                c.caller = address(n, "caller");
                if (kind == "call")
                {
                    c.kind = ScriptedCall::Kind::Call;
                    c.target = address(n, "target");
                    c.method = str(n, "method");
                    c.params = values(n, "params");
                }
                else if (kind == "notify" || kind == "anotify")
                {
                    c.kind = kind == "notify" ? ScriptedCall::Kind::Notify : ScriptedCall::Kind::Anotify;
                    c.adapter = address(n, "adapter");
                    c.target = address(n, "dest");
                    c.data = Bytes{str(n, "data")};
                }
                else if (kind == "rcall")
                {
                    c.kind = ScriptedCall::Kind::Rcall;
                    c.adapter = address(n, "adapter");
                    c.target = address(n, "target");
                    c.method = str(n, "method");
                    c.params = values(n, "params");
                }
                else if (kind == "add_executor")
                {
                    c.kind = ScriptedCall::Kind::AddExecutor;
                    c.target = address(n, "target");
                    c.executor = address(n, "executor");
                }
                else
                    fail(n, "unknown call kind '" + kind + "'");
                return c;
            }

            AdversaryAction adversary(const YAML::Node &n) const
            {
                AdversaryAction a;
                a.tick = u64(n, "tick", 0);
                const auto kind = str(n, "kind");
                if (kind == "call")
                {
                    a.kind = AdversaryAction::Kind::Call;
                    a.caller = address(n, "caller");
                    a.target = address(n, "target");
                    a.method = str(n, "method");
                    a.params = values(n, "params");
                }
                else if (kind == "lock" || kind == "unlock")
                {
                    a.kind = kind == "lock" ? AdversaryAction::Kind::Lock : AdversaryAction::Kind::Unlock;
                    a.caller = address(n, "caller");
                    a.target = address(n, "target");
                    a.failure = boolean(n, "failure", false);
                    if (a.caller.chain != a.target.chain)
                        fail(n, "lock/unlock caller and target must share a chain");
                }
                else if (kind == "forge")
                {
                    a.kind = AdversaryAction::Kind::Forge;
                    a.bridge = bridge(n, "bridge");
                    a.dest = n["dest"] ? address(n, "dest") : adapter_address(a.bridge.dst, a.bridge.src);
                    a.sender = n["sender"] ? address(n, "sender") : adapter_address(a.bridge.src, a.bridge.dst);
                    a.payload = payload(n, "payload");
                    a.k = u64(n, "k", 0);
                }
                else if (kind == "drop" || kind == "corrupt")
                {
                    a.kind = kind == "drop" ? AdversaryAction::Kind::Drop : AdversaryAction::Kind::Corrupt;
                    a.bridge = bridge(n, "bridge");
                    a.msg = u64(n["msg"] ? n["msg"] : n);
                    if (a.kind == AdversaryAction::Kind::Corrupt)
                        a.payload = payload(n, "payload");
                }
                else
                    fail(n, "unknown adversary kind '" + kind + "'");
                return a;
            }

            Scenario scenario(const YAML::Node &root) const
            {
                if (!root.IsMap())
                    fail(root, "scenario must be a map");
                Scenario sc;
                sc.name = opt_str(root, "name").value_or("scenario");
                sc.seed = u64(root, "seed", 0);
                sc.maxTicks = u64(root, "max_ticks", sc.maxTicks);
                const auto stop = opt_str(root, "stop").value_or("quiesce");
                if (stop == "quiesce")
                    sc.stop = Scenario::Stop::Quiesce;
                else if (stop == "max_ticks")
                    sc.stop = Scenario::Stop::MaxTicks;
                else
                    fail(root["stop"], "stop must be quiesce or max_ticks");
                const auto order = opt_str(root, "lock_order").value_or("canonical");
                if (order == "canonical")
                    sc.lockOrder = LockOrderMode::Canonical;
                else if (order == "declared")
                    sc.lockOrder = LockOrderMode::Declared;
                else
                    fail(root["lock_order"], "lock_order must be canonical or declared");
                const std::uint64_t defaultDelay = u64(root, "max_delay", 3);

                const auto chains = root["chains"];
                if (!chains || !chains.IsSequence() || chains.size() == 0)
                    fail(root, "scenario needs a non-empty 'chains' list");
                for (const auto &c : chains)
                {
                    ChainConfig cc;
                    cc.id = ChainId{str(c, "id")};
                    check_name(c, cc.id.name, "chain");
                    cc.sealEvery = u64(c, "seal_every", 1);
                    if (cc.sealEvery == 0)
                        fail(c, "seal_every must be positive");
                    if (const auto ks = c["contracts"])
                    {
                        if (!ks.IsSequence())
                            fail(ks, "'contracts' must be a list");
                        for (const auto &k : ks)
                            cc.contracts.push_back(contract(k, cc.id));
                    }
                    sc.chains.push_back(std::move(cc));
                }

                if (const auto bridges = root["bridges"])
                {
                    if (!bridges.IsSequence())
                        fail(bridges, "'bridges' must be a list");
                    for (const auto &b : bridges)
                    {
                        BridgePolicy p;
                        const auto mode = opt_str(b, "mode").value_or("honest");
                        if (mode == "honest")
                            p.mode = BridgePolicy::Mode::Honest;
                        else if (mode == "adversarial")
                            p.mode = BridgePolicy::Mode::Adversarial;
                        else
                            fail(b, "mode must be honest or adversarial");
                        p.maxDelay = u64(b, "max_delay", defaultDelay);
                        if (p.maxDelay == 0)
                            fail(b, "max_delay must be positive");
                        p.allowReorder = boolean(b, "reorder", true);
                        const auto tag = static_cast<std::uint32_t>(u64(b, "tag", 0));
                        if (const auto link = b["link"])
                        {
                            if (!link.IsSequence() || link.size() != 2)
                                fail(link, "'link' must name two chains");
                            const ChainId x{link[0].Scalar()};
                            const ChainId y{link[1].Scalar()};
                            sc.bridges.push_back(BridgeConfig{BridgeId{x, y, tag}, p});
                            sc.bridges.push_back(BridgeConfig{BridgeId{y, x, tag}, p});
                        }
                        else
                            sc.bridges.push_back(
                                BridgeConfig{BridgeId{ChainId{str(b, "from")}, ChainId{str(b, "to")}, tag}, p});
                    }
                }

                if (const auto txs = root["transactions"])
                {
                    if (!txs.IsSequence())
                        fail(txs, "'transactions' must be a list");
                    for (const auto &t : txs)
                        sc.txns.push_back(txn(t));
                }
                if (const auto calls = root["calls"])
                {
                    if (!calls.IsSequence())
                        fail(calls, "'calls' must be a list");
                    for (const auto &c : calls)
                        sc.calls.push_back(call(c));
                }
                if (const auto adv = root["adversary"])
                {
                    if (!adv.IsSequence())
                        fail(adv, "'adversary' must be a list");
                    for (const auto &a : adv)
                        sc.adversary.push_back(adversary(a));
                }
                if (const auto inter = root["interference"])
                {
                    sc.interference.count = u64(inter, "count", 0);
                    sc.interference.window = u64(inter, "window", 10);
                    if (const auto calls = inter["calls"])
                    {
                        if (!calls.IsSequence())
                            fail(calls, "interference 'calls' must be a list");
                        for (const auto &c : calls)
                        {
                            auto a = adversary(c);
                            if (a.kind != AdversaryAction::Kind::Call && a.kind != AdversaryAction::Kind::Lock &&
                                a.kind != AdversaryAction::Kind::Unlock)
                                fail(c, "interference supports call, lock and unlock only");
                            sc.interference.templates.push_back(std::move(a));
                        }
                    }
                }
                if (const auto ex = root["executors"])
                {
                    if (!ex.IsSequence())
                        fail(ex, "'executors' must be a list of addresses");
                    std::set<Address> set;
                    for (const auto &e : ex)
                        set.insert(address(e));
                    sc.registeredExecutors = std::move(set);
                }
                return sc;
            }

        private:
            std::string source_;
        };
    } // namespace detail

    inline Scenario parse_scenario(const std::string &text, const std::string &source = "<scenario>")
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::Exception &e)
        {
            throw ParseError(source + ": " + e.what());
        }
        Scenario sc;
        try
        {
            sc = detail::YamlReader(source).scenario(root);
        }
        catch (const YAML::Exception &e)
        {
            throw ValidationError(source + ": " + e.what());
        }
        try
        {
            build_world(sc, sc.seed);
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(source + ": " + e.what());
        }
        return sc;
    }

    inline Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ParseError("cannot open scenario file " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_scenario(ss.str(), path.string());
    }
} // namespace xchain
