#pragma once

#include "executor.hpp"
#include "world.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace xchain
{
    struct CommError : std::runtime_error
    {
        enum class Kind : std::uint8_t
        {
            WrongChain,
            UnknownFuture,
            UnknownAdapter,
            NoBridge,
        };

        CommError(Kind k, const std::string &what) : std::runtime_error(what), kind(k) {}

        Kind kind;
    };

    namespace detail
    {
        inline Adapter &adapter_at(World &w, const Address &addr)
        {
            const auto it = w.adapters.find(addr);
            if (it == w.adapters.end())
                throw CommError(CommError::Kind::UnknownAdapter, "no adapter at " + addr.text());
            return it->second;
        }

        inline const BridgeId &out_bridge(const Adapter &a)
        {
            if (!a.outBridge)
                throw CommError(CommError::Kind::NoBridge, "adapter " + a.addr.text() + " has no outgoing bridge");
            return *a.outBridge;
        }

        inline void check_peer_chain(const Adapter &a, const Address &d)
        {
            if (d.chain != a.peer.chain)
                throw CommError(CommError::Kind::WrongChain,
                                d.text() + " is not on " + a.peer.chain.name + ", the peer of " + a.addr.text());
        }

        inline void record_adapter_call(World &w, const Adapter &a, const Address &caller, const std::string &method,
                                        const ValueList &params, const Outcome &out, const Record &tags)
        {
            Chain &c = w.chain(a.addr.chain);
            c.pending.push_back(ActionRecord{caller, a.addr, method, params, out, 0});
            Record r;
            r.set("caller", caller.text());
            r.set("target", a.addr.text());
            r.set("method", method);
            r.set("params", to_text(params));
            put_outcome(r, out);
            r.set("depth", 0);
            w.recorder(tags).emit(EventKind::Invoke, a.addr.chain, std::move(r));
        }

        inline void future_event(World &w, const Adapter &a, const Future &f, const Record &tags = {})
        {
            Record r;
            r.set("adapter", a.addr.text());
            r.set("seq", f.seq);
            r.set("fkind", std::string(to_string(f.kind)));
            r.set("state", std::string(to_string(f.status)));
            if (f.status != FutureStatus::Pending)
                put_outcome(r, f.result);
            w.recorder(tags).emit(EventKind::Future, a.addr.chain, std::move(r));
        }

        inline void anomaly(World &w, const ChainId &chain, const std::string &what, Record r)
        {
            r.set("what", what);
            w.emit(EventKind::Anomaly, chain, std::move(r));
        }
    } // namespace detail

    /// Fire-and-forget notification: one bridge message, no future.
    inline void notify(World &w, const Address &adapter, const Address &caller, const Bytes &x, const Address &d,
                       const Record &tags = {})
    {
        Adapter &a = detail::adapter_at(w, adapter);
        detail::check_peer_chain(a, d);
        const BridgeId &out = detail::out_bridge(a);
        detail::record_adapter_call(w, a, caller, "notify", {Value{x}, bytes(d.text())}, Outcome::success(), tags);
        send(w, out, a.addr, AnotifyPayload{caller, x, 0, d, false}, a.peer, tags);
    }

    /// Notification with acknowledgement; the returned seq names a Pending future.
    inline Seq anotify(World &w, const Address &adapter, const Address &caller, const Bytes &x, const Address &d,
                       const Record &tags = {})
    {
        Adapter &a = detail::adapter_at(w, adapter);
        detail::check_peer_chain(a, d);
        const BridgeId &out = detail::out_bridge(a);
        if (!a.inBridge)
            throw CommError(CommError::Kind::NoBridge, "adapter " + a.addr.text() + " has no return bridge");
        const Future &f = a.issue(FutureKind::Anotify, caller);
        detail::record_adapter_call(w, a, caller, "anotify", {Value{x}, bytes(d.text())},
                                    Outcome::success(static_cast<std::int64_t>(f.seq)), tags);
        detail::future_event(w, a, f, tags);
        send(w, out, a.addr, AnotifyPayload{caller, x, f.seq, d, true}, a.peer, tags);
        return f.seq;
    }

    /// Remote call of target.method(params); the future completes with the result.
    inline Seq rcall(World &w, const Address &adapter, const Address &caller, const Address &target,
                     const std::string &method, const ValueList &params, const Record &tags = {})
    {
        Adapter &a = detail::adapter_at(w, adapter);
        detail::check_peer_chain(a, target);
        const BridgeId &out = detail::out_bridge(a);
        if (!a.inBridge)
            throw CommError(CommError::Kind::NoBridge, "adapter " + a.addr.text() + " has no return bridge");
        const Future &f = a.issue(FutureKind::Rcall, caller);
        ValueList callParams{bytes(target.text()), bytes(method)};
        callParams.insert(callParams.end(), params.begin(), params.end());
        detail::record_adapter_call(w, a, caller, "rcall", callParams,
                                    Outcome::success(static_cast<std::int64_t>(f.seq)), tags);
        detail::future_event(w, a, f, tags);
        send(w, out, a.addr, RcallPayload{target, method, params, f.seq, caller}, a.peer, tags);
        return f.seq;
    }

    inline Future query(const World &w, const Address &adapter, Seq seq)
    {
        const auto it = w.adapters.find(adapter);
        if (it == w.adapters.end())
            throw CommError(CommError::Kind::UnknownAdapter, "no adapter at " + adapter.text());
        const auto f = it->second.futures.find(seq);
        if (f == it->second.futures.end())
            throw CommError(CommError::Kind::UnknownFuture,
                            "future " + std::to_string(seq) + " was not issued by " + adapter.text());
        return f->second;
    }

    /// Bridge delivery into an adapter: dispatch on the payload variant.
    inline void adapter_recv(World &w, const BridgeMessage &m)
    {
        const auto it = w.adapters.find(m.dest);
        if (it == w.adapters.end())
        {
            Record r;
            r.set("msg", m.msgId);
            r.set("dest", m.dest.text());
            detail::anomaly(w, m.dest.chain, "no-adapter", std::move(r));
            return;
        }
        Adapter &a = it->second;
        const ChainId chain = a.addr.chain;

        auto reply = [&](Seq seq, const Outcome &out) {
            if (!a.outBridge)
            {
                Record r;
                r.set("msg", m.msgId);
                r.set("adapter", a.addr.text());
                detail::anomaly(w, chain, "no-return-bridge", std::move(r));
                return;
            }
            send(w, *a.outBridge, a.addr, AckPayload{seq, out}, a.peer);
        };

        if (const auto *n = std::get_if<AnotifyPayload>(&m.payload))
        {
            const Outcome out =
                dispatch_invoke(w, chain, a.addr, std::nullopt, n->finalDest, "notification",
                                {bytes(n->origin.text()), bytes(n->origin.chain.name), Value{n->data}}, w.recorder());
            if (n->ack)
                reply(n->seq, out);
            return;
        }
        if (const auto *r = std::get_if<RcallPayload>(&m.payload))
        {
            const Outcome out = dispatch_invoke(w, chain, a.addr, r->origin, r->target, r->method, r->params, w.recorder());
            reply(r->seq, out);
            return;
        }
        const auto &ack = std::get<AckPayload>(m.payload);
        const auto fit = a.futures.find(ack.seq);
        if (fit == a.futures.end() || fit->second.terminal())
        {
            Record r;
            r.set("msg", m.msgId);
            r.set("adapter", a.addr.text());
            r.set("seq", ack.seq);
            detail::anomaly(w, chain, fit == a.futures.end() ? "unknown-seq" : "future-terminal", std::move(r));
            return;
        }
        Future &f = fit->second;
        f.status = f.kind == FutureKind::Anotify ? FutureStatus::Delivered : FutureStatus::Completed;
        f.result = ack.result;
        detail::future_event(w, a, f);
        w.resolved.push_back(FutureRef{a.addr, f.seq});
    }
} // namespace xchain
