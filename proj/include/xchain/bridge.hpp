#pragma once

#include "chain.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xchain
{
    struct AnotifyPayload
    {
        Address origin;
        Bytes data;
        Seq seq = 0;
        Address finalDest;
        bool ack = true;

        bool operator==(const AnotifyPayload &) const = default;
    };

    struct RcallPayload
    {
        Address target;
        std::string method;
        ValueList params;
        Seq seq = 0;
        Address origin;

        bool operator==(const RcallPayload &) const = default;
    };

    struct AckPayload
    {
        Seq seq = 0;
        Outcome result;

        bool operator==(const AckPayload &) const = default;
    };

    using Payload = std::variant<AnotifyPayload, RcallPayload, AckPayload>;

    /// Canonical single-token encoding, '|'-separated. Used in the trace and in
    /// the on-chain send record, so payload identity is string identity.
    inline std::string encode_payload(const Payload &p)
    {
        struct Visitor
        {
            std::string operator()(const AnotifyPayload &a) const
            {
                return "anotify|" + a.origin.text() + "|" + to_text(Value{a.data}) + "|" + std::to_string(a.seq) + "|" +
                       a.finalDest.text() + "|" + (a.ack ? "1" : "0");
            }
            std::string operator()(const RcallPayload &r) const
            {
                return "rcall|" + r.target.text() + "|" + escape(r.method) + "|" + to_text(r.params) + "|" +
                       std::to_string(r.seq) + "|" + r.origin.text();
            }
            std::string operator()(const AckPayload &a) const
            {
                std::string out = "ack|" + std::to_string(a.seq) + "|" + (a.result.ok() ? "1" : "0") + "|";
                out += a.result.ok() ? to_text(a.result.result) : std::string(to_string(*a.result.failure));
                return out;
            }
        };
        return std::visit(Visitor{}, p);
    }

    inline Payload decode_payload(std::string_view text)
    {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (true)
        {
            const auto bar = text.find('|', start);
            parts.push_back(text.substr(start, bar == std::string_view::npos ? text.npos : bar - start));
            if (bar == std::string_view::npos)
                break;
            start = bar + 1;
        }
        auto bad = [&]() { return ParseError("bad payload: " + std::string(text)); };
        auto seq_of = [&](std::string_view s) {
            const Value v = parse_value(s);
            const auto *i = as_int(v);
            if (!i || *i < 0)
                throw bad();
            return static_cast<Seq>(*i);
        };
        if (parts[0] == "anotify" && parts.size() == 6)
        {
            const Value data = parse_value(parts[2]);
            const auto *b = as_bytes(data);
            if (!b || (parts[5] != "0" && parts[5] != "1"))
                throw bad();
            return AnotifyPayload{parse_address(parts[1]), *b, seq_of(parts[3]), parse_address(parts[4]),
                                  parts[5] == "1"};
        }
        if (parts[0] == "rcall" && parts.size() == 6)
            return RcallPayload{parse_address(parts[1]), unescape(parts[2]), parse_value_list(parts[3]),
                                seq_of(parts[4]), parse_address(parts[5])};
        if (parts[0] == "ack" && parts.size() == 4)
        {
            AckPayload a;
            a.seq = seq_of(parts[1]);
            if (parts[2] == "1")
                a.result = Outcome::success(parse_value(parts[3]));
            else if (parts[2] == "0")
            {
                const auto f = parse_failure(parts[3]);
                if (!f)
                    throw bad();
                a.result = Outcome::fail(*f);
            }
            else
                throw bad();
            return a;
        }
        throw bad();
    }

    struct BridgeMessage
    {
        MsgId msgId = 0;
        BridgeId bridge;
        Address sender;
        Address dest;
        Payload payload;
        std::uint64_t originBlock = 0;
    };

    struct BridgePolicy
    {
        enum class Mode : std::uint8_t
        {
            Honest,
            Adversarial,
        };

        Mode mode = Mode::Honest;
        std::uint64_t maxDelay = 3;
        bool allowReorder = true;
    };

    struct DestChainMismatch : ValidationError
    {
        using ValidationError::ValidationError;
    };

    struct NotAdversarialBridge : ValidationError
    {
        using ValidationError::ValidationError;
    };

    struct InFlight
    {
        BridgeMessage msg;
        Tick due = 0;
        std::uint64_t order = 0;
    };

    /// Queue of sealed, undelivered messages on one unidirectional bridge.
    struct BridgeState
    {
        BridgeId id;
        BridgePolicy policy;
        std::vector<InFlight> queue;
        Tick lastDue = 0;
        std::uint64_t nextOrder = 0;

        /// Delay is uniform in [1, maxDelay]; without reordering due times are
        /// clamped to be non-decreasing, which keeps delivery FIFO.
        void enqueue(BridgeMessage m, Tick now, Rng &rng)
        {
            Tick due = now + rng.between(1, std::max<std::uint64_t>(policy.maxDelay, 1));
            if (!policy.allowReorder)
                due = std::max(due, lastDue);
            lastDue = std::max(lastDue, due);
            queue.push_back(InFlight{std::move(m), due, nextOrder++});
        }

        /// Removes and returns messages due at `now`. FIFO unless reordering is
        /// allowed, in which case the due batch is permuted.
        std::vector<BridgeMessage> take_due(Tick now, Rng &rng)
        {
            std::vector<InFlight> due;
            std::vector<InFlight> rest;
            for (auto &f : queue)
                (f.due <= now ? due : rest).push_back(std::move(f));
            queue = std::move(rest);
            std::sort(due.begin(), due.end(), [](const InFlight &a, const InFlight &b) {
                return a.due != b.due ? a.due < b.due : a.order < b.order;
            });
            std::vector<BridgeMessage> out;
            out.reserve(due.size());
            for (auto &f : due)
                out.push_back(std::move(f.msg));
            if (policy.allowReorder)
                rng.shuffle(std::span<BridgeMessage>(out));
            return out;
        }

        [[nodiscard]] InFlight *find(MsgId id)
        {
            for (auto &f : queue)
                if (f.msg.msgId == id)
                    return &f;
            return nullptr;
        }

        bool drop(MsgId id)
        {
            const auto it =
                std::find_if(queue.begin(), queue.end(), [id](const InFlight &f) { return f.msg.msgId == id; });
            if (it == queue.end())
                return false;
            queue.erase(it);
            return true;
        }
    };
} // namespace xchain
