#pragma once

#include "ids.hpp"
#include "value.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xchain
{
    enum class EventKind : std::uint8_t
    {
        Invoke,
        Send,
        Recv,
        Seal,
        Lock,
        Unlock,
        Future,
        Adversary,
        Outcome,
        Anomaly,
        End,
    };

    inline constexpr std::array<std::pair<EventKind, std::string_view>, 11> kEventKindNames{{
        {EventKind::Invoke, "Invoke"},
        {EventKind::Send, "Send"},
        {EventKind::Recv, "Recv"},
        {EventKind::Seal, "Seal"},
        {EventKind::Lock, "LockEvt"},
        {EventKind::Unlock, "UnlockEvt"},
        {EventKind::Future, "FutureEvt"},
        {EventKind::Adversary, "AdversaryEvt"},
        {EventKind::Outcome, "OutcomeEvt"},
        {EventKind::Anomaly, "Anomaly"},
        {EventKind::End, "End"},
    }};

    inline std::string_view to_string(EventKind k)
    {
        for (const auto &[kind, name] : kEventKindNames)
            if (kind == k)
                return name;
        return "?";
    }

    inline EventKind parse_event_kind(std::string_view name)
    {
        for (const auto &[kind, n] : kEventKindNames)
            if (n == name)
                return kind;
        throw ParseError("unknown event kind: " + std::string(name));
    }

    /// Ordered key=value fields. Field order is the emission order and is part of
    /// the canonical serialization.
    class Record
    {
    public:
        Record &set(std::string key, std::string value)
        {
            for (auto &[k, v] : fields_)
            {
                if (k == key)
                {
                    v = std::move(value);
                    return *this;
                }
            }
            fields_.emplace_back(std::move(key), std::move(value));
            return *this;
        }
        Record &set(std::string key, std::int64_t v) { return set(std::move(key), std::to_string(v)); }
        Record &set(std::string key, std::uint64_t v) { return set(std::move(key), std::to_string(v)); }
        Record &set(std::string key, int v) { return set(std::move(key), std::to_string(v)); }
        Record &set(std::string key, bool v) { return set(std::move(key), std::string(v ? "1" : "0")); }
        Record &set(std::string key, const char *v) { return set(std::move(key), std::string(v)); }

        [[nodiscard]] const std::string *find(std::string_view key) const noexcept
        {
            for (const auto &[k, v] : fields_)
                if (k == key)
                    return &v;
            return nullptr;
        }

        [[nodiscard]] bool has(std::string_view key) const noexcept { return find(key) != nullptr; }

        [[nodiscard]] const std::string &at(std::string_view key) const
        {
            if (const auto *v = find(key))
                return *v;
            throw ParseError("missing field '" + std::string(key) + "'");
        }

        [[nodiscard]] std::string get_or(std::string_view key, std::string fallback) const
        {
            const auto *v = find(key);
            return v ? *v : fallback;
        }

        [[nodiscard]] std::uint64_t u64(std::string_view key) const { return std::stoull(at(key)); }

        [[nodiscard]] std::optional<std::uint64_t> opt_u64(std::string_view key) const
        {
            const auto *v = find(key);
            if (!v)
                return std::nullopt;
            return std::stoull(*v);
        }

        [[nodiscard]] bool flag(std::string_view key) const
        {
            const auto *v = find(key);
            return v && *v == "1";
        }

        [[nodiscard]] const std::vector<std::pair<std::string, std::string>> &fields() const noexcept { return fields_; }

        bool operator==(const Record &) const = default;

    private:
        std::vector<std::pair<std::string, std::string>> fields_;
    };

    struct TraceEvent
    {
        Tick tick = 0;
        EventKind kind = EventKind::Invoke;
        std::optional<ChainId> chain;
        Record detail;

        bool operator==(const TraceEvent &) const = default;
    };

    /// `tick=<n> kind=<K> chain=<id> key=value ...` on one line.
    inline std::string to_line(const TraceEvent &e)
    {
        std::string out = "tick=" + std::to_string(e.tick) + " kind=" + std::string(to_string(e.kind));
        if (e.chain)
            out += " chain=" + e.chain->name;
        for (const auto &[k, v] : e.detail.fields())
        {
            out.push_back(' ');
            out += k;
            out.push_back('=');
            out += v;
        }
        return out;
    }

    inline TraceEvent parse_line(std::string_view line)
    {
        TraceEvent e;
        bool sawTick = false;
        bool sawKind = false;
        std::size_t pos = 0;
        while (pos < line.size())
        {
            while (pos < line.size() && line[pos] == ' ')
                ++pos;
            if (pos >= line.size())
                break;
            auto end = line.find(' ', pos);
            if (end == std::string_view::npos)
                end = line.size();
            const auto token = line.substr(pos, end - pos);
            pos = end;
            const auto eq = token.find('=');
            if (eq == std::string_view::npos)
                throw ParseError("trace token without '=': " + std::string(token));
            const auto key = token.substr(0, eq);
            const auto val = token.substr(eq + 1);
            if (key == "tick" && !sawTick)
            {
                e.tick = std::stoull(std::string(val));
                sawTick = true;
            }
            else if (key == "kind" && !sawKind)
            {
                e.kind = parse_event_kind(val);
                sawKind = true;
            }
            else if (key == "chain" && !e.chain && e.detail.fields().empty())
            {
                e.chain = ChainId{std::string(val)};
            }
            else
            {
                e.detail.set(std::string(key), std::string(val));
            }
        }
        if (!sawTick || !sawKind)
            throw ParseError("trace line lacks tick/kind: " + std::string(line));
        return e;
    }

    /// Append-only global event log.
    class Trace
    {
    public:
        std::size_t append(TraceEvent e)
        {
            events_.push_back(std::move(e));
            return events_.size() - 1;
        }

        [[nodiscard]] const std::vector<TraceEvent> &events() const noexcept { return events_; }
        [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
        [[nodiscard]] const TraceEvent &operator[](std::size_t i) const { return events_.at(i); }

        [[nodiscard]] std::string serialize() const
        {
            std::string out;
            for (const auto &e : events_)
            {
                out += to_line(e);
                out.push_back('\n');
            }
            return out;
        }

        static Trace parse(std::istream &in)
        {
            Trace t;
            std::string line;
            while (std::getline(in, line))
            {
                if (line.empty() || line[0] == '#')
                    continue;
                t.append(parse_line(line));
            }
            return t;
        }

        static Trace parse(std::string_view text)
        {
            std::istringstream in{std::string(text)};
            return parse(in);
        }

        bool operator==(const Trace &) const = default;

    private:
        std::vector<TraceEvent> events_;
    };
} // namespace xchain
