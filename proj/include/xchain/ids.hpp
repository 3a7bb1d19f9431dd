#pragma once

#include "value.hpp"

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace xchain
{
    using Tick = std::uint64_t;
    using TxId = std::uint64_t;
    using MsgId = std::uint64_t;
    using Seq = std::uint64_t;

    /// Chain name. The lexicographic order of names is the canonical chain order
    /// used for lock acquisition.
    struct ChainId
    {
        std::string name;

        auto operator<=>(const ChainId &) const = default;
    };

    struct Address
    {
        ChainId chain;
        std::string local;

        auto operator<=>(const Address &) const = default;

        [[nodiscard]] std::string text() const { return chain.name + "/" + local; }
    };

    inline std::ostream &operator<<(std::ostream &os, const ChainId &c) { return os << c.name; }
    inline std::ostream &operator<<(std::ostream &os, const Address &a) { return os << a.text(); }

    inline Address parse_address(std::string_view text)
    {
        const auto slash = text.find('/');
        if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size())
            throw ParseError("bad address: " + std::string(text));
        return Address{ChainId{std::string(text.substr(0, slash))}, std::string(text.substr(slash + 1))};
    }

    /// Unidirectional bridge; a bidirectional link is two BridgeIds.
    struct BridgeId
    {
        ChainId src;
        ChainId dst;
        std::uint32_t tag = 0;

        auto operator<=>(const BridgeId &) const = default;

        [[nodiscard]] std::string text() const
        {
            return src.name + "->" + dst.name + (tag ? "#" + std::to_string(tag) : std::string());
        }
    };

    inline std::ostream &operator<<(std::ostream &os, const BridgeId &b) { return os << b.text(); }

    inline BridgeId parse_bridge_id(std::string_view text)
    {
        const auto arrow = text.find("->");
        if (arrow == std::string_view::npos)
            throw ParseError("bad bridge id: " + std::string(text));
        BridgeId id;
        id.src.name = std::string(text.substr(0, arrow));
        auto rest = text.substr(arrow + 2);
        const auto hash = rest.find('#');
        if (hash != std::string_view::npos)
        {
            id.tag = static_cast<std::uint32_t>(std::stoul(std::string(rest.substr(hash + 1))));
            rest = rest.substr(0, hash);
        }
        id.dst.name = std::string(rest);
        if (id.src.name.empty() || id.dst.name.empty())
            throw ParseError("bad bridge id: " + std::string(text));
        return id;
    }
} // namespace xchain
