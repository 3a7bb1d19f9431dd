#pragma once

#include "bridge.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

namespace xchain
{
    enum class FutureKind : std::uint8_t
    {
        Anotify,
        Rcall,
    };

    enum class FutureStatus : std::uint8_t
    {
        Pending,
        Delivered,
        Completed,
    };

    inline std::string_view to_string(FutureKind k) { return k == FutureKind::Anotify ? "anotify" : "rcall"; }

    inline std::string_view to_string(FutureStatus s)
    {
        switch (s)
        {
        case FutureStatus::Pending:
            return "Pending";
        case FutureStatus::Delivered:
            return "Delivered";
        case FutureStatus::Completed:
            return "Completed";
        }
        return "?";
    }

    struct Future
    {
        Seq seq = 0;
        FutureKind kind = FutureKind::Anotify;
        Address issuer;
        FutureStatus status = FutureStatus::Pending;
        /// Completed result for rcall; the notification outcome for anotify.
        Outcome result;

        [[nodiscard]] bool terminal() const noexcept { return status != FutureStatus::Pending; }
    };

    /// One endpoint of an adapter pair. The adapter on chain C facing chain D
    /// lives at C/adapter.D.
    struct Adapter
    {
        Address addr;
        Address peer;
        std::optional<BridgeId> outBridge;
        std::optional<BridgeId> inBridge;
        Seq nextSeq = 1;
        std::map<Seq, Future> futures;

        Future &issue(FutureKind kind, const Address &issuer)
        {
            const Seq s = nextSeq++;
            return futures.emplace(s, Future{s, kind, issuer, FutureStatus::Pending, Outcome::success()})
                .first->second;
        }

        [[nodiscard]] bool all_terminal() const
        {
            for (const auto &[s, f] : futures)
                if (!f.terminal())
                    return false;
            return true;
        }
    };

    inline Address adapter_address(const ChainId &chain, const ChainId &peer)
    {
        return Address{chain, "adapter." + peer.name};
    }
} // namespace xchain
