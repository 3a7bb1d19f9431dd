#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace xchain
{
    /// Seeded generator with platform-independent draws. The engine output of
    /// mt19937_64 is fixed by the standard; the distribution helpers here are
    /// written out so traces stay bit-exact across standard libraries.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

        std::uint64_t next() { return engine_(); }

        /// Uniform in [0, bound). bound must be > 0.
        std::uint64_t below(std::uint64_t bound)
        {
            const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
            std::uint64_t x = 0;
            do
            {
                x = engine_();
            } while (x >= limit);
            return x % bound;
        }

        /// Uniform in [lo, hi].
        std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

        template <typename T>
        void shuffle(std::span<T> items)
        {
            for (std::size_t i = items.size(); i > 1; --i)
            {
                const auto j = static_cast<std::size_t>(below(i));
                std::swap(items[i - 1], items[j]);
            }
        }

    private:
        std::mt19937_64 engine_;
    };
} // namespace xchain
