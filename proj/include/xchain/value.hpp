#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xchain
{
    /// Opaque byte string. Held in a std::string; no encoding is implied.
    struct Bytes
    {
        std::string data;

        auto operator<=>(const Bytes &) const = default;
    };

    /// Unit is the result of methods that produce nothing.
    struct Unit
    {
        auto operator<=>(const Unit &) const = default;
    };

    using Value = std::variant<Unit, std::int64_t, bool, Bytes>;
    using ValueList = std::vector<Value>;

    inline Value bytes(std::string_view s) { return Bytes{std::string(s)}; }

    struct ParseError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    namespace detail
    {
        inline bool plain_char(char c) noexcept
        {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                   c == '.' || c == '-' || c == '/' || c == '@';
        }

        inline int hex_digit(char c)
        {
            if (c >= '0' && c <= '9')
                return c - '0';
            if (c >= 'a' && c <= 'f')
                return c - 'a' + 10;
            if (c >= 'A' && c <= 'F')
                return c - 'A' + 10;
            throw ParseError("bad hex digit in escaped bytes");
        }
    } // namespace detail

    /// Percent-escapes everything outside [A-Za-z0-9_.-/@], so the result is safe
    /// inside trace records, value lists and payload encodings.
    inline std::string escape(std::string_view raw)
    {
        static constexpr char hex[] = "0123456789ABCDEF";
        std::string out;
        out.reserve(raw.size());
        for (char c : raw)
        {
            if (detail::plain_char(c))
            {
                out.push_back(c);
            }
            else
            {
                const auto u = static_cast<unsigned char>(c);
                out.push_back('%');
                out.push_back(hex[u >> 4]);
                out.push_back(hex[u & 0xF]);
            }
        }
        return out;
    }

    inline std::string unescape(std::string_view text)
    {
        std::string out;
        out.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i)
        {
            if (text[i] == '%')
            {
                if (i + 2 >= text.size())
                    throw ParseError("truncated escape");
                out.push_back(static_cast<char>(detail::hex_digit(text[i + 1]) * 16 + detail::hex_digit(text[i + 2])));
                i += 2;
            }
            else
            {
                out.push_back(text[i]);
            }
        }
        return out;
    }

    /// Canonical text: 42, -3, #t, #f, () and 'escaped-bytes'.
    inline std::string to_text(const Value &v)
    {
        struct Visitor
        {
            std::string operator()(Unit) const { return "()"; }
            std::string operator()(std::int64_t i) const { return std::to_string(i); }
            std::string operator()(bool b) const { return b ? "#t" : "#f"; }
            std::string operator()(const Bytes &b) const { return "'" + escape(b.data) + "'"; }
        };
        return std::visit(Visitor{}, v);
    }

    inline std::string to_text(const ValueList &vs)
    {
        std::string out = "[";
        for (std::size_t i = 0; i < vs.size(); ++i)
        {
            if (i)
                out.push_back(',');
            out += to_text(vs[i]);
        }
        out.push_back(']');
        return out;
    }

    inline Value parse_value(std::string_view text)
    {
        if (text == "()")
            return Unit{};
        if (text == "#t")
            return true;
        if (text == "#f")
            return false;
        if (text.size() >= 2 && text.front() == '\'' && text.back() == '\'')
            return Bytes{unescape(text.substr(1, text.size() - 2))};
        if (text.empty())
            throw ParseError("empty value");
        std::size_t pos = 0;
        const bool neg = text[0] == '-';
        if (neg)
            pos = 1;
        if (pos == text.size())
            throw ParseError("bad integer: " + std::string(text));
        const std::uint64_t limit = neg ? std::uint64_t{1} << 63 : (std::uint64_t{1} << 63) - 1;
        std::uint64_t acc = 0;
        for (; pos < text.size(); ++pos)
        {
            const char c = text[pos];
            if (c < '0' || c > '9')
                throw ParseError("bad value: " + std::string(text));
            const auto d = static_cast<std::uint64_t>(c - '0');
            if (acc > (limit - d) / 10)
                throw ParseError("integer out of range: " + std::string(text));
            acc = acc * 10 + d;
        }
        return neg ? static_cast<std::int64_t>(0 - acc) : static_cast<std::int64_t>(acc);
    }

    inline ValueList parse_value_list(std::string_view text)
    {
        if (text.size() < 2 || text.front() != '[' || text.back() != ']')
            throw ParseError("bad value list: " + std::string(text));
        ValueList out;
        const auto body = text.substr(1, text.size() - 2);
        if (body.empty())
            return out;
        std::size_t start = 0;
        while (true)
        {
            const auto comma = body.find(',', start);
            out.push_back(parse_value(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return out;
    }

    inline const std::int64_t *as_int(const Value &v) noexcept { return std::get_if<std::int64_t>(&v); }
    inline const bool *as_bool(const Value &v) noexcept { return std::get_if<bool>(&v); }
    inline const Bytes *as_bytes(const Value &v) noexcept { return std::get_if<Bytes>(&v); }
} // namespace xchain
