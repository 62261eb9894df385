#pragma once

// Core flow-level value types shared by every pipeline stage.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "p2pbot/errors.hpp"

namespace p2pbot {

/// IPv4 host, stored in host byte order. Ordering is numeric.
struct HostId {
    std::uint32_t ip = 0;

    constexpr HostId() = default;
    constexpr explicit HostId(std::uint32_t v) : ip{v} {}
    constexpr HostId(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : ip{(std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d} {}

    friend constexpr auto operator<=>(HostId, HostId) = default;

    /// Strict dotted-quad parse; no leading '+', no empty octets, each octet <= 255.
    static std::optional<HostId> parse(std::string_view text) {
        std::uint32_t value = 0;
        const char* p = text.data();
        const char* end = text.data() + text.size();
        for (int octet = 0; octet < 4; ++octet) {
            if (octet > 0) {
                if (p == end || *p != '.') return std::nullopt;
                ++p;
            }
            if (p == end || !std::isdigit(static_cast<unsigned char>(*p))) return std::nullopt;
            unsigned part = 0;
            auto [next, ec] = std::from_chars(p, end, part);
            if (ec != std::errc{} || part > 255 || next - p > 3) return std::nullopt;
            value = (value << 8) | part;
            p = next;
        }
        if (p != end) return std::nullopt;
        return HostId{value};
    }

    std::string to_string() const {
        return std::to_string(ip >> 24) + '.' + std::to_string((ip >> 16) & 0xff) + '.' +
               std::to_string((ip >> 8) & 0xff) + '.' + std::to_string(ip & 0xff);
    }
};

/// Upper 16 bits of an IPv4 address; approximates a physical network.
struct Prefix16 {
    std::uint16_t hi = 0;

    friend constexpr auto operator<=>(Prefix16, Prefix16) = default;

    std::string to_string() const {
        return std::to_string(hi >> 8) + '.' + std::to_string(hi & 0xff);
    }
};

constexpr Prefix16 prefix16(HostId h) noexcept {
    return Prefix16{static_cast<std::uint16_t>(h.ip >> 16)};
}

enum class Protocol : std::uint8_t { tcp, udp };

inline std::optional<Protocol> parse_protocol(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "tcp") return Protocol::tcp;
    if (lower == "udp") return Protocol::udp;
    return std::nullopt;
}

constexpr std::string_view to_string(Protocol p) noexcept {
    return p == Protocol::tcp ? "tcp" : "udp";
}

/// Bytes-per-packet, integer-quantized.
using Bpp = std::uint32_t;

/// One aggregated bidirectional flow seen from `src`.
struct FlowRecord {
    HostId src;
    HostId dst;
    Protocol proto = Protocol::tcp;
    Bpp bpp_out = 0;
    Bpp bpp_in = 0;

    friend constexpr auto operator<=>(const FlowRecord&, const FlowRecord&) = default;
};

/// The (proto, bpp_out, bpp_in) statistical fingerprint of a flow.
struct FlowPattern {
    Protocol proto = Protocol::tcp;
    Bpp bpp_out = 0;
    Bpp bpp_in = 0;

    friend constexpr auto operator<=>(const FlowPattern&, const FlowPattern&) = default;
};

/// Clustering key: a flow with its destination dropped.
struct FlowKey {
    HostId src;
    Protocol proto = Protocol::tcp;
    Bpp bpp_out = 0;
    Bpp bpp_in = 0;

    friend constexpr auto operator<=>(const FlowKey&, const FlowKey&) = default;

    constexpr FlowPattern pattern() const noexcept { return {proto, bpp_out, bpp_in}; }
};

constexpr FlowKey key_of(const FlowRecord& f) noexcept {
    return {f.src, f.proto, f.bpp_out, f.bpp_in};
}

constexpr FlowPattern pattern_of(const FlowRecord& f) noexcept {
    return {f.proto, f.bpp_out, f.bpp_in};
}

/// Pre-aggregation flow with raw byte and packet counters.
struct RawFlowRecord {
    HostId src;
    HostId dst;
    Protocol proto = Protocol::tcp;
    std::uint64_t bytes_out = 0;
    std::uint64_t pkts_out = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t pkts_in = 0;
};

namespace detail {
inline Bpp floor_bpp(std::uint64_t bytes, std::uint64_t pkts) {
    if (pkts == 0) {
        if (bytes != 0) throw ValidationError(0, "bytes without packets");
        return 0;
    }
    const std::uint64_t q = bytes / pkts;
    if (q > UINT32_MAX) throw ValidationError(0, "bytes per packet out of range");
    return static_cast<Bpp>(q);
}
}  // namespace detail

/// Floor-divides each direction's bytes by its packets. A direction with no
/// packets gets BPP 0.
inline FlowRecord quantize_bpp(const RawFlowRecord& raw) {
    return FlowRecord{raw.src, raw.dst, raw.proto, detail::floor_bpp(raw.bytes_out, raw.pkts_out),
                      detail::floor_bpp(raw.bytes_in, raw.pkts_in)};
}

/// IPv4 CIDR block used to designate internal hosts.
struct Cidr {
    HostId base;
    int length = 32;

    static std::optional<Cidr> parse(std::string_view text) {
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return std::nullopt;
        auto host = HostId::parse(text.substr(0, slash));
        if (!host) return std::nullopt;
        const auto len_text = text.substr(slash + 1);
        int len = -1;
        auto [p, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
        if (ec != std::errc{} || p != len_text.data() + len_text.size() || len < 0 || len > 32)
            return std::nullopt;
        return Cidr{HostId{host->ip & mask(len)}, len};
    }

    constexpr bool contains(HostId h) const noexcept { return (h.ip & mask(length)) == base.ip; }

    std::string to_string() const { return base.to_string() + '/' + std::to_string(length); }

    friend constexpr bool operator==(const Cidr&, const Cidr&) = default;

private:
    static constexpr std::uint32_t mask(int len) noexcept {
        return len == 0 ? 0u : ~std::uint32_t{0} << (32 - len);
    }
};

}  // namespace p2pbot

template <>
struct std::hash<p2pbot::HostId> {
    std::size_t operator()(p2pbot::HostId h) const noexcept { return std::hash<std::uint32_t>{}(h.ip); }
};

template <>
struct std::hash<p2pbot::FlowKey> {
    std::size_t operator()(const p2pbot::FlowKey& k) const noexcept {
        std::uint64_t x = (std::uint64_t{k.src.ip} << 32) ^ (std::uint64_t{k.bpp_out} << 17) ^
                          (std::uint64_t{k.bpp_in} << 1) ^ static_cast<std::uint64_t>(k.proto);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};
