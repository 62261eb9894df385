#pragma once

// Flow CSV reading and writing.
//
// Canonical:  src_ip,dst_ip,proto,bpp_out,bpp_in
// Raw:        src_ip,dst_ip,proto,bytes_out,pkts_out,bytes_in,pkts_in
//
// Raw rows are quantized on ingest (see quantize_bpp).

#include <charconv>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"

namespace p2pbot {

inline constexpr std::string_view kFlowCsvHeader = "src_ip,dst_ip,proto,bpp_out,bpp_in";
inline constexpr std::string_view kRawFlowCsvHeader =
    "src_ip,dst_ip,proto,bytes_out,pkts_out,bytes_in,pkts_in";

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_unsigned(std::string_view field, std::size_t line, const char* name) {
    T value{};
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || p != field.data() + field.size())
        throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
    return value;
}

inline HostId parse_host(std::string_view field, std::size_t line, const char* name) {
    auto h = HostId::parse(field);
    if (!h) throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
    return *h;
}

inline Protocol parse_proto(std::string_view field, std::size_t line) {
    auto p = parse_protocol(field);
    if (!p) throw ParseError(line, "unknown protocol '" + std::string(field) + "'");
    return *p;
}

}  // namespace detail

enum class FlowCsvKind { canonical, raw };

/// Reads either CSV variant, chosen by the header line. Rows come back in
/// input order. Blank lines are skipped.
inline std::vector<FlowRecord> read_flow_csv(std::istream& in, FlowCsvKind* detected = nullptr) {
    std::vector<FlowRecord> flows;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    const auto header = detail::trim(line);
    FlowCsvKind kind;
    if (header == kFlowCsvHeader) {
        kind = FlowCsvKind::canonical;
    } else if (header == kRawFlowCsvHeader) {
        kind = FlowCsvKind::raw;
    } else {
        throw ParseError(1, "unrecognized header '" + std::string(header) + "'");
    }
    if (detected) *detected = kind;
    const std::size_t columns = kind == FlowCsvKind::canonical ? 5 : 7;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != columns)
            throw ParseError(lineno, "expected " + std::to_string(columns) + " columns, got " +
                                         std::to_string(fields.size()));
        const HostId src = detail::parse_host(fields[0], lineno, "src_ip");
        const HostId dst = detail::parse_host(fields[1], lineno, "dst_ip");
        const Protocol proto = detail::parse_proto(fields[2], lineno);
        if (src == dst) throw ValidationError(lineno, "src equals dst (" + src.to_string() + ")");
        if (kind == FlowCsvKind::canonical) {
            flows.push_back({src, dst, proto, detail::parse_unsigned<Bpp>(fields[3], lineno, "bpp_out"),
                             detail::parse_unsigned<Bpp>(fields[4], lineno, "bpp_in")});
        } else {
            RawFlowRecord raw{src,
                              dst,
                              proto,
                              detail::parse_unsigned<std::uint64_t>(fields[3], lineno, "bytes_out"),
                              detail::parse_unsigned<std::uint64_t>(fields[4], lineno, "pkts_out"),
                              detail::parse_unsigned<std::uint64_t>(fields[5], lineno, "bytes_in"),
                              detail::parse_unsigned<std::uint64_t>(fields[6], lineno, "pkts_in")};
            try {
                flows.push_back(quantize_bpp(raw));
            } catch (const ValidationError& e) {
                throw ValidationError(lineno, e.what());
            }
        }
    }
    return flows;
}

/// Canonical-format parse; rejects the raw header.
inline std::vector<FlowRecord> parse_flow_csv(std::istream& in) {
    FlowCsvKind kind{};
    auto flows = read_flow_csv(in, &kind);
    if (kind != FlowCsvKind::canonical) throw ParseError(1, "expected canonical flow header");
    return flows;
}

inline void write_flow_csv(std::ostream& out, std::span<const FlowRecord> flows) {
    out << kFlowCsvHeader << '\n';
    for (const auto& f : flows) {
        out << f.src.to_string() << ',' << f.dst.to_string() << ',' << to_string(f.proto) << ','
            << f.bpp_out << ',' << f.bpp_in << '\n';
    }
}

}  // namespace p2pbot
