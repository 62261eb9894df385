#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>

#include "p2pbot/errors.hpp"
#include "p2pbot/flow.hpp"
#include "p2pbot/flow_csv.hpp"

namespace p2pbot {

enum class HostKind { background, p2p, bot };

/// Host label: `background`, `p2p:<app>` or `bot:<family>`.
struct Label {
    HostKind kind = HostKind::background;
    std::string name;

    static Label background() { return {}; }
    static Label bot(std::string family) { return {HostKind::bot, std::move(family)}; }
    static Label p2p(std::string app) { return {HostKind::p2p, std::move(app)}; }

    bool is_bot() const noexcept { return kind == HostKind::bot; }

    std::string to_string() const {
        switch (kind) {
            case HostKind::bot: return "bot:" + name;
            case HostKind::p2p: return "p2p:" + name;
            default: return "background";
        }
    }

    static Label parse(std::string_view text, std::size_t line = 0) {
        if (text == "background") return background();
        const auto colon = text.find(':');
        if (colon != std::string_view::npos && colon + 1 < text.size()) {
            const auto kind = text.substr(0, colon);
            std::string name(text.substr(colon + 1));
            if (kind == "bot") return bot(std::move(name));
            if (kind == "p2p") return p2p(std::move(name));
        }
        throw ParseError(line, "invalid label '" + std::string(text) + "'");
    }

    friend bool operator==(const Label&, const Label&) = default;
};

struct GroundTruth {
    std::map<HostId, Label> labels;

    const Label* find(HostId h) const {
        auto it = labels.find(h);
        return it == labels.end() ? nullptr : &it->second;
    }

    std::size_t bot_count() const {
        std::size_t n = 0;
        for (const auto& [h, l] : labels) n += l.is_bot();
        return n;
    }

    std::set<std::string> botnet_families() const {
        std::set<std::string> out;
        for (const auto& [h, l] : labels)
            if (l.is_bot()) out.insert(l.name);
        return out;
    }

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

inline void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth) {
    out << "ip,label\n";
    for (const auto& [h, l] : truth.labels) out << h.to_string() << ',' << l.to_string() << '\n';
}

inline GroundTruth read_ground_truth_csv(std::istream& in) {
    GroundTruth truth;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "ip,label") throw ParseError(1, "expected header 'ip,label'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != 2) throw ParseError(lineno, "expected 2 columns");
        const HostId h = detail::parse_host(fields[0], lineno, "ip");
        if (!truth.labels.emplace(h, Label::parse(fields[1], lineno)).second)
            throw ValidationError(lineno, "duplicate host " + h.to_string());
    }
    return truth;
}

}  // namespace p2pbot
