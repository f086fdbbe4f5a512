#pragma once

// JSON-lines trace envelope shared by the construction runners: a header
// record echoing the resolved config and a format version, then one event
// object per line. Key order is fixed so identical runs serialize to
// identical bytes.

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "hed/honest.hpp"

namespace hed {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kTraceFormat = "hedlab-trace/1";

struct Trace {
    OrderedJson header;
    std::vector<OrderedJson> events;

    std::string toJsonLines() const {
        std::string out = header.dump();
        out += '\n';
        for (const auto& e : events) {
            out += e.dump();
            out += '\n';
        }
        return out;
    }

    static Trace fromJsonLines(const std::string& text) {
        Trace t;
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            OrderedJson j = OrderedJson::parse(line);
            if (first) {
                t.header = std::move(j);
                first = false;
            } else {
                t.events.push_back(std::move(j));
            }
        }
        return t;
    }
};

inline OrderedJson toJson(const HonestyReport& rep) {
    OrderedJson j;
    j["type"] = "HonestyReport";
    j["name"] = rep.name;
    j["range"] = "0.." + std::to_string(rep.nMax);
    j["degree"] = rep.degree;
    j["constant"] = rep.constant;
    j["monotoneOK"] = rep.monotoneOK;
    j["dominates2xOK"] = rep.dominates2xOK;
    j["runtimePolyOK"] = rep.runtimePolyOK;
    OrderedJson ws = OrderedJson::array();
    for (const auto& w : rep.witnesses) {
        OrderedJson e;
        e["check"] = w.check;
        e["n"] = w.n;
        ws.push_back(std::move(e));
    }
    j["witnesses"] = std::move(ws);
    return j;
}

}  // namespace hed
