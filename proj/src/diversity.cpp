#include "sparseact/diversity.hpp"

#include "sparseact/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace sparseact {

using nlohmann::json;
using nlohmann::ordered_json;

SessionHistory SessionHistory::load(const std::string& path, double default_penalty) {
    SessionHistory h;
    h.reuse_penalty = default_penalty;
    if (!std::filesystem::exists(path))
        return h;
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open session file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": malformed session record: " +
                        e.what());
        }
        std::string type = obj.value("record", "");
        if (type == "session") {
            double p = obj.value("reuse_penalty", default_penalty);
            if (p < 0.0 || p > 1.0)
                throw Error(path + ":" + std::to_string(lineno) +
                            ": reuse_penalty out of range [0,1]");
            h.reuse_penalty = p;
        } else if (type == "used") {
            std::string id = obj.value("concept", "");
            auto parsed = ConceptID::parse(id);
            if (!parsed)
                throw Error(path + ":" + std::to_string(lineno) + ": invalid concept id '" + id +
                            "'");
            h.used.insert(*parsed);
        } else {
            throw Error(path + ":" + std::to_string(lineno) + ": unknown session record '" +
                        type + "'");
        }
    }
    return h;
}

void SessionHistory::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error("cannot write session file '" + path + "'");
    ordered_json head;
    head["record"] = "session";
    head["reuse_penalty"] = reuse_penalty;
    out << head.dump() << '\n';
    for (const auto& id : used) {
        ordered_json rec;
        rec["record"] = "used";
        rec["concept"] = id.str();
        out << rec.dump() << '\n';
    }
}

double adjust_score(double score, const ConceptID& concept_id, const SessionHistory& history) {
    if (history.used.count(concept_id))
        return history.reuse_penalty * score;
    return score;
}

DiversityReport diversity(const std::set<ConceptID>& active, const SessionHistory& history) {
    if (active.empty())
        throw Error("diversity undefined on empty activation");
    DiversityReport report;
    report.active = active;
    for (const auto& id : active)
        if (history.used.count(id))
            report.overlap.insert(id);
    report.score = 1.0 - static_cast<double>(report.overlap.size()) /
                             static_cast<double>(active.size());
    return report;
}

void record(SessionHistory& history, const std::set<ConceptID>& activated) {
    history.used.insert(activated.begin(), activated.end());
}

} // namespace sparseact
