#pragma once

#include "sparseact/pipeline.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace sparseact {

struct CorpusCase {
    std::string case_id;
    std::string question;
    std::set<ConceptID> gold; // nonempty
    std::string category;     // empty allowed
};

// One tagged record per line:
// {"case": ..., "question": ..., "gold": [...], "category": ...}
std::vector<CorpusCase> load_corpus(const std::string& path);

struct MetricsBucket {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;          // top-1 hit rate
    std::map<int, double> top_n;    // N -> recall at N
    std::size_t case_count = 0;
};

struct MetricsReport {
    MetricsBucket overall;
    std::map<std::string, MetricsBucket> per_category;
    std::vector<std::string> warnings; // skipped cases
    bool macro = false;
    std::vector<int> ns;
};

// Runs every case through the engine with a fresh session. Precision and
// recall pool counts across cases (micro); the macro flag averages
// per-case ratios instead. Cases whose gold ids are missing from the graph
// are skipped with a warning.
MetricsReport evaluate(const std::vector<CorpusCase>& corpus, const Engine& engine,
                       const std::vector<int>& ns, bool macro = false);

std::string render_table(const MetricsReport& report);
nlohmann::ordered_json to_machine_json(const MetricsReport& report);

} // namespace sparseact
