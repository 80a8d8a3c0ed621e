#pragma once

#include "sparseact/ids.hpp"

#include <set>
#include <string>

namespace sparseact {

// Concepts activated earlier in the session plus the penalty applied when
// one of them scores again.
struct SessionHistory {
    std::set<ConceptID> used;
    double reuse_penalty = 0.7; // in [0,1]

    // Tagged one-record-per-line session file. A missing file yields a
    // fresh history with the given penalty.
    static SessionHistory load(const std::string& path, double default_penalty);
    void save(const std::string& path) const;
};

struct DiversityReport {
    double score = 1.0; // 1 - |active ∩ used| / |active|
    std::set<ConceptID> active;
    std::set<ConceptID> overlap;
};

// Penalized score for previously used concepts, unchanged otherwise.
double adjust_score(double score, const ConceptID& concept_id, const SessionHistory& history);

// Throws on an empty active set.
DiversityReport diversity(const std::set<ConceptID>& active, const SessionHistory& history);

// Union-in the activated set; repeated calls are idempotent.
void record(SessionHistory& history, const std::set<ConceptID>& activated);

} // namespace sparseact
