#pragma once

#include "sparseact/kg.hpp"
#include "sparseact/match.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sparseact {

// Progressive rescue strategies tried in order when nothing clears the
// activation threshold.
enum class FallbackLevel {
    FamilyRelated = 1,             // same taxonomy family as a weak match
    PhenotypeDriven = 2,           // HPO overlap with clinical profiles
    ClinicalFeatureCombination = 3,// shared clinical feature vocabulary
    GenotypeAssociation = 4,       // gene mentions against instance records
    BasicKnowledge = 5,            // best-covered taxonomy roots
};

const char* to_string(FallbackLevel level);

struct FallbackResult {
    FallbackLevel level = FallbackLevel::BasicKnowledge;
    std::vector<std::pair<ConceptID, double>> candidates; // sorted desc, ties by id
    std::string rationale;
};

// Phenotype label -> HPO code lookup used by the phenotype-driven level.
class PhenotypeLexicon {
public:
    void add(std::string_view label, const ConceptID& code);
    // Labels of HPO-namespaced concepts in the graph.
    static PhenotypeLexicon from_graph(const KnowledgeGraph& g);
    // One mapping per line: label<TAB>HP:nnnnnnn
    static PhenotypeLexicon from_file(const std::string& path);

    // Codes whose label token sequences appear in the token list.
    std::set<ConceptID> codes_in(const std::vector<std::string>& tokens) const;
    std::size_t size() const { return labels_.size(); }

private:
    std::map<std::vector<std::string>, ConceptID> labels_;
    std::size_t max_len_ = 1;
};

struct FallbackOptions {
    const StopwordSet* stopwords = nullptr;           // defaults when null
    const PhenotypeLexicon* phenotype_lexicon = nullptr;
    int basic_limit = 3; // candidates surfaced by the basic-knowledge level
};

// Tries the five levels in order and returns the first with candidates;
// the basic-knowledge level always terminates (possibly with none).
FallbackResult resolve(const QueryTerm& query, const KnowledgeGraph& graph,
                       const std::vector<std::pair<ConceptID, double>>& weak_matches,
                       const FallbackOptions& options);

} // namespace sparseact
