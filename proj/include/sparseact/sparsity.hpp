#pragma once

#include "sparseact/match.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sparseact {

struct SparsityConfig {
    int min_concepts = 3;   // lower clamp on k
    int max_concepts = 20;  // upper clamp on k
    double scale = 0.002;   // base sparsity rate applied to |graph| * complexity

    void validate() const;
};

// Weights of the four complexity factors; normalized to sum 1.
struct ComplexityWeights {
    double length = 0.25;
    double term_density = 0.25;
    double semantic = 0.25;
    double multisystem = 0.25;

    static ComplexityWeights normalized(double l, double t, double s, double m);
};

struct ComplexityBreakdown {
    double length_factor = 0.0;       // token count saturation
    double term_density = 0.0;        // lexicon-covered token fraction
    double semantic_complexity = 0.0; // distinct-token ratio x clause saturation
    double multisystem_factor = 0.0;  // organ-system categories touched
    double total = 0.0;
};

// Ten organ-system categories, each a set of normalized keyword tokens.
class OrganSystemTable {
public:
    static const OrganSystemTable& defaults();
    // Tagged one-record-per-line file: {"category": ..., "keywords": [...]}
    static OrganSystemTable from_file(const std::string& path);

    std::size_t categories_hit(const std::vector<std::string>& tokens) const;
    std::size_t size() const { return categories_.size(); }

private:
    std::map<std::string, std::set<std::string>> categories_;
};

double complexity_total(const ComplexityWeights& w, double length, double density,
                        double semantic, double multisystem);

ComplexityBreakdown complexity(const QueryTerm& query, const OrganSystemTable& organs,
                               const ComplexityWeights& weights);

// Adaptive activation count: scale * concept_count * complexity, rounded
// half-up, clamped into [min_concepts, max_concepts].
int adaptive_k(const SparsityConfig& config, std::size_t concept_count, double complexity_total);

} // namespace sparseact
