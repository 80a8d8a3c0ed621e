#pragma once

#include "sparseact/diversity.hpp"
#include "sparseact/evidence.hpp"
#include "sparseact/fallback.hpp"
#include "sparseact/kg.hpp"
#include "sparseact/match.hpp"
#include "sparseact/sparsity.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sparseact {

// Ablation switches: the four matchers plus the two control mechanisms.
struct MethodSwitches {
    bool code = true;
    bool term = true;
    bool variant = true;
    bool multilingual = true;
    bool diversity = true;
    bool fallback = true;
};

// Per-method score weights; code matches carry the highest weight.
struct MethodWeights {
    double code = 1.0;
    double term = 0.9;
    double variant = 0.85;
    double multilingual = 0.8;
};

struct EngineConfig {
    MethodWeights method_weights;
    MethodSwitches switches;
    double activation_threshold = 0.2;
    SparsityConfig sparsity;
    ComplexityWeights complexity_weights;
    CombineWeights multilingual_combine;
    double reuse_penalty = 0.7;
    std::size_t candidate_cap = 200;

    struct Paths {
        std::string lexicon;          // term per line; default derived from graph
        std::string stopwords;        // term per line
        std::string phonetic_table;   // grapheme<TAB>key
        std::string organ_systems;    // tagged category records
        std::string phenotype_lexicon;// label<TAB>HP code
        std::string evidence;         // file-backed evidence snippets
    } paths;

    static EngineConfig from_file(const std::string& path);
    static EngineConfig from_json(const nlohmann::json& obj);
    void validate() const;
};

struct ActivationEntry {
    ConceptID concept_id;
    std::map<MatchMethod, MatchScore> raw;
    double combined = 0.0; // max of weighted enabled method scores
    double adjusted = 0.0; // after the session reuse penalty
};

struct ContextSection {
    std::string title;
    std::string body;
    std::vector<std::string> sources;
};

struct ContextDocument {
    std::vector<ContextSection> sections;
};

struct ActivationResult {
    std::string query;
    std::string language;
    std::vector<ActivationEntry> entries; // sorted by adjusted desc, id asc
    int k_used = 0;
    ComplexityBreakdown complexity;
    DiversityReport diversity;
    std::optional<FallbackResult> fallback; // present iff nothing cleared the threshold
    ContextDocument context;
};

// Max over enabled methods of weight * score. Throws when every method is
// switched off.
double combine_scores(const std::map<MatchMethod, double>& raw, const MethodWeights& weights,
                      const MethodSwitches& switches);

// Highest-k entries by (adjusted desc, concept asc).
std::vector<ActivationEntry> select_top_k(std::vector<ActivationEntry> entries, int k);

class Engine {
public:
    Engine(const KnowledgeGraph& graph, EngineConfig config,
           std::unique_ptr<EvidenceProvider> evidence = nullptr);

    // Full activation flow: candidates, matchers, combination, reuse
    // penalty, adaptive top-k, fallback, diversity report, context.
    ActivationResult activate(std::string_view query_text, std::string_view language,
                              SessionHistory& session) const;

    struct Explanation {
        ConceptID concept_id;
        std::string standard_name;
        std::map<MatchMethod, MatchScore> raw; // all four, ignoring switches
        double combined = 0.0;
        double adjusted = 0.0;
        bool in_history = false;
        ComplexityBreakdown complexity;
        int k = 0;
        double threshold = 0.0;
        std::size_t graph_concepts = 0;
    };
    Explanation explain(std::string_view query_text, std::string_view language,
                        const ConceptID& concept_id, const SessionHistory& session) const;

    ContextDocument assemble_context(const std::vector<ActivationEntry>& entries,
                                     const std::optional<FallbackResult>& fallback,
                                     std::string_view query_text) const;

    const EngineConfig& config() const { return config_; }
    const KnowledgeGraph& graph() const { return graph_; }
    const Lexicon& lexicon() const { return lexicon_; }
    const StopwordSet& stopwords() const { return stopwords_; }
    const OrganSystemTable& organ_systems() const { return organs_; }

private:
    std::map<MatchMethod, MatchScore> run_matchers(const QueryTerm& query, const Concept& target,
                                                   bool include_disabled) const;

    const KnowledgeGraph& graph_;
    EngineConfig config_;
    Lexicon lexicon_;
    StopwordSet stopwords_;
    PhoneticTable phonetic_;
    OrganSystemTable organs_;
    PhenotypeLexicon phenotypes_;
    std::unique_ptr<EvidenceProvider> evidence_;
    // Pre-segmented standard name and alias units per concept.
    std::map<ConceptID, std::vector<std::vector<SemanticUnit>>> target_units_;
};

// Stable machine-readable form; byte-identical for identical inputs.
nlohmann::ordered_json to_machine_json(const ActivationResult& result);

// Human-readable trace.
std::string render_human(const ActivationResult& result, const KnowledgeGraph& graph);

} // namespace sparseact
