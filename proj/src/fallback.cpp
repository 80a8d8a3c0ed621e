#include "sparseact/fallback.hpp"

#include "sparseact/error.hpp"
#include "sparseact/text.hpp"

#include <algorithm>
#include <fstream>

namespace sparseact {

const char* to_string(FallbackLevel level) {
    switch (level) {
    case FallbackLevel::FamilyRelated: return "family-related";
    case FallbackLevel::PhenotypeDriven: return "phenotype-driven";
    case FallbackLevel::ClinicalFeatureCombination: return "clinical-feature";
    case FallbackLevel::GenotypeAssociation: return "genotype-association";
    case FallbackLevel::BasicKnowledge: return "basic-knowledge";
    }
    return "basic-knowledge";
}

// ---------------------------------------------------------------------------
// PhenotypeLexicon

void PhenotypeLexicon::add(std::string_view label, const ConceptID& code) {
    std::vector<std::string> toks = text::tokenize(label);
    if (toks.empty())
        return;
    max_len_ = std::max(max_len_, toks.size());
    labels_.emplace(std::move(toks), code);
}

PhenotypeLexicon PhenotypeLexicon::from_graph(const KnowledgeGraph& g) {
    PhenotypeLexicon lex;
    for (const auto& [id, c] : g.concepts()) {
        if (id.system != CodeSystem::Hpo)
            continue;
        lex.add(c.standard_name, id);
        for (const auto& a : c.aliases)
            lex.add(a.text, id);
    }
    return lex;
}

PhenotypeLexicon PhenotypeLexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open phenotype lexicon '" + path + "'");
    PhenotypeLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected label<TAB>code");
        auto code = ConceptID::parse(line.substr(tab + 1));
        if (!code || code->system != CodeSystem::Hpo)
            throw Error(path + ":" + std::to_string(lineno) + ": not an HPO code: '" +
                        line.substr(tab + 1) + "'");
        lex.add(line.substr(0, tab), *code);
    }
    return lex;
}

std::set<ConceptID> PhenotypeLexicon::codes_in(const std::vector<std::string>& tokens) const {
    std::set<ConceptID> out;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        std::vector<std::string> probe;
        std::size_t limit = std::min(max_len_, tokens.size() - pos);
        for (std::size_t len = 1; len <= limit; ++len) {
            probe.push_back(tokens[pos + len - 1]);
            auto it = labels_.find(probe);
            if (it != labels_.end())
                out.insert(it->second);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level evaluation

namespace {

std::vector<std::pair<ConceptID, double>> to_sorted(const std::map<ConceptID, double>& scores) {
    std::vector<std::pair<ConceptID, double>> out(scores.begin(), scores.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

double jaccard(const std::set<ConceptID>& a, const std::set<ConceptID>& b) {
    if (a.empty() || b.empty())
        return 0.0;
    std::size_t inter = 0;
    for (const auto& x : a)
        inter += b.count(x);
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::map<ConceptID, double>
level_family(const KnowledgeGraph& graph,
             const std::vector<std::pair<ConceptID, double>>& weak_matches) {
    std::map<ConceptID, double> scores;
    for (const auto& [wid, wscore] : weak_matches) {
        if (!graph.lookup_by_code(wid))
            continue;
        for (const auto& member : graph.family_of(wid)) {
            double s = wscore * 0.9;
            auto [it, inserted] = scores.emplace(member, s);
            if (!inserted)
                it->second = std::max(it->second, s);
        }
    }
    return scores;
}

std::map<ConceptID, double> level_phenotype(const QueryTerm& query, const KnowledgeGraph& graph,
                                            const PhenotypeLexicon& lexicon) {
    std::set<ConceptID> query_phenotypes;
    for (const auto& code : query.extracted_codes)
        if (code.system == CodeSystem::Hpo)
            query_phenotypes.insert(code);
    for (const auto& code : lexicon.codes_in(query.tokens))
        query_phenotypes.insert(code);

    std::map<ConceptID, double> scores;
    if (query_phenotypes.empty())
        return scores;
    for (const auto& [pid, profile] : graph.clinical()) {
        double j = jaccard(query_phenotypes, profile.phenotypes);
        if (j <= 0.0)
            continue;
        auto [it, inserted] = scores.emplace(profile.concept_id, j);
        if (!inserted)
            it->second = std::max(it->second, j);
    }
    return scores;
}

std::map<ConceptID, double> level_features(const QueryTerm& query, const KnowledgeGraph& graph,
                                           const StopwordSet& stopwords) {
    std::set<std::string> query_tokens;
    for (const auto& t : query.tokens)
        if (!stopwords.contains(t))
            query_tokens.insert(t);

    std::map<ConceptID, double> scores;
    if (query_tokens.empty())
        return scores;
    for (const auto& [pid, profile] : graph.clinical()) {
        double matched = 0.0, total = 0.0;
        for (const auto& feat : profile.features) {
            total += feat.weight;
            for (const auto& tok : text::tokenize(feat.text)) {
                if (query_tokens.count(tok)) {
                    matched += feat.weight;
                    break;
                }
            }
        }
        if (matched <= 0.0 || total <= 0.0)
            continue;
        double s = matched / total;
        auto [it, inserted] = scores.emplace(profile.concept_id, s);
        if (!inserted)
            it->second = std::max(it->second, s);
    }
    return scores;
}

std::map<ConceptID, double> level_genes(const QueryTerm& query, const KnowledgeGraph& graph) {
    std::set<ConceptID> query_genes;
    for (const auto& code : query.extracted_codes)
        if (code.system == CodeSystem::Gene)
            query_genes.insert(code);
    for (const auto& tok : query.tokens) {
        std::string upper(tok);
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        ConceptID gid{CodeSystem::Gene, upper};
        if (graph.gene_index().count(gid))
            query_genes.insert(gid);
    }

    std::map<ConceptID, double> scores;
    if (query_genes.empty())
        return scores;
    for (const auto& [rid, rec] : graph.instances()) {
        double j = jaccard(query_genes, rec.gene_links);
        if (j <= 0.0)
            continue;
        auto [it, inserted] = scores.emplace(rec.concept_id, j);
        if (!inserted)
            it->second = std::max(it->second, j);
    }
    return scores;
}

std::map<ConceptID, double> level_basic(const KnowledgeGraph& graph, int limit) {
    // roots ordered by membership, then id; members surface in id order
    std::vector<std::string> roots = graph.root_nodes();
    std::sort(roots.begin(), roots.end(), [&](const std::string& a, const std::string& b) {
        std::size_t ma = graph.taxonomy().at(a).member_concepts.size();
        std::size_t mb = graph.taxonomy().at(b).member_concepts.size();
        if (ma != mb)
            return ma > mb;
        return a < b;
    });
    std::map<ConceptID, double> scores;
    for (const auto& nid : roots) {
        for (const auto& member : graph.taxonomy().at(nid).member_concepts) {
            if (static_cast<int>(scores.size()) >= limit)
                return scores;
            scores.emplace(member, 0.05);
        }
        if (static_cast<int>(scores.size()) >= limit)
            break;
    }
    return scores;
}

} // namespace

FallbackResult resolve(const QueryTerm& query, const KnowledgeGraph& graph,
                       const std::vector<std::pair<ConceptID, double>>& weak_matches,
                       const FallbackOptions& options) {
    if (graph.concept_count() == 0)
        throw Error("fallback on empty graph");

    const StopwordSet& stopwords =
        options.stopwords ? *options.stopwords : StopwordSet::defaults();
    PhenotypeLexicon graph_lexicon;
    const PhenotypeLexicon* phenotypes = options.phenotype_lexicon;
    if (!phenotypes) {
        graph_lexicon = PhenotypeLexicon::from_graph(graph);
        phenotypes = &graph_lexicon;
    }

    FallbackResult result;
    if (auto scores = level_family(graph, weak_matches); !scores.empty()) {
        result.level = FallbackLevel::FamilyRelated;
        result.candidates = to_sorted(scores);
        result.rationale = "same-family concepts of weak matches";
        return result;
    }
    if (auto scores = level_phenotype(query, graph, *phenotypes); !scores.empty()) {
        result.level = FallbackLevel::PhenotypeDriven;
        result.candidates = to_sorted(scores);
        result.rationale = "phenotype overlap with clinical profiles";
        return result;
    }
    if (auto scores = level_features(query, graph, stopwords); !scores.empty()) {
        result.level = FallbackLevel::ClinicalFeatureCombination;
        result.candidates = to_sorted(scores);
        result.rationale = "shared clinical feature vocabulary";
        return result;
    }
    if (auto scores = level_genes(query, graph); !scores.empty()) {
        result.level = FallbackLevel::GenotypeAssociation;
        result.candidates = to_sorted(scores);
        result.rationale = "gene associations from instance records";
        return result;
    }
    result.level = FallbackLevel::BasicKnowledge;
    result.candidates = to_sorted(level_basic(graph, options.basic_limit));
    result.rationale = "basic knowledge fallback";
    return result;
}

} // namespace sparseact
