#include "sparseact/pipeline.hpp"

#include "sparseact/error.hpp"
#include "sparseact/text.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparseact {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

namespace {

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const char* where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = std::any_of(allowed.begin(), allowed.end(),
                                 [&](const char* k) { return key == k; });
        if (!known)
            throw Error(std::string("unknown config key '") + key + "' in " + where);
    }
}

double get_unit_interval(const json& obj, const char* key, double fallback,
                         const char* where) {
    if (!obj.contains(key))
        return fallback;
    double v = obj.at(key).get<double>();
    if (v < 0.0 || v > 1.0)
        throw Error(std::string("config ") + where + "." + key + " out of range [0,1]");
    return v;
}

} // namespace

EngineConfig EngineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config file '" + path + "'");
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": malformed config: " + e.what());
    }
    return from_json(obj);
}

EngineConfig EngineConfig::from_json(const json& obj) {
    EngineConfig cfg;
    if (!obj.is_object())
        throw Error("config must be an object");
    expect_keys(obj,
                {"method_weights", "switches", "activation_threshold", "sparsity",
                 "complexity_weights", "multilingual_combine", "reuse_penalty", "candidate_cap",
                 "paths"},
                "config");

    if (obj.contains("method_weights")) {
        const json& mw = obj.at("method_weights");
        expect_keys(mw, {"code", "term", "variant", "multilingual"}, "method_weights");
        cfg.method_weights.code = get_unit_interval(mw, "code", cfg.method_weights.code,
                                                    "method_weights");
        cfg.method_weights.term = get_unit_interval(mw, "term", cfg.method_weights.term,
                                                    "method_weights");
        cfg.method_weights.variant = get_unit_interval(mw, "variant", cfg.method_weights.variant,
                                                       "method_weights");
        cfg.method_weights.multilingual = get_unit_interval(
            mw, "multilingual", cfg.method_weights.multilingual, "method_weights");
    }
    if (obj.contains("switches")) {
        const json& sw = obj.at("switches");
        expect_keys(sw, {"code", "term", "variant", "multilingual", "diversity", "fallback"},
                    "switches");
        cfg.switches.code = sw.value("code", cfg.switches.code);
        cfg.switches.term = sw.value("term", cfg.switches.term);
        cfg.switches.variant = sw.value("variant", cfg.switches.variant);
        cfg.switches.multilingual = sw.value("multilingual", cfg.switches.multilingual);
        cfg.switches.diversity = sw.value("diversity", cfg.switches.diversity);
        cfg.switches.fallback = sw.value("fallback", cfg.switches.fallback);
    }
    cfg.activation_threshold =
        get_unit_interval(obj, "activation_threshold", cfg.activation_threshold, "config");
    if (obj.contains("sparsity")) {
        const json& sp = obj.at("sparsity");
        expect_keys(sp, {"min_concepts", "max_concepts", "scale"}, "sparsity");
        cfg.sparsity.min_concepts = sp.value("min_concepts", cfg.sparsity.min_concepts);
        cfg.sparsity.max_concepts = sp.value("max_concepts", cfg.sparsity.max_concepts);
        cfg.sparsity.scale = sp.value("scale", cfg.sparsity.scale);
    }
    if (obj.contains("complexity_weights")) {
        const json& cw = obj.at("complexity_weights");
        expect_keys(cw, {"length", "term_density", "semantic", "multisystem"},
                    "complexity_weights");
        cfg.complexity_weights = ComplexityWeights::normalized(
            cw.value("length", 0.25), cw.value("term_density", 0.25), cw.value("semantic", 0.25),
            cw.value("multisystem", 0.25));
    }
    if (obj.contains("multilingual_combine")) {
        const json& mc = obj.at("multilingual_combine");
        expect_keys(mc, {"transliteration", "character", "embedding"}, "multilingual_combine");
        cfg.multilingual_combine = CombineWeights::normalized(
            mc.value("transliteration", 1.0), mc.value("character", 1.0),
            mc.value("embedding", 1.0));
    }
    cfg.reuse_penalty = get_unit_interval(obj, "reuse_penalty", cfg.reuse_penalty, "config");
    if (obj.contains("candidate_cap")) {
        long long cap = obj.at("candidate_cap").get<long long>();
        if (cap < 1)
            throw Error("config candidate_cap must be positive");
        cfg.candidate_cap = static_cast<std::size_t>(cap);
    }
    if (obj.contains("paths")) {
        const json& p = obj.at("paths");
        expect_keys(p,
                    {"lexicon", "stopwords", "phonetic_table", "organ_systems",
                     "phenotype_lexicon", "evidence"},
                    "paths");
        cfg.paths.lexicon = p.value("lexicon", "");
        cfg.paths.stopwords = p.value("stopwords", "");
        cfg.paths.phonetic_table = p.value("phonetic_table", "");
        cfg.paths.organ_systems = p.value("organ_systems", "");
        cfg.paths.phenotype_lexicon = p.value("phenotype_lexicon", "");
        cfg.paths.evidence = p.value("evidence", "");
    }
    cfg.validate();
    return cfg;
}

void EngineConfig::validate() const {
    if (!switches.code && !switches.term && !switches.variant && !switches.multilingual)
        throw Error("at least one matcher must be enabled");
    for (double w : {method_weights.code, method_weights.term, method_weights.variant,
                     method_weights.multilingual})
        if (w < 0.0 || w > 1.0)
            throw Error("method weights out of range [0,1]");
    if (activation_threshold < 0.0 || activation_threshold > 1.0)
        throw Error("activation threshold out of range [0,1]");
    if (reuse_penalty < 0.0 || reuse_penalty > 1.0)
        throw Error("reuse penalty out of range [0,1]");
    if (candidate_cap < 1)
        throw Error("candidate cap must be positive");
    sparsity.validate();
}

// ---------------------------------------------------------------------------
// Score combination and selection

double combine_scores(const std::map<MatchMethod, double>& raw, const MethodWeights& weights,
                      const MethodSwitches& switches) {
    if (!switches.code && !switches.term && !switches.variant && !switches.multilingual)
        throw Error("all matchers disabled");
    double best = 0.0;
    bool any = false;
    for (const auto& [method, value] : raw) {
        double weight = 0.0;
        switch (method) {
        case MatchMethod::Code:
            if (!switches.code)
                continue;
            weight = weights.code;
            break;
        case MatchMethod::Term:
            if (!switches.term)
                continue;
            weight = weights.term;
            break;
        case MatchMethod::Variant:
            if (!switches.variant)
                continue;
            weight = weights.variant;
            break;
        case MatchMethod::Multilingual:
            if (!switches.multilingual)
                continue;
            weight = weights.multilingual;
            break;
        }
        any = true;
        best = std::max(best, weight * value);
    }
    if (!any)
        throw Error("no enabled method score present");
    return best;
}

std::vector<ActivationEntry> select_top_k(std::vector<ActivationEntry> entries, int k) {
    if (k < 0)
        k = 0;
    auto by_rank = [](const ActivationEntry& a, const ActivationEntry& b) {
        if (a.adjusted != b.adjusted)
            return a.adjusted > b.adjusted;
        return a.concept_id < b.concept_id;
    };
    std::size_t keep = std::min(entries.size(), static_cast<std::size_t>(k));
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep),
                      entries.end(), by_rank);
    entries.resize(keep);
    return entries;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(const KnowledgeGraph& graph, EngineConfig config,
               std::unique_ptr<EvidenceProvider> evidence)
    : graph_(graph), config_(std::move(config)) {
    config_.validate();

    lexicon_ = config_.paths.lexicon.empty() ? Lexicon::from_graph(graph_)
                                             : Lexicon::from_file(config_.paths.lexicon);
    stopwords_ = config_.paths.stopwords.empty() ? StopwordSet::defaults()
                                                 : StopwordSet::from_file(config_.paths.stopwords);
    phonetic_ = config_.paths.phonetic_table.empty()
                    ? PhoneticTable::defaults()
                    : PhoneticTable::from_file(config_.paths.phonetic_table);
    organs_ = config_.paths.organ_systems.empty()
                  ? OrganSystemTable::defaults()
                  : OrganSystemTable::from_file(config_.paths.organ_systems);
    phenotypes_ = config_.paths.phenotype_lexicon.empty()
                      ? PhenotypeLexicon::from_graph(graph_)
                      : PhenotypeLexicon::from_file(config_.paths.phenotype_lexicon);
    if (evidence)
        evidence_ = std::move(evidence);
    else if (!config_.paths.evidence.empty())
        evidence_ = std::make_unique<FileEvidenceProvider>(config_.paths.evidence);
    else
        evidence_ = std::make_unique<NullEvidenceProvider>();

    for (const auto& [id, c] : graph_.concepts()) {
        std::vector<std::vector<SemanticUnit>>& lists = target_units_[id];
        auto add_units = [&](const std::string& name) {
            std::vector<SemanticUnit> units = segment(name, lexicon_, stopwords_);
            if (!units.empty())
                lists.push_back(std::move(units));
        };
        add_units(c.standard_name);
        for (const auto& a : c.aliases)
            add_units(a.text);
    }
}

std::map<MatchMethod, MatchScore> Engine::run_matchers(const QueryTerm& query,
                                                       const Concept& target,
                                                       bool include_disabled) const {
    std::map<MatchMethod, MatchScore> raw;
    const MethodSwitches& sw = config_.switches;

    if (include_disabled || sw.code)
        raw[MatchMethod::Code] = code_match(query, target);

    if (include_disabled || sw.term) {
        MatchScore best;
        best.method = MatchMethod::Term;
        if (!query.semantic_units.empty()) {
            auto it = target_units_.find(target.primary_id);
            if (it != target_units_.end()) {
                for (const auto& units : it->second) {
                    MatchScore s = term_match(query.semantic_units, units);
                    if (s.value > best.value)
                        best = s;
                }
            }
        }
        raw[MatchMethod::Term] = best;
    }

    if (include_disabled || sw.variant)
        raw[MatchMethod::Variant] = variant_match(query, target);

    if (include_disabled || sw.multilingual)
        raw[MatchMethod::Multilingual] =
            multilingual_match(query, target, phonetic_, config_.multilingual_combine);

    return raw;
}

ActivationResult Engine::activate(std::string_view query_text, std::string_view language,
                                  SessionHistory& session) const {
    QueryTerm query = make_query_term(query_text, language, lexicon_, stopwords_);

    std::vector<std::string> lookup_tokens = query.tokens;
    for (const auto& code : query.extracted_codes)
        lookup_tokens.push_back(code.str());
    std::vector<ConceptID> candidates =
        graph_.candidates_for_query(lookup_tokens, config_.candidate_cap);

    ActivationResult result;
    result.query = std::string(query_text);
    result.language = query.language;
    result.complexity = complexity(query, organs_, config_.complexity_weights);
    result.k_used = adaptive_k(config_.sparsity, graph_.concept_count(), result.complexity.total);

    std::vector<ActivationEntry> strong;
    std::vector<std::pair<ConceptID, double>> weak;
    for (const auto& cid : candidates) {
        const Concept& c = graph_.concepts().at(cid);
        ActivationEntry entry;
        entry.concept_id = cid;
        entry.raw = run_matchers(query, c, false);
        std::map<MatchMethod, double> values;
        for (const auto& [m, s] : entry.raw)
            values[m] = s.value;
        entry.combined = combine_scores(values, config_.method_weights, config_.switches);
        // the reuse penalty is applied exactly once, here
        entry.adjusted = config_.switches.diversity
                             ? adjust_score(entry.combined, cid, session)
                             : entry.combined;
        if (entry.adjusted >= config_.activation_threshold)
            strong.push_back(std::move(entry));
        else if (entry.adjusted > 0.0)
            weak.emplace_back(cid, entry.adjusted);
    }

    result.entries = select_top_k(std::move(strong), result.k_used);

    if (result.entries.empty() && config_.switches.fallback) {
        std::sort(weak.begin(), weak.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second)
                return a.second > b.second;
            return a.first < b.first;
        });
        FallbackOptions opts;
        opts.stopwords = &stopwords_;
        opts.phenotype_lexicon = &phenotypes_;
        opts.basic_limit = config_.sparsity.min_concepts;
        FallbackResult fb = resolve(query, graph_, weak, opts);
        for (const auto& [cid, score] : fb.candidates) {
            if (static_cast<int>(result.entries.size()) >= result.k_used)
                break;
            ActivationEntry entry;
            entry.concept_id = cid;
            entry.combined = score;
            entry.adjusted = score;
            result.entries.push_back(std::move(entry));
        }
        result.fallback = std::move(fb);
    }

    std::set<ConceptID> active;
    for (const auto& e : result.entries)
        active.insert(e.concept_id);
    if (active.empty()) {
        result.diversity = DiversityReport{1.0, {}, {}}; // vacuously novel
    } else {
        result.diversity = diversity(active, session);
    }
    record(session, active);

    result.context = assemble_context(result.entries, result.fallback, query_text);
    return result;
}

Engine::Explanation Engine::explain(std::string_view query_text, std::string_view language,
                                    const ConceptID& concept_id,
                                    const SessionHistory& session) const {
    const Concept* target = graph_.lookup_by_code(concept_id);
    if (!target)
        throw Error("unknown concept " + concept_id.str());

    QueryTerm query = make_query_term(query_text, language, lexicon_, stopwords_);

    Explanation ex;
    ex.concept_id = target->primary_id;
    ex.standard_name = target->standard_name;
    ex.raw = run_matchers(query, *target, true);
    std::map<MatchMethod, double> values;
    for (const auto& [m, s] : ex.raw)
        values[m] = s.value;
    ex.combined = combine_scores(values, config_.method_weights, config_.switches);
    ex.in_history = session.used.count(target->primary_id) > 0;
    ex.adjusted = adjust_score(ex.combined, target->primary_id, session);
    ex.complexity = complexity(query, organs_, config_.complexity_weights);
    ex.k = adaptive_k(config_.sparsity, graph_.concept_count(), ex.complexity.total);
    ex.threshold = config_.activation_threshold;
    ex.graph_concepts = graph_.concept_count();
    return ex;
}

ContextDocument Engine::assemble_context(const std::vector<ActivationEntry>& entries,
                                         const std::optional<FallbackResult>& fallback,
                                         std::string_view query_text) const {
    ContextDocument doc;

    if (fallback) {
        ContextSection s;
        s.title = "Fallback";
        s.body = std::string(to_string(fallback->level)) + ": " + fallback->rationale;
        doc.sections.push_back(std::move(s));
    }

    for (const auto& entry : entries) {
        const Concept& c = graph_.concepts().at(entry.concept_id);

        if (c.taxonomy_node) {
            // path from root down to the concept's node
            std::vector<const TaxonomyNode*> path;
            const TaxonomyNode* node = &graph_.taxonomy().at(*c.taxonomy_node);
            path.push_back(node);
            while (node->parent) {
                node = &graph_.taxonomy().at(*node->parent);
                path.push_back(node);
            }
            std::reverse(path.begin(), path.end());
            ContextSection s;
            s.title = "Taxonomy - " + c.standard_name;
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (i)
                    s.body += " > ";
                s.body += path[i]->label;
            }
            s.sources.push_back(entry.concept_id.str());
            for (const auto* n : path)
                s.sources.push_back(n->node_id);
            doc.sections.push_back(std::move(s));
        }

        if (c.clinical_profile) {
            const ClinicalProfile& profile = graph_.clinical().at(*c.clinical_profile);
            std::vector<ClinicalFeature> features = profile.features;
            std::sort(features.begin(), features.end(),
                      [](const ClinicalFeature& a, const ClinicalFeature& b) {
                          if (a.weight != b.weight)
                              return a.weight > b.weight;
                          return a.text < b.text;
                      });
            ContextSection s;
            s.title = "Clinical features - " + c.standard_name;
            char buf[32];
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (i)
                    s.body += "; ";
                std::snprintf(buf, sizeof(buf), " (%.2f)", features[i].weight);
                s.body += features[i].text + buf;
            }
            if (!profile.diagnostic_criteria.empty()) {
                s.body += s.body.empty() ? "criteria: " : ". criteria: ";
                for (std::size_t i = 0; i < profile.diagnostic_criteria.size(); ++i) {
                    if (i)
                        s.body += "; ";
                    s.body += profile.diagnostic_criteria[i];
                }
            }
            s.sources.push_back(profile.profile_id);
            doc.sections.push_back(std::move(s));
        }

        if (!c.instance_records.empty()) {
            std::vector<std::string> records = c.instance_records;
            std::sort(records.begin(), records.end());
            if (records.size() > 3)
                records.resize(3);
            ContextSection s;
            s.title = "Cases - " + c.standard_name;
            for (std::size_t i = 0; i < records.size(); ++i) {
                const InstanceRecord& rec = graph_.instances().at(records[i]);
                if (i)
                    s.body += " | ";
                s.body += rec.record_id + ": " + rec.case_text;
                if (rec.subtype)
                    s.body += " [" + *rec.subtype + "]";
                s.sources.push_back(rec.record_id);
            }
            doc.sections.push_back(std::move(s));
        }
    }

    try {
        std::vector<EvidenceSnippet> snippets = evidence_->fetch(query_text);
        for (const auto& snip : snippets) {
            ContextSection s;
            s.title = "Evidence - " + (snip.title.empty() ? std::string("untitled") : snip.title);
            s.body = snip.body;
            if (!snip.retrieved_at.empty())
                s.body += " (retrieved " + snip.retrieved_at + ")";
            if (!snip.source_uri.empty())
                s.sources.push_back(snip.source_uri);
            doc.sections.push_back(std::move(s));
        }
    } catch (const std::exception&) {
        // evidence failures never break activation
        ContextSection s;
        s.title = "External evidence";
        s.body = "evidence unavailable";
        doc.sections.push_back(std::move(s));
    }

    return doc;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
const MatchMethod kMethodOrder[] = {MatchMethod::Code, MatchMethod::Term, MatchMethod::Variant,
                                    MatchMethod::Multilingual};
}

ordered_json to_machine_json(const ActivationResult& result) {
    ordered_json out;
    out["query"] = result.query;
    out["language"] = result.language;
    out["k"] = result.k_used;

    ordered_json cx;
    cx["length"] = result.complexity.length_factor;
    cx["term_density"] = result.complexity.term_density;
    cx["semantic"] = result.complexity.semantic_complexity;
    cx["multisystem"] = result.complexity.multisystem_factor;
    cx["total"] = result.complexity.total;
    out["complexity"] = std::move(cx);

    ordered_json entries = ordered_json::array();
    for (const auto& e : result.entries) {
        ordered_json je;
        je["concept"] = e.concept_id.str();
        ordered_json scores = ordered_json::object();
        for (MatchMethod m : kMethodOrder) {
            auto it = e.raw.find(m);
            if (it != e.raw.end())
                scores[to_string(m)] = it->second.value;
        }
        je["scores"] = std::move(scores);
        je["combined"] = e.combined;
        je["adjusted"] = e.adjusted;
        entries.push_back(std::move(je));
    }
    out["entries"] = std::move(entries);

    ordered_json div;
    div["score"] = result.diversity.score;
    ordered_json active = ordered_json::array();
    for (const auto& id : result.diversity.active)
        active.push_back(id.str());
    div["active"] = std::move(active);
    ordered_json overlap = ordered_json::array();
    for (const auto& id : result.diversity.overlap)
        overlap.push_back(id.str());
    div["overlap"] = std::move(overlap);
    out["diversity"] = std::move(div);

    if (result.fallback) {
        ordered_json fb;
        fb["level"] = static_cast<int>(result.fallback->level);
        fb["name"] = to_string(result.fallback->level);
        fb["rationale"] = result.fallback->rationale;
        ordered_json cands = ordered_json::array();
        for (const auto& [id, score] : result.fallback->candidates) {
            ordered_json jc;
            jc["concept"] = id.str();
            jc["score"] = score;
            cands.push_back(std::move(jc));
        }
        fb["candidates"] = std::move(cands);
        out["fallback"] = std::move(fb);
    } else {
        out["fallback"] = nullptr;
    }

    ordered_json sections = ordered_json::array();
    for (const auto& s : result.context.sections) {
        ordered_json js;
        js["title"] = s.title;
        js["body"] = s.body;
        js["sources"] = s.sources;
        sections.push_back(std::move(js));
    }
    out["context"] = ordered_json{{"sections", std::move(sections)}};
    return out;
}

std::string render_human(const ActivationResult& result, const KnowledgeGraph& graph) {
    std::ostringstream out;
    char buf[64];

    out << "query: " << result.query << "\n";
    std::snprintf(buf, sizeof(buf), "%.4f", result.complexity.total);
    out << "k: " << result.k_used << " (complexity " << buf << ")\n";

    if (result.entries.empty()) {
        out << "entries: none\n";
    } else {
        out << "entries:\n";
        int rank = 1;
        for (const auto& e : result.entries) {
            const Concept* c = graph.lookup_by_code(e.concept_id);
            out << "  " << rank++ << ". " << e.concept_id.str();
            if (c)
                out << "  " << c->standard_name;
            std::snprintf(buf, sizeof(buf), "  combined=%.4f adjusted=%.4f", e.combined,
                          e.adjusted);
            out << buf;
            if (!e.raw.empty()) {
                out << "  (";
                bool first = true;
                for (MatchMethod m : kMethodOrder) {
                    auto it = e.raw.find(m);
                    if (it == e.raw.end())
                        continue;
                    if (!first)
                        out << " ";
                    std::snprintf(buf, sizeof(buf), "%s=%.4f", to_string(m), it->second.value);
                    out << buf;
                    first = false;
                }
                out << ")";
            }
            out << "\n";
        }
    }

    std::snprintf(buf, sizeof(buf), "%.4f", result.diversity.score);
    out << "diversity: " << buf << " (overlap " << result.diversity.overlap.size() << "/"
        << result.diversity.active.size() << ")\n";

    if (result.fallback)
        out << "fallback: " << to_string(result.fallback->level) << " - "
            << result.fallback->rationale << "\n";

    if (!result.context.sections.empty()) {
        out << "context:\n";
        for (const auto& s : result.context.sections)
            out << "  - " << s.title << ": " << s.body << "\n";
    }
    return out.str();
}

} // namespace sparseact
