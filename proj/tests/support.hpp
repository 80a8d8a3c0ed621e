#pragma once

// shared fixture helpers and oracles for the test binaries

#include "sparseact/fallback.hpp"
#include "sparseact/kg.hpp"
#include "sparseact/match.hpp"
#include "sparseact/text.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

// Temp file removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& contents, const std::string& suffix = ".tmp") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("sparseact_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++) + suffix))
                    .string();
        std::ofstream out(path_);
        out << contents;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Letter-only suffix for fixture names; digits in names would share
// bigrams with code-shaped queries.
inline std::string suffix(int i) {
    std::string s;
    s.push_back(static_cast<char>('a' + (i - 1) / 10));
    s.push_back(static_cast<char>('a' + (i - 1) % 10));
    return s;
}

// A 50-concept graph with all three layers populated: five families of ten
// concepts, two taxonomy nodes per family, clinical profiles for the first
// six concepts of each family and instance records (with gene links) for
// the first three.
//
// Concept i (1..50): id ORPHA:10<i>, name "tessar<s> velkara<s> syndrome",
// alias "mirelta<s> disorder" (weight 0.9), xref OMIM:3<i padded to 5>,
// where <s> = suffix(i).
inline std::string synthetic_graph_text() {
    std::ostringstream out;
    auto orpha = [](int i) { return "ORPHA:10" + std::to_string(i); };

    for (int i = 1; i <= 50; ++i) {
        int family = (i - 1) / 10;          // 0..4
        int slot = (i - 1) % 10;            // 0..9
        std::string node = slot < 6 ? "nd-fam" + std::to_string(family) + "-root"
                                    : "nd-fam" + std::to_string(family) + "-sub";
        char omim[8];
        std::snprintf(omim, sizeof(omim), "3%05d", i);
        std::string s = suffix(i);

        out << "{\"layer\":\"concept\",\"id\":\"" << orpha(i) << "\",\"name\":\"tessar" << s
            << " velkara" << s << " syndrome\",\"xrefs\":[\"OMIM:" << omim
            << "\"],\"aliases\":[{\"text\":\"mirelta" << s
            << " disorder\",\"lang\":\"en\",\"weight\":0.9,\"source\":\"fixture\"}]"
            << ",\"taxonomy\":\"" << node << "\"";
        if (slot < 6)
            out << ",\"clinical\":\"cp-" << i << "\"";
        if (slot < 3)
            out << ",\"instances\":[\"ir-" << i << "\"]";
        out << "}\n";
    }

    for (int f = 0; f < 5; ++f) {
        out << "{\"layer\":\"taxonomy\",\"id\":\"nd-fam" << f << "-root\",\"label\":\"family "
            << f << " root\",\"family\":\"fam-" << f << "\",\"members\":[";
        for (int s = 0; s < 6; ++s)
            out << (s ? "," : "") << "\"" << orpha(f * 10 + s + 1) << "\"";
        out << "]}\n";
        out << "{\"layer\":\"taxonomy\",\"id\":\"nd-fam" << f << "-sub\",\"label\":\"family "
            << f << " subgroup\",\"parent\":\"nd-fam" << f << "-root\",\"family\":\"fam-" << f
            << "\",\"members\":[";
        for (int s = 6; s < 10; ++s)
            out << (s > 6 ? "," : "") << "\"" << orpha(f * 10 + s + 1) << "\"";
        out << "]}\n";
    }

    for (int i = 1; i <= 50; ++i) {
        int slot = (i - 1) % 10;
        std::string s = suffix(i);
        if (slot < 6) {
            char hp_own[16], hp_shared[16];
            std::snprintf(hp_own, sizeof(hp_own), "HP:%07d", 2000 + i);
            std::snprintf(hp_shared, sizeof(hp_shared), "HP:%07d", 3000 + i % 5);
            out << "{\"layer\":\"clinical\",\"id\":\"cp-" << i << "\",\"concept\":\"" << orpha(i)
                << "\",\"phenotypes\":[\"" << hp_own << "\",\"" << hp_shared
                << "\"],\"features\":[{\"text\":\"velkara" << s
                << " swelling\",\"weight\":0.8},{\"text\":\"chronic fatigue\",\"weight\":0.3}]"
                << ",\"criteria\":[\"tessar" << s << " assay\"]}\n";
        }
        if (slot < 3) {
            out << "{\"layer\":\"instance\",\"id\":\"ir-" << i << "\",\"concept\":\"" << orpha(i)
                << "\",\"case\":\"index case " << i
                << " with progressive course\",\"subtype\":\"typical\",\"pathway\":[\"referral\","
                   "\"confirmatory testing\"],\"genes\":[\"GENE:GN" << i << "\"]}\n";
        }
    }
    return out.str();
}

inline sparseact::KnowledgeGraph load_synthetic_graph() {
    std::istringstream in(synthetic_graph_text());
    return sparseact::KnowledgeGraph::load(in, "synthetic");
}

// Exhaustive segmentation oracle: enumerates every split of the token list
// into lexicon terms and single tokens, then picks the segmentation a
// leftmost-longest reader would choose (longer span first; at equal length
// a lexicon hit beats a residual token). Independent of the greedy
// implementation under test.
inline std::vector<sparseact::SemanticUnit>
oracle_segment(const std::vector<std::string>& tokens,
               const std::vector<std::vector<std::string>>& lexicon_terms,
               const sparseact::StopwordSet& stopwords) {
    struct Span {
        std::size_t len;
        bool lex;
    };
    std::vector<std::vector<Span>> all;
    std::vector<Span> current;

    auto matches_at = [&](std::size_t pos, std::size_t len) {
        if (pos + len > tokens.size())
            return false;
        for (const auto& term : lexicon_terms) {
            if (term.size() != len)
                continue;
            bool equal = true;
            for (std::size_t i = 0; i < len && equal; ++i)
                equal = term[i] == tokens[pos + i];
            if (equal)
                return true;
        }
        return false;
    };

    std::function<void(std::size_t)> recurse = [&](std::size_t pos) {
        if (pos == tokens.size()) {
            all.push_back(current);
            return;
        }
        for (std::size_t len = tokens.size() - pos; len >= 1; --len) {
            if (matches_at(pos, len)) {
                current.push_back({len, true});
                recurse(pos + len);
                current.pop_back();
            }
        }
        current.push_back({1, false});
        recurse(pos + 1);
        current.pop_back();
    };
    recurse(0);

    auto better = [](const std::vector<Span>& a, const std::vector<Span>& b) {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (a[i].len != b[i].len)
                return a[i].len > b[i].len;
            if (a[i].lex != b[i].lex)
                return a[i].lex;
        }
        return a.size() < b.size();
    };
    const std::vector<Span>* best = &all.front();
    for (const auto& seg : all)
        if (better(seg, *best))
            best = &seg;

    std::vector<sparseact::SemanticUnit> units;
    std::size_t pos = 0;
    for (const auto& span : *best) {
        std::string text;
        for (std::size_t i = 0; i < span.len; ++i) {
            if (i)
                text.push_back(' ');
            text += tokens[pos + i];
        }
        sparseact::SemanticUnit u;
        u.text = text;
        u.token_count = span.len;
        u.lexicon_hit = span.lex;
        u.weight = span.lex ? 1.0 : (stopwords.contains(text) ? 0.1 : 0.5);
        units.push_back(std::move(u));
        pos += span.len;
    }
    return units;
}

inline bool units_equal(const std::vector<sparseact::SemanticUnit>& a,
                        const std::vector<sparseact::SemanticUnit>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].text != b[i].text || a[i].weight != b[i].weight ||
            a[i].lexicon_hit != b[i].lexicon_hit || a[i].token_count != b[i].token_count)
            return false;
    }
    return true;
}

// Straight-line re-evaluation of all five rescue levels, written per
// concept rather than per index so it does not share code paths with the
// implementation under test.
struct IndependentLevels {
    std::map<sparseact::ConceptID, double> by_level[5];
};

inline IndependentLevels independent_levels(
    const sparseact::QueryTerm& query, const sparseact::KnowledgeGraph& graph,
    const std::vector<std::pair<sparseact::ConceptID, double>>& weak,
    const sparseact::StopwordSet& stopwords, const sparseact::PhenotypeLexicon& phenotypes,
    int basic_limit) {
    using sparseact::ConceptID;
    
    IndependentLevels out;

    // level 1: concepts whose taxonomy family contains a weak match
    for (const auto& [cid, entry] : graph.concepts()) {
        double best = -1.0;
        for (const auto& [wid, wscore] : weak) {
            const sparseact::Concept* w = graph.lookup_by_code(wid);
            if (!w || w->primary_id == cid || !w->taxonomy_node)
                continue;
            const std::string& family = graph.taxonomy().at(*w->taxonomy_node).family_id;
            bool related = false;
            for (const auto& [nid, node] : graph.taxonomy())
                if (node.family_id == family && node.member_concepts.count(cid))
                    related = true;
            if (related)
                best = std::max(best, wscore * 0.9);
        }
        if (best >= 0.0)
            out.by_level[0][cid] = best;
    }

    // level 2: HPO overlap with clinical profiles
    std::set<ConceptID> qphen;
    for (const auto& code : query.extracted_codes)
        if (code.system == sparseact::CodeSystem::Hpo)
            qphen.insert(code);
    for (const auto& code : phenotypes.codes_in(query.tokens))
        qphen.insert(code);
    if (!qphen.empty()) {
        for (const auto& [pid, profile] : graph.clinical()) {
            std::size_t inter = 0;
            for (const auto& p : qphen)
                inter += profile.phenotypes.count(p);
            std::size_t uni = qphen.size() + profile.phenotypes.size() - inter;
            if (inter == 0 || uni == 0)
                continue;
            double j = double(inter) / double(uni);
            auto it = out.by_level[1].find(profile.concept_id);
            if (it == out.by_level[1].end() || it->second < j)
                out.by_level[1][profile.concept_id] = j;
        }
    }

    // level 3: shared non-stopword vocabulary with clinical features
    std::set<std::string> qtok;
    for (const auto& t : query.tokens)
        if (!stopwords.contains(t))
            qtok.insert(t);
    for (const auto& [pid, profile] : graph.clinical()) {
        double matched = 0.0, total = 0.0;
        for (const auto& f : profile.features) {
            total += f.weight;
            bool hit = false;
            for (const auto& t : sparseact::text::tokenize(f.text))
                hit = hit || qtok.count(t) > 0;
            if (hit)
                matched += f.weight;
        }
        if (matched > 0.0 && total > 0.0) {
            double s = matched / total;
            auto it = out.by_level[2].find(profile.concept_id);
            if (it == out.by_level[2].end() || it->second < s)
                out.by_level[2][profile.concept_id] = s;
        }
    }

    // level 4: gene mentions against instance records
    std::set<ConceptID> qgenes;
    for (const auto& tok : query.tokens) {
        std::string upper(tok);
        for (auto& ch : upper)
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        ConceptID gid{sparseact::CodeSystem::Gene, upper};
        for (const auto& [rid, rec] : graph.instances())
            if (rec.gene_links.count(gid))
                qgenes.insert(gid);
    }
    if (!qgenes.empty()) {
        for (const auto& [rid, rec] : graph.instances()) {
            std::size_t inter = 0;
            for (const auto& g : qgenes)
                inter += rec.gene_links.count(g);
            std::size_t uni = qgenes.size() + rec.gene_links.size() - inter;
            if (inter == 0)
                continue;
            double j = double(inter) / double(uni);
            auto it = out.by_level[3].find(rec.concept_id);
            if (it == out.by_level[3].end() || it->second < j)
                out.by_level[3][rec.concept_id] = j;
        }
    }

    // level 5: best-covered roots, members in id order
    std::vector<std::string> roots;
    for (const auto& [nid, node] : graph.taxonomy())
        if (!node.parent)
            roots.push_back(nid);
    std::sort(roots.begin(), roots.end(), [&](const std::string& a, const std::string& b) {
        auto ma = graph.taxonomy().at(a).member_concepts.size();
        auto mb = graph.taxonomy().at(b).member_concepts.size();
        if (ma != mb)
            return ma > mb;
        return a < b;
    });
    for (const auto& nid : roots) {
        for (const auto& m : graph.taxonomy().at(nid).member_concepts) {
            if (static_cast<int>(out.by_level[4].size()) >= basic_limit)
                break;
            out.by_level[4].emplace(m, 0.05);
        }
    }
    return out;
}

} // namespace testsupport
