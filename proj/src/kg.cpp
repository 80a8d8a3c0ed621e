#include "sparseact/kg.hpp"

#include "sparseact/error.hpp"
#include "sparseact/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sparseact {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw Error(source + ":" + std::to_string(line) + ": " + what);
}

std::string req_string(const json& obj, const char* field, const std::string& src,
                       std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string() || it->get<std::string>().empty())
        fail(src, line, std::string("field '") + field + "' missing or not a nonempty string");
    return it->get<std::string>();
}

std::optional<std::string> opt_string(const json& obj, const char* field, const std::string& src,
                                      std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string())
        fail(src, line, std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

ConceptID parse_id(const std::string& raw, const char* field, const std::string& src,
                   std::size_t line) {
    auto id = ConceptID::parse(raw);
    if (!id)
        fail(src, line, std::string("field '") + field + "': invalid concept id '" + raw + "'");
    return *id;
}

double req_weight(const json& obj, const char* field, const std::string& src, std::size_t line) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_number())
        fail(src, line, std::string("field '") + field + "' missing or not a number");
    double w = it->get<double>();
    if (w < 0.0 || w > 1.0)
        fail(src, line, std::string("field '") + field + "' out of range [0,1]");
    return w;
}

} // namespace

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open graph file '" + path + "'");
    return load(in, path);
}

KnowledgeGraph KnowledgeGraph::load(std::istream& in, const std::string& src) {
    KnowledgeGraph g;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            fail(src, lineno, std::string("malformed record: ") + e.what());
        }
        if (!obj.is_object())
            fail(src, lineno, "record is not an object");
        std::string layer = req_string(obj, "layer", src, lineno);

        if (layer == "concept") {
            Concept c;
            c.primary_id = parse_id(req_string(obj, "id", src, lineno), "id", src, lineno);
            c.standard_name = req_string(obj, "name", src, lineno);
            if (obj.contains("xrefs")) {
                for (const auto& x : obj.at("xrefs")) {
                    ConceptID xid = parse_id(x.get<std::string>(), "xrefs", src, lineno);
                    if (xid == c.primary_id)
                        fail(src, lineno, "cross ref equals primary id " + xid.str());
                    c.cross_refs.insert(xid);
                }
            }
            if (obj.contains("aliases")) {
                std::set<std::pair<std::string, std::string>> seen;
                for (const auto& a : obj.at("aliases")) {
                    Alias alias;
                    alias.text = req_string(a, "text", src, lineno);
                    alias.language = opt_string(a, "lang", src, lineno).value_or("und");
                    alias.authority_weight = req_weight(a, "weight", src, lineno);
                    alias.source = opt_string(a, "source", src, lineno).value_or("");
                    auto key = std::make_pair(alias.language, text::fold(alias.text));
                    if (!seen.insert(key).second)
                        fail(src, lineno,
                             "duplicate alias '" + alias.text + "' for language " +
                                 alias.language);
                    c.aliases.push_back(std::move(alias));
                }
            }
            c.taxonomy_node = opt_string(obj, "taxonomy", src, lineno);
            c.clinical_profile = opt_string(obj, "clinical", src, lineno);
            if (obj.contains("instances"))
                for (const auto& r : obj.at("instances"))
                    c.instance_records.push_back(r.get<std::string>());
            if (!g.concepts_.emplace(c.primary_id, c).second)
                fail(src, lineno, "duplicate concept id " + c.primary_id.str());
        } else if (layer == "taxonomy") {
            TaxonomyNode n;
            n.node_id = req_string(obj, "id", src, lineno);
            n.label = req_string(obj, "label", src, lineno);
            n.parent = opt_string(obj, "parent", src, lineno);
            n.family_id = req_string(obj, "family", src, lineno);
            if (obj.contains("members"))
                for (const auto& m : obj.at("members"))
                    n.member_concepts.insert(
                        parse_id(m.get<std::string>(), "members", src, lineno));
            if (!g.taxonomy_.emplace(n.node_id, n).second)
                fail(src, lineno, "duplicate taxonomy node id " + n.node_id);
        } else if (layer == "clinical") {
            ClinicalProfile p;
            p.profile_id = req_string(obj, "id", src, lineno);
            p.concept_id = parse_id(req_string(obj, "concept", src, lineno), "concept", src, lineno);
            if (obj.contains("phenotypes")) {
                for (const auto& ph : obj.at("phenotypes")) {
                    ConceptID pid = parse_id(ph.get<std::string>(), "phenotypes", src, lineno);
                    if (pid.system != CodeSystem::Hpo)
                        fail(src, lineno, "phenotype " + pid.str() + " is not an HPO code");
                    p.phenotypes.insert(pid);
                }
            }
            if (obj.contains("features")) {
                for (const auto& f : obj.at("features")) {
                    ClinicalFeature feat;
                    feat.text = req_string(f, "text", src, lineno);
                    feat.weight = req_weight(f, "weight", src, lineno);
                    p.features.push_back(std::move(feat));
                }
            }
            if (obj.contains("criteria"))
                for (const auto& cr : obj.at("criteria"))
                    p.diagnostic_criteria.push_back(cr.get<std::string>());
            if (!g.clinical_.emplace(p.profile_id, p).second)
                fail(src, lineno, "duplicate clinical profile id " + p.profile_id);
        } else if (layer == "instance") {
            InstanceRecord r;
            r.record_id = req_string(obj, "id", src, lineno);
            r.concept_id = parse_id(req_string(obj, "concept", src, lineno), "concept", src, lineno);
            r.case_text = opt_string(obj, "case", src, lineno).value_or("");
            r.subtype = opt_string(obj, "subtype", src, lineno);
            if (obj.contains("pathway"))
                for (const auto& s : obj.at("pathway"))
                    r.diagnostic_pathway.push_back(s.get<std::string>());
            if (obj.contains("genes")) {
                for (const auto& gcode : obj.at("genes")) {
                    ConceptID gid = parse_id(gcode.get<std::string>(), "genes", src, lineno);
                    if (gid.system != CodeSystem::Gene)
                        fail(src, lineno, "gene link " + gid.str() + " is not a GENE code");
                    r.gene_links.insert(gid);
                }
            }
            if (!g.instances_.emplace(r.record_id, r).second)
                fail(src, lineno, "duplicate instance record id " + r.record_id);
        } else {
            fail(src, lineno, "unknown layer '" + layer + "'");
        }
    }

    if (g.concepts_.empty())
        throw Error(src + ": empty graph");

    g.validate_links(src);
    g.build_indexes();
    return g;
}

void KnowledgeGraph::validate_links(const std::string& src) {
    for (const auto& [id, c] : concepts_) {
        if (c.taxonomy_node && !taxonomy_.count(*c.taxonomy_node))
            throw Error(src + ": concept " + id.str() + " references unknown taxonomy node " +
                        *c.taxonomy_node);
        if (c.clinical_profile && !clinical_.count(*c.clinical_profile))
            throw Error(src + ": concept " + id.str() + " references unknown clinical profile " +
                        *c.clinical_profile);
        for (const auto& rec : c.instance_records)
            if (!instances_.count(rec))
                throw Error(src + ": concept " + id.str() + " references unknown instance record " +
                            rec);
    }
    for (const auto& [nid, node] : taxonomy_) {
        if (node.parent && !taxonomy_.count(*node.parent))
            throw Error(src + ": taxonomy node " + nid + " references unknown parent " +
                        *node.parent);
        for (const auto& m : node.member_concepts)
            if (!concepts_.count(m))
                throw Error(src + ": taxonomy node " + nid + " references unknown concept " +
                            m.str());
    }
    for (const auto& [pid, prof] : clinical_)
        if (!concepts_.count(prof.concept_id))
            throw Error(src + ": clinical profile " + pid + " references unknown concept " +
                        prof.concept_id.str());
    for (const auto& [rid, rec] : instances_)
        if (!concepts_.count(rec.concept_id))
            throw Error(src + ": instance record " + rid + " references unknown concept " +
                        rec.concept_id.str());

    // parent links must form a forest
    for (const auto& [nid, node] : taxonomy_) {
        std::set<std::string> seen{nid};
        const TaxonomyNode* cur = &node;
        while (cur->parent) {
            if (!seen.insert(*cur->parent).second)
                throw Error(src + ": taxonomy cycle through node " + *cur->parent);
            cur = &taxonomy_.at(*cur->parent);
        }
    }
}

void KnowledgeGraph::build_indexes() {
    for (const auto& [id, c] : concepts_)
        code_index_.emplace(id, id);
    // primary ids win over cross refs; on xref collisions the lowest
    // primary id keeps the entry
    for (const auto& [id, c] : concepts_)
        for (const auto& x : c.cross_refs)
            code_index_.emplace(x, id);

    for (const auto& [id, c] : concepts_) {
        name_index_[text::normalize(c.standard_name)].push_back(id);
        std::set<std::string> tokens;
        for (const auto& t : text::tokenize(c.standard_name))
            tokens.insert(t);
        for (const auto& a : c.aliases)
            for (const auto& t : text::tokenize(a.text))
                tokens.insert(t);
        for (const auto& t : tokens)
            token_index_[t].push_back(id);
    }

    for (const auto& [nid, node] : taxonomy_) {
        family_index_[node.family_id].push_back(nid);
        if (!node.parent)
            root_nodes_.push_back(nid);
    }

    for (const auto& [rid, rec] : instances_)
        for (const auto& gene : rec.gene_links)
            gene_index_[gene].insert(rec.concept_id);
}

const Concept* KnowledgeGraph::lookup_by_code(const ConceptID& id) const {
    auto it = code_index_.find(id);
    if (it == code_index_.end())
        return nullptr;
    return &concepts_.at(it->second);
}

std::vector<ConceptID> KnowledgeGraph::candidates_for_query(
    const std::vector<std::string>& tokens, std::size_t cap) const {
    if (cap == 0)
        throw Error("candidate cap must be positive");

    std::set<ConceptID> forced;
    std::set<std::string> qtokens;
    for (const auto& tok : tokens) {
        if (auto id = ConceptID::parse(tok))
            if (const Concept* c = lookup_by_code(*id))
                forced.insert(c->primary_id);
        for (const auto& nt : text::tokenize(tok))
            qtokens.insert(nt);
    }

    std::map<ConceptID, std::size_t> shared; // distinct shared normalized tokens
    for (const auto& nt : qtokens) {
        auto it = token_index_.find(nt);
        if (it != token_index_.end())
            for (const auto& cid : it->second)
                ++shared[cid];
    }

    std::vector<std::pair<ConceptID, std::size_t>> ranked(shared.begin(), shared.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > cap)
        ranked.resize(cap);

    std::vector<ConceptID> out(forced.begin(), forced.end());
    for (const auto& [cid, n] : ranked)
        if (!forced.count(cid))
            out.push_back(cid);
    return out;
}

std::set<ConceptID> KnowledgeGraph::family_of(const ConceptID& id) const {
    const Concept* c = lookup_by_code(id);
    if (!c)
        throw Error("unknown concept " + id.str());
    std::set<ConceptID> out;
    if (!c->taxonomy_node)
        return out;
    const TaxonomyNode& node = taxonomy_.at(*c->taxonomy_node);
    auto fam = family_index_.find(node.family_id);
    if (fam == family_index_.end())
        return out;
    for (const auto& nid : fam->second)
        for (const auto& m : taxonomy_.at(nid).member_concepts)
            out.insert(m);
    out.erase(c->primary_id);
    return out;
}

} // namespace sparseact
