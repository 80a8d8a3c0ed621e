#pragma once

#include "sparseact/ids.hpp"

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sparseact {

struct Alias {
    std::string text;
    std::string language = "und"; // BCP-47 style tag
    double authority_weight = 0.5;
    std::string source;
};

struct Concept {
    ConceptID primary_id;
    std::set<ConceptID> cross_refs;
    std::string standard_name;
    std::vector<Alias> aliases;
    std::optional<std::string> taxonomy_node;
    std::optional<std::string> clinical_profile;
    std::vector<std::string> instance_records;
};

struct TaxonomyNode {
    std::string node_id;
    std::string label;
    std::optional<std::string> parent;
    std::string family_id;
    std::set<ConceptID> member_concepts;
};

struct ClinicalFeature {
    std::string text;
    double weight = 0.5;
};

struct ClinicalProfile {
    std::string profile_id;
    ConceptID concept_id;
    std::set<ConceptID> phenotypes; // HPO codes
    std::vector<ClinicalFeature> features;
    std::vector<std::string> diagnostic_criteria;
};

struct InstanceRecord {
    std::string record_id;
    ConceptID concept_id;
    std::string case_text;
    std::optional<std::string> subtype;
    std::vector<std::string> diagnostic_pathway;
    std::set<ConceptID> gene_links; // GENE codes
};

// Three layers plus lookup indexes. Immutable after load; safe for
// concurrent readers.
class KnowledgeGraph {
public:
    // One JSON record per line with a "layer" discriminator
    // (concept | taxonomy | clinical | instance). Order-independent:
    // records are collected first, links validated after.
    static KnowledgeGraph load(const std::string& path);
    static KnowledgeGraph load(std::istream& in, const std::string& source_name);

    const std::map<ConceptID, Concept>& concepts() const { return concepts_; }
    const std::map<std::string, TaxonomyNode>& taxonomy() const { return taxonomy_; }
    const std::map<std::string, ClinicalProfile>& clinical() const { return clinical_; }
    const std::map<std::string, InstanceRecord>& instances() const { return instances_; }

    std::size_t concept_count() const { return concepts_.size(); }

    // Concept whose primary id or cross refs contain `id`; nullptr otherwise.
    const Concept* lookup_by_code(const ConceptID& id) const;

    // Concepts sharing at least one normalized token with the query, ranked
    // by shared-token count then id, truncated to `cap`. Tokens that parse
    // as codes force-include their concepts ahead of the ranked list.
    std::vector<ConceptID> candidates_for_query(const std::vector<std::string>& tokens,
                                                std::size_t cap) const;

    // Members of all taxonomy nodes sharing the concept's family, minus the
    // concept itself. Empty when the concept has no taxonomy link.
    std::set<ConceptID> family_of(const ConceptID& id) const;

    const std::map<std::string, std::vector<ConceptID>>& token_index() const {
        return token_index_;
    }
    const std::map<std::string, std::vector<ConceptID>>& name_index() const {
        return name_index_;
    }

    // GENE code -> concepts whose instance records link that gene.
    const std::map<ConceptID, std::set<ConceptID>>& gene_index() const { return gene_index_; }

    // Taxonomy nodes without a parent.
    const std::vector<std::string>& root_nodes() const { return root_nodes_; }

private:
    std::map<ConceptID, Concept> concepts_;
    std::map<std::string, TaxonomyNode> taxonomy_;
    std::map<std::string, ClinicalProfile> clinical_;
    std::map<std::string, InstanceRecord> instances_;

    std::map<ConceptID, ConceptID> code_index_; // any id -> primary id
    std::map<std::string, std::vector<ConceptID>> name_index_;
    std::map<std::string, std::vector<ConceptID>> token_index_;
    std::map<std::string, std::vector<std::string>> family_index_; // family -> node ids
    std::map<ConceptID, std::set<ConceptID>> gene_index_;
    std::vector<std::string> root_nodes_;

    void validate_links(const std::string& source_name);
    void build_indexes();
};

} // namespace sparseact
