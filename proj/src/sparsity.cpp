#include "sparseact/sparsity.hpp"

#include "sparseact/error.hpp"
#include "sparseact/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sparseact {

using nlohmann::json;

void SparsityConfig::validate() const {
    if (min_concepts < 1)
        throw Error("min_concepts must be positive");
    if (min_concepts > max_concepts)
        throw Error("min_concepts must not exceed max_concepts");
    if (scale <= 0.0)
        throw Error("sparsity scale must be positive");
}

ComplexityWeights ComplexityWeights::normalized(double l, double t, double s, double m) {
    if (l < 0 || t < 0 || s < 0 || m < 0)
        throw Error("complexity weights must be non-negative");
    double sum = l + t + s + m;
    if (sum <= 0)
        throw Error("complexity weights must not all be zero");
    return ComplexityWeights{l / sum, t / sum, s / sum, m / sum};
}

namespace {

struct OrganCategory {
    const char* name;
    const char* keywords; // space separated
};

const OrganCategory kDefaultOrganSystems[] = {
    {"neurological",
     "seizure seizures epilepsy ataxia neuropathy brain cerebellar cognitive tremor paralysis "
     "stroke headache dementia neurodegeneration dystonia myoclonus encephalopathy"},
    {"cardiovascular",
     "heart cardiac cardiomyopathy arrhythmia hypertension vascular aortic myocardial "
     "tachycardia bradycardia angina vasculitis"},
    {"respiratory",
     "lung lungs pulmonary breathing dyspnea cough airway bronchiectasis apnea respiratory "
     "pneumonia"},
    {"gastrointestinal",
     "liver hepatic intestinal bowel stomach pancreas pancreatic vomiting diarrhea "
     "hepatomegaly cirrhosis dysphagia gastrointestinal"},
    {"musculoskeletal",
     "muscle muscular myopathy bone skeletal joint joints arthritis scoliosis fracture "
     "contracture hypotonia weakness osteoporosis"},
    {"dermatological",
     "skin rash angiokeratoma lesion lesions cutaneous hair nail nails ichthyosis "
     "telangiectasia photosensitivity"},
    {"renal",
     "kidney kidneys renal urinary proteinuria nephropathy hematuria nephrotic dialysis"},
    {"endocrine",
     "hormone hormonal thyroid diabetes adrenal pituitary growth gonadal insulin "
     "hypoglycemia obesity"},
    {"hematologic",
     "anemia bleeding thrombocytopenia immune immunodeficiency lymphoma leukemia infection "
     "infections spleen splenomegaly coagulation neutropenia"},
    {"sensory",
     "eye eyes vision ocular retina retinal cataract corneal hearing deafness blindness "
     "nystagmus optic"},
};

} // namespace

const OrganSystemTable& OrganSystemTable::defaults() {
    static const OrganSystemTable instance = [] {
        OrganSystemTable t;
        for (const auto& cat : kDefaultOrganSystems) {
            std::set<std::string>& kws = t.categories_[cat.name];
            for (const auto& tok : text::tokenize(cat.keywords))
                kws.insert(tok);
        }
        return t;
    }();
    return instance;
}

OrganSystemTable OrganSystemTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open organ-system table '" + path + "'");
    OrganSystemTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
        }
        std::string cat = obj.value("category", "");
        if (cat.empty())
            throw Error(path + ":" + std::to_string(lineno) + ": missing category");
        std::set<std::string>& kws = t.categories_[cat];
        for (const auto& kw : obj.at("keywords"))
            for (const auto& tok : text::tokenize(kw.get<std::string>()))
                kws.insert(tok);
    }
    if (t.categories_.empty())
        throw Error(path + ": empty organ-system table");
    return t;
}

std::size_t OrganSystemTable::categories_hit(const std::vector<std::string>& tokens) const {
    std::size_t hits = 0;
    for (const auto& [name, kws] : categories_) {
        for (const auto& tok : tokens) {
            if (kws.count(tok)) {
                ++hits;
                break;
            }
        }
    }
    return hits;
}

double complexity_total(const ComplexityWeights& w, double length, double density,
                        double semantic, double multisystem) {
    return w.length * length + w.term_density * density + w.semantic * semantic +
           w.multisystem * multisystem;
}

namespace {

// Clause segments: sentence punctuation and coordinating conjunctions both
// split. Counted on the raw text so punctuation is still visible.
std::size_t clause_count(const std::string& raw) {
    static const std::set<std::string> conjunctions = {
        "and", "or", "but", "nor", "while", "whereas", "because", "although",
        "y", "o", "pero", "et", "ou", "mais", "und", "oder", "aber", "e", "ed",
    };
    std::size_t clauses = 0;
    bool content = false; // clause holds a non-conjunction word
    std::string word;

    auto end_word = [&]() {
        if (word.empty())
            return false;
        bool is_conj = conjunctions.count(text::fold(word)) > 0;
        if (!is_conj && !text::tokenize(word).empty())
            content = true;
        word.clear();
        return is_conj;
    };
    auto end_clause = [&]() {
        if (content)
            ++clauses;
        content = false;
    };

    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '.' || c == ';' || c == '!' || c == '?') {
            // a dot inside a token (codes, abbreviations) does not end a clause
            bool interior =
                i + 1 < raw.size() && std::isalnum(static_cast<unsigned char>(raw[i + 1]));
            if (interior) {
                word.push_back(c);
                continue;
            }
            end_word();
            end_clause();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (end_word())
                end_clause();
        } else {
            word.push_back(c);
        }
    }
    if (end_word())
        end_clause();
    end_clause();
    return clauses;
}

} // namespace

ComplexityBreakdown complexity(const QueryTerm& query, const OrganSystemTable& organs,
                               const ComplexityWeights& weights) {
    ComplexityBreakdown b;
    const std::size_t tokens = query.tokens.size();
    if (tokens == 0) {
        return b; // all factors zero
    }

    b.length_factor = std::min(1.0, static_cast<double>(tokens) / 50.0);

    std::size_t lexicon_tokens = 0;
    for (const auto& u : query.semantic_units)
        if (u.lexicon_hit)
            lexicon_tokens += u.token_count;
    b.term_density = static_cast<double>(lexicon_tokens) / static_cast<double>(tokens);

    std::set<std::string> distinct(query.tokens.begin(), query.tokens.end());
    double distinct_ratio = static_cast<double>(distinct.size()) / static_cast<double>(tokens);
    double clause_factor =
        std::min(1.0, static_cast<double>(clause_count(query.raw_text)) / 4.0);
    b.semantic_complexity = distinct_ratio * clause_factor;

    b.multisystem_factor =
        std::min(1.0, static_cast<double>(organs.categories_hit(query.tokens)) / 10.0);

    b.total = complexity_total(weights, b.length_factor, b.term_density, b.semantic_complexity,
                               b.multisystem_factor);
    return b;
}

int adaptive_k(const SparsityConfig& config, std::size_t concept_count, double complexity_total) {
    config.validate();
    double raw = config.scale * static_cast<double>(concept_count) * complexity_total;
    long long rounded = static_cast<long long>(std::floor(raw + 0.5));
    long long k = std::max<long long>(config.min_concepts,
                                      std::min<long long>(config.max_concepts, rounded));
    return static_cast<int>(k);
}

} // namespace sparseact
