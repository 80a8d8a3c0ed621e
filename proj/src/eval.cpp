#include "sparseact/eval.hpp"

#include "sparseact/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparseact {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<CorpusCase> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open corpus file '" + path + "'");
    std::vector<CorpusCase> corpus;
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
            throw Error(path + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
        }
        CorpusCase c;
        c.case_id = obj.value("case", "");
        if (c.case_id.empty())
            throw Error(path + ":" + std::to_string(lineno) + ": missing case id");
        c.question = obj.value("question", "");
        if (c.question.empty())
            throw Error(path + ":" + std::to_string(lineno) + ": missing question");
        if (!obj.contains("gold") || !obj.at("gold").is_array() || obj.at("gold").empty())
            throw Error(path + ":" + std::to_string(lineno) + ": gold concepts must be nonempty");
        for (const auto& g : obj.at("gold")) {
            auto id = ConceptID::parse(g.get<std::string>());
            if (!id)
                throw Error(path + ":" + std::to_string(lineno) + ": invalid gold concept '" +
                            g.get<std::string>() + "'");
            c.gold.insert(*id);
        }
        c.category = obj.value("category", "");
        corpus.push_back(std::move(c));
    }
    return corpus;
}

namespace {

struct Accumulator {
    std::size_t inter = 0;
    std::size_t pred = 0;
    std::size_t gold = 0;
    std::size_t cases = 0;
    std::size_t top1_hits = 0;
    std::map<int, std::size_t> topn_hits;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
};

MetricsBucket finalize(const Accumulator& acc, const std::vector<int>& ns, bool macro) {
    MetricsBucket b;
    b.case_count = acc.cases;
    if (acc.cases == 0)
        return b;
    if (macro) {
        b.precision = acc.macro_precision / static_cast<double>(acc.cases);
        b.recall = acc.macro_recall / static_cast<double>(acc.cases);
    } else {
        b.precision =
            acc.pred == 0 ? 0.0 : static_cast<double>(acc.inter) / static_cast<double>(acc.pred);
        b.recall =
            acc.gold == 0 ? 0.0 : static_cast<double>(acc.inter) / static_cast<double>(acc.gold);
    }
    b.accuracy = static_cast<double>(acc.top1_hits) / static_cast<double>(acc.cases);
    for (int n : ns) {
        auto it = acc.topn_hits.find(n);
        std::size_t hits = it == acc.topn_hits.end() ? 0 : it->second;
        b.top_n[n] = static_cast<double>(hits) / static_cast<double>(acc.cases);
    }
    return b;
}

} // namespace

MetricsReport evaluate(const std::vector<CorpusCase>& corpus, const Engine& engine,
                       const std::vector<int>& ns_in, bool macro) {
    if (corpus.empty())
        throw Error("empty corpus");
    std::vector<int> ns = ns_in;
    for (int n : ns)
        if (n < 1)
            throw Error("top-N cutoffs must be positive");
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    MetricsReport report;
    report.macro = macro;
    report.ns = ns;

    Accumulator overall;
    std::map<std::string, Accumulator> per_category;

    for (const auto& c : corpus) {
        // resolve gold codes to primary ids; unresolvable gold skips the case
        std::set<ConceptID> gold;
        std::string missing;
        for (const auto& g : c.gold) {
            const Concept* hit = engine.graph().lookup_by_code(g);
            if (!hit) {
                missing = g.str();
                break;
            }
            gold.insert(hit->primary_id);
        }
        if (!missing.empty()) {
            report.warnings.push_back("case " + c.case_id + " skipped: unknown gold concept " +
                                      missing);
            continue;
        }

        SessionHistory session;
        session.reuse_penalty = engine.config().reuse_penalty;
        ActivationResult result = engine.activate(c.question, "und", session);

        std::vector<ConceptID> predicted;
        predicted.reserve(result.entries.size());
        for (const auto& e : result.entries)
            predicted.push_back(e.concept_id);

        std::size_t inter = 0;
        for (const auto& p : predicted)
            inter += gold.count(p);

        bool top1 = !predicted.empty() && gold.count(predicted.front()) > 0;

        std::string category = c.category.empty() ? "uncategorized" : c.category;
        Accumulator* accs[] = {&overall, &per_category[category]};
        for (Accumulator* acc : accs) {
            acc->cases += 1;
            acc->inter += inter;
            acc->pred += predicted.size();
            acc->gold += gold.size();
            acc->top1_hits += top1 ? 1 : 0;
            acc->macro_precision +=
                predicted.empty()
                    ? 0.0
                    : static_cast<double>(inter) / static_cast<double>(predicted.size());
            acc->macro_recall += static_cast<double>(inter) / static_cast<double>(gold.size());
            for (int n : ns) {
                std::size_t limit = std::min<std::size_t>(predicted.size(),
                                                          static_cast<std::size_t>(n));
                bool hit = false;
                for (std::size_t i = 0; i < limit && !hit; ++i)
                    hit = gold.count(predicted[i]) > 0;
                acc->topn_hits[n] += hit ? 1 : 0;
            }
        }
    }

    if (overall.cases == 0)
        throw Error("no evaluable cases (all gold concepts unknown)");

    report.overall = finalize(overall, ns, macro);
    for (const auto& [cat, acc] : per_category)
        report.per_category[cat] = finalize(acc, ns, macro);
    return report;
}

std::string render_table(const MetricsReport& report) {
    std::ostringstream out;
    char buf[64];

    out << "bucket";
    std::size_t name_width = std::string("overall").size();
    for (const auto& [cat, b] : report.per_category)
        name_width = std::max(name_width, cat.size());
    for (std::size_t i = 6; i < name_width; ++i)
        out << ' ';
    out << "  cases  precision  recall  accuracy";
    for (int n : report.ns)
        out << "  top-" << n;
    out << "\n";

    auto row = [&](const std::string& name, const MetricsBucket& b) {
        out << name;
        for (std::size_t i = name.size(); i < name_width; ++i)
            out << ' ';
        std::snprintf(buf, sizeof(buf), "  %5zu  %9.4f  %6.4f  %8.4f", b.case_count, b.precision,
                      b.recall, b.accuracy);
        out << buf;
        for (int n : report.ns) {
            double v = b.top_n.count(n) ? b.top_n.at(n) : 0.0;
            int width = 5 + static_cast<int>(std::to_string(n).size());
            std::snprintf(buf, sizeof(buf), "  %*.4f", width, v);
            out << buf;
        }
        out << "\n";
    };

    row("overall", report.overall);
    for (const auto& [cat, b] : report.per_category)
        row(cat, b);

    for (const auto& w : report.warnings)
        out << "warning: " << w << "\n";
    return out.str();
}

namespace {
ordered_json bucket_json(const MetricsBucket& b) {
    ordered_json out;
    out["cases"] = b.case_count;
    out["precision"] = b.precision;
    out["recall"] = b.recall;
    out["accuracy"] = b.accuracy;
    ordered_json tn = ordered_json::object();
    for (const auto& [n, v] : b.top_n)
        tn[std::to_string(n)] = v;
    out["top_n"] = std::move(tn);
    return out;
}
} // namespace

ordered_json to_machine_json(const MetricsReport& report) {
    ordered_json out;
    out["averaging"] = report.macro ? "macro" : "micro";
    out["cases"] = report.overall.case_count;
    out["precision"] = report.overall.precision;
    out["recall"] = report.overall.recall;
    out["accuracy"] = report.overall.accuracy;
    ordered_json tn = ordered_json::object();
    for (const auto& [n, v] : report.overall.top_n)
        tn[std::to_string(n)] = v;
    out["top_n"] = std::move(tn);
    ordered_json cats = ordered_json::object();
    for (const auto& [cat, b] : report.per_category)
        cats[cat] = bucket_json(b);
    out["categories"] = std::move(cats);
    out["warnings"] = report.warnings;
    return out;
}

} // namespace sparseact
