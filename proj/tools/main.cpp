#include "sparseact/error.hpp"
#include "sparseact/eval.hpp"
#include "sparseact/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace sparseact;

EngineConfig load_config(const std::string& path) {
    if (path.empty())
        return EngineConfig{};
    return EngineConfig::from_file(path);
}

int cmd_ingest(const std::string& kg_path) {
    KnowledgeGraph graph = KnowledgeGraph::load(kg_path);
    std::cout << "concepts: " << graph.concepts().size() << "\n"
              << "taxonomy nodes: " << graph.taxonomy().size() << "\n"
              << "clinical profiles: " << graph.clinical().size() << "\n"
              << "instance records: " << graph.instances().size() << "\n";
    return 0;
}

int cmd_activate(const std::string& kg_path, const std::string& query, const std::string& lang,
                 const std::string& session_path, const std::string& config_path,
                 const std::string& format) {
    KnowledgeGraph graph = KnowledgeGraph::load(kg_path);
    EngineConfig config = load_config(config_path);
    Engine engine(graph, config);

    SessionHistory session;
    session.reuse_penalty = config.reuse_penalty;
    if (!session_path.empty())
        session = SessionHistory::load(session_path, config.reuse_penalty);

    ActivationResult result = engine.activate(query, lang, session);

    if (!session_path.empty())
        session.save(session_path);

    if (format == "machine")
        std::cout << to_machine_json(result).dump() << "\n";
    else
        std::cout << render_human(result, graph);
    return 0;
}

int cmd_evaluate(const std::string& kg_path, const std::string& corpus_path,
                 const std::vector<int>& top_n, const std::string& config_path,
                 const std::string& format, bool macro) {
    KnowledgeGraph graph = KnowledgeGraph::load(kg_path);
    EngineConfig config = load_config(config_path);
    Engine engine(graph, config);

    std::vector<CorpusCase> corpus = load_corpus(corpus_path);
    MetricsReport report = evaluate(corpus, engine, top_n, macro);

    if (format == "machine")
        std::cout << to_machine_json(report).dump() << "\n";
    else
        std::cout << render_table(report);
    return 0;
}

int cmd_explain(const std::string& kg_path, const std::string& query,
                const std::string& concept_text, const std::string& session_path,
                const std::string& config_path) {
    KnowledgeGraph graph = KnowledgeGraph::load(kg_path);
    EngineConfig config = load_config(config_path);
    Engine engine(graph, config);

    auto concept_id = ConceptID::parse(concept_text);
    if (!concept_id)
        throw Error("invalid concept id '" + concept_text + "'");

    SessionHistory session;
    session.reuse_penalty = config.reuse_penalty;
    if (!session_path.empty())
        session = SessionHistory::load(session_path, config.reuse_penalty);

    Engine::Explanation ex = engine.explain(query, "und", *concept_id, session);

    char buf[128];
    std::cout << "concept: " << ex.concept_id.str() << " (" << ex.standard_name << ")\n";
    std::cout << "scores:\n";
    for (const auto& [method, score] : ex.raw) {
        std::snprintf(buf, sizeof(buf), "  %-13s %.4f", (std::string(to_string(method)) + ":").c_str(),
                      score.value);
        std::cout << buf;
        if (!score.evidence.empty()) {
            std::cout << "  [";
            for (std::size_t i = 0; i < score.evidence.size(); ++i) {
                if (i)
                    std::cout << "; ";
                std::cout << score.evidence[i];
            }
            std::cout << "]";
        }
        std::cout << "\n";
    }
    std::snprintf(buf, sizeof(buf), "combined: %.4f\n", ex.combined);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "adjusted: %.4f (in session history: %s, reuse penalty %.2f)\n",
                  ex.adjusted, ex.in_history ? "yes" : "no",
                  engine.config().reuse_penalty);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf),
                  "complexity: length=%.4f term_density=%.4f semantic=%.4f multisystem=%.4f "
                  "total=%.4f\n",
                  ex.complexity.length_factor, ex.complexity.term_density,
                  ex.complexity.semantic_complexity, ex.complexity.multisystem_factor,
                  ex.complexity.total);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "k: %d (graph concepts: %zu, min %d, max %d, scale %.4f)\n",
                  ex.k, ex.graph_concepts, engine.config().sparsity.min_concepts,
                  engine.config().sparsity.max_concepts, engine.config().sparsity.scale);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "threshold: %.4f -> %s\n", ex.threshold,
                  ex.adjusted >= ex.threshold ? "activated" : "below threshold");
    std::cout << buf;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rare-disease concept activation engine"};
    app.require_subcommand(1);

    std::string kg_path, query, lang = "und", session_path, config_path, format = "table";
    std::string corpus_path, concept_text;
    std::vector<int> top_n = {3, 10};
    bool macro = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--kg", kg_path, "knowledge graph file")->required();
        cmd->add_option("--config", config_path, "engine config file")
            ->envname("SPARSEACT_CONFIG");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "load and validate a knowledge graph");
    add_common(ingest);

    CLI::App* activate = app.add_subcommand("activate", "activate concepts for a query");
    add_common(activate);
    activate->add_option("--query", query, "query text")->required();
    activate->add_option("--lang", lang, "language tag");
    activate->add_option("--session", session_path, "session history file");
    activate->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"table", "machine"}));

    CLI::App* evaluate = app.add_subcommand("evaluate", "score the engine on a labeled corpus");
    add_common(evaluate);
    evaluate->add_option("--corpus", corpus_path, "corpus file")->required();
    evaluate->add_option("--top-n", top_n, "top-N recall cutoffs")->delimiter(',');
    evaluate->add_flag("--macro", macro, "macro-average precision and recall");
    evaluate->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"table", "machine"}));

    CLI::App* explain = app.add_subcommand("explain", "score breakdown for one concept");
    add_common(explain);
    explain->add_option("--query", query, "query text")->required();
    explain->add_option("--concept", concept_text, "concept id")->required();
    explain->add_option("--session", session_path, "session history file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << app.help();
        return 1;
    }

    try {
        if (app.got_subcommand(ingest))
            return cmd_ingest(kg_path);
        if (app.got_subcommand(activate))
            return cmd_activate(kg_path, query, lang, session_path, config_path, format);
        if (app.got_subcommand(evaluate))
            return cmd_evaluate(kg_path, corpus_path, top_n, config_path, format, macro);
        if (app.got_subcommand(explain))
            return cmd_explain(kg_path, query, concept_text, session_path, config_path);
    } catch (const sparseact::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
