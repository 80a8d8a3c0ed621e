#include "sparseact/evidence.hpp"

#include "sparseact/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>

namespace sparseact {

using nlohmann::json;

std::string query_hash(std::string_view query) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : query) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::vector<EvidenceSnippet> FileEvidenceProvider::fetch(std::string_view query) {
    std::ifstream in(path_);
    if (!in)
        throw Error("cannot open evidence file '" + path_ + "'");
    std::string wanted = query_hash(query);
    std::vector<EvidenceSnippet> out;
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
            throw Error(path_ + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
        }
        if (obj.value("query_hash", "") != wanted)
            continue;
        EvidenceSnippet s;
        s.title = obj.value("title", "");
        s.body = obj.value("body", "");
        s.source_uri = obj.value("source", "");
        s.retrieved_at = obj.value("retrieved", "");
        if (s.body.empty())
            throw Error(path_ + ":" + std::to_string(lineno) + ": snippet body must be nonempty");
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace sparseact
