#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sparseact {

struct EvidenceSnippet {
    std::string title;
    std::string body;
    std::string source_uri;
    std::string retrieved_at;
};

// External evidence source. Live search is intentionally not part of this
// project; implementations are the null provider and a file-backed mock.
class EvidenceProvider {
public:
    virtual ~EvidenceProvider() = default;
    virtual std::vector<EvidenceSnippet> fetch(std::string_view query) = 0;
};

class NullEvidenceProvider final : public EvidenceProvider {
public:
    std::vector<EvidenceSnippet> fetch(std::string_view) override { return {}; }
};

// Snippets stored one JSON record per line, keyed by the query hash:
// {"query_hash": ..., "title": ..., "body": ..., "source": ..., "retrieved": ...}
class FileEvidenceProvider final : public EvidenceProvider {
public:
    explicit FileEvidenceProvider(std::string path) : path_(std::move(path)) {}
    std::vector<EvidenceSnippet> fetch(std::string_view query) override;

private:
    std::string path_;
};

// FNV-1a 64-bit hash of the raw query text, lowercase hex.
std::string query_hash(std::string_view query);

} // namespace sparseact
