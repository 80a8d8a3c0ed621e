#include "sparseact/text.hpp"

#include "sparseact/error.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace sparseact::text {

namespace {

std::u16string to_utf16(std::string_view in) {
    if (in.empty())
        return {};
    std::u16string out(in.size() + 1, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strFromUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, in.data(),
                         static_cast<int32_t>(in.size()), 0xFFFD, nullptr, &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        status = U_ZERO_ERROR;
        out.assign(static_cast<std::size_t>(len), u'\0');
        u_strFromUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, in.data(),
                             static_cast<int32_t>(in.size()), 0xFFFD, nullptr, &status);
    }
    if (U_FAILURE(status))
        throw Error("utf-8 decode failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::string to_utf8(const std::u16string& in) {
    if (in.empty())
        return {};
    std::string out(in.size() * 4 + 1, '\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len, in.data(),
                       static_cast<int32_t>(in.size()), 0xFFFD, nullptr, &status);
    if (U_FAILURE(status))
        throw Error("utf-8 encode failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

} // namespace

std::string fold(std::string_view in) {
    if (in.empty())
        return {};
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* nfkc = unorm2_getNFKCCasefoldInstance(&status);
    if (U_FAILURE(status))
        throw Error("ICU NFKC_Casefold unavailable");

    std::u16string u16 = to_utf16(in);
    std::u16string norm(u16.size() * 2 + 8, u'\0');
    int32_t len = unorm2_normalize(nfkc, u16.data(), static_cast<int32_t>(u16.size()),
                                   norm.data(), static_cast<int32_t>(norm.size()), &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        status = U_ZERO_ERROR;
        norm.assign(static_cast<std::size_t>(len), u'\0');
        len = unorm2_normalize(nfkc, u16.data(), static_cast<int32_t>(u16.size()), norm.data(),
                               static_cast<int32_t>(norm.size()), &status);
    }
    if (U_FAILURE(status))
        throw Error("NFKC normalization failed");
    norm.resize(static_cast<std::size_t>(len));
    return to_utf8(norm);
}

std::vector<char32_t> decode_utf8(std::string_view in) {
    std::vector<char32_t> out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        char32_t cp = 0xFFFD;
        std::size_t extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (extra > 0 && i + extra >= in.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(in[i + k]);
            if ((cc & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok || cp > 0x10FFFF) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 2);
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view in) {
    std::vector<char32_t> cps = decode_utf8(fold(in));
    std::vector<std::string> tokens;
    std::vector<char32_t> cur;

    auto flush = [&]() {
        // trim hyphens that ended up at token edges
        std::size_t b = 0, e = cur.size();
        while (b < e && cur[b] == U'-')
            ++b;
        while (e > b && cur[e - 1] == U'-')
            --e;
        if (e > b)
            tokens.push_back(encode_utf8({cur.begin() + b, cur.begin() + e}));
        cur.clear();
    };

    for (char32_t cp : cps) {
        if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
            flush();
        } else if (cp == U'-' || u_isalnum(static_cast<UChar32>(cp)) ||
                   (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_M_MASK) != 0) {
            cur.push_back(cp);
        }
        // anything else (punctuation, symbols, controls) is stripped in place
    }
    flush();
    return tokens;
}

std::string normalize(std::string_view in) {
    std::vector<std::string> toks = tokenize(in);
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i)
            out.push_back(' ');
        out += toks[i];
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<char32_t> s = decode_utf8(a);
    std::vector<char32_t> t = decode_utf8(b);
    if (s == t)
        return 0;
    if (s.empty())
        return t.size();
    if (t.empty())
        return s.size();

    std::vector<std::size_t> prev(t.size() + 1);
    std::vector<std::size_t> cur(t.size() + 1);
    for (std::size_t j = 0; j <= t.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cur[0] = i + 1;
        for (std::size_t j = 0; j < t.size(); ++j) {
            std::size_t cost = s[i] == t[j] ? 0 : 1;
            cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, prev[j] + cost});
        }
        prev.swap(cur);
    }
    return prev[t.size()];
}

namespace {
constexpr std::uint64_t pack2(char32_t a, char32_t b) {
    return (static_cast<std::uint64_t>(a) << 21) | static_cast<std::uint64_t>(b);
}
constexpr std::uint64_t pack3(char32_t a, char32_t b, char32_t c) {
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) |
           static_cast<std::uint64_t>(c);
}
} // namespace

std::vector<std::uint64_t> bigram_multiset(std::string_view in) {
    std::vector<char32_t> cps = decode_utf8(in);
    std::vector<std::uint64_t> grams;
    if (cps.size() >= 2) {
        grams.reserve(cps.size() - 1);
        for (std::size_t i = 0; i + 1 < cps.size(); ++i)
            grams.push_back(pack2(cps[i], cps[i + 1]));
    }
    std::sort(grams.begin(), grams.end());
    return grams;
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> trigram_counts(std::string_view in) {
    std::vector<char32_t> cps = decode_utf8(in);
    std::map<std::uint64_t, std::uint32_t> counts;
    for (std::size_t i = 0; i + 2 < cps.size(); ++i)
        ++counts[pack3(cps[i], cps[i + 1], cps[i + 2])];
    return {counts.begin(), counts.end()};
}

double dice(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.empty() && b.empty())
        return 0.0;
    std::size_t shared = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++shared;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return 2.0 * static_cast<double>(shared) / static_cast<double>(a.size() + b.size());
}

double cosine(const std::vector<std::pair<std::uint64_t, std::uint32_t>>& a,
              const std::vector<std::pair<std::uint64_t, std::uint32_t>>& b) {
    if (a.empty() || b.empty())
        return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, c] : a)
        na += static_cast<double>(c) * c;
    for (const auto& [k, c] : b)
        nb += static_cast<double>(c) * c;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            dot += static_cast<double>(a[i].second) * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace sparseact::text
