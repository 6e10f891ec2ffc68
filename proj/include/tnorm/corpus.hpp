#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tnorm/errors.hpp"
#include "tnorm/unicode.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

using WordSet = std::unordered_set<Word, WordHash>;

/// One word per line, lowercased and deduplicated; blank lines and '#' comments skipped.
inline WordSet load_lexicon(std::istream& in, const std::string& source = "<lexicon>") {
    WordSet words;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v(line);
        while (!v.empty() && (v.back() == '\r' || v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        if (v.empty() || v.front() == '#') continue;
        words.insert(Word::from_utf8(v));
    }
    if (words.empty()) throw FormatError(source, 0, "empty lexicon");
    return words;
}

inline WordSet load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read lexicon '" + path + "'");
    return load_lexicon(in, path);
}

// A token and its position in the decoded line, in code points.
struct TokenSpan {
    std::size_t begin;
    std::size_t end;
    Word word;
};

namespace detail {

inline bool starts_with_ci(std::u32string_view s, std::u32string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (unicode::to_lower(s[i]) != prefix[i]) return false;
    }
    return true;
}

inline bool url_shaped(std::u32string_view chunk) {
    return chunk.find(U"://") != std::u32string_view::npos || starts_with_ci(chunk, U"www.");
}

inline bool token_char(char32_t c) { return unicode::is_letter(c) || unicode::is_digit(c) || unicode::is_apostrophe(c); }

}  // namespace detail

/// Tokenization rules:
///   - whitespace-separated chunks starting with '@' or '#', or shaped like a URL, are dropped;
///   - tokens are maximal runs of letters, digits and apostrophes within a chunk, with
///     leading/trailing apostrophes trimmed;
///   - tokens without any letter are dropped; the rest are lowercased.
inline std::vector<TokenSpan> tokenize(std::u32string_view line) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        while (i < n && unicode::is_space(line[i])) ++i;
        std::size_t chunk_end = i;
        while (chunk_end < n && !unicode::is_space(line[chunk_end])) ++chunk_end;
        const std::u32string_view chunk = line.substr(i, chunk_end - i);
        if (!chunk.empty() && chunk.front() != '@' && chunk.front() != '#' && !detail::url_shaped(chunk)) {
            std::size_t p = i;
            while (p < chunk_end) {
                while (p < chunk_end && !detail::token_char(line[p])) ++p;
                std::size_t q = p;
                while (q < chunk_end && detail::token_char(line[q])) ++q;
                std::size_t b = p;
                std::size_t e = q;
                while (b < e && unicode::is_apostrophe(line[b])) ++b;
                while (e > b && unicode::is_apostrophe(line[e - 1])) --e;
                bool has_letter = false;
                for (std::size_t k = b; k < e && !has_letter; ++k) has_letter = unicode::is_letter(line[k]);
                if (has_letter) out.push_back({b, e, Word(line.substr(b, e - b))});
                p = q;
            }
        }
        i = chunk_end;
    }
    return out;
}

inline std::vector<TokenSpan> tokenize(std::string_view utf8_line) { return tokenize(unicode::decode_utf8(utf8_line)); }

// Partition of corpus tokens into in-lexicon and out-of-lexicon words.
struct VocabularySplit {
    WordSet iv;
    WordSet oov;
    std::unordered_map<Word, std::size_t, WordHash> token_counts;
};

inline void add_line(VocabularySplit& split, std::string_view utf8_line, const WordSet& lexicon) {
    for (auto& tok : tokenize(utf8_line)) {
        ++split.token_counts[tok.word];
        if (lexicon.contains(tok.word))
            split.iv.insert(std::move(tok.word));
        else
            split.oov.insert(std::move(tok.word));
    }
}

inline VocabularySplit split_corpus(std::istream& corpus, const WordSet& lexicon) {
    VocabularySplit split;
    std::string line;
    while (std::getline(corpus, line)) add_line(split, line, lexicon);
    return split;
}

/// Sorted copy, for deterministic iteration over a word set.
inline std::vector<Word> sorted_words(const WordSet& words) {
    std::vector<Word> out(words.begin(), words.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tnorm
