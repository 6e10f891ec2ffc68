#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tnorm/unicode.hpp"

namespace tnorm {

// A lowercase-normalized, non-empty token. Characters are Unicode scalar values.
class Word {
public:
    Word() = delete;

    static Word from_utf8(std::string_view text) { return Word(unicode::decode_utf8(text)); }

    explicit Word(std::u32string_view text) : text_(unicode::to_lower(text)) {
        if (text_.empty()) throw std::invalid_argument("word must be non-empty");
    }

    std::u32string_view view() const noexcept { return text_; }
    const std::u32string& text() const noexcept { return text_; }
    std::size_t size() const noexcept { return text_.size(); }
    std::string utf8() const { return unicode::encode_utf8(text_); }

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b) noexcept {
        return a.text_.compare(b.text_) <=> 0;
    }

    friend std::ostream& operator<<(std::ostream& os, const Word& w) { return os << w.utf8(); }

private:
    std::u32string text_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept { return std::hash<std::u32string>{}(w.text()); }
};

}  // namespace tnorm

template <>
struct std::hash<tnorm::Word> : tnorm::WordHash {};
