#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tnorm/textsim.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

inline constexpr std::size_t default_max_code_len = 4;

// Primary and optional alternate Double Metaphone codes.
struct PhoneticCodes {
    std::string primary;
    std::optional<std::string> alternate;

    bool empty() const noexcept { return primary.empty() && !alternate; }

    friend bool operator==(const PhoneticCodes&, const PhoneticCodes&) = default;
};

namespace detail {

// Port of Lawrence Philips' Double Metaphone rule set. Works on an upper-cased
// byte buffer padded with spaces so lookahead past the end is always safe.
class DoubleMetaphone {
public:
    static constexpr char c_cedilla = '\xC7';
    static constexpr char n_tilde = '\xD1';

    explicit DoubleMetaphone(std::u32string_view word) {
        buf_.reserve(word.size() + pad);
        for (char32_t c : word) buf_.push_back(fold(c));
        length_ = static_cast<int>(buf_.size());
        last_ = length_ - 1;
        buf_.append(pad, ' ');
        slavo_germanic_ = buf_.find('W') != std::string::npos || buf_.find('K') != std::string::npos ||
                          buf_.find("CZ") != std::string::npos || buf_.find("WITZ") != std::string::npos;
    }

    void run() {
        if (length_ < 1) return;
        int current = 0;
        if (string_at(0, 2, {"GN", "KN", "PN", "WR", "PS"})) current += 1;
        // initial 'X' is pronounced 'Z', e.g. 'Xavier'
        if (at(0) == 'X') {
            add("S");
            current += 1;
        }
        while (current < length_) current = step(current);
    }

    std::string primary;
    std::string secondary;

private:
    static constexpr std::size_t pad = 5;

    static char fold(char32_t c) {
        if (c >= 'a' && c <= 'z') return static_cast<char>(c - 32);
        if (c < 0x80) return static_cast<char>(c);
        if (c == 0xE7 || c == 0xC7) return c_cedilla;
        if (c == 0xF1 || c == 0xD1) return n_tilde;
        return '\x80';
    }

    char at(int pos) const {
        if (pos < 0 || pos >= static_cast<int>(buf_.size())) return '\0';
        return buf_[static_cast<std::size_t>(pos)];
    }

    bool is_vowel(int pos) const {
        if (pos < 0 || pos >= length_) return false;
        const char c = buf_[static_cast<std::size_t>(pos)];
        return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U' || c == 'Y';
    }

    bool string_at(int start, int len, std::initializer_list<std::string_view> options) const {
        if (start < 0 || start + len > static_cast<int>(buf_.size())) return false;
        const std::string_view target(buf_.data() + start, static_cast<std::size_t>(len));
        return std::find(options.begin(), options.end(), target) != options.end();
    }

    void add(std::string_view main) {
        primary += main;
        secondary += main;
    }

    void add(std::string_view main, std::string_view alt) {
        primary += main;
        if (!alt.empty()) {
            if (alt[0] != ' ') secondary += alt;
        } else if (!main.empty() && main[0] != ' ') {
            secondary += main;
        }
    }

    int step(int current);
    int step_c(int current);
    int step_g(int current);
    int step_j(int current);
    int step_s(int current);

    std::string buf_;
    int length_ = 0;
    int last_ = -1;
    bool slavo_germanic_ = false;
};

inline int DoubleMetaphone::step(int current) {
    switch (at(current)) {
    case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
        // initial vowels all map to 'A'
        if (current == 0) add("A");
        return current + 1;

    case 'B':
        // "-mb", e.g. "dumb", already skipped over
        add("P");
        return at(current + 1) == 'B' ? current + 2 : current + 1;

    case c_cedilla:
        add("S");
        return current + 1;

    case 'C':
        return step_c(current);

    case 'D':
        if (string_at(current, 2, {"DG"})) {
            if (string_at(current + 2, 1, {"I", "E", "Y"})) {
                // 'edge'
                add("J");
                return current + 3;
            }
            // 'edgar'
            add("TK");
            return current + 2;
        }
        add("T");
        return string_at(current, 2, {"DT", "DD"}) ? current + 2 : current + 1;

    case 'F':
        add("F");
        return at(current + 1) == 'F' ? current + 2 : current + 1;

    case 'G':
        return step_g(current);

    case 'H':
        // keep only if first and before a vowel, or between two vowels
        if ((current == 0 || is_vowel(current - 1)) && is_vowel(current + 1)) {
            add("H");
            return current + 2;
        }
        return current + 1;

    case 'J':
        return step_j(current);

    case 'K':
        add("K");
        return at(current + 1) == 'K' ? current + 2 : current + 1;

    case 'L':
        if (at(current + 1) == 'L') {
            // spanish, e.g. 'cabrillo', 'gallegos'
            if ((current == length_ - 3 && string_at(current - 1, 4, {"ILLO", "ILLA", "ALLE"})) ||
                ((string_at(last_ - 1, 2, {"AS", "OS"}) || string_at(last_, 1, {"A", "O"})) &&
                 string_at(current - 1, 4, {"ALLE"}))) {
                add("L", " ");
                return current + 2;
            }
            add("L");
            return current + 2;
        }
        add("L");
        return current + 1;

    case 'M':
        add("M");
        // 'dumb', 'thumb'
        if ((string_at(current - 1, 3, {"UMB"}) &&
             (current + 1 == last_ || string_at(current + 2, 2, {"ER"}))) ||
            at(current + 1) == 'M')
            return current + 2;
        return current + 1;

    case 'N':
        add("N");
        return at(current + 1) == 'N' ? current + 2 : current + 1;

    case n_tilde:
        add("N");
        return current + 1;

    case 'P':
        if (at(current + 1) == 'H') {
            add("F");
            return current + 2;
        }
        // 'campbell', 'raspberry'
        add("P");
        return string_at(current + 1, 1, {"P", "B"}) ? current + 2 : current + 1;

    case 'Q':
        add("K");
        return at(current + 1) == 'Q' ? current + 2 : current + 1;

    case 'R':
        // french, e.g. 'rogier', but not 'hochmeier'
        if (current == last_ && !slavo_germanic_ && string_at(current - 2, 2, {"IE"}) &&
            !string_at(current - 4, 2, {"ME", "MA"}))
            add("", "R");
        else
            add("R");
        return at(current + 1) == 'R' ? current + 2 : current + 1;

    case 'S':
        return step_s(current);

    case 'T':
        if (string_at(current, 4, {"TION"})) {
            add("X");
            return current + 3;
        }
        if (string_at(current, 3, {"TIA", "TCH"})) {
            add("X");
            return current + 3;
        }
        if (string_at(current, 2, {"TH"}) || string_at(current, 3, {"TTH"})) {
            // 'thomas', 'thames', or germanic
            if (string_at(current + 2, 2, {"OM", "AM"}) || string_at(0, 4, {"VAN ", "VON "}) ||
                string_at(0, 3, {"SCH"}))
                add("T");
            else
                add("0", "T");
            return current + 2;
        }
        add("T");
        return string_at(current + 1, 1, {"T", "D"}) ? current + 2 : current + 1;

    case 'V':
        add("F");
        return at(current + 1) == 'V' ? current + 2 : current + 1;

    case 'W':
        if (string_at(current, 2, {"WR"})) {
            add("R");
            return current + 2;
        }
        if (current == 0 && (is_vowel(current + 1) || string_at(current, 2, {"WH"}))) {
            // Wasserman should match Vasserman; Uomo should match Womo
            if (is_vowel(current + 1))
                add("A", "F");
            else
                add("A");
        }
        // Arnow should match Arnoff
        if ((current == last_ && is_vowel(current - 1)) ||
            string_at(current - 1, 5, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) || string_at(0, 3, {"SCH"})) {
            add("", "F");
            return current + 1;
        }
        // polish, e.g. 'filipowicz'
        if (string_at(current, 4, {"WICZ", "WITZ"})) {
            add("TS", "FX");
            return current + 4;
        }
        return current + 1;

    case 'X':
        // french, e.g. 'breaux'
        if (!(current == last_ &&
              (string_at(current - 3, 3, {"IAU", "EAU"}) || string_at(current - 2, 2, {"AU", "OU"}))))
            add("KS");
        return string_at(current + 1, 1, {"C", "X"}) ? current + 2 : current + 1;

    case 'Z':
        // chinese pinyin, e.g. 'zhao'
        if (at(current + 1) == 'H') {
            add("J");
            return current + 2;
        }
        if (string_at(current + 1, 2, {"ZO", "ZI", "ZA"}) ||
            (slavo_germanic_ && current > 0 && at(current - 1) != 'T'))
            add("S", "TS");
        else
            add("S");
        return at(current + 1) == 'Z' ? current + 2 : current + 1;

    default:
        return current + 1;
    }
}

inline int DoubleMetaphone::step_c(int current) {
    // various germanic
    if (current > 1 && !is_vowel(current - 2) && string_at(current - 1, 3, {"ACH"}) &&
        at(current + 2) != 'I' &&
        (at(current + 2) != 'E' || string_at(current - 2, 6, {"BACHER", "MACHER"}))) {
        add("K");
        return current + 2;
    }
    // 'caesar'
    if (current == 0 && string_at(current, 6, {"CAESAR"})) {
        add("S");
        return current + 2;
    }
    // italian 'chianti'
    if (string_at(current, 4, {"CHIA"})) {
        add("K");
        return current + 2;
    }
    if (string_at(current, 2, {"CH"})) {
        // 'michael'
        if (current > 0 && string_at(current, 4, {"CHAE"})) {
            add("K", "X");
            return current + 2;
        }
        // greek roots, e.g. 'chemistry', 'chorus'
        if (current == 0 &&
            (string_at(current + 1, 5, {"HARAC", "HARIS"}) ||
             string_at(current + 1, 3, {"HOR", "HYM", "HIA", "HEM"})) &&
            !string_at(0, 5, {"CHORE"})) {
            add("K");
            return current + 2;
        }
        // germanic, greek, or otherwise 'ch' for 'kh' sound
        if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) ||
            // 'architect' but not 'arch', 'orchestra', 'orchid'
            string_at(current - 2, 6, {"ORCHES", "ARCHIT", "ORCHID"}) || string_at(current + 2, 1, {"T", "S"}) ||
            ((string_at(current - 1, 1, {"A", "O", "U", "E"}) || current == 0) &&
             // 'wachtler', 'wechsler', but not 'tichner'
             string_at(current + 2, 1, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}))) {
            add("K");
        } else if (current > 0) {
            // 'McHugh'
            if (string_at(0, 2, {"MC"}))
                add("K");
            else
                add("X", "K");
        } else {
            add("X");
        }
        return current + 2;
    }
    // 'czerny'
    if (string_at(current, 2, {"CZ"}) && !string_at(current - 2, 4, {"WICZ"})) {
        add("S", "X");
        return current + 2;
    }
    // 'focaccia'
    if (string_at(current + 1, 3, {"CIA"})) {
        add("X");
        return current + 3;
    }
    // double 'C', but not 'McClellan'
    if (string_at(current, 2, {"CC"}) && !(current == 1 && at(0) == 'M')) {
        // 'bellocchio' but not 'bacchus'
        if (string_at(current + 2, 1, {"I", "E", "H"}) && !string_at(current + 2, 2, {"HU"})) {
            // 'accident', 'accede', 'succeed'
            if ((current == 1 && at(current - 1) == 'A') || string_at(current - 1, 5, {"UCCEE", "UCCES"}))
                add("KS");
            else
                add("X");  // 'bacci', 'bertucci'
            return current + 3;
        }
        // Pierce's rule
        add("K");
        return current + 2;
    }
    if (string_at(current, 2, {"CK", "CG", "CQ"})) {
        add("K");
        return current + 2;
    }
    if (string_at(current, 2, {"CI", "CE", "CY"})) {
        // italian vs. english
        if (string_at(current, 3, {"CIO", "CIE", "CIA"}))
            add("S", "X");
        else
            add("S");
        return current + 2;
    }
    add("K");
    // 'mac caffrey', 'mac gregor'
    if (string_at(current + 1, 2, {" C", " Q", " G"})) return current + 3;
    if (string_at(current + 1, 1, {"C", "K", "Q"}) && !string_at(current + 1, 2, {"CE", "CI"})) return current + 2;
    return current + 1;
}

inline int DoubleMetaphone::step_g(int current) {
    if (at(current + 1) == 'H') {
        if (current > 0 && !is_vowel(current - 1)) {
            add("K");
            return current + 2;
        }
        // 'ghislane', 'ghiradelli'
        if (current == 0) {
            if (at(current + 2) == 'I')
                add("J");
            else
                add("K");
            return current + 2;
        }
        // Parker's rule, e.g. 'hugh', 'bough', 'broughton'
        if ((current > 1 && string_at(current - 2, 1, {"B", "H", "D"})) ||
            (current > 2 && string_at(current - 3, 1, {"B", "H", "D"})) ||
            (current > 3 && string_at(current - 4, 1, {"B", "H"})))
            return current + 2;
        // 'laugh', 'McLaughlin', 'cough', 'gough', 'rough', 'tough'
        if (current > 2 && at(current - 1) == 'U' && string_at(current - 3, 1, {"C", "G", "L", "R", "T"}))
            add("F");
        else if (current > 0 && at(current - 1) != 'I')
            add("K");
        return current + 2;
    }

    if (at(current + 1) == 'N') {
        if (current == 1 && is_vowel(0) && !slavo_germanic_) {
            add("KN", "N");
        } else if (!string_at(current + 2, 2, {"EY"}) && at(current + 1) != 'Y' && !slavo_germanic_) {
            // not e.g. 'cagney'
            add("N", "KN");
        } else {
            add("KN");
        }
        return current + 2;
    }

    // 'tagliaro'
    if (string_at(current + 1, 2, {"LI"}) && !slavo_germanic_) {
        add("KL", "L");
        return current + 2;
    }

    // -ges-, -gep-, -gel-, -gie- at beginning
    if (current == 0 && (at(current + 1) == 'Y' || string_at(current + 1, 2,
                                                             {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN",
                                                              "IE", "EI", "ER"}))) {
        add("K", "J");
        return current + 2;
    }

    // -ger-, -gy-
    if ((string_at(current + 1, 2, {"ER"}) || at(current + 1) == 'Y') &&
        !string_at(0, 6, {"DANGER", "RANGER", "MANGER"}) && !string_at(current - 1, 1, {"E", "I"}) &&
        !string_at(current - 1, 3, {"RGY", "OGY"})) {
        add("K", "J");
        return current + 2;
    }

    // italian, e.g. 'biaggi'
    if (string_at(current + 1, 1, {"E", "I", "Y"}) || string_at(current - 1, 4, {"AGGI", "OGGI"})) {
        // obvious germanic
        if (string_at(0, 4, {"VAN ", "VON "}) || string_at(0, 3, {"SCH"}) || string_at(current + 1, 2, {"ET"}))
            add("K");
        else if (string_at(current + 1, 4, {"IER "}))  // always soft if french ending
            add("J");
        else
            add("J", "K");
        return current + 2;
    }

    add("K");
    return at(current + 1) == 'G' ? current + 2 : current + 1;
}

inline int DoubleMetaphone::step_j(int current) {
    // obvious spanish, 'jose', 'san jacinto'
    if (string_at(current, 4, {"JOSE"}) || string_at(0, 4, {"SAN "})) {
        if ((current == 0 && at(current + 4) == ' ') || string_at(0, 4, {"SAN "}))
            add("H");
        else
            add("J", "H");
        return current + 1;
    }
    if (current == 0 && !string_at(current, 4, {"JOSE"})) {
        add("J", "A");  // Yankelovich/Jankelowicz
    } else if (is_vowel(current - 1) && !slavo_germanic_ && (at(current + 1) == 'A' || at(current + 1) == 'O')) {
        // spanish pronunciation of e.g. 'bajador'
        add("J", "H");
    } else if (current == last_) {
        add("J", " ");
    } else if (!string_at(current + 1, 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) &&
               !string_at(current - 1, 1, {"S", "K", "L"})) {
        add("J");
    }
    return at(current + 1) == 'J' ? current + 2 : current + 1;
}

inline int DoubleMetaphone::step_s(int current) {
    // 'island', 'isle', 'carlisle', 'carlysle'
    if (string_at(current - 1, 3, {"ISL", "YSL"})) return current + 1;

    // 'sugar-'
    if (current == 0 && string_at(current, 5, {"SUGAR"})) {
        add("X", "S");
        return current + 1;
    }

    if (string_at(current, 2, {"SH"})) {
        // germanic
        if (string_at(current + 1, 4, {"HEIM", "HOEK", "HOLM", "HOLZ"}))
            add("S");
        else
            add("X");
        return current + 2;
    }

    // italian and armenian
    if (string_at(current, 3, {"SIO", "SIA"}) || string_at(current, 4, {"SIAN"})) {
        if (!slavo_germanic_)
            add("S", "X");
        else
            add("S");
        return current + 3;
    }

    // german and anglicisations, e.g. 'smith' match 'schmidt', 'snider' match 'schneider';
    // also -sz- in slavic languages
    if ((current == 0 && string_at(current + 1, 1, {"M", "N", "L", "W"})) || string_at(current + 1, 1, {"Z"})) {
        add("S", "X");
        return string_at(current + 1, 1, {"Z"}) ? current + 2 : current + 1;
    }

    if (string_at(current, 2, {"SC"})) {
        // Schlesinger's rule
        if (at(current + 2) == 'H') {
            // dutch origin, e.g. 'school', 'schooner'
            if (string_at(current + 3, 2, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
                // 'schermerhorn', 'schenker'
                if (string_at(current + 3, 2, {"ER", "EN"}))
                    add("X", "SK");
                else
                    add("SK");
                return current + 3;
            }
            if (current == 0 && !is_vowel(3) && at(3) != 'W')
                add("X", "S");
            else
                add("X");
            return current + 3;
        }
        if (string_at(current + 2, 1, {"I", "E", "Y"})) {
            add("S");
            return current + 3;
        }
        add("SK");
        return current + 3;
    }

    // french, e.g. 'resnais', 'artois'
    if (current == last_ && string_at(current - 2, 2, {"AI", "OI"}))
        add("", "S");
    else
        add("S");
    return string_at(current + 1, 1, {"S", "Z"}) ? current + 2 : current + 1;
}

}  // namespace detail

/// Double Metaphone encoding, codes truncated to `max_code_len`. The alternate
/// is reported only when it differs from the primary after truncation.
inline PhoneticCodes encode(std::u32string_view word, std::size_t max_code_len = default_max_code_len) {
    if (max_code_len < 1) throw std::invalid_argument("encode: max_code_len must be >= 1");
    detail::DoubleMetaphone dm(word);
    dm.run();
    PhoneticCodes codes;
    codes.primary = dm.primary.substr(0, max_code_len);
    std::string alt = dm.secondary.substr(0, max_code_len);
    if (alt != codes.primary) codes.alternate = std::move(alt);
    return codes;
}

inline PhoneticCodes encode(const Word& w, std::size_t max_code_len = default_max_code_len) {
    return encode(w.view(), max_code_len);
}

/// Best string similarity over all pairs of non-empty codes; nullopt when either
/// side has no usable code (the word contributes no letters).
inline std::optional<double> phonetic_similarity(const PhoneticCodes& a, const PhoneticCodes& b) {
    const std::string_view a_codes[] = {a.primary, a.alternate ? std::string_view(*a.alternate) : std::string_view()};
    const std::string_view b_codes[] = {b.primary, b.alternate ? std::string_view(*b.alternate) : std::string_view()};
    std::optional<double> best;
    for (auto ca : a_codes) {
        if (ca.empty()) continue;
        for (auto cb : b_codes) {
            if (cb.empty()) continue;
            best = std::max(best.value_or(0.0), string_similarity(ca, cb));
        }
    }
    return best;
}

inline std::optional<double> phonetic_similarity(const Word& a, const Word& b,
                                                 std::size_t max_code_len = default_max_code_len) {
    return phonetic_similarity(encode(a, max_code_len), encode(b, max_code_len));
}

}  // namespace tnorm
