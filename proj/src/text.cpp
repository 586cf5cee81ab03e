#include "mgt/text.hpp"

#include <array>
#include <clocale>
#include <cwctype>
#include <locale.h>

#include "mgt/error.hpp"
#include "utf8.hpp"

namespace mgt::corpus {

namespace {

using detail::decode_utf8;
using detail::is_unicode_space;

constexpr std::array<std::string_view, 3> kLinkPrefixes{"http://", "https://", "www."};

bool is_horizontal_space(char c) { return c == ' ' || c == '\t'; }

bool starts_link(std::string_view text, std::size_t pos) {
    for (auto prefix : kLinkPrefixes) {
        if (text.substr(pos, prefix.size()) == prefix) return true;
    }
    return false;
}

locale_t utf8_locale() {
    static const locale_t loc = [] {
        for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
            if (locale_t l = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr))) return l;
        }
        return static_cast<locale_t>(nullptr);
    }();
    return loc;
}

bool is_letter_or_digit(char32_t c) {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (c == 0xFFFD) return false;
    if (locale_t loc = utf8_locale()) return iswalnum_l(static_cast<wint_t>(c), loc) != 0;
    // Without a UTF-8 locale every non-ASCII code point is kept.
    return true;
}

bool is_retained_punct(char32_t c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':':
        case '\'': case '"': case '(': case ')': case '-':
            return true;
        default:
            return false;
    }
}

std::string remove_links(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (!starts_link(text, i)) {
            out.push_back(text[i++]);
            continue;
        }
        while (i < text.size()) {
            const auto cp = decode_utf8(text, i);
            if (is_unicode_space(cp.value)) break;
            i += cp.length;
        }
        const bool at_gap = out.empty() || is_horizontal_space(out.back()) || out.back() == '\n';
        if (at_gap) {
            while (i < text.size() && is_horizontal_space(text[i])) ++i;
        }
    }
    return out;
}

std::string strip_special(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto cp = decode_utf8(text, i);
        if (is_unicode_space(cp.value) || is_retained_punct(cp.value) || is_letter_or_digit(cp.value)) {
            out.append(text.substr(i, cp.length));
        }
        i += cp.length;
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_horizontal_space(c)) {
            while (i < text.size() && is_horizontal_space(text[i])) ++i;
            out.push_back(' ');
        } else if (c == '\n') {
            std::size_t run = 0;
            while (i < text.size() && text[i] == '\n') {
                ++i;
                ++run;
            }
            out.append(run >= 3 ? 2 : run, '\n');
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

}  // namespace

CleanMode parse_clean_mode(std::string_view name) {
    if (name == "full") return CleanMode::full;
    if (name == "links_only") return CleanMode::links_only;
    if (name == "none") return CleanMode::none;
    throw ConfigError("unknown cleaning mode '" + std::string(name) + "' (expected full, links_only or none)");
}

std::string_view to_string(CleanMode mode) {
    switch (mode) {
        case CleanMode::full: return "full";
        case CleanMode::links_only: return "links_only";
        case CleanMode::none: return "none";
    }
    return "none";
}

std::string clean_text(std::string_view text, CleanMode mode) {
    switch (mode) {
        case CleanMode::none:
            return std::string(text);
        case CleanMode::links_only:
            return remove_links(text);
        case CleanMode::full:
            // Stripping can glue a "www." back together, hence the second link pass.
            return collapse_whitespace(remove_links(strip_special(remove_links(text))));
    }
    return std::string(text);
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    std::size_t start = std::string_view::npos;
    while (i < text.size()) {
        const auto cp = decode_utf8(text, i);
        if (is_unicode_space(cp.value)) {
            if (start != std::string_view::npos) {
                tokens.emplace_back(text.substr(start, i - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = i;
        }
        i += cp.length;
    }
    if (start != std::string_view::npos) tokens.emplace_back(text.substr(start));
    return tokens;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto cp = decode_utf8(text, i);
        const bool space = is_unicode_space(cp.value);
        if (!space && !in_word) ++count;
        in_word = !space;
        i += cp.length;
    }
    return count;
}

std::vector<std::size_t> paragraph_starts(std::string_view text) {
    std::vector<std::size_t> starts;
    std::size_t words_before = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        const std::size_t words = word_count(text.substr(pos, end - pos));
        if (words > 0) {
            starts.push_back(words_before);
            words_before += words;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (starts.empty()) starts.push_back(0);
    return starts;
}

}  // namespace mgt::corpus
