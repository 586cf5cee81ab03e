#include <algorithm>
#include <random>

#include "doctest.h"
#include "mgt/text.hpp"
#include "support/random_text.hpp"

using namespace mgt::corpus;

namespace {

std::size_t count_of(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

bool has_link_prefix(const std::string& s) {
    return s.find("http://") != std::string::npos || s.find("https://") != std::string::npos ||
           s.find("www.") != std::string::npos;
}

}  // namespace

TEST_CASE("clean_text examples") {
    CHECK(clean_text("fine text, here!", CleanMode::full) == "fine text, here!");
    CHECK(clean_text("see https://a.b/c now", CleanMode::links_only) == "see now");
    CHECK(clean_text("a\n\n\n\nb", CleanMode::full) == "a\n\nb");
    CHECK(clean_text("a\n\nb", CleanMode::full) == "a\n\nb");
    CHECK(clean_text("a\n\n\n\nb #tag", CleanMode::none) == "a\n\n\n\nb #tag");
}

TEST_CASE("clean_text link removal") {
    CHECK(clean_text("http://x.io/a start", CleanMode::links_only) == "start");
    CHECK(clean_text("end www.site.com", CleanMode::links_only) == "end ");
    CHECK(clean_text("a\nhttps://q.r b", CleanMode::links_only) == "a\nb");
    CHECK(clean_text("no links at all.", CleanMode::links_only) == "no links at all.");
    // links_only leaves special characters alone
    CHECK(clean_text("50% #1 http://u", CleanMode::links_only) == "50% #1 ");
}

TEST_CASE("clean_text full mode whitelist") {
    CHECK(clean_text("cost: $5 (approx) -- ok?", CleanMode::full) == "cost: 5 (approx) -- ok?");
    CHECK(clean_text("a\t\t b", CleanMode::full) == "a b");
    CHECK(clean_text("\"quote\" it's; fine", CleanMode::full) == "\"quote\" it's; fine");
    CHECK(clean_text("smile \xF0\x9F\x98\x80 now", CleanMode::full) == "smile now");
    CHECK(clean_text("caf\xC3\xA9 \xE4\xB8\xAD\xE6\x96\x87", CleanMode::full) == "caf\xC3\xA9 \xE4\xB8\xAD\xE6\x96\x87");
    CHECK(clean_text("\xC2\xA9 2024", CleanMode::full) == " 2024");
    // stripping must not glue a link back together
    CHECK(clean_text("ww#w.example.org rest", CleanMode::full) == "rest");
}

TEST_CASE("clean_text is idempotent for every mode") {
    std::mt19937_64 rng(20240801);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto s = mgt::testing::random_text(rng);
        for (auto mode : {CleanMode::full, CleanMode::links_only, CleanMode::none}) {
            const auto once = clean_text(s, mode);
            CHECK_MESSAGE(clean_text(once, mode) == once, "mode=" << to_string(mode) << " input=" << s);
        }
    }
}

TEST_CASE("full cleaning keeps sentence punctuation outside links") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto s = mgt::testing::random_text(rng, 24, false);
        REQUIRE_FALSE(has_link_prefix(s));
        const auto cleaned = clean_text(s, CleanMode::full);
        for (char c : {'.', ',', '!', '?'}) CHECK(count_of(cleaned, c) == count_of(s, c));
    }
}

TEST_CASE("tokenize_words") {
    CHECK(tokenize_words("a b  c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize_words("").empty());
    CHECK(tokenize_words("x\ny z") == std::vector<std::string>{"x", "y", "z"});
    CHECK(tokenize_words("  lead trail \t") == std::vector<std::string>{"lead", "trail"});
    // U+00A0 and U+3000 are whitespace
    CHECK(tokenize_words("a\xC2\xA0" "b\xE3\x80\x80" "c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(word_count("one two\nthree") == 3);
}

TEST_CASE("tokenize_words distributes over single-space concatenation") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = mgt::testing::random_text(rng, 8);
        const auto b = mgt::testing::random_text(rng, 8);
        auto expected = tokenize_words(a);
        const auto tb = tokenize_words(b);
        expected.insert(expected.end(), tb.begin(), tb.end());
        CHECK(tokenize_words(a + " " + b) == expected);
        CHECK(word_count(a + " " + b) == expected.size());
    }
}

TEST_CASE("paragraph_starts") {
    CHECK(paragraph_starts("p q\n\nr s") == std::vector<std::size_t>{0, 2});
    CHECK(paragraph_starts("single paragraph here") == std::vector<std::size_t>{0});
    CHECK(paragraph_starts("a\nb\nc") == std::vector<std::size_t>{0, 1, 2});
    CHECK(paragraph_starts("") == std::vector<std::size_t>{0});
    CHECK(paragraph_starts("\n\n  \n") == std::vector<std::size_t>{0});
    CHECK(paragraph_starts("\n\nx y\n \nz") == std::vector<std::size_t>{0, 2});
}

TEST_CASE("paragraph_starts is strictly increasing and within the word count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto s = mgt::testing::random_text(rng);
        const auto starts = paragraph_starts(s);
        REQUIRE_FALSE(starts.empty());
        CHECK(starts.front() == 0);
        CHECK(std::adjacent_find(starts.begin(), starts.end(), std::greater_equal<>()) == starts.end());
        const auto words = word_count(s);
        if (words > 0) CHECK(starts.back() < words);
    }
}
