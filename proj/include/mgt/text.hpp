#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mgt::corpus {

enum class CleanMode { full, links_only, none };

CleanMode parse_clean_mode(std::string_view name);
std::string_view to_string(CleanMode mode);

/// Removes hyperlinks and, in `full` mode, characters outside the retained set,
/// runs of spaces/tabs and runs of three or more newlines.
///
/// A hyperlink is any substring starting with "http://", "https://" or "www."
/// and extending to the next whitespace. When a removed link sat between two
/// horizontal-whitespace runs (or at the start of a line) the following run is
/// dropped too, so "see https://a.b/c now" becomes "see now".
///
/// Retained in `full` mode: letters, digits, whitespace and . , ! ? ; : ' " ( ) -
/// The function is idempotent for every mode.
std::string clean_text(std::string_view text, CleanMode mode);

/// Splits on maximal runs of Unicode whitespace. Word index i is the i-th token.
std::vector<std::string> tokenize_words(std::string_view text);

std::size_t word_count(std::string_view text);

/// Word index of the first token of every non-empty paragraph. Paragraphs are
/// separated by runs of one or more '\n'. Returns {0} for text without tokens.
std::vector<std::size_t> paragraph_starts(std::string_view text);

}  // namespace mgt::corpus
