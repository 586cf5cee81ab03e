#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include "json.hpp"
#include "mgt/error.hpp"

namespace mgt::detail {

// Calls fn(object, line_number) for every non-blank line. Lines that are not
// JSON objects raise ParseError naming the line.
template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
        }
        if (!obj.is_object()) throw ParseError("expected a JSON object", lineno);
        fn(obj, lineno);
    }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file '" + path.string() + "'");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file '" + path.string() + "'");
    return out;
}

// "id" may be a string or an integer; stored as string.
inline std::string read_id(const nlohmann::json& obj, std::size_t lineno) {
    const auto it = obj.find("id");
    if (it == obj.end()) throw ParseError("missing \"id\"", lineno);
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw ParseError("\"id\" must be a string or an integer", lineno);
}

}  // namespace mgt::detail
