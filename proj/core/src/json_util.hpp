#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "supertok/errors.hpp"

namespace supertok::detail {

inline constexpr int kFormatVersion = 1;

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline void check_format_version(const nlohmann::json& j, const std::filesystem::path& path) {
    if (!j.contains("format_version")) return;
    if (!j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() > kFormatVersion) {
        throw ValidationError(path.string() + ": unsupported format_version " +
                              j["format_version"].dump());
    }
}

}  // namespace supertok::detail
