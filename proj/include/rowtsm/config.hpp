// Plain key=value config files with [section] headers, '#'/';' comments.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace rowtsm::config {

class Document {
public:
    static Document parse(const std::string& text);
    static Document load(const std::filesystem::path& path);

    bool has_section(const std::string& section) const;
    std::optional<std::string> raw(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    // "a,b" pairs, e.g. Jacobian entries.
    std::pair<double, double> get_pair(const std::string& section, const std::string& key,
                                       std::pair<double, double> fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace rowtsm::config
