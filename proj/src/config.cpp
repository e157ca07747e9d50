#include "rowtsm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rowtsm::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Document Document::parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            doc.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
        doc.sections_[section][key] = value;
    }
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool Document::has_section(const std::string& section) const {
    return sections_.contains(section);
}

std::optional<std::string> Document::raw(const std::string& section,
                                         const std::string& key) const {
    const auto sec = sections_.find(section);
    if (sec == sections_.end()) return std::nullopt;
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) return std::nullopt;
    return it->second;
}

std::string Document::get_string(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
    return raw(section, key).value_or(fallback);
}

double Document::get_double(const std::string& section, const std::string& key,
                            double fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double parsed = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing junk");
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key + ": not a number: " + *v);
    }
}

int Document::get_int(const std::string& section, const std::string& key, int fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const int parsed = std::stoi(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing junk");
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key + ": not an integer: " + *v);
    }
}

bool Document::get_bool(const std::string& section, const std::string& key,
                        bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw std::runtime_error("config [" + section + "] " + key + ": not a boolean: " + *v);
}

std::uint64_t Document::get_u64(const std::string& section, const std::string& key,
                                std::uint64_t fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const unsigned long long parsed = std::stoull(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing junk");
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key +
                                 ": not an unsigned integer: " + *v);
    }
}

std::pair<double, double> Document::get_pair(const std::string& section, const std::string& key,
                                             std::pair<double, double> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    const auto comma = v->find(',');
    if (comma == std::string::npos)
        throw std::runtime_error("config [" + section + "] " + key + ": expected 'a,b'");
    try {
        return {std::stod(trim(v->substr(0, comma))), std::stod(trim(v->substr(comma + 1)))};
    } catch (const std::exception&) {
        throw std::runtime_error("config [" + section + "] " + key + ": expected 'a,b': " + *v);
    }
}

}  // namespace rowtsm::config
