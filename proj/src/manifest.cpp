#include "genaug/manifest.hpp"

#include <fstream>
#include <sstream>

#include "genaug/errors.hpp"

namespace genaug {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

Manifest Manifest::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingFileError(path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

Manifest Manifest::parse(const std::string& text) {
    Manifest m;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            // '#' inside quotes is part of the value
            const auto quote = line.find_first_of("\"'");
            if (quote == std::string::npos || hash < quote) line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MalformedRowError(line_no, "expected key = value, got \"" + line + "\"");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty()) throw MalformedRowError(line_no, "empty key");
        m.entries_[key] = value;
    }
    return m;
}

bool Manifest::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Manifest::get(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

std::string Manifest::require(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw UsageError("manifest missing required key \"" + key + "\"");
    return it->second;
}

double Manifest::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw UsageError("manifest key \"" + key + "\" is not a number: " + it->second);
    }
}

std::int64_t Manifest::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw UsageError("manifest key \"" + key + "\" is not an integer: " + it->second);
    }
}

std::uint64_t Manifest::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw UsageError("manifest key \"" + key + "\" is not an unsigned integer: " + it->second);
    }
}

bool Manifest::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const auto& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("manifest key \"" + key + "\" is not a boolean: " + v);
}

std::vector<std::string> Manifest::get_list(const std::string& key) const {
    std::vector<std::string> out;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return out;
    std::istringstream is(it->second);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void Manifest::set(const std::string& key, std::string value) {
    entries_[key] = std::move(value);
}

}  // namespace genaug
