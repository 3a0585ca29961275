#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace genaug {

// Flat `key = value` manifest with '#' comments; values may be quoted.
// Unknown keys are rejected by the consumer, not the parser.
class Manifest {
public:
    static Manifest load(const std::string& path);
    static Manifest parse(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma separated

    void set(const std::string& key, std::string value);
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace genaug
