#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hydrolstm {

/// Flat `key = value` text file; `#` starts a comment. Tracks which keys were read so
/// callers can reject typos with `require_all_used()`.
class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source = "<stream>");
    static KeyValues load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    /// Throws Config listing every key never read.
    void require_all_used() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
    std::string source_ = "<config>";
};

}  // namespace hydrolstm
