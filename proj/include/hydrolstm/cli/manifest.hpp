#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hydrolstm::cli {

inline constexpr const char* kManifestName = "manifest.json";

/// Lowercase hex SHA-256 of a file's bytes. Throws Io.
std::string sha256_file(const std::filesystem::path& path);

/// Collects what a command read, resolved and wrote, and emits manifest.json once everything else
/// is on disk. Construction removes a stale manifest so a failed run leaves none behind.
class RunManifest {
public:
    RunManifest(std::string command, std::filesystem::path out_dir);

    const std::filesystem::path& out_dir() const { return out_dir_; }

    void config(const std::string& key, const std::string& value);
    void config(const std::string& key, double value);
    void config(const std::string& key, std::uint64_t value);
    void input(const std::string& role, const std::filesystem::path& path);
    void seed(std::uint64_t seed) { seed_ = seed; has_seed_ = true; }

    /// Writes `name` inside the output directory through `fill` and records it. Throws Io.
    std::filesystem::path write(const std::string& name, const std::function<void(std::ostream&)>& fill);
    /// Records a file some other writer produced inside the output directory.
    void output(const std::string& name) { outputs_.push_back(name); }

    /// Writes manifest.json.
    void finish();

private:
    std::string command_;
    std::filesystem::path out_dir_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> inputs_;
    std::vector<std::string> outputs_;
    std::uint64_t seed_ = 0;
    bool has_seed_ = false;
    std::chrono::steady_clock::time_point started_;
};

}  // namespace hydrolstm::cli
