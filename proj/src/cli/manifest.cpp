#include "hydrolstm/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "json.hpp"

#include "hydrolstm/error.hpp"
#include "hydrolstm/numfmt.hpp"

namespace hydrolstm::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::Io, "sha256 initialisation failed");
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) fail(ErrorKind::Io, "read error on " + path.string());
    std::array<unsigned char, EVP_MAX_MD_SIZE> md;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 0xf];
    }
    return out;
}

RunManifest::RunManifest(std::string command, fs::path out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), started_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec || !fs::is_directory(out_dir_)) fail(ErrorKind::Io, "cannot create output directory " + out_dir_.string());
    fs::remove(out_dir_ / kManifestName, ec);
    if (ec) fail(ErrorKind::Io, "cannot remove stale manifest in " + out_dir_.string());
}

void RunManifest::config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
void RunManifest::config(const std::string& key, double value) { config_.emplace_back(key, format_number(value)); }
void RunManifest::config(const std::string& key, std::uint64_t value) {
    config_.emplace_back(key, std::to_string(value));
}

void RunManifest::input(const std::string& role, const fs::path& path) {
    inputs_.push_back({role, {path.string(), sha256_file(path)}});
}

fs::path RunManifest::write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const fs::path path = out_dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    fill(out);
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
    outputs_.push_back(name);
    return path;
}

void RunManifest::finish() {
    nlohmann::ordered_json j;
    j["command"] = command_;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_) cfg[k] = v;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [role, file] : inputs_) in.push_back({{"role", role}, {"path", file.first}, {"sha256", file.second}});
    j["outputs"] = outputs_;
    if (has_seed_) j["seed"] = seed_;
    else j["seed"] = nullptr;
    j["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    const fs::path path = out_dir_ / kManifestName;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace hydrolstm::cli
