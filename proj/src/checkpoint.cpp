#include "hydrolstm/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "hydrolstm/error.hpp"
#include "hydrolstm/numfmt.hpp"

namespace hydrolstm {

namespace {

struct TensorRef {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    std::size_t offset;
};

std::vector<TensorRef> tensor_layout(const ModelParams& p) {
    const std::size_t H = p.shape().hidden;
    const std::size_t D = p.shape().input_dim;
    std::vector<TensorRef> out;
    for (std::size_t g = 0; g < 4; ++g)
        out.push_back({"W_" + std::string(kGateSuffix[g]), H, D, g * H * D});
    for (std::size_t g = 0; g < 4; ++g)
        out.push_back({"U_" + std::string(kGateSuffix[g]), H, H, p.u_offset() + g * H * H});
    for (std::size_t g = 0; g < 4; ++g)
        out.push_back({"b_" + std::string(kGateSuffix[g]), 1, H, p.b_offset() + g * H});
    out.push_back({"w_d", 1, H, p.dense_offset()});
    out.push_back({"b_d", 1, 1, p.dense_offset() + H});
    return out;
}

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::Checkpoint, what); }

std::size_t read_count(std::istream& in, const std::string& key) {
    std::string word;
    long long value = -1;
    if (!(in >> word) || word != key || !(in >> value) || value < 1) bad("expected '" + key + " <count>'");
    return static_cast<std::size_t>(value);
}

}  // namespace

std::optional<std::string> Checkpoint::meta(const std::string& key) const {
    const auto it = metadata.find(key);
    if (it == metadata.end()) return std::nullopt;
    return it->second;
}

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
    const auto& p = checkpoint.params;
    out << "hydrolstm-checkpoint " << kCheckpointVersion << '\n';
    out << "input_dim " << p.shape().input_dim << '\n';
    out << "hidden " << p.shape().hidden << '\n';
    for (const auto& [key, value] : checkpoint.metadata) {
        if (key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos)
            bad("metadata key/value contains whitespace: '" + key + "'");
        out << "meta " << key << ' ' << value << '\n';
    }
    const auto values = p.values();
    for (const auto& t : tensor_layout(p)) {
        out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
        for (std::size_t r = 0; r < t.rows; ++r) {
            for (std::size_t c = 0; c < t.cols; ++c) {
                if (c) out << ' ';
                out << format_number(values[t.offset + r * t.cols + c]);
            }
            out << '\n';
        }
    }
    out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "hydrolstm-checkpoint") bad("not a hydrolstm checkpoint");
    if (version != kCheckpointVersion) bad("unsupported checkpoint version " + std::to_string(version));
    ModelShape shape;
    shape.input_dim = read_count(in, "input_dim");
    shape.hidden = read_count(in, "hidden");
    Checkpoint cp{ModelParams(shape), {}};
    const auto layout = tensor_layout(cp.params);
    auto values = cp.params.values();
    std::size_t next_tensor = 0;
    std::string word;
    while (in >> word) {
        if (word == "meta") {
            std::string key, value;
            in >> key;
            std::getline(in >> std::ws, value);
            if (key.empty()) bad("empty metadata key");
            cp.metadata[key] = value;
        } else if (word == "tensor") {
            if (next_tensor >= layout.size()) bad("too many tensors");
            const auto& t = layout[next_tensor++];
            std::string name;
            std::size_t rows = 0, cols = 0;
            in >> name >> rows >> cols;
            if (name != t.name || rows != t.rows || cols != t.cols)
                bad("tensor '" + name + "' has unexpected name or dimensions (expected " + t.name + " " +
                    std::to_string(t.rows) + "x" + std::to_string(t.cols) + ")");
            for (std::size_t i = 0; i < rows * cols; ++i) {
                std::string token;
                if (!(in >> token)) bad("truncated tensor " + t.name);
                const auto v = parse_number(token);
                if (!v || !std::isfinite(*v)) bad("bad value '" + token + "' in tensor " + t.name);
                values[t.offset + i] = *v;
            }
        } else if (word == "end") {
            if (next_tensor != layout.size()) bad("missing tensors");
            return cp;
        } else {
            bad("unexpected token '" + word + "'");
        }
    }
    bad("missing 'end' marker");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    write_checkpoint(out, checkpoint);
    if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open checkpoint '" + path.string() + "'");
    return read_checkpoint(in);
}

}  // namespace hydrolstm
