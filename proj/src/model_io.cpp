#include "lockbreak/model_io.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "lockbreak/runtime.hpp"

namespace lockbreak {

namespace {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

constexpr char kMagic[6] = {'L', 'B', 'R', 'N', 'N', '\0'};
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 24;

struct ArrayRef {
    double* data;
    Eigen::Index rows, cols;
};

template <typename Params, typename Fn>
void arrays(Params& p, Fn&& fn) {
    auto mat = [&](auto& m) { fn(ArrayRef{const_cast<double*>(m.data()), m.rows(), m.cols()}); };
    for (auto& l : p.layers) {
        mat(l.w_forget), mat(l.w_input), mat(l.w_output), mat(l.w_cell);
        mat(l.peep_forget), mat(l.peep_input), mat(l.peep_output);
        mat(l.b_forget), mat(l.b_input), mat(l.b_output), mat(l.b_cell);
    }
    mat(p.readout_w);
    mat(p.readout_b);
}

class Writer {
public:
    template <typename T>
    void put(T v) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        out.insert(out.end(), p, p + sizeof(T));
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    template <typename T>
    T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n)
            throw ModelFormatError(std::string("model stream truncated while reading ") + what +
                                   " at byte " + std::to_string(pos_));
    }
    const std::uint8_t* here() const { return bytes_.data() + pos_; }
    void skip(std::size_t n) { pos_ += n; }
    [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }
    [[nodiscard]] std::size_t pos() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint64_t dim(Reader& r, const char* what) {
    const auto v = r.get<std::uint64_t>(what);
    if (v == 0 || v > kMaxDim)
        throw ModelFormatError(std::string("implausible ") + what + " " + std::to_string(v));
    return v;
}

}  // namespace

std::vector<std::uint8_t> save_model(const LstmNetwork& net) {
    Writer w;
    for (char c : kMagic) w.put(c);
    w.put(kModelFormatVersion);
    const auto& s = net.shape();
    w.put<std::uint64_t>(s.input_bits);
    w.put<std::uint64_t>(s.chunk_width);
    w.put<std::uint64_t>(s.hidden.size());
    for (auto h : s.hidden) w.put<std::uint64_t>(h);
    w.put<std::uint64_t>(s.outputs);
    w.put<std::uint64_t>(net.init_seed());
    arrays(net.params(), [&](ArrayRef a) {
        w.put<std::uint64_t>(static_cast<std::uint64_t>(a.rows));
        w.put<std::uint64_t>(static_cast<std::uint64_t>(a.cols));
        for (Eigen::Index k = 0; k < a.rows * a.cols; ++k) w.put(a.data[k]);
    });
    return std::move(w.out);
}

LstmNetwork load_model(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.need(sizeof kMagic, "magic");
    if (std::memcmp(r.here(), kMagic, sizeof kMagic) != 0) throw ModelFormatError("not a model file (bad magic)");
    r.skip(sizeof kMagic);
    const auto version = r.get<std::uint32_t>("version");
    if (version != kModelFormatVersion)
        throw ModelFormatError("unsupported model format version " + std::to_string(version));

    NetworkShape shape;
    shape.input_bits = dim(r, "input width");
    shape.chunk_width = dim(r, "chunk width");
    const auto layers = r.get<std::uint64_t>("layer count");
    if (layers < 1 || layers > 2) throw ModelFormatError("bad layer count " + std::to_string(layers));
    shape.hidden.clear();
    for (std::uint64_t l = 0; l < layers; ++l) shape.hidden.push_back(dim(r, "hidden width"));
    shape.outputs = dim(r, "output width");
    const auto seed = r.get<std::uint64_t>("init seed");

    LstmNetwork net(shape, seed, false);
    arrays(net.params(), [&](ArrayRef a) {
        const auto rows = r.get<std::uint64_t>("array rows");
        const auto cols = r.get<std::uint64_t>("array cols");
        if (rows != static_cast<std::uint64_t>(a.rows) || cols != static_cast<std::uint64_t>(a.cols))
            throw ModelFormatError("array at byte " + std::to_string(r.pos()) + " is " + std::to_string(rows) +
                                   "x" + std::to_string(cols) + ", shape implies " + std::to_string(a.rows) +
                                   "x" + std::to_string(a.cols));
        const auto n = static_cast<std::size_t>(a.rows * a.cols);
        r.need(n * sizeof(double), "array data");
        std::memcpy(a.data, r.here(), n * sizeof(double));
        r.skip(n * sizeof(double));
    });
    if (!r.done())
        throw ModelFormatError("trailing bytes after model data at byte " + std::to_string(r.pos()));
    return net;
}

void save_model_file(const LstmNetwork& net, const std::filesystem::path& path) {
    const auto bytes = save_model(net);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

LstmNetwork load_model_file(const std::filesystem::path& path) {
    const std::string s = read_file(path);
    return load_model({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

}  // namespace lockbreak
