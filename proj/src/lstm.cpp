#include "lockbreak/lstm.hpp"

#include <cmath>
#include <random>
#include <string>

namespace lockbreak {

namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& a) {
    return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

// Eigen's double tanh is scalar; this form vectorizes through exp and is
// accurate to a few ulps absolute.
MatrixXd tanh_of(const MatrixXd& a) {
    return (2.0 / (1.0 + (-2.0 * a.array()).exp()) - 1.0).matrix();
}

template <class Params, class Fn>
void visit(Params& p, Fn&& fn) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& L = p.layers[l];
        const std::string pre = "layer" + std::to_string(l) + ".";
        fn(pre + "w_forget", L.w_forget.data(), L.w_forget.size());
        fn(pre + "w_input", L.w_input.data(), L.w_input.size());
        fn(pre + "w_output", L.w_output.data(), L.w_output.size());
        fn(pre + "w_cell", L.w_cell.data(), L.w_cell.size());
        fn(pre + "peep_forget", L.peep_forget.data(), L.peep_forget.size());
        fn(pre + "peep_input", L.peep_input.data(), L.peep_input.size());
        fn(pre + "peep_output", L.peep_output.data(), L.peep_output.size());
        fn(pre + "b_forget", L.b_forget.data(), L.b_forget.size());
        fn(pre + "b_input", L.b_input.data(), L.b_input.size());
        fn(pre + "b_output", L.b_output.data(), L.b_output.size());
        fn(pre + "b_cell", L.b_cell.data(), L.b_cell.size());
    }
    fn(std::string("readout_w"), p.readout_w.data(), p.readout_w.size());
    fn(std::string("readout_b"), p.readout_b.data(), p.readout_b.size());
}

void check_shape(const NetworkShape& s) {
    if (s.input_bits == 0) throw ModelError("network input width must be >= 1");
    if (s.chunk_width == 0) throw ModelError("chunk width must be >= 1");
    if (s.outputs == 0) throw ModelError("network output width must be >= 1");
    if (s.hidden.empty() || s.hidden.size() > 2)
        throw ModelError("network needs 1 or 2 LSTM layers, got " + std::to_string(s.hidden.size()));
    for (auto h : s.hidden)
        if (h == 0) throw ModelError("hidden width must be >= 1");
}

}  // namespace

LstmLayer::LstmLayer(std::size_t input, std::size_t hidden)
    : input_width(input),
      hidden_width(hidden),
      w_forget(MatrixXd::Zero(hidden, hidden + input)),
      w_input(MatrixXd::Zero(hidden, hidden + input)),
      w_output(MatrixXd::Zero(hidden, hidden + input)),
      w_cell(MatrixXd::Zero(hidden, hidden + input)),
      peep_forget(VectorXd::Zero(hidden)),
      peep_input(VectorXd::Zero(hidden)),
      peep_output(VectorXd::Zero(hidden)),
      b_forget(VectorXd::Zero(hidden)),
      b_input(VectorXd::Zero(hidden)),
      b_output(VectorXd::Zero(hidden)),
      b_cell(VectorXd::Zero(hidden)) {}

LstmParameters LstmParameters::zeros_like() const {
    LstmParameters z;
    for (const auto& L : layers) z.layers.emplace_back(L.input_width, L.hidden_width);
    z.readout_w = MatrixXd::Zero(readout_w.rows(), readout_w.cols());
    z.readout_b = VectorXd::Zero(readout_b.size());
    return z;
}

std::size_t LstmParameters::count() const {
    std::size_t n = 0;
    for_each([&](std::string_view, std::span<const double> a) { n += a.size(); });
    return n;
}

void LstmParameters::for_each(const std::function<void(std::string_view, std::span<double>)>& fn) {
    visit(*this, [&](const std::string& name, double* data, Eigen::Index size) {
        fn(name, std::span<double>(data, static_cast<std::size_t>(size)));
    });
}

void LstmParameters::for_each(
    const std::function<void(std::string_view, std::span<const double>)>& fn) const {
    visit(*this, [&](const std::string& name, const double* data, Eigen::Index size) {
        fn(name, std::span<const double>(data, static_cast<std::size_t>(size)));
    });
}

LstmNetwork::LstmNetwork(NetworkShape shape, std::uint64_t seed)
    : LstmNetwork(std::move(shape), seed, true) {}

LstmNetwork LstmNetwork::zeros(NetworkShape shape) { return LstmNetwork(std::move(shape), 0, false); }

LstmNetwork::LstmNetwork(NetworkShape shape, std::uint64_t seed, bool randomize)
    : shape_(std::move(shape)), init_seed_(seed) {
    check_shape(shape_);
    std::size_t in = shape_.chunk_width;
    for (std::size_t h : shape_.hidden) {
        params_.layers.emplace_back(in, h);
        in = h;
    }
    params_.readout_w = MatrixXd::Zero(static_cast<Eigen::Index>(shape_.outputs),
                                       static_cast<Eigen::Index>(in));
    params_.readout_b = VectorXd::Zero(static_cast<Eigen::Index>(shape_.outputs));
    if (!randomize) return;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
    params_.for_each([&](std::string_view, std::span<double> a) {
        for (double& v : a) v = init(rng);
    });
}

bool operator==(const LstmNetwork& a, const LstmNetwork& b) {
    if (!(a.shape_ == b.shape_)) return false;
    std::vector<double> va, vb;
    a.params_.for_each([&](std::string_view, std::span<const double> s) { va.insert(va.end(), s.begin(), s.end()); });
    b.params_.for_each([&](std::string_view, std::span<const double> s) { vb.insert(vb.end(), s.begin(), s.end()); });
    return va == vb;
}

MatrixXd encode_bits(std::span<const BitVector> rows, std::size_t width) {
    MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(width),
                                static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw ModelError("encode_bits: row " + std::to_string(r) + " has width " +
                             std::to_string(rows[r].size()) + ", expected " + std::to_string(width));
        const auto bits = rows[r].data();
        for (std::size_t i = 0; i < width; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = bits[i];
    }
    return m;
}

std::vector<BitVector> decode_threshold(const MatrixXd& predictions) {
    std::vector<BitVector> out;
    out.reserve(static_cast<std::size_t>(predictions.cols()));
    for (Eigen::Index c = 0; c < predictions.cols(); ++c) {
        BitVector v(static_cast<std::size_t>(predictions.rows()));
        for (Eigen::Index r = 0; r < predictions.rows(); ++r)
            v.set(static_cast<std::size_t>(r), predictions(r, c) >= 0.5);
        out.push_back(std::move(v));
    }
    return out;
}

RecurrentState RecurrentState::tile(Eigen::Index times) const {
    RecurrentState out;
    for (const auto& m : h) out.h.push_back(m.replicate(1, times));
    for (const auto& m : c) out.c.push_back(m.replicate(1, times));
    return out;
}

ForwardCache forward_batch(const LstmNetwork& net, const MatrixXd& inputs) {
    const auto& shape = net.shape();
    if (static_cast<std::size_t>(inputs.rows()) > shape.input_bits)
        throw ModelError("input width " + std::to_string(inputs.rows()) +
                         " exceeds configured maximum " + std::to_string(shape.input_bits));
    MatrixXd padded = MatrixXd::Zero(static_cast<Eigen::Index>(shape.padded_bits()), inputs.cols());
    padded.topRows(inputs.rows()) = inputs;
    return forward_from(net, RecurrentState{}, padded);
}

ForwardCache forward_from(const LstmNetwork& net, const RecurrentState& start, const MatrixXd& chunks) {
    const auto& shape = net.shape();
    const auto w = static_cast<Eigen::Index>(shape.chunk_width);
    if (chunks.rows() == 0 || chunks.rows() % w != 0 ||
        static_cast<std::size_t>(chunks.rows()) > shape.padded_bits())
        throw ModelError("forward_from: " + std::to_string(chunks.rows()) +
                         " input rows is not a whole number of chunks within the network width");
    const Eigen::Index batch = chunks.cols();
    const Eigen::Index T = chunks.rows() / w;
    const auto& layers = net.params().layers;
    if (!start.zero()) {
        if (start.h.size() != layers.size() || start.c.size() != layers.size())
            throw ModelError("forward_from: start state has the wrong layer count");
        for (std::size_t l = 0; l < layers.size(); ++l)
            if (start.h[l].rows() != static_cast<Eigen::Index>(layers[l].hidden_width) ||
                start.h[l].cols() != batch || start.c[l].rows() != start.h[l].rows() ||
                start.c[l].cols() != batch)
                throw ModelError("forward_from: start state shape mismatch");
    }

    ForwardCache cache;
    cache.batch = static_cast<std::size_t>(batch);
    cache.start = start;
    cache.inputs = chunks;
    cache.steps.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LstmLayer& L = layers[l];
        const auto H = static_cast<Eigen::Index>(L.hidden_width);
        const auto in = static_cast<Eigen::Index>(L.input_width);
        auto& steps = cache.steps[l];
        steps.resize(static_cast<std::size_t>(T));
        for (Eigen::Index t = 0; t < T; ++t) {
            LayerStep& s = steps[static_cast<std::size_t>(t)];
            // With a zero start the first step sees h = c = 0, so only the
            // input columns of W contribute.
            const bool from_zero = t == 0 && start.zero();
            const MatrixXd* h_prev = nullptr;
            const MatrixXd* c_prev = nullptr;
            if (t > 0) {
                h_prev = &steps[static_cast<std::size_t>(t - 1)].h;
                c_prev = &steps[static_cast<std::size_t>(t - 1)].c;
            } else if (!from_zero) {
                h_prev = &start.h[l];
                c_prev = &start.c[l];
            }
            s.z.resize(H + in, batch);
            if (h_prev)
                s.z.topRows(H) = *h_prev;
            else
                s.z.topRows(H).setZero();
            if (l == 0)
                s.z.bottomRows(in) = chunks.middleRows(t * w, w);
            else
                s.z.bottomRows(in) = cache.steps[l - 1][static_cast<std::size_t>(t)].h;

            auto pre = [&](const MatrixXd& W, const VectorXd& b, const VectorXd* peep) {
                MatrixXd a(H, batch);
                if (from_zero)
                    a.noalias() = W.rightCols(in) * s.z.bottomRows(in);
                else
                    a.noalias() = W * s.z;
                a.colwise() += b;
                if (peep && c_prev) a.array() += c_prev->array().colwise() * peep->array();
                return a;
            };
            s.f = sigmoid(pre(L.w_forget, L.b_forget, &L.peep_forget));
            s.i = sigmoid(pre(L.w_input, L.b_input, &L.peep_input));
            s.o = sigmoid(pre(L.w_output, L.b_output, &L.peep_output));
            s.g = tanh_of(pre(L.w_cell, L.b_cell, nullptr));
            if (c_prev)
                s.c = (s.f.array() * c_prev->array() + s.i.array() * s.g.array()).matrix();
            else
                s.c = (s.i.array() * s.g.array()).matrix();
            s.tanh_c = tanh_of(s.c);
            s.h = (s.o.array() * s.tanh_c.array()).matrix();
        }
    }
    cache.outputs.noalias() = net.params().readout_w * cache.steps.back().back().h;
    cache.outputs.colwise() += net.params().readout_b;
    return cache;
}

RecurrentState final_state(const ForwardCache& cache) {
    if (cache.empty()) throw ModelError("final_state of an empty cache");
    RecurrentState s;
    for (const auto& layer : cache.steps) {
        s.h.push_back(layer.back().h);
        s.c.push_back(layer.back().c);
    }
    return s;
}

MatrixXd predict(const LstmNetwork& net, const MatrixXd& inputs) {
    return forward_batch(net, inputs).outputs;
}

VectorXd forward(const LstmNetwork& net, const BitVector& x) {
    const BitVector rows[] = {x};
    return predict(net, encode_bits(rows, x.size())).col(0);
}

LossValue squared_error(const MatrixXd& predictions, const MatrixXd& targets, const MatrixXd* mask) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw ModelError("loss: prediction shape " + std::to_string(predictions.rows()) + "x" +
                         std::to_string(predictions.cols()) + " != target shape " +
                         std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()));
    if (mask && (mask->rows() != targets.rows() || mask->cols() != targets.cols()))
        throw ModelError("loss: mask shape mismatch");
    LossValue v;
    double cells = 0.0;
    // Column-by-column accumulation mirrors the per-pattern sum.
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
        double pattern = 0.0;
        for (Eigen::Index r = 0; r < targets.rows(); ++r) {
            const double m = mask ? (*mask)(r, c) : 1.0;
            if (m == 0.0) continue;
            const double d = targets(r, c) - predictions(r, c);
            pattern += m * d * d;
            cells += 1.0;
        }
        v.sum += pattern;
    }
    v.mse = cells > 0 ? v.sum / cells : 0.0;
    return v;
}

Gradients backward(const LstmNetwork& net, const ForwardCache& cache, const MatrixXd& targets,
                   const BackwardOptions& options) {
    if (cache.empty()) throw ModelError("backward called without a forward cache");
    const auto& params = net.params();
    if (cache.steps.size() != params.layers.size() ||
        cache.outputs.rows() != params.readout_w.rows())
        throw ModelError("forward cache does not belong to this network");
    if (targets.rows() != cache.outputs.rows() || targets.cols() != cache.outputs.cols())
        throw ModelError("backward: target shape mismatch");
    if (options.mask && (options.mask->rows() != targets.rows() || options.mask->cols() != targets.cols()))
        throw ModelError("backward: mask shape mismatch");

    const Eigen::Index batch = static_cast<Eigen::Index>(cache.batch);
    const auto T = cache.steps.front().size();
    const bool want_params = options.parameter_gradients;
    const bool zero_start = cache.start.zero();

    Gradients grads;
    if (want_params) grads.params = params.zeros_like();

    // d(sum (y - d)^2)/dy = 2 (y - d)
    MatrixXd d_out = 2.0 * (cache.outputs - targets);
    if (options.mask) d_out.array() *= options.mask->array();
    if (want_params) {
        grads.params.readout_w.noalias() = d_out * cache.steps.back().back().h.transpose();
        grads.params.readout_b = d_out.rowwise().sum();
    }

    // dh arriving from the layer above (or the readout), per timestep.
    std::vector<MatrixXd> dh_above(T);
    dh_above.back() = params.readout_w.transpose() * d_out;

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const LstmLayer& L = params.layers[l];
        const auto H = static_cast<Eigen::Index>(L.hidden_width);
        const auto in = static_cast<Eigen::Index>(L.input_width);
        const auto& steps = cache.steps[l];
        const bool need_dx = l > 0 || options.input_gradients;

        std::vector<MatrixXd> dx(need_dx ? T : 0);
        MatrixXd dh_next, dc_next;  // empty until the first step back

        ArrayXXd dh, dc, da_f, da_i, da_o, da_c;
        for (std::size_t t = T; t-- > 0;) {
            const LayerStep& s = steps[t];
            const bool from_zero = t == 0 && zero_start;
            const MatrixXd* c_prev = t > 0 ? &steps[t - 1].c : (from_zero ? nullptr : &cache.start.c[l]);

            if (dh_above[t].size() && dh_next.size())
                dh = dh_above[t].array() + dh_next.array();
            else if (dh_above[t].size())
                dh = dh_above[t].array();
            else
                dh = dh_next.array();

            da_o = dh * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array());
            dc = dh * s.o.array() * (1.0 - s.tanh_c.array().square());
            if (dc_next.size()) dc += dc_next.array();
            if (c_prev)
                da_f = dc * c_prev->array() * s.f.array() * (1.0 - s.f.array());
            else
                da_f = ArrayXXd::Zero(H, batch);
            da_i = dc * s.g.array() * s.i.array() * (1.0 - s.i.array());
            da_c = dc * s.i.array() * (1.0 - s.g.array().square());

            if (want_params) {
                LstmLayer& G = grads.params.layers[l];
                const auto cols = from_zero ? in : H + in;
                const auto z = s.z.bottomRows(cols);
                G.w_forget.rightCols(cols).noalias() += da_f.matrix() * z.transpose();
                G.w_input.rightCols(cols).noalias() += da_i.matrix() * z.transpose();
                G.w_output.rightCols(cols).noalias() += da_o.matrix() * z.transpose();
                G.w_cell.rightCols(cols).noalias() += da_c.matrix() * z.transpose();
                G.b_forget += da_f.rowwise().sum().matrix();
                G.b_input += da_i.rowwise().sum().matrix();
                G.b_output += da_o.rowwise().sum().matrix();
                G.b_cell += da_c.rowwise().sum().matrix();
                if (c_prev) {
                    G.peep_forget += (da_f * c_prev->array()).rowwise().sum().matrix();
                    G.peep_input += (da_i * c_prev->array()).rowwise().sum().matrix();
                    G.peep_output += (da_o * c_prev->array()).rowwise().sum().matrix();
                }
            }

            // Nothing upstream of the first step needs dh or dc.
            const bool need_state = t > 0;
            if (need_state) {
                MatrixXd dz(H + in, batch);
                dz.noalias() = L.w_forget.transpose() * da_f.matrix();
                dz.noalias() += L.w_input.transpose() * da_i.matrix();
                dz.noalias() += L.w_output.transpose() * da_o.matrix();
                dz.noalias() += L.w_cell.transpose() * da_c.matrix();
                dh_next = dz.topRows(H);
                if (need_dx) dx[t] = dz.bottomRows(in);
                dc_next = (dc * s.f.array() + da_f.colwise() * L.peep_forget.array() +
                           da_i.colwise() * L.peep_input.array() +
                           da_o.colwise() * L.peep_output.array())
                              .matrix();
            } else if (need_dx) {
                MatrixXd d(in, batch);
                d.noalias() = L.w_forget.rightCols(in).transpose() * da_f.matrix();
                d.noalias() += L.w_input.rightCols(in).transpose() * da_i.matrix();
                d.noalias() += L.w_output.rightCols(in).transpose() * da_o.matrix();
                d.noalias() += L.w_cell.rightCols(in).transpose() * da_c.matrix();
                dx[t] = std::move(d);
            }
        }

        if (l > 0) {
            dh_above = std::move(dx);
        } else if (options.input_gradients) {
            const auto w = static_cast<Eigen::Index>(net.shape().chunk_width);
            grads.inputs.resize(cache.inputs.rows(), batch);
            for (std::size_t t = 0; t < T; ++t)
                grads.inputs.middleRows(static_cast<Eigen::Index>(t) * w, w) = dx[t];
        }
    }
    return grads;
}

}  // namespace lockbreak
