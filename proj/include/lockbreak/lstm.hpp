#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lockbreak/bits.hpp"
#include "lockbreak/error.hpp"

namespace lockbreak {

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error("drnn", what) {}
};

// One peephole LSTM layer. Gate matrices act on the concatenation
// [h_{t-1}; x_t], so each is hidden x (hidden + input). The output-gate
// peephole reads c_{t-1}, like the forget and input gates.
//
//   f_t = sigmoid(W_f [h_{t-1}, x_t] + V_f * c_{t-1} + b_f)
//   i_t = sigmoid(W_i [h_{t-1}, x_t] + V_i * c_{t-1} + b_i)
//   o_t = sigmoid(W_o [h_{t-1}, x_t] + V_o * c_{t-1} + b_o)
//   c_t = f_t * c_{t-1} + i_t * tanh(W_c [h_{t-1}, x_t] + b_c)
//   h_t = o_t * tanh(c_t)
struct LstmLayer {
    std::size_t input_width = 0;
    std::size_t hidden_width = 0;
    Eigen::MatrixXd w_forget, w_input, w_output, w_cell;
    Eigen::VectorXd peep_forget, peep_input, peep_output;
    Eigen::VectorXd b_forget, b_input, b_output, b_cell;

    LstmLayer() = default;
    LstmLayer(std::size_t input, std::size_t hidden);
};

// All trainable arrays of a network. Also used for gradients and momentum
// accumulators, which mirror the parameter shapes.
struct LstmParameters {
    std::vector<LstmLayer> layers;
    Eigen::MatrixXd readout_w;  // outputs x hidden of last layer
    Eigen::VectorXd readout_b;

    [[nodiscard]] LstmParameters zeros_like() const;
    [[nodiscard]] std::size_t count() const;

    // Visits every array in a fixed canonical order.
    void for_each(const std::function<void(std::string_view, std::span<double>)>& fn);
    void for_each(const std::function<void(std::string_view, std::span<const double>)>& fn) const;
};

struct NetworkShape {
    // Maximum stimulus width; shorter stimuli are zero-padded.
    std::size_t input_bits = 0;
    // Bits consumed per timestep.
    std::size_t chunk_width = 8;
    // One entry per LSTM layer (1HL or 2HL).
    std::vector<std::size_t> hidden{128};
    std::size_t outputs = 0;

    [[nodiscard]] std::size_t timesteps() const noexcept {
        return chunk_width == 0 ? 0 : (input_bits + chunk_width - 1) / chunk_width;
    }
    [[nodiscard]] std::size_t padded_bits() const noexcept { return timesteps() * chunk_width; }

    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

inline constexpr double kInitRange = 0.05;

class LstmNetwork {
public:
    LstmNetwork() = default;
    // Weights drawn uniformly from [-kInitRange, kInitRange] with `seed`.
    LstmNetwork(NetworkShape shape, std::uint64_t seed);
    // All parameters zero.
    static LstmNetwork zeros(NetworkShape shape);

    [[nodiscard]] const NetworkShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::uint64_t init_seed() const noexcept { return init_seed_; }
    [[nodiscard]] LstmParameters& params() noexcept { return params_; }
    [[nodiscard]] const LstmParameters& params() const noexcept { return params_; }

    friend bool operator==(const LstmNetwork& a, const LstmNetwork& b);

private:
    LstmNetwork(NetworkShape shape, std::uint64_t seed, bool randomize);
    friend LstmNetwork load_model(std::span<const std::uint8_t>);

    NetworkShape shape_;
    std::uint64_t init_seed_ = 0;
    LstmParameters params_;
};

// Activations of one layer at one timestep for a batch (one column per pattern).
struct LayerStep {
    Eigen::MatrixXd z;  // [h_{t-1}; x_t]
    Eigen::MatrixXd f, i, o, g, c, tanh_c, h;
};

// Per-layer (h, c), hidden x batch. Empty means all zeros.
struct RecurrentState {
    std::vector<Eigen::MatrixXd> h, c;

    [[nodiscard]] bool zero() const noexcept { return h.empty(); }
    // Each column repeated `times` times, block-wise: [s s ... s].
    [[nodiscard]] RecurrentState tile(Eigen::Index times) const;
};

struct ForwardCache {
    std::size_t batch = 0;
    RecurrentState start;
    std::vector<std::vector<LayerStep>> steps;  // [layer][t]
    Eigen::MatrixXd inputs;                      // (steps x chunk) x batch
    Eigen::MatrixXd outputs;                     // outputs x batch

    [[nodiscard]] bool empty() const noexcept { return steps.empty(); }
};

// Stimuli as a real matrix, one column per pattern, 0.0/1.0 entries.
Eigen::MatrixXd encode_bits(std::span<const BitVector> rows, std::size_t width);
// Columns thresholded at 0.5.
std::vector<BitVector> decode_threshold(const Eigen::MatrixXd& predictions);

// `inputs` has at most shape().input_bits rows (real-valued, one column per
// pattern). Returns the cache needed by backward().
ForwardCache forward_batch(const LstmNetwork& net, const Eigen::MatrixXd& inputs);
// Continues from `start` over whole chunks (rows a multiple of the chunk
// width); the readout reads the last of these steps.
ForwardCache forward_from(const LstmNetwork& net, const RecurrentState& start,
                          const Eigen::MatrixXd& chunks);
// State after the last step of `cache`.
RecurrentState final_state(const ForwardCache& cache);
Eigen::MatrixXd predict(const LstmNetwork& net, const Eigen::MatrixXd& inputs);
Eigen::VectorXd forward(const LstmNetwork& net, const BitVector& x);

struct LossValue {
    double sum = 0.0;  // sum over patterns of squared Euclidean distance
    double mse = 0.0;  // sum / number of (pattern, output) cells counted
};

// `mask`, when given, has the targets' shape; zero entries are excluded.
LossValue squared_error(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets,
                        const Eigen::MatrixXd* mask = nullptr);

struct Gradients {
    LstmParameters params;   // dE/dtheta
    Eigen::MatrixXd inputs;  // dE/dx, same shape as cache.inputs (when requested)
};

struct BackwardOptions {
    const Eigen::MatrixXd* mask = nullptr;
    bool parameter_gradients = true;
    bool input_gradients = false;
};

// Exact gradient of squared_error(...).sum by backpropagation through time.
// For a cache from forward_from, gradients stop at the start state.
Gradients backward(const LstmNetwork& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& targets, const BackwardOptions& options = {});

}  // namespace lockbreak
