#ifndef FUELGAN_NN_HPP
#define FUELGAN_NN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuelgan/matrix.hpp"
#include "fuelgan/rng.hpp"

namespace fuelgan::nn {

enum class Activation { Identity, Tanh, LeakyRelu, Sigmoid };

constexpr double kLeakyReluSlope = 0.2;
// Probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] before logs.
constexpr double kProbEpsilon = 1e-7;

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
    Matrix weights;              // out x in
    std::vector<double> biases;  // out
    Activation activation = Activation::Identity;

    std::size_t in_dim() const { return weights.cols(); }
    std::size_t out_dim() const { return weights.rows(); }
};

// Xavier/Glorot uniform init for tanh/sigmoid/identity, He-style for
// leaky-relu; biases zero.
DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation activation, Rng& rng);

struct DropoutSpec {
    double rate = 0.0;       // element drop probability in [0, 1)
    bool train_only = true;  // if false, dropout also applies at inference
};

// output = activation(input * W^T + b), row-wise.
Matrix dense_forward(const Matrix& input, const DenseLayer& layer);

// Inverted dropout: in training each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate); the returned mask holds the
// applied factors (0 or 1/(1-rate)). At inference the input passes through
// and the mask is all ones.
std::pair<Matrix, Matrix> dropout_forward(const Matrix& input, const DropoutSpec& spec,
                                          bool training, Rng& rng);

// Dense stack. dropout[l] is applied to layer l's *input*, so a stack where
// every dense layer carries a dropout spec still produces an undropped head
// output (the sigmoid probability for a discriminator).
struct Network {
    std::vector<DenseLayer> layers;
    std::vector<DropoutSpec> dropout;  // same length as layers; rate 0 = none

    std::size_t in_dim() const { return layers.front().in_dim(); }
    std::size_t out_dim() const { return layers.back().out_dim(); }
};

// Everything backward() needs from the matching forward pass.
struct ForwardCache {
    std::vector<Matrix> dropped_inputs;   // per layer: input after dropout
    std::vector<Matrix> pre_activations;  // per layer: z = xd * W^T + b
    std::vector<Matrix> masks;            // per layer: applied dropout factors
    Matrix output;
    bool valid = false;
};

Matrix forward(const Network& net, const Matrix& input, bool training, Rng* rng,
               ForwardCache* cache = nullptr);

// Forward pass that reuses previously sampled dropout masks; the finite
// difference oracle and backward() both need the masks frozen.
Matrix forward_with_masks(const Network& net, const Matrix& input,
                          const std::vector<Matrix>& masks, ForwardCache* cache = nullptr);

double bce_loss(const Matrix& predictions, const Matrix& targets);
// dL/dprediction of bce_loss, zero where the clamp was active.
Matrix bce_backward(const Matrix& predictions, const Matrix& targets);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    Matrix input;  // dL/dinput, for chaining through a downstream network
};

// Exact analytic gradients of a scalar loss w.r.t. every parameter, given the
// upstream dL/doutput. Dropout masks come from the cache, never resampled.
Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& upstream);

void accumulate(Gradients& into, const Gradients& other);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Per-tensor Adam state; moments are shaped like the flattened parameters.
struct AdamState {
    AdamConfig hyper;
    long step_count = 0;
    std::vector<double> m;
    std::vector<double> v;

    AdamState() = default;
    AdamState(AdamConfig cfg, std::size_t param_count)
        : hyper(cfg), m(param_count, 0.0), v(param_count, 0.0) {}
};

// Standard Adam update with bias correction; increments step_count.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

struct SgdState {
    double learning_rate = 0.01;
};

enum class GradientDirection { Descend, Ascend };

void sgd_step(std::span<double> params, std::span<const double> grads, const SgdState& state,
              GradientDirection direction);

// Whole-network optimizer wrappers. Tensor order: layer0.W, layer0.b, ...
struct NetworkAdam {
    std::vector<AdamState> tensors;
};

NetworkAdam make_network_adam(const Network& net, const AdamConfig& cfg);
void adam_step(Network& net, const Gradients& grads, NetworkAdam& state);
void sgd_step(Network& net, const Gradients& grads, const SgdState& state,
              GradientDirection direction);

std::size_t parameter_count(const Network& net);

} // namespace fuelgan::nn

#endif
