#include "fuelgan/nn.hpp"

#include <algorithm>
#include <cmath>

#include "fuelgan/errors.hpp"
#include "fuelgan/kernels.hpp"

namespace fuelgan::nn {

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::Tanh: return std::tanh(z);
        case Activation::LeakyRelu: return z > 0.0 ? z : kLeakyReluSlope * z;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

// Derivative in terms of the pre-activation z and the activation value a.
double activate_grad(Activation act, double z, double a) {
    switch (act) {
        case Activation::Identity: return 1.0;
        case Activation::Tanh: return 1.0 - a * a;
        case Activation::LeakyRelu: return z > 0.0 ? 1.0 : kLeakyReluSlope;
        case Activation::Sigmoid: return a * (1.0 - a);
    }
    return 1.0;
}

Matrix apply_activation(Activation act, const Matrix& z) {
    Matrix out = z;
    for (double& v : out.values()) v = activate(act, v);
    return out;
}

double clamp_prob(double p) {
    return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

void check_prediction_shapes(const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() == 0) throw ArgumentError("bce_loss: empty batch");
    if (!predictions.same_shape(targets)) {
        throw DimensionError("bce_loss: predictions " + predictions.shape_str() +
                             " vs targets " + targets.shape_str());
    }
}

} // namespace

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Tanh: return "tanh";
        case Activation::LeakyRelu: return "leaky-relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "tanh") return Activation::Tanh;
    if (name == "leaky-relu") return Activation::LeakyRelu;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ConfigError("unknown activation: " + name);
}

DenseLayer make_dense(std::size_t in_dim, std::size_t out_dim, Activation activation, Rng& rng) {
    if (in_dim == 0 || out_dim == 0) throw ConfigError("make_dense: zero-sized layer");
    DenseLayer layer;
    layer.weights = Matrix(out_dim, in_dim);
    layer.biases.assign(out_dim, 0.0);
    layer.activation = activation;
    const double fan_in = static_cast<double>(in_dim);
    const double fan_out = static_cast<double>(out_dim);
    const double limit = activation == Activation::LeakyRelu
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : layer.weights.values()) w = rng.uniform(-limit, limit);
    return layer;
}

Matrix dense_forward(const Matrix& input, const DenseLayer& layer) {
    if (input.cols() != layer.in_dim()) {
        throw DimensionError("dense_forward: input " + input.shape_str() + " vs weights " +
                             layer.weights.shape_str());
    }
    Matrix z = kernels::matmul_nt(input, layer.weights);
    kernels::add_row_bias(z, layer.biases);
    return apply_activation(layer.activation, z);
}

std::pair<Matrix, Matrix> dropout_forward(const Matrix& input, const DropoutSpec& spec,
                                          bool training, Rng& rng) {
    if (spec.rate < 0.0 || spec.rate >= 1.0) {
        throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(spec.rate));
    }
    const bool active = spec.rate > 0.0 && (training || !spec.train_only);
    Matrix mask(input.rows(), input.cols(), 1.0);
    if (active) {
        const double keep_scale = 1.0 / (1.0 - spec.rate);
        // Mask sampling is a single sequential pass over the rng stream so the
        // consumed sequence is independent of threading.
        for (double& m : mask.values()) m = rng.uniform01() < spec.rate ? 0.0 : keep_scale;
    }
    Matrix output = input;
    if (active) kernels::hadamard_inplace(output, mask);
    return {std::move(output), std::move(mask)};
}

namespace {

Matrix forward_impl(const Network& net, const Matrix& input, bool training, Rng* rng,
                    const std::vector<Matrix>* fixed_masks, ForwardCache* cache) {
    if (net.layers.empty()) throw StateError("forward: empty network");
    if (net.dropout.size() != net.layers.size()) {
        throw StateError("forward: dropout spec count does not match layer count");
    }
    if (input.cols() != net.in_dim()) {
        throw DimensionError("forward: input " + input.shape_str() + " vs expected in dim " +
                             std::to_string(net.in_dim()));
    }
    if (cache) {
        cache->dropped_inputs.clear();
        cache->pre_activations.clear();
        cache->masks.clear();
        cache->valid = false;
    }

    Matrix x = input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const DenseLayer& layer = net.layers[l];
        Matrix xd;
        Matrix mask;
        if (fixed_masks) {
            mask = (*fixed_masks)[l];
            if (!mask.same_shape(x)) {
                throw DimensionError("forward_with_masks: mask " + mask.shape_str() +
                                     " vs activations " + x.shape_str() + " at layer " +
                                     std::to_string(l));
            }
            xd = x;
            kernels::hadamard_inplace(xd, mask);
        } else if (net.dropout[l].rate > 0.0 && training) {
            if (!rng) throw StateError("forward: training-mode dropout requires an rng");
            auto dropped = dropout_forward(x, net.dropout[l], training, *rng);
            xd = std::move(dropped.first);
            mask = std::move(dropped.second);
        } else {
            xd = x;
            mask = Matrix(x.rows(), x.cols(), 1.0);
        }

        Matrix z = kernels::matmul_nt(xd, layer.weights);
        kernels::add_row_bias(z, layer.biases);
        Matrix a = apply_activation(layer.activation, z);

        if (cache) {
            cache->dropped_inputs.push_back(std::move(xd));
            cache->pre_activations.push_back(std::move(z));
            cache->masks.push_back(std::move(mask));
        }
        x = std::move(a);
    }
    if (cache) {
        cache->output = x;
        cache->valid = true;
    }
    return x;
}

} // namespace

Matrix forward(const Network& net, const Matrix& input, bool training, Rng* rng,
               ForwardCache* cache) {
    return forward_impl(net, input, training, rng, nullptr, cache);
}

Matrix forward_with_masks(const Network& net, const Matrix& input,
                          const std::vector<Matrix>& masks, ForwardCache* cache) {
    if (masks.size() != net.layers.size()) {
        throw StateError("forward_with_masks: expected " + std::to_string(net.layers.size()) +
                         " masks, got " + std::to_string(masks.size()));
    }
    return forward_impl(net, input, false, nullptr, &masks, cache);
}

double bce_loss(const Matrix& predictions, const Matrix& targets) {
    check_prediction_shapes(predictions, targets);
    const auto p = predictions.values();
    const auto t = targets.values();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pc = clamp_prob(p[i]);
        total += t[i] * std::log(pc) + (1.0 - t[i]) * std::log(1.0 - pc);
    }
    return -total / static_cast<double>(predictions.rows());
}

Matrix bce_backward(const Matrix& predictions, const Matrix& targets) {
    check_prediction_shapes(predictions, targets);
    const double batch = static_cast<double>(predictions.rows());
    Matrix grad(predictions.rows(), predictions.cols());
    auto g = grad.values();
    const auto p = predictions.values();
    const auto t = targets.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < kProbEpsilon || p[i] > 1.0 - kProbEpsilon) {
            g[i] = 0.0;  // inside the clamp the loss is locally flat in p
        } else {
            g[i] = -(t[i] / p[i] - (1.0 - t[i]) / (1.0 - p[i])) / batch;
        }
    }
    return grad;
}

Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& upstream) {
    if (!cache.valid || cache.pre_activations.size() != net.layers.size()) {
        throw StateError("backward: missing or mismatched forward cache");
    }
    if (!upstream.same_shape(cache.output)) {
        throw DimensionError("backward: upstream gradient " + upstream.shape_str() +
                             " vs output " + cache.output.shape_str());
    }

    Gradients grads;
    grads.weights.resize(net.layers.size());
    grads.biases.resize(net.layers.size());

    Matrix da = upstream;  // dL/da_l
    for (std::size_t idx = net.layers.size(); idx-- > 0;) {
        const DenseLayer& layer = net.layers[idx];
        const Matrix& z = cache.pre_activations[idx];
        const Matrix& xd = cache.dropped_inputs[idx];

        // dz = da ⊙ act'(z)
        Matrix dz = da;
        {
            auto dzv = dz.values();
            auto zv = z.values();
            // sigmoid/tanh derivatives use the activation value, recomputed
            // from z here to keep the cache small
            for (std::size_t i = 0; i < dzv.size(); ++i) {
                const double a = activate(layer.activation, zv[i]);
                dzv[i] *= activate_grad(layer.activation, zv[i], a);
            }
        }

        grads.weights[idx] = kernels::matmul_tn(dz, xd);  // (out x in)
        grads.biases[idx] = kernels::column_sums(dz);

        Matrix dx = kernels::matmul(dz, layer.weights);  // dL/d(dropped input)
        kernels::hadamard_inplace(dx, cache.masks[idx]); // back through frozen dropout
        da = std::move(dx);
    }
    grads.input = std::move(da);
    return grads;
}

void accumulate(Gradients& into, const Gradients& other) {
    if (into.weights.size() != other.weights.size()) {
        throw DimensionError("accumulate: gradient layer counts differ");
    }
    for (std::size_t l = 0; l < into.weights.size(); ++l) {
        auto wi = into.weights[l].values();
        auto wo = other.weights[l].values();
        if (wi.size() != wo.size()) throw DimensionError("accumulate: weight shapes differ");
        for (std::size_t i = 0; i < wi.size(); ++i) wi[i] += wo[i];
        for (std::size_t i = 0; i < into.biases[l].size(); ++i) {
            into.biases[l][i] += other.biases[l][i];
        }
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw DimensionError("adam_step: params " + std::to_string(params.size()) + ", grads " +
                             std::to_string(grads.size()) + ", state " +
                             std::to_string(state.m.size()));
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const AdamConfig& h = state.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, t);
    const double bc2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * grads[i];
        state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

void sgd_step(std::span<double> params, std::span<const double> grads, const SgdState& state,
              GradientDirection direction) {
    if (params.size() != grads.size()) {
        throw DimensionError("sgd_step: params " + std::to_string(params.size()) + " vs grads " +
                             std::to_string(grads.size()));
    }
    if (state.learning_rate < 0.0) throw ConfigError("sgd_step: negative learning rate");
    const double sign = direction == GradientDirection::Descend ? -1.0 : 1.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] += sign * state.learning_rate * grads[i];
    }
}

NetworkAdam make_network_adam(const Network& net, const AdamConfig& cfg) {
    NetworkAdam state;
    for (const DenseLayer& layer : net.layers) {
        state.tensors.emplace_back(cfg, layer.weights.size());
        state.tensors.emplace_back(cfg, layer.biases.size());
    }
    return state;
}

void adam_step(Network& net, const Gradients& grads, NetworkAdam& state) {
    if (state.tensors.size() != net.layers.size() * 2) {
        throw DimensionError("adam_step: optimizer state does not match network");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        adam_step(net.layers[l].weights.values(), grads.weights[l].values(),
                  state.tensors[2 * l]);
        adam_step(std::span<double>(net.layers[l].biases),
                  std::span<const double>(grads.biases[l]), state.tensors[2 * l + 1]);
    }
}

void sgd_step(Network& net, const Gradients& grads, const SgdState& state,
              GradientDirection direction) {
    if (grads.weights.size() != net.layers.size()) {
        throw DimensionError("sgd_step: gradients do not match network");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        sgd_step(net.layers[l].weights.values(), grads.weights[l].values(), state, direction);
        sgd_step(std::span<double>(net.layers[l].biases),
                 std::span<const double>(grads.biases[l]), state, direction);
    }
}

std::size_t parameter_count(const Network& net) {
    std::size_t n = 0;
    for (const DenseLayer& layer : net.layers) n += layer.weights.size() + layer.biases.size();
    return n;
}

} // namespace fuelgan::nn
