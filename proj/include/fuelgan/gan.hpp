#ifndef FUELGAN_GAN_HPP
#define FUELGAN_GAN_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fuelgan/matrix.hpp"
#include "fuelgan/nn.hpp"
#include "fuelgan/rng.hpp"

namespace fuelgan::gan {

enum class GeneratorLossMode { Minimax, NonSaturating };

const char* generator_loss_name(GeneratorLossMode mode);
GeneratorLossMode generator_loss_from_name(const std::string& name);

struct GanConfig {
    std::size_t latent_dim = 32;
    std::size_t feature_dim = 0;  // n, set from the dataset
    // Five generator layers (last width must equal feature_dim) and six
    // discriminator layers (last width must be 1). A trailing 0 in
    // generator_widths means "use feature_dim".
    std::vector<std::size_t> generator_widths = {64, 128, 128, 64, 0};
    std::vector<std::size_t> discriminator_widths = {128, 64, 64, 32, 16, 1};
    double dropout_rate = 0.3;
    std::size_t discriminator_steps = 1;  // k: discriminator updates per iteration
    std::size_t batch_size = 64;          // m
    std::size_t iterations = 2000;
    nn::AdamConfig adam;                  // generator optimizer
    double sgd_learning_rate = 0.01;      // discriminator optimizer
    GeneratorLossMode generator_loss = GeneratorLossMode::Minimax;
    std::uint64_t seed = 42;
};

// Resolves the trailing-0 generator width and checks all invariants.
GanConfig resolve(GanConfig config);
void validate(const GanConfig& config);

struct GanModel {
    nn::Network generator;      // tanh throughout, latent_dim -> feature_dim
    nn::Network discriminator;  // leaky-relu hidden, sigmoid head, dropout per layer
    GanConfig config;
};

GanModel build(const GanConfig& config, Rng& rng);

// m x d matrix of i.i.d. standard normal draws.
Matrix sample_latent(std::size_t m, std::size_t d, Rng& rng);

// Batch estimate of V(D,G) = mean log D(x) + mean log(1 - D(G(z))), with
// clamped logs and dropout off.
double value_function(const GanModel& model, const Matrix& real_batch, const Matrix& noise_batch);

// One SGD step on the discriminator: samples m latents, builds fakes, and
// descends BCE with targets 1 (real) / 0 (fake), which is the same update as
// ascending the value function. Dropout is active; the generator is untouched.
// Rng consumption order: latents, then real-pass masks, then fake-pass masks.
double discriminator_step(GanModel& model, const Matrix& real_batch, const nn::SgdState& opt,
                          Rng& rng);

// One Adam step on the generator. Minimax mode descends mean log(1 - D(G(z)))
// verbatim; non-saturating mode descends mean -log D(G(z)). Discriminator
// dropout is off during this step and its parameters are untouched.
double generator_step(GanModel& model, nn::NetworkAdam& opt, Rng& rng);

struct TraceRow {
    std::size_t iteration = 0;
    double discriminator_loss = 0.0;  // mean over the k steps of the iteration
    double generator_loss = 0.0;
    double value = 0.0;               // V(D,G) on a fresh evaluation batch
    double mean_d_real = 0.0;
    double mean_d_fake = 0.0;
};

struct TrainingTrace {
    std::vector<TraceRow> rows;
};

struct TrainHooks {
    std::function<void()> on_discriminator_update;
    std::function<void()> on_generator_update;
};

struct TrainResult {
    GanModel model;
    TrainingTrace trace;
};

// Algorithm: for each iteration, k discriminator steps then one generator
// step; one trace row per iteration. `data` must be scaled to [-1, 1] and
// hold at least one batch of rows. Deterministic for a given (config, data).
TrainResult train(const GanConfig& config, const Matrix& data, const TrainHooks& hooks = {});

struct AnomalyScore {
    double probability_real = 0.0;  // D(x)
    double anomaly_score = 0.0;     // 1 - D(x)
    int predicted_label = 0;        // 1 = anomalous
    double threshold = 0.0;
};

// Scores rows already scaled with the training scaler; anomalous iff
// 1 - D(x) > threshold. Dropout off; row order preserved.
std::vector<AnomalyScore> score(const GanModel& model, const Matrix& rows, double threshold);

} // namespace fuelgan::gan

#endif
