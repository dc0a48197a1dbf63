#include "fuelgan/gan.hpp"

#include <algorithm>
#include <cmath>

#include "fuelgan/errors.hpp"
#include "fuelgan/kernels.hpp"

namespace fuelgan::gan {

namespace {

constexpr double kScaledDataTolerance = 1e-9;

double clamp_prob(double p) {
    return std::clamp(p, nn::kProbEpsilon, 1.0 - nn::kProbEpsilon);
}

double mean(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

Matrix sample_rows(const Matrix& data, std::size_t m, Rng& rng) {
    Matrix batch(m, data.cols());
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t src = rng.next_below(data.rows());
        for (std::size_t j = 0; j < data.cols(); ++j) batch(i, j) = data(src, j);
    }
    return batch;
}

} // namespace

const char* generator_loss_name(GeneratorLossMode mode) {
    return mode == GeneratorLossMode::Minimax ? "minimax" : "non-saturating";
}

GeneratorLossMode generator_loss_from_name(const std::string& name) {
    if (name == "minimax") return GeneratorLossMode::Minimax;
    if (name == "non-saturating") return GeneratorLossMode::NonSaturating;
    throw ConfigError("unknown generator loss mode: " + name);
}

GanConfig resolve(GanConfig config) {
    if (!config.generator_widths.empty() && config.generator_widths.back() == 0) {
        config.generator_widths.back() = config.feature_dim;
    }
    validate(config);
    return config;
}

void validate(const GanConfig& config) {
    if (config.feature_dim == 0) throw ConfigError("gan: feature_dim must be >= 1");
    if (config.latent_dim == 0) throw ConfigError("gan: latent_dim must be >= 1");
    if (config.generator_widths.size() != 5) {
        throw ConfigError("gan: generator must have exactly 5 dense layers, got " +
                          std::to_string(config.generator_widths.size()));
    }
    if (config.discriminator_widths.size() != 6) {
        throw ConfigError("gan: discriminator must have exactly 6 dense layers, got " +
                          std::to_string(config.discriminator_widths.size()));
    }
    if (config.generator_widths.back() != config.feature_dim) {
        throw ConfigError("gan: generator output width " +
                          std::to_string(config.generator_widths.back()) +
                          " must equal feature_dim " + std::to_string(config.feature_dim));
    }
    if (config.discriminator_widths.back() != 1) {
        throw ConfigError("gan: discriminator final width must be 1");
    }
    for (std::size_t w : config.generator_widths) {
        if (w == 0) throw ConfigError("gan: zero generator layer width");
    }
    for (std::size_t w : config.discriminator_widths) {
        if (w == 0) throw ConfigError("gan: zero discriminator layer width");
    }
    if (config.discriminator_steps == 0) throw ConfigError("gan: k must be >= 1");
    if (config.batch_size == 0) throw ConfigError("gan: batch size must be >= 1");
    if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0) {
        throw ConfigError("gan: dropout rate must be in [0, 1)");
    }
    if (config.sgd_learning_rate < 0.0) throw ConfigError("gan: negative sgd learning rate");
}

GanModel build(const GanConfig& raw, Rng& rng) {
    GanConfig config = resolve(raw);
    GanModel model;
    model.config = config;

    std::size_t in_dim = config.latent_dim;
    for (std::size_t w : config.generator_widths) {
        model.generator.layers.push_back(nn::make_dense(in_dim, w, nn::Activation::Tanh, rng));
        model.generator.dropout.push_back({0.0, true});
        in_dim = w;
    }

    in_dim = config.feature_dim;
    for (std::size_t l = 0; l < config.discriminator_widths.size(); ++l) {
        const std::size_t w = config.discriminator_widths[l];
        const bool last = l + 1 == config.discriminator_widths.size();
        const auto activation = last ? nn::Activation::Sigmoid : nn::Activation::LeakyRelu;
        model.discriminator.layers.push_back(nn::make_dense(in_dim, w, activation, rng));
        // Dropout acts on each dense layer's input, so the sigmoid head output
        // itself is never dropped.
        model.discriminator.dropout.push_back({config.dropout_rate, true});
        in_dim = w;
    }
    return model;
}

Matrix sample_latent(std::size_t m, std::size_t d, Rng& rng) {
    if (m == 0 || d == 0) throw ArgumentError("sample_latent: m and d must be >= 1");
    Matrix z(m, d);
    for (double& v : z.values()) v = rng.normal();
    return z;
}

double value_function(const GanModel& model, const Matrix& real_batch,
                      const Matrix& noise_batch) {
    if (real_batch.rows() == 0 || noise_batch.rows() == 0) {
        throw ArgumentError("value_function: empty batch");
    }
    const Matrix fakes = nn::forward(model.generator, noise_batch, false, nullptr);
    const Matrix p_real = nn::forward(model.discriminator, real_batch, false, nullptr);
    const Matrix p_fake = nn::forward(model.discriminator, fakes, false, nullptr);
    double v = 0.0;
    for (double p : p_real.values()) v += std::log(clamp_prob(p));
    v /= static_cast<double>(p_real.rows());
    double w = 0.0;
    for (double p : p_fake.values()) w += std::log(1.0 - clamp_prob(p));
    return v + w / static_cast<double>(p_fake.rows());
}

double discriminator_step(GanModel& model, const Matrix& real_batch, const nn::SgdState& opt,
                          Rng& rng) {
    if (real_batch.cols() != model.config.feature_dim) {
        throw DimensionError("discriminator_step: batch " + real_batch.shape_str() +
                             " vs feature_dim " + std::to_string(model.config.feature_dim));
    }
    const std::size_t m = real_batch.rows();
    const Matrix z = sample_latent(m, model.config.latent_dim, rng);
    const Matrix fakes = nn::forward(model.generator, z, false, nullptr);

    nn::ForwardCache real_cache;
    const Matrix p_real =
        nn::forward(model.discriminator, real_batch, true, &rng, &real_cache);
    nn::ForwardCache fake_cache;
    const Matrix p_fake = nn::forward(model.discriminator, fakes, true, &rng, &fake_cache);

    const Matrix ones(m, 1, 1.0);
    const Matrix zeros(m, 1, 0.0);
    const double loss = nn::bce_loss(p_real, ones) + nn::bce_loss(p_fake, zeros);

    nn::Gradients grads =
        nn::backward(model.discriminator, real_cache, nn::bce_backward(p_real, ones));
    const nn::Gradients fake_grads =
        nn::backward(model.discriminator, fake_cache, nn::bce_backward(p_fake, zeros));
    nn::accumulate(grads, fake_grads);

    nn::sgd_step(model.discriminator, grads, opt, nn::GradientDirection::Descend);
    return loss;
}

double generator_step(GanModel& model, nn::NetworkAdam& opt, Rng& rng) {
    const std::size_t m = model.config.batch_size;
    const Matrix z = sample_latent(m, model.config.latent_dim, rng);

    nn::ForwardCache gen_cache;
    const Matrix fakes = nn::forward(model.generator, z, false, nullptr, &gen_cache);
    nn::ForwardCache disc_cache;
    const Matrix p = nn::forward(model.discriminator, fakes, false, nullptr, &disc_cache);

    const double batch = static_cast<double>(m);
    Matrix upstream(m, 1);
    double loss = 0.0;
    if (model.config.generator_loss == GeneratorLossMode::Minimax) {
        // L = mean log(1 - D(G(z)))
        for (std::size_t i = 0; i < m; ++i) {
            const double raw = p(i, 0);
            const double pc = clamp_prob(raw);
            loss += std::log(1.0 - pc);
            const bool clamped = raw < nn::kProbEpsilon || raw > 1.0 - nn::kProbEpsilon;
            upstream(i, 0) = clamped ? 0.0 : -1.0 / (batch * (1.0 - pc));
        }
        loss /= batch;
    } else {
        // L = mean -log D(G(z))
        for (std::size_t i = 0; i < m; ++i) {
            const double raw = p(i, 0);
            const double pc = clamp_prob(raw);
            loss -= std::log(pc);
            const bool clamped = raw < nn::kProbEpsilon || raw > 1.0 - nn::kProbEpsilon;
            upstream(i, 0) = clamped ? 0.0 : -1.0 / (batch * pc);
        }
        loss /= batch;
    }

    const nn::Gradients disc_grads = nn::backward(model.discriminator, disc_cache, upstream);
    const nn::Gradients gen_grads = nn::backward(model.generator, gen_cache, disc_grads.input);
    nn::adam_step(model.generator, gen_grads, opt);
    return loss;
}

TrainResult train(const GanConfig& raw, const Matrix& data, const TrainHooks& hooks) {
    const GanConfig config = resolve(raw);
    if (data.cols() != config.feature_dim) {
        throw DimensionError("train: data " + data.shape_str() + " vs feature_dim " +
                             std::to_string(config.feature_dim));
    }
    for (double v : data.values()) {
        if (!(std::fabs(v) <= 1.0 + kScaledDataTolerance)) {
            throw DomainError("train: data must be scaled to [-1, 1]; found " +
                              std::to_string(v));
        }
    }
    if (data.rows() < config.batch_size) {
        throw ArgumentError("train: " + std::to_string(data.rows()) +
                            " rows is fewer than one batch of " +
                            std::to_string(config.batch_size));
    }

    Rng rng(config.seed);
    TrainResult result{build(config, rng), {}};
    GanModel& model = result.model;

    const nn::SgdState d_opt{config.sgd_learning_rate};
    nn::NetworkAdam g_opt = nn::make_network_adam(model.generator, config.adam);

    for (std::size_t it = 0; it < config.iterations; ++it) {
        double d_loss_sum = 0.0;
        for (std::size_t j = 0; j < config.discriminator_steps; ++j) {
            const Matrix real = sample_rows(data, config.batch_size, rng);
            d_loss_sum += discriminator_step(model, real, d_opt, rng);
            if (hooks.on_discriminator_update) hooks.on_discriminator_update();
        }
        const double g_loss = generator_step(model, g_opt, rng);
        if (hooks.on_generator_update) hooks.on_generator_update();

        // End-of-iteration snapshot on fresh batches, dropout off.
        const Matrix eval_real = sample_rows(data, config.batch_size, rng);
        const Matrix eval_noise = sample_latent(config.batch_size, config.latent_dim, rng);
        const Matrix eval_fakes = nn::forward(model.generator, eval_noise, false, nullptr);
        const Matrix p_real = nn::forward(model.discriminator, eval_real, false, nullptr);
        const Matrix p_fake = nn::forward(model.discriminator, eval_fakes, false, nullptr);

        double v = 0.0;
        for (double p : p_real.values()) v += std::log(clamp_prob(p));
        v /= static_cast<double>(p_real.rows());
        double w = 0.0;
        for (double p : p_fake.values()) w += std::log(1.0 - clamp_prob(p));
        v += w / static_cast<double>(p_fake.rows());

        TraceRow row;
        row.iteration = it;
        row.discriminator_loss = d_loss_sum / static_cast<double>(config.discriminator_steps);
        row.generator_loss = g_loss;
        row.value = v;
        row.mean_d_real = mean(p_real.values());
        row.mean_d_fake = mean(p_fake.values());
        if (!std::isfinite(row.discriminator_loss) || !std::isfinite(row.generator_loss) ||
            !std::isfinite(row.value)) {
            throw StateError("train: non-finite loss at iteration " + std::to_string(it));
        }
        result.trace.rows.push_back(row);
    }
    return result;
}

std::vector<AnomalyScore> score(const GanModel& model, const Matrix& rows, double threshold) {
    if (rows.cols() != model.config.feature_dim) {
        throw DimensionError("score: rows " + rows.shape_str() + " vs feature_dim " +
                             std::to_string(model.config.feature_dim));
    }
    const Matrix p = nn::forward(model.discriminator, rows, false, nullptr);
    std::vector<AnomalyScore> scores(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        AnomalyScore& s = scores[i];
        s.probability_real = p(i, 0);
        s.anomaly_score = 1.0 - s.probability_real;
        s.threshold = threshold;
        s.predicted_label = s.anomaly_score > threshold ? 1 : 0;
    }
    return scores;
}

} // namespace fuelgan::gan
