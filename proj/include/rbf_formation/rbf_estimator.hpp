#pragma once

/**
 * @file rbf_estimator.hpp
 * @brief Online Gaussian RBF network estimating the per-unit-mass disturbance.
 *
 * Inputs are the UAV position and velocity; the hidden layer holds m Gaussian
 * units and the output layer is a linear map W^T H. Output weights adapt
 * online from the position-loop sliding variable with a leakage term and a
 * heavy-ball momentum step:
 *
 *   dW    = a (H s^T - eta |s| W)
 *   W_new = W_1 + dW + beta (W_1 - W_2)
 *   W_2   = W_1,  W_1 = W_new
 *
 * W_1 and W_2 are the two most recent iterates. By default dW is applied as a
 * per-iteration increment; `scale_by_dt` multiplies it by the control period.
 */

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"

namespace rbf_formation {

struct RbfConfig {
    int neurons = 50;
    double learning_gain = 0.1;  // a
    double width = 10.0;         // b
    double leakage = 0.2;        // eta
    double momentum = 0.5;       // beta
    Vec3 center_range = Vec3::Constant(15.0);
    double init_weight_range = 0.1;
    std::uint64_t seed = 1;
    bool scale_by_dt = false;

    void validate() const {
        if (neurons < 1) throw ConfigError("rbf: neuron count must be >= 1");
        if (!(learning_gain > 0.0) || !(width > 0.0) || !(leakage > 0.0)) {
            throw ConfigError("rbf: learning gain, width and leakage must be positive");
        }
        if (!(momentum > 0.0 && momentum < 1.0)) throw ConfigError("rbf: momentum must lie in (0, 1)");
        if (!center_range.allFinite() || (center_range.array() < 0.0).any()) {
            throw ConfigError("rbf: center range must be finite and non-negative");
        }
        if (!(init_weight_range >= 0.0)) throw ConfigError("rbf: init_weight_range must be non-negative");
    }
};

class RbfEstimator {
public:
    using Weights = Eigen::Matrix<double, Eigen::Dynamic, 3>;
    using Centers = Eigen::Matrix<double, 3, Eigen::Dynamic>;
    using Hidden = Eigen::VectorXd;

    /// Centers are placed on the diagonal: neuron j sits at
    /// (lin_x[j], lin_y[j], lin_z[j]) with lin_* = linspace(-r, r, m).
    explicit RbfEstimator(const RbfConfig& config) : config_(config) {
        config_.validate();
        const int m = config_.neurons;
        position_centers_.resize(3, m);
        for (int axis = 0; axis < 3; ++axis) {
            const double r = config_.center_range[axis];
            for (int j = 0; j < m; ++j) {
                position_centers_(axis, j) = m == 1 ? 0.0 : -r + 2.0 * r * j / (m - 1);
            }
        }
        velocity_centers_ = position_centers_;

        std::mt19937_64 rng(config_.seed);
        weights_.resize(m, 3);
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < 3; ++k) {
                // 53-bit uniform in [0, 1), mapped to [-range, range].
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                weights_(j, k) = config_.init_weight_range * (2.0 * u - 1.0);
            }
        }
        previous_ = weights_;
        before_previous_ = weights_;
    }

    const RbfConfig& config() const { return config_; }
    int neurons() const { return config_.neurons; }
    const Centers& position_centers() const { return position_centers_; }
    const Centers& velocity_centers() const { return velocity_centers_; }
    const Weights& weights() const { return weights_; }
    const Weights& previous_weights() const { return previous_; }
    const Weights& before_previous_weights() const { return before_previous_; }

    /// Overwrites all three weight iterates. Used for ablations and tests.
    void set_weights(const Weights& w) {
        if (w.rows() != config_.neurons) throw InvalidInputError("rbf: weight matrix has wrong row count");
        weights_ = w;
        previous_ = w;
        before_previous_ = w;
    }

    Hidden hidden(const Vec3& position, const Vec3& velocity) const {
        if (!position.allFinite() || !velocity.allFinite()) throw InvalidInputError("rbf: non-finite input");
        const double inv_b2 = 1.0 / (config_.width * config_.width);
        Hidden h(config_.neurons);
        for (int j = 0; j < config_.neurons; ++j) {
            const double d2 =
                (position - position_centers_.col(j)).squaredNorm() + (velocity - velocity_centers_.col(j)).squaredNorm();
            h[j] = std::exp(-d2 * inv_b2);
        }
        return h;
    }

    Vec3 estimate(const Hidden& h) const { return weights_.transpose() * h; }

    /// Leaky update with momentum. `dt` is only used when scale_by_dt is set.
    void update(const Hidden& h, const Vec3& sliding, double dt = 1.0) {
        if (h.size() != config_.neurons) throw InvalidInputError("rbf: hidden vector has wrong size");
        if (!h.allFinite() || !sliding.allFinite()) throw InvalidInputError("rbf: non-finite update input");
        Weights increment =
            config_.learning_gain * (h * sliding.transpose() - config_.leakage * sliding.norm() * weights_);
        if (config_.scale_by_dt) increment *= dt;
        Weights next = previous_ + increment + config_.momentum * (previous_ - before_previous_);
        if (!next.allFinite()) throw EstimatorDivergenceError("rbf: weight update produced non-finite values");
        before_previous_ = previous_;
        previous_ = next;
        weights_ = std::move(next);
    }

private:
    RbfConfig config_;
    Centers position_centers_;
    Centers velocity_centers_;
    Weights weights_;
    Weights previous_;
    Weights before_previous_;
};

}  // namespace rbf_formation
