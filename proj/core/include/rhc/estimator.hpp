#pragma once

#include <deque>

#include "rhc/types.hpp"

namespace rhc {

/// Adaptive update law: d(theta_hat)/dt = -D(y)^T e.
/// Throws std::invalid_argument if e does not have D.rows() entries.
[[nodiscard]] Vector estimator_rhs(const Matrix& D_y, const Vector& e);

struct PeMetric {
    double value = 0.0;
    bool empty = true;  ///< no samples were available
};

/// Trailing window of D(y) D(y)^T samples for the persistent-excitation
/// diagnostic. Samples must be pushed with non-decreasing time.
class PeWindow {
public:
    explicit PeWindow(double span = 5.0);

    void push(double t, const Matrix& D_y);
    void clear() { samples_.clear(); }

    /// Minimum eigenvalue of the trapezoidal integral of D D^T over the window.
    [[nodiscard]] PeMetric metric() const;

    [[nodiscard]] double span() const { return span_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    /// Simulated time covered by the retained samples.
    [[nodiscard]] double covered() const;

private:
    struct Sample {
        double t;
        Matrix gram;
    };
    double span_;
    std::deque<Sample> samples_;
};

struct EstimatorConfig {
    double gain = 1.0;       ///< scalar adaptation gain multiplying the law
    double pe_window = 5.0;  ///< days
};

struct EstimatorState {
    Vector theta_hat;
    PeWindow window;
};

}  // namespace rhc
