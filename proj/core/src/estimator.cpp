#include "rhc/estimator.hpp"

#include <stdexcept>

namespace rhc {

Vector estimator_rhs(const Matrix& D_y, const Vector& e) {
    if (D_y.rows() != e.size()) {
        throw std::invalid_argument("estimator_rhs: D has " + std::to_string(D_y.rows()) +
                                    " rows but e has " + std::to_string(e.size()) + " entries");
    }
    return -D_y.transpose() * e;
}

PeWindow::PeWindow(double span) : span_(span) {
    if (!(span > 0.0)) throw std::invalid_argument("PE window span must be positive");
}

void PeWindow::push(double t, const Matrix& D_y) {
    samples_.push_back({t, D_y * D_y.transpose()});
    // Keep the oldest sample that still lies inside the window boundary.
    const double start = t - span_ - 1e-9 * (1.0 + std::abs(t));
    while (samples_.size() > 1 && samples_.front().t < start) samples_.pop_front();
}

double PeWindow::covered() const {
    if (samples_.empty()) return 0.0;
    return samples_.back().t - samples_.front().t;
}

PeMetric PeWindow::metric() const {
    if (samples_.empty()) return {0.0, true};

    const auto& first = samples_.front().gram;
    Matrix integral = Matrix::Zero(first.rows(), first.cols());
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        const double dt = samples_[i].t - samples_[i - 1].t;
        integral += 0.5 * dt * (samples_[i].gram + samples_[i - 1].gram);
    }
    if (samples_.size() == 1) return {0.0, false};

    Eigen::SelfAdjointEigenSolver<Matrix> eig(integral, Eigen::EigenvaluesOnly);
    // Round-off can push a PSD integral a hair below zero.
    const double lowest = eig.eigenvalues().minCoeff();
    return {lowest < 0.0 ? 0.0 : lowest, false};
}

}  // namespace rhc
