#include "lpflow/chemin_lerner.hpp"

#include <cmath>

namespace lpflow {

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw ShapeError("trapezoid: mismatched series lengths");
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

double time_lr_norm(const std::vector<double>& t, const std::vector<double>& y, double rho) {
    if (t.size() != y.size()) throw ShapeError("time_lr_norm: mismatched series lengths");
    if (y.empty()) throw StateError("time_lr_norm: empty series");
    if (std::isinf(rho)) {
        double best = 0.0;
        for (double v : y) best = std::max(best, std::abs(v));
        return best;
    }
    if (!(rho >= 1.0)) throw ParameterError("time_lr_norm: rho must be >= 1");
    std::vector<double> powed(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) powed[i] = std::pow(std::abs(y[i]), rho);
    return std::pow(trapezoid(t, powed), 1.0 / rho);
}

CheminLernerAccumulator::CheminLernerAccumulator(const DyadicDecomposition& dec, double p)
    : dec_(&dec), p_(p) {
    if (!(p >= 1.0)) throw ParameterError("CheminLernerAccumulator: p must be >= 1");
}

void CheminLernerAccumulator::record(double t, const SpectralField& u) {
    if (!times_.empty() && t < times_.back())
        throw StateError("CheminLernerAccumulator: record times must be nondecreasing");
    times_.push_back(t);
    blocks_.push_back(dec_->block_norms(u, p_));
    sups_.push_back(lp_norm(inverse_transform(u), infinity));
}

void CheminLernerAccumulator::require_samples() const {
    if (times_.empty()) throw StateError("CheminLernerAccumulator: no samples recorded");
}

double CheminLernerAccumulator::first_time() const {
    require_samples();
    return times_.front();
}

double CheminLernerAccumulator::last_time() const {
    require_samples();
    return times_.back();
}

double CheminLernerAccumulator::besov_at(int i, double s, double r) const {
    require_samples();
    return DyadicDecomposition::weighted_lr(blocks_.at(static_cast<std::size_t>(i)), s, r);
}

double CheminLernerAccumulator::besov_tail_at(int i, double s, double r, int m) const {
    require_samples();
    const Eigen::ArrayXd& blocks = blocks_.at(static_cast<std::size_t>(i));
    const int first = std::max(m, -1);
    const int count = dec_->lmax() - first + 1;
    if (count <= 0) return 0.0;
    return DyadicDecomposition::weighted_lr(blocks.segment(first + 1, count), s, r, first);
}

double CheminLernerAccumulator::sup_at(int i) const {
    require_samples();
    return sups_.at(static_cast<std::size_t>(i));
}

double CheminLernerAccumulator::chemin_lerner(double rho, double s, double r) const {
    return chemin_lerner_tail(rho, s, r, -1);
}

double CheminLernerAccumulator::chemin_lerner_tail(double rho, double s, double r, int m) const {
    require_samples();
    const int first = std::max(m, -1);
    const int count = dec_->lmax() - first + 1;
    if (count <= 0) return 0.0;
    Eigen::ArrayXd per_block(count);
    std::vector<double> series(times_.size());
    for (int l = first; l <= dec_->lmax(); ++l) {
        for (std::size_t i = 0; i < times_.size(); ++i) series[i] = blocks_[i][l + 1];
        per_block[l - first] = time_lr_norm(times_, series, rho);
    }
    return DyadicDecomposition::weighted_lr(per_block, s, r, first);
}

double CheminLernerAccumulator::lebesgue_besov(double rho, double s, double r) const {
    require_samples();
    std::vector<double> series(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i)
        series[i] = DyadicDecomposition::weighted_lr(blocks_[i], s, r);
    return time_lr_norm(times_, series, rho);
}

double CheminLernerAccumulator::sup_linf() const {
    require_samples();
    double best = 0.0;
    for (double v : sups_) best = std::max(best, v);
    return best;
}

double CheminLernerAccumulator::linf_time_norm(double rho) const {
    require_samples();
    return time_lr_norm(times_, sups_, rho);
}

LogInterpolationCheck log_interpolation_check(const CheminLernerAccumulator& acc, double rho,
                                              double s, double eps) {
    if (!(eps > 0.0)) throw ParameterError("log_interpolation_check: eps must be positive");
    LogInterpolationCheck out;
    out.lhs = acc.chemin_lerner(rho, s, 1.0);
    out.x = acc.chemin_lerner(rho, s, infinity);
    out.y = acc.chemin_lerner(rho, s + eps, infinity);
    if (out.x <= 0.0) {
        out.degenerate = true;
        return out;
    }
    out.rhs = (1.0 + eps) / eps * out.x * (1.0 + std::log(out.y / out.x));
    return out;
}

}  // namespace lpflow
