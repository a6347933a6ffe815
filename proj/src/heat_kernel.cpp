#include "critheat/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critheat {

namespace {

struct SeriesCoeffs {
    double constant;
    double cosine;
};

SeriesCoeffs coeffs_for(KernelNorm norm) {
    if (norm == KernelNorm::Sqrt2PiMass) {
        return {1.0 / std::sqrt(kTwoPi), std::sqrt(2.0 / kPi)};
    }
    return {1.0 / kTwoPi, 1.0 / kPi};
}

double effective_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("heat kernel: t must be > 0");
    return std::max(t, kMinSeriesTime);
}

} // namespace

int truncation_order(double t, double tol) {
    if (!(t > 0.0)) throw std::domain_error("truncation_order: t must be > 0");
    if (!(tol > 0.0)) throw std::domain_error("truncation_order: tol must be > 0");
    const auto tail_ok = [&](int k) {
        // log of exp(-k^2 t) / (2 k t) <= log tol
        const double kk = static_cast<double>(k);
        return -kk * kk * t <= std::log(tol) + std::log(2.0 * kk * t);
    };
    int hi = 1;
    constexpr int kMaxOrder = 1 << 22;
    while (!tail_ok(hi)) {
        hi *= 2;
        if (hi >= kMaxOrder) return kMaxOrder;
    }
    int lo = hi / 2; // tail_ok(lo) is false (or lo == 0)
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (tail_ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

double eval_kernel(const KernelSpec& spec, double t, double x) {
    if (!(spec.truncation_tol > 0.0)) {
        throw std::domain_error("eval_kernel: truncation_tol must be > 0");
    }
    const double te = effective_time(t);
    const auto [constant, cosine] = coeffs_for(spec.norm);
    const int order = truncation_order(te, spec.truncation_tol);
    double acc = constant;
    for (int k = 1; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        acc += cosine * std::exp(-kk * kk * te) * std::cos(kk * x);
    }
    return acc;
}

double kernel_l1_norm(const KernelSpec& spec, double t, std::size_t quadrature_n) {
    if (quadrature_n < 64) {
        throw std::invalid_argument("kernel_l1_norm: quadrature_n must be >= 64");
    }
    const double dx = kTwoPi / static_cast<double>(quadrature_n);
    double acc = 0.0;
    for (std::size_t j = 0; j < quadrature_n; ++j) {
        const double x = -kPi + static_cast<double>(j) * dx;
        acc += std::abs(eval_kernel(spec, t, x));
    }
    return acc * dx;
}

double kernel_sup(const KernelSpec& spec, double t) {
    return eval_kernel(spec, t, 0.0);
}

std::vector<double> mode_decay(std::size_t n, double t) {
    std::vector<double> decay(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(std::min(j, n - j));
        decay[j] = std::exp(-k * k * t);
    }
    return decay;
}

SpectralWorkspace::SpectralWorkspace(std::size_t n) : plan_(n), buf_(n) {}

Field SpectralWorkspace::semigroup_apply(double t, const Field& field) {
    if (t < 0.0) throw std::domain_error("semigroup_apply: t must be >= 0");
    Field out = field;
    if (t == 0.0) return out;
    semigroup_apply_inplace(out, mode_decay(plan_.size(), t));
    return out;
}

void SpectralWorkspace::semigroup_apply_inplace(Field& field, const std::vector<double>& decay) {
    const std::size_t n = plan_.size();
    if (field.size() != n || decay.size() != n) {
        throw std::invalid_argument("semigroup_apply_inplace: size mismatch");
    }
    for (std::size_t j = 0; j < n; ++j) buf_[j] = {field[j], 0.0};
    plan_.forward(buf_.data());
    for (std::size_t j = 0; j < n; ++j) buf_[j] *= decay[j];
    plan_.inverse(buf_.data());
    for (std::size_t j = 0; j < n; ++j) field[j] = buf_[j].real();
}

Field semigroup_apply_reference(double t, const Field& field) {
    if (t < 0.0) throw std::domain_error("semigroup_apply_reference: t must be >= 0");
    const std::size_t n = field.size();
    Field out(n, 0.0);
    const double scale = 2.0 / static_cast<double>(n);
    // Mode 0, modes 1..n/2-1 (cos and sin), and the n/2 cosine mode.
    double a0 = 0.0;
    for (double v : field) a0 += v;
    a0 /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double kk = static_cast<double>(k);
        double ak = 0.0;
        double bk = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            ak += field[j] * std::cos(kk * x);
            bk += field[j] * std::sin(kk * x);
        }
        const double weight = (k == n / 2) ? 0.5 * scale : scale;
        ak *= weight;
        bk *= weight;
        const double damp = std::exp(-kk * kk * t);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            out[j] += damp * (ak * std::cos(kk * x) + bk * std::sin(kk * x));
        }
    }
    return out;
}

SmoothingCheck smoothing_bound_check(double t, const Field& field, double dx,
                                     SpectralWorkspace& workspace) {
    if (!(t > 0.0) || t > 1.0) {
        throw std::domain_error("smoothing_bound_check: t must be in (0,1]");
    }
    for (double v : field) {
        if (v < 0.0) throw std::invalid_argument("smoothing_bound_check: field must be nonnegative");
    }
    const double mass = l1_norm(field, dx);
    if (mass == 0.0) return {0.0, 0.0};
    const Field smoothed = workspace.semigroup_apply(t, field);
    SmoothingCheck check;
    check.lhs = sup_norm(smoothed);
    check.ratio = check.lhs * std::sqrt(t) / mass;
    return check;
}

double smoothing_ratio_bound() {
    static const double bound = [] {
        const KernelSpec unit{KernelNorm::UnitMass, 1e-12};
        double peak = 0.0;
        constexpr int kPoints = 50;
        for (int i = 0; i < kPoints; ++i) {
            const double exponent = -4.0 + 4.0 * static_cast<double>(i) / (kPoints - 1);
            const double t = std::pow(10.0, exponent);
            peak = std::max(peak, kernel_sup(unit, t) * std::sqrt(t));
        }
        return 1.1 * peak;
    }();
    return bound;
}

} // namespace critheat
