#pragma once

#include <span>

namespace critheat {

/// Built-in noise-coefficient families.
///   CriticalPower: sigma(u) = c * (1 + |u|^{3/2})
///   Power:         sigma(u) = c * (1 + |u|^gamma)
///   Linear:        sigma(u) = c * u
enum class SigmaKind { CriticalPower, Power, Linear };

struct SigmaFamily {
    SigmaKind kind = SigmaKind::CriticalPower;
    double c = 1.0;       // positive prefactor
    double gamma = 1.5;   // exponent, used by Power
};

/// Singular drift f(u) = u^{-alpha} with flattening level epsilon for the
/// globally Lipschitz surrogate f_eps(u) = (max(eps, u))^{-alpha}.
struct DriftSpec {
    double alpha = 4.0;     // must be > 3
    double epsilon = 0.5;   // must lie in (0,1)
};

void validate_sigma(const SigmaFamily& family);
void validate_drift(const DriftSpec& spec);

double sigma_eval(const SigmaFamily& family, double u);

/// sigma_n: equal to sigma on [-n, n], frozen at sigma(-n) / sigma(n) outside.
double sigma_clamped(const SigmaFamily& family, double n, double u);

/// f_eps(u) = (max(eps, u))^{-alpha}; bounded by eps^{-alpha}.
double drift_clamped(const DriftSpec& spec, double u);

/// True iff |sigma(u)| <= big_c * (1 + |u|^{3/2}) at every grid value. Gates
/// configurations that claim the critical growth family.
bool growth_check(const SigmaFamily& family, double big_c, std::span<const double> grid);

} // namespace critheat
