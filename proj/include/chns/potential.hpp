#pragma once

// Constitutive laws: double-well potentials split as Psi = Psi0 - (theta0/2) r^2
// with Psi0 convex, the linear-extension regularization of the singular part,
// the viscosity blend and the consumption interpolation.

#include <algorithm>
#include <cmath>
#include <string>

#include "chns/error.hpp"

namespace chns {

enum class PotentialKind { Logarithmic, Quartic, RegularizedLog };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Quartic;
    double theta = 1.0;    // log: temperature-like prefactor, also the convexity bound of Psi0''
    double theta_c = 1.0;  // log: critical value, becomes theta0 of the split
    double eps = 0.0;      // regularized: width of the linear extension
    double eps0 = 0.5;     // regularized: admissible upper bound for eps

    static PotentialSpec logarithmic(double theta, double theta_c) {
        PotentialSpec s{PotentialKind::Logarithmic, theta, theta_c, 0.0, 0.5};
        s.validate();
        return s;
    }
    static PotentialSpec quartic() { return PotentialSpec{PotentialKind::Quartic, 0.0, 0.0, 0.0, 0.5}; }
    static PotentialSpec regularized_log(double theta, double theta_c, double eps, double eps0 = 0.5) {
        PotentialSpec s{PotentialKind::RegularizedLog, theta, theta_c, eps, eps0};
        s.validate();
        return s;
    }

    /// Coefficient of the concave part.
    double theta0() const { return kind == PotentialKind::Quartic ? 1.0 : theta_c; }

    bool singular() const { return kind == PotentialKind::Logarithmic; }

    void validate() const {
        if (kind == PotentialKind::Quartic) return;
        if (!(theta > 0.0 && theta < theta_c))
            throw InvalidArgument("logarithmic potential requires 0 < theta < theta_c");
        if (kind == PotentialKind::RegularizedLog) {
            if (!(eps0 > 0.0 && eps0 <= 1.0)) throw InvalidArgument("regularization requires 0 < eps0 <= 1");
            if (!(eps > 0.0 && eps < eps0))
                throw InvalidArgument("regularization requires 0 < eps < eps0 (eps=" + std::to_string(eps) + ")");
        }
    }
};

/// Regularized counterpart of a logarithmic spec; other kinds pass through.
inline PotentialSpec regularized(const PotentialSpec& s, double eps) {
    if (s.kind == PotentialKind::Logarithmic) return PotentialSpec::regularized_log(s.theta, s.theta_c, eps, s.eps0);
    return s;
}

namespace detail {

template <typename Scalar>
Scalar log_psi0_prime(Scalar r, double theta) {
    using std::log;
    return Scalar(0.5 * theta) * log((Scalar(1) + r) / (Scalar(1) - r));
}

template <typename Scalar>
Scalar log_psi0_second(Scalar r, double theta) {
    return Scalar(theta) / (Scalar(1) - r * r);
}

template <typename Scalar>
Scalar log_psi0_value(Scalar r, double theta) {
    using std::log;
    auto xlogx = [](Scalar x) { return x > Scalar(0) ? x * log(x) : Scalar(0); };
    return Scalar(0.5 * theta) * (xlogx(Scalar(1) - r) + xlogx(Scalar(1) + r));
}

inline void require_open_interval(double r, const char* where) {
    if (!(std::abs(r) < 1.0))
        throw DomainError(std::string(where) + ": logarithmic potential is singular at |r| >= 1 (r=" +
                          std::to_string(r) + ")");
}

}  // namespace detail

/// Linear extension of the singular derivative outside [-1+eps, 1-eps].
template <typename Scalar>
Scalar psi0_prime_eps(Scalar r, double eps, const PotentialSpec& spec) {
    if (!(eps > 0.0 && eps < spec.eps0)) throw InvalidArgument("psi0_prime_eps: eps out of range");
    const double a = 1.0 - eps;
    if (r > Scalar(a))
        return detail::log_psi0_prime(Scalar(a), spec.theta) + detail::log_psi0_second(Scalar(a), spec.theta) * (r - Scalar(a));
    if (r < Scalar(-a))
        return detail::log_psi0_prime(Scalar(-a), spec.theta) + detail::log_psi0_second(Scalar(-a), spec.theta) * (r + Scalar(a));
    return detail::log_psi0_prime(r, spec.theta);
}

template <typename Scalar>
Scalar psi0_second_eps(Scalar r, double eps, const PotentialSpec& spec) {
    using std::abs;
    const double a = 1.0 - eps;
    if (abs(r) > Scalar(a)) return detail::log_psi0_second(Scalar(a), spec.theta);
    return detail::log_psi0_second(r, spec.theta);
}

template <typename Scalar>
Scalar psi0_value_eps(Scalar r, double eps, const PotentialSpec& spec) {
    using std::abs;
    const double a = 1.0 - eps;
    const Scalar ar = abs(r);
    if (ar <= Scalar(a)) return detail::log_psi0_value(r, spec.theta);
    const Scalar d = ar - Scalar(a);
    return detail::log_psi0_value(Scalar(a), spec.theta) + detail::log_psi0_prime(Scalar(a), spec.theta) * d +
           Scalar(0.5) * detail::log_psi0_second(Scalar(a), spec.theta) * d * d;
}

/// Derivative of the convex part Psi0.
template <typename Scalar>
Scalar psi0_prime(Scalar r, const PotentialSpec& spec) {
    switch (spec.kind) {
        case PotentialKind::Logarithmic:
            detail::require_open_interval(double(r), "psi0_prime");
            return detail::log_psi0_prime(r, spec.theta);
        case PotentialKind::Quartic: return r * r * r;
        case PotentialKind::RegularizedLog: return psi0_prime_eps(r, spec.eps, spec);
    }
    return Scalar(0);
}

template <typename Scalar>
Scalar psi0_second(Scalar r, const PotentialSpec& spec) {
    switch (spec.kind) {
        case PotentialKind::Logarithmic:
            detail::require_open_interval(double(r), "psi0_second");
            return detail::log_psi0_second(r, spec.theta);
        case PotentialKind::Quartic: return Scalar(3) * r * r;
        case PotentialKind::RegularizedLog: return psi0_second_eps(r, spec.eps, spec);
    }
    return Scalar(0);
}

/// Convex part, normalized so Psi0(0) = 0 for the logarithmic family.  The
/// logarithmic form is finite on the closed interval [-1, 1].
template <typename Scalar>
Scalar psi0_value(Scalar r, const PotentialSpec& spec) {
    using std::abs;
    switch (spec.kind) {
        case PotentialKind::Logarithmic:
            if (!(abs(double(r)) <= 1.0))
                throw DomainError("psi0_value: logarithmic potential is +inf outside [-1, 1]");
            return detail::log_psi0_value(r, spec.theta);
        case PotentialKind::Quartic: return Scalar(0.25) * r * r * r * r + Scalar(0.25);
        case PotentialKind::RegularizedLog: return psi0_value_eps(r, spec.eps, spec);
    }
    return Scalar(0);
}

template <typename Scalar>
Scalar psi_value(Scalar r, const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::Quartic) {
        const Scalar s = Scalar(1) - r * r;
        return Scalar(0.25) * s * s;
    }
    return psi0_value(r, spec) - Scalar(0.5 * spec.theta0()) * r * r;
}

template <typename Scalar>
Scalar psi_prime(Scalar r, const PotentialSpec& spec) {
    return psi0_prime(r, spec) - Scalar(spec.theta0()) * r;
}

struct MaterialLaws {
    double eta1 = 1.0;  // viscosity of the phase phi = +1
    double eta2 = 1.0;  // viscosity of the phase phi = -1
    bool h_clamp = true;

    void validate() const {
        if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw InvalidArgument("viscosities must be positive");
    }
};

/// Linear blend, extended constantly outside [-1, 1].
template <typename Scalar>
Scalar viscosity_eta(Scalar r, const MaterialLaws& laws) {
    const Scalar c = std::clamp(r, Scalar(-1), Scalar(1));
    return Scalar(laws.eta1) * (Scalar(1) + c) / Scalar(2) + Scalar(laws.eta2) * (Scalar(1) - c) / Scalar(2);
}

template <typename Scalar>
Scalar viscosity_eta_prime(Scalar r, const MaterialLaws& laws) {
    if (r < Scalar(-1) || r > Scalar(1)) return Scalar(0);
    return Scalar(0.5 * (laws.eta1 - laws.eta2));
}

template <typename Scalar>
Scalar interp_h(Scalar r, const MaterialLaws& laws) {
    const Scalar h = Scalar(0.5) * (Scalar(1) + r);
    return laws.h_clamp ? std::clamp(h, Scalar(0), Scalar(1)) : h;
}

}  // namespace chns
