#pragma once

#include <functional>
#include <span>

#include "stablemild/convolution.hpp"

namespace stablemild {

/// How the conjugate exponent q of p is read when p <= 1, where the
/// classical conjugate p/(p-1) is negative or infinite.
enum class ConjugateConvention {
    unit_below_one,  // q = 1 for p <= 1, so (1/a)^{p/q} = (1/a)^p
    literal,         // q = p/(p-1) for every p
};

/// Every scalar entering the closed-form bounds.
struct BoundInputs {
    double a = 1.0;        // semigroup decay
    double b = 0.0;        // Levy drift
    double phi_inf = 0.0;  // sup |phi|
    double T = 1.0;
    double h = 0.0;        // continuity window
    double beta = 1.0;     // tail exponent
    double p = 0.5;        // moment order
    double C1 = 0.0;
    double C2 = 0.0;
    double L_F = 0.0;
    double C = 0.0;
    double eta = 0.0;         // eta(a, T, g)
    double eta_window = 0.0;  // eta(a, T, g, h)
    double gamma = 0.0;       // weight of the equivalent norm (p >= 1)
    double x0_moment = 0.0;   // E|x0|^p
    ConjugateConvention convention = ConjugateConvention::unit_below_one;
};

/// q under the selected convention; +infinity for p = 1 read literally.
double conjugate_exponent(double p, ConjugateConvention convention);

/// p / q under the selected convention.
double conjugate_ratio(double p, ConjugateConvention convention);

/// phi_inf^2 (8 b^2/a + 8 C1 C2 / a + 4 C2) + horizon * C1.
double k_nu(BoundInputs const& in, double horizon);

/// min(1, (eta/x)^beta K_nu(T)) for x >= eta; 1 below the threshold.
double tail_bound(BoundInputs const& in, double x);

/// Uniform-in-time bound on E|X(t)|^p. Throws for p >= beta.
double moment_bound(BoundInputs const& in);

/// Tail-integrated moment bound of the stochastic convolution alone:
/// eta^p (1 + K_nu(horizon) p / (beta - p)).
double convolution_moment_bound(BoundInputs const& in, double eta_value, double horizon);

/// K1 exp((rate + K2) t).
double gronwall_bound(double K1, double rate, double K2, double t);

/// Contraction factor of the fixed-point map in the gamma-weighted norm
/// (p >= 1). The kernel decay a + gamma enters through eta of g.
double contraction_constant(BoundInputs const& in, std::function<double(double)> const& g);

/// Smallest gamma found by doubling from 1 then bisecting with
/// contraction_constant(gamma) <= target.
double choose_gamma(BoundInputs in, std::function<double(double)> const& g, double target = 0.99);

struct StrongCondition {
    bool holds;
    double lhs;
};

/// The extra condition required for p in (0, 1].
StrongCondition check_strong_condition(BoundInputs const& in);

/// Amplitude c* with lhs(c*) = 1 for an increasing lhs with lhs(0) < 1.
double strong_condition_threshold(std::function<double(double)> const& lhs_of_amplitude,
                                  double initial_guess = 1.0);

/// Trapezoidal int_0^T |X - Y|^p dt on the shared grid.
double metric_dp(SolutionPath const& x, SolutionPath const& y, double p);

/// Ensemble version: the integrand is the empirical mean over paired paths.
double metric_dp(std::span<SolutionPath const> xs, std::span<SolutionPath const> ys, double p);

/// sup_k e^{-gamma t_k} (mean_i |X_i(t_k)|^p)^{1/p}.
double norm_gamma(std::span<SolutionPath const> ensemble, double p, double gamma);

}  // namespace stablemild
