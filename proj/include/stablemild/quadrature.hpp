#pragma once

#include <functional>

namespace stablemild::quadrature {

//! Absolute tolerance used throughout the library.
inline constexpr double default_tolerance = 1e-12;

/// Adaptive Gauss-Kronrod (7/15) integral of f over the finite interval
/// [a, b].
double integrate(std::function<double(double)> const& f,
                 double a,
                 double b,
                 double tolerance = default_tolerance);

/// Double-exponential (tanh-sinh) integral over [a, b] for integrands with
/// integrable power singularities at an endpoint.
double integrate_endpoint_singular(std::function<double(double)> const& f,
                                   double a,
                                   double b,
                                   double tolerance = default_tolerance);

/// Integral of f over [a, +infinity) with a > 0, computed on u = 1/x.
double integrate_to_infinity(std::function<double(double)> const& f,
                             double a,
                             double tolerance = default_tolerance);

}  // namespace stablemild::quadrature
