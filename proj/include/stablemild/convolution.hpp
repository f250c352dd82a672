#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stablemild/coefficients.hpp"
#include "stablemild/noise_sim.hpp"

namespace stablemild {

/// Exponentially stable scalar semigroup S(t) = exp(-a t), generated by
/// A = -a I. The growth constant M is 1.
class SemigroupParams {
  public:
    explicit SemigroupParams(double decay);

    double decay() const { return decay_; }
    static constexpr double growth() { return 1.0; }
    double operator()(double t) const;

    bool operator==(SemigroupParams const&) const = default;

  private:
    double decay_;
};

struct SolutionPath {
    PathGrid grid;
    std::vector<double> values;
    double x0 = 0.0;
    //! Stochastic-convolution component int_0^t S(t-s) g(s) phi(X(s)) dZ(s)
    //! at every node; empty unless requested.
    std::vector<double> convolution;
};

enum class JumpPlacement {
    end_of_step,  // a big jump contributes to the increment of its step
    split,        // the step is split at each recorded big jump
};

struct SolveOptions {
    JumpPlacement placement = JumpPlacement::end_of_step;
    bool track_convolution = false;
    double overflow_limit = 1e300;
};

class StateOverflow : public std::runtime_error {
  public:
    explicit StateOverflow(std::size_t step);
    std::size_t step() const { return step_; }

  private:
    std::size_t step_;
};

/// Exponential-Euler scheme with left-endpoint coefficients:
///   X_{k+1} = e^{-a dt} X_k + (1 - e^{-a dt})/a F(t_k, X_k)
///             + e^{-a dt} g(t_k) phi(X_k) dZ_k.
/// Throws StateOverflow with the offending step index.
SolutionPath euler_solve(double x0,
                         CoefficientSpec const& coeffs,
                         SemigroupParams const& sg,
                         NoisePath const& noise,
                         SolveOptions const& options = {});

/// Discrete fixed-point operator: the euler_solve recursion with the
/// coefficients evaluated along the frozen input path. The euler_solve output
/// is a fixed point bit for bit.
SolutionPath gamma_apply(SolutionPath const& input,
                         double x0,
                         CoefficientSpec const& coeffs,
                         SemigroupParams const& sg,
                         NoisePath const& noise,
                         SolveOptions const& options = {});

enum class PicardMetric {
    dp,            // int_0^T |X - Y|^p dt
    weighted_sup,  // sup_t e^{-gamma t} |X - Y|
};

struct PicardOptions {
    double p = 1.0;
    PicardMetric metric = PicardMetric::dp;
    double gamma = 0.0;
    SolveOptions solve;
};

struct PicardResult {
    SolutionPath path;
    //! Distance between successive iterates, one entry per application.
    std::vector<double> history;
};

class PicardNotConverged : public std::runtime_error {
  public:
    explicit PicardNotConverged(std::vector<double> history);
    std::vector<double> const& history() const { return history_; }

  private:
    std::vector<double> history_;
};

/// Iterates gamma_apply from the constant path x0 until successive iterates
/// are closer than tol.
PicardResult picard_solve(double x0,
                          CoefficientSpec const& coeffs,
                          SemigroupParams const& sg,
                          NoisePath const& noise,
                          double tol,
                          std::size_t max_iter,
                          PicardOptions const& options);

/// (sup_{0<=t<=T} int_0^t e^{-a(t-s)} g(s)^2 ds)^{1/2}
double eta(double a, double T, std::function<double(double)> const& g);

/// (sup_{0<=t<=T} int_t^{t+h} e^{-a(t+h-s)} g(s)^2 ds)^{1/2}
double eta_window(double a, double T, std::function<double(double)> const& g, double h);

}  // namespace stablemild
