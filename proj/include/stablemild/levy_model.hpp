#pragma once

#include <functional>

namespace stablemild {

/// Characteristics (alpha, b, c+, c-) of a one-dimensional alpha-stable
/// Levy process without Gaussian part. The Levy measure has density
/// c+ / x^{alpha+1} on x > 0 and c- / |x|^{alpha+1} on x < 0; b is the drift
/// in the Levy-Khintchine triplet with truncation function 1{|y| <= 1}.
class StableCharacteristics {
  public:
    // Throws std::invalid_argument on any violated invariant.
    StableCharacteristics(double alpha, double c_plus, double c_minus, double b);

    // b = -(c+ - c-)/(alpha - 1) for alpha != 1, which makes Z strictly stable.
    static StableCharacteristics strict(double alpha, double c_plus, double c_minus);

    // Symmetric with b = 0.
    static StableCharacteristics symmetric(double alpha, double c);

    double alpha() const { return alpha_; }
    double c_plus() const { return c_plus_; }
    double c_minus() const { return c_minus_; }
    double b() const { return b_; }
    double total_weight() const { return c_plus_ + c_minus_; }
    bool is_symmetric() const { return c_plus_ == c_minus_; }

    bool operator==(StableCharacteristics const&) const = default;

    //! Bounds kept away from 0 and 2 where C1 or C2 blow up.
    static constexpr double min_alpha = 1e-3;
    static constexpr double max_alpha = 2.0 - 1e-3;

  private:
    double alpha_;
    double c_plus_;
    double c_minus_;
    double b_;
};

struct LevyTailBounds {
    double beta;
    double C1;  // nu(|y| > R) <= C1 R^{-beta}
    double C2;  // int_{|y| <= R} y^2 nu(dy) <= C2 R^{2-beta}
};

double levy_density(StableCharacteristics const& chars, double x);

/// nu({|y| > R}).
double tail_mass(StableCharacteristics const& chars, double R);

/// Integral of y^2 over {|y| <= R} against nu.
double small_second_moment(StableCharacteristics const& chars, double R);

/// b_R = b + integral of y over {1 < |y| <= R} against nu. Requires R >= 1.
double truncated_drift(StableCharacteristics const& chars, double R);

/// Mass of nu on the annulus {lo < |y| <= hi}.
double annulus_mass(StableCharacteristics const& chars, double lo, double hi);

/// Integral of y over the annulus {lo < |y| <= hi} against nu.
double annulus_first_moment(StableCharacteristics const& chars, double lo, double hi);

/// True iff int_{|x|>=1} |x|^p nu(dx) is finite while the second moment on
/// the same region diverges; for stable measures this reduces to p < alpha.
bool check_h_condition(StableCharacteristics const& chars, double p);

LevyTailBounds compute_tail_bounds(StableCharacteristics const& chars);

/// Numerical integral of f against nu over {lo <= |y| <= hi} (hi may be
/// +infinity). Independent of the closed forms above; the region is split at
/// |y| = 1 and the unbounded piece is mapped by u = 1/y.
double integrate_against_measure(StableCharacteristics const& chars,
                                 std::function<double(double)> const& f,
                                 double lo,
                                 double hi);

/// Parameters of the law of Z(1) in the (scale, skewness, location)
/// parametrisation with characteristic function
/// exp(-sigma^alpha |u|^alpha (1 - i skew sgn(u) tan(pi alpha / 2)) + i mu u)
/// (for alpha = 1 only the symmetric Cauchy case exists: exp(-sigma |u|)).
struct StableLaw {
    double alpha;
    double scale;
    double skew;
    double location;
};

StableLaw stable_law(StableCharacteristics const& chars);

}  // namespace stablemild
