#include "stablemild/levy_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stablemild/quadrature.hpp"

namespace stablemild {

StableCharacteristics::StableCharacteristics(double alpha, double c_plus, double c_minus, double b)
    : alpha_(alpha), c_plus_(c_plus), c_minus_(c_minus), b_(b)
{
    if (!(alpha > 0.0 && alpha < 2.0))
    {
        throw std::invalid_argument("alpha must lie in (0,2), got " + std::to_string(alpha));
    }
    if (alpha < min_alpha || alpha > max_alpha)
    {
        throw std::invalid_argument("alpha too close to the boundary of (0,2): "
                                    + std::to_string(alpha));
    }
    if (!(c_plus >= 0.0) || !(c_minus >= 0.0) || !std::isfinite(c_plus)
        || !std::isfinite(c_minus))
    {
        throw std::invalid_argument("c_plus and c_minus must be finite and non-negative");
    }
    if (!(c_plus + c_minus > 0.0))
    {
        throw std::invalid_argument("c_plus + c_minus must be positive");
    }
    if (!std::isfinite(b))
    {
        throw std::invalid_argument("drift b must be finite");
    }
    if (alpha == 1.0 && (c_plus != c_minus || b != 0.0))
    {
        throw std::invalid_argument(
            "alpha = 1 is restricted to the symmetric Cauchy case (c_plus = c_minus, b = 0)");
    }
}

StableCharacteristics StableCharacteristics::strict(double alpha, double c_plus, double c_minus)
{
    // The drift that cancels the compensator of the jumps in {|y| <= 1}; the
    // same expression covers both alpha < 1 and alpha > 1.
    double b = alpha == 1.0 ? 0.0 : -(c_plus - c_minus) / (alpha - 1.0);
    return {alpha, c_plus, c_minus, b};
}

StableCharacteristics StableCharacteristics::symmetric(double alpha, double c)
{
    return {alpha, c, c, 0.0};
}

double levy_density(StableCharacteristics const& chars, double x)
{
    if (x == 0.0)
    {
        throw std::invalid_argument("levy_density: the Levy measure has no atom at zero");
    }
    double weight = x > 0.0 ? chars.c_plus() : chars.c_minus();
    return weight / std::pow(std::abs(x), chars.alpha() + 1.0);
}

double tail_mass(StableCharacteristics const& chars, double R)
{
    if (!(R > 0.0))
    {
        throw std::invalid_argument("tail_mass: R must be positive");
    }
    if (std::isinf(R))
    {
        return 0.0;
    }
    return chars.total_weight() / chars.alpha() * std::pow(R, -chars.alpha());
}

double small_second_moment(StableCharacteristics const& chars, double R)
{
    if (!(R > 0.0))
    {
        throw std::invalid_argument("small_second_moment: R must be positive");
    }
    double alpha = chars.alpha();
    return chars.total_weight() * std::pow(R, 2.0 - alpha) / (2.0 - alpha);
}

double annulus_mass(StableCharacteristics const& chars, double lo, double hi)
{
    if (!(lo > 0.0 && lo <= hi))
    {
        throw std::invalid_argument("annulus_mass: need 0 < lo <= hi");
    }
    return tail_mass(chars, lo) - tail_mass(chars, hi);
}

double annulus_first_moment(StableCharacteristics const& chars, double lo, double hi)
{
    if (!(lo > 0.0 && lo <= hi))
    {
        throw std::invalid_argument("annulus_first_moment: need 0 < lo <= hi");
    }
    double skew_weight = chars.c_plus() - chars.c_minus();
    if (skew_weight == 0.0 || lo == hi)
    {
        return 0.0;
    }
    double alpha = chars.alpha();
    if (alpha == 1.0)
    {
        return skew_weight * std::log(hi / lo);
    }
    return skew_weight * (std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha)) / (1.0 - alpha);
}

double truncated_drift(StableCharacteristics const& chars, double R)
{
    if (!(R >= 1.0))
    {
        throw std::invalid_argument("truncated_drift: R must be at least 1");
    }
    return chars.b() + annulus_first_moment(chars, 1.0, R);
}

bool check_h_condition(StableCharacteristics const& chars, double p)
{
    if (!(p > 0.0))
    {
        throw std::invalid_argument("check_h_condition: p must be positive");
    }
    // int_{|x|>=1} |x|^{p-alpha-1} dx converges iff p < alpha; the second
    // moment diverges for every alpha < 2.
    return p < chars.alpha();
}

LevyTailBounds compute_tail_bounds(StableCharacteristics const& chars)
{
    double total = chars.total_weight();
    double alpha = chars.alpha();
    return {alpha, total / alpha, total / (2.0 - alpha)};
}

double integrate_against_measure(StableCharacteristics const& chars,
                                 std::function<double(double)> const& f,
                                 double lo,
                                 double hi)
{
    if (!(lo >= 0.0 && lo <= hi))
    {
        throw std::invalid_argument("integrate_against_measure: need 0 <= lo <= hi");
    }
    double alpha = chars.alpha();
    auto one_side = [&](double weight, double sign) {
        if (weight == 0.0)
        {
            return 0.0;
        }
        auto integrand = [&](double y) {
            if (y == 0.0)
            {
                return 0.0;
            }
            double fy = f(sign * y);
            if (fy == 0.0)
            {
                return 0.0;
            }
            double value = fy * weight / std::pow(y, alpha + 1.0);
            // The density overflows within a few ulps of the origin; for an
            // integrable f that sliver contributes nothing.
            return !std::isfinite(value) && y < 1e-100 ? 0.0 : value;
        };
        double total = 0.0;
        double inner_hi = std::min(hi, 1.0);
        if (lo < inner_hi)
        {
            total += quadrature::integrate_endpoint_singular(integrand, lo, inner_hi);
        }
        double outer_lo = std::max(lo, 1.0);
        if (std::isinf(hi))
        {
            total += quadrature::integrate_to_infinity(integrand, outer_lo);
        }
        else if (outer_lo < hi)
        {
            total += quadrature::integrate_endpoint_singular(integrand, outer_lo, hi);
        }
        return total;
    };
    return one_side(chars.c_plus(), 1.0) + one_side(chars.c_minus(), -1.0);
}

StableLaw stable_law(StableCharacteristics const& chars)
{
    double alpha = chars.alpha();
    double total = chars.total_weight();
    if (alpha == 1.0)
    {
        // int (cos(uy) - 1) c |y|^{-2} dy = -c pi |u|
        return {alpha, chars.c_plus() * std::numbers::pi, 0.0, chars.b()};
    }
    double scale_pow = -total * std::tgamma(-alpha) * std::cos(std::numbers::pi * alpha / 2.0);
    double skew = (chars.c_plus() - chars.c_minus()) / total;
    double location = chars.b();
    double skew_weight = chars.c_plus() - chars.c_minus();
    if (alpha < 1.0)
    {
        // Uncompensated small jumps: remove the 1{|y|<=1} compensator.
        location -= skew_weight / (1.0 - alpha);
    }
    else
    {
        // Fully compensated jumps: add back the big-jump mean.
        location += skew_weight / (alpha - 1.0);
    }
    return {alpha, std::pow(scale_pow, 1.0 / alpha), skew, location};
}

}  // namespace stablemild
