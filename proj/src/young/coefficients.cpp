#include "fracnelson/young/coefficients.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracnelson/core/random.h"

namespace fracnelson::young {

CoefficientSet validate(CoefficientSet c, std::uint64_t seed) {
  if (!c.sigma || !c.b || !c.sigma_prime || !c.b_prime || !c.sigma_second) {
    throw std::invalid_argument("coefficient set '" + c.name + "' is missing an evaluator");
  }
  core::PathRng rng(core::SeedSpec{seed, 0}, 0, 0);
  const double step = 1e-5;
  auto check = [&](const ScalarFn& f, const ScalarFn& df, const char* what) {
    for (int i = 0; i < 20; ++i) {
      double x = c.x0 + 10.0 * (rng.uniform() - 0.5);
      double d = df(x);
      double fd = (f(x + step) - f(x - step)) / (2.0 * step);
      if (!(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)))) {
        std::ostringstream os;
        os << "coefficient set '" << c.name << "': supplied " << what << " disagrees with finite differences at x = "
           << x << " (" << d << " vs " << fd << ")";
        throw std::invalid_argument(os.str());
      }
    }
  };
  check(c.sigma, c.sigma_prime, "sigma'");
  check(c.b, c.b_prime, "b'");
  check(c.sigma_prime, c.sigma_second, "sigma''");
  double min_sigma = INFINITY;
  for (int i = 0; i <= 400; ++i) min_sigma = std::min(min_sigma, std::abs(c.sigma(c.x0 - 20.0 + 0.1 * i)));
  c.elliptic = min_sigma > 0.0;
  return c;
}

CoefficientSet preset(std::string_view name, double x0) {
  CoefficientSet c;
  c.x0 = x0;
  c.name = std::string(name);
  auto zero = [](double) { return 0.0; };
  auto one = [](double) { return 1.0; };
  auto param = [&](std::string_view prefix) {
    std::string rest(name.substr(prefix.size()));
    try {
      std::size_t used = 0;
      double v = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad parameter in coefficient preset '" + std::string(name) + "'");
    }
  };
  if (name == "linear") {
    c.sigma = [](double x) { return x; };
    c.sigma_prime = one;
    c.sigma_second = zero;
    c.b = c.b_prime = zero;
    c.b_sup = 0.0;
  } else if (name == "sine") {
    c.sigma = [](double x) { return 2.0 + std::sin(x); };
    c.sigma_prime = [](double x) { return std::cos(x); };
    c.sigma_second = [](double x) { return -std::sin(x); };
    c.b = [](double x) { return std::cos(x); };
    c.b_prime = [](double x) { return -std::sin(x); };
    c.sigma_sup = 3.0;
    c.b_sup = 1.0;
  } else if (name == "constant") {
    c.sigma = one;
    c.sigma_prime = c.sigma_second = zero;
    c.b = c.b_prime = zero;
    c.sigma_sup = 1.0;
    c.b_sup = 0.0;
  } else if (name == "zero") {
    c.sigma = c.sigma_prime = c.sigma_second = zero;
    c.b = c.b_prime = zero;
    c.sigma_sup = c.b_sup = 0.0;
  } else if (name.starts_with("proportional:")) {
    double r = param("proportional:");
    c.sigma = [](double x) { return 2.0 + std::sin(x); };
    c.sigma_prime = [](double x) { return std::cos(x); };
    c.sigma_second = [](double x) { return -std::sin(x); };
    c.b = [r](double x) { return r * (2.0 + std::sin(x)); };
    c.b_prime = [r](double x) { return r * std::cos(x); };
    c.sigma_sup = 3.0;
    c.b_sup = 3.0 * std::abs(r);
    c.proportional_ratio = r;
  } else if (name.starts_with("vanishing:")) {
    double r = param("vanishing:");
    c.sigma = [](double x) { return std::sin(x); };
    c.sigma_prime = [](double x) { return std::cos(x); };
    c.sigma_second = [](double x) { return -std::sin(x); };
    c.b = [r](double x) { return r * std::sin(x); };
    c.b_prime = [r](double x) { return r * std::cos(x); };
    c.sigma_sup = 1.0;
    c.b_sup = std::abs(r);
    c.proportional_ratio = r;
  } else if (name == "affine") {
    c.sigma = one;
    c.sigma_prime = c.sigma_second = zero;
    c.b = [](double x) { return x; };
    c.b_prime = one;
    c.sigma_sup = 1.0;
  } else if (name == "bounded-drift") {
    c.sigma = one;
    c.sigma_prime = c.sigma_second = zero;
    c.b = [](double x) { return std::sin(x); };
    c.b_prime = [](double x) { return std::cos(x); };
    c.sigma_sup = 1.0;
    c.b_sup = 1.0;
  } else if (name == "logistic") {
    c.sigma = c.sigma_prime = c.sigma_second = zero;
    c.b = [](double x) { return x * (1.0 - x); };
    c.b_prime = [](double x) { return 1.0 - 2.0 * x; };
    c.sigma_sup = 0.0;
  } else if (name.starts_with("ou:")) {
    double theta = param("ou:");
    c.sigma = one;
    c.sigma_prime = c.sigma_second = zero;
    c.b = [theta](double x) { return -theta * x; };
    c.b_prime = [theta](double) { return -theta; };
    c.sigma_sup = 1.0;
  } else {
    throw std::invalid_argument("unknown coefficient preset '" + std::string(name) + "'");
  }
  return validate(std::move(c));
}

}  // namespace fracnelson::young
