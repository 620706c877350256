#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "pwshape/generators.hpp"
#include "pwshape/geometry.hpp"
#include "pwshape/signed_log.hpp"
#include "pwshape/zonal.hpp"

namespace pwshape {

/// Power of r collected in the radial integral of the shape density:
/// printed e(t) = m - n(K-N)/2 + t, derived e(t) = m + n(K-N)/2 + t.
enum class RadialConvention { printed, derived };

/// How shape_logdensity obtains the radial integrals.
enum class RadialMethod { automatic, closed_form, quadrature };

struct GaussianFamily {};

struct KotzFamily {
  double T = 1.0;
  double R = 0.5;
};

/// Arbitrary generator given through its derivatives h^{(k)}(y) in sign/log form.
struct CustomFamily {
  std::string name;
  std::function<SignedLogValue(int k, double y)> log_deriv;
};

using Generator = std::variant<GaussianFamily, KotzFamily, CustomFamily>;

struct ModelSpec {
  Generator generator = GaussianFamily{};
  /// (N-1) x K Helmertized mean; empty means zero.
  MatrixXd mu;
  /// sigma^2 (isotropic) or a full (N-1) x (N-1) Sigma.
  std::variant<double, MatrixXd> sigma = 1.0;
  /// K x K; empty means the identity.
  MatrixXd theta;
  int truncation = 120;
  /// derived is the convention under which the central density integrates to one.
  RadialConvention convention = RadialConvention::derived;
  double tolerance = 1e-12;
  RadialMethod radial = RadialMethod::automatic;
  /// Optional prebuilt zonal engine; used when it matches (K, truncation).
  std::shared_ptr<const ZonalSeries> engine;
};

/// Builds and attaches the zonal engine for K columns at model.truncation.
void prepare(ModelSpec& model, int K);

/// Kotz parameters of a model's generator for dimension M; throws for custom generators.
KotzGenerator kotz_parameters(const Generator& gen, int M);
std::string generator_name(const Generator& gen);

/// Radial exponent base e(0).
double radial_exponent(const PseudoWishartShape& shape, RadialConvention convention);

/// Diagnostics of the last series evaluated by a density call.
struct DensityDiagnostics {
  SeriesResult series;
  bool used_quadrature = false;
};

SignedLogValue size_shape_logdensity(const MatrixXd& V, int K, const ModelSpec& model,
                                     VStarMode mode = VStarMode::cholesky, DensityDiagnostics* diag = nullptr);

SignedLogValue shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                DensityDiagnostics* diag = nullptr);

/// Isotropic corollary, sigma must be a scalar.
SignedLogValue isotropic_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                          DensityDiagnostics* diag = nullptr);

/// Generator-free density at mu = 0.
double central_invariant_logdensity(const PseudoWishartShape& shape, const std::variant<double, MatrixXd>& sigma,
                                    RadialConvention convention = RadialConvention::derived);
double central_invariant_logdensity(const PseudoWishartShape& shape, const ModelSpec& model);

/// Kotz T = 1 closed form (any R, general Sigma).
SignedLogValue kotz_t1_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                        DensityDiagnostics* diag = nullptr);

/// Isotropic Gaussian display (R = 1/2, Sigma = sigma^2 I, Theta = I).
SignedLogValue gaussian_isotropic_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                                   DensityDiagnostics* diag = nullptr);

/// Kotz integer T through the double series for the radial weight; falls back
/// to quadrature for non-integer T or when the series cancels badly.
SignedLogValue kotz_general_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                             DensityDiagnostics* diag = nullptr);

/// Isotropic T = 2 and T = 3 displays (R = 1/2, Sigma = sigma^2 I, Theta = I).
SignedLogValue kotz_t2_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                        DensityDiagnostics* diag = nullptr);
SignedLogValue kotz_t3_shape_logdensity(const PseudoWishartShape& shape, const ModelSpec& model,
                                        DensityDiagnostics* diag = nullptr);

/// Radial integral int_0^inf r^e h^{(2t)}(rA + B) dr by quadrature.
SignedLogValue radial_integral_quadrature(const Generator& gen, int M, double e, int t, double A, double B,
                                          bool* converged = nullptr);
/// Same integral in closed form for integer-T Kotz generators.
SignedLogValue radial_integral_kotz(const KotzGenerator& gen, double e, int t, double A, double B);

}  // namespace pwshape
