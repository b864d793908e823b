#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gnsspred/numerics.hpp"
#include "gnsspred/series.hpp"

namespace gnsspred {

enum class MethodKind { MLP, BNN, GP, KNN, GRNN, CART, SVR };

/// Listing order used for tables and rank tie-breaks.
inline constexpr std::array<MethodKind, 7> kAllMethods = {
    MethodKind::MLP, MethodKind::BNN, MethodKind::GP,  MethodKind::KNN,
    MethodKind::GRNN, MethodKind::CART, MethodKind::SVR};

std::string_view to_string(MethodKind kind) noexcept;
/// Case-insensitive. Throws Error(ConfigError) for unknown names.
MethodKind parse_method(std::string_view name);
/// Comma-separated list, e.g. "GP,KNN". Duplicates are dropped.
std::vector<MethodKind> parse_method_list(std::string_view list);
std::size_t listing_index(MethodKind kind) noexcept;

// ---------------------------------------------------------------------------
// Hyperparameters. Defaults are the harness defaults; all units are
// standardized values and normalized time.

struct GpParams {
  std::vector<double> lengthscale_grid = {0.03, 0.1, 0.3, 1.0};
  double signal_variance = 1.0;
  std::vector<double> noise_grid = {1e-6, 1e-4, 1e-2};
  /// Trailing share of the training window used to score grid points.
  double validation_fraction = 0.1;
};

enum class KnnWeighting { Uniform, InverseDistance };

struct KnnParams {
  std::size_t k = 5;  // clamped to the training size
  KnnWeighting weighting = KnnWeighting::InverseDistance;
};

struct GrnnParams {
  std::vector<double> bandwidth_grid = {0.01, 0.03, 0.1};
};

struct CartParams {
  static constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();
  std::size_t max_depth = 8;
  std::size_t min_samples_leaf = 3;
};

enum class SvrKernel { Linear, Rbf };

struct SvrParams {
  double c = 10.0;
  double epsilon = 0.01;
  SvrKernel kernel = SvrKernel::Rbf;
  double gamma = 10.0;
  /// Iteration budget is max_passes * n pair updates.
  std::size_t max_passes = 100;
  double tolerance = 1e-3;
};

enum class Activation { Tanh, Identity };

struct MlpParams {
  std::size_t width = 16;
  std::size_t epochs = 2000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  Activation activation = Activation::Tanh;
};

struct BnnParams {
  std::size_t ensemble_size = 5;
  /// Prior scale of the anchors; +inf removes the anchoring term.
  double prior_stddev = 1.0;
  MlpParams member;
};

struct Hyperparameters {
  GpParams gp;
  KnnParams knn;
  GrnnParams grnn;
  CartParams cart;
  SvrParams svr;
  MlpParams mlp;
  BnnParams bnn;

  /// Throws BadHyperparameters when the settings for `kind` are invalid.
  void validate(MethodKind kind) const;
};

// ---------------------------------------------------------------------------
// Fitted state per method. Values are standardized.

namespace fitted {

struct Network {
  Activation activation = Activation::Tanh;
  std::vector<double> w;  // hidden input weights
  std::vector<double> b;  // hidden biases
  std::vector<double> v;  // output weights
  double c = 0.0;         // output bias

  std::size_t width() const noexcept { return w.size(); }
  double operator()(double t) const noexcept;
};

struct Mlp {
  Network net;
};

struct Bnn {
  std::vector<Network> members;
};

struct Gp {
  std::vector<double> times;
  std::vector<double> alpha;  // (K + noise I)^-1 y
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 0.0;
};

struct Knn {
  std::vector<double> times;
  std::vector<double> values;
  std::size_t k = 1;
  KnnWeighting weighting = KnnWeighting::InverseDistance;
};

struct Grnn {
  std::vector<double> times;
  std::vector<double> values;
  double bandwidth = 0.1;
};

struct CartNode {
  double threshold = 0.0;  // go left when t <= threshold
  double value = 0.0;      // leaf mean
  std::int32_t left = -1;  // -1 marks a leaf
  std::int32_t right = -1;
};

struct Cart {
  std::vector<CartNode> nodes;  // nodes[0] is the root
  std::size_t depth = 0;
  std::size_t leaves = 0;
};

struct Svr {
  std::vector<double> times;
  std::vector<double> coef;  // alpha_i - alpha_i*
  double bias = 0.0;
  SvrKernel kernel = SvrKernel::Rbf;
  double gamma = 1.0;
  std::size_t iterations = 0;
  std::size_t support_vectors = 0;
};

}  // namespace fitted

using FittedState = std::variant<fitted::Mlp, fitted::Bnn, fitted::Gp, fitted::Knn,
                                 fitted::Grnn, fitted::Cart, fitted::Svr>;

class ForecastModel {
 public:
  ForecastModel(MethodKind kind, FittedState state, Standardization standardization,
                std::string selection);

  MethodKind kind() const noexcept { return kind_; }
  const FittedState& state() const noexcept { return state_; }
  const Standardization& standardization() const noexcept { return standardization_; }
  /// RMSE of in-sample predictions against the training values, meters.
  double training_rmse() const noexcept { return training_rmse_; }
  /// Human-readable description of the hyperparameters picked by the grid search.
  const std::string& selection() const noexcept { return selection_; }

  /// Predictions in meters at normalized times (values > 1 extrapolate).
  std::vector<double> predict(std::span<const double> times) const;
  std::vector<double> predict_standardized(std::span<const double> times) const;

 private:
  friend ForecastModel fit(MethodKind, const Hyperparameters&, std::span<const double>,
                           std::span<const double>, const RngStream&);

  MethodKind kind_;
  FittedState state_;
  Standardization standardization_;
  std::string selection_;
  double training_rmse_ = 0.0;
};

/// Fits one method on normalized training times and raw values (meters).
/// Values are standardized internally; grids are searched by in-sample RMSE,
/// except GP which scores grid points on the trailing validation slice.
ForecastModel fit(MethodKind kind, const Hyperparameters& hp, std::span<const double> train_times,
                  std::span<const double> train_values, const RngStream& rng);

std::vector<double> predict(const ForecastModel& model, std::span<const double> times);

// ---------------------------------------------------------------------------
// Building blocks, exposed for testing.

double se_kernel(double a, double b, double lengthscale, double signal_variance) noexcept;

/// K*^T (K + noise I)^-1 y with the squared-exponential kernel.
std::vector<double> gp_posterior_mean(std::span<const double> train_times,
                                      std::span<const double> train_values_std,
                                      std::span<const double> query_times, double lengthscale,
                                      double signal_variance, double noise_variance);

fitted::Gp gp_fit_fixed(std::span<const double> times, std::span<const double> values_std,
                        double lengthscale, double signal_variance, double noise_variance);
double gp_predict(const fitted::Gp& gp, double t) noexcept;

double knn_predict(const fitted::Knn& knn, double t) noexcept;
double grnn_predict(const fitted::Grnn& grnn, double t) noexcept;

fitted::Cart cart_fit(std::span<const double> times, std::span<const double> values_std,
                      const CartParams& params);
double cart_predict(const fitted::Cart& cart, double t) noexcept;

/// Throws NumericalFailure when SMO has not converged after the pass budget.
fitted::Svr svr_fit(std::span<const double> times, std::span<const double> values_std,
                    const SvrParams& params);
double svr_predict(const fitted::Svr& svr, double t) noexcept;

fitted::Network mlp_init(std::size_t width, Activation activation, RngStream stream);
/// Every parameter drawn from its fan-in scaled normal, output layer included.
fitted::Network mlp_random(std::size_t width, Activation activation, RngStream stream);

/// Flat parameter order: w, b, v, c.
std::vector<double> mlp_parameters(const fitted::Network& net);
void mlp_set_parameters(fitted::Network& net, std::span<const double> params);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // flat parameter order
};

/// Mean squared error of `net` on (times, targets) and its backprop gradient.
LossGradient mlp_loss_gradient(const fitted::Network& net, std::span<const double> times,
                               std::span<const double> targets);

/// Max relative error between the backprop gradient and central finite
/// differences (step 1e-6) on a randomly drawn network of `hp` shape, for
/// standardized targets.
double mlp_fit_gradient_check(const MlpParams& hp, std::span<const double> times,
                              std::span<const double> targets, const RngStream& rng);

/// Plain full-batch gradient descent (no anchoring).
fitted::Network mlp_train(const MlpParams& hp, std::span<const double> times,
                          std::span<const double> targets, const RngStream& rng);

/// Anchored ensemble member `index`; with prior_stddev = +inf and index 0 this
/// equals mlp_train for the same stream.
fitted::Network bnn_train_member(const BnnParams& hp, std::size_t index,
                                 std::span<const double> times, std::span<const double> targets,
                                 const RngStream& rng);

}  // namespace gnsspred
