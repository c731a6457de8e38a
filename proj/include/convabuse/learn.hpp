#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convabuse/corpus.hpp"
#include "convabuse/matrix.hpp"

namespace convabuse::learn {

// ---------------------------------------------------------------------------
// Bernoulli Naive Bayes over binary bag-of-words, Laplace smoothing (alpha 1).

struct NBModel {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<std::uint32_t> df_abuse;  // documents of each class containing the token
  std::vector<std::uint32_t> df_non_abuse;
  std::uint32_t n_abuse = 0;
  std::uint32_t n_non_abuse = 0;

  bool fitted() const noexcept { return n_abuse > 0 && n_non_abuse > 0; }
};

/// Each document is its token list; presence is what counts. Labels must be
/// abuse or non_abuse with both classes present, otherwise FitError.
NBModel nb_train(const std::vector<std::vector<std::string>>& docs, const std::vector<Label>& labels);

/// P(abuse | tokens) over the presence/absence of every vocabulary entry.
/// Out-of-vocabulary tokens are ignored.
double nb_posterior(const NBModel& model, std::span<const std::string> tokens);

// ---------------------------------------------------------------------------
// Standardizer.

struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation

  std::vector<double> apply(std::span<const double> row) const;
  Matrix apply(const Matrix& m) const;
};

/// Zero-variance columns map to 0.
Scaler scaler_fit(const Matrix& rows);

// ---------------------------------------------------------------------------
// Soft-margin linear SVM: min 1/2 |w|^2 + C sum max(0, 1 - y (w.x + b)).

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  double C = 1.0;

  double decision(std::span<const double> row) const;
};

struct SvmOptions {
  double C = 1.0;
  /// Stop when the maximal KKT violation of the dual drops below this,
  double tolerance = 1e-9;
  /// or when (primal - dual) / primal drops below this (0 disables).
  double relative_gap = 1e-8;
  std::size_t max_iterations = 10'000'000;
};

struct SvmFit {
  SvmModel model;
  std::vector<double> dual;  // alpha_i in [0, C], w = sum alpha_i y_i x_i
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dual SMO with second-order working-set selection. Labels are +1 / -1.
/// Throws FitError when a class is missing and DataError on non-finite input.
SvmFit svm_train(const Matrix& x, std::span<const int> y, const SvmOptions& options = {});

/// Primal objective value of a model on a training set.
double svm_objective(const SvmModel& model, const Matrix& x, std::span<const int> y);

// ---------------------------------------------------------------------------
// Platt sigmoid calibration: P(abuse | f) = 1 / (1 + exp(A f + B)).

struct Calibrator {
  double A = -1.0;
  double B = 0.0;

  double probability(double decision) const;
};

/// Regularised maximum-likelihood fit (Platt targets, Newton with
/// backtracking). Labels are +1 / -1.
Calibrator calibrate_fit(std::span<const double> decisions, std::span<const int> y);

/// Convenience: calibrated probability of a standardised row.
double predict_proba(const SvmModel& model, const Calibrator& calibrator, std::span<const double> row);

}  // namespace convabuse::learn
