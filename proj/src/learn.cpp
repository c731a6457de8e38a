#include "convabuse/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convabuse/error.hpp"

namespace convabuse::learn {

// ---------------------------------------------------------------------------
// Naive Bayes

NBModel nb_train(const std::vector<std::vector<std::string>>& docs, const std::vector<Label>& labels) {
  if (docs.size() != labels.size()) throw FitError("documents and labels differ in length");
  NBModel m;
  for (const auto& doc : docs) m.vocabulary.insert(m.vocabulary.end(), doc.begin(), doc.end());
  std::sort(m.vocabulary.begin(), m.vocabulary.end());
  m.vocabulary.erase(std::unique(m.vocabulary.begin(), m.vocabulary.end()), m.vocabulary.end());
  m.df_abuse.assign(m.vocabulary.size(), 0);
  m.df_non_abuse.assign(m.vocabulary.size(), 0);

  std::vector<std::size_t> seen;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const bool abuse = labels[d] == Label::kAbuse;
    if (!abuse && labels[d] != Label::kNonAbuse) throw FitError("training labels must be abuse or non_abuse");
    (abuse ? m.n_abuse : m.n_non_abuse) += 1;
    seen.clear();
    for (const auto& tok : docs[d]) {
      const auto it = std::lower_bound(m.vocabulary.begin(), m.vocabulary.end(), tok);
      seen.push_back(static_cast<std::size_t>(it - m.vocabulary.begin()));
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::size_t idx : seen) (abuse ? m.df_abuse : m.df_non_abuse)[idx] += 1;
  }
  if (m.n_abuse == 0 || m.n_non_abuse == 0) throw FitError("naive Bayes needs both classes");
  return m;
}

double nb_posterior(const NBModel& model, std::span<const std::string> tokens) {
  if (!model.fitted()) throw ConfigError("naive Bayes model is not fitted");
  const double na = model.n_abuse;
  const double nn = model.n_non_abuse;
  const double total = na + nn;
  std::vector<char> present(model.vocabulary.size(), 0);
  for (const auto& tok : tokens) {
    const auto it = std::lower_bound(model.vocabulary.begin(), model.vocabulary.end(), tok);
    if (it != model.vocabulary.end() && *it == tok) present[static_cast<std::size_t>(it - model.vocabulary.begin())] = 1;
  }
  double log_a = std::log(na / total);
  double log_n = std::log(nn / total);
  for (std::size_t t = 0; t < model.vocabulary.size(); ++t) {
    const double pa = (model.df_abuse[t] + 1.0) / (na + 2.0);
    const double pn = (model.df_non_abuse[t] + 1.0) / (nn + 2.0);
    if (present[t]) {
      log_a += std::log(pa);
      log_n += std::log(pn);
    } else {
      log_a += std::log1p(-pa);
      log_n += std::log1p(-pn);
    }
  }
  // Logistic of the log-odds, written to avoid overflow on either side.
  const double z = log_a - log_n;
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Scaler

std::vector<double> Scaler::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) throw VersionError("scaler width does not match the feature row");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = stddev[j] > 0.0 ? (row[j] - mean[j]) / stddev[j] : 0.0;
  }
  return out;
}

Matrix Scaler::apply(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = apply(m.row(i));
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

Scaler scaler_fit(const Matrix& rows) {
  Scaler s;
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += rows(i, j);
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = rows(i, j) - s.mean[j];
      s.stddev[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.stddev[j] = std::sqrt(s.stddev[j] / static_cast<double>(n));
    // Columns that are constant up to rounding noise carry no signal.
    if (s.stddev[j] <= 1e-12 * std::max(1.0, std::abs(s.mean[j]))) s.stddev[j] = 0.0;
  }
  return s;
}

// ---------------------------------------------------------------------------
// SVM

double SvmModel::decision(std::span<const double> row) const {
  if (row.size() != w.size()) throw VersionError("SVM width does not match the feature row");
  double s = b;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * row[j];
  return s;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  // Four partial sums let the compiler keep several multiply-adds in flight.
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= a.size(); k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < a.size(); ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

// Linear kernel rows, fully cached when the Gram matrix fits comfortably.
class KernelRows {
 public:
  explicit KernelRows(const Matrix& x) : x_(x), n_(x.rows()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = dot(x.row(i), x.row(i));
    if (n_ * n_ <= kMaxCached) {
      full_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        full_[i * n_ + i] = diag_[i];
        for (std::size_t j = i + 1; j < n_; ++j) {
          full_[i * n_ + j] = full_[j * n_ + i] = dot(x.row(i), x.row(j));
        }
      }
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  /// Row i of the Gram matrix. The span stays valid until the next call
  /// with the same slot.
  std::span<const double> row(std::size_t i, int slot) {
    if (!full_.empty()) return {full_.data() + i * n_, n_};
    auto& buf = scratch_[slot];
    buf.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) buf[j] = dot(x_.row(i), x_.row(j));
    return buf;
  }

 private:
  static constexpr std::size_t kMaxCached = 4000 * 4000;
  const Matrix& x_;
  std::size_t n_;
  std::vector<double> diag_;
  std::vector<double> full_;
  std::vector<double> scratch_[2];
};

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// SMO on  min 1/2 a'Qa - e'a  s.t.  y'a = 0, 0 <= a <= C,  Q_ij = y_i y_j x_i.x_j,
// with second-order working-set selection and shrinking of bounded variables.
class Smo {
 public:
  Smo(const Matrix& x, std::span<const int> y, double C, double tol, double gap)
      : x_(x), kernel_(x), n_(x.rows()), C_(C), tol_(tol), gap_(gap), alpha_(n_, 0.0), grad_(n_, -1.0) {
    for (int v : y) y_.push_back(static_cast<double>(v));
    reset_active();
  }

  std::size_t solve(std::size_t max_iterations, bool* converged) {
    std::size_t counter = std::min<std::size_t>(n_, 1000) + 1;
    const std::size_t gap_every = std::max<std::size_t>(2 * n_, 2000);
    std::size_t iter = 0;
    *converged = false;
    while (iter < max_iterations) {
      if (iter > 0 && iter % gap_every == 0 && gap_closed()) {
        *converged = true;
        break;
      }
      if (--counter == 0) {
        counter = std::min<std::size_t>(n_, 1000);
        shrink();
      }
      std::size_t i = 0;
      std::size_t j = 0;
      if (!select(i, j)) {
        reconstruct_gradient();
        reset_active();
        if (!select(i, j)) {
          *converged = true;
          break;
        }
        counter = 1;
      }
      ++iter;
      update(i, j);
    }
    reconstruct_gradient();
    return iter;
  }

  const std::vector<double>& alpha() const { return alpha_; }

  /// Bias from free vectors, or the middle of the feasible interval.
  double bias() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (upper(t)) {
        if (y_[t] < 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else if (lower(t)) {
        if (y_[t] > 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return -rho;
  }

  std::vector<double> weights() const {
    std::vector<double> w(x_.cols(), 0.0);
    for (std::size_t t = 0; t < n_; ++t) {
      if (alpha_[t] == 0.0) continue;
      const double coef = alpha_[t] * y_[t];
      const auto r = x_.row(t);
      for (std::size_t k = 0; k < r.size(); ++k) w[k] += coef * r[k];
    }
    return w;
  }

 private:
  // Relative primal-dual gap below gap_. The primal uses the current bias
  // estimate, so the test is conservative.
  bool gap_closed() {
    if (gap_ <= 0.0) return false;
    reconstruct_gradient();
    const auto w = weights();
    const double half_ww = 0.5 * dot(w, w);
    double sum_alpha = 0.0;
    for (double a : alpha_) sum_alpha += a;
    const double b = bias();
    double hinge = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      // y_t (w.x_t + b) = G_t + 1 + y_t b
      hinge += std::max(0.0, -grad_[t] - y_[t] * b);
    }
    const double primal = half_ww + C_ * hinge;
    const double dual = sum_alpha - half_ww;
    return primal - dual <= gap_ * std::max(std::abs(primal), 1e-12);
  }

  bool upper(std::size_t t) const { return alpha_[t] >= C_; }
  bool lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  void reset_active() {
    active_.resize(n_);
    for (std::size_t t = 0; t < n_; ++t) active_[t] = t;
  }

  // Exact gradient from the current alphas: G_i = y_i w.x_i - 1.
  void reconstruct_gradient() {
    if (active_.size() == n_) return;
    const auto w = weights();
    for (std::size_t t = 0; t < n_; ++t) grad_[t] = y_[t] * dot(w, x_.row(t)) - 1.0;
  }

  bool select(std::size_t& out_i, std::size_t& out_j) {
    double gmax = -kInf;
    double gmax2 = -kInf;
    std::ptrdiff_t imax = -1;
    for (std::size_t t : active_) {
      if (y_[t] > 0) {
        if (!upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          imax = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        imax = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (imax < 0) return false;
    const auto i = static_cast<std::size_t>(imax);
    const auto ki = kernel_.row(i, 0);
    std::ptrdiff_t jmin = -1;
    double best = kInf;
    for (std::size_t t : active_) {
      double diff;
      double quad;
      if (y_[t] > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, grad_[t]);
        diff = gmax + grad_[t];
        quad = kernel_.diag(i) + kernel_.diag(t) - 2.0 * y_[i] * ki[t];
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -grad_[t]);
        diff = gmax - grad_[t];
        quad = kernel_.diag(i) + kernel_.diag(t) + 2.0 * y_[i] * ki[t];
      }
      if (diff > 0) {
        if (quad <= 0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          jmin = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < tol_ || jmin < 0) return false;
    out_i = i;
    out_j = static_cast<std::size_t>(jmin);
    return true;
  }

  void update(std::size_t i, std::size_t j) {
    const auto ki = kernel_.row(i, 0);
    const auto kj = kernel_.row(j, 1);
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double old_i = ai;
    const double old_j = aj;
    const double qij = y_[i] * y_[j] * ki[j];
    const double C = C_;
    if (y_[i] != y_[j]) {
      double quad = kernel_.diag(i) + kernel_.diag(j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = kernel_.diag(i) + kernel_.diag(j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    const double di = (ai - old_i) * y_[i];
    const double dj = (aj - old_j) * y_[j];
    for (std::size_t t : active_) grad_[t] += y_[t] * (ki[t] * di + kj[t] * dj);
  }

  bool shrinkable(std::size_t t, double gmax1, double gmax2) const {
    if (upper(t)) return y_[t] > 0 ? -grad_[t] > gmax1 : -grad_[t] > gmax2;
    if (lower(t)) return y_[t] > 0 ? grad_[t] > gmax2 : grad_[t] > gmax1;
    return false;
  }

  void shrink() {
    double gmax1 = -kInf;  // max violation towards increasing y'a terms
    double gmax2 = -kInf;
    for (std::size_t t : active_) {
      if (y_[t] > 0) {
        if (!upper(t)) gmax1 = std::max(gmax1, -grad_[t]);
        if (!lower(t)) gmax2 = std::max(gmax2, grad_[t]);
      } else {
        if (!upper(t)) gmax2 = std::max(gmax2, -grad_[t]);
        if (!lower(t)) gmax1 = std::max(gmax1, grad_[t]);
      }
    }
    // Re-examine every variable each time the restricted gap shrinks tenfold,
    // so that a wrong active set is not optimised to full precision.
    if (gmax1 + gmax2 <= unshrink_below_) {
      unshrink_below_ = std::max(tol_, 0.1 * (gmax1 + gmax2));
      reconstruct_gradient();
      reset_active();
    }
    std::erase_if(active_, [&](std::size_t t) { return shrinkable(t, gmax1, gmax2); });
  }

  const Matrix& x_;
  KernelRows kernel_;
  std::size_t n_;
  double C_;
  double tol_;
  double gap_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<std::size_t> active_;  // ascending
  double unshrink_below_ = 1.0;
};

}  // namespace

SvmFit svm_train(const Matrix& x, std::span<const int> y, const SvmOptions& options) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw FitError("rows and labels differ in length");
  if (!(options.C > 0.0)) throw ConfigError("SVM C must be positive");
  bool has_pos = false;
  bool has_neg = false;
  for (int label : y) {
    if (label == 1) {
      has_pos = true;
    } else if (label == -1) {
      has_neg = true;
    } else {
      throw FitError("SVM labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw FitError("SVM training needs both classes");
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : x.row(i)) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value in SVM input");
    }
  }

  Smo smo(x, y, options.C, options.tolerance, options.relative_gap);
  SvmFit fit;
  fit.iterations = smo.solve(options.max_iterations, &fit.converged);
  fit.model.C = options.C;
  fit.model.b = smo.bias();
  fit.model.w = smo.weights();
  fit.dual = smo.alpha();
  return fit;
}

double svm_objective(const SvmModel& model, const Matrix& x, std::span<const int> y) {
  double obj = 0.5 * dot(model.w, model.w);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    obj += model.C * std::max(0.0, 1.0 - y[i] * model.decision(x.row(i)));
  }
  return obj;
}

// ---------------------------------------------------------------------------
// Platt calibration

double Calibrator::probability(double decision) const {
  const double z = A * decision + B;
  double p;
  if (z >= 0) {
    const double e = std::exp(-z);
    p = e / (1.0 + e);
  } else {
    p = 1.0 / (1.0 + std::exp(z));
  }
  return std::clamp(p, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

Calibrator calibrate_fit(std::span<const double> dec, std::span<const int> y) {
  if (dec.size() != y.size()) throw FitError("decisions and labels differ in length");
  double prior1 = 0;
  double prior0 = 0;
  for (int label : y) (label > 0 ? prior1 : prior0) += 1.0;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = dec.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] > 0 ? hi : lo;

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-10;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * a + b;
      f += z >= 0 ? target[i] * z + std::log1p(std::exp(-z)) : (target[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  Calibrator c;
  c.A = 0.0;
  c.B = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(c.A, c.B);
  for (int it = 0; it < kMaxIter; ++it) {
    double h11 = kSigma;
    double h22 = kSigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = dec[i] * c.A + c.B;
      double p;
      double q;
      if (z >= 0) {
        const double e = std::exp(-z);
        p = e / (1.0 + e);
        q = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(z);
        p = 1.0 / (1.0 + e);
        q = e / (1.0 + e);
      }
      const double d2 = p * q;
      h11 += dec[i] * dec[i] * d2;
      h22 += d2;
      h21 += dec[i] * d2;
      const double d1 = target[i] - p;
      g1 += dec[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = c.A + step * dA;
      const double nb = c.B + step * dB;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        c.A = na;
        c.B = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return c;
}

double predict_proba(const SvmModel& model, const Calibrator& calibrator, std::span<const double> row) {
  return calibrator.probability(model.decision(row));
}

}  // namespace convabuse::learn
