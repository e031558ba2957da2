#pragma once

// Domain types for the random-environment bipartite graph model and the JSON
// model file that configures it.
//
//   {"alpha": 2, "beta": 2, "p": [0.5, 0.5], "q": [0.5, 0.5],
//    "F": [[0.8, 0.2], [0.2, 0.8]]}
//
// All types validate on construction and are immutable afterwards.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pmscale/error.hpp"
#include "pmscale/matrix.hpp"

namespace pmscale {

inline constexpr double kNormalizationTolerance = 1e-12;

/// Strictly positive weights summing to one.
class StochasticVector {
 public:
  explicit StochasticVector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
      throw Error(ErrorCode::EmptyInput, "stochastic vector must be non-empty");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
        throw Error(ErrorCode::NonPositiveWeight,
                    "weight " + std::to_string(i) + " is not strictly positive");
      }
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "weights sum to " << total;
      throw Error(ErrorCode::NotNormalized, msg.str());
    }
  }

  /// Uniform weights over `size` symbols.
  static StochasticVector uniform(std::size_t size) {
    return StochasticVector(std::vector<double>(size, 1.0 / static_cast<double>(size)));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const StochasticVector&, const StochasticVector&) = default;

 private:
  std::vector<double> weights_;
};

inline StochasticVector validate_stochastic_vector(std::vector<double> raw) {
  return StochasticVector(std::move(raw));
}

/// Matrix with every entry strictly positive (and finite).
class PositiveMatrix {
 public:
  explicit PositiveMatrix(Matrix<double> m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.cols() == 0) {
      throw Error(ErrorCode::EmptyInput, "matrix must have at least one row and column");
    }
    for (double v : m_.data()) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::NonPositiveEntry, "matrix entries must be strictly positive");
      }
    }
  }
  PositiveMatrix(std::initializer_list<std::initializer_list<double>> init)
      : PositiveMatrix(Matrix<double>(init)) {}

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix<double>& matrix() const noexcept { return m_; }

  double min_entry() const { return *std::ranges::min_element(m_.data()); }
  double max_entry() const { return *std::ranges::max_element(m_.data()); }

  friend bool operator==(const PositiveMatrix&, const PositiveMatrix&) = default;

 private:
  Matrix<double> m_;
};

/// Edge probabilities F = [f_rs] with 0 < f_rs <= 1.
class EdgeDistributionMatrix : public PositiveMatrix {
 public:
  explicit EdgeDistributionMatrix(Matrix<double> m) : PositiveMatrix(check(std::move(m))) {}
  EdgeDistributionMatrix(std::initializer_list<std::initializer_list<double>> init)
      : EdgeDistributionMatrix(Matrix<double>(init)) {}

 private:
  static Matrix<double> check(Matrix<double> m) {
    if (m.rows() == 0 || m.cols() == 0) {
      throw Error(ErrorCode::EmptyInput, "edge distribution matrix must be at least 1x1");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t s = 0; s < m.cols(); ++s) {
        const double f = m(r, s);
        if (!(f > 0.0 && f <= 1.0)) {
          throw Error(ErrorCode::EntryOutOfRange,
                      "F[" + std::to_string(r) + "][" + std::to_string(s) + "] not in (0,1]");
        }
      }
    }
    return m;
  }
};

/// Unvalidated model data as read from a file or built in code.
struct RawModel {
  long long alpha = 0;
  long long beta = 0;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<std::vector<double>> F;
};

/// The data (alpha, beta, p, q, F) defining the random-environment model.
class ModelConfig {
 public:
  ModelConfig(StochasticVector p, StochasticVector q, EdgeDistributionMatrix F)
      : p_(std::move(p)), q_(std::move(q)), F_(std::move(F)) {
    if (F_.rows() != p_.size() || F_.cols() != q_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "F must be |p| x |q|");
    }
  }

  std::size_t alpha() const noexcept { return p_.size(); }
  std::size_t beta() const noexcept { return q_.size(); }
  const StochasticVector& p() const noexcept { return p_; }
  const StochasticVector& q() const noexcept { return q_; }
  const EdgeDistributionMatrix& F() const noexcept { return F_; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;

 private:
  StochasticVector p_;
  StochasticVector q_;
  EdgeDistributionMatrix F_;
};

inline ModelConfig validate_model(const RawModel& raw) {
  if (raw.alpha < 1 || raw.beta < 1) {
    throw Error(ErrorCode::DimensionMismatch, "alpha and beta must be at least 1");
  }
  const auto alpha = static_cast<std::size_t>(raw.alpha);
  const auto beta = static_cast<std::size_t>(raw.beta);
  if (raw.p.size() != alpha) {
    throw Error(ErrorCode::DimensionMismatch, "p has " + std::to_string(raw.p.size()) +
                                                  " entries, alpha = " + std::to_string(alpha));
  }
  if (raw.q.size() != beta) {
    throw Error(ErrorCode::DimensionMismatch, "q has " + std::to_string(raw.q.size()) +
                                                  " entries, beta = " + std::to_string(beta));
  }
  if (raw.F.size() != alpha) {
    throw Error(ErrorCode::DimensionMismatch, "F must have alpha rows");
  }
  for (const auto& row : raw.F) {
    if (row.size() != beta) throw Error(ErrorCode::DimensionMismatch, "F must have beta columns");
  }
  return ModelConfig(StochasticVector(raw.p), StochasticVector(raw.q),
                     EdgeDistributionMatrix(Matrix<double>::from_rows(raw.F)));
}

/// Single-symbol model: every edge present with probability `p`.
inline ModelConfig erdos_renyi_model(double p) {
  return ModelConfig(StochasticVector({1.0}), StochasticVector({1.0}),
                     EdgeDistributionMatrix{{p}});
}

// JSON model file -----------------------------------------------------------

inline nlohmann::json to_json(const ModelConfig& model) {
  nlohmann::json j;
  j["alpha"] = model.alpha();
  j["beta"] = model.beta();
  j["p"] = std::vector<double>(model.p().weights().begin(), model.p().weights().end());
  j["q"] = std::vector<double>(model.q().weights().begin(), model.q().weights().end());
  j["F"] = model.F().matrix().to_rows();
  return j;
}

inline ModelConfig model_from_json(const nlohmann::json& j) {
  RawModel raw;
  try {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "model must be a JSON object");
    for (const char* key : {"alpha", "beta", "p", "q", "F"}) {
      if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing key ") + key);
    }
    raw.alpha = j.at("alpha").get<long long>();
    raw.beta = j.at("beta").get<long long>();
    raw.p = j.at("p").get<std::vector<double>>();
    raw.q = j.at("q").get<std::vector<double>>();
    raw.F = j.at("F").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return validate_model(raw);
}

inline ModelConfig parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return model_from_json(j);
}

inline ModelConfig load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open model file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace pmscale
