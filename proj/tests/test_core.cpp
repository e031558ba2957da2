#include <random>

#include <gtest/gtest.h>

#include "pmscale/core.hpp"

using namespace pmscale;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pmscale::Error";
  return ErrorCode::InvalidArgument;
}

RawModel symmetric_raw() {
  return {2, 2, {0.5, 0.5}, {0.5, 0.5}, {{0.8, 0.2}, {0.2, 0.8}}};
}

}  // namespace

TEST(StochasticVector, AcceptsSingleSymbol) {
  auto v = validate_stochastic_vector({1.0});
  EXPECT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], 1.0);
}

TEST(StochasticVector, AcceptsUniformPair) {
  auto v = validate_stochastic_vector({0.5, 0.5});
  EXPECT_EQ(v.size(), 2u);
}

TEST(StochasticVector, RejectsUnnormalized) {
  EXPECT_EQ(code_of([] { validate_stochastic_vector({0.3, 0.3}); }), ErrorCode::NotNormalized);
}

TEST(StochasticVector, RejectsZeroAndNegativeWeights) {
  EXPECT_EQ(code_of([] { validate_stochastic_vector({0.0, 1.0}); }),
            ErrorCode::NonPositiveWeight);
  EXPECT_EQ(code_of([] { validate_stochastic_vector({1.5, -0.5}); }),
            ErrorCode::NonPositiveWeight);
}

TEST(StochasticVector, ToleranceIsTight) {
  EXPECT_NO_THROW(validate_stochastic_vector({0.1, 0.2, 0.7}));
  EXPECT_EQ(code_of([] { validate_stochastic_vector({0.5, 0.5 + 1e-10}); }),
            ErrorCode::NotNormalized);
}

TEST(StochasticVector, RejectsEmpty) {
  EXPECT_EQ(code_of([] { validate_stochastic_vector({}); }), ErrorCode::EmptyInput);
}

TEST(ValidateModel, ErdosRenyiCase) {
  auto m = validate_model({1, 1, {1.0}, {1.0}, {{0.3}}});
  EXPECT_EQ(m.alpha(), 1u);
  EXPECT_EQ(m.F()(0, 0), 0.3);
}

TEST(ValidateModel, RunningExample) {
  auto m = validate_model(symmetric_raw());
  EXPECT_EQ(m.alpha(), 2u);
  EXPECT_EQ(m.beta(), 2u);
  EXPECT_EQ(m.F()(0, 1), 0.2);
}

TEST(ValidateModel, RejectsZeroEntry) {
  auto raw = symmetric_raw();
  raw.F[0][1] = 0.0;
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::EntryOutOfRange);
}

TEST(ValidateModel, AllowsEntryOneRejectsAboveOne) {
  auto raw = symmetric_raw();
  raw.F[0][0] = 1.0;
  EXPECT_NO_THROW(validate_model(raw));
  raw.F[0][0] = 1.0000001;
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::EntryOutOfRange);
}

TEST(ValidateModel, DimensionMismatches) {
  auto raw = symmetric_raw();
  raw.alpha = 3;
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::DimensionMismatch);
  raw = symmetric_raw();
  raw.F[1].push_back(0.5);
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::DimensionMismatch);
  raw = symmetric_raw();
  raw.q = {1.0};
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::DimensionMismatch);
}

TEST(ValidateModel, PropagatesVectorErrors) {
  auto raw = symmetric_raw();
  raw.p = {0.6, 0.6};
  EXPECT_EQ(code_of([&] { validate_model(raw); }), ErrorCode::NotNormalized);
}

TEST(ModelJson, ParsesAndRejects) {
  auto m = parse_model(R"({"alpha": 2, "beta": 2, "p": [0.5, 0.5], "q": [0.5, 0.5],
                           "F": [[0.8, 0.2], [0.2, 0.8]]})");
  EXPECT_EQ(m, validate_model(symmetric_raw()));
  EXPECT_EQ(code_of([] { parse_model("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_model(R"({"alpha": 1})"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_model(R"({"alpha": 1, "beta": 1, "p": [1], "q": [1],
                                         "F": [["x"]]})"); }),
            ErrorCode::ParseError);
}

// Serialize -> parse -> validate is the identity on random valid models.
TEST(ModelJson, RoundTripProperty) {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    RawModel raw;
    raw.alpha = dim(rng);
    raw.beta = dim(rng);
    auto stochastic = [&](long long k) {
      std::vector<double> w(static_cast<std::size_t>(k));
      double total = 0.0;
      for (auto& x : w) total += (x = unit(rng));
      for (auto& x : w) x /= total;
      return w;
    };
    raw.p = stochastic(raw.alpha);
    raw.q = stochastic(raw.beta);
    raw.F.assign(static_cast<std::size_t>(raw.alpha), {});
    for (auto& row : raw.F) {
      for (long long s = 0; s < raw.beta; ++s) row.push_back(unit(rng));
    }
    ModelConfig model(validate_stochastic_vector(raw.p), validate_stochastic_vector(raw.q),
                      EdgeDistributionMatrix(Matrix<double>::from_rows(raw.F)));
    EXPECT_EQ(parse_model(to_json(model).dump()), model);
  }
}
