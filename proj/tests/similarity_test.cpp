/*
 * Copyright 2026 The orcafd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "orca/similarity.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "orca/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace orca {
namespace {

TEST(L2Normalize, Examples) {
  const auto a = l2_normalize(std::vector<double>{3, 4});
  EXPECT_DOUBLE_EQ(a[0], 0.6);
  EXPECT_DOUBLE_EQ(a[1], 0.8);
  const auto b = l2_normalize(std::vector<double>{0, 0, 7});
  EXPECT_EQ(b, (std::vector<double>{0, 0, 1}));
}

TEST(L2Normalize, RandomVectorHasUnitNorm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::vector<double> v(512);
  for (double& x : v) x = g(rng);
  const auto u = l2_normalize(v);
  long double sq = 0;
  for (double x : u) sq += static_cast<long double>(x) * x;
  EXPECT_NEAR(static_cast<double>(std::sqrt(sq)), 1.0, 1e-9);
}

TEST(L2Normalize, ZeroVectorIsDegenerate) {
  EXPECT_THROW(l2_normalize(std::vector<double>{0, 0}), DegenerateVectorError);
  EXPECT_THROW(l2_normalize(std::vector<double>{}), ShapeError);
}

TEST(SimilarityLogits, Examples) {
  const std::vector<float> x = {1, 0};
  const auto s = similarity_logits(x, testing::matrix_from({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(s[0], 100.0);
  EXPECT_DOUBLE_EQ(s[1], 0.0);

  const std::vector<float> y = {3, 4};
  EXPECT_NEAR(similarity_logits(y, testing::matrix_from({{4, 3}}))[0], 96.0,
              1e-12);
  EXPECT_DOUBLE_EQ(similarity_logits(x, testing::matrix_from({{-1, 0}}))[0],
                   -100.0);
}

TEST(SimilarityLogits, Errors) {
  const std::vector<float> x = {1, 0};
  EXPECT_THROW(similarity_logits(x, testing::matrix_from({{1, 0, 0}})),
               ShapeError);
  try {
    similarity_logits(x, testing::matrix_from({{1, 0}, {0, 0}}));
    FAIL();
  } catch (const DegenerateVectorError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
  const std::vector<float> zero = {0, 0};
  EXPECT_THROW(similarity_logits(zero, testing::matrix_from({{1, 0}})),
               DegenerateVectorError);
}

TEST(SimilarityLogits, MatchesIndependentCosineAndStaysInRange) {
  std::mt19937_64 rng(12);
  const auto text = testing::random_matrix(20, 64, rng);
  const auto imgs = testing::random_matrix(10, 64, rng);
  for (std::size_t i = 0; i < imgs.rows(); ++i) {
    const auto s = similarity_logits(imgs.row(i), text);
    for (std::size_t j = 0; j < text.rows(); ++j) {
      EXPECT_NEAR(s[j],
                  oracle::cosine_logit(testing::as_double(imgs.row(i)),
                                       testing::as_double(text.row(j))),
                  1e-9);
      EXPECT_LE(std::abs(s[j]), 100.0 + 1e-9);
    }
  }
}

TEST(SimilarityLogits, InvariantToPositiveRescaling) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<float> scale(0.5f, 8.0f);
  for (int trial = 0; trial < 50; ++trial) {
    const auto text = testing::random_matrix(5, 32, rng);
    const auto img = testing::random_matrix(1, 32, rng);
    const float a = scale(rng);
    // Powers of two keep the float rescaling exact, so the 1e-9 contract
    // applies; arbitrary factors re-round every f32 entry.
    const float p2 = std::ldexp(1.0f, static_cast<int>(trial % 7) - 3);
    std::vector<float> scaled(img.data().begin(), img.data().end());
    std::vector<float> scaled2 = scaled;
    for (float& v : scaled) v *= a;
    for (float& v : scaled2) v *= p2;
    const auto base = similarity_logits(img.row(0), text);
    const auto s1 = similarity_logits(scaled, text);
    const auto s2 = similarity_logits(scaled2, text);
    for (std::size_t j = 0; j < base.size(); ++j) {
      EXPECT_NEAR(s1[j], base[j], 1e-4);
      EXPECT_NEAR(s2[j], base[j], 1e-9);
    }
  }
}

TEST(SimilarityLogits, RepeatedEvaluationIsBitIdentical) {
  std::mt19937_64 rng(14);
  const auto text = testing::random_matrix(30, 128, rng);
  const auto img = testing::random_matrix(1, 128, rng);
  const TextBank bank(text);
  EXPECT_EQ(similarity_logits(img.row(0), text),
            similarity_logits(img.row(0), bank));
}

TEST(Softmax, Examples) {
  const auto a = softmax(std::vector<double>{0, 0}, 1.0);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.5);
  const auto b = softmax(std::vector<double>{0, std::log(3.0)}, 1.0);
  EXPECT_NEAR(b[0], 0.25, 1e-15);
  EXPECT_NEAR(b[1], 0.75, 1e-15);
  // exp(0.01) / (exp(0.01) + 1)
  const double expected = std::exp(0.01) / (std::exp(0.01) + 1.0);
  const auto c = softmax(std::vector<double>{10, 0}, 1000.0);
  EXPECT_NEAR(c[0], expected, 1e-15);
  EXPECT_NEAR(c[0], 0.50250, 1e-5);
  EXPECT_NEAR(c[1], 0.49750, 1e-5);
}

TEST(Softmax, RejectsBadTemperature) {
  EXPECT_THROW(softmax(std::vector<double>{1, 2}, 0.0), ParameterError);
  EXPECT_THROW(softmax(std::vector<double>{1, 2}, -1.0), ParameterError);
}

TEST(Softmax, SurvivesHugeLogits) {
  const auto p = softmax(std::vector<double>{1e6, 1e6 - 1, -1e6}, 1.0);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  EXPECT_GT(p[0], p[1]);
}

TEST(Softmax, Properties) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-100, 100);
  std::uniform_int_distribution<std::size_t> len(2, 50);
  std::uniform_real_distribution<double> temp(0.05, 2000);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(len(rng));
    for (double& x : s) x = u(rng);
    const double T = temp(rng);
    const auto p = softmax(s, T);
    double total = 0.0;
    for (double x : p) total += x;
    EXPECT_NEAR(total, 1.0, 1e-9);

    // Shift invariance.
    std::vector<double> shifted = s;
    const double shift = u(rng);
    for (double& x : shifted) x += shift;
    const auto q = softmax(shifted, T);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);

    // Random continuous draws are tie-free.
    EXPECT_EQ(argmax(p), argmax(s));

    // Near-uniform at huge temperature.
    const auto flat = softmax(s, 1e9);
    for (double x : flat) {
      EXPECT_LT(std::abs(x - 1.0 / static_cast<double>(s.size())), 1e-6);
    }
  }
}

TEST(Argmax, LowestIndexWinsTies) {
  EXPECT_EQ(argmax(std::vector<double>{1, 3, 3, 2}), 1u);
  EXPECT_EQ(argmax(std::vector<double>{5, 5}), 0u);
}

}  // namespace
}  // namespace orca
