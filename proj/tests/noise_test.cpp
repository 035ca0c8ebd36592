// Copyright 2026 qsegsim Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsegsim/noise.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace qsegsim;

namespace {

TEST(Noise, DeriveRates) {
    auto p = derive_rates(0.007, 3);
    EXPECT_DOUBLE_EQ(p.eps0, 0.007 / 25.0);
    EXPECT_DOUBLE_EQ(p.eps1, 0.0007);
    EXPECT_DOUBLE_EQ(p.epsI, 0.007);
    EXPECT_DOUBLE_EQ(p.epsM, 0.007);

    auto q = derive_rates(0.001, 13);
    EXPECT_NEAR(q.eps0, 8e-6, 1e-9);
    EXPECT_DOUBLE_EQ(q.eps1, 1e-4);

    EXPECT_THROW(derive_rates(-0.1, 3), std::invalid_argument);
    EXPECT_THROW(derive_rates(0.01, 2), std::invalid_argument);
}

TEST(Noise, DeriveRatesMonotoneInD) {
    double prev = 1.0;
    for (int d = 3; d <= 21; d += 2) {
        auto p = derive_rates(0.005, d);
        EXPECT_LT(p.eps0, prev);
        prev = p.eps0;
    }
}

TEST(Noise, OneQubitChannelZeroRate) {
    auto rng = trial_rng(1, 1);
    for (int i = 0; i < 100; i++) {
        EXPECT_TRUE(sample_one_qubit_channel(0.0, rng).is_identity());
    }
}

// Empirical frequencies at rate 0.01 over 10^6 samples stay within 5-sigma
// binomial bounds of the analytic weights rate/3 per Pauli.
TEST(Noise, OneQubitChannelFrequencies) {
    auto rng = trial_rng(42, 0);
    const int N = 1000000;
    const double rate = 0.01;
    std::array<int, 4> counts{};  // I, X, Y, Z
    for (int i = 0; i < N; i++) {
        auto p = sample_one_qubit_channel(rate, rng);
        bool bx = p.x.get(0), bz = p.z.get(0);
        counts[bx ? (bz ? 2 : 1) : (bz ? 3 : 0)]++;
    }
    std::array<double, 4> expect{1.0 - rate, rate / 3, rate / 3, rate / 3};
    for (int k = 0; k < 4; k++) {
        double mean = N * expect[k];
        double sigma = std::sqrt(N * expect[k] * (1 - expect[k]));
        EXPECT_NEAR(counts[k], mean, 5 * sigma) << "pauli " << k;
    }
}

TEST(Noise, TwoQubitChannelFrequencies) {
    auto rng = trial_rng(43, 0);
    const int N = 1000000;
    const double rate = 0.15;
    std::array<int, 16> counts{};
    int marg0 = 0;  // first qubit non-identity
    for (int i = 0; i < N; i++) {
        auto p = sample_two_qubit_channel(rate, rng);
        int a = (p.x.get(0) ? 1 : 0) | (p.z.get(0) ? 2 : 0);
        int b = (p.x.get(1) ? 1 : 0) | (p.z.get(1) ? 2 : 0);
        counts[a * 4 + b]++;
        if (a != 0) {
            marg0++;
        }
    }
    for (int k = 0; k < 16; k++) {
        double e = (k == 0) ? 1.0 - rate : rate / 15.0;
        double mean = N * e, sigma = std::sqrt(N * e * (1 - e));
        EXPECT_NEAR(counts[k], mean, 5 * sigma) << "pauli pair " << k;
    }
    // Marginal on either qubit is depolarizing with weight 12*rate/15.
    double e = 12.0 * rate / 15.0;
    EXPECT_NEAR(marg0, N * e, 5 * std::sqrt(N * e * (1 - e)));
}

TEST(Noise, TwoQubitChannelZeroRate) {
    auto rng = trial_rng(2, 2);
    for (int i = 0; i < 100; i++) {
        EXPECT_TRUE(sample_two_qubit_channel(0.0, rng).is_identity());
    }
}

}  // namespace
