// Copyright 2026 The tsqt Authors
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


#include "tsqt/abl.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace tsqt;
using namespace tsqt::testing;

namespace {

// Frozen expectations for the three-box ensemble. Each one is reproduced by
// the projector-chain oracle in OracleReproducesFrozenValues.
constexpr double kSixth = 1.0 / 6.0;
constexpr double kTwoThirds = 2.0 / 3.0;
const std::vector<double> kQSingle = {kSixth, kTwoThirds, kSixth};
// Stage order [X, Q]; flat index = 3*x + q (0-based).
const std::vector<double> kXQ = {kSixth, 0, kSixth, 0, kTwoThirds, 0, 0, 0, 0};

std::size_t flat3(std::size_t i, std::size_t j, std::size_t k) { return 9 * i + 3 * j + k; }

void expect_table_near(std::span<const double> actual, const std::vector<double> &expected, double tol) {
    ASSERT_EQ(actual.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(actual[k], expected[k], tol) << "entry " << k;
}

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(AblOracle, ReproducesFrozenValues) {
    const Ket a = three_box_a(), b = three_box_b();
    expect_table_near(projector_chain_oracle(a, b, {observable_x()}), {0, 1, 0}, 1e-15);
    expect_table_near(projector_chain_oracle(a, b, {observable_q()}), kQSingle, 1e-15);
    expect_table_near(projector_chain_oracle(a, b, {observable_x(), observable_q()}), kXQ, 1e-15);
    const auto xqx = projector_chain_oracle(a, b, {observable_x(), observable_q(), observable_x()});
    std::vector<double> expected(27, 0.0);
    expected[flat3(0, 0, 2)] = kSixth;
    expected[flat3(0, 2, 2)] = kSixth;
    expected[flat3(1, 1, 1)] = kTwoThirds;
    expect_table_near(xqx, expected, 1e-15);
    EXPECT_NEAR(projector_chain_weight_sum(a, b, observable_q()), 3.0 / 8.0, 1e-15);
}

TEST(AblSingle, ThreeBoxX) {
    expect_table_near(abl_single(three_box_ensemble(), observable_x()).table(), {0, 1, 0}, 1e-12);
}

TEST(AblSingle, ThreeBoxQ) {
    const auto d = abl_single(three_box_ensemble(), observable_q());
    expect_table_near(d.table(), kQSingle, 1e-12);
    EXPECT_EQ(d.observable_labels(), std::vector<std::string>{"Q"});
}

TEST(AblSingle, PostselectingAnEigenketMakesItCertain) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const Observable c = random_observable("c", d, rng);
        const std::size_t k = trial % d;
        const auto dist = abl_single(EnsembleSpec(random_ket(d, rng), c.eigenket(k)), c);
        EXPECT_NEAR(dist.table()[k], 1.0, 1e-12);
    }
}

TEST(AblSingle, OrthogonalEnsembleIsEmpty) {
    EXPECT_EQ(kind_of([] { abl_single(EnsembleSpec(Ket::basis(2, 0), Ket::basis(2, 1)), sigma_z()); }),
              ErrorKind::EmptyEnsemble);
}

TEST(AblSingle, DimensionMismatch) {
    EXPECT_EQ(kind_of([] { abl_single(three_box_ensemble(), sigma_z()); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { EnsembleSpec(box(0), Ket::basis(2, 0)); }), ErrorKind::DimensionMismatch);
}

TEST(AblSequence, ThreeBoxXQ) {
    const auto d = abl_sequence(three_box_ensemble(), {observable_x(), observable_q()});
    expect_table_near(d.table(), kXQ, 1e-12);
    EXPECT_NEAR(d.probability({0, 0}), kSixth, 1e-12);
    EXPECT_NEAR(d.probability({0, 2}), kSixth, 1e-12);
    EXPECT_NEAR(d.probability({1, 1}), kTwoThirds, 1e-12);
}

TEST(AblSequence, ThreeBoxXQXHasTheX1ToX3Path) {
    const auto d = abl_sequence(three_box_ensemble(), {observable_x(), observable_q(), observable_x()});
    ASSERT_EQ(d.size(), 27u);
    for (std::size_t flat = 0; flat < 27; ++flat) {
        const auto t = d.tuple_at(flat);
        double expected = 0;
        if (t == std::vector<std::size_t>{0, 0, 2} || t == std::vector<std::size_t>{0, 2, 2}) expected = kSixth;
        if (t == std::vector<std::size_t>{1, 1, 1}) expected = kTwoThirds;
        EXPECT_NEAR(d.table()[flat], expected, 1e-12) << flat;
    }
}

TEST(AblSequence, SingletonEqualsSingleExactly) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 5;
        const EnsembleSpec e(random_ket(d, rng), random_ket(d, rng));
        const Observable c = random_observable("c", d, rng);
        const auto single = abl_single(e, c);
        const auto seq = abl_sequence(e, {c});
        ASSERT_EQ(seq.size(), single.size());
        for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(seq.table()[k], single.table()[k]);
    }
}

TEST(AblSequence, Errors) {
    EXPECT_EQ(kind_of([] { abl_sequence(three_box_ensemble(), std::span<const Observable>{}); }),
              ErrorKind::InvalidArgument);
    const std::vector<Observable> seven(7, observable_x());
    EXPECT_EQ(kind_of([&] { abl_sequence(three_box_ensemble(), seven); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { abl_sequence(three_box_ensemble(), {observable_x(), sigma_z()}); }),
              ErrorKind::DimensionMismatch);
}

TEST(AblSequence, SixStagesIsAllowed) {
    const std::vector<Observable> six = {observable_x(), observable_q(), observable_x(),
                                         observable_q(), observable_x(), observable_q()};
    const auto d = abl_sequence(three_box_ensemble(), six);
    EXPECT_EQ(d.size(), 729u);
    EXPECT_NEAR(std::accumulate(d.table().begin(), d.table().end(), 0.0), 1.0, 1e-12);
}

TEST(Marginal, Examples) {
    const auto xq = abl_sequence(three_box_ensemble(), {observable_x(), observable_q()});
    EXPECT_NEAR(marginal(xq, 0, 1), kTwoThirds, 1e-12);
    EXPECT_NEAR(marginal(xq, 0, 0), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(marginal(abl_single(three_box_ensemble(), observable_x()), 0, 1), 1.0, 1e-12);
}

TEST(Marginal, IndexOutOfRange) {
    const auto d = abl_single(three_box_ensemble(), observable_x());
    EXPECT_EQ(kind_of([&] { marginal(d, 1, 0); }), ErrorKind::IndexOutOfRange);
    EXPECT_EQ(kind_of([&] { marginal(d, 0, 3); }), ErrorKind::IndexOutOfRange);
}

TEST(ElementOfReality, Examples) {
    const std::vector<Observable> x = {observable_x()};
    EXPECT_TRUE(element_of_reality(three_box_ensemble(), x, 0, 1, 1e-9));
    const std::vector<Observable> xq = {observable_x(), observable_q()};
    EXPECT_FALSE(element_of_reality(three_box_ensemble(), xq, 0, 1, 1e-9));
    const std::vector<Observable> a = {observable_a()};
    EXPECT_TRUE(element_of_reality(three_box_ensemble(), a, 0, 0, 1e-9));
    const std::vector<Observable> b = {observable_b()};
    EXPECT_TRUE(element_of_reality(three_box_ensemble(), b, 0, 0, 1e-9));
}

TEST(ElementOfReality, PropagatesEmptyEnsemble) {
    const std::vector<Observable> z = {sigma_z()};
    EXPECT_EQ(kind_of([&] { element_of_reality(EnsembleSpec(Ket::basis(2, 0), Ket::basis(2, 1)), z, 0, 0); }),
              ErrorKind::EmptyEnsemble);
}

TEST(EnsembleRates, Examples) {
    const auto none = ensemble_rates(three_box_ensemble());
    EXPECT_NEAR(none.rw_rate, 0.25, 1e-12);
    EXPECT_NEAR(none.cfw_rate, 0.25, 1e-12);
    EXPECT_NEAR(ensemble_rates(three_box_ensemble(), observable_q()).cfw_rate, 0.375, 1e-12);
    const auto qubit = ensemble_rates(EnsembleSpec(Ket::basis(2, 0), Ket::basis(2, 1)), sigma_x());
    EXPECT_NEAR(qubit.rw_rate, 0.0, 1e-12);
    EXPECT_NEAR(qubit.cfw_rate, 0.5, 1e-12);
}

TEST(EnsembleRates, CfwRateIsTheAblDenominator) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const EnsembleSpec e(random_ket(d, rng), random_ket(d, rng));
        const Observable c = random_observable("c", d, rng);
        EXPECT_EQ(ensemble_rates(e, c).cfw_rate, abl_single(e, c).postselection_weight());
        EXPECT_NEAR(ensemble_rates(e, c).cfw_rate, projector_chain_weight_sum(e.pre, e.post, c), 1e-12);
    }
}

// --- Properties ---------------------------------------------------------------

TEST(AblProperties, DistributionsSumToOneAndMatchProjectorOracle) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t d = 2 + trial % 3;
        const std::size_t stages = 1 + trial % 3;
        const EnsembleSpec e(random_ket(d, rng), random_ket(d, rng));
        std::vector<Observable> cs;
        for (std::size_t s = 0; s < stages; ++s) cs.push_back(random_observable("c", d, rng));
        const auto dist = abl_sequence(e, cs);
        EXPECT_NEAR(std::accumulate(dist.table().begin(), dist.table().end(), 0.0), 1.0, 1e-12);
        EXPECT_TRUE(std::all_of(dist.table().begin(), dist.table().end(), [](double p) { return p >= 0; }));
        expect_table_near(dist.table(), projector_chain_oracle(e.pre, e.post, cs), 1e-12);
    }
}

TEST(AblProperties, GlobalPhaseInvariance) {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> angle(0, 6.283185307179586);
    const auto rotate = [&](const Ket &k) {
        const Amplitude ph = std::polar(1.0, angle(rng));
        std::vector<Amplitude> v(k.amplitudes().begin(), k.amplitudes().end());
        for (auto &z : v) z *= ph;
        return Ket::from_unit(v);
    };
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const Ket a = random_ket(d, rng), b = random_ket(d, rng);
        const Observable c = random_observable("c", d, rng);
        std::vector<Ket> phased;
        for (const auto &k : c.eigenkets()) phased.push_back(rotate(k));
        const Observable cp = make_observable("c", c.eigenvalues(), phased);
        const auto ref = abl_single(EnsembleSpec(a, b), c);
        const auto rot = abl_single(EnsembleSpec(rotate(a), rotate(b)), cp);
        expect_table_near(rot.table(), std::vector<double>(ref.table().begin(), ref.table().end()), 1e-12);
    }
}

TEST(AblProperties, PermutingEigenketsPermutesDistribution) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const EnsembleSpec e(random_ket(d, rng), random_ket(d, rng));
        const Observable c = random_observable("c", d, rng);
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Ket> kets;
        for (auto i : perm) kets.push_back(c.eigenket(i));
        const auto ref = abl_single(e, c);
        const auto permuted = abl_single(e, make_observable("p", c.eigenvalues(), kets));
        for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(permuted.table()[k], ref.table()[perm[k]], 1e-12);
    }
}

TEST(AblProperties, RepeatedMeasurementIsIdempotent) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const EnsembleSpec e(random_ket(d, rng), random_ket(d, rng));
        const Observable c = random_observable("c", d, rng);
        const auto twice = abl_sequence(e, {c, c});
        const auto once = abl_single(e, c);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (i != j) {
                    EXPECT_NEAR(twice.probability({i, j}), 0.0, 1e-12);
                }
            }
            EXPECT_NEAR(marginal(twice, 0, i), once.table()[i], 1e-12);
        }
    }
}

TEST(AblProperties, VanishingOverlapGivesExactlyZero) {
    // <a|x3> = 0 and <x1|b> = 0 are exact zeros in floating point.
    const auto d = abl_single(three_box_ensemble(), observable_x());
    EXPECT_EQ(d.table()[0], 0.0);
    EXPECT_EQ(d.table()[2], 0.0);
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 3 + trial % 3;
        const Observable c = computational_observable("c", dim);
        std::vector<Amplitude> pre = random_vector(dim, rng);
        pre[trial % dim] = 0.0;
        const auto dist = abl_single(EnsembleSpec(normalize(pre), random_ket(dim, rng)), c);
        EXPECT_EQ(dist.table()[trial % dim], 0.0);
    }
}
