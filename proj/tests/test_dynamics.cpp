// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chist/dynamics.hpp"
#include "test_support.hpp"

namespace chist {
namespace {

double expectation(const ComplexVector &psi, const Projector &p) { return inner(psi, p.matrix() * psi).real(); }

TEST(TimeGrid, Validation) {
    EXPECT_THROW(TimeGrid({0.0}), Error);
    EXPECT_THROW(TimeGrid({0.0, 0.0}), Error);
    EXPECT_THROW(TimeGrid({1.0, 0.5}), Error);
    EXPECT_EQ(TimeGrid::uniform(3).times(), (std::vector<double>{0, 1, 2, 3}));
}

TEST(UnitarySchedule, RejectsNonUnitaryStepNamingInterval) {
    auto space = testing::qudit_space(2);
    try {
        UnitarySchedule(space, TimeGrid::uniform(2),
                        {ComplexMatrix::identity(2), ComplexMatrix::diagonal({1.0, 2.0})});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
        EXPECT_NE(std::string(e.what()).find("t1->t2"), std::string::npos);
    }
    EXPECT_THROW(UnitarySchedule(space, TimeGrid::uniform(2), {ComplexMatrix::identity(2)}), Error);
}

TEST(UnitaryCompletion, EmptyMapIsIdentity) {
    EXPECT_EQ(unitary_completion({}, testing::qudit_space(2)), ComplexMatrix::identity(2));
}

TEST(UnitaryCompletion, Swap) {
    PartialMap m{{ComplexVector{1.0, 0.0}, ComplexVector{0.0, 1.0}}, {ComplexVector{0.0, 1.0}, ComplexVector{1.0, 0.0}}};
    EXPECT_EQ(unitary_completion(m, testing::qudit_space(2)), (ComplexMatrix{{0, 1}, {1, 0}}));
}

TEST(UnitaryCompletion, Errors) {
    auto space = testing::qudit_space(2);
    PartialMap non_orthonormal{{ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}},
                               {ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}}};
    EXPECT_THROW(unitary_completion(non_orthonormal, space), Error);
    PartialMap inconsistent{{ComplexVector{1.0, 0.0}, ComplexVector{1.0, 0.0}},
                            {ComplexVector{0.0, 1.0}, ComplexVector{1.0, 0.0}}};
    try {
        unitary_completion(inconsistent, space);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Orthonormality);
    }
    PartialMap scaled{{ComplexVector{2.0, 0.0}, ComplexVector{2.0, 0.0}}};
    EXPECT_THROW(unitary_completion(scaled, space), Error);
}

TEST(UnitaryCompletion, RandomPartialMapsAreUnitaryAndAgree) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 7;
        auto space = testing::qudit_space(n);
        const std::size_t k = static_cast<std::size_t>(trial) % n;
        auto in = testing::random_orthonormal(n, k, rng);
        auto out = testing::random_orthonormal(n, k, rng);
        PartialMap map;
        for (std::size_t i = 0; i < k; ++i) map.emplace_back(in[i], out[i]);
        auto u = unitary_completion(map, space);
        EXPECT_TRUE(is_unitary(u, Tolerance(1e-10)));
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_LE((u * in[i] - out[i]).norm(), 1e-10);
        }
        EXPECT_EQ(u, unitary_completion(map, space)); // reproducible
    }
}

TEST(Evolve, EmptyEvolutionIsIdentity) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    std::mt19937_64 rng(4);
    auto psi = testing::random_state(40, rng);
    EXPECT_EQ(evolve(psi, sg.schedule, 2, 2), psi);
}

TEST(Evolve, Errors) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    EXPECT_THROW(evolve(sg.initial_state, sg.schedule, 2, 1), Error);
    EXPECT_THROW(evolve(sg.initial_state, sg.schedule, 0, 4), Error);
    EXPECT_THROW(evolve(ComplexVector(3), sg.schedule, 0, 1), Error);
}

TEST(Evolve, NormPreservedForRandomStates) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto cb = build_crossed_beam();
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = testing::random_state(40, rng);
        EXPECT_NEAR(evolve(a, sg.schedule, 0, 3).norm(), 1.0, 1e-10);
        auto b = testing::random_state(28, rng);
        EXPECT_NEAR(evolve(b, cb.schedule, 0, 3).norm(), 1.0, 1e-10);
    }
}

TEST(SternGerlach, SpinUpTriggersDetectorA) {
    auto sg = build_stern_gerlach(1.0, 0.0);
    auto psi3 = evolve(sg.initial_state, sg.schedule, 0, 3);
    auto target = sg.space().basis_ket({"abs", "z+", "trig", "ready"});
    EXPECT_NEAR(std::abs(inner(target, psi3)), 1.0, 1e-12);
    EXPECT_NEAR(expectation(psi3, sg.projector("Da*")), 1.0, 1e-12);
}

TEST(SternGerlach, SpinDownTriggersDetectorB) {
    auto sg = build_stern_gerlach(0.0, 1.0);
    EXPECT_NEAR(expectation(sg.states[3], sg.projector("Db*")), 1.0, 1e-12);
}

TEST(SternGerlach, BornProbabilitiesFromFinalState) {
    // |alpha|^2 = 0.36, |beta|^2 = 0.64.
    auto sg = build_stern_gerlach(0.6, 0.8);
    EXPECT_NEAR(expectation(sg.states[3], sg.projector("Da*")), 0.36, 1e-12);
    EXPECT_NEAR(expectation(sg.states[3], sg.projector("Db*")), 0.64, 1e-12);
    EXPECT_NEAR(expectation(sg.states[3], sg.projector("Da*_Db*")), 0.0, 1e-12);
}

TEST(SternGerlach, StatesMatchDenseOracle) {
    const Complex alpha{0.36, 0.48};
    const Complex beta{0.0, 0.8};
    auto sg = build_stern_gerlach(alpha, beta);
    const auto &s = sg.space();
    // Independent: apply the raw step matrices by hand.
    auto v = testing::raw(sg.initial_state);
    for (std::size_t k = 0; k < 3; ++k) {
        v = testing::raw_apply(testing::raw(sg.schedule.step(k)), v);
    }
    ComplexVector expected3 = alpha * s.basis_ket({"abs", "z+", "trig", "ready"}) +
                              beta * s.basis_ket({"abs", "z-", "ready", "trig"});
    for (std::size_t i = 0; i < 40; ++i) {
        EXPECT_NEAR(std::abs(v[i] - expected3[i]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(sg.states[3][i] - expected3[i]), 0.0, 1e-12);
    }
    ComplexVector expected2 = alpha * s.basis_ket({"w2a", "z+", "ready", "ready"}) +
                              beta * s.basis_ket({"w2b", "z-", "ready", "ready"});
    EXPECT_NEAR(std::abs(inner(expected2, sg.states[2])), 1.0, 1e-12);
    ComplexVector expected1 = alpha * s.basis_ket({"w1", "z+", "ready", "ready"}) +
                              beta * s.basis_ket({"w1", "z-", "ready", "ready"});
    EXPECT_NEAR(std::abs(inner(expected1, sg.states[1])), 1.0, 1e-12);
}

TEST(SternGerlach, StepTransitions) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    const auto &s = sg.space();
    for (const char *spin : {"z+", "z-"}) {
        for (const char *a : {"ready", "trig"}) {
            EXPECT_EQ(sg.schedule.step(0) * s.basis_ket({"w0", spin, a, "ready"}), s.basis_ket({"w1", spin, a, "ready"}));
        }
    }
    EXPECT_EQ(sg.schedule.step(1) * s.basis_ket({"w1", "z+", "ready", "ready"}),
              s.basis_ket({"w2a", "z+", "ready", "ready"}));
    EXPECT_EQ(sg.schedule.step(1) * s.basis_ket({"w1", "z-", "ready", "trig"}),
              s.basis_ket({"w2b", "z-", "ready", "trig"}));
    EXPECT_EQ(sg.schedule.step(2) * s.basis_ket({"w2b", "z-", "ready", "ready"}),
              s.basis_ket({"abs", "z-", "ready", "trig"}));
}

TEST(SternGerlach, FinalStateDoesNotCommuteWithDetectors) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    const auto &psi3 = sg.projector("psi3").matrix();
    for (const char *d : {"Da*", "Da", "Db*", "Db"}) {
        EXPECT_GT(commutator(psi3, sg.projector(d).matrix()).max_norm(), 0.1) << d;
    }
}

TEST(SternGerlach, RejectsUnnormalizedAmplitudes) {
    try {
        build_stern_gerlach(0.6, 0.6);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Normalization);
    }
}

TEST(CrossedBeam, SlitBReachesDetectorA) {
    auto cb = build_crossed_beam();
    auto in = cb.space().basis_ket({"B", "ready", "ready"});
    auto out = evolve(in, cb.schedule, 1, 3);
    EXPECT_NEAR(expectation(out, cb.projector("Ca*")), 1.0, 1e-12);
    EXPECT_NEAR(expectation(out, cb.projector("Cb*")), 0.0, 1e-12);
}

TEST(CrossedBeam, SlitAReachesDetectorB) {
    auto cb = build_crossed_beam();
    auto out = evolve(cb.space().basis_ket({"A", "ready", "ready"}), cb.schedule, 1, 3);
    EXPECT_NEAR(expectation(out, cb.projector("Cb*")), 1.0, 1e-12);
}

TEST(CrossedBeam, SymmetricSuperpositionSplitsEvenly) {
    auto cb = build_crossed_beam();
    const double r = 1.0 / std::sqrt(2.0);
    auto in = r * cb.space().basis_ket({"A", "ready", "ready"}) + r * cb.space().basis_ket({"B", "ready", "ready"});
    auto v = testing::raw(in);
    for (std::size_t k = 1; k < 3; ++k) v = testing::raw_apply(testing::raw(cb.schedule.step(k)), v);
    auto ca = testing::raw(cb.projector("Ca*").matrix());
    double p = 0.0;
    auto w = testing::raw_apply(ca, v);
    for (std::size_t i = 0; i < v.size(); ++i) p += (std::conj(v[i]) * w[i]).real();
    EXPECT_NEAR(p, 0.5, 1e-12);
    auto out = evolve(in, cb.schedule, 1, 3);
    EXPECT_NEAR(expectation(out, cb.projector("Cb*")), 0.5, 1e-12);
}

TEST(CrossedBeam, SourceSplitsOverSlits) {
    auto cb = build_crossed_beam();
    auto psi1 = evolve(cb.initial_state, cb.schedule, 0, 1);
    EXPECT_NEAR(expectation(psi1, cb.projector("A")), 0.5, 1e-12);
    EXPECT_NEAR(expectation(psi1, cb.projector("B")), 0.5, 1e-12);
}

TEST(CrossedBeam, ReflectionSymmetry) {
    auto cb = build_crossed_beam();
    EXPECT_TRUE(is_unitary(cb.reflection));
    EXPECT_EQ(cb.reflection * cb.reflection, ComplexMatrix::identity(28));
    for (const auto &u : cb.schedule.steps()) {
        EXPECT_LE(max_abs_diff(cb.reflection * u * adjoint(cb.reflection), u), 1e-10);
    }
    // The reflection actually exchanges the slits and detectors.
    EXPECT_LE(max_abs_diff(cb.reflection * cb.projector("A").matrix() * cb.reflection, cb.projector("B").matrix()),
              0.0);
    EXPECT_LE(max_abs_diff(cb.reflection * cb.projector("Ca*").matrix() * cb.reflection,
                           cb.projector("Cb*").matrix()),
              0.0);
}

TEST(Interferometer, RecombinesWithoutRecord) {
    auto m = build_recombining_interferometer();
    auto psi2 = evolve(m.initial_state, m.schedule, 0, 2);
    // (A + B)/sqrt2 -> X_up exactly: the X_down amplitudes cancel.
    EXPECT_NEAR(expectation(psi2, m.projector("X_up")), 1.0, 1e-12);
}

} // namespace
} // namespace chist
