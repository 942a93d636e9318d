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

#include "chist/hilbert.hpp"
#include "test_support.hpp"

namespace chist {
namespace {

const Subsystem kSpin{"spin", {"z+", "z-"}};

template <typename F>
ErrorKind kind_of(F &&f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an exception";
    return ErrorKind::Validation;
}

HilbertSpace spin_space() { return make_space({kSpin}); }

Projector z_plus() { return ket_projector(ComplexVector{1.0, 0.0}, spin_space(), "z+"); }
Projector z_minus() { return ket_projector(ComplexVector{0.0, 1.0}, spin_space(), "z-"); }
Projector x_plus() { return ket_projector(ComplexVector{1.0, 1.0}, spin_space(), "x+"); }

TEST(MakeSpace, Dimensions) {
    EXPECT_EQ(spin_space().total_dim(), 2u);
    auto sg = make_space({{"particle", {"w0", "w1", "w2a", "w2b", "abs"}},
                          kSpin,
                          {"Da", {"ready", "trig"}},
                          {"Db", {"ready", "trig"}}});
    EXPECT_EQ(sg.total_dim(), 40u);
}

TEST(MakeSpace, Errors) {
    EXPECT_EQ(kind_of([] { make_space({}); }), ErrorKind::Space);
    EXPECT_EQ(kind_of([] { make_space({kSpin, kSpin}); }), ErrorKind::Space);
    EXPECT_EQ(kind_of([] { make_space({{"a", {"x", "x"}}}); }), ErrorKind::Space);
    std::vector<std::string> labels(70);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
    EXPECT_EQ(kind_of([&] { make_space({{"a", labels}, {"b", labels}}); }), ErrorKind::Dimension);
}

TEST(MakeSpace, MixedRadixIndex) {
    auto s = make_space({{"a", {"0", "1", "2"}}, {"b", {"x", "y"}}});
    EXPECT_EQ(s.basis_index({"0", "x"}), 0u);
    EXPECT_EQ(s.basis_index({"0", "y"}), 1u);
    EXPECT_EQ(s.basis_index({"2", "y"}), 5u);
    EXPECT_EQ(s.digits(5), (std::vector<std::size_t>{2, 1}));
}

TEST(KetProjector, Examples) {
    EXPECT_EQ(z_plus().matrix(), ComplexMatrix::diagonal({1.0, 0.0}));
    // (e1 + e2)/sqrt2 outer product.
    ComplexMatrix xp{{0.5, 0.5}, {0.5, 0.5}};
    EXPECT_LE(max_abs_diff(x_plus().matrix(), xp), 1e-15);
    auto scaled = ket_projector(ComplexVector{2.0, 0.0}, spin_space(), "z+");
    EXPECT_EQ(scaled.matrix(), ComplexMatrix::diagonal({1.0, 0.0}));
    EXPECT_EQ(scaled.rank(), 1u);
}

TEST(KetProjector, ZeroVector) {
    EXPECT_EQ(kind_of([] { ket_projector(ComplexVector(2), spin_space(), "0"); }), ErrorKind::Normalization);
}

TEST(Projector, ValidatesOnConstruction) {
    EXPECT_EQ(kind_of([] { Projector(spin_space(), ComplexMatrix{{0, 1}, {0, 0}}, "bad"); }), ErrorKind::Projector);
    EXPECT_EQ(kind_of([] { Projector(spin_space(), ComplexMatrix::diagonal({0.9, 0.0}), "bad"); }),
              ErrorKind::Projector);
    EXPECT_EQ(identity_projector(spin_space()).rank(), 2u);
}

TEST(Embed, SpinIntoSpinDetector) {
    auto target = make_space({kSpin, {"Da", {"ready", "trig"}}});
    auto e = embed(z_plus(), target);
    EXPECT_EQ(e.matrix(), ComplexMatrix::diagonal({1.0, 1.0, 0.0, 0.0}));
}

TEST(Embed, ParticleIntoSternGerlachSpace) {
    auto particle = make_space({{"particle", {"w0", "w1", "w2a", "w2b", "abs"}}});
    auto full = make_space({particle.subsystems()[0], kSpin, {"Da", {"ready", "trig"}}, {"Db", {"ready", "trig"}}});
    auto w2a = local_projector(particle, "particle", {"w2a"}, "w2a");
    auto e = embed(w2a, full);
    auto expected = tensor_product(
        tensor_product(tensor_product(w2a.matrix(), ComplexMatrix::identity(2)), ComplexMatrix::identity(2)),
        ComplexMatrix::identity(2));
    EXPECT_EQ(e.matrix(), expected);
    EXPECT_EQ(e.rank(), 8u);
}

TEST(Embed, MiddleSubsystem) {
    auto full = make_space({{"a", {"0", "1", "2"}}, kSpin, {"c", {"u", "v"}}});
    auto e = embed(z_minus(), full);
    auto expected = tensor_product(tensor_product(ComplexMatrix::identity(3), z_minus().matrix()),
                                   ComplexMatrix::identity(2));
    EXPECT_EQ(e.matrix(), expected);
}

TEST(Embed, SameSpaceIsNoOp) { EXPECT_EQ(embed(x_plus(), spin_space()).matrix(), x_plus().matrix()); }

TEST(Embed, Errors) {
    auto other = make_space({{"Da", {"ready", "trig"}}});
    EXPECT_EQ(kind_of([&] { embed(z_plus(), other); }), ErrorKind::Space);
    auto ab = make_space({{"a", {"0", "1"}}, {"b", {"0", "1"}}});
    auto ba = make_space({{"b", {"0", "1"}}, {"a", {"0", "1"}}});
    auto p = identity_projector(ab);
    EXPECT_EQ(kind_of([&] { embed(p, ba); }), ErrorKind::Space);
}

TEST(Embed, Homomorphism) {
    std::mt19937_64 rng(17);
    auto small = make_space({{"b", {"0", "1", "2"}}});
    auto big = make_space({{"a", {"0", "1"}}, small.subsystems()[0], {"c", {"0", "1"}}});
    auto v = testing::random_orthonormal(3, 2, rng);
    // Commuting pair: span{v0, v1} and span{v0}.
    Projector p(small, outer(v[0], v[0]) + outer(v[1], v[1]), "P", Tolerance(1e-9));
    Projector q(small, outer(v[0], v[0]), "Q", Tolerance(1e-9));
    auto lhs = embed(p, big).matrix() * embed(q, big).matrix();
    auto pq = Projector(small, p.matrix() * q.matrix(), "PQ", Tolerance(1e-9));
    EXPECT_LE(max_abs_diff(lhs, embed(pq, big).matrix()), 1e-12);
}

TEST(ValidatePdi, SpinZ) {
    auto pdi = validate_pdi({z_plus(), z_minus()});
    EXPECT_EQ(pdi.size(), 2u);
    EXPECT_EQ(pdi.labels(), (std::vector<std::string>{"z+", "z-"}));
}

TEST(ValidatePdi, Failures) {
    EXPECT_EQ(kind_of([] { validate_pdi({z_plus(), x_plus()}); }), ErrorKind::Orthogonality);
    EXPECT_EQ(kind_of([] { validate_pdi({z_plus()}); }), ErrorKind::Completeness);
    auto zero = Projector(spin_space(), ComplexMatrix(2, 2), "0");
    EXPECT_EQ(kind_of([&] { validate_pdi({z_plus(), z_minus(), zero}); }), ErrorKind::ZeroProjector);
}

TEST(ValidatePdi, OrthogonalityMessageNamesPair) {
    try {
        validate_pdi({z_plus(), x_plus()});
        FAIL();
    } catch (const Error &e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("z+"), std::string::npos);
        EXPECT_NE(msg.find("x+"), std::string::npos);
    }
}

TEST(ValidatePdiMatrices, CompletenessCheckedFirst) {
    std::vector<std::pair<std::string, ComplexMatrix>> elems{{"a", ComplexMatrix::diagonal({0.9, 0.0})},
                                                             {"b", ComplexMatrix::diagonal({0.0, 0.9})}};
    EXPECT_EQ(kind_of([&] { validate_pdi_matrices(spin_space(), elems); }), ErrorKind::Completeness);
    elems = {{"a", ComplexMatrix::diagonal({1.0, 0.0})}, {"b", ComplexMatrix::diagonal({0.0, 1.0})}};
    EXPECT_EQ(validate_pdi_matrices(spin_space(), elems).size(), 2u);
}

TEST(CompletePdi, ImplicitFramework) {
    auto pdi = complete_pdi({z_plus()}, "I-z+");
    ASSERT_EQ(pdi.size(), 2u);
    EXPECT_EQ(pdi[1].label(), "I-z+");
    EXPECT_LE(max_abs_diff(pdi[1].matrix(), z_minus().matrix()), 1e-15);
    // Identity: nothing to add.
    EXPECT_EQ(complete_pdi({identity_projector(spin_space())}, "rest").size(), 1u);
    // Overlapping projectors are reported as such, not silently completed.
    EXPECT_EQ(kind_of([] { complete_pdi({z_plus(), x_plus()}, "rest"); }), ErrorKind::Orthogonality);
    auto q3 = testing::qudit_space(3);
    Projector e0(q3, ComplexMatrix::diagonal({1.0, 0.0, 0.0}), "e0");
    Projector half(q3, ComplexMatrix{{0, 0, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}}, "h");
    Projector skew(q3, ComplexMatrix{{0.5, 0.5, 0}, {0.5, 0.5, 0}, {0, 0, 0}}, "s");
    EXPECT_EQ(kind_of([&] { complete_pdi({half, skew}, "rest"); }), ErrorKind::Completeness);
    EXPECT_EQ(complete_pdi({e0, half}, "rest").size(), 3u);
}

TEST(PdiFromObservable, SpinZ) {
    Observable sz(spin_space(), ComplexMatrix::diagonal({0.5, -0.5}), "Sz");
    auto sp = pdi_from_observable(sz);
    EXPECT_EQ(sp.values, (std::vector<double>{0.5, -0.5}));
    EXPECT_LE(max_abs_diff(sp.pdi[0].matrix(), z_plus().matrix()), 1e-12);
    EXPECT_LE(max_abs_diff(sp.pdi[1].matrix(), z_minus().matrix()), 1e-12);
}

TEST(PdiFromObservable, DegenerateIdentity) {
    Observable id(spin_space(), ComplexMatrix::identity(2), "I");
    auto sp = pdi_from_observable(id);
    ASSERT_EQ(sp.values.size(), 1u);
    EXPECT_DOUBLE_EQ(sp.values[0], 1.0);
    EXPECT_EQ(sp.pdi[0].rank(), 2u);
}

TEST(PdiFromObservable, ClusteringNearDegenerate) {
    auto space = testing::qudit_space(3);
    Observable a(space, ComplexMatrix::diagonal({1.0, 1.0 + 1e-13, 2.0}), "A");
    auto sp = pdi_from_observable(a, Tolerance{}, 1e-9);
    ASSERT_EQ(sp.values.size(), 2u);
    EXPECT_NEAR(sp.values[0], 2.0, 1e-15);
    EXPECT_NEAR(sp.values[1], 1.0, 1e-12);
    EXPECT_EQ(sp.pdi[0].rank(), 1u);
    EXPECT_EQ(sp.pdi[1].rank(), 2u);
}

TEST(PdiFromObservable, Labels) {
    Observable sx(spin_space(), ComplexMatrix{{0, 0.5}, {0.5, 0}}, "Sx");
    auto sp = pdi_from_observable(sx, Tolerance{}, 1e-9, {"x+", "x-"});
    EXPECT_EQ(sp.pdi.labels(), (std::vector<std::string>{"x+", "x-"}));
    EXPECT_LE(max_abs_diff(sp.pdi[0].matrix(), x_plus().matrix()), 1e-12);
    EXPECT_THROW(pdi_from_observable(sx, Tolerance{}, 1e-9, {"only-one"}), Error);
}

TEST(PdiFromObservable, RejectsNonHermitian) {
    EXPECT_EQ(kind_of([] { Observable(spin_space(), ComplexMatrix{{0, 1}, {0, 0}}); }), ErrorKind::Symmetry);
}

class ObservableRoundTrip : public ::testing::TestWithParam<int> {};

TEST_P(ObservableRoundTrip, ReconstructsWithinTolerance) {
    std::mt19937_64 rng(500 + GetParam());
    const std::size_t n = 2 + static_cast<std::size_t>(GetParam()) % 9;
    auto space = testing::qudit_space(n);
    Observable a(space, testing::random_hermitian(n, rng));
    auto sp = pdi_from_observable(a);
    ComplexMatrix rebuilt(n, n);
    for (std::size_t j = 0; j < sp.values.size(); ++j) {
        rebuilt += sp.values[j] * sp.pdi[j].matrix();
    }
    EXPECT_LE(max_abs_diff(rebuilt, a.matrix()), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ObservableRoundTrip, ::testing::Range(0, 12));

TEST(Incompatibility, NoRoomForBothSpinProperties) {
    EXPECT_GE(commutator(x_plus().matrix(), z_plus().matrix()).max_norm(), 0.4);
}

} // namespace
} // namespace chist
