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

#include "chist/frameworks.hpp"
#include "chist/model_families.hpp"
#include "test_support.hpp"

namespace chist {
namespace {

HilbertSpace spin_space() { return make_space({{"spin", {"z+", "z-"}}}); }

Pdi sz_pdi(const HilbertSpace &s) {
    return validate_pdi({local_projector(s, "spin", {"z+"}, "z+"), local_projector(s, "spin", {"z-"}, "z-")});
}

Pdi sx_pdi(const HilbertSpace &s) {
    const double r = 1.0 / std::sqrt(2.0);
    return validate_pdi({ket_projector(ComplexVector{r, r}, s, "x+"), ket_projector(ComplexVector{r, -r}, s, "x-")});
}

bool same_elements(const Pdi &a, const Pdi &b, double tol) {
    if (a.size() != b.size()) return false;
    for (const auto &p : a.projectors()) {
        bool found = false;
        for (const auto &q : b.projectors()) {
            found = found || max_abs_diff(p.matrix(), q.matrix()) <= tol;
        }
        if (!found) return false;
    }
    return true;
}

TEST(PdisCompatible, SpinZAgainstSpinX) {
    auto s = spin_space();
    auto r = pdis_compatible(sz_pdi(s), sx_pdi(s));
    EXPECT_FALSE(r.compatible);
    EXPECT_NEAR(r.worst_commutator, 0.5, 1e-12);
    ASSERT_TRUE(r.offending_pair.has_value());
    EXPECT_EQ(r.offending_pair->first, "z+");
    EXPECT_EQ(r.offending_pair->second, "x+");
}

TEST(PdisCompatible, SpaceMismatch) {
    auto s = spin_space();
    auto q = testing::qudit_space(2);
    try {
        pdis_compatible(sz_pdi(s), validate_pdi({identity_projector(q)}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Space);
    }
}

TEST(CommonRefinement, IncompatibleRaises) {
    auto s = spin_space();
    try {
        common_refinement(sz_pdi(s), sx_pdi(s));
        FAIL();
    } catch (const IncompatibilityError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Incompatible);
        EXPECT_NEAR(e.report().worst_commutator, 0.5, 1e-12);
        EXPECT_NE(std::string(e.what()).find("'z+' and 'x+'"), std::string::npos);
    }
}

TEST(CommonRefinement, WithTrivialFramework) {
    auto s = spin_space();
    auto r = common_refinement(sz_pdi(s), validate_pdi({identity_projector(s)}));
    EXPECT_EQ(r.labels(), (std::vector<std::string>{"z+", "z-"}));
    EXPECT_TRUE(same_elements(r, sz_pdi(s), 0.0));
}

TEST(CommonRefinement, IndependentSubsystems) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto spin = validate_pdi({sg.projector("z+"), sg.projector("z-")});
    auto det = validate_pdi({sg.projector("Da*"), sg.projector("Da")});
    auto r = common_refinement(spin, det);
    EXPECT_EQ(r.labels(), (std::vector<std::string>{"z+&Da*", "z+&Da", "z-&Da*", "z-&Da"}));
    for (const auto &p : r.projectors()) EXPECT_EQ(p.rank(), 10u);
}

TEST(CommonRefinement, SymmetricAndIdempotent) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto a = complete_pdi({sg.projector("w2a"), sg.projector("w2b")}, "rest");
    auto b = validate_pdi({sg.projector("z+"), sg.projector("z-")});
    EXPECT_TRUE(same_elements(common_refinement(a, b), common_refinement(b, a), 1e-12));
    auto aa = common_refinement(a, a);
    EXPECT_TRUE(same_elements(aa, a, 1e-12));
    EXPECT_EQ(aa.labels(), a.labels());
}

TEST(CommonRefinement, DropsEmptyProducts) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    // w2a and w2b are orthogonal so their product vanishes.
    auto a = implicit_pdi(sg.projector("w2a"));
    auto b = implicit_pdi(sg.projector("w2b"));
    auto r = common_refinement(a, b);
    EXPECT_EQ(r.labels(), (std::vector<std::string>{"w2a", "w2b", "I-w2a&I-w2b"}));
}

TEST(CommonRefinement, RandomCommutingPdisRefineToValidPdi) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial) % 5;
        auto space = testing::qudit_space(n);
        auto basis = testing::random_orthonormal(n, n, rng);
        // Two coarse-grainings of one basis always commute.
        auto group = [&](std::size_t split) {
            ComplexMatrix lo(n, n);
            ComplexMatrix hi(n, n);
            for (std::size_t i = 0; i < n; ++i) (i < split ? lo : hi) += outer(basis[i], basis[i]);
            return validate_pdi({Projector(space, lo, "lo"), Projector(space, hi, "hi")}, Tolerance(1e-9));
        };
        auto r = common_refinement(group(1), group(n - 1), Tolerance(1e-9));
        EXPECT_EQ(r.size(), 3u);
    }
}

TEST(FamiliesCompatible, SameFamily) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto f1 = stern_gerlach_detector_family(sg);
    auto r = families_compatible(f1, f1, sg.initial_state);
    EXPECT_TRUE(r.compatible);
    ASSERT_TRUE(r.merged.has_value());
    EXPECT_TRUE(r.merged->consistent);
    EXPECT_LE(r.worst_commutator, 1e-12);
}

TEST(FamiliesCompatible, UnitaryFamilyAgainstDetectors) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto r = families_compatible(stern_gerlach_unitary_family(sg), stern_gerlach_detector_family(sg),
                                 sg.initial_state);
    EXPECT_FALSE(r.compatible);
    ASSERT_TRUE(r.time.has_value());
    EXPECT_EQ(*r.time, 3u);
    EXPECT_GT(r.worst_commutator, 0.1);
    EXPECT_FALSE(r.merged.has_value());
}

TEST(FamiliesCompatible, PathFamilyAgainstSpinFamily) {
    // [Psi_1] against [z+] at t1: max |[P, Q]| = |alpha beta| = 0.48.
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto r = families_compatible(stern_gerlach_path_family(sg), stern_gerlach_spin_family(sg), sg.initial_state);
    EXPECT_FALSE(r.compatible);
    ASSERT_TRUE(r.time.has_value());
    EXPECT_EQ(*r.time, 1u);
    EXPECT_NEAR(r.worst_commutator, 0.48, 1e-12);
    EXPECT_EQ(r.offending_pair->first, "psi1");
    EXPECT_EQ(r.offending_pair->second, "z+");
    EXPECT_THROW(merge_families(stern_gerlach_path_family(sg), stern_gerlach_spin_family(sg), sg.initial_state),
                 IncompatibilityError);
}

TEST(FamiliesCompatible, SpinWithBeamAtIntermediateTime) {
    auto sg = build_stern_gerlach(0.6, 0.8);
    auto init = ket_projector(sg.initial_state, sg.space(), "psi0");
    HistoryFamily beams("beams", sg.schedule, init,
                        {{2, complete_pdi({sg.projector("w2a"), sg.projector("w2b")}, "I-w2a-w2b")}});
    auto f3 = stern_gerlach_spin_family(sg);
    auto r = families_compatible(f3, beams, sg.initial_state);
    EXPECT_TRUE(r.compatible);
    ASSERT_TRUE(r.merged.has_value());
    EXPECT_TRUE(r.merged->consistent);
    auto joint = merge_families(f3, beams, sg.initial_state);
    auto t = assign_probabilities(prune_zero(joint, sg.initial_state), sg.initial_state);
    // Pruning is per projector: every surviving element appears at its time.
    EXPECT_EQ(t.rows.size(), 8u);
    EXPECT_NEAR(*t.find("(z+, w2a, Da*_Db)"), 0.36, 1e-12);
    EXPECT_NEAR(*t.find("(z+, w2b, Da*_Db)"), 0.0, 1e-12);
    EXPECT_NEAR(*t.find("(z-, w2b, Da_Db*)"), 0.64, 1e-12);
}

TEST(FamiliesCompatible, CommutingButInconsistentMerge) {
    // Slits at t1 and output ports at t2 each alone are fine; merged they interfere.
    auto m = build_recombining_interferometer();
    auto init = ket_projector(m.initial_state, m.space(), "psi0");
    HistoryFamily slits("slits", m.schedule, init, {{1, complete_pdi({m.projector("A"), m.projector("B")}, "I-A-B")}});
    HistoryFamily ports("ports", m.schedule, init,
                        {{2, complete_pdi({m.projector("X_up"), m.projector("X_down")}, "I-X")}});
    EXPECT_TRUE(check_consistency(slits, m.initial_state).consistent);
    EXPECT_TRUE(check_consistency(ports, m.initial_state).consistent);
    auto r = families_compatible(slits, ports, m.initial_state);
    EXPECT_FALSE(r.compatible);
    EXPECT_FALSE(r.offending_pair.has_value());
    ASSERT_TRUE(r.merged.has_value());
    EXPECT_NEAR(r.merged->worst_off_diagonal, 0.25, 1e-12);
    try {
        merge_families(slits, ports, m.initial_state);
        FAIL();
    } catch (const IncompatibilityError &e) {
        EXPECT_EQ(e.report(), r);
    }
}

TEST(FamiliesCompatible, DifferentSettingsRejected) {
    auto a = build_stern_gerlach(0.6, 0.8);
    auto b = build_stern_gerlach(0.8, 0.6);
    try {
        families_compatible(stern_gerlach_detector_family(a), stern_gerlach_detector_family(b), a.initial_state);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
    }
}

} // namespace
} // namespace chist
