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
/**
 * @file
 * Time grids, piecewise unitary schedules, and the built-in models: a
 * Stern-Gerlach spin measurement with two detectors, and a double slit whose
 * beams cross before reaching two detectors.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hilbert.hpp"

namespace chist {

class TimeGrid {
  public:
    explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
        if (times_.size() < 2) {
            throw Error(ErrorKind::Validation, "a time grid needs at least two times");
        }
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!std::isfinite(times_[i])) {
                throw Error(ErrorKind::NonFinite, "time grid entries must be finite");
            }
            if (i > 0 && !(times_[i] > times_[i - 1])) {
                throw Error(ErrorKind::Validation, "time grid must be strictly increasing");
            }
        }
    }

    /// Grid 0, 1, ..., intervals.
    static TimeGrid uniform(std::size_t intervals) {
        std::vector<double> t(intervals + 1);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = static_cast<double>(i);
        }
        return TimeGrid(std::move(t));
    }

    [[nodiscard]] const std::vector<double> &times() const noexcept { return times_; }
    [[nodiscard]] std::size_t intervals() const noexcept { return times_.size() - 1; }

    bool operator==(const TimeGrid &) const = default;

  private:
    std::vector<double> times_;
};

/// One unitary per grid interval; step(k) carries t_k to t_{k+1}.
class UnitarySchedule {
  public:
    UnitarySchedule(HilbertSpace space, TimeGrid grid, std::vector<ComplexMatrix> steps, Tolerance tol = {})
        : space_(std::move(space)), grid_(std::move(grid)), steps_(std::move(steps)) {
        if (steps_.size() != grid_.intervals()) {
            throw Error(ErrorKind::Validation, "schedule has " + std::to_string(steps_.size()) +
                                                   " step unitaries for " + std::to_string(grid_.intervals()) +
                                                   " intervals");
        }
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            if (!steps_[k].is_square() || steps_[k].rows() != space_.total_dim()) {
                throw Error(ErrorKind::Dimension,
                            "step unitary for interval t" + std::to_string(k) + "->t" + std::to_string(k + 1) +
                                " does not match the space dimension");
            }
            if (!is_unitary(steps_[k], tol)) {
                throw Error(ErrorKind::NotUnitary, "step for interval t" + std::to_string(k) + "->t" +
                                                       std::to_string(k + 1) + " is not unitary");
            }
        }
    }

    [[nodiscard]] const HilbertSpace &space() const noexcept { return space_; }
    [[nodiscard]] const TimeGrid &grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<ComplexMatrix> &steps() const noexcept { return steps_; }
    [[nodiscard]] const ComplexMatrix &step(std::size_t k) const { return steps_.at(k); }
    /// Index of the last time on the grid.
    [[nodiscard]] std::size_t last_time() const noexcept { return steps_.size(); }

    /// U(t_from -> t_to).
    [[nodiscard]] ComplexMatrix propagator(std::size_t from, std::size_t to) const {
        check_range(from, to);
        ComplexMatrix u = ComplexMatrix::identity(space_.total_dim());
        for (std::size_t k = from; k < to; ++k) {
            u = steps_[k] * u;
        }
        return u;
    }

    void check_range(std::size_t from, std::size_t to) const {
        if (from > to || to > last_time()) {
            throw Error(ErrorKind::Index, "time indices " + std::to_string(from) + "->" + std::to_string(to) +
                                              " out of range for a grid with " + std::to_string(last_time()) +
                                              " intervals");
        }
    }

  private:
    HilbertSpace space_;
    TimeGrid grid_;
    std::vector<ComplexMatrix> steps_;
};

inline ComplexVector evolve(const ComplexVector &state, const UnitarySchedule &schedule, std::size_t from,
                            std::size_t to) {
    schedule.check_range(from, to);
    if (state.dim() != schedule.space().total_dim()) {
        throw Error(ErrorKind::Dimension, "state dimension does not match the schedule's space");
    }
    ComplexVector psi = state;
    for (std::size_t k = from; k < to; ++k) {
        psi = schedule.step(k) * psi;
    }
    return psi;
}

using PartialMap = std::vector<std::pair<ComplexVector, ComplexVector>>;

namespace detail {

// Gram-Schmidt of the canonical basis against `spanned`, in index order.
inline std::vector<ComplexVector> orthonormal_complement(const std::vector<ComplexVector> &spanned, std::size_t dim) {
    std::vector<ComplexVector> basis = spanned;
    std::vector<ComplexVector> out;
    for (std::size_t i = 0; i < dim && basis.size() < dim; ++i) {
        ComplexVector v = ComplexVector::basis(dim, i);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : basis) {
                v -= inner(b, v) * b;
            }
        }
        const double n = v.norm();
        if (n > 1e-6) {
            v *= 1.0 / n;
            basis.push_back(v);
            out.push_back(std::move(v));
        }
    }
    return out;
}

inline void require_orthonormal(const std::vector<ComplexVector> &vs, Tolerance tol, const char *what) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i; j < vs.size(); ++j) {
            const Complex expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(inner(vs[i], vs[j]) - expected) > tol.eps) {
                throw Error(ErrorKind::Orthonormality, std::string("unitary completion: ") + what +
                                                           " vectors are not orthonormal (pair " +
                                                           std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

} // namespace detail

/**
 * Extends the isometry u_i -> v_i to a unitary on the whole space. The
 * complements of span{u} and span{v} are each built by Gram-Schmidt over the
 * canonical basis in index order and paired in that order, so the result
 * is reproducible bit for bit.
 */
inline ComplexMatrix unitary_completion(const PartialMap &map, const HilbertSpace &space, Tolerance tol = {}) {
    const std::size_t dim = space.total_dim();
    std::vector<ComplexVector> in;
    std::vector<ComplexVector> out;
    for (const auto &[u, v] : map) {
        if (u.dim() != dim || v.dim() != dim) {
            throw Error(ErrorKind::Dimension, "unitary completion: vector dimension does not match the space");
        }
        in.push_back(u);
        out.push_back(v);
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
        for (std::size_t j = i; j < in.size(); ++j) {
            if (std::abs(inner(in[i], in[j]) - inner(out[i], out[j])) > tol.eps) {
                throw Error(ErrorKind::Orthonormality,
                            "unitary completion: inner products of inputs and outputs disagree (pair " +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
    detail::require_orthonormal(in, tol, "input");
    detail::require_orthonormal(out, tol, "output");

    const auto in_rest = detail::orthonormal_complement(in, dim);
    const auto out_rest = detail::orthonormal_complement(out, dim);
    ComplexMatrix u(dim, dim);
    for (std::size_t k = 0; k < in.size(); ++k) {
        u += outer(out[k], in[k]);
    }
    for (std::size_t k = 0; k < in_rest.size(); ++k) {
        u += outer(out_rest[k], in_rest[k]);
    }
    return u;
}

/// Space, dynamics, initial state and named projectors of a built-in model.
struct Model {
    std::string name;
    UnitarySchedule schedule;
    ComplexVector initial_state;
    std::map<std::string, Projector> projectors;

    [[nodiscard]] const HilbertSpace &space() const noexcept { return schedule.space(); }
    [[nodiscard]] const Projector &projector(const std::string &label) const {
        auto it = projectors.find(label);
        if (it == projectors.end()) {
            throw Error(ErrorKind::Validation, "model '" + name + "' has no projector '" + label + "'");
        }
        return it->second;
    }
};

struct SternGerlachModel : Model {
    Complex alpha;
    Complex beta;
    std::array<ComplexVector, 4> states; // Psi_0 .. Psi_3
};

namespace stern_gerlach {
inline const Subsystem kParticle{"particle", {"w0", "w1", "w2a", "w2b", "abs"}};
inline const Subsystem kSpin{"spin", {"z+", "z-"}};
inline const Subsystem kDetectorA{"Da", {"ready", "trig"}};
inline const Subsystem kDetectorB{"Db", {"ready", "trig"}};
} // namespace stern_gerlach

/**
 * Particle (5 position modes) x spin x detector a x detector b, dim 40.
 *
 *  t0 -> t1: w0 -> w1, everything else untouched.
 *  t1 -> t2: (w1, z+) -> (w2a, z+), (w1, z-) -> (w2b, z-).
 *  t2 -> t3: (w2a, z+, ready, ready) -> (abs, z+, trig, ready),
 *            (w2b, z-, ready, ready) -> (abs, z-, ready, trig).
 *
 * Each step is the unitary completion of the listed transitions. After
 * absorption the particle sits in `abs` with its spin kept, so the space
 * stays fixed across all times.
 */
inline SternGerlachModel build_stern_gerlach(Complex alpha, Complex beta, Tolerance tol = {}) {
    namespace sg = stern_gerlach;
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol.eps) {
        throw Error(ErrorKind::Normalization, "Stern-Gerlach amplitudes need |alpha|^2 + |beta|^2 = 1");
    }
    const HilbertSpace space = make_space({sg::kParticle, sg::kSpin, sg::kDetectorA, sg::kDetectorB});
    auto ket = [&](const char *p, const char *s, const char *a, const char *b) {
        return space.basis_ket({p, s, a, b});
    };
    const std::array<const char *, 2> spins{"z+", "z-"};
    const std::array<const char *, 2> det{"ready", "trig"};

    PartialMap step0;
    for (auto s : spins) {
        for (auto a : det) {
            for (auto b : det) {
                step0.emplace_back(ket("w0", s, a, b), ket("w1", s, a, b));
            }
        }
    }
    PartialMap step1;
    for (auto a : det) {
        for (auto b : det) {
            step1.emplace_back(ket("w1", "z+", a, b), ket("w2a", "z+", a, b));
            step1.emplace_back(ket("w1", "z-", a, b), ket("w2b", "z-", a, b));
        }
    }
    PartialMap step2{
        {ket("w2a", "z+", "ready", "ready"), ket("abs", "z+", "trig", "ready")},
        {ket("w2b", "z-", "ready", "ready"), ket("abs", "z-", "ready", "trig")},
    };
    std::vector<ComplexMatrix> steps{unitary_completion(step0, space, tol), unitary_completion(step1, space, tol),
                                     unitary_completion(step2, space, tol)};
    UnitarySchedule schedule(space, TimeGrid::uniform(3), std::move(steps), tol);

    ComplexVector psi0 = alpha * ket("w0", "z+", "ready", "ready") + beta * ket("w0", "z-", "ready", "ready");

    std::map<std::string, Projector> named;
    auto add = [&](Projector p) {
        auto label = p.label();
        named.emplace(std::move(label), std::move(p));
    };
    std::array<ComplexVector, 4> states{psi0, psi0, psi0, psi0};
    for (std::size_t j = 0; j < 4; ++j) {
        states[j] = evolve(psi0, schedule, 0, j);
        add(ket_projector(states[j], space, "psi" + std::to_string(j)));
    }
    add(local_projector(space, "particle", {"w2a"}, "w2a"));
    add(local_projector(space, "particle", {"w2b"}, "w2b"));
    add(local_projector(space, "spin", {"z+"}, "z+"));
    add(local_projector(space, "spin", {"z-"}, "z-"));
    add(local_projector(space, "Da", {"trig"}, "Da*"));
    add(local_projector(space, "Da", {"ready"}, "Da"));
    add(local_projector(space, "Db", {"trig"}, "Db*"));
    add(local_projector(space, "Db", {"ready"}, "Db"));
    add(product_projector({named.at("Da*"), named.at("Db")}, "Da*_Db"));
    add(product_projector({named.at("Da"), named.at("Db*")}, "Da_Db*"));
    add(product_projector({named.at("Da*"), named.at("Db*")}, "Da*_Db*"));
    add(product_projector({named.at("Da"), named.at("Db")}, "Da_Db"));

    SternGerlachModel model{{"stern_gerlach", std::move(schedule), psi0, std::move(named)}, alpha, beta, states};
    return model;
}

struct CrossedBeamModel : Model {
    /// Reflection exchanging the slits, the crossing paths and the detectors.
    ComplexMatrix reflection;
};

namespace crossed_beam {
inline const Subsystem kPath{"path", {"source", "A", "B", "X_up", "X_down", "Ca_trig", "Cb_trig"}};
inline const Subsystem kDetectorA{"Ca", {"ready", "trig"}};
inline const Subsystem kDetectorB{"Cb", {"ready", "trig"}};

/// Reflection of a path label (slit A <-> slit B and so on).
inline std::string mirror(const std::string &mode) {
    static const std::map<std::string, std::string> swap{{"source", "source"}, {"A", "B"},
                                                         {"B", "A"},           {"X_up", "X_down"},
                                                         {"X_down", "X_up"},   {"Ca_trig", "Cb_trig"},
                                                         {"Cb_trig", "Ca_trig"}};
    return swap.at(mode);
}
} // namespace crossed_beam

/**
 * Double slit with bent beams crossing at X (7 path modes x C^a x C^b,
 * dim 28). Slit A lies above slit B; C^a sits on A's side.
 *
 *  t0 -> t1: source -> (A + B)/sqrt2.
 *  t1 -> t2: A -> X_down, B -> X_up (the beams cross; nothing acts at X).
 *  t2 -> t3: X_up reaches C^a: |X_up, a, b> <-> |Ca_trig, flip(a), b>;
 *            X_down reaches C^b: |X_down, a, b> <-> |Cb_trig, a, flip(b)>.
 *
 * All three steps are fully specified and invariant under the reflection.
 */
inline CrossedBeamModel build_crossed_beam(Tolerance tol = {}) {
    namespace cb = crossed_beam;
    const HilbertSpace space = make_space({cb::kPath, cb::kDetectorA, cb::kDetectorB});
    const std::array<std::string, 2> det{"ready", "trig"};
    auto flip = [](const std::string &d) { return d == "ready" ? std::string("trig") : std::string("ready"); };
    auto ket = [&](const std::string &p, const std::string &a, const std::string &b) {
        return space.basis_ket({p, a, b});
    };
    const double r = 1.0 / std::sqrt(2.0);

    PartialMap step0;
    for (const auto &a : det) {
        for (const auto &b : det) {
            // Reflection-symmetric 3x3 block on {source, A, B}.
            step0.emplace_back(ket("source", a, b), r * ket("A", a, b) + r * ket("B", a, b));
            step0.emplace_back(ket("A", a, b),
                               r * ket("source", a, b) + 0.5 * ket("A", a, b) - 0.5 * ket("B", a, b));
            step0.emplace_back(ket("B", a, b),
                               r * ket("source", a, b) - 0.5 * ket("A", a, b) + 0.5 * ket("B", a, b));
        }
    }
    PartialMap step1;
    for (const auto &a : det) {
        for (const auto &b : det) {
            step1.emplace_back(ket("A", a, b), ket("X_down", a, b));
            step1.emplace_back(ket("B", a, b), ket("X_up", a, b));
            step1.emplace_back(ket("X_down", a, b), ket("A", a, b));
            step1.emplace_back(ket("X_up", a, b), ket("B", a, b));
        }
    }
    PartialMap step2;
    for (const auto &a : det) {
        for (const auto &b : det) {
            step2.emplace_back(ket("X_up", a, b), ket("Ca_trig", flip(a), b));
            step2.emplace_back(ket("Ca_trig", flip(a), b), ket("X_up", a, b));
            step2.emplace_back(ket("X_down", a, b), ket("Cb_trig", a, flip(b)));
            step2.emplace_back(ket("Cb_trig", a, flip(b)), ket("X_down", a, b));
        }
    }
    std::vector<ComplexMatrix> steps{unitary_completion(step0, space, tol), unitary_completion(step1, space, tol),
                                     unitary_completion(step2, space, tol)};
    UnitarySchedule schedule(space, TimeGrid::uniform(3), std::move(steps), tol);

    const std::size_t n = space.total_dim();
    ComplexMatrix reflection(n, n);
    for (const auto &p : cb::kPath.basis_labels) {
        for (const auto &a : det) {
            for (const auto &b : det) {
                reflection(space.basis_index({cb::mirror(p), b, a}), space.basis_index({p, a, b})) = 1.0;
            }
        }
    }

    std::map<std::string, Projector> named;
    auto add = [&](Projector p) {
        auto label = p.label();
        named.emplace(std::move(label), std::move(p));
    };
    for (const auto &mode : cb::kPath.basis_labels) {
        add(local_projector(space, "path", {mode}, mode));
    }
    add(local_projector(space, "Ca", {"trig"}, "Ca*"));
    add(local_projector(space, "Ca", {"ready"}, "Ca"));
    add(local_projector(space, "Cb", {"trig"}, "Cb*"));
    add(local_projector(space, "Cb", {"ready"}, "Cb"));
    add(product_projector({named.at("Ca*"), named.at("Cb")}, "Ca*_Cb"));
    add(product_projector({named.at("Ca"), named.at("Cb*")}, "Ca_Cb*"));
    add(product_projector({named.at("Ca*"), named.at("Cb*")}, "Ca*_Cb*"));
    add(product_projector({named.at("Ca"), named.at("Cb")}, "Ca_Cb"));

    ComplexVector psi0 = ket("source", "ready", "ready");
    return CrossedBeamModel{{"crossed_beam", std::move(schedule), std::move(psi0), std::move(named)},
                            std::move(reflection)};
}

/**
 * Path-only interferometer on {source, A, B, X_up, X_down}: after the slits
 * the two beams are recombined on a 50/50 splitter with no which-path record,
 * A -> (X_up + X_down)/sqrt2 and B -> (X_up - X_down)/sqrt2. A family with the
 * slit PDI at t1 and the output ports at t2 is inconsistent.
 */
inline Model build_recombining_interferometer(Tolerance tol = {}) {
    const HilbertSpace space = make_space({{"path", {"source", "A", "B", "X_up", "X_down"}}});
    auto ket = [&](const char *p) { return space.basis_ket({p}); };
    const double r = 1.0 / std::sqrt(2.0);
    PartialMap step0{
        {ket("source"), r * ket("A") + r * ket("B")},
        {ket("A"), r * ket("source") + 0.5 * ket("A") - 0.5 * ket("B")},
        {ket("B"), r * ket("source") - 0.5 * ket("A") + 0.5 * ket("B")},
    };
    PartialMap step1{
        {ket("A"), r * ket("X_up") + r * ket("X_down")},
        {ket("B"), r * ket("X_up") - r * ket("X_down")},
    };
    std::vector<ComplexMatrix> steps{unitary_completion(step0, space, tol), unitary_completion(step1, space, tol)};
    UnitarySchedule schedule(space, TimeGrid::uniform(2), std::move(steps), tol);

    std::map<std::string, Projector> named;
    for (const auto &mode : space.subsystems().front().basis_labels) {
        named.emplace(mode, local_projector(space, "path", {mode}, mode));
    }
    return Model{"interference", std::move(schedule), ket("source"), std::move(named)};
}

} // namespace chist
