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
 * Labeled tensor-product Hilbert spaces, projectors, projective
 * decompositions of the identity (PDIs) and observables.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace chist {

struct Subsystem {
    std::string name;
    std::vector<std::string> basis_labels;

    [[nodiscard]] std::size_t dim() const noexcept { return basis_labels.size(); }

    /// Index of a basis label, or nullopt.
    [[nodiscard]] std::optional<std::size_t> find(const std::string &label) const {
        auto it = std::find(basis_labels.begin(), basis_labels.end(), label);
        if (it == basis_labels.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - basis_labels.begin());
    }

    bool operator==(const Subsystem &) const = default;
};

/// Ordered composite space. Basis index is the mixed-radix number whose
/// most significant digit is the first declared subsystem.
class HilbertSpace {
  public:
    HilbertSpace() = default;

    [[nodiscard]] const std::vector<Subsystem> &subsystems() const noexcept { return subsystems_; }
    [[nodiscard]] std::size_t total_dim() const noexcept { return total_dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return subsystems_.size(); }

    [[nodiscard]] std::optional<std::size_t> find(const std::string &name) const {
        for (std::size_t i = 0; i < subsystems_.size(); ++i) {
            if (subsystems_[i].name == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] const Subsystem &subsystem(const std::string &name) const {
        auto idx = find(name);
        if (!idx) {
            throw Error(ErrorKind::Space, "unknown subsystem '" + name + "'");
        }
        return subsystems_[*idx];
    }

    /// Basis index of the product ket with one label per subsystem.
    [[nodiscard]] std::size_t basis_index(const std::vector<std::string> &labels) const {
        if (labels.size() != subsystems_.size()) {
            throw Error(ErrorKind::Space, "basis_index needs one label per subsystem");
        }
        std::size_t index = 0;
        for (std::size_t i = 0; i < subsystems_.size(); ++i) {
            auto pos = subsystems_[i].find(labels[i]);
            if (!pos) {
                throw Error(ErrorKind::Space,
                            "unknown basis label '" + labels[i] + "' in subsystem '" + subsystems_[i].name + "'");
            }
            index = index * subsystems_[i].dim() + *pos;
        }
        return index;
    }

    [[nodiscard]] ComplexVector basis_ket(const std::vector<std::string> &labels) const {
        return ComplexVector::basis(total_dim_, basis_index(labels));
    }

    /// Inverse of basis_index: per-subsystem digit list.
    [[nodiscard]] std::vector<std::size_t> digits(std::size_t index) const {
        std::vector<std::size_t> out(subsystems_.size());
        for (std::size_t i = subsystems_.size(); i-- > 0;) {
            out[i] = index % subsystems_[i].dim();
            index /= subsystems_[i].dim();
        }
        return out;
    }

    bool operator==(const HilbertSpace &o) const { return subsystems_ == o.subsystems_; }

    friend HilbertSpace make_space(std::vector<Subsystem> subsystems);

  private:
    std::vector<Subsystem> subsystems_;
    std::size_t total_dim_ = 0;
};

inline HilbertSpace make_space(std::vector<Subsystem> subsystems) {
    if (subsystems.empty()) {
        throw Error(ErrorKind::Space, "a Hilbert space needs at least one subsystem");
    }
    std::unordered_set<std::string> names;
    std::size_t total = 1;
    for (const auto &s : subsystems) {
        if (s.name.empty()) {
            throw Error(ErrorKind::Space, "subsystem name must be nonempty");
        }
        if (!names.insert(s.name).second) {
            throw Error(ErrorKind::Space, "duplicate subsystem name '" + s.name + "'");
        }
        if (s.dim() == 0) {
            throw Error(ErrorKind::Dimension, "subsystem '" + s.name + "' has dimension 0");
        }
        std::unordered_set<std::string> labels(s.basis_labels.begin(), s.basis_labels.end());
        if (labels.size() != s.dim()) {
            throw Error(ErrorKind::Space, "duplicate basis label in subsystem '" + s.name + "'");
        }
        total *= s.dim();
        if (total > kMaxDimension) {
            throw Error(ErrorKind::Dimension,
                        "total dimension exceeds the cap of " + std::to_string(kMaxDimension));
        }
    }
    HilbertSpace space;
    space.subsystems_ = std::move(subsystems);
    space.total_dim_ = total;
    return space;
}

/// Hermitian idempotent operator on a space; validated on construction.
class Projector {
  public:
    Projector(HilbertSpace space, ComplexMatrix matrix, std::string label, Tolerance tol = {})
        : space_(std::move(space)), matrix_(std::move(matrix)), label_(std::move(label)) {
        if (!matrix_.is_square() || matrix_.rows() != space_.total_dim()) {
            throw Error(ErrorKind::Dimension, "projector '" + label_ + "' does not match its space dimension");
        }
        if (!is_hermitian(matrix_, tol)) {
            throw Error(ErrorKind::Projector, "projector '" + label_ + "' is not Hermitian");
        }
        if (max_abs_diff(matrix_ * matrix_, matrix_) > tol.eps) {
            throw Error(ErrorKind::Projector, "projector '" + label_ + "' is not idempotent");
        }
        const double tr = matrix_.trace().real();
        const double r = std::round(tr);
        if (std::abs(tr - r) > std::max(tol.eps, 1e-12) * std::max(1.0, r) || r < 0) {
            throw Error(ErrorKind::Projector, "projector '" + label_ + "' has non-integer trace");
        }
        rank_ = static_cast<std::size_t>(r);
    }

    [[nodiscard]] const HilbertSpace &space() const noexcept { return space_; }
    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] const std::string &label() const noexcept { return label_; }
    [[nodiscard]] std::size_t rank() const noexcept { return rank_; }

    [[nodiscard]] Projector relabeled(std::string label) const {
        Projector p = *this;
        p.label_ = std::move(label);
        return p;
    }

  private:
    HilbertSpace space_;
    ComplexMatrix matrix_;
    std::string label_;
    std::size_t rank_ = 0;
};

inline Projector identity_projector(const HilbertSpace &space, std::string label = "I") {
    return {space, ComplexMatrix::identity(space.total_dim()), std::move(label)};
}

/// |psi><psi| / <psi|psi>.
inline Projector ket_projector(const ComplexVector &state, const HilbertSpace &space, std::string label) {
    if (state.dim() != space.total_dim()) {
        throw Error(ErrorKind::Dimension, "ket '" + label + "' does not match the space dimension");
    }
    const double n2 = state.norm_squared();
    if (!(n2 > 0.0)) {
        throw Error(ErrorKind::Normalization, "cannot build a projector from the zero vector ('" + label + "')");
    }
    ComplexMatrix m = outer(state, state);
    m *= 1.0 / n2;
    // Rank-1 by construction; loose validation guards only against rounding.
    return {space, std::move(m), std::move(label), Tolerance(1e-9)};
}

/**
 * Pads `p` with identities on every subsystem of `target` that `p`'s space
 * lacks. The subsystems of `p`'s space must appear in `target` in the same
 * relative order; nothing is permuted.
 */
inline Projector embed(const Projector &p, const HilbertSpace &target) {
    const auto &src = p.space().subsystems();
    const auto &dst = target.subsystems();
    std::vector<std::size_t> positions;
    positions.reserve(src.size());
    for (const auto &s : src) {
        auto pos = target.find(s.name);
        if (!pos) {
            throw Error(ErrorKind::Space, "embed: subsystem '" + s.name + "' not in target space");
        }
        if (dst[*pos] != s) {
            throw Error(ErrorKind::Space, "embed: subsystem '" + s.name + "' differs in the target space");
        }
        if (!positions.empty() && *pos <= positions.back()) {
            throw Error(ErrorKind::Space, "embed: subsystem order differs from the target space");
        }
        positions.push_back(*pos);
    }
    if (src.size() == dst.size()) {
        return {target, p.matrix(), p.label()};
    }

    // Build target-space matrix entrywise: <i|P~|j> = <i_src|P|j_src> if the
    // complementary digits of i and j agree, else 0.
    const std::size_t n = target.total_dim();
    ComplexMatrix out(n, n);
    std::vector<bool> in_src(dst.size(), false);
    for (auto pos : positions) {
        in_src[pos] = true;
    }
    auto src_index = [&](const std::vector<std::size_t> &digits) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            idx = idx * dst[positions[k]].dim() + digits[positions[k]];
        }
        return idx;
    };
    std::vector<std::vector<std::size_t>> all_digits(n);
    for (std::size_t i = 0; i < n; ++i) {
        all_digits[i] = target.digits(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            bool match = true;
            for (std::size_t k = 0; k < dst.size(); ++k) {
                if (!in_src[k] && all_digits[i][k] != all_digits[j][k]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                out(i, j) = p.matrix()(src_index(all_digits[i]), src_index(all_digits[j]));
            }
        }
    }
    return {target, std::move(out), p.label()};
}

/// I (x) ... (x) op (x) ... (x) I with `op` acting on one subsystem of `space`.
inline ComplexMatrix embed_operator(const ComplexMatrix &op, const std::string &subsystem, const HilbertSpace &space) {
    const auto pos = space.find(subsystem);
    if (!pos) {
        throw Error(ErrorKind::Space, "unknown subsystem '" + subsystem + "'");
    }
    const auto &subs = space.subsystems();
    if (!op.is_square() || op.rows() != subs[*pos].dim()) {
        throw Error(ErrorKind::Dimension, "operator does not match the dimension of subsystem '" + subsystem + "'");
    }
    std::size_t before = 1;
    std::size_t after = 1;
    for (std::size_t k = 0; k < subs.size(); ++k) {
        if (k < *pos) {
            before *= subs[k].dim();
        } else if (k > *pos) {
            after *= subs[k].dim();
        }
    }
    return tensor_product(tensor_product(ComplexMatrix::identity(before), op), ComplexMatrix::identity(after));
}

/// Projector onto the span of the named basis labels of one subsystem,
/// embedded in `space`.
inline Projector local_projector(const HilbertSpace &space, const std::string &subsystem,
                                 const std::vector<std::string> &labels, std::string label) {
    const Subsystem &sub = space.subsystem(subsystem);
    ComplexMatrix m(sub.dim(), sub.dim());
    for (const auto &l : labels) {
        auto pos = sub.find(l);
        if (!pos) {
            throw Error(ErrorKind::Space, "unknown basis label '" + l + "' in subsystem '" + subsystem + "'");
        }
        m(*pos, *pos) = 1.0;
    }
    return embed(Projector(make_space({sub}), std::move(m), std::move(label)), space);
}

/// Product of mutually commuting projectors (their conjunction).
inline Projector product_projector(const std::vector<Projector> &factors, std::string label, Tolerance tol = {}) {
    if (factors.empty()) {
        throw Error(ErrorKind::Validation, "product of zero projectors");
    }
    ComplexMatrix m = factors.front().matrix();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (!(factors[i].space() == factors.front().space())) {
            throw Error(ErrorKind::Space, "product of projectors on different spaces");
        }
        m = m * factors[i].matrix();
    }
    return {factors.front().space(), std::move(m), std::move(label), tol};
}

/// Projective decomposition of the identity: mutually orthogonal nonzero
/// projectors summing to I. Only validate_pdi constructs one.
class Pdi {
  public:
    [[nodiscard]] const HilbertSpace &space() const noexcept { return space_; }
    [[nodiscard]] const std::vector<Projector> &projectors() const noexcept { return projectors_; }
    [[nodiscard]] std::size_t size() const noexcept { return projectors_.size(); }
    [[nodiscard]] const Projector &operator[](std::size_t i) const { return projectors_[i]; }

    [[nodiscard]] std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(projectors_.size());
        for (const auto &p : projectors_) {
            out.push_back(p.label());
        }
        return out;
    }

    [[nodiscard]] std::optional<std::size_t> find(const std::string &label) const {
        for (std::size_t i = 0; i < projectors_.size(); ++i) {
            if (projectors_[i].label() == label) {
                return i;
            }
        }
        return std::nullopt;
    }

    friend Pdi validate_pdi(std::vector<Projector> projectors, Tolerance tol);

  private:
    Pdi(HilbertSpace space, std::vector<Projector> projectors)
        : space_(std::move(space)), projectors_(std::move(projectors)) {}

    HilbertSpace space_;
    std::vector<Projector> projectors_;
};

/// Checks the PDI conditions and names the first failing one.
inline Pdi validate_pdi(std::vector<Projector> projectors, Tolerance tol = {}) {
    if (projectors.empty()) {
        throw Error(ErrorKind::Completeness, "a PDI needs at least one projector");
    }
    const HilbertSpace &space = projectors.front().space();
    const std::size_t n = space.total_dim();
    for (const auto &p : projectors) {
        if (!(p.space() == space)) {
            throw Error(ErrorKind::Space, "PDI projectors live on different spaces ('" + p.label() + "')");
        }
        if (max_abs_diff(p.matrix() * p.matrix(), p.matrix()) > tol.eps ||
            !is_hermitian(p.matrix(), tol)) {
            throw Error(ErrorKind::Projector, "PDI element '" + p.label() + "' is not a projector");
        }
        if (p.matrix().max_norm() <= tol.eps) {
            throw Error(ErrorKind::ZeroProjector, "PDI element '" + p.label() + "' is zero");
        }
    }
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        for (std::size_t j = i + 1; j < projectors.size(); ++j) {
            const double overlap = (projectors[i].matrix() * projectors[j].matrix()).max_norm();
            if (overlap > tol.eps) {
                throw Error(ErrorKind::Orthogonality, "PDI elements '" + projectors[i].label() + "' and '" +
                                                          projectors[j].label() +
                                                          "' are not orthogonal (max |PQ| = " +
                                                          format_real(overlap) + ")");
            }
        }
    }
    ComplexMatrix sum(n, n);
    for (const auto &p : projectors) {
        sum += p.matrix();
    }
    const double residual = max_abs_diff(sum, ComplexMatrix::identity(n));
    if (residual > tol.eps) {
        throw Error(ErrorKind::Completeness,
                    "PDI projectors do not sum to the identity (max residual " + format_real(residual) + ")");
    }
    return Pdi(space, std::move(projectors));
}

/**
 * PDI from raw labeled matrices (e.g. read from a file). The sum rule is
 * checked first, then each element is validated as a projector and the
 * result goes through validate_pdi.
 */
inline Pdi validate_pdi_matrices(const HilbertSpace &space,
                                 const std::vector<std::pair<std::string, ComplexMatrix>> &elements,
                                 Tolerance tol = {}) {
    if (elements.empty()) {
        throw Error(ErrorKind::Completeness, "a PDI needs at least one projector");
    }
    const std::size_t n = space.total_dim();
    ComplexMatrix sum(n, n);
    for (const auto &[label, m] : elements) {
        if (m.rows() != n || m.cols() != n) {
            throw Error(ErrorKind::Dimension, "PDI element '" + label + "' does not match the space dimension");
        }
        sum += m;
    }
    const double residual = max_abs_diff(sum, ComplexMatrix::identity(n));
    if (residual > tol.eps) {
        throw Error(ErrorKind::Completeness,
                    "PDI elements do not sum to the identity (max residual " + format_real(residual) + ")");
    }
    std::vector<Projector> projectors;
    for (const auto &[label, m] : elements) {
        projectors.emplace_back(space, m, label, tol);
    }
    return validate_pdi(std::move(projectors), tol);
}

/**
 * Adds the complement I - sum(P) (labeled `remainder_label`) when it is
 * nonzero, then validates. Used for the implicit framework {P, I - P}.
 */
inline Pdi complete_pdi(std::vector<Projector> projectors, const std::string &remainder_label, Tolerance tol = {}) {
    if (projectors.empty()) {
        throw Error(ErrorKind::Completeness, "cannot complete an empty projector set");
    }
    const HilbertSpace &space = projectors.front().space();
    ComplexMatrix rest = ComplexMatrix::identity(space.total_dim());
    for (const auto &p : projectors) {
        rest -= p.matrix();
    }
    if (rest.trace().real() > 0.5) {
        // Throws Projector if the set was not orthogonal to begin with.
        try {
            projectors.emplace_back(space, std::move(rest), remainder_label, tol);
        } catch (const Error &) {
            throw Error(ErrorKind::Completeness,
                        "I minus the given projectors is not a projector, cannot complete with '" +
                            remainder_label + "'");
        }
    }
    return validate_pdi(std::move(projectors), tol);
}

class Observable {
  public:
    Observable(HilbertSpace space, ComplexMatrix matrix, std::string label = "A", Tolerance tol = {})
        : space_(std::move(space)), matrix_(std::move(matrix)), label_(std::move(label)) {
        if (!matrix_.is_square() || matrix_.rows() != space_.total_dim()) {
            throw Error(ErrorKind::Dimension, "observable '" + label_ + "' does not match its space dimension");
        }
        if (!is_hermitian(matrix_, tol)) {
            throw Error(ErrorKind::Symmetry, "observable '" + label_ + "' is not Hermitian");
        }
    }

    [[nodiscard]] const HilbertSpace &space() const noexcept { return space_; }
    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] const std::string &label() const noexcept { return label_; }

  private:
    HilbertSpace space_;
    ComplexMatrix matrix_;
    std::string label_;
};

struct Spectrum {
    std::vector<double> values; // distinct, descending
    Pdi pdi;                    // pdi[j] is the eigenprojector of values[j]
};

/**
 * Spectral decomposition A = sum_j a_j P_j with distinct a_j. Numerical
 * eigenvalues are clustered greedily in descending order: a new cluster
 * starts whenever the gap to the previous eigenvalue exceeds cluster_tol.
 * The representative a_j is the cluster mean. Projectors are labeled
 * `<label>=<value>` unless `labels` provides one name per cluster.
 */
inline Spectrum pdi_from_observable(const Observable &a, Tolerance tol = {}, double cluster_tol = 1e-9,
                                    const std::vector<std::string> &labels = {}) {
    const auto eig = hermitian_eig(a.matrix(), tol);
    const std::size_t n = a.space().total_dim();

    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (clusters.empty() || eig.values[clusters.back().back()] - eig.values[k] > cluster_tol) {
            clusters.emplace_back();
        }
        clusters.back().push_back(k);
    }
    if (!labels.empty() && labels.size() != clusters.size()) {
        throw Error(ErrorKind::Validation, "observable '" + a.label() + "' has " + std::to_string(clusters.size()) +
                                              " distinct eigenvalues but " + std::to_string(labels.size()) +
                                              " labels were given");
    }

    std::vector<double> values;
    std::vector<Projector> projectors;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        double mean = 0.0;
        ComplexMatrix p(n, n);
        for (auto k : clusters[c]) {
            mean += eig.values[k];
            p += outer(eig.vectors[k], eig.vectors[k]);
        }
        mean /= static_cast<double>(clusters[c].size());
        values.push_back(mean);
        std::string name = labels.empty() ? a.label() + "=" + format_real(mean) : labels[c];
        projectors.emplace_back(a.space(), std::move(p), std::move(name), Tolerance(std::max(tol.eps, 1e-9)));
    }
    return {std::move(values), validate_pdi(std::move(projectors), Tolerance(std::max(tol.eps, 1e-9)))};
}

} // namespace chist
