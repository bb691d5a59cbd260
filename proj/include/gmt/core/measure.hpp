#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gmt/core/dyadic.hpp"

namespace gmt {

struct Atom {
  Point x{};
  double mass = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite nonnegative measure made of weighted point atoms inside a root box.
class AtomicMeasure {
 public:
  /// Dyadic level of the integer coordinates cached per atom; all leaf
  /// assignments at levels ≤ kMaxLevel are shifts of these.
  static constexpr int kFineLevel = kMaxLevel + 1;

  AtomicMeasure() = default;
  /// Throws DomainError on nonpositive/nonfinite masses and PlacementError on
  /// atoms outside the closed root box (beyond a relative tolerance of 1e-12).
  AtomicMeasure(RootBox box, std::vector<Atom> atoms);

  [[nodiscard]] int dim() const { return box_.dim; }
  [[nodiscard]] const RootBox& box() const { return box_; }
  [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }
  [[nodiscard]] std::size_t size() const { return atoms_.size(); }
  [[nodiscard]] bool empty() const { return atoms_.empty(); }
  /// Correctly rounded sum of the atom masses.
  [[nodiscard]] double total_mass() const { return total_; }

  /// Integer coordinates of atom `a` at kFineLevel (half-open convention).
  [[nodiscard]] const CubeIndex& fine_index(std::size_t a) const { return fine_[a]; }

  friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) {
    return a.box_ == b.box_ && a.atoms_ == b.atoms_;
  }

 private:
  RootBox box_{};
  std::vector<Atom> atoms_;
  std::vector<CubeIndex> fine_;
  double total_ = 0.0;
};

/// Unique level-`level` cube containing atom `a` (half-open cubes).
[[nodiscard]] DyadicCube leaf_of(const AtomicMeasure& mu, std::size_t a, int level);

/// Mass of μ inside each cube of a list (same order); cubes need not be disjoint.
[[nodiscard]] std::vector<double> cube_masses(const AtomicMeasure& mu, std::span<const DyadicCube> cubes);

/// Atom-wise scaled copy of μ dropping zero-weight atoms.
[[nodiscard]] AtomicMeasure scaled(const AtomicMeasure& mu, std::span<const double> weights);

/// Explicit Hahn split: positive and negative parts on the same root box.
class SignedAtomicMeasure {
 public:
  SignedAtomicMeasure() = default;
  /// Throws DomainError if the boxes differ or a position carries both signs.
  SignedAtomicMeasure(AtomicMeasure positive, AtomicMeasure negative);
  explicit SignedAtomicMeasure(AtomicMeasure positive);

  [[nodiscard]] const AtomicMeasure& positive() const { return pos_; }
  [[nodiscard]] const AtomicMeasure& negative() const { return neg_; }
  [[nodiscard]] int dim() const { return pos_.dim(); }
  [[nodiscard]] const RootBox& box() const { return pos_.box(); }
  /// μ⁺(R^N) − μ⁻(R^N).
  [[nodiscard]] double total_signed_mass() const;
  /// |μ|(R^N).
  [[nodiscard]] double total_variation() const;

  friend bool operator==(const SignedAtomicMeasure&, const SignedAtomicMeasure&) = default;

 private:
  AtomicMeasure pos_;
  AtomicMeasure neg_;
};

/// ν = Σ w_a m_a δ_{x_a} with 0 ≤ w_a ≤ 1: the fractional counterpart of μ⌊_E.
class WeightedRestriction {
 public:
  WeightedRestriction() = default;
  /// Throws DomainError if the weight count differs or a weight leaves [0, 1].
  WeightedRestriction(std::shared_ptr<const AtomicMeasure> base, std::vector<double> weights);

  static WeightedRestriction identity(std::shared_ptr<const AtomicMeasure> base);
  static WeightedRestriction zero(std::shared_ptr<const AtomicMeasure> base);

  [[nodiscard]] const AtomicMeasure& base() const { return *base_; }
  [[nodiscard]] const std::shared_ptr<const AtomicMeasure>& base_ptr() const { return base_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] double total_mass() const;
  [[nodiscard]] AtomicMeasure as_measure() const { return scaled(*base_, weights_); }

 private:
  std::shared_ptr<const AtomicMeasure> base_;
  std::vector<double> weights_;
};

/// Removed mass Σ_a (1 − w_a) m_a, i.e. ‖μ − ν‖ in total variation.
/// Throws DomainError when ν is not a restriction of μ.
[[nodiscard]] double tv_distance(const AtomicMeasure& mu, const WeightedRestriction& nu);

}  // namespace gmt
