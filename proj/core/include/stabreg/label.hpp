#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabreg/error.hpp"

namespace stabreg {

/// Size parameters of the bounded label domain.
///
/// A label is a pair (sting, antistings) where the sting is drawn from the
/// universe {1..K} and the antistings are a k-subset of the same universe,
/// with K = k*k + 1. The extra element guarantees that the union of the
/// antistings of any k labels never covers the universe.
struct LabelParams {
  std::uint32_t k = 2;

  /// Throws InvalidInput unless k >= 2 and k*k+1 fits the element type.
  static LabelParams for_k(std::uint64_t k);

  std::uint32_t universe() const { return k * k + 1; }

  friend bool operator==(const LabelParams&, const LabelParams&) = default;
};

/// Number of distinct labels, C(K, k) * K. Throws InvalidInput on overflow.
std::uint64_t label_domain_size(const LabelParams& params);

/// An epoch identifier from the bounded domain.
///
/// Labels are immutable; the antisting set is shared between copies so that
/// timestamps can be passed around in messages without deep copies.
class Label {
 public:
  /// Antistings are sorted on construction. Throws InvalidInput on empty or
  /// duplicate antistings, or a zero element.
  Label(std::uint32_t sting, std::vector<std::uint32_t> antistings);

  std::uint32_t sting() const { return sting_; }
  std::span<const std::uint32_t> antistings() const { return *antistings_; }
  std::size_t k() const { return antistings_->size(); }

  bool has_antisting(std::uint32_t x) const;

  /// Throws InvalidInput if the label is not a member of the domain.
  void validate(const LabelParams& params) const;

  /// `(s|a1,a2,...,ak)` with ascending antistings.
  std::string to_string() const;
  static Label parse(std::string_view text);

  std::size_t hash() const;

  friend bool operator==(const Label& a, const Label& b);

 private:
  std::uint32_t sting_;
  std::shared_ptr<const std::vector<std::uint32_t>> antistings_;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const { return l.hash(); }
};

/// a ≺ b: a's sting is among b's antistings and b's sting is not among a's.
/// Throws InvalidInput when the labels have different antisting sizes.
bool precedes_b(const Label& a, const Label& b);

/// Deterministic refinement of "any element": the smallest candidate.
/// Throws InternalError on an empty candidate set.
std::uint32_t pick(std::span<const std::uint32_t> candidates);

/// Returns a label that every member of `labels` precedes.
///
/// The antistings collect the stings of the inputs, padded with the smallest
/// unused elements up to k. The sting avoids every input antisting, and also
/// avoids the new antistings when the universe leaves room for that; ties go
/// to the smallest element. Duplicate inputs are ignored.
///
/// Throws InvalidInput if more than k distinct labels are given or any label
/// is outside the domain described by `params`.
Label next_b(std::span<const Label> labels, const LabelParams& params);

/// Uniformly random member of the domain.
Label random_label(const LabelParams& params, std::mt19937_64& rng);

/// `count` labels that are pairwise incomparable and incomparable to every
/// label in `others`. Their antistings are padded with the smallest free
/// elements, which is where next_b likes to put new stings. Throws
/// InvalidInput if the family does not fit in k antistings.
std::vector<Label> incomparable_family(std::size_t count, const LabelParams& params,
                                       std::mt19937_64& rng,
                                       std::span<const Label> others = {});

}  // namespace stabreg
