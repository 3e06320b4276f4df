#ifndef PLANET_VARIABLES_HPP
#define PLANET_VARIABLES_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace planet {

// ── Variable ────────────────────────────────────────────────────────────────
// A named experimental factor with an ordered list of distinct levels.
// Level order is declaration order; every determinism guarantee in the
// toolkit is stated relative to that order.
//
// A compound variable (built from several factors) is flattened eagerly:
// its levels are the component level names joined with "-", and
// `components` records the atomic factor names it covers so that overlap
// checks see through the flattening.
struct Variable {
  std::string name;
  std::vector<std::string> levels;
  std::vector<std::string> components;  // empty for atomic variables

  std::size_t level_count() const { return levels.size(); }
  std::optional<std::size_t> level_index(std::string_view level) const;

  // Atomic factor names this variable stands for (itself when atomic).
  std::vector<std::string> footprint() const;

  bool operator==(const Variable& other) const = default;
};

// Validates invariants (>= 1 level, unique level names) and throws
// Errc::InvalidLevel / Errc::DuplicateVariable on violation.
Variable make_variable(std::string name, std::vector<std::string> levels);

// Flattens >= 2 pairwise-distinct variables into one synthetic variable.
// Level count is the product of the component level counts; level names are
// joined with "-", first component most significant.
Variable make_compound(std::string name, std::span<const Variable> parts);

// ── ConditionCode ───────────────────────────────────────────────────────────
// Mixed-radix integer encoding of one condition (one level per variable of
// the governing VariableSet). Codes are dense: every value in
// [0, condition_count) decodes to a valid level tuple and vice versa.
struct ConditionCode {
  std::uint64_t value = 0;
  auto operator<=>(const ConditionCode&) const = default;
};

// ── VariableSet ─────────────────────────────────────────────────────────────
// An ordered collection of variables with the mixed-radix arithmetic for
// encoding/decoding conditions. First variable is most significant.
class VariableSet {
public:
  VariableSet() = default;
  explicit VariableSet(std::vector<Variable> vars);

  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  const Variable* find(std::string_view name) const;

  // Product of the level counts (1 for the empty set).
  std::uint64_t condition_count() const { return total_; }

  ConditionCode encode(std::span<const std::size_t> level_indices) const;
  ConditionCode encode_names(std::span<const std::string> level_names) const;
  std::vector<std::size_t> decode(ConditionCode code) const;
  std::vector<std::string> decode_names(ConditionCode code) const;

  // Level index of one variable inside a code, by div/mod extraction.
  std::size_t level_of(ConditionCode code, std::size_t var_index) const;

  bool subset_of(const VariableSet& other) const;
  // No shared atomic factors (compound flattening is seen through).
  bool disjoint_with(const VariableSet& other) const;

  bool operator==(const VariableSet& other) const {
    return vars_ == other.vars_;
  }

private:
  std::vector<Variable> vars_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t total_ = 1;
};

// ── Condition algebra ───────────────────────────────────────────────────────

// Restriction of `code` to the variables of `onto` (onto must be a subset of
// `from`, matched by name). Throws Errc::ProjectionError otherwise.
ConditionCode project(ConditionCode code, const VariableSet& from,
                      const VariableSet& onto);

// Concatenation of two conditions over disjoint variable sets. The result is
// governed by `union_of(a_set, b_set)`: decode(result) is decode(a) followed
// by decode(b). Throws Errc::VariableOverlap when the sets share a factor.
ConditionCode combine(ConditionCode a, const VariableSet& a_set,
                      ConditionCode b, const VariableSet& b_set);

// a's variables followed by b's. Throws Errc::VariableOverlap on overlap.
VariableSet union_of(const VariableSet& a, const VariableSet& b);

// Checked u64 product; throws Errc::DesignTooLarge on overflow.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

}  // namespace planet

#endif  // PLANET_VARIABLES_HPP
