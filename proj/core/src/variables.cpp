#include "planet/variables.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "planet/error.hpp"

namespace planet {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    fail(Errc::DesignTooLarge, "count overflows 64 bits");
  }
  return a * b;
}

std::optional<std::size_t> Variable::level_index(std::string_view level) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Variable::footprint() const {
  if (components.empty()) return {name};
  return components;
}

Variable make_variable(std::string name, std::vector<std::string> levels) {
  if (name.empty()) fail(Errc::DuplicateVariable, "variable name must be non-empty");
  if (levels.empty()) {
    fail(Errc::InvalidLevel, "variable '" + name + "' needs at least one level");
  }
  std::set<std::string_view> seen;
  for (const auto& level : levels) {
    if (level.empty()) {
      fail(Errc::InvalidLevel, "variable '" + name + "' has an empty level name");
    }
    if (!seen.insert(level).second) {
      fail(Errc::InvalidLevel,
           "variable '" + name + "' repeats level '" + level + "'");
    }
  }
  return Variable{std::move(name), std::move(levels), {}};
}

Variable make_compound(std::string name, std::span<const Variable> parts) {
  if (parts.size() < 2) {
    fail(Errc::ArityError, "compound variable '" + name + "' needs >= 2 components");
  }
  std::set<std::string> footprint_seen;
  std::vector<std::string> footprint;
  for (const auto& part : parts) {
    for (const auto& atom : part.footprint()) {
      if (!footprint_seen.insert(atom).second) {
        fail(Errc::VariableOverlap,
             "compound variable '" + name + "' repeats factor '" + atom + "'");
      }
      footprint.push_back(atom);
    }
  }

  // Level names in mixed-radix order, first component most significant.
  std::vector<std::string> levels{""};
  for (const auto& part : parts) {
    std::vector<std::string> next;
    next.reserve(checked_mul(levels.size(), part.levels.size()));
    for (const auto& prefix : levels) {
      for (const auto& level : part.levels) {
        next.push_back(prefix.empty() ? level : prefix + "-" + level);
      }
    }
    levels = std::move(next);
  }

  Variable v{std::move(name), std::move(levels), std::move(footprint)};
  return v;
}

VariableSet::VariableSet(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::set<std::string_view> names;
  for (const auto& v : vars_) {
    if (v.levels.empty()) {
      fail(Errc::InvalidLevel, "variable '" + v.name + "' has no levels");
    }
    if (!names.insert(v.name).second) {
      fail(Errc::DuplicateVariable, "duplicate variable '" + v.name + "'");
    }
  }
  strides_.assign(vars_.size(), 1);
  total_ = 1;
  for (std::size_t i = vars_.size(); i-- > 0;) {
    strides_[i] = total_;
    total_ = checked_mul(total_, vars_[i].level_count());
  }
}

std::optional<std::size_t> VariableSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

const Variable* VariableSet::find(std::string_view name) const {
  auto i = index_of(name);
  return i ? &vars_[*i] : nullptr;
}

ConditionCode VariableSet::encode(std::span<const std::size_t> level_indices) const {
  if (level_indices.size() != vars_.size()) {
    fail(Errc::InvalidLevel, "expected one level per variable");
  }
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (level_indices[i] >= vars_[i].level_count()) {
      fail(Errc::InvalidLevel, "level index out of range for variable '" +
                                   vars_[i].name + "'");
    }
    code += level_indices[i] * strides_[i];
  }
  return ConditionCode{code};
}

ConditionCode VariableSet::encode_names(std::span<const std::string> level_names) const {
  if (level_names.size() != vars_.size()) {
    fail(Errc::InvalidLevel, "expected one level per variable");
  }
  std::vector<std::size_t> indices(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto idx = vars_[i].level_index(level_names[i]);
    if (!idx) {
      fail(Errc::InvalidLevel, "unknown level '" + level_names[i] +
                                   "' for variable '" + vars_[i].name + "'");
    }
    indices[i] = *idx;
  }
  return encode(indices);
}

std::vector<std::size_t> VariableSet::decode(ConditionCode code) const {
  if (code.value >= total_) {
    fail(Errc::InvalidLevel, "condition code out of range");
  }
  std::vector<std::size_t> indices(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    indices[i] = static_cast<std::size_t>((code.value / strides_[i]) %
                                          vars_[i].level_count());
  }
  return indices;
}

std::vector<std::string> VariableSet::decode_names(ConditionCode code) const {
  auto indices = decode(code);
  std::vector<std::string> names(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    names[i] = vars_[i].levels[indices[i]];
  }
  return names;
}

std::size_t VariableSet::level_of(ConditionCode code, std::size_t var_index) const {
  return static_cast<std::size_t>((code.value / strides_[var_index]) %
                                  vars_[var_index].level_count());
}

bool VariableSet::subset_of(const VariableSet& other) const {
  return std::all_of(vars_.begin(), vars_.end(), [&](const Variable& v) {
    const Variable* o = other.find(v.name);
    return o != nullptr && *o == v;
  });
}

bool VariableSet::disjoint_with(const VariableSet& other) const {
  std::set<std::string> atoms;
  for (const auto& v : vars_) {
    for (auto& a : v.footprint()) atoms.insert(std::move(a));
  }
  for (const auto& v : other.vars_) {
    for (const auto& a : v.footprint()) {
      if (atoms.count(a)) return false;
    }
  }
  return true;
}

ConditionCode project(ConditionCode code, const VariableSet& from,
                      const VariableSet& onto) {
  auto indices = from.decode(code);
  std::vector<std::size_t> out(onto.size());
  for (std::size_t i = 0; i < onto.size(); ++i) {
    auto at = from.index_of(onto[i].name);
    if (!at || !(from[*at] == onto[i])) {
      fail(Errc::ProjectionError,
           "variable '" + onto[i].name + "' is not part of the source set");
    }
    out[i] = indices[*at];
  }
  return onto.encode(out);
}

VariableSet union_of(const VariableSet& a, const VariableSet& b) {
  if (!a.disjoint_with(b)) {
    fail(Errc::VariableOverlap, "variable sets overlap");
  }
  std::vector<Variable> vars = a.variables();
  vars.insert(vars.end(), b.variables().begin(), b.variables().end());
  return VariableSet(std::move(vars));
}

ConditionCode combine(ConditionCode a, const VariableSet& a_set,
                      ConditionCode b, const VariableSet& b_set) {
  VariableSet merged = union_of(a_set, b_set);
  auto ai = a_set.decode(a);
  auto bi = b_set.decode(b);
  ai.insert(ai.end(), bi.begin(), bi.end());
  return merged.encode(ai);
}

}  // namespace planet
