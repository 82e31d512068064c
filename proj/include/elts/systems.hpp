#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elts {

// Named quantum systems and their Hilbert-space dimensions.
using SystemRegistry = std::map<std::string, long>;

// A subset of the registry's systems, kept sorted by the global order on
// identifiers (lexicographic). Collections over the same registry form a PCM
// under disjoint union, and an effect algebra with complement Sys \ C.
class SystemCollection {
 public:
  SystemCollection() = default;
  SystemCollection(SystemRegistry registry, std::vector<std::string> names);

  static SystemCollection empty(SystemRegistry registry = {});
  static SystemCollection full(const SystemRegistry& registry);

  const SystemRegistry& registry() const { return registry_; }
  const std::vector<std::string>& names() const { return names_; }
  bool is_empty() const { return names_.empty(); }
  std::size_t size() const { return names_.size(); }

  // Product of member dimensions; 1 for the empty collection.
  long dimension() const;
  std::vector<long> dims() const;

  bool contains(const std::string& name) const;
  bool subset_of(const SystemCollection& other) const;
  bool disjoint_from(const SystemCollection& other) const;
  bool same_registry(const SystemCollection& other) const { return registry_ == other.registry_; }

  friend bool operator==(const SystemCollection& a, const SystemCollection& b) {
    return a.names_ == b.names_ && a.registry_ == b.registry_;
  }
  friend bool operator!=(const SystemCollection& a, const SystemCollection& b) { return !(a == b); }

  std::string to_string() const;

 private:
  SystemRegistry registry_;
  std::vector<std::string> names_;  // sorted, unique
};

// Defined iff disjoint (partial disjoint union).
std::optional<SystemCollection> systems_union(const SystemCollection& c, const SystemCollection& d);

// Sys \ C against the full registry.
SystemCollection systems_complement(const SystemCollection& c);

// C \ D (plain set difference, same registry).
SystemCollection systems_difference(const SystemCollection& c, const SystemCollection& d);

}  // namespace elts
