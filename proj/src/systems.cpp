#include "elts/systems.hpp"

#include "elts/errors.hpp"

#include <algorithm>

namespace elts {

SystemCollection::SystemCollection(SystemRegistry registry, std::vector<std::string> names)
    : registry_(std::move(registry)), names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
    throw Error("duplicate system identifier in collection");
  for (const auto& name : names_) {
    auto it = registry_.find(name);
    if (it == registry_.end()) throw Error("system '" + name + "' not in registry");
    if (it->second <= 0) throw Error("system '" + name + "' has non-positive dimension");
  }
  for (const auto& [name, dim] : registry_)
    if (dim <= 0) throw Error("system '" + name + "' has non-positive dimension");
}

SystemCollection SystemCollection::empty(SystemRegistry registry) {
  return SystemCollection(std::move(registry), {});
}

SystemCollection SystemCollection::full(const SystemRegistry& registry) {
  std::vector<std::string> names;
  for (const auto& [name, dim] : registry) names.push_back(name);
  return SystemCollection(registry, std::move(names));
}

long SystemCollection::dimension() const {
  long d = 1;
  for (const auto& name : names_) d *= registry_.at(name);
  return d;
}

std::vector<long> SystemCollection::dims() const {
  std::vector<long> out;
  out.reserve(names_.size());
  for (const auto& name : names_) out.push_back(registry_.at(name));
  return out;
}

bool SystemCollection::contains(const std::string& name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

bool SystemCollection::subset_of(const SystemCollection& other) const {
  return std::includes(other.names_.begin(), other.names_.end(), names_.begin(), names_.end());
}

bool SystemCollection::disjoint_from(const SystemCollection& other) const {
  std::vector<std::string> common;
  std::set_intersection(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                        std::back_inserter(common));
  return common.empty();
}

std::string SystemCollection::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (i) out += ",";
    out += names_[i];
  }
  return out + "}";
}

std::optional<SystemCollection> systems_union(const SystemCollection& c, const SystemCollection& d) {
  if (!c.same_registry(d)) throw Error("system collections have different registries");
  if (!c.disjoint_from(d)) return std::nullopt;
  std::vector<std::string> names;
  std::set_union(c.names().begin(), c.names().end(), d.names().begin(), d.names().end(),
                 std::back_inserter(names));
  return SystemCollection(c.registry(), std::move(names));
}

SystemCollection systems_complement(const SystemCollection& c) {
  return systems_difference(SystemCollection::full(c.registry()), c);
}

SystemCollection systems_difference(const SystemCollection& c, const SystemCollection& d) {
  if (!c.same_registry(d)) throw Error("system collections have different registries");
  std::vector<std::string> names;
  std::set_difference(c.names().begin(), c.names().end(), d.names().begin(), d.names().end(),
                      std::back_inserter(names));
  return SystemCollection(c.registry(), std::move(names));
}

}  // namespace elts
