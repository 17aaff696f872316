#pragma once

#include <array>
#include <concepts>
#include <type_traits>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gavg/field.hpp"

namespace gavg {

// The element I^i R^r of D4, with R the pi/2 rotation and I = diag(-1, 1).
struct DihedralElement {
  int rotation = 0;  // 0..3
  bool inversion = false;

  bool operator==(const DihedralElement&) const = default;
};

// Cyclic lattice shift (sx mod nx, sy mod ny).
struct ShiftElement {
  int sx = 0;
  int sy = 0;
  int nx = 1;
  int ny = 1;

  bool operator==(const ShiftElement&) const = default;
};

using GroupElement = std::variant<DihedralElement, ShiftElement>;

enum class GroupKind { kD1, kD2, kD4, kCircleX, kTorus };

const char* to_string(GroupKind kind);
GroupKind group_kind_from_string(std::string_view s);

struct GroupSpec {
  GroupKind kind = GroupKind::kD4;
  // Lattice size; only meaningful for the shift groups.
  int nx = 1;
  int ny = 1;

  // Shift groups take their lattice from the grid.
  static GroupSpec for_grid(GroupKind kind, const GridSpec& grid);

  bool is_dihedral() const { return kind == GroupKind::kD1 || kind == GroupKind::kD2 || kind == GroupKind::kD4; }
  std::size_t order() const;
  bool contains(const GroupElement& g) const;
  GroupElement identity() const;
  // The index-th element in enumeration order.
  GroupElement element(std::size_t index) const;

  // Throws kIncompatibleGrid: D4 needs a square grid, Torus needs periodic
  // boundaries on both axes, shift groups need a matching lattice.
  void check_compatible(const GridSpec& grid) const;

  bool operator==(const GroupSpec&) const = default;
};

// 2x2 integer representation phi(g); rows are output components (x, y).
using ComponentMatrix = std::array<std::array<int, 2>, 2>;

ComponentMatrix component_matrix(const GroupElement& g);

// Canonical product a*b (b acts first). Throws kMixedGroup for a dihedral/shift
// mix or shifts on different lattices.
GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);
bool is_identity(const GroupElement& g);

// All |G| elements, identity first.
std::vector<GroupElement> enumerate(const GroupSpec& group);

// n independent uniform draws with replacement; the i-th draw depends only on
// seed and i.
std::vector<GroupElement> sample(const GroupSpec& group, int n, std::uint64_t seed);

// n distinct elements drawn uniformly without replacement (n <= |G|).
std::vector<GroupElement> sample_distinct(const GroupSpec& group, int n, std::uint64_t seed);

// Text form: e, r, r2, r3, i, ir, ir2, ir3, t(sx,sy).
std::string to_string(const GroupElement& g);
// Shift moduli come from the grid dimensions.
GroupElement parse_element(std::string_view text, int nx, int ny);

// Relocates every cell by g's lattice action and mixes components by kind:
// scalars unchanged, vectors phi*v, tensors phi*D*phi^T.
namespace detail {
template <typename T>
FieldSet<T> apply_field(const GroupElement& g, const FieldSet<T>& field);

template <typename F>
struct is_fieldset : std::false_type {};
template <typename T>
struct is_fieldset<FieldSet<T>> : std::true_type {};
}  // namespace detail

// Constrained forwarding signature so that argument-dependent lookup through
// std::variant never prefers std::apply.
template <typename G, typename F>
  requires std::convertible_to<G, GroupElement> && detail::is_fieldset<std::remove_cvref_t<F>>::value
auto apply(G&& g, F&& field) {
  const GroupElement& element = g;
  return detail::apply_field(element, static_cast<const std::remove_cvref_t<F>&>(field));
}

template <typename T>
Window<T> apply_window(const GroupElement& g, const Window<T>& window);

}  // namespace gavg
