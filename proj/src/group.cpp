#include "gavg/group.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

namespace gavg {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

constexpr ComponentMatrix kIdentity{{{1, 0}, {0, 1}}};
constexpr ComponentMatrix kRotation{{{0, -1}, {1, 0}}};
constexpr ComponentMatrix kInversion{{{-1, 0}, {0, 1}}};

ComponentMatrix multiply(const ComponentMatrix& a, const ComponentMatrix& b) {
  ComponentMatrix c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

// A signed permutation: out[a] = sign[a] * in[source[a]].
struct SignedPermutation {
  std::array<int, 4> source{};
  std::array<int, 4> sign{};
  int size = 0;
};

SignedPermutation vector_action(const ComponentMatrix& phi) {
  SignedPermutation p;
  p.size = 2;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (phi[a][b] != 0) {
        p.source[a] = b;
        p.sign[a] = phi[a][b];
      }
    }
  }
  return p;
}

// D' = phi D phi^T, components ordered (xx, xy, yx, yy).
SignedPermutation tensor_action(const ComponentMatrix& phi) {
  const SignedPermutation v = vector_action(phi);
  SignedPermutation p;
  p.size = 4;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      p.source[a * 2 + b] = v.source[a] * 2 + v.source[b];
      p.sign[a * 2 + b] = v.sign[a] * v.sign[b];
    }
  }
  return p;
}

std::uint64_t draw_index(std::uint64_t seed, std::uint64_t position, std::size_t order) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(position), static_cast<std::uint32_t>(position >> 32)};
  std::mt19937_64 engine(seq);
  std::uniform_int_distribution<std::uint64_t> dist(0, order - 1);
  return dist(engine);
}

}  // namespace

const char* to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::kD1: return "d1";
    case GroupKind::kD2: return "d2";
    case GroupKind::kD4: return "d4";
    case GroupKind::kCircleX: return "circle";
    case GroupKind::kTorus: return "torus";
  }
  return "unknown";
}

GroupKind group_kind_from_string(std::string_view s) {
  if (s == "d1") return GroupKind::kD1;
  if (s == "d2") return GroupKind::kD2;
  if (s == "d4") return GroupKind::kD4;
  if (s == "circle") return GroupKind::kCircleX;
  if (s == "torus") return GroupKind::kTorus;
  throw Error(ErrorCode::kInvalidArgument, "unknown group '" + std::string(s) + "'");
}

GroupSpec GroupSpec::for_grid(GroupKind kind, const GridSpec& grid) {
  GroupSpec spec{kind, 1, 1};
  if (kind == GroupKind::kCircleX || kind == GroupKind::kTorus) {
    spec.nx = grid.nx;
    spec.ny = grid.ny;
  }
  return spec;
}

std::size_t GroupSpec::order() const {
  switch (kind) {
    case GroupKind::kD1: return 2;
    case GroupKind::kD2: return 4;
    case GroupKind::kD4: return 8;
    case GroupKind::kCircleX: return static_cast<std::size_t>(nx);
    case GroupKind::kTorus: return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  return 0;
}

bool GroupSpec::contains(const GroupElement& g) const {
  if (const auto* d = std::get_if<DihedralElement>(&g)) {
    switch (kind) {
      case GroupKind::kD1: return d->rotation == 0;
      case GroupKind::kD2: return d->rotation % 2 == 0;
      case GroupKind::kD4: return true;
      default: return false;
    }
  }
  const auto& s = std::get<ShiftElement>(g);
  if (s.nx != nx || s.ny != ny) return false;
  if (kind == GroupKind::kCircleX) return s.sy == 0;
  return kind == GroupKind::kTorus;
}

GroupElement GroupSpec::identity() const {
  if (is_dihedral()) return DihedralElement{};
  return ShiftElement{0, 0, nx, ny};
}

GroupElement GroupSpec::element(std::size_t index) const {
  if (index >= order()) throw Error(ErrorCode::kInvalidArgument, "group element index out of range");
  const int i = static_cast<int>(index);
  switch (kind) {
    case GroupKind::kD1: return DihedralElement{0, i == 1};
    case GroupKind::kD2: return DihedralElement{2 * (i % 2), i >= 2};
    case GroupKind::kD4: return DihedralElement{i % 4, i >= 4};
    case GroupKind::kCircleX: return ShiftElement{i, 0, nx, ny};
    case GroupKind::kTorus: return ShiftElement{i % nx, i / nx, nx, ny};
  }
  return DihedralElement{};
}

void GroupSpec::check_compatible(const GridSpec& grid) const {
  switch (kind) {
    case GroupKind::kD4:
      if (!grid.square()) throw Error(ErrorCode::kIncompatibleGrid, "D4 requires a square grid");
      return;
    case GroupKind::kD1:
    case GroupKind::kD2:
      return;
    case GroupKind::kTorus:
      if (!grid.periodic_y()) {
        throw Error(ErrorCode::kIncompatibleGrid, "torus shifts require periodic boundaries on both axes");
      }
      [[fallthrough]];
    case GroupKind::kCircleX:
      if (grid.nx != nx || grid.ny != ny) {
        throw Error(ErrorCode::kIncompatibleGrid, "shift group lattice does not match grid");
      }
      return;
  }
}

ComponentMatrix component_matrix(const GroupElement& g) {
  const auto* d = std::get_if<DihedralElement>(&g);
  if (d == nullptr) return kIdentity;
  ComponentMatrix m = kIdentity;
  for (int r = 0; r < d->rotation; ++r) m = multiply(m, kRotation);
  if (d->inversion) m = multiply(kInversion, m);
  return m;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  if (a.index() != b.index()) throw Error(ErrorCode::kMixedGroup, "cannot compose dihedral and shift elements");
  if (const auto* da = std::get_if<DihedralElement>(&a)) {
    const auto& db = std::get<DihedralElement>(b);
    // R^r I = I R^-r, so (I^a R^p)(I^c R^q) = I^(a+c) R^((-1)^c p + q).
    const int r = db.inversion ? -da->rotation : da->rotation;
    return DihedralElement{mod(r + db.rotation, 4), da->inversion != db.inversion};
  }
  const auto& sa = std::get<ShiftElement>(a);
  const auto& sb = std::get<ShiftElement>(b);
  if (sa.nx != sb.nx || sa.ny != sb.ny) throw Error(ErrorCode::kMixedGroup, "shifts on different lattices");
  return ShiftElement{mod(sa.sx + sb.sx, sa.nx), mod(sa.sy + sb.sy, sa.ny), sa.nx, sa.ny};
}

GroupElement inverse(const GroupElement& g) {
  if (const auto* d = std::get_if<DihedralElement>(&g)) {
    if (d->inversion) return *d;
    return DihedralElement{mod(-d->rotation, 4), false};
  }
  const auto& s = std::get<ShiftElement>(g);
  return ShiftElement{mod(-s.sx, s.nx), mod(-s.sy, s.ny), s.nx, s.ny};
}

bool is_identity(const GroupElement& g) {
  if (const auto* d = std::get_if<DihedralElement>(&g)) return d->rotation == 0 && !d->inversion;
  const auto& s = std::get<ShiftElement>(g);
  return s.sx == 0 && s.sy == 0;
}

std::vector<GroupElement> enumerate(const GroupSpec& group) {
  std::vector<GroupElement> out;
  out.reserve(group.order());
  for (std::size_t i = 0; i < group.order(); ++i) out.push_back(group.element(i));
  return out;
}

std::vector<GroupElement> sample(const GroupSpec& group, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  std::vector<GroupElement> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(group.element(draw_index(seed, static_cast<std::uint64_t>(i), group.order())));
  return out;
}

std::vector<GroupElement> sample_distinct(const GroupSpec& group, int n, std::uint64_t seed) {
  if (n < 1 || static_cast<std::size_t>(n) > group.order()) {
    throw Error(ErrorCode::kInvalidArgument, "distinct sample count must be in [1, |G|]");
  }
  std::vector<std::size_t> indices(group.order());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  // Partial Fisher-Yates; draw i picks from the remaining tail.
  for (int i = 0; i < n; ++i) {
    const std::size_t remaining = indices.size() - static_cast<std::size_t>(i);
    const std::size_t j = static_cast<std::size_t>(i) + draw_index(seed, static_cast<std::uint64_t>(i), remaining);
    std::swap(indices[i], indices[j]);
  }
  std::vector<GroupElement> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(group.element(indices[i]));
  return out;
}

std::string to_string(const GroupElement& g) {
  if (const auto* d = std::get_if<DihedralElement>(&g)) {
    std::string s = d->inversion ? "i" : "";
    if (d->rotation == 1) s += "r";
    if (d->rotation > 1) s += "r" + std::to_string(d->rotation);
    return s.empty() ? "e" : s;
  }
  const auto& s = std::get<ShiftElement>(g);
  return "t(" + std::to_string(s.sx) + "," + std::to_string(s.sy) + ")";
}

GroupElement parse_element(std::string_view text, int nx, int ny) {
  static const std::array<std::string_view, 8> kNames{"e", "r", "r2", "r3", "i", "ir", "ir2", "ir3"};
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (text == kNames[i]) return DihedralElement{static_cast<int>(i % 4), i >= 4};
  }
  int sx = 0;
  int sy = 0;
  int consumed = 0;
  const std::string owned(text);
  if (std::sscanf(owned.c_str(), "t(%d,%d)%n", &sx, &sy, &consumed) == 2 &&
      consumed == static_cast<int>(owned.size())) {
    if (nx < 1 || ny < 1) throw Error(ErrorCode::kInvalidArgument, "shift needs lattice dimensions");
    return ShiftElement{mod(sx, nx), mod(sy, ny), nx, ny};
  }
  throw Error(ErrorCode::kInvalidArgument, "cannot parse group element '" + owned + "'");
}

namespace {

void check_element_grid(const GroupElement& g, const GridSpec& grid) {
  if (const auto* d = std::get_if<DihedralElement>(&g)) {
    if (d->rotation % 2 == 1 && grid.nx != grid.ny) {
      throw Error(ErrorCode::kIncompatibleGrid, "quarter-turn rotation requires a square grid");
    }
    return;
  }
  const auto& s = std::get<ShiftElement>(g);
  if (s.nx != grid.nx || s.ny != grid.ny) throw Error(ErrorCode::kIncompatibleGrid, "shift lattice does not match grid");
  if (s.sy != 0 && !grid.periodic_y()) throw Error(ErrorCode::kIncompatibleGrid, "y shift on a non-periodic axis");
}

// For every destination cell, the flat index of the source cell it reads.
std::vector<std::size_t> source_map(const GroupElement& g, const GridSpec& grid) {
  const int nx = grid.nx;
  const int ny = grid.ny;
  std::vector<std::size_t> map(grid.cells());
  if (const auto* s = std::get_if<ShiftElement>(&g)) {
    for (int iy = 0; iy < ny; ++iy) {
      const int sy = mod(iy - s->sy, ny);
      for (int ix = 0; ix < nx; ++ix) {
        map[static_cast<std::size_t>(iy) * nx + ix] = static_cast<std::size_t>(sy) * nx + mod(ix - s->sx, nx);
      }
    }
    return map;
  }
  // Doubled coordinates about the grid centre keep the point map integral.
  // The source of destination p is phi^-1 p = phi^T p.
  const ComponentMatrix phi = component_matrix(g);
  for (int iy = 0; iy < ny; ++iy) {
    const int y = 2 * iy - (ny - 1);
    for (int ix = 0; ix < nx; ++ix) {
      const int x = 2 * ix - (nx - 1);
      const int src_x = phi[0][0] * x + phi[1][0] * y;
      const int src_y = phi[0][1] * x + phi[1][1] * y;
      const int jx = (src_x + nx - 1) / 2;
      const int jy = (src_y + ny - 1) / 2;
      map[static_cast<std::size_t>(iy) * nx + ix] = static_cast<std::size_t>(jy) * nx + jx;
    }
  }
  return map;
}

}  // namespace

template <typename T>
FieldSet<T> detail::apply_field(const GroupElement& g, const FieldSet<T>& field) {
  const GridSpec& grid = field.grid();
  check_element_grid(g, grid);
  const std::size_t cells = grid.cells();
  const std::vector<std::size_t> map = source_map(g, grid);
  const ComponentMatrix phi = component_matrix(g);

  std::vector<T> out(field.data().size());
  auto relocate = [&](int src_component, int dst_component, int sign) {
    const auto src = field.plane(src_component);
    T* dst = out.data() + static_cast<std::size_t>(dst_component) * cells;
    if (sign > 0) {
      for (std::size_t c = 0; c < cells; ++c) dst[c] = src[map[c]];
    } else {
      for (std::size_t c = 0; c < cells; ++c) dst[c] = -src[map[c]];
    }
  };

  for (const auto& group : field.schema().groups()) {
    switch (group.kind) {
      case ChannelKind::kScalar:
        relocate(group.offset, group.offset, 1);
        break;
      case ChannelKind::kVector:
      case ChannelKind::kTensor: {
        const SignedPermutation p = group.kind == ChannelKind::kVector ? vector_action(phi) : tensor_action(phi);
        for (int a = 0; a < p.size; ++a) relocate(group.offset + p.source[a], group.offset + a, p.sign[a]);
        break;
      }
    }
  }
  return FieldSet<T>(grid, field.schema(), std::move(out), field.time_index());
}

template <typename T>
Window<T> apply_window(const GroupElement& g, const Window<T>& window) {
  std::vector<FieldSet<T>> frames;
  frames.reserve(window.length());
  for (const auto& f : window.frames()) frames.push_back(gavg::apply(g, f));
  return Window<T>(std::move(frames));
}

template FieldSet<float> detail::apply_field(const GroupElement&, const FieldSet<float>&);
template FieldSet<double> detail::apply_field(const GroupElement&, const FieldSet<double>&);
template Window<float> apply_window(const GroupElement&, const Window<float>&);
template Window<double> apply_window(const GroupElement&, const Window<double>&);

}  // namespace gavg
