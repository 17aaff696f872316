#include <gtest/gtest.h>

#include <map>
#include <random>

#include "gavg/group.hpp"
#include "test_support.hpp"

namespace gavg {
namespace {

using testing::bit_equal;
using testing::mixed_schema;
using testing::periodic_grid;
using testing::random_field;
using testing::random_window;
using testing::value_equal;

using Mat = std::array<std::array<int, 2>, 2>;

constexpr Mat kR{{{0, -1}, {1, 0}}};
constexpr Mat kI{{{-1, 0}, {0, 1}}};
constexpr Mat kId{{{1, 0}, {0, 1}}};

Mat mul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Mat transpose(const Mat& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

// I^i R^r built by repeated matrix products.
Mat matrix_of(const DihedralElement& d) {
  Mat m = kId;
  for (int k = 0; k < d.rotation; ++k) m = mul(m, kR);
  if (d.inversion) m = mul(kI, m);
  return m;
}

std::vector<GroupElement> d4() { return enumerate(GroupSpec{GroupKind::kD4}); }

TEST(Dihedral, EnumerationMatchesGenerators) {
  const auto all = d4();
  ASSERT_EQ(all.size(), 8u);
  const std::vector<std::string> names{"e", "r", "r2", "r3", "i", "ir", "ir2", "ir3"};
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(to_string(all[k]), names[k]);
  // All eight matrices are distinct.
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = a + 1; b < 8; ++b)
      EXPECT_NE(matrix_of(std::get<DihedralElement>(all[a])), matrix_of(std::get<DihedralElement>(all[b])));
}

TEST(Dihedral, SubgroupEnumeration) {
  const auto d2 = enumerate(GroupSpec{GroupKind::kD2});
  ASSERT_EQ(d2.size(), 4u);
  for (const auto& g : d2) EXPECT_EQ(std::get<DihedralElement>(g).rotation % 2, 0);
  const auto d1 = enumerate(GroupSpec{GroupKind::kD1});
  ASSERT_EQ(d1.size(), 2u);
  EXPECT_TRUE(is_identity(d1[0]));
  EXPECT_EQ(to_string(d1[1]), "i");
}

TEST(Dihedral, ComponentMatrixIsRepresentation) {
  for (const auto& g : d4()) EXPECT_EQ(component_matrix(g), matrix_of(std::get<DihedralElement>(g)));
}

TEST(Dihedral, ClosureIdentityInverseOverAllPairs) {
  const auto all = d4();
  const GroupSpec group{GroupKind::kD4};
  const GroupElement e = group.identity();
  int pairs = 0;
  for (const auto& a : all) {
    EXPECT_EQ(compose(a, e), a);
    EXPECT_EQ(compose(e, a), a);
    EXPECT_TRUE(is_identity(compose(a, inverse(a))));
    EXPECT_TRUE(is_identity(compose(inverse(a), a)));
    for (const auto& b : all) {
      const GroupElement ab = compose(a, b);
      EXPECT_TRUE(group.contains(ab));
      EXPECT_EQ(component_matrix(ab), mul(component_matrix(a), component_matrix(b)));
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 64);
}

TEST(Dihedral, Associativity) {
  const auto all = d4();
  for (const auto& a : all)
    for (const auto& b : all)
      for (const auto& c : all) EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
}

TEST(Dihedral, PresentationRelations) {
  const GroupElement r = DihedralElement{1, false};
  const GroupElement i = DihedralElement{0, true};
  const GroupElement ir = compose(i, r);
  EXPECT_TRUE(is_identity(compose(compose(r, r), compose(r, r))));
  EXPECT_TRUE(is_identity(compose(i, i)));
  EXPECT_TRUE(is_identity(compose(ir, ir)));
}

// Independent relocation: the value at centred position q lands at phi q;
// vectors become phi v and tensors phi D phi^T.
template <typename T>
FieldSet<T> oracle_apply(const DihedralElement& d, const FieldSet<T>& f) {
  const Mat phi = matrix_of(d);
  const int n = f.grid().nx;
  const Schema& s = f.schema();
  std::vector<T> out(f.data().size());
  auto idx = [&](int c, int iy, int ix) { return (static_cast<std::size_t>(c) * n + iy) * n + ix; };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int qx = 2 * ix - (n - 1);
      const int qy = 2 * iy - (n - 1);
      const int px = phi[0][0] * qx + phi[0][1] * qy;
      const int py = phi[1][0] * qx + phi[1][1] * qy;
      const int jx = (px + n - 1) / 2;
      const int jy = (py + n - 1) / 2;
      for (const auto& g : s.groups()) {
        const int o = g.offset;
        if (g.kind == ChannelKind::kScalar) {
          out[idx(o, jy, jx)] = f.at(o, iy, ix);
        } else if (g.kind == ChannelKind::kVector) {
          for (int a = 0; a < 2; ++a) {
            double v = 0.0;
            for (int b = 0; b < 2; ++b) v += phi[a][b] * static_cast<double>(f.at(o + b, iy, ix));
            out[idx(o + a, jy, jx)] = static_cast<T>(v);
          }
        } else {
          double D[2][2];
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) D[a][b] = f.at(o + 2 * a + b, iy, ix);
          const Mat pt = transpose(phi);
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              double v = 0.0;
              for (int c = 0; c < 2; ++c)
                for (int e = 0; e < 2; ++e) v += phi[a][c] * D[c][e] * pt[e][b];
              out[idx(o + 2 * a + b, jy, jx)] = static_cast<T>(v);
            }
          }
        }
      }
    }
  }
  return FieldSet<T>(f.grid(), s, std::move(out), f.time_index());
}

class DihedralApply : public ::testing::TestWithParam<int> {};

TEST_P(DihedralApply, MatchesRelocationOracle) {
  const GridSpec grid = periodic_grid(GetParam(), GetParam());
  const auto f = random_field<double>(grid, mixed_schema(), 5);
  for (const auto& g : d4()) {
    EXPECT_TRUE(value_equal(apply(g, f), oracle_apply(std::get<DihedralElement>(g), f))) << to_string(g);
  }
}

TEST_P(DihedralApply, HomomorphismOverAllPairsIsBitExact) {
  const GridSpec grid = periodic_grid(GetParam(), GetParam());
  const auto f = random_field<float>(grid, mixed_schema(), 9);
  for (const auto& a : d4()) {
    for (const auto& b : d4()) {
      EXPECT_TRUE(bit_equal(apply(compose(a, b), f), apply(a, apply(b, f)))) << to_string(a) << " " << to_string(b);
    }
  }
}

TEST_P(DihedralApply, InverseRestoresWindowBitExactly) {
  const GridSpec grid = periodic_grid(GetParam(), GetParam());
  const auto w = random_window<float>(grid, mixed_schema(), 3, 4);
  for (const auto& g : d4()) {
    const auto back = apply_window(g, apply_window(inverse(g), w));
    for (int k = 0; k < w.length(); ++k) EXPECT_TRUE(bit_equal(back[k], w[k]));
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, DihedralApply, ::testing::Values(2, 5, 8));

template <typename T>
FieldSet<T> uniform(const GridSpec& grid, const Schema& schema, std::vector<T> values) {
  std::vector<T> data;
  for (T v : values) data.insert(data.end(), grid.cells(), v);
  return FieldSet<T>(grid, schema, std::move(data));
}

TEST(ComponentMixing, QuarterTurnOfUniformVector) {
  const GridSpec grid = periodic_grid(4, 4);
  const Schema s = Schema::of({{"u", ChannelKind::kVector}});
  const auto out = apply(DihedralElement{1, false}, uniform<double>(grid, s, {1.0, 0.0}));
  EXPECT_TRUE(value_equal(out, uniform<double>(grid, s, {0.0, 1.0})));
}

TEST(ComponentMixing, QuarterTurnOfTensorMatchesWorkedMatrix) {
  const GridSpec grid = periodic_grid(3, 3);
  const Schema s = Schema::of({{"D", ChannelKind::kTensor}});
  const double a = 1.5, b = -0.25, c = 3.0, d = 7.0;
  const auto out = apply(DihedralElement{1, false}, uniform<double>(grid, s, {a, b, c, d}));
  // (D_yy, -D_yx; -D_xy, D_xx)
  EXPECT_TRUE(value_equal(out, uniform<double>(grid, s, {d, -c, -b, a})));
}

TEST(ComponentMixing, InversionFlipsXComponents) {
  const GridSpec grid = periodic_grid(3, 3);
  const Schema s = Schema::of({{"u", ChannelKind::kVector}, {"D", ChannelKind::kTensor}});
  const auto out = apply(DihedralElement{0, true}, uniform<double>(grid, s, {2.0, 3.0, 1.0, 2.0, 3.0, 4.0}));
  EXPECT_TRUE(value_equal(out, uniform<double>(grid, s, {-2.0, 3.0, 1.0, -2.0, -3.0, 4.0})));
}

TEST(Shift, TwoByTwoRemap) {
  const Schema s = Schema::of({{"a", ChannelKind::kScalar}});
  const FieldSet<double> f(periodic_grid(2, 2), s, {0, 1, 2, 3});
  const auto out = apply(ShiftElement{1, 0, 2, 2}, f);
  EXPECT_TRUE(bit_equal(out, FieldSet<double>(periodic_grid(2, 2), s, {1, 0, 3, 2})));
}

TEST(Shift, MovesValuesForward) {
  const GridSpec grid = periodic_grid(5, 3);
  const auto f = random_field<double>(grid, mixed_schema(), 2);
  const auto out = apply(ShiftElement{2, 1, 5, 3}, f);
  for (int c = 0; c < f.components(); ++c)
    for (int iy = 0; iy < 3; ++iy)
      for (int ix = 0; ix < 5; ++ix) EXPECT_EQ(out.at(c, (iy + 1) % 3, (ix + 2) % 5), f.at(c, iy, ix));
}

TEST(Shift, RandomPairsCommuteBitExactly) {
  const GridSpec grid = periodic_grid(7, 6);
  const GroupSpec torus = GroupSpec::for_grid(GroupKind::kTorus, grid);
  const auto f = random_field<float>(grid, mixed_schema(), 77);
  const auto a = sample(torus, 100, 1);
  const auto b = sample(torus, 100, 2);
  for (int k = 0; k < 100; ++k) {
    const auto ab = apply(a[k], apply(b[k], f));
    EXPECT_TRUE(bit_equal(ab, apply(b[k], apply(a[k], f))));
    EXPECT_TRUE(bit_equal(ab, apply(compose(a[k], b[k]), f)));
    EXPECT_EQ(compose(a[k], b[k]), compose(b[k], a[k]));
  }
}

TEST(Shift, GroupOrders) {
  const GridSpec grid = periodic_grid(6, 4);
  EXPECT_EQ(GroupSpec::for_grid(GroupKind::kTorus, grid).order(), 24u);
  EXPECT_EQ(GroupSpec::for_grid(GroupKind::kCircleX, grid).order(), 6u);
  const auto circle = enumerate(GroupSpec::for_grid(GroupKind::kCircleX, grid));
  for (const auto& g : circle) EXPECT_EQ(std::get<ShiftElement>(g).sy, 0);
}

TEST(Compatibility, Rejections) {
  const GridSpec rect = periodic_grid(4, 6);
  EXPECT_THROW(GroupSpec{GroupKind::kD4}.check_compatible(rect), Error);
  EXPECT_NO_THROW(GroupSpec{GroupKind::kD2}.check_compatible(rect));
  const auto f = random_field<float>(rect, mixed_schema(), 1);
  try {
    apply(DihedralElement{1, false}, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleGrid);
  }
  const GridSpec wall{4, 4, 1.0, 1.0, Boundary::kPeriodicXNeumannY};
  try {
    GroupSpec::for_grid(GroupKind::kTorus, wall).check_compatible(wall);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleGrid);
  }
  EXPECT_NO_THROW(GroupSpec::for_grid(GroupKind::kCircleX, wall).check_compatible(wall));
  try {
    compose(DihedralElement{1, false}, ShiftElement{1, 0, 4, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMixedGroup);
  }
}

TEST(Sampling, DrawsArePrefixStable) {
  const GroupSpec torus{GroupKind::kTorus, 8, 8};
  const auto short_draw = sample(torus, 10, 99);
  const auto long_draw = sample(torus, 50, 99);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(short_draw[k], long_draw[k]);
  EXPECT_NE(sample(torus, 50, 100), long_draw);
  EXPECT_THROW(sample(torus, 0, 1), Error);
}

TEST(Sampling, UniformOverD4) {
  const int n = 100000;
  const auto draws = sample(GroupSpec{GroupKind::kD4}, n, 12345);
  std::map<std::string, int> counts;
  for (const auto& g : draws) ++counts[to_string(g)];
  ASSERT_EQ(counts.size(), 8u);
  const double p = 1.0 / 8.0;
  const double expected = n * p;
  const double sigma = std::sqrt(n * p * (1 - p));
  double chi2 = 0.0;
  for (const auto& [name, count] : counts) {
    EXPECT_LE(std::abs(count - expected), 3 * sigma) << name;
    chi2 += (count - expected) * (count - expected) / expected;
  }
  // 99.9th percentile of chi-square with 7 degrees of freedom.
  EXPECT_LT(chi2, 24.32);
}

TEST(Sampling, DistinctDrawsArePermutations) {
  const GroupSpec torus{GroupKind::kTorus, 4, 3};
  const auto draws = sample_distinct(torus, 12, 5);
  std::map<std::string, int> counts;
  for (const auto& g : draws) ++counts[to_string(g)];
  EXPECT_EQ(counts.size(), 12u);
  EXPECT_THROW(sample_distinct(torus, 13, 5), Error);
}

TEST(Text, RoundTrip) {
  for (const auto& g : d4()) EXPECT_EQ(parse_element(to_string(g), 1, 1), g);
  const GroupElement s = ShiftElement{3, 2, 8, 5};
  EXPECT_EQ(parse_element(to_string(s), 8, 5), s);
  EXPECT_THROW(parse_element("q", 4, 4), Error);
}

}  // namespace
}  // namespace gavg
