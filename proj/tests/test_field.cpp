#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "gavg/field.hpp"
#include "gavg/trajectory_io.hpp"
#include "test_support.hpp"

namespace gavg {
namespace {

using testing::bit_equal;
using testing::mixed_schema;
using testing::periodic_grid;
using testing::random_field;
using testing::TempDir;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::kInvalidArgument;
}

TEST(Schema, AssignsContiguousOffsets) {
  const Schema s = mixed_schema();
  EXPECT_EQ(s.components(), 7);
  EXPECT_EQ(s.find("rho").offset, 0);
  EXPECT_EQ(s.find("u").offset, 1);
  EXPECT_EQ(s.find("D").offset, 3);
}

TEST(Schema, RejectsGapsAndDuplicates) {
  EXPECT_EQ(code_of([] { Schema({{"a", ChannelKind::kScalar, 0}, {"b", ChannelKind::kScalar, 2}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Schema::of({{"a", ChannelKind::kScalar}, {"a", ChannelKind::kVector}}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Schema, UnknownChannel) {
  EXPECT_EQ(code_of([] { mixed_schema().find("p"); }), ErrorCode::kUnknownChannel);
}

TEST(FieldSet, RejectsWrongSize) {
  EXPECT_EQ(code_of([] { FieldSet<float>(periodic_grid(4, 4), mixed_schema(), std::vector<float>(10)); }),
            ErrorCode::kShapeMismatch);
}

TEST(FieldSet, RejectsNonFinite) {
  std::vector<double> data(2 * 2, 0.0);
  data[3] = std::numeric_limits<double>::quiet_NaN();
  const Schema s = Schema::of({{"a", ChannelKind::kScalar}});
  EXPECT_EQ(code_of([&] { FieldSet<double>(periodic_grid(2, 2), s, data); }), ErrorCode::kNonFiniteValue);
  data[3] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { FieldSet<double>(periodic_grid(2, 2), s, data); }), ErrorCode::kNonFiniteValue);
}

TEST(FieldSet, LayoutIsChannelMajorRowMajor) {
  const Schema s = Schema::of({{"u", ChannelKind::kVector}});
  std::vector<double> data(2 * 3 * 2);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<double>(i);
  const FieldSet<double> f(periodic_grid(3, 2), s, data);
  EXPECT_EQ(f.at(0, 0, 2), 2.0);
  EXPECT_EQ(f.at(0, 1, 0), 3.0);
  EXPECT_EQ(f.at(1, 0, 0), 6.0);
  EXPECT_EQ(f.plane(1)[5], 11.0);
}

TEST(FieldSet, SpatialMeanPerComponentMatchesBruteForce) {
  const GridSpec g = periodic_grid(5, 3);
  const auto f = random_field<double>(g, mixed_schema(), 11);
  const auto means = spatial_mean(f, "u");
  ASSERT_EQ(means.size(), 2u);
  for (int c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) sum += f.at(1 + c, iy, ix);
    EXPECT_NEAR(means[c], sum / 15.0, 1e-15);
  }
}

TEST(FieldSet, CastRoundTrip) {
  const auto f = random_field<float>(periodic_grid(4, 4), mixed_schema(), 3, 7);
  const auto back = f.cast<double>().cast<float>();
  EXPECT_TRUE(bit_equal(f, back));
  EXPECT_EQ(back.time_index(), 7);
}

TEST(Window, RequiresConsecutiveFrames) {
  const GridSpec g = periodic_grid(4, 4);
  const Schema s = mixed_schema();
  EXPECT_EQ(code_of([&] {
              Window<float>({random_field<float>(g, s, 1, 0), random_field<float>(g, s, 2, 2)});
            }),
            ErrorCode::kTimeIndexGap);
  EXPECT_EQ(code_of([&] {
              Window<float>({random_field<float>(g, s, 1, 0), random_field<float>(periodic_grid(4, 5), s, 2, 1)});
            }),
            ErrorCode::kShapeMismatch);
}

TEST(Window, SlideDropsOldest) {
  const GridSpec g = periodic_grid(4, 4);
  const Schema s = mixed_schema();
  const Window<float> w({random_field<float>(g, s, 1, 3), random_field<float>(g, s, 2, 4)});
  const auto next = random_field<float>(g, s, 3, 5);
  const auto slid = slide_window(w, next);
  EXPECT_EQ(slid.length(), 2);
  EXPECT_EQ(slid[0].time_index(), 4);
  EXPECT_TRUE(bit_equal(slid.last(), next));
  EXPECT_EQ(code_of([&] { slide_window(w, random_field<float>(g, s, 3, 7)); }), ErrorCode::kTimeIndexGap);
}

TEST(Trajectory, TimeLookup) {
  const GridSpec g = periodic_grid(4, 4);
  const Schema s = mixed_schema();
  std::vector<FieldSet<double>> frames;
  for (int t = 5; t < 9; ++t) frames.push_back(random_field<double>(g, s, t, t));
  const Trajectory<double> traj(g, s, frames, 0.5);
  EXPECT_EQ(traj.at_time(7).time_index(), 7);
  EXPECT_EQ(code_of([&] { traj.at_time(9); }), ErrorCode::kMisalignment);
  const auto w = traj.window_ending_at(3, 2);
  EXPECT_EQ(w[0].time_index(), 7);
  EXPECT_EQ(w.last().time_index(), 8);
}

class TrajectoryIo : public ::testing::Test {
 protected:
  Trajectory<double> make() const {
    const GridSpec g{6, 4, 0.25, 0.5, Boundary::kPeriodicXNeumannY};
    std::vector<FieldSet<double>> frames;
    for (int t = 0; t < 3; ++t) frames.push_back(random_field<double>(g, mixed_schema(), 40 + t, 10 + t));
    return Trajectory<double>(g, mixed_schema(), frames, 0.125);
  }
  TempDir dir;
};

TEST_F(TrajectoryIo, DoubleRoundTripIsBitExact) {
  const auto traj = make();
  save_trajectory(traj, dir.path() / "t");
  const auto back = load_trajectory<double>(dir.path() / "t");
  EXPECT_EQ(back.grid(), traj.grid());
  EXPECT_EQ(back.schema(), traj.schema());
  EXPECT_EQ(back.dt(), traj.dt());
  ASSERT_EQ(back.size(), traj.size());
  for (int i = 0; i < traj.size(); ++i) {
    EXPECT_TRUE(bit_equal(back[i], traj[i]));
    EXPECT_EQ(back[i].time_index(), traj[i].time_index());
  }
}

TEST_F(TrajectoryIo, FloatRoundTripAndConvertingLoad) {
  const auto traj = make().cast<float>();
  save_trajectory(traj, dir.path() / "t");
  const auto same = load_trajectory<float>(dir.path() / "t");
  for (int i = 0; i < traj.size(); ++i) EXPECT_TRUE(bit_equal(same[i], traj[i]));
  const auto widened = load_trajectory<double>(dir.path() / "t");
  for (int i = 0; i < traj.size(); ++i) EXPECT_TRUE(bit_equal(widened[i], traj[i].cast<double>()));
}

TEST_F(TrajectoryIo, RejectsTrailingBytesAndMissingFiles) {
  save_trajectory(make(), dir.path() / "t");
  {
    std::ofstream out(dir.path() / "t" / "frames.bin", std::ios::binary | std::ios::app);
    out.put('x');
  }
  EXPECT_EQ(code_of([&] { load_trajectory<double>(dir.path() / "t"); }), ErrorCode::kIo);
  EXPECT_EQ(code_of([&] { load_trajectory<double>(dir.path() / "missing"); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace gavg
