/*
 * Copyright 2026 The NNC Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nnc/augment.hpp"
#include "nnc/error.hpp"
#include "nnc/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace nnc::augment {
namespace {

using cubes::voxel_index;

cubes::Voxels random_voxels(std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  cubes::Voxels v{};
  for (auto& x : v) x = u(rng);
  return v;
}

// new(t, y', x') = old(t, 9 - x', y'): motion along +x becomes motion along +y.
template <typename Block>
Block rotate90(const Block& in) {
  Block out{};
  for (int t = 0; t < cubes::kDepth; ++t) {
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 10; ++x) out[voxel_index(t, y, x)] = in[voxel_index(t, 9 - x, y)];
    }
  }
  return out;
}

int direction_bin(double dx, double dy) {
  const double len = std::hypot(dx, dy);
  if (std::abs(dx) < 1e-9 * len) dx = 0;
  if (std::abs(dy) < 1e-9 * len) dy = 0;
  double a = std::atan2(dy, dx);
  if (a < 0) a += 2 * std::numbers::pi;
  return static_cast<int>(std::floor(a / (std::numbers::pi / 4) + 1e-9)) % 8;
}

ActivationMaps random_maps(int rows, int cols, int channels, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  ActivationMaps m(rows, cols, channels);
  for (auto& v : m.values) v = u(rng);
  return m;
}

// Pinned from the first verified run on frame 0 of the synthetic benchmark.
constexpr double kHandcraftedSum = 172.62916247372777;
constexpr double kHandcraftedWeighted = 77920.373066045548;

GrayFrame benchmark_frame() { return generate(benchmark_spec()).frames.frames[0]; }

TEST(Location, Corners) {
  const auto a = location_encoding(0, 0);
  EXPECT_EQ(a[0], 1.0f);
  EXPECT_EQ(a[4], 1.0f);
  const auto b = location_encoding(11, 15);
  EXPECT_EQ(b[3], 1.0f);
  EXPECT_EQ(b[19], 1.0f);
}

TEST(Location, QuadrantBoundary) {
  const auto a = location_encoding(5, 7);
  const auto b = location_encoding(6, 8);
  EXPECT_EQ(a[0], 1.0f);
  EXPECT_EQ(b[3], 1.0f);
  EXPECT_EQ(b[0], 0.0f);
}

TEST(Location, ExactlyTwoOnesEverywhere) {
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 16; ++c) {
      const auto v = location_encoding(r, c);
      int ones = 0;
      for (float x : v) {
        EXPECT_TRUE(x == 0.0f || x == 1.0f);
        ones += x == 1.0f;
      }
      EXPECT_EQ(ones, 2);
      EXPECT_EQ(v[4 + (r / 3) * 4 + c / 4], 1.0f);
      EXPECT_EQ(v[(r / 6) * 2 + c / 8], 1.0f);
    }
  }
}

TEST(Location, OutOfRangeIsRejected) {
  EXPECT_THROW(location_encoding(12, 0), InputError);
  EXPECT_THROW(location_encoding(0, 16), InputError);
  EXPECT_THROW(location_encoding(-1, 3), InputError);
}

TEST(Direction, StaticCubeGivesZeros) {
  cubes::Voxels v;
  v.fill(0.3f);
  for (double x : mean_direction_features(v)) EXPECT_EQ(x, 0.0);
}

// Gradient mass in full columns at x = 2t: the whole patch moves +2 px per
// step (4 vectors), the two left sub-bins see t = 0,1,2 (2 vectors each) and
// the two right sub-bins t = 3,4 (1 vector each): 4 + 4 + 2 = 10 vectors of
// length 2, total 20, all at 0 degrees.
cubes::GradientVector translating_columns() {
  cubes::GradientVector g{};
  for (int t = 0; t < cubes::kDepth; ++t) {
    for (int y = 0; y < 10; ++y) g[voxel_index(t, y, 2 * t)] = 1.0;
  }
  return g;
}

TEST(Direction, TranslationAlongXFillsTheZeroDegreeBin) {
  const auto h = mean_direction_from_gradient(translating_columns());
  EXPECT_DOUBLE_EQ(h[0], 20.0);
  for (int b = 1; b < 8; ++b) EXPECT_EQ(h[b], 0.0) << "bin " << b;
  EXPECT_DOUBLE_EQ(h[8], 20.0);
}

TEST(Direction, QuarterTurnShiftsTwoBins) {
  const auto h = mean_direction_from_gradient(rotate90(translating_columns()));
  EXPECT_DOUBLE_EQ(h[2], 20.0);
  EXPECT_DOUBLE_EQ(h[8], 20.0);
  for (int b : {0, 1, 3, 4, 5, 6, 7}) EXPECT_EQ(h[b], 0.0) << "bin " << b;
}

TEST(Direction, RotationEquivarianceOnRandomCubes) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    auto v = random_voxels(seed);
    for (int turn = 0; turn < 4; ++turn) {
      const auto h = mean_direction_features(v);
      const auto r = mean_direction_features(rotate90(v));
      for (int b = 0; b < 8; ++b) EXPECT_NEAR(r[(b + 2) % 8], h[b], 1e-9) << "seed " << seed << " bin " << b;
      EXPECT_NEAR(r[8], h[8], 1e-9);
      v = rotate90(v);
    }
  }
}

TEST(Direction, MatchesCentreOfMassOracle) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const auto v = random_voxels(100 + seed);
    DirectionVector want{};
    const auto vectors = oracle::displacement_vectors(v);
    ASSERT_EQ(vectors.size(), 20u);
    for (const auto& [dx, dy] : vectors) {
      const double len = std::hypot(dx, dy);
      if (len == 0) continue;
      want[direction_bin(dx, dy)] += len;
      want[8] += len;
    }
    const auto got = mean_direction_features(v);
    for (int b = 0; b < 9; ++b) EXPECT_NEAR(got[b], want[b], 1e-12);
  }
}

TEST(Direction, EntriesAreNonNegative) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    for (double x : mean_direction_features(random_voxels(seed))) EXPECT_GE(x, 0.0);
  }
}

TEST(ResizeMaps, ConstantStaysConstant) {
  ActivationMaps m(13, 13, 4);
  std::fill(m.values.begin(), m.values.end(), 2.5f);
  const auto r = resize_activation_maps(m);
  EXPECT_EQ(r.rows, 12);
  EXPECT_EQ(r.cols, 16);
  EXPECT_EQ(r.channels, 4);
  for (float v : r.values) EXPECT_NEAR(v, 2.5f, 1e-5);
}

TEST(ResizeMaps, RampMatchesDirectBicubic) {
  ActivationMaps m(13, 13, 2);
  std::vector<float> plane(169);
  for (int y = 0; y < 13; ++y) {
    for (int x = 0; x < 13; ++x) {
      plane[y * 13 + x] = static_cast<float>(0.5 * x - 0.25 * y);
      m.cell(y, x)[0] = plane[y * 13 + x];
      m.cell(y, x)[1] = -plane[y * 13 + x];
    }
  }
  const auto r = resize_activation_maps(m);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      const double want = oracle::bicubic_sample(plane, 13, 13, 16, 12, x, y);
      EXPECT_NEAR(r.cell(y, x)[0], want, 1e-5);
      EXPECT_NEAR(r.cell(y, x)[1], -want, 1e-5);
    }
  }
}

TEST(ResizeMaps, ChannelsAreIndependent) {
  const auto m = random_maps(13, 13, kAppearanceChannels, 4);
  ActivationMaps p(13, 13, kAppearanceChannels);
  // Reverse channel order.
  for (int i = 0; i < 169; ++i) {
    for (int c = 0; c < kAppearanceChannels; ++c) {
      p.values[i * kAppearanceChannels + c] = m.values[i * kAppearanceChannels + (kAppearanceChannels - 1 - c)];
    }
  }
  const auto a = resize_activation_maps(m);
  const auto b = resize_activation_maps(p);
  ASSERT_EQ(a.channels, kAppearanceChannels);
  for (int i = 0; i < 192; ++i) {
    for (int c = 0; c < kAppearanceChannels; ++c) {
      EXPECT_EQ(b.values[i * kAppearanceChannels + c], a.values[i * kAppearanceChannels + (kAppearanceChannels - 1 - c)]);
    }
  }
  for (float v : a.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(ResizeMaps, WrongInputDimsAreRejected) {
  EXPECT_THROW(resize_activation_maps(ActivationMaps(12, 13, 256)), InputError);
  EXPECT_THROW(resize_activation_maps(ActivationMaps(12, 16, 256)), InputError);
}

TEST(Handcrafted, ConstantFrameGivesZeros) {
  const GrayFrame f(160, 120, 0, 0.4f);
  for (float v : handcrafted_appearance(f).values) EXPECT_EQ(v, 0.0f);
}

TEST(Handcrafted, InvariantToBrightnessOffset) {
  // Dyadic intensities keep the offset exact in floating point.
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> level(0, 128);
  GrayFrame a(160, 120);
  for (auto& p : a.pixels) p = static_cast<float>(level(rng)) / 256.0f;
  GrayFrame b = a;
  for (auto& p : b.pixels) p += 0.25f;
  const auto ha = handcrafted_appearance(a);
  const auto hb = handcrafted_appearance(b);
  for (std::size_t i = 0; i < ha.values.size(); ++i) {
    EXPECT_NEAR(ha.values[i], hb.values[i], 1e-5 * (1.0f + std::abs(ha.values[i])));
  }
}

TEST(Handcrafted, ShapeAndRegressionChecksum) {
  const auto maps = handcrafted_appearance(benchmark_frame());
  EXPECT_EQ(maps.rows, 12);
  EXPECT_EQ(maps.cols, 16);
  EXPECT_EQ(maps.channels, 256);
  double sum = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < maps.values.size(); ++i) {
    EXPECT_GE(maps.values[i], 0.0f);
    sum += maps.values[i];
    weighted += maps.values[i] * static_cast<double>(i % 997);
  }
  EXPECT_NEAR(sum, kHandcraftedSum, 1e-6 * kHandcraftedSum);
  EXPECT_NEAR(weighted, kHandcraftedWeighted, 1e-6 * kHandcraftedWeighted);
}

TEST(Handcrafted, RejectsWrongFrameSize) { EXPECT_THROW(handcrafted_appearance(GrayFrame(100, 100)), InputError); }

TEST(Providers, HandcraftedCoversOnlyItsFrames) {
  const auto seq = testing::random_sequence(160, 120, 3, 1);
  HandcraftedAppearanceProvider p(seq);
  EXPECT_TRUE(p.covers(2));
  EXPECT_FALSE(p.covers(3));
  EXPECT_THROW(p.provide(3), InputError);
  EXPECT_EQ(p.provide(1).values, handcrafted_appearance(seq.frames[1]).values);
}

TEST(NncfFile, RoundTripAndRandomAccess) {
  testing::TempDir dir;
  std::vector<ActivationMaps> frames;
  for (std::uint32_t i = 0; i < 3; ++i) frames.push_back(random_maps(12, 16, 256, i));
  write_nncf(dir / "f.nncf", frames);
  const auto provider = file_appearance_provider(dir / "f.nncf");
  EXPECT_TRUE(provider->covers(2));
  EXPECT_FALSE(provider->covers(3));
  EXPECT_EQ(provider->provide(2).values, frames[2].values);
  EXPECT_EQ(provider->provide(0).values, frames[0].values);
  EXPECT_THROW(provider->provide(3), InputError);
  EXPECT_EQ(testing::read_bytes(dir / "f.nncf").substr(0, 8), "NNCF" + testing::u32le(1));
}

TEST(NncfFile, ConvMapsAreResizedOnRead) {
  testing::TempDir dir;
  std::vector<ActivationMaps> frames{random_maps(13, 13, 256, 7), random_maps(13, 13, 256, 8)};
  write_nncf(dir / "conv.nncf", frames);
  FileAppearanceProvider provider(dir / "conv.nncf");
  EXPECT_EQ(provider.stored_rows(), 13);
  EXPECT_EQ(provider.frame_count(), 2);
  EXPECT_EQ(provider.read_raw(1).values, frames[1].values);
  EXPECT_EQ(provider.provide(1).values, resize_activation_maps(frames[1]).values);
}

TEST(NncfFile, TruncatedFileNamesExpectedAndActualSize) {
  testing::TempDir dir;
  std::vector<ActivationMaps> frames{random_maps(12, 16, 256, 1)};
  write_nncf(dir / "f.nncf", frames);
  auto bytes = testing::read_bytes(dir / "f.nncf");
  bytes.resize(bytes.size() - 10);
  testing::write_bytes(dir / "cut.nncf", bytes);
  const std::string expected = std::to_string(24 + 12 * 16 * 256 * 4);
  try {
    FileAppearanceProvider p(dir / "cut.nncf");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("expected " + expected + " bytes"), std::string::npos) << msg;
    EXPECT_NE(msg.find("got " + std::to_string(bytes.size())), std::string::npos) << msg;
  }
}

TEST(NncfFile, BadMagicVersionAndDims) {
  testing::TempDir dir;
  testing::write_bytes(dir / "magic.nncf", "NNCX" + std::string(20, '\0'));
  EXPECT_THROW(FileAppearanceProvider(dir / "magic.nncf"), FormatError);
  testing::write_bytes(dir / "version.nncf", "NNCF" + testing::u32le(2) + testing::u32le(0) +
                                                 testing::u32le(12) + testing::u32le(16) + testing::u32le(256));
  EXPECT_THROW(FileAppearanceProvider(dir / "version.nncf"), FormatError);
  testing::write_bytes(dir / "dims.nncf", "NNCF" + testing::u32le(1) + testing::u32le(0) + testing::u32le(10) +
                                              testing::u32le(10) + testing::u32le(256));
  EXPECT_THROW(FileAppearanceProvider(dir / "dims.nncf"), FormatError);
  EXPECT_THROW(FileAppearanceProvider(dir / "missing.nncf"), InputError);
}

cubes::SpatioTemporalCube active_cube(int row, int col) {
  // A bright square moving right through the cell.
  FrameSequence seq;
  for (int t = 0; t < 5; ++t) {
    GrayFrame f(160, 120, t, 0.2f);
    for (int y = row * 10 + 2; y < row * 10 + 8; ++y) {
      for (int x = col * 10 + t; x < col * 10 + t + 4; ++x) f.at(x, y) = 0.9f;
    }
    seq.frames.push_back(std::move(f));
  }
  return cubes::make_cube(seq, row, col, 4, 0.1);
}

TEST(AugmentCube, ZeroProviderLayout) {
  const auto cube = active_cube(0, 0);
  ASSERT_TRUE(cube.active);
  const auto a = augment_cube(cube, ZeroAppearanceProvider{});
  EXPECT_EQ(a.features.size(), 785u);
  for (int i = kAppearanceOffset; i < kFeatureDim; ++i) EXPECT_EQ(a.features[i], 0.0f);
  const auto loc = location_encoding(0, 0);
  for (int i = 0; i < kLocationDim; ++i) EXPECT_EQ(a.features[kLocationOffset + i], loc[i]);
}

TEST(AugmentCube, BlocksEqualTheSubOperations) {
  const auto cube = active_cube(7, 9);
  ASSERT_TRUE(cube.active);
  const auto maps = random_maps(12, 16, 256, 3);
  const auto a = augment_cube(cube, maps);
  EXPECT_EQ(a.grid_row, 7);
  EXPECT_EQ(a.grid_col, 9);
  EXPECT_EQ(a.end_frame, 4);
  for (int i = 0; i < kGradientDim; ++i) EXPECT_EQ(a.features[i], cube.features[i]);
  const auto loc = location_encoding(7, 9);
  for (int i = 0; i < kLocationDim; ++i) EXPECT_EQ(a.features[kLocationOffset + i], loc[i]);
  auto dir = mean_direction_features(cube.voxels);
  cubes::l2_normalize_in_place(std::span<double>(dir));
  for (int i = 0; i < kDirectionDim; ++i) EXPECT_FLOAT_EQ(a.features[kDirectionOffset + i], static_cast<float>(dir[i]));
  std::vector<float> app(maps.cell(7, 9).begin(), maps.cell(7, 9).end());
  cubes::l2_normalize_in_place(std::span<float>(app));
  for (int i = 0; i < kAppearanceChannels; ++i) EXPECT_FLOAT_EQ(a.features[kAppearanceOffset + i], app[i]);

  const auto raw = augment_cube(cube, maps, AugmentOptions{false, false});
  const auto dir_raw = mean_direction_features(cube.voxels);
  for (int i = 0; i < kDirectionDim; ++i) EXPECT_FLOAT_EQ(raw.features[kDirectionOffset + i], static_cast<float>(dir_raw[i]));
  for (int i = 0; i < kAppearanceChannels; ++i) EXPECT_EQ(raw.features[kAppearanceOffset + i], maps.cell(7, 9)[i]);
}

TEST(AugmentCube, ChangingOneSourceTouchesOnlyItsBlock) {
  const auto cube = active_cube(3, 4);
  auto maps = random_maps(12, 16, 256, 5);
  const auto before = augment_cube(cube, maps);
  for (float& v : maps.cell(3, 4)) v *= -3.0f;
  const auto after = augment_cube(cube, maps);
  for (int i = 0; i < kAppearanceOffset; ++i) EXPECT_EQ(before.features[i], after.features[i]);
  EXPECT_NE(before.features[kAppearanceOffset], after.features[kAppearanceOffset]);
}

TEST(AugmentCube, RejectsStaticCubesAndBadGrids) {
  FrameSequence seq;
  for (int t = 0; t < 5; ++t) seq.frames.emplace_back(160, 120, t, 0.5f);
  const auto still = cubes::make_cube(seq, 0, 0, 4, 0.1);
  EXPECT_FALSE(still.active);
  EXPECT_THROW(augment_cube(still, ZeroAppearanceProvider{}), InputError);
  EXPECT_THROW(augment_cube(active_cube(0, 0), ActivationMaps(13, 13, 256)), InputError);
}

}  // namespace
}  // namespace nnc::augment
